from ._internal.config import (
    configure,
    get_config,
    get_tracer_provider,
    override,
)
from ._internal.errors import (
    GradedKitError,
    IterationCapError,
    KindMismatchError,
    MissingValueError,
    NotExpressibleError,
    ParseError,
    ShapeError,
)
from ._internal.core.verdict import (
    Check,
    CheckReport,
    Verdict,
)
from ._internal.core.ring import (
    BaseForm,
    BaseRing,
    VectorField,
)
from ._internal.core.algebroid import (
    LinftyAlgebroid,
    LinftyMorphism,
    Section,
    build_ce_differential,
    extract_brackets,
    verify_linfty,
    verify_morphism,
)
from ._internal.core.transfer import (
    DeformationRetract,
    LinearMap,
    transfer_structure,
    verify_retract,
    verify_transfer,
)
from ._internal.core.forms import (
    ClosedFormsRetract,
    FormsBicomplex,
    NormalizedClosedForm,
    normalize_closed_form,
    pullback_form,
    realize_closed_form,
)
from ._internal.core.symplectic import (
    IsotropicStructure,
    ShiftedSymplecticData,
    verify_closure_shift2,
    verify_isotropic,
    verify_nondegenerate,
    verify_transitive_pairing,
    verify_zero_shifted,
)
from ._internal.core.courant import (
    CourantData,
    CourantMorphism,
    MetricConnection,
    courant_to_symplectic,
    make_h_twist,
    make_standard,
    symplectic_to_courant,
    verify_courant_axioms,
    verify_courant_morphism,
)
from ._internal.core.dirac import (
    DiracData,
    Multivector,
    poisson_graph,
    schouten_bracket,
    tensor_dirac,
    verify_dirac,
)
from ._internal.dsl.document import (
    SpecDocument,
    load_document,
    parse_spec,
)
from ._internal.dsl.printer import (
    print_spec,
)
from ._internal.report import (
    Report,
    emit_report,
)
from ._internal.commands import (
    get_command,
    run_command,
)

__all__ = [
    # Configuration
    "configure",
    "get_config",
    "get_tracer_provider",
    "override",
    # Errors
    "GradedKitError",
    "IterationCapError",
    "KindMismatchError",
    "MissingValueError",
    "NotExpressibleError",
    "ParseError",
    "ShapeError",
    # Verdicts
    "Check",
    "CheckReport",
    "Verdict",
    # Base geometry
    "BaseForm",
    "BaseRing",
    "VectorField",
    # L-infinity algebroids
    "LinftyAlgebroid",
    "LinftyMorphism",
    "Section",
    "build_ce_differential",
    "extract_brackets",
    "verify_linfty",
    "verify_morphism",
    # Homotopy transfer
    "DeformationRetract",
    "LinearMap",
    "transfer_structure",
    "verify_retract",
    "verify_transfer",
    # Forms bicomplex
    "ClosedFormsRetract",
    "FormsBicomplex",
    "NormalizedClosedForm",
    "normalize_closed_form",
    "pullback_form",
    "realize_closed_form",
    # Shifted symplectic
    "IsotropicStructure",
    "ShiftedSymplecticData",
    "verify_closure_shift2",
    "verify_isotropic",
    "verify_nondegenerate",
    "verify_transitive_pairing",
    "verify_zero_shifted",
    # Courant
    "CourantData",
    "CourantMorphism",
    "MetricConnection",
    "courant_to_symplectic",
    "make_h_twist",
    "make_standard",
    "symplectic_to_courant",
    "verify_courant_axioms",
    "verify_courant_morphism",
    # Dirac
    "DiracData",
    "Multivector",
    "poisson_graph",
    "schouten_bracket",
    "tensor_dirac",
    "verify_dirac",
    # Documents and reports
    "SpecDocument",
    "load_document",
    "parse_spec",
    "print_spec",
    "Report",
    "emit_report",
    "get_command",
    "run_command",
]
