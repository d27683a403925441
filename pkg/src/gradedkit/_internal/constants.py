GRADEDKIT_NAMESPACE = "gradedkit"
GRADEDKIT_SERVICE_NAME = "gradedkit"
GRADEDKIT_REPORT_SCHEMA = "gradedkit.report/1"
GRADEDKIT_VERSION = "0.1.0"

# Span names, one per verification entry point
GRADEDKIT_SQUARE_ZERO_SPAN_NAME = "gradedkit.check.square_zero"
GRADEDKIT_VERIFY_LINFTY_SPAN_NAME = "gradedkit.verify.linfty"
GRADEDKIT_VERIFY_MORPHISM_SPAN_NAME = "gradedkit.verify.morphism"
GRADEDKIT_VERIFY_RETRACT_SPAN_NAME = "gradedkit.verify.retract"
GRADEDKIT_TRANSFER_SPAN_NAME = "gradedkit.transfer"
GRADEDKIT_NORMALIZE_SPAN_NAME = "gradedkit.normalize"
GRADEDKIT_VERIFY_NONDEGENERATE_SPAN_NAME = "gradedkit.verify.nondegenerate"
GRADEDKIT_VERIFY_CLOSURE_SPAN_NAME = "gradedkit.verify.closure_shift2"
GRADEDKIT_VERIFY_ZERO_SHIFTED_SPAN_NAME = "gradedkit.verify.zero_shifted"
GRADEDKIT_VERIFY_TRANSITIVE_SPAN_NAME = "gradedkit.verify.transitive_pairing"
GRADEDKIT_VERIFY_ISOTROPIC_SPAN_NAME = "gradedkit.verify.isotropic"
GRADEDKIT_VERIFY_COURANT_SPAN_NAME = "gradedkit.verify.courant"
GRADEDKIT_VERIFY_EXACT_SPAN_NAME = "gradedkit.verify.exact"
GRADEDKIT_VERIFY_COURANT_MORPHISM_SPAN_NAME = "gradedkit.verify.courant_morphism"
GRADEDKIT_VERIFY_BUNDLE_TWIST_SPAN_NAME = "gradedkit.verify.bundle_twist"
GRADEDKIT_VERIFY_DIRAC_SPAN_NAME = "gradedkit.verify.dirac"
GRADEDKIT_COISOTROPIC_SPAN_NAME = "gradedkit.verify.coisotropic"
GRADEDKIT_COMMAND_SPAN_NAME = "gradedkit.command"

# Engine bounds
GRADEDKIT_MIN_DEGREE = -8
GRADEDKIT_MAX_DEGREE = 8
GRADEDKIT_MAX_ARITY = 10

# Report anchors naming the identity each check instance exercises
ANCHOR_SQUARE_ZERO = "square-zero"
ANCHOR_LEIBNIZ = "leibniz-rule"
ANCHOR_STRUCTURE = "structure"
ANCHOR_ROUND_TRIP = "ce-round-trip"
ANCHOR_MORPHISM_CHAIN = "morphism-chain-map"
ANCHOR_MORPHISM_ANCHOR = "morphism-anchor"
ANCHOR_MORPHISM_BRACKETS = "morphism-brackets"
ANCHOR_RETRACT = "retract-identities"
ANCHOR_POTENTIAL = "potential-differential"
ANCHOR_CLOSURE_TOWER = "closure-tower"
ANCHOR_BICOMPLEX = "bicomplex"
ANCHOR_OPERATOR_SYMBOL = "operator-symbol"
ANCHOR_NONDEGENERATE = "nondegeneracy"
ANCHOR_CLOSURE_TRIPLE = "closure-triple-bracket"
ANCHOR_CLOSURE_MIXED = "closure-mixed-bracket"
ANCHOR_CLOSURE_PAIRING = "closure-pairing"
ANCHOR_CLOSURE_DIFFERENTIAL = "closure-differential"
ANCHOR_BRACKET_SKEW = "bracket-skew"
ANCHOR_LINFTY = "linfty"
ANCHOR_FOLIATION_CLOSED = "foliation-closed"
ANCHOR_FOLIATION_BASIC = "foliation-basic"
ANCHOR_FOLIATION_REGULAR = "foliation-regular"
ANCHOR_FOLIATION_TRANSVERSE = "foliation-transverse"
ANCHOR_TRANSITIVE = "transitive-pairing"
ANCHOR_ISOTROPIC = "isotropic"
ANCHOR_COURANT_LEIBNIZ = "courant-leibniz"
ANCHOR_COURANT_SYMMETRIC = "courant-symmetric-part"
ANCHOR_COURANT_INVARIANCE = "courant-invariance"
ANCHOR_COURANT_JACOBI = "courant-jacobi"
ANCHOR_COURANT_PAIRING = "courant-pairing"
ANCHOR_COURANT_CLOSED = "courant-closed-4form"
ANCHOR_EXACT = "exact-sequence"
ANCHOR_MORPHISM_ORTHOGONAL = "courant-morphism-orthogonal"
ANCHOR_MORPHISM_BRACKET_DEFECT = "courant-morphism-bracket"
ANCHOR_MORPHISM_FOUR_FORM = "courant-morphism-4form"
ANCHOR_TWO_MORPHISM = "courant-2-morphism"
ANCHOR_BUNDLE_TWIST = "bundle-twist-cocycle"
ANCHOR_DIRAC_LAGRANGIAN = "dirac-lagrangian"
ANCHOR_DIRAC_SUPPORT = "dirac-support"
ANCHOR_DIRAC_INVOLUTIVE = "dirac-involutive"
ANCHOR_COISOTROPIC = "coisotropic"
ANCHOR_ROUND_TRIP_COURANT = "courant-round-trip"
