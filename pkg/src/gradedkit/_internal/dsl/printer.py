"""
Canonical printing of structure documents; ``parse_spec(print_spec(doc)) == doc``.
"""

from gradedkit._internal.dsl.document import Bundle, FormMap, SectionMap, SpecDocument


def _poly(value) -> str:
    return str(value)


def _quoted(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _names(names) -> str:
    return ", ".join(names)


def _section(values: SectionMap) -> str:
    return "{" + ", ".join(f"{name}: {_poly(c)}" for name, c in values.items()) + "}"


def _form(values: FormMap) -> str:
    return "{" + ", ".join(f"({_names(key)}): {_poly(c)}" for key, c in values.items()) + "}"


def _bundle(keyword: str, name: str, bundle: Bundle) -> str:
    return f"{keyword} {name} degree {bundle.degree} [{_names(bundle.basis)}]"


def print_spec(doc: SpecDocument) -> str:
    """Render a document with one statement per line, declarations before their uses"""
    lines = [f"ring {_names(doc.ring.names)}".rstrip(), f"kind {doc.kind}"]
    if doc.label:
        lines.append(f"label {_quoted(doc.label)}")
    if doc.expect:
        lines.append(f"expect {doc.expect}")
    if doc.shift is not None:
        lines.append(f"shift {doc.shift}")
    lines += [f"{role} {_quoted(path)}" for role, path in doc.references.items()]
    lines += [_bundle("bundle", name, bundle) for name, bundle in doc.bundles.items()]
    lines += [_bundle("summand", name, bundle) for name, bundle in doc.summands.items()]
    if doc.standard:
        lines.append("standard")
    if doc.pairing is not None:
        rows = ", ".join("[" + ", ".join(_poly(c) for c in row) + "]" for row in doc.pairing)
        lines.append(f"pairing [{rows}]")
    lines += [f"anchor {name} = {_section(v)}" for name, v in doc.anchors.items()]
    lines += [f"differential {name} = {_section(v)}" for name, v in doc.differentials.items()]
    lines += [f"bracket ({_names(key)}) = {_section(v)}" for key, v in doc.brackets.items()]
    lines += [f"form {name} = {_form(v)}" for name, v in doc.forms.items()]
    if doc.twist is not None:
        lines.append(f"twist {doc.twist}")
    lines += [f"phi {name} = {_form(v)}" for name, v in doc.phi.items()]
    lines += [f"psi ({_names(key)}) = {_form(v)}" for key, v in doc.psi.items()]
    lines += [f"connection ({_names(key)}) = {_section(v)}" for key, v in doc.connection.items()]
    lines += [f"generator {_section(g)}" for g in doc.generators]
    if doc.support:
        lines.append(f"support [{_names(doc.support)}]")
    if doc.bivector is not None:
        lines.append(f"bivector {_form(doc.bivector)}")
    if doc.kernel:
        lines.append(f"kernel [{_names(doc.kernel)}]")
    for keyword, table in (("include", doc.include), ("project", doc.project), ("homotopy", doc.homotopy)):
        lines += [f"{keyword} {name} = {_section(v)}" for name, v in table.items()]
    for key, v in doc.maps.items():
        if len(key) == 1:
            lines.append(f"map {key[0]} = {_section(v)}")
        else:
            lines.append(f"component ({_names(key)}) = {_section(v)}")
    if doc.closed is not None:
        lines.append(f"closed {doc.closed}")
    lines += [f"mixed ({_names(key)}) = {_poly(c)}" for key, c in doc.mixed.items()]
    return "\n".join(lines) + "\n"
