"""
Line-oriented grammar of ``.gk`` documents.

Every non-blank line holds one statement introduced by a keyword; ``#`` starts a comment.
The keyword selects the statement parser, so no statement needs backtracking. Polynomial
expressions use infix notation over the declared coordinates:

    ring x, y
    kind linfty
    label "sl2 over Q[x, y]"
    bundle L0 degree 0 [h, e, f]
    bracket (h, e) = {e: 2}
    anchor e = {x: y^2 - 1/2*x}
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

import pyparsing as pp

from gradedkit._internal.errors import ParseError

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

S = pp.Suppress
K = pp.Keyword


# Expression nodes


@dataclass(frozen=True)
class Number:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    loc: int


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple


def _number(string, loc, tokens):
    _, _, denominator = tokens[0].partition("/")
    if denominator and int(denominator) == 0:
        raise pp.ParseException(string, loc, "Zero denominator")
    return Number(Fraction(tokens[0]))


def _name(string, loc, tokens):
    return Name(tokens[0], loc)


def _unary(tokens):
    sign, operand = tokens[0]
    return operand if sign == "+" else Apply("neg", (operand,))


def _power(tokens):
    items = list(tokens[0])
    node = items[-1]
    for base in reversed(items[:-2:2]):
        node = Apply("pow", (base, node))
    return node


def _left(tokens):
    items = list(tokens[0])
    node = items[0]
    for op, operand in zip(items[1::2], items[2::2]):
        node = Apply(op, (node, operand))
    return node


IDENT = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*").set_name("identifier")
NUMBER = pp.Regex(r"\d+(/\d+)?").set_name("number").set_parse_action(_number)
INTEGER = pp.Regex(r"[+-]?\d+").set_name("integer").set_parse_action(lambda t: int(t[0]))
QUOTED = pp.QuotedString('"', esc_char="\\").set_name("quoted string")

VARIABLE = IDENT.copy().set_parse_action(_name)
EXPRESSION = pp.infix_notation(
    NUMBER | VARIABLE,
    [
        (pp.one_of("^ **"), 2, pp.OpAssoc.RIGHT, _power),
        (pp.one_of("+ -"), 1, pp.OpAssoc.RIGHT, _unary),
        (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, _left),
        (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _left),
    ],
).set_name("polynomial")

NAME_LIST = pp.Group(S("[") - pp.Opt(pp.DelimitedList(IDENT)) - S("]")).set_name("name list")
NAME_TUPLE = pp.Group(S("(") - pp.DelimitedList(IDENT) - S(")")).set_name("name tuple")

SECTION_ENTRY = pp.Group(IDENT + S(":") - EXPRESSION)
SECTION = pp.Group(S("{") - pp.Opt(pp.DelimitedList(SECTION_ENTRY)) - S("}")).set_name("section literal")

FORM_ENTRY = pp.Group(NAME_TUPLE + S(":") - EXPRESSION)
FORM = pp.Group(S("{") - pp.Opt(pp.DelimitedList(FORM_ENTRY)) - S("}")).set_name("form literal")

ROW = pp.Group(S("[") - pp.Opt(pp.DelimitedList(EXPRESSION)) - S("]")).set_name("matrix row")
MATRIX = pp.Group(S("[") - pp.Opt(pp.DelimitedList(ROW)) - S("]")).set_name("matrix literal")

EQ = S("=")

KINDS = ("linfty", "courant", "dirac", "symplectic", "retract", "morphism")
VERDICTS = ("pass", "fail", "strict-pass", "sampled-pass")

STATEMENTS: dict[str, pp.ParserElement] = {
    "ring": pp.Opt(pp.DelimitedList(IDENT)),
    "kind": pp.one_of(" ".join(KINDS), as_keyword=True).set_name("structure kind"),
    "label": QUOTED,
    "expect": pp.one_of(" ".join(VERDICTS), as_keyword=True).set_name("verdict"),
    "shift": INTEGER,
    "source": QUOTED,
    "target": QUOTED,
    "bundle": IDENT - S(K("degree")) - INTEGER - NAME_LIST,
    "summand": IDENT - S(K("degree")) - INTEGER - NAME_LIST,
    "anchor": IDENT - EQ - SECTION,
    "differential": IDENT - EQ - SECTION,
    "bracket": NAME_TUPLE - EQ - SECTION,
    "pairing": MATRIX,
    "form": IDENT - EQ - FORM,
    "phi": IDENT - EQ - FORM,
    "psi": NAME_TUPLE - EQ - FORM,
    "standard": pp.Empty(),
    "twist": IDENT,
    "connection": NAME_TUPLE - EQ - SECTION,
    "generator": SECTION,
    "support": NAME_LIST,
    "bivector": FORM,
    "kernel": NAME_LIST,
    "include": IDENT - EQ - SECTION,
    "project": IDENT - EQ - SECTION,
    "homotopy": IDENT - EQ - SECTION,
    "map": IDENT - EQ - SECTION,
    "component": NAME_TUPLE - EQ - SECTION,
    "mixed": NAME_TUPLE - EQ - EXPRESSION,
    "closed": INTEGER,
}

KEYWORD = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_-]*)")

_PARSERS = {keyword: K(keyword) - body for keyword, body in STATEMENTS.items()}


@dataclass(frozen=True)
class Statement:
    """One parsed line: its keyword, the parsed tokens after it, and its position"""

    keyword: str
    tokens: tuple
    line: int
    text: str

    def error(self, message: str, loc: int = 0, expected: tuple[str, ...] = ()) -> ParseError:
        return ParseError(message, self.line, loc + 1, expected)


def _freeze(value):
    if isinstance(value, pp.ParseResults):
        return tuple(_freeze(v) for v in value)
    return value


def _expected(exc: pp.ParseBaseException) -> tuple[str, ...]:
    element = exc.parser_element
    if element is None:
        return ()
    name = getattr(element, "customName", None) or str(element)
    return (name.strip("'\""),)


def _strip_comment(text: str) -> str:
    quoted = escaped = False
    for position, char in enumerate(text):
        if escaped:
            escaped = False
        elif char == "\\" and quoted:
            escaped = True
        elif char == '"':
            quoted = not quoted
        elif char == "#" and not quoted:
            return text[:position]
    return text


def parse_statements(text: str) -> list[Statement]:
    """
    Split a document into statements.

    Raises:
        ParseError: with the line, column and expected tokens of the first syntax error
    """
    statements = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        head = KEYWORD.match(line)
        offset = len(line) - len(line.lstrip())
        keyword = head.group(1) if head else ""
        if keyword not in _PARSERS:
            raise ParseError(f"Unknown statement {keyword!r}", number, offset + 1, tuple(sorted(STATEMENTS)))
        try:
            tokens = _PARSERS[keyword].parse_string(line, parse_all=True)
        except pp.ParseBaseException as exc:
            raise ParseError(exc.msg, number, exc.col, _expected(exc)) from None
        statements.append(Statement(keyword, _freeze(tokens)[1:], number, line))
    logger.debug("parsed %d statements", len(statements))
    return statements
