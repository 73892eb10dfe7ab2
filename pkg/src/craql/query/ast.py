"""Query IR: patterns, expressions, statements, documents, and the unparser.

Position fields never participate in equality, so a document compares equal
to the reparse of its own unparse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Pos = tuple[int, int]

MOD_NONE = "none"
MOD_OUTMOST = "outmost"
MOD_INMOST = "inmost"

INPUT_DEFAULT = "default"
INPUT_IN = "in"
INPUT_DIRECTLY_IN = "directly-in"

SINGLE = "single"
STAR = "star"
ELLIPSIS = "ellipsis"


class Expr:
    pass


@dataclass(eq=True)
class IntLit(Expr):
    value: int
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class StrLit(Expr):
    value: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class BoolLit(Expr):
    value: bool
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class VarRef(Expr):
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class TypeLit(Expr):
    """A braced node-type reference in argument position, e.g. contains({X})."""

    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class CountStar(Expr):
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class PropAccess(Expr):
    """base.name or base.{name}; resolution is late (property, then type)."""

    base: Expr
    name: str
    braced: bool
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class Call(Expr):
    name: str
    receiver: Expr | None
    args: list[Expr]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class Infix(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class Prefix(Expr):
    op: str
    operand: Expr
    pos: Pos = field(default=(0, 0), compare=False)


class Stmt:
    pass


@dataclass(eq=True)
class Assign(Stmt):
    target: str
    op: str  # = | += | -=
    value: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class IncrDecr(Stmt):
    target: str
    op: str  # ++ | --
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class If(Stmt):
    cond: Expr
    then_body: list[Stmt]
    else_body: list[Stmt] | None
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class While(Stmt):
    cond: Expr
    body: list[Stmt]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class InputSpec:
    kind: str  # default | in | directly-in
    expr: Expr | None = None
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class Pattern:
    kind: str  # single | star | ellipsis
    type1: str
    var1: str
    type2: str | None = None
    var2: str | None = None
    pos: Pos = field(default=(0, 0), compare=False)

    def variables(self) -> list[str]:
        return [self.var1] if self.kind == SINGLE else [self.var1, self.var2]


@dataclass(eq=True)
class SelectQuery:
    pattern: Pattern
    modifier: str
    input: InputSpec
    where: Expr | None
    body: list[Stmt]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class SelectStmt(Stmt):
    query: SelectQuery
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class CallQuery(Stmt):
    label: str
    input: InputSpec | None
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class PrintStmt(Stmt):
    value: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class ExprStmt(Stmt):
    value: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(eq=True)
class QueryDocument:
    queries: list[tuple[str | None, SelectQuery]]
    source: str = field(default="<string>", compare=False)

    def labels(self) -> dict[str, SelectQuery]:
        return {label: q for label, q in self.queries if label is not None}

    @property
    def entry(self) -> SelectQuery:
        return self.queries[0][1]


# ---------------------------------------------------------------------------
# Unparser. parse(unparse(parse(text))) must equal parse(text).
# ---------------------------------------------------------------------------

_PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6,
}


def unparse_expr(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, StrLit):
        return '"' + e.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, TypeLit):
        return "{" + e.name + "}"
    if isinstance(e, CountStar):
        return "count(*)"
    if isinstance(e, PropAccess):
        base = unparse_expr(e.base, 10)
        return f"{base}.{{{e.name}}}" if e.braced else f"{base}.{e.name}"
    if isinstance(e, Call):
        args = ", ".join(unparse_expr(a) for a in e.args)
        if e.receiver is None:
            return f"{e.name}({args})"
        return f"{unparse_expr(e.receiver, 10)}.{e.name}({args})"
    if isinstance(e, Prefix):
        text = e.op + unparse_expr(e.operand, 9)
        return f"({text})" if parent_prec > 8 else text
    if isinstance(e, Infix):
        prec = _PRECEDENCE[e.op]
        text = f"{unparse_expr(e.lhs, prec)} {e.op} {unparse_expr(e.rhs, prec + 1)}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"unknown expression {e!r}")


def _unparse_input(spec: InputSpec | None) -> str:
    if spec is None or spec.kind == INPUT_DEFAULT:
        return ""
    keyword = "directly in" if spec.kind == INPUT_DIRECTLY_IN else "in"
    return f" {keyword} {unparse_expr(spec.expr)}"


def unparse_stmt(s: Stmt, indent: int) -> str:
    pad = "  " * indent
    if isinstance(s, Assign):
        return f"{pad}{s.target} {s.op} {unparse_expr(s.value)};"
    if isinstance(s, IncrDecr):
        return f"{pad}{s.target}{s.op};"
    if isinstance(s, If):
        out = f"{pad}if ({unparse_expr(s.cond)}) {{\n"
        out += "".join(unparse_stmt(t, indent + 1) + "\n" for t in s.then_body)
        out += pad + "}"
        if s.else_body is not None:
            out += " else {\n"
            out += "".join(unparse_stmt(t, indent + 1) + "\n" for t in s.else_body)
            out += pad + "}"
        return out
    if isinstance(s, While):
        out = f"{pad}while ({unparse_expr(s.cond)}) {{\n"
        out += "".join(unparse_stmt(t, indent + 1) + "\n" for t in s.body)
        return out + pad + "}"
    if isinstance(s, SelectStmt):
        return unparse_select(s.query, indent)
    if isinstance(s, CallQuery):
        return f"{pad}callquery({s.label}){_unparse_input(s.input)};"
    if isinstance(s, PrintStmt):
        return f"{pad}print({unparse_expr(s.value)});"
    if isinstance(s, ExprStmt):
        return f"{pad}{unparse_expr(s.value)};"
    raise TypeError(f"unknown statement {s!r}")


def unparse_select(q: SelectQuery, indent: int = 0, label: str | None = None) -> str:
    pad = "  " * indent
    p = q.pattern
    if p.kind == SINGLE:
        pattern = f"({{{p.type1}}} {p.var1})"
    else:
        op = "*" if p.kind == STAR else "..."
        pattern = f"({{{p.type1}}} {p.var1} {op} {{{p.type2}}} {p.var2})"
    head = pad
    if label is not None:
        head += f"{label} : "
    head += "select "
    if q.modifier != MOD_NONE:
        head += q.modifier + " "
    head += pattern + _unparse_input(q.input)
    if q.where is not None:
        head += f"\n{pad}where {unparse_expr(q.where)}"
    out = head + " {\n"
    out += "".join(unparse_stmt(s, indent + 1) + "\n" for s in q.body)
    return out + pad + "}"


def unparse_document(doc: QueryDocument) -> str:
    parts = [unparse_select(q, 0, label) for label, q in doc.queries]
    return "\n\n".join(parts) + "\n"
