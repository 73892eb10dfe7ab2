"""The query evaluator: set selection with pruning, expression evaluation,
the builtin function library, and the imperative statement interpreter.

Selection semantics, in one place:

* The default input is the project's compilation-unit roots, and a root is
  itself a candidate when its type matches. An explicit `in`/`directly in`
  input selects among the *proper* descendants of each input node.
* Candidates are enumerated pre-order. A candidate that matches the pattern
  type has the where clause evaluated against it; a passing candidate becomes
  a row and its body runs immediately (count(*) sees rows collected so far).
* `outmost` stops descent below a yielded row, so a deeper same-type node is
  excluded only when an *accepted* ancestor interposes; a candidate that
  fails the where clause does not shadow anything below it.
* `inmost` drops any candidate with a same-type node anywhere below it,
  regardless of where outcomes.
* `directly in` prunes the walk at any node whose concrete type equals the
  input node's concrete type; such a node is still processed as a candidate
  before the cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from craql.astcore import (
    ProjectAst,
    child_ids,
    node_depth,
    source_text,
)
from craql.query.ast import (
    Assign,
    BoolLit,
    Call,
    CallQuery,
    CountStar,
    ELLIPSIS,
    Expr,
    ExprStmt,
    If,
    Infix,
    InputSpec,
    INPUT_DEFAULT,
    INPUT_DIRECTLY_IN,
    IncrDecr,
    IntLit,
    MOD_INMOST,
    MOD_OUTMOST,
    Prefix,
    PrintStmt,
    PropAccess,
    QueryDocument,
    SINGLE,
    SelectQuery,
    SelectStmt,
    Stmt,
    StrLit,
    TypeLit,
    VarRef,
    While,
)
from craql.engine.runtime import (
    Counter,
    Environment,
    ExecutionStats,
    NodeList,
    NodeRef,
    OutputSink,
    ResultSet,
    RowRecord,
    TypeName,
    UNDEFINED,
    Value,
    render_value,
    truthy,
)


class QueryRuntimeError(Exception):
    def __init__(self, message: str, source: str = "<query>", pos: tuple[int, int] = (0, 0)):
        self.source = source
        self.pos = pos
        super().__init__(f"{source}:{pos[0]}:{pos[1]}: {message}")


@dataclass
class SelectionCapture:
    """Everything needed to replay one select against an independent oracle."""

    query: SelectQuery
    input_nodes: list[int]
    include_root: bool
    directly: bool
    env_snapshot: dict[str, Value]
    rows: list[dict[str, int]] = field(default_factory=list)


NODE_FUNCTIONS = frozenset({
    "contains", "directly_contains", "isparent", "parent", "isnodetype",
    "position", "linenumber", "filename", "depth", "nodetype",
    "methodbinding", "typebinding",
})


class Evaluator:
    def __init__(
        self,
        project: ProjectAst,
        env: Environment | None = None,
        sink: OutputSink | None = None,
        recursion_limit: int = 512,
        source: str = "<query>",
    ):
        self.project = project
        self.schema = project.schema
        self.env = env if env is not None else Environment()
        self.sink = sink if sink is not None else OutputSink()
        self.recursion_limit = recursion_limit
        self.source = source
        self.stats = ExecutionStats(files_parsed=getattr(project, "files_parsed", 0))
        self.trace: Callable[[SelectionCapture], None] | None = None
        self._doc: QueryDocument | None = None

    # ------------------------------------------------------------------
    # Document execution
    # ------------------------------------------------------------------

    def execute_document(self, doc: QueryDocument) -> None:
        """Run the document's entry query; labeled queries run via callquery."""
        prev = self._doc
        self._doc = doc
        self.source = doc.source
        try:
            entry = doc.queries[0][1]
            self.run_select(entry, emit=True)
        finally:
            self._doc = prev

    # ------------------------------------------------------------------
    # Selection
    # ------------------------------------------------------------------

    def run_select(
        self,
        q: SelectQuery,
        emit: bool = False,
        input_override: InputSpec | None = None,
    ) -> ResultSet:
        spec = input_override if input_override is not None else q.input
        input_nodes, include_root = self._resolve_input(spec)
        directly = spec.kind == INPUT_DIRECTLY_IN
        if self.trace is not None:
            capture = SelectionCapture(
                q, list(input_nodes), include_root, directly, dict(self.env.variables)
            )
        else:
            capture = None

        if q.pattern.kind == SINGLE:
            rs = self._select_single(q, input_nodes, include_root, directly, emit)
        else:
            rs = self._select_pair(q, input_nodes, include_root, directly, emit)
        rs.stats.files_parsed = self.stats.files_parsed
        if capture is not None:
            capture.rows = [dict(r) for r in rs.rows]
            self.trace(capture)
        return rs

    def _resolve_input(self, spec: InputSpec) -> tuple[list[int], bool]:
        if spec.kind == INPUT_DEFAULT:
            return list(self.project.roots), True
        value = self.eval(spec.expr)
        if value is UNDEFINED:
            return [], False
        if isinstance(value, NodeRef):
            return [value.id], False
        if isinstance(value, NodeList):
            return list(value.ids), False
        raise QueryRuntimeError(
            f"query input must be a node or node list, not {_kind_name(value)}",
            self.source, spec.pos,
        )

    def _require_type(self, name: str, pos: tuple[int, int]) -> None:
        if not self.schema.knows(name):
            raise QueryRuntimeError(f"unknown node type {name}", self.source, pos)

    def _has_descendant_of_type(self, node_id: int, type_name: str) -> bool:
        stack = list(child_ids(self.project.node(node_id)))
        while stack:
            cur = stack.pop()
            if self.project.matches_type(cur, type_name):
                return True
            stack.extend(child_ids(self.project.node(cur)))
        return False

    def _emit_row(self, node_id: int) -> None:
        node = self.project.node(node_id)
        self.sink.result_row(
            RowRecord(
                self.project.files[node.span.file].name,
                node.span.line,
                node.type,
                source_text(self.project, node_id),
            )
        )

    def _select_single(
        self,
        q: SelectQuery,
        input_nodes: list[int],
        include_root: bool,
        directly: bool,
        emit: bool,
    ) -> ResultSet:
        pat = q.pattern
        self._require_type(pat.type1, pat.pos)
        rs = ResultSet(variables=[pat.var1])
        counter = Counter()
        self.env.count_stack.append(counter)
        seen: set[int] = set()
        try:
            for root in input_nodes:
                root_type = self.project.node(root).type
                stack: list[int] = [root]
                while stack:
                    n = stack.pop()
                    self.stats.nodes_visited += 1
                    rs.stats.nodes_visited += 1
                    prune = False
                    is_candidate = (n != root or include_root) and self.project.matches_type(n, pat.type1)
                    if is_candidate and q.modifier == MOD_INMOST:
                        is_candidate = not self._has_descendant_of_type(n, pat.type1)
                    if is_candidate:
                        self.env.set(pat.var1, NodeRef(n))
                        if q.where is None or truthy(self.eval(q.where)):
                            if n not in seen:
                                seen.add(n)
                                rs.rows.append({pat.var1: n})
                                counter.count += 1
                                rs.stats.rows_yielded += 1
                                self.stats.rows_yielded += 1
                                if emit:
                                    self._emit_row(n)
                                self._exec_body(q.body)
                            if q.modifier == MOD_OUTMOST:
                                prune = True
                    if not prune and directly and n != root and self.project.node(n).type == root_type:
                        prune = True
                    if not prune:
                        stack.extend(reversed(list(child_ids(self.project.node(n)))))
        finally:
            self.env.count_stack.pop()
        return rs

    def _select_pair(
        self,
        q: SelectQuery,
        input_nodes: list[int],
        include_root: bool,
        directly: bool,
        emit: bool,
    ) -> ResultSet:
        pat = q.pattern
        self._require_type(pat.type1, pat.pos)
        self._require_type(pat.type2, pat.pos)
        rs = ResultSet(variables=[pat.var1, pat.var2])
        counter = Counter()
        self.env.count_stack.append(counter)
        is_ellipsis = pat.kind == ELLIPSIS
        survivors: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        try:
            for root in input_nodes:
                root_type = self.project.node(root).type
                stack: list[int] = [root]
                while stack:
                    n1 = stack.pop()
                    self.stats.nodes_visited += 1
                    rs.stats.nodes_visited += 1
                    if (n1 != root or include_root) and self.project.matches_type(n1, pat.type1):
                        self._pair_inner(q, n1, rs, counter, survivors, seen, emit)
                    if directly and n1 != root and self.project.node(n1).type == root_type:
                        continue
                    stack.extend(reversed(list(child_ids(self.project.node(n1)))))
            if is_ellipsis and survivors:
                best = max(
                    node_depth(self.project, n2) - node_depth(self.project, n1)
                    for n1, n2 in survivors
                )
                kept = [
                    (n1, n2)
                    for n1, n2 in survivors
                    if node_depth(self.project, n2) - node_depth(self.project, n1) == best
                ]
                counter.count = 0
                for n1, n2 in kept:
                    row = {pat.var1: n1, pat.var2: n2}
                    rs.rows.append(row)
                    counter.count += 1
                    rs.stats.rows_yielded += 1
                    self.stats.rows_yielded += 1
                    self.env.set(pat.var1, NodeRef(n1))
                    self.env.set(pat.var2, NodeRef(n2))
                    if emit:
                        self._emit_row(n1)
                    self._exec_body(q.body)
        finally:
            self.env.count_stack.pop()
        return rs

    def _pair_inner(
        self,
        q: SelectQuery,
        n1: int,
        rs: ResultSet,
        counter: Counter,
        survivors: list[tuple[int, int]],
        seen: set[tuple[int, int]],
        emit: bool,
    ) -> None:
        pat = q.pattern
        stack = list(reversed(list(child_ids(self.project.node(n1)))))
        while stack:
            n2 = stack.pop()
            self.stats.nodes_visited += 1
            rs.stats.nodes_visited += 1
            if self.project.matches_type(n2, pat.type2):
                self.env.set(pat.var1, NodeRef(n1))
                self.env.set(pat.var2, NodeRef(n2))
                if q.where is None or truthy(self.eval(q.where)):
                    if (n1, n2) not in seen:
                        seen.add((n1, n2))
                        if pat.kind == ELLIPSIS:
                            survivors.append((n1, n2))
                            counter.count += 1
                        else:
                            rs.rows.append({pat.var1: n1, pat.var2: n2})
                            counter.count += 1
                            rs.stats.rows_yielded += 1
                            self.stats.rows_yielded += 1
                            if emit:
                                self._emit_row(n1)
                            self._exec_body(q.body)
            stack.extend(reversed(list(child_ids(self.project.node(n2)))))

    # ------------------------------------------------------------------
    # Statements
    # ------------------------------------------------------------------

    def _exec_body(self, body: list[Stmt]) -> None:
        for s in body:
            self._exec_stmt(s)

    def _exec_stmt(self, s: Stmt) -> None:
        if isinstance(s, Assign):
            value = self.eval(s.value)
            if s.op == "=":
                self.env.set(s.target, value)
            else:
                old = self.env.get(s.target)
                if old is UNDEFINED:
                    old = "" if isinstance(value, str) and s.op == "+=" else 0
                if s.op == "+=":
                    self.env.set(s.target, self._plus(old, value, s.pos))
                else:
                    self.env.set(
                        s.target,
                        self._as_number(old, s.pos) - self._as_number(value, s.pos),
                    )
        elif isinstance(s, IncrDecr):
            old = self._as_number(self.env.get(s.target), s.pos)
            self.env.set(s.target, old + 1 if s.op == "++" else old - 1)
        elif isinstance(s, If):
            if truthy(self.eval(s.cond)):
                self._exec_body(s.then_body)
            elif s.else_body is not None:
                self._exec_body(s.else_body)
        elif isinstance(s, While):
            while truthy(self.eval(s.cond)):
                self._exec_body(s.body)
        elif isinstance(s, SelectStmt):
            self.run_select(s.query)
        elif isinstance(s, CallQuery):
            self._exec_callquery(s)
        elif isinstance(s, PrintStmt):
            self.sink.print_line(render_value(self.eval(s.value), self.project))
        elif isinstance(s, ExprStmt):
            self.eval(s.value)
        else:
            raise QueryRuntimeError(f"unknown statement {type(s).__name__}", self.source, s.pos)

    def _exec_callquery(self, s: CallQuery) -> None:
        if self._doc is None:
            raise QueryRuntimeError("callquery outside a document", self.source, s.pos)
        target = self._doc.labels().get(s.label)
        if target is None:
            raise QueryRuntimeError(f"unresolved query label {s.label}", self.source, s.pos)
        if self.env.call_depth >= self.recursion_limit:
            raise QueryRuntimeError("query recursion limit", self.source, s.pos)
        self.env.call_depth += 1
        try:
            # A called query is a top-level query of the document: its rows emit.
            self.run_select(target, emit=True, input_override=s.input)
        finally:
            self.env.call_depth -= 1

    # ------------------------------------------------------------------
    # Expressions
    # ------------------------------------------------------------------

    def eval(self, e: Expr) -> Value:
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, StrLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, VarRef):
            return self.env.get(e.name)
        if isinstance(e, TypeLit):
            self._require_type(e.name, e.pos)
            return TypeName(e.name)
        if isinstance(e, CountStar):
            if not self.env.count_stack:
                raise QueryRuntimeError("count(*) outside a select", self.source, e.pos)
            return self.env.count_stack[-1].count
        if isinstance(e, PropAccess):
            base = self.eval(e.base)
            if base is UNDEFINED:
                raise QueryRuntimeError(
                    f"property access .{e.name} on undefined", self.source, e.pos
                )
            if not isinstance(base, NodeRef):
                raise QueryRuntimeError(
                    f"property access .{e.name} on {_kind_name(base)}", self.source, e.pos
                )
            return self.eval_accessor(base.id, e.name, e.pos)
        if isinstance(e, Call):
            return self._eval_call(e)
        if isinstance(e, Prefix):
            if e.op == "!":
                return not truthy(self.eval(e.operand))
            return -self._as_number(self.eval(e.operand), e.pos)
        if isinstance(e, Infix):
            return self._eval_infix(e)
        raise QueryRuntimeError(f"unknown expression {type(e).__name__}", self.source,
                                getattr(e, "pos", (0, 0)))

    def eval_accessor(self, node_id: int, name: str, pos: tuple[int, int]) -> Value:
        """Resolve `.name` / `.{name}`: property first, then child-by-type."""
        node = self.project.node(node_id)
        kind = self.schema.prop_kind(node.type, name)
        if kind is not None:
            if name not in node.props:
                return UNDEFINED
            value = node.props[name]
            if isinstance(value, str):
                return value
            if isinstance(value, int):
                return NodeRef(value)
            return NodeList(tuple(value))
        if self.schema.knows(name):
            matches = [
                c for c in child_ids(node) if self.project.matches_type(c, name)
            ]
            if len(matches) == 1:
                return NodeRef(matches[0])
            if len(matches) > 1:
                raise QueryRuntimeError(
                    f"ambiguous child access {{{name}}} on {node.type}", self.source, pos
                )
        return UNDEFINED

    # -- builtin functions --

    def _eval_call(self, e: Call) -> Value:
        recv = self.eval(e.receiver) if e.receiver is not None else None
        args = [self.eval(a) for a in e.args]

        if e.name in ("max", "min"):
            self._check_arity(e, 2)
            a = self._as_number(args[0], e.pos, allow_literal_node=True)
            b = self._as_number(args[1], e.pos, allow_literal_node=True)
            return max(a, b) if e.name == "max" else min(a, b)
        if e.name == "print":
            self._check_arity(e, 1)
            self.sink.print_line(render_value(args[0], self.project))
            return UNDEFINED

        if e.name not in NODE_FUNCTIONS:
            raise QueryRuntimeError(f"unknown function {e.name}", self.source, e.pos)

        # Node functions accept the node as receiver or as the sole argument
        # (the free forms depth(n) and nodetype(n)).
        if recv is None:
            if e.name in ("depth", "nodetype", "position", "linenumber", "filename") and len(args) == 1:
                recv, args = args[0], []
            else:
                raise QueryRuntimeError(f"{e.name}() needs a node receiver", self.source, e.pos)
        if recv is UNDEFINED:
            # Probes on an absent node degrade instead of aborting, so where
            # clauses can test optional children and unresolved bindings.
            if e.name in ("isnodetype", "contains", "directly_contains", "isparent"):
                self._check_arity(e, 1)
                return False
            if e.name in ("parent", "methodbinding", "typebinding"):
                self._check_arity(e, 0)
                return UNDEFINED
        if not isinstance(recv, NodeRef):
            raise QueryRuntimeError(
                f"{e.name}() receiver is {_kind_name(recv)}, not a node", self.source, e.pos
            )
        node_id = recv.id
        node = self.project.node(node_id)

        if e.name == "parent":
            self._check_arity(e, 0)
            parent = node.parent
            return UNDEFINED if parent is None else NodeRef(parent)
        if e.name == "position":
            self._check_arity_already_bound(e, args)
            return node.span.start
        if e.name == "linenumber":
            self._check_arity_already_bound(e, args)
            return node.span.line
        if e.name == "filename":
            self._check_arity_already_bound(e, args)
            return self.project.files[node.span.file].name
        if e.name == "depth":
            self._check_arity_already_bound(e, args)
            return node_depth(self.project, node_id)
        if e.name == "nodetype":
            self._check_arity_already_bound(e, args)
            return node.type
        if e.name == "isnodetype":
            self._check_arity(e, 1)
            return self._type_arg_match(node_id, args[0], e)
        if e.name == "methodbinding":
            self._check_arity(e, 0)
            target = self.project.bindings.method.get(node_id)
            return UNDEFINED if target is None else NodeRef(target)
        if e.name == "typebinding":
            self._check_arity(e, 0)
            target = self.project.bindings.type.get(node_id)
            return UNDEFINED if target is None else NodeRef(target)
        if e.name == "isparent":
            self._check_arity(e, 1)
            return self._isparent(node_id, args[0], e)
        if e.name == "contains":
            self._check_arity(e, 1)
            return self._contains(node_id, args[0], e, direct_only=False)
        if e.name == "directly_contains":
            self._check_arity(e, 1)
            return self._contains(node_id, args[0], e, direct_only=True)
        raise QueryRuntimeError(f"unknown function {e.name}", self.source, e.pos)

    def _check_arity(self, e: Call, n: int) -> None:
        if len(e.args) != n:
            raise QueryRuntimeError(
                f"{e.name}() takes {n} argument{'s' if n != 1 else ''}, got {len(e.args)}",
                self.source, e.pos,
            )

    def _check_arity_already_bound(self, e: Call, args: list[Value]) -> None:
        # Free-form usage moved the single argument into the receiver slot.
        if args:
            raise QueryRuntimeError(
                f"{e.name}() takes no arguments beyond the node", self.source, e.pos
            )

    def _type_arg_match(self, node_id: int, arg: Value, e: Call) -> bool:
        if not isinstance(arg, TypeName):
            raise QueryRuntimeError(
                f"{e.name}() expects a node type like {{Block}}", self.source, e.pos
            )
        return self.project.matches_type(node_id, arg.name)

    def _isparent(self, node_id: int, arg: Value, e: Call) -> bool:
        children = list(child_ids(self.project.node(node_id)))
        if isinstance(arg, TypeName):
            return any(self.project.matches_type(c, arg.name) for c in children)
        if isinstance(arg, NodeRef):
            return arg.id in children
        if arg is UNDEFINED:
            return False
        raise QueryRuntimeError(
            "isparent() expects a node type or a node", self.source, e.pos
        )

    def _contains(self, node_id: int, arg: Value, e: Call, direct_only: bool) -> bool:
        if arg is UNDEFINED:
            return False
        own_type = self.project.node(node_id).type
        if isinstance(arg, TypeName):
            stack = list(child_ids(self.project.node(node_id)))
            while stack:
                cur = stack.pop()
                if self.project.matches_type(cur, arg.name):
                    return True
                if direct_only and self.project.node(cur).type == own_type:
                    continue
                stack.extend(child_ids(self.project.node(cur)))
            return False
        if isinstance(arg, NodeRef):
            cur = self.project.node(arg.id).parent
            interposed = False
            while cur is not None:
                if cur == node_id:
                    return not (direct_only and interposed)
                if self.project.node(cur).type == own_type:
                    interposed = True
                cur = self.project.node(cur).parent
            return False
        raise QueryRuntimeError(
            f"{e.name}() expects a node type or a node", self.source, e.pos
        )

    # -- operators --

    def _eval_infix(self, e: Infix) -> Value:
        if e.op == "&&":
            return truthy(self.eval(e.lhs)) and truthy(self.eval(e.rhs))
        if e.op == "||":
            return truthy(self.eval(e.lhs)) or truthy(self.eval(e.rhs))
        left = self.eval(e.lhs)
        right = self.eval(e.rhs)
        if e.op in ("==", "!="):
            eq = self._values_equal(left, right)
            return eq if e.op == "==" else not eq
        if e.op in ("<", "<=", ">", ">="):
            a = self._as_number(left, e.pos)
            b = self._as_number(right, e.pos)
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op]
        if e.op == "+":
            return self._plus(left, right, e.pos)
        if e.op == "-":
            return self._as_number(left, e.pos) - self._as_number(right, e.pos)
        if e.op == "*":
            return self._as_number(left, e.pos) * self._as_number(right, e.pos)
        raise QueryRuntimeError(f"unknown operator {e.op}", self.source, e.pos)

    def _plus(self, left: Value, right: Value, pos: tuple[int, int]) -> Value:
        if isinstance(left, str) or isinstance(right, str):
            return render_value(left, self.project) + render_value(right, self.project)
        return self._as_number(left, pos) + self._as_number(right, pos)

    def _values_equal(self, a: Value, b: Value) -> bool:
        if isinstance(a, NodeRef) or isinstance(b, NodeRef):
            return isinstance(a, NodeRef) and isinstance(b, NodeRef) and a.id == b.id
        if isinstance(a, NodeList) and isinstance(b, NodeList):
            return a.ids == b.ids
        # A node list compared with a number compares the list's length.
        if isinstance(a, NodeList) and isinstance(b, int) and not isinstance(b, bool):
            return len(a) == b
        if isinstance(b, NodeList) and isinstance(a, int) and not isinstance(a, bool):
            return len(b) == a
        if a is UNDEFINED or b is UNDEFINED:
            return a is b
        if isinstance(a, TypeName) or isinstance(b, TypeName):
            aname = a.name if isinstance(a, TypeName) else a
            bname = b.name if isinstance(b, TypeName) else b
            return isinstance(aname, str) and isinstance(bname, str) and aname == bname
        if isinstance(a, bool) != isinstance(b, bool):
            return False
        if isinstance(a, (int, str, bool)) and isinstance(b, (int, str, bool)):
            return type(a) is type(b) and a == b
        return False

    def _as_number(self, v: Value, pos: tuple[int, int], allow_literal_node: bool = False) -> int:
        if isinstance(v, bool):
            raise QueryRuntimeError("arithmetic on a boolean", self.source, pos)
        if isinstance(v, int):
            return v
        if isinstance(v, NodeList):
            return len(v)
        if v is UNDEFINED:
            return 0
        if allow_literal_node and isinstance(v, NodeRef):
            node = self.project.node(v.id)
            if node.type == "NumberLiteral":
                return int(node.props["token"])
        raise QueryRuntimeError(
            f"arithmetic on {_kind_name(v)}", self.source, pos
        )


def _kind_name(v: Value) -> str:
    if v is UNDEFINED:
        return "undefined"
    if isinstance(v, bool):
        return "a boolean"
    if isinstance(v, int):
        return "a number"
    if isinstance(v, str):
        return "a string"
    if isinstance(v, NodeRef):
        return "a node"
    if isinstance(v, NodeList):
        return "a node list"
    if isinstance(v, TypeName):
        return "a node type"
    return type(v).__name__


def execute_document(
    doc: QueryDocument,
    project: ProjectAst,
    env: Environment,
    sink: OutputSink | None = None,
    recursion_limit: int = 512,
) -> Evaluator:
    """Convenience wrapper: run a document and return the evaluator used."""
    ev = Evaluator(project, env, sink, recursion_limit, source=doc.source)
    ev.execute_document(doc)
    return ev
