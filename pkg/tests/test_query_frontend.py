import pytest

from craql import MINILANG_SCHEMA, BUNDLED_QUERIES, bundled_query_path
from craql.query import (
    parse_query_document,
    QuerySyntaxError,
    tokenize,
    unparse_document,
    validate_against_schema,
)
from craql.query.ast import (
    CallQuery,
    ELLIPSIS,
    If,
    INPUT_DIRECTLY_IN,
    MOD_OUTMOST,
    STAR,
    SelectStmt,
    VarRef,
)


class TestTokenize:
    def test_select_pattern(self):
        kinds = [(t.kind, t.value) for t in tokenize("select ({Block} b)")]
        assert kinds == [
            ("keyword", "select"),
            ("op", "("),
            ("braced", "Block"),
            ("ident", "b"),
            ("op", ")"),
            ("eof", ""),
        ]

    def test_ellipsis_is_one_token(self):
        values = [t.value for t in tokenize("({A} x ... {B} y)")]
        assert "..." in values

    def test_count_star(self):
        kinds = [(t.kind, t.value) for t in tokenize("count(*)")]
        assert kinds == [
            ("ident", "count"),
            ("op", "("),
            ("op", "*"),
            ("op", ")"),
            ("eof", ""),
        ]

    def test_block_brace_versus_braced_type(self):
        toks = tokenize("{ temp = 1; }")
        assert toks[0] == toks[0].__class__("op", "{", 1, 1)

    def test_comments_skipped(self):
        assert [t.kind for t in tokenize("// nothing here\nselect")] == ["keyword", "eof"]

    def test_unterminated_string(self):
        with pytest.raises(QuerySyntaxError, match="unterminated"):
            tokenize('print("oops);')

    def test_stray_character(self):
        with pytest.raises(QuerySyntaxError, match="stray"):
            tokenize("select @")

    def test_tokens_carry_position(self):
        tok = tokenize("\n  select")[0]
        assert (tok.line, tok.col) == (2, 3)


class TestParse:
    def test_triple_nesting_structure(self):
        text = bundled_query_path("blocktop_declarations.craql").read_text()
        doc = parse_query_document(text)
        assert len(doc.queries) == 1
        outer = doc.entry
        inner = [s for s in outer.body if isinstance(s, SelectStmt)]
        assert len(inner) == 1
        second = inner[0].query
        conditional = [s for s in second.body if isinstance(s, If)]
        assert len(conditional) == 1
        innermost = [s for s in conditional[0].then_body if isinstance(s, SelectStmt)]
        assert len(innermost) == 1

    def test_modifier_and_directly_in(self):
        doc = parse_query_document("select outmost ({Statement} s) directly in m { }")
        q = doc.entry
        assert q.modifier == MOD_OUTMOST
        assert q.input.kind == INPUT_DIRECTLY_IN
        assert q.input.expr == VarRef("m")

    def test_unresolved_callquery_label(self):
        text = "q1 : select ({Block} b) { callquery(q2); }"
        with pytest.raises(QuerySyntaxError, match="unresolved query label q2"):
            parse_query_document(text)

    def test_duplicate_label(self):
        text = "q1 : select ({Block} b) { }\nq1 : select ({Block} c) { }"
        with pytest.raises(QuerySyntaxError, match="duplicate query label"):
            parse_query_document(text)

    def test_star_and_ellipsis_patterns(self):
        star = parse_query_document("select ({A} x * {B} y) { }").entry
        assert star.pattern.kind == STAR and star.pattern.variables() == ["x", "y"]
        dots = parse_query_document("select ({A} x ... {B} y) { }").entry
        assert dots.pattern.kind == ELLIPSIS

    def test_modifier_rejected_on_pair_pattern(self):
        with pytest.raises(QuerySyntaxError, match="single patterns"):
            parse_query_document("select outmost ({A} x * {B} y) { }")

    def test_variable_collision_with_enclosing_scope(self):
        text = "select ({Block} b) { select ({Statement} b) in b { } }"
        with pytest.raises(QuerySyntaxError, match="already bound"):
            parse_query_document(text)

    def test_else_binds_to_nearest_if(self):
        text = "select ({Block} b) { if (1) if (2) x = 1; else x = 2; }"
        doc = parse_query_document(text)
        outer_if = doc.entry.body[0]
        assert outer_if.else_body is None
        inner_if = outer_if.then_body[0]
        assert inner_if.else_body is not None

    def test_callquery_with_input_override(self):
        text = "q1 : select ({ForStatement} f) { callquery(q1) directly in f; }"
        doc = parse_query_document(text)
        call = doc.entry.body[0]
        assert isinstance(call, CallQuery)
        assert call.input.kind == INPUT_DIRECTLY_IN

    def test_where_clause_before_body(self):
        doc = parse_query_document("select ({Block} b) where count(*) < 100 { }")
        assert doc.entry.where is not None

    def test_syntax_error_reports_expected(self):
        with pytest.raises(QuerySyntaxError, match="expected"):
            parse_query_document("select {Block} b) { }")

    def test_empty_document_rejected(self):
        with pytest.raises(QuerySyntaxError, match="empty"):
            parse_query_document("// only a comment\n")


class TestUnparse:
    @pytest.mark.parametrize("name", BUNDLED_QUERIES)
    def test_bundled_queries_round_trip(self, name):
        text = bundled_query_path(name).read_text()
        doc = parse_query_document(text, name)
        again = parse_query_document(unparse_document(doc), name)
        assert doc == again

    def test_expression_nesting_preserved(self):
        text = "select ({Block} b) { x = (1 + 2) * 3 - -4; y = !(a && b) || c; }"
        doc = parse_query_document(text)
        assert parse_query_document(unparse_document(doc)) == doc


class TestValidate:
    def test_unknown_node_type_warns(self):
        doc = parse_query_document("select ({Blok} b) { }")
        warnings = validate_against_schema(doc, MINILANG_SCHEMA)
        assert any("unknown node type Blok" in d.message for d in warnings)

    def test_registered_abstract_type_is_clean(self):
        doc = parse_query_document("select ({Statement} s) { }")
        assert validate_against_schema(doc, MINILANG_SCHEMA) == []

    def test_unknown_property_warns(self):
        doc = parse_query_document("select ({MethodDeclaration} m) where m.bodyy == 1 { }")
        warnings = validate_against_schema(doc, MINILANG_SCHEMA)
        assert any("no type declares property bodyy" in d.message for d in warnings)

    def test_type_name_accessor_is_clean(self):
        doc = parse_query_document(
            "select ({ReturnStatement} s) where s.Expression.isnodetype({Name}) { }"
        )
        assert validate_against_schema(doc, MINILANG_SCHEMA) == []

    @pytest.mark.parametrize("name", BUNDLED_QUERIES)
    def test_bundled_queries_validate_clean(self, name):
        doc = parse_query_document(bundled_query_path(name).read_text(), name)
        assert validate_against_schema(doc, MINILANG_SCHEMA) == []
