import pytest

from craql import ProjectAst, MINILANG_SCHEMA, load_project, source_text
from craql.minilang.parser import MiniLangParseError, parse_minilang

from conftest import find_node, load_fixture_project


def parse_one(text: str, name: str = "T.mj"):
    project = ProjectAst("t", MINILANG_SCHEMA)
    root, diagnostics = parse_minilang(project, name, text)
    project.roots.append(root)
    project.link_parents()
    return project, root, diagnostics


class TestParser:
    def test_sample_counts(self, sample_project):
        file_id = next(
            i for i, f in enumerate(sample_project.files) if f.name == "Sample.mj"
        )
        in_file = [n for n in sample_project.nodes if n.span.file == file_id]
        assert sum(1 for n in in_file if n.type == "Block") == 3
        assert sum(1 for n in in_file if n.type == "MethodDeclaration") == 2

    def test_minimal_class(self):
        project, root, diagnostics = parse_one("class A {}")
        assert diagnostics == []
        unit = project.node(root)
        assert unit.type == "CompilationUnit"
        (decl_id,) = unit.props["types"]
        decl = project.node(decl_id)
        assert decl.type == "TypeDeclaration"
        assert decl.props["interface"] == "false"
        assert decl.props["bodyDeclarations"] == []

    def test_call_chain_links_via_expression(self):
        project, _, diagnostics = parse_one(
            "class A { void go() { a.m1().m2().m3(); } }"
        )
        assert diagnostics == []
        top = find_node(project, "MethodInvocation", ".m3()")
        assert top.props["name"] == "m3"
        mid = project.node(top.props["expression"])
        assert mid.type == "MethodInvocation" and mid.props["name"] == "m2"
        low = project.node(mid.props["expression"])
        assert low.type == "MethodInvocation" and low.props["name"] == "m1"
        assert project.node(low.props["expression"]).type == "Name"

    def test_empty_file(self):
        project, root, diagnostics = parse_one("")
        assert diagnostics == []
        assert project.node(root).props["types"] == []

    def test_statement_recovery_keeps_rest_of_file(self):
        text = "class A { void m() { int x = ; log(\"ok\"); } }"
        project, _, diagnostics = parse_one(text)
        assert len(diagnostics) == 1
        assert "expected expression" in diagnostics[0].message
        assert find_node(project, "MethodInvocation", "log")

    def test_top_level_junk_is_unrecoverable(self):
        with pytest.raises(MiniLangParseError, match="expected type declaration"):
            parse_one("int x = 1;")

    def test_unbalanced_brace_is_unrecoverable(self):
        with pytest.raises(MiniLangParseError):
            parse_one("class A { void m() {")

    def test_diagnostic_position(self):
        try:
            parse_one('class A {\n  void m() {\n    "')
        except MiniLangParseError as exc:
            assert exc.diagnostic.line == 3
        else:
            pytest.fail("expected a parse error")

    def test_for_loop_shape(self):
        project, _, diagnostics = parse_one(
            "class A { void m() { for (int i = 0; i < 3; i = i + 1) { log(\"x\"); } } }"
        )
        assert diagnostics == []
        loop = find_node(project, "ForStatement")
        (init,) = loop.props["initializers"]
        assert project.node(init).type == "VariableDeclarationStatement"
        assert project.node(loop.props["expression"]).type == "InfixExpression"
        (update,) = loop.props["updaters"]
        assert project.node(update).type == "Assignment"

    def test_try_catch_shape(self):
        project, _, _ = parse_one(
            "class A { void m() { try { log(\"a\"); } catch (Error e) { log(\"b\"); } } }"
        )
        clause = find_node(project, "CatchClause")
        exc = project.node(clause.props["exception"])
        assert exc.type == "SingleVariableDeclaration"
        assert exc.props["type"] == "Error"

    def test_try_without_catch_is_error(self):
        _, _, diagnostics = parse_one("class A { void m() { try { log(\"a\"); } } }")
        assert any("catch" in d.message for d in diagnostics)

    def test_negative_literal_folds(self):
        project, _, _ = parse_one("class A { void m() { int x = -5; } }")
        lit = find_node(project, "NumberLiteral", "-5")
        assert lit.props["token"] == "-5"

    def test_prefix_expression(self):
        project, _, _ = parse_one("class A { void m() { boolean x = !done; } }")
        pre = find_node(project, "PrefixExpression")
        assert pre.props["operator"] == "!"

    def test_fields_with_multiple_fragments(self):
        project, _, _ = parse_one("class A { int x, y; }")
        field = find_node(project, "FieldDeclaration")
        assert len(field.props["fragments"]) == 2

    def test_interface_method_without_body(self):
        project, _, _ = parse_one("interface I { int ping(); }")
        method = find_node(project, "MethodDeclaration", "ping")
        assert "body" not in method.props

    def test_statement_spans_include_semicolon(self, sample_project):
        decl = find_node(sample_project, "VariableDeclarationStatement", "int i = 0")
        assert source_text(sample_project, decl.id) == "int i = 0;"

    def test_offsets_are_character_counts_and_lines_one_based(self):
        text = "class A {\n  int f;\n}"
        project, _, _ = parse_one(text)
        field = find_node(project, "FieldDeclaration")
        assert field.span.start == text.index("int")
        assert field.span.line == 2


class TestLoadProject:
    def test_unrecoverable_file_skipped_with_diagnostic(self):
        project, diagnostics = load_project(
            "mixed",
            [("Bad.mj", "not java at all"), ("Good.mj", "class G { }")],
        )
        assert len(project.roots) == 1
        assert any("Bad.mj" in str(d) for d in diagnostics)
        assert project.files_parsed == 1

    def test_fixture_files_all_parse_clean(self):
        load_fixture_project(
            "all",
            "Sample.mj", "Fact.mj", "AB.mj", "Unreachable.mj",
            "Loops.mj", "Chain.mj", "Trycatch.mj", "Linked.mj",
        )
