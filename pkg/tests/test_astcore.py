import json

import pytest

from craql import (
    AstFormatError,
    descendants_preorder,
    deserialize_project,
    is_subtype,
    MINILANG_SCHEMA,
    node_depth,
    serialize_project,
    source_text,
)
from craql.astcore import SchemaError, child_ids
from conftest import find_node


class TestIsSubtype:
    def test_declared_edge(self):
        assert is_subtype(MINILANG_SCHEMA, "WhileStatement", "Statement")

    def test_reflexive(self):
        assert is_subtype(MINILANG_SCHEMA, "Block", "Block")

    def test_expression_is_not_statement(self):
        assert not is_subtype(MINILANG_SCHEMA, "MethodInvocation", "Statement")

    def test_unknown_type_names_offender(self):
        with pytest.raises(SchemaError, match="Blok"):
            is_subtype(MINILANG_SCHEMA, "Blok", "Statement")

    def test_virtual_types_sit_under_their_base(self):
        assert is_subtype(MINILANG_SCHEMA, "ClassDeclaration", "TypeDeclaration")
        assert not is_subtype(MINILANG_SCHEMA, "TypeDeclaration", "ClassDeclaration")


class TestPreorder:
    def test_leaf_yields_itself(self, sample_project):
        leaf = find_node(sample_project, "NumberLiteral", "0")
        assert list(descendants_preorder(sample_project, leaf.id)) == [leaf.id]

    def test_greet_body_order(self, sample_project):
        body = find_node(sample_project, "Block", "int i = 0")
        seq = list(descendants_preorder(sample_project, body.id))
        assert seq[0] == body.id
        second = sample_project.node(seq[1])
        assert second.type == "VariableDeclarationStatement"
        assert source_text(sample_project, second.id) == "int i = 0;"

    def test_root_walk_covers_whole_file_tree(self, sample_project):
        root = sample_project.roots[0]
        seq = list(descendants_preorder(sample_project, root))
        file_id = sample_project.node(root).span.file
        in_file = [n.id for n in sample_project.nodes if n.span.file == file_id]
        assert sorted(seq) == sorted(in_file)

    def test_each_node_exactly_once(self, sample_project):
        for root in sample_project.roots:
            seq = list(descendants_preorder(sample_project, root))
            assert len(seq) == len(set(seq))

    def test_matches_offset_rank_on_frontend_trees(self, sample_project):
        for root in sample_project.roots:
            seq = list(descendants_preorder(sample_project, root))
            by_offset = sorted(
                seq,
                key=lambda n: (
                    sample_project.node(n).span.start,
                    -sample_project.node(n).span.end,
                ),
            )
            assert seq == by_offset


class TestNodeDepth:
    def test_root_is_zero(self, sample_project):
        assert node_depth(sample_project, sample_project.roots[0]) == 0

    def test_direct_child_is_one(self, sample_project):
        type_decl = find_node(sample_project, "TypeDeclaration", "Greeter")
        assert node_depth(sample_project, type_decl.id) == 1

    def test_while_body_two_below_greet_body(self, sample_project):
        greet_body = find_node(sample_project, "Block", "int i = 0")
        while_body = find_node(sample_project, "Block", "i = i + 1;\n    }")
        assert (
            node_depth(sample_project, while_body.id)
            - node_depth(sample_project, greet_body.id)
            == 2
        )

    def test_parent_depth_invariant(self, sample_project):
        for node in sample_project.nodes:
            if node.parent is not None:
                assert node_depth(sample_project, node.parent) == node_depth(sample_project, node.id) - 1


class TestSourceText:
    def test_return_statement_slice(self, sample_project):
        ret = find_node(sample_project, "ReturnStatement", "count")
        assert source_text(sample_project, ret.id) == "return count;"

    def test_child_span_inside_parent_span(self, sample_project):
        for node in sample_project.nodes:
            for child in child_ids(node):
                cspan = sample_project.node(child).span
                assert node.span.start <= cspan.start
                assert cspan.end <= node.span.end

    def test_missing_text_uses_placeholder_and_flags(self):
        doc = {
            "schema": "minilang",
            "project": "ext",
            "files": [{"name": "ext.ast"}],
            "nodes": [
                {"id": 0, "type": "Block", "file": 0, "span": [0, 0, 1], "props": {"statements": []}}
            ],
            "roots": [0],
        }
        project = deserialize_project(json.dumps(doc))
        assert not project.degraded_output
        assert source_text(project, 0) == "<Block@ext.ast:1>"
        assert project.degraded_output


class TestSerialization:
    def test_round_trip_node_for_node(self, sample_project):
        clone = deserialize_project(serialize_project(sample_project))
        assert len(clone.nodes) == len(sample_project.nodes)
        for a, b in zip(sample_project.nodes, clone.nodes):
            assert (a.type, a.props, a.parent) == (b.type, b.props, b.parent)
            assert (a.span.file, a.span.start, a.span.end, a.span.line) == (
                b.span.file, b.span.start, b.span.end, b.span.line)
        assert clone.roots == sample_project.roots
        assert clone.bindings.method == sample_project.bindings.method
        assert clone.bindings.type == sample_project.bindings.type

    def test_serialize_is_a_fixed_point(self, ab_project):
        once = serialize_project(ab_project)
        twice = serialize_project(deserialize_project(once))
        assert once == twice

    def test_binding_target_type_mismatch(self, sample_project):
        doc = json.loads(serialize_project(sample_project))
        block = next(n for n in doc["nodes"] if n["type"] == "Block")
        invocation = next(n for n in doc["nodes"] if n["type"] == "MethodInvocation")
        doc["bindings"]["method"] = {str(invocation["id"]): block["id"]}
        with pytest.raises(AstFormatError, match="binding target type mismatch"):
            deserialize_project(json.dumps(doc))

    def test_empty_project_is_valid(self):
        doc = {"schema": "minilang", "project": "empty", "files": [], "nodes": [], "roots": []}
        project = deserialize_project(json.dumps(doc))
        assert project.roots == []

    def test_dangling_node_id(self):
        doc = {
            "schema": "minilang",
            "project": "bad",
            "files": [{"name": "f"}],
            "nodes": [
                {"id": 0, "type": "Block", "file": 0, "span": [0, 0, 1], "props": {"statements": [5]}}
            ],
            "roots": [0],
        }
        with pytest.raises(AstFormatError, match="dangling"):
            deserialize_project(json.dumps(doc))

    def test_unknown_node_type(self):
        doc = {
            "schema": "minilang",
            "project": "bad",
            "files": [{"name": "f"}],
            "nodes": [{"id": 0, "type": "Blok", "file": 0, "span": [0, 0, 1], "props": {}}],
            "roots": [0],
        }
        with pytest.raises(AstFormatError, match="unknown node type Blok"):
            deserialize_project(json.dumps(doc))

    def test_virtual_type_cannot_be_concrete(self):
        doc = {
            "schema": "minilang",
            "project": "bad",
            "files": [{"name": "f"}],
            "nodes": [{"id": 0, "type": "ClassDeclaration", "file": 0, "span": [0, 0, 1], "props": {}}],
            "roots": [0],
        }
        with pytest.raises(AstFormatError, match="virtual"):
            deserialize_project(json.dumps(doc))

    def test_node_owned_twice_rejected(self):
        doc = {
            "schema": "minilang",
            "project": "bad",
            "files": [{"name": "f"}],
            "nodes": [
                {"id": 0, "type": "Block", "file": 0, "span": [0, 4, 1], "props": {"statements": [2]}},
                {"id": 1, "type": "Block", "file": 0, "span": [0, 4, 1], "props": {"statements": [2]}},
                {"id": 2, "type": "BreakStatement", "file": 0, "span": [1, 2, 1], "props": {}},
            ],
            "roots": [0, 1],
        }
        with pytest.raises(AstFormatError, match="owned by both"):
            deserialize_project(json.dumps(doc))

    def test_malformed_json_reports_location(self):
        with pytest.raises(AstFormatError, match="malformed JSON"):
            deserialize_project("{not json")


class TestMatchesType:
    def test_virtual_class_declaration(self, sample_project):
        decl = find_node(sample_project, "TypeDeclaration", "Greeter")
        assert sample_project.matches_type(decl.id, "ClassDeclaration")
        assert not sample_project.matches_type(decl.id, "InterfaceDeclaration")
        assert sample_project.matches_type(decl.id, "TypeDeclaration")

    def test_interface_matches_virtual_interface(self):
        from craql import load_project

        project, diags = load_project("iface", [("I.mj", "interface Api { int ping(); }")])
        assert not diags
        decl = find_node(project, "TypeDeclaration", "Api")
        assert project.matches_type(decl.id, "InterfaceDeclaration")
        assert not project.matches_type(decl.id, "ClassDeclaration")

    def test_abstract_statement_matches_concrete_kinds(self, sample_project):
        while_stmt = find_node(sample_project, "WhileStatement")
        assert sample_project.matches_type(while_stmt.id, "Statement")
