"""CRAQL: a composable query language over sets of abstract syntax trees.

Queries consume and produce sets of subtrees. The library bundles the query
frontend, a MiniLang (Java subset) source frontend with static bindings, the
evaluator with tree-pruning modifiers, a brute-force reference oracle, and a
batch runner that collates per-project output variables into a CSV.
"""

from pathlib import Path

from craql.astcore import (
    AstFormatError,
    AstNode,
    BindingTable,
    NodeTypeSchema,
    ProjectAst,
    SchemaError,
    Span,
    descendants_preorder,
    deserialize_project,
    is_subtype,
    node_depth,
    register_schema,
    serialize_project,
    source_text,
)
from craql.engine import Environment, Evaluator, OutputSink, QueryRuntimeError, execute_document
from craql.minilang import MINILANG_SCHEMA, load_project
from craql.query import parse_query_document, unparse_document, validate_against_schema

__version__ = "0.1.0"

QUERY_DIR = Path(__file__).parent / "queries"

#: Bundled query files, in suite order.
BUNDLED_QUERIES = (
    "blocktop_declarations.craql",
    "throwing_catches.craql",
    "nested_types.craql",
    "block_children.craql",
    "getters.craql",
    "nested_loops.craql",
    "bound_calls.craql",
    "self_typed.craql",
    "calls_in_out.craql",
    "top_statements.craql",
    "unreachable.craql",
    "recursive_methods.craql",
    "deepest_block.craql",
    "capped_blocks.craql",
    "call_chains.craql",
)


def bundled_query_path(name: str) -> Path:
    path = QUERY_DIR / name
    if not path.exists():
        raise FileNotFoundError(f"no bundled query named {name}")
    return path


__all__ = [
    "AstFormatError",
    "AstNode",
    "BUNDLED_QUERIES",
    "BindingTable",
    "Environment",
    "Evaluator",
    "MINILANG_SCHEMA",
    "NodeTypeSchema",
    "OutputSink",
    "ProjectAst",
    "QueryRuntimeError",
    "SchemaError",
    "Span",
    "bundled_query_path",
    "descendants_preorder",
    "deserialize_project",
    "execute_document",
    "is_subtype",
    "load_project",
    "node_depth",
    "parse_query_document",
    "register_schema",
    "serialize_project",
    "source_text",
    "unparse_document",
    "validate_against_schema",
]
