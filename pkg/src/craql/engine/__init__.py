"""Query evaluation: runtime values, environments, and the evaluator."""

from craql.engine.evaluator import (
    Evaluator,
    QueryRuntimeError,
    SelectionCapture,
    execute_document,
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
    render_value,
    truthy,
)

__all__ = [
    "Counter",
    "Environment",
    "Evaluator",
    "ExecutionStats",
    "NodeList",
    "NodeRef",
    "OutputSink",
    "QueryRuntimeError",
    "ResultSet",
    "RowRecord",
    "SelectionCapture",
    "TypeName",
    "UNDEFINED",
    "execute_document",
    "render_value",
    "truthy",
]
