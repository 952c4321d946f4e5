"""W&B Weave observability integration for tracing certificates and batch runs."""

from __future__ import annotations

from typing import Any

_weave_available = False
_weave_initialized = False

try:
    import weave
    _weave_available = True
except ImportError:
    weave = None


def init_weave(project_name: str = "planar-at-matching") -> bool:
    """Initialize Weave. Returns True if successfully initialized."""
    global _weave_initialized
    if not _weave_available:
        return False
    if _weave_initialized:
        return True

    try:
        weave.init(project_name)
        _weave_initialized = True
        return True
    except Exception:
        return False


def is_enabled() -> bool:
    return _weave_initialized


def trace_certificate(
    graph_id: str,
    l: int,
    num_vertices: int,
    num_edges: int,
    matching_size: int,
    passed: bool,
    diff_value: int | None,
    reduction_kinds: dict[str, int] | None = None,
) -> None:
    """Log one extracted-and-verified certificate to Weave."""
    if not _weave_initialized or weave is None:
        return

    @weave.op()
    def certificate(
        graph_id: str,
        l: int,
        num_vertices: int,
        num_edges: int,
        matching_size: int,
        passed: bool,
        diff_value: int | None,
        reduction_kinds: dict | None = None,
    ) -> dict:
        return {
            "graph_id": graph_id,
            "l": l,
            "num_vertices": num_vertices,
            "num_edges": num_edges,
            "matching_size": matching_size,
            "passed": passed,
            "diff": diff_value,
            "reduction_kinds": reduction_kinds or {},
        }

    try:
        certificate(
            graph_id=graph_id,
            l=l,
            num_vertices=num_vertices,
            num_edges=num_edges,
            matching_size=matching_size,
            passed=passed,
            diff_value=diff_value,
            reduction_kinds=reduction_kinds,
        )
    except Exception:
        pass  # tracing failures never break a batch


def trace_batch_summary(summary: dict[str, Any]) -> None:
    """Log batch-level aggregates to Weave."""
    if not _weave_initialized or weave is None:
        return

    @weave.op()
    def batch_summary(summary: dict) -> dict:
        return summary

    try:
        batch_summary(summary=summary)
    except Exception:
        pass
