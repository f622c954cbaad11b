"""Finite private-information equilibrium toolkit (python bindings)."""

try:
    from ._pieq import (  # type: ignore[attr-defined]
        BudgetError,
        Instance,
        SchemaError,
        SemanticError,
        audit,
        dsl_canonical,
        load,
        load_document,
        purify,
        solve,
        solve_game,
        verify,
    )
except ImportError:  # pragma: no cover - build-tree layout
    from _pieq import (  # type: ignore[no-redef]
        BudgetError,
        Instance,
        SchemaError,
        SemanticError,
        audit,
        dsl_canonical,
        load,
        load_document,
        purify,
        solve,
        solve_game,
        verify,
    )

__all__ = [
    "BudgetError",
    "Instance",
    "SchemaError",
    "SemanticError",
    "audit",
    "dsl_canonical",
    "load",
    "load_document",
    "purify",
    "solve",
    "solve_game",
    "verify",
]
