"""MiniImp: a small deterministic imperative language.

Hermetic host for the optimization loop: integer-only programs over a
read-only input array, executed with an exact step count instead of
wall-clock time.
"""

from .ast_nodes import MiniProgram
from .parser import CompileError, parse_mini
from .interp import (
    BudgetExceeded,
    MiniRunResult,
    MiniRuntimeError,
    compile_program,
    eval_mini,
)

__all__ = [
    "MiniProgram",
    "CompileError",
    "parse_mini",
    "BudgetExceeded",
    "MiniRuntimeError",
    "MiniRunResult",
    "compile_program",
    "eval_mini",
]
