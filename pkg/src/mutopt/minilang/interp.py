"""Execution engine for MiniImp with an exact, deterministic step count.

The AST is translated once into a plain Python function and executed with
native integers; 64-bit wrapping is enforced by range checks that only pay
for themselves when a value actually leaves the representable range.

Cost model, counted in ``steps``:

  * every executed statement costs 1 (a ``while`` counts 1 per condition
    evaluation, including the final false one; an ``if`` counts 1 per
    execution),
  * every binary or unary operator evaluation costs 1 (``&&``/``||``
    evaluate both operands, so expression costs are data-independent),
  * every read of ``in[...]`` costs 1.

Arithmetic follows two's-complement int64: ``/`` truncates toward zero,
``%`` takes the dividend's sign, shift counts are masked to 0..63, and
division or modulo by zero and out-of-range array reads raise
MiniRuntimeError.  The step budget is checked at every loop-condition
evaluation and once at program exit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import ast_nodes as ast
from .ast_nodes import MiniProgram

_INT_MAX = 2**63 - 1
_INT_MIN = -(2**63)


class MiniRuntimeError(Exception):
    """Division/modulo by zero or an out-of-bounds array read."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.message = message
        self.line = line


class BudgetExceeded(Exception):
    """The run consumed more steps than its budget."""


@dataclass(frozen=True)
class MiniRunResult:
    output: bytes  # decimal values, one per line, no trailing newline
    steps: int


def _wrap(v: int) -> int:
    return ((v + 9223372036854775808) & 18446744073709551615) - 9223372036854775808


def _over():
    raise BudgetExceeded()


def _div0(line: int):
    raise MiniRuntimeError("division by zero", line)


def _oob(line: int):
    raise MiniRuntimeError("array read out of bounds", line)


def expr_cost(node: ast.Expr) -> int:
    """Operator evaluations plus array reads in one evaluation of ``node``."""
    if isinstance(node, (ast.IntLit, ast.Var, ast.InLen)):
        return 0
    if isinstance(node, ast.ArrayRead):
        return 1 + expr_cost(node.index)
    if isinstance(node, ast.UnaryOp):
        return 1 + expr_cost(node.operand)
    if isinstance(node, ast.BinOp):
        return 1 + expr_cost(node.left) + expr_cost(node.right)
    raise TypeError(f"unknown expression node {node!r}")


class _CodeGen:
    def __init__(self):
        self.lines: list[str] = []
        self.indent = 1
        self.temp = 0
        self.pending = 0  # batched step cost awaiting a flush

    def emit(self, line: str):
        self.lines.append("    " * self.indent + line)

    def new_temp(self) -> str:
        self.temp += 1
        return f"_t{self.temp}"

    def flush(self):
        if self.pending:
            self.emit(f"_s += {self.pending}")
            self.pending = 0

    # ---- expressions: return a side-effect-free Python atom ----

    def gen_expr(self, node: ast.Expr) -> str:
        if isinstance(node, ast.IntLit):
            return repr(node.value)
        if isinstance(node, ast.Var):
            return f"v_{node.name}"
        if isinstance(node, ast.InLen):
            return "_in_len"
        if isinstance(node, ast.ArrayRead):
            idx = self.gen_expr(node.index)
            t = self.new_temp()
            self.emit(f"{t} = _in[{idx}] if 0 <= {idx} < _in_len else _oob({node.line})")
            return t
        if isinstance(node, ast.UnaryOp):
            a = self.gen_expr(node.operand)
            t = self.new_temp()
            self.emit(f"{t} = -{a}")
            self.emit(f"if {t} > {_INT_MAX}: {t} = _wrap({t})")
            return t
        if isinstance(node, ast.BinOp):
            a = self.gen_expr(node.left)
            b = self.gen_expr(node.right)
            return self.gen_binop(node.op, a, b, node.line)
        raise TypeError(f"unknown expression node {node!r}")

    def gen_binop(self, op: str, a: str, b: str, line: int) -> str:
        t = self.new_temp()
        if op in ("+", "-", "*"):
            self.emit(f"{t} = {a} {op} {b}")
            self.emit(f"if {t} > {_INT_MAX} or {t} < {_INT_MIN}: {t} = _wrap({t})")
        elif op == "/":
            self.emit(f"if {b} == 0: _div0({line})")
            self.emit(f"{t} = {a} // {b}")
            self.emit(f"if {t} < 0 and {t} * {b} != {a}: {t} += 1")
            self.emit(f"if {t} > {_INT_MAX}: {t} = _wrap({t})")
        elif op == "%":
            self.emit(f"if {b} == 0: _div0({line})")
            self.emit(f"{t} = {a} % {b}")
            self.emit(f"if {t} != 0 and ({t} < 0) != ({a} < 0): {t} -= {b}")
        elif op == "<<":
            self.emit(f"{t} = {a} << ({b} & 63)")
            self.emit(f"if {t} > {_INT_MAX} or {t} < {_INT_MIN}: {t} = _wrap({t})")
        elif op == ">>":
            self.emit(f"{t} = {a} >> ({b} & 63)")
        elif op in ("&", "|", "^"):
            self.emit(f"{t} = {a} {op} {b}")
        elif op in ("<", "<=", ">", ">=", "==", "!="):
            self.emit(f"{t} = 1 if {a} {op} {b} else 0")
        elif op == "&&":
            self.emit(f"{t} = 1 if ({a} != 0 and {b} != 0) else 0")
        elif op == "||":
            self.emit(f"{t} = 1 if ({a} != 0 or {b} != 0) else 0")
        else:
            raise ValueError(f"unknown operator {op!r}")
        return t

    # ---- statements ----

    def gen_body(self, stmts: Sequence[ast.Stmt]):
        if not stmts:
            self.emit("pass")
            return
        for stmt in stmts:
            self.gen_stmt(stmt)
        self.flush()

    def gen_stmt(self, stmt: ast.Stmt):
        if isinstance(stmt, ast.Assign):
            self.pending += 1 + expr_cost(stmt.value)
            atom = self.gen_expr(stmt.value)
            self.emit(f"v_{stmt.name} = {atom}")
        elif isinstance(stmt, ast.AugAssign):
            self.pending += 2 + expr_cost(stmt.value)  # statement + combining op
            atom = self.gen_expr(stmt.value)
            result = self.gen_binop(stmt.op[0], f"v_{stmt.name}", atom, stmt.line)
            self.emit(f"v_{stmt.name} = {result}")
        elif isinstance(stmt, ast.Print):
            self.pending += 1 + expr_cost(stmt.value)
            atom = self.gen_expr(stmt.value)
            self.emit(f"_out_append({atom})")
        elif isinstance(stmt, ast.Continue):
            self.pending += 1
            self.flush()
            self.emit("continue")
        elif isinstance(stmt, ast.Break):
            self.pending += 1
            self.flush()
            self.emit("break")
        elif isinstance(stmt, ast.If):
            self.flush()
            self.emit(f"_s += {1 + expr_cost(stmt.cond)}")
            atom = self.gen_expr(stmt.cond)
            self.emit(f"if {atom}:")
            self.indent += 1
            self.gen_body(stmt.then_body)
            self.indent -= 1
            if stmt.else_body:
                self.emit("else:")
                self.indent += 1
                self.gen_body(stmt.else_body)
                self.indent -= 1
        elif isinstance(stmt, ast.While):
            self.flush()
            self.emit("while True:")
            self.indent += 1
            self.emit(f"_s += {1 + expr_cost(stmt.cond)}")
            self.emit("if _s > _budget: _over()")
            atom = self.gen_expr(stmt.cond)
            self.emit(f"if not {atom}: break")
            self.gen_body(stmt.body)
            self.indent -= 1
        else:
            raise TypeError(f"unknown statement node {stmt!r}")


def generate_source(program: MiniProgram) -> str:
    """Python source of the execution function, exposed for inspection."""
    gen = _CodeGen()
    gen.lines.append("def _mini(_in, _budget):")
    gen.emit("_s = 0")
    gen.emit("_out = []")
    gen.emit("_out_append = _out.append")
    gen.emit("_in_len = len(_in)")
    for name in program.variables:
        gen.emit(f"v_{name} = 0")
    gen.gen_body(program.body)
    gen.emit("if _s > _budget: _over()")
    gen.emit("return _out, _s")
    return "\n".join(gen.lines) + "\n"


class CompiledMini:
    """A MiniImp program lowered to a Python function."""

    def __init__(self, program: MiniProgram):
        self.program = program
        self.source = generate_source(program)
        namespace = {"_wrap": _wrap, "_over": _over, "_div0": _div0, "_oob": _oob}
        exec(compile(self.source, "<mini>", "exec"), namespace)
        self._fn = namespace["_mini"]

    def run(self, input_values: Sequence[int], step_budget: int) -> MiniRunResult:
        if step_budget <= 0:
            raise ValueError("step_budget must be positive")
        values = tuple(int(v) for v in input_values)
        out, steps = self._fn(values, step_budget)
        output = "\n".join(map(str, out)).encode("ascii")
        return MiniRunResult(output=output, steps=steps)


def compile_program(program: MiniProgram) -> CompiledMini:
    compiled = program._compiled
    if compiled is None:
        compiled = CompiledMini(program)
        program._compiled = compiled
    return compiled


def eval_mini(program: MiniProgram, input_values: Sequence[int],
              step_budget: int) -> MiniRunResult:
    """Run ``program`` on one input sequence.

    Deterministic: identical (program, input) pairs produce identical output
    and identical step counts.  Raises BudgetExceeded past the step budget
    and MiniRuntimeError on division by zero or out-of-bounds reads.
    """
    return compile_program(program).run(input_values, step_budget)
