"""Compile-and-run backends.

Two kinds behind one contract: the in-process MiniImp interpreter (costs in
deterministic steps) and an external toolchain driven by command templates
(costs in wall-clock milliseconds, median of repeated runs).  Costs from
different backends are never comparable; ``Cost`` carries its unit and adds
only within it.
"""

from __future__ import annotations

import math
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median
from typing import Sequence, Union

from .minilang import CompileError, MiniRuntimeError, BudgetExceeded, parse_mini
from .minilang.interp import CompiledMini, compile_program
from .tokens import Language, SourceUnit, tokenize

VERDICT_OK = "ok"
VERDICT_TIMEOUT = "timeout"
VERDICT_CRASH = "crash"

UNIT_STEPS = "steps"
UNIT_MS = "ms"


class ToolchainError(Exception):
    """The toolchain itself is unusable (missing compiler, bad template);
    aborts the whole run, unlike a mutant's compile failure."""


class UnitMismatch(Exception):
    """Costs in different units were combined or compared."""


@dataclass(frozen=True)
class Cost:
    value: Union[int, float]
    unit: str

    def __add__(self, other: "Cost") -> "Cost":
        if self.unit != other.unit:
            raise UnitMismatch(f"cannot add {self.unit} to {other.unit}")
        return Cost(self.value + other.value, self.unit)


@dataclass(frozen=True)
class RunResult:
    output: bytes  # normalized: per-line trailing whitespace and final newline stripped
    cost: Cost | None
    verdict: str

    @property
    def ok(self) -> bool:
        return self.verdict == VERDICT_OK


@dataclass(frozen=True)
class Program:
    """A successfully compiled program; compile failures never produce one."""

    kind: str
    mini: CompiledMini | None = None
    binary: Path | None = None


@dataclass(frozen=True)
class ExecBackendConfig:
    kind: str = "mini"  # "mini" | "external"
    compile_cmd: str | None = None  # placeholders {src} {out}
    run_cmd: str | None = None      # placeholders {bin} {input}; input fed on stdin
    repetitions: int = 5
    warmups: int = 1
    timeout_factor: float = 10.0
    step_budget_factor: float = 10.0
    # caps for the baseline itself, which has no reference cost to scale from
    baseline_step_limit: int = 2_000_000_000
    baseline_time_limit: float = 300.0

    def __post_init__(self):
        if self.kind not in ("mini", "external"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "external" and not (self.compile_cmd and self.run_cmd):
            raise ValueError("external backend needs compile_cmd and run_cmd")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.warmups < 0:
            raise ValueError("warmups must be >= 0")
        if self.timeout_factor <= 1 or self.step_budget_factor <= 1:
            raise ValueError("budget factors must be > 1")


def normalize_output(raw: bytes) -> bytes:
    lines = [line.rstrip() for line in raw.split(b"\n")]
    while lines and lines[-1] == b"":
        lines.pop()
    return b"\n".join(lines)


# Timed measurements are serialized even if callers run backends from
# several threads; step counts do not need this.
_MEASUREMENT_LOCK = threading.Lock()


class MiniBackend:
    unit = UNIT_STEPS

    def __init__(self, config: ExecBackendConfig):
        self.config = config

    def compile(self, source: SourceUnit | bytes) -> Program:
        if isinstance(source, (bytes, bytearray)):
            source = tokenize(source, Language.MINI)
        program = parse_mini(source)  # raises CompileError
        return Program(kind="mini", mini=compile_program(program))

    def run(self, program: Program, input_values: Sequence[int],
            budget: int) -> RunResult:
        try:
            result = program.mini.run(input_values, budget)
        except BudgetExceeded:
            return RunResult(b"", None, VERDICT_TIMEOUT)
        except MiniRuntimeError:
            return RunResult(b"", None, VERDICT_CRASH)
        return RunResult(normalize_output(result.output),
                         Cost(result.steps, UNIT_STEPS), VERDICT_OK)

    def mutant_budget(self, baseline: Cost) -> int:
        return max(1, math.ceil(baseline.value * self.config.step_budget_factor))

    def baseline_budget(self) -> int:
        return self.config.baseline_step_limit


class ExternalBackend:
    unit = UNIT_MS

    def __init__(self, config: ExecBackendConfig, scratch_dir: Path):
        self.config = config
        self.scratch = Path(scratch_dir)
        self.scratch.mkdir(parents=True, exist_ok=True)
        self._counter = 0

    def _fill(self, template: str, mapping: dict[str, str]) -> list[str]:
        args = shlex.split(template)
        filled = [arg.format_map(mapping) for arg in args]
        if not filled:
            raise ToolchainError(f"empty command template {template!r}")
        return filled

    def compile(self, source: SourceUnit | bytes, name: str = "unit.src") -> Program:
        # name keeps the real extension so compilers that sniff suffixes
        # (gcc, javac) treat the file correctly; the counter avoids clashes
        data = source.text if isinstance(source, SourceUnit) else bytes(source)
        self._counter += 1
        src_path = self.scratch / f"{self._counter:04d}.{name}"
        out_path = self.scratch / f"{self._counter:04d}.{name}.bin"
        src_path.write_bytes(data)
        cmd = self._fill(self.config.compile_cmd,
                         {"src": str(src_path), "out": str(out_path)})
        try:
            proc = subprocess.run(cmd, capture_output=True, timeout=120)
        except FileNotFoundError as exc:
            raise ToolchainError(f"compiler not found: {cmd[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ToolchainError(f"compiler timed out: {' '.join(cmd)}") from exc
        if proc.returncode != 0:
            diag = proc.stderr.decode("utf-8", errors="replace").strip()
            raise CompileError(diag or f"compiler exited {proc.returncode}", 0, 0)
        return Program(kind="external", binary=out_path)

    def run(self, program: Program, input_values: Sequence[int],
            budget: float) -> RunResult:
        stdin_data = (" ".join(str(v) for v in input_values) + "\n").encode("ascii")
        cmd = self._fill(self.config.run_cmd,
                         {"bin": str(program.binary), "input": "-"})
        times_ms: list[float] = []
        output: bytes | None = None
        total = self.config.warmups + self.config.repetitions
        with _MEASUREMENT_LOCK:
            for i in range(total):
                t0 = time.perf_counter()
                try:
                    proc = subprocess.run(cmd, input=stdin_data,
                                          capture_output=True, timeout=budget)
                except FileNotFoundError as exc:
                    raise ToolchainError(f"run command not found: {cmd[0]}") from exc
                except subprocess.TimeoutExpired:
                    return RunResult(b"", None, VERDICT_TIMEOUT)
                elapsed_ms = (time.perf_counter() - t0) * 1000.0
                if proc.returncode != 0:
                    return RunResult(b"", None, VERDICT_CRASH)
                if i >= self.config.warmups:
                    times_ms.append(elapsed_ms)
                    if output is None:
                        output = normalize_output(proc.stdout)
        return RunResult(output, Cost(median(times_ms), UNIT_MS), VERDICT_OK)

    def mutant_budget(self, baseline: Cost) -> float:
        # subprocess timeout in seconds; floor keeps tiny baselines usable
        return max(0.05, baseline.value / 1000.0 * self.config.timeout_factor)

    def baseline_budget(self) -> float:
        return self.config.baseline_time_limit


Backend = Union[MiniBackend, ExternalBackend]


def make_backend(config: ExecBackendConfig,
                 scratch_dir: Path | None = None) -> Backend:
    if config.kind == "mini":
        return MiniBackend(config)
    if scratch_dir is None:
        raise ValueError("external backend needs a scratch directory")
    return ExternalBackend(config, scratch_dir)


@dataclass(frozen=True)
class OverallTime:
    cost: Cost | None
    verdict: str
    failing_index: int | None = None


def overall_time(backend: Backend, program: Program,
                 inputs: Sequence[Sequence[int]],
                 budgets: Sequence[Union[int, float]]) -> OverallTime:
    """Sum of per-input costs; aborts at the first non-ok verdict.

    Empty input list yields a zero cost in the backend's unit.
    """
    total = Cost(0, backend.unit)
    for i, (values, budget) in enumerate(zip(inputs, budgets)):
        result = backend.run(program, values, budget)
        if not result.ok:
            return OverallTime(None, result.verdict, i)
        total = total + result.cost
    return OverallTime(total, VERDICT_OK)
