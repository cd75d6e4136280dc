"""The optimization loop: evaluate every first-order mutant against the
input set, keep the equivalent ones, and select the fastest.

The baseline program's outputs are computed once per input up front and
reused for every comparison; when an improving mutant replaces the current
best, its outputs are equal to the baseline's by construction, so the memo
stays valid.  Setting ``memoize_baseline=False`` re-runs the current best
program for every comparison instead, which is observably identical and
exists so tests can prove that.

Each mutant runs the inputs in the set's order and aborts at the first
output mismatch or non-ok verdict.  Per-input budgets are derived from the
baseline cost on that input, scaled by the backend's budget factor; mutants
that exceed them are classified ``timeout`` and discarded.
"""

from __future__ import annotations

import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence, Union

from .backend import (
    Backend,
    Cost,
    ExecBackendConfig,
    MiniBackend,
    UNIT_STEPS,
    UnitMismatch,
    make_backend,
)
from .minilang import CompileError
from .mutation import Mutant, MutationOperator, apply_all
from .tokens import SourceUnit


STATUS_COMPILE_ERROR = "compile_error"
STATUS_KILLED = "killed"
STATUS_CRASH = "crash"
STATUS_TIMEOUT = "timeout"
STATUS_EQUIVALENT_NOT_FASTER = "equivalent_not_faster"
STATUS_EQUIVALENT_FASTER = "equivalent_faster"
STATUS_SELECTED = "selected"


class InvalidBaseline(Exception):
    """The original program fails on its own input set."""


@dataclass(frozen=True)
class InputEntry:
    id: str
    values: tuple[int, ...]


@dataclass(frozen=True)
class InputSet:
    entries: tuple[InputEntry, ...]
    origin: str = "<memory>"

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("input ids must be unique")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class MutantVerdict:
    mutant_id: str
    operator: str
    line: int
    col: int
    original: str
    replacement: str
    status: str
    input_id: str | None = None  # set for killed/crash/timeout
    tau: Cost | None = None      # set for equivalent_* and selected
    runs: int = 0                # executions performed before the verdict
    duplicate_of: str | None = None  # earlier mutant with identical text


@dataclass
class OptimizationReport:
    unit: str
    original_tau: Cost
    final_tau: Cost
    selected: Mutant | None
    selected_source: bytes
    original_source: bytes
    verdicts: list[MutantVerdict]
    input_ids: tuple[str, ...]
    backend_kind: str
    config_echo: dict
    host: dict = field(default_factory=dict)

    @property
    def improved(self) -> bool:
        return self.selected is not None


@dataclass(frozen=True)
class OptimizeConfig:
    backend: ExecBackendConfig = ExecBackendConfig()
    threshold: float = 0.05  # noise guard for wall-clock units; forced to 0 on steps
    line_range: tuple[int, int] | None = None
    jobs: int = 1
    memoize_baseline: bool = True
    scratch_dir: Path | None = None
    source_name: str = "unit"  # stem for mutant files on the external backend

    def __post_init__(self):
        if not (0.0 <= self.threshold <= 0.5):
            raise ValueError("threshold must be in [0, 0.5]")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def improvement_test(tau_o: Cost, tau_p: Cost, threshold: float) -> bool:
    """Strict improvement check.

    Step costs compare exactly (threshold forced to 0); millisecond costs
    must undercut by the noise threshold: tau_p < (1 - threshold) * tau_o.
    """
    if tau_o.unit != tau_p.unit:
        raise UnitMismatch(f"cannot compare {tau_p.unit} to {tau_o.unit}")
    if tau_o.unit == UNIT_STEPS:
        return tau_p.value < tau_o.value
    return tau_p.value < (1.0 - threshold) * tau_o.value


def _split_source_name(name: str) -> tuple[str, str]:
    stem, dot, ext = name.rpartition(".")
    if not dot:
        return name, "src"
    return stem, ext


def _evaluate_one(backend: Backend, source_bytes: bytes,
                  entries: Sequence[InputEntry],
                  budgets: Sequence[Union[int, float]],
                  expected: Sequence[bytes],
                  name: str = "unit.src") -> tuple[str, int | None, Union[int, float, None], int]:
    """Evaluate one candidate; returns (status, failing_input_index, tau, runs).

    status is one of compile_error/killed/crash/timeout/equivalent.
    """
    try:
        if isinstance(backend, MiniBackend):
            program = backend.compile(source_bytes)
        else:
            program = backend.compile(source_bytes, name=name)
    except CompileError:
        return (STATUS_COMPILE_ERROR, None, None, 0)
    except ToolchainError as exc:
        raise ToolchainError(f"while compiling mutant {name}: {exc}") from exc
    tau: Union[int, float] = 0
    runs = 0
    for k, entry in enumerate(entries):
        result = backend.run(program, entry.values, budgets[k])
        runs += 1
        if result.verdict != "ok":
            return (result.verdict, k, None, runs)
        if result.output != expected[k]:
            return (STATUS_KILLED, k, None, runs)
        tau += result.cost.value
    return ("equivalent", None, tau, runs)


def _evaluate_mini_task(payload) -> tuple[int, str, int | None, Union[int, float, None], int]:
    idx, config, mutated_text, entries, budgets, expected = payload
    backend = MiniBackend(config)
    status, failing, tau, runs = _evaluate_one(backend, mutated_text,
                                               entries, budgets, expected)
    return (idx, status, failing, tau, runs)


def _host_block() -> dict:
    return {
        "os": platform.platform(),
        "cpu": f"{platform.machine()} x{os.cpu_count() or 1}",
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def confirm_equivalence(candidate: SourceUnit | bytes,
                        original: SourceUnit | bytes,
                        inputs: InputSet,
                        config: OptimizeConfig) -> bool:
    """True iff candidate and original produce identical normalized outputs
    on every input in the set.  Any mismatch, compile failure, timeout or
    crash yields False."""
    backend = make_backend(config.backend, config.scratch_dir)
    extra = {} if isinstance(backend, MiniBackend) else {"name": config.source_name}
    try:
        orig_prog = backend.compile(original, **extra)
        cand_prog = backend.compile(candidate, **extra)
    except CompileError:
        return False
    for entry in inputs.entries:
        base = backend.run(orig_prog, entry.values, backend.baseline_budget())
        if not base.ok:
            return False
        cand = backend.run(cand_prog, entry.values,
                           backend.mutant_budget(base.cost))
        if not cand.ok or cand.output != base.output:
            return False
    return True


def optimize(operators: Sequence[MutationOperator], source: SourceUnit,
             inputs: InputSet, config: OptimizeConfig) -> OptimizationReport:
    """Run the full selection loop and return the report.

    Raises InvalidBaseline when the original program does not compile or
    does not run cleanly on every input; propagates ToolchainError.
    """
    backend = make_backend(config.backend, config.scratch_dir)
    stem, ext = _split_source_name(config.source_name)

    try:
        baseline_prog = backend.compile(
            source,
            **({} if isinstance(backend, MiniBackend) else {"name": config.source_name}))
    except CompileError as exc:
        raise InvalidBaseline(f"original program does not compile: {exc}") from exc

    baseline_outputs: list[bytes] = []
    budgets: list[Union[int, float]] = []
    original_tau = Cost(0, backend.unit)
    for entry in inputs.entries:
        result = backend.run(baseline_prog, entry.values, backend.baseline_budget())
        if not result.ok:
            raise InvalidBaseline(
                f"original program verdict {result.verdict!r} on input {entry.id!r}")
        baseline_outputs.append(result.output)
        budgets.append(backend.mutant_budget(result.cost))
        original_tau = original_tau + result.cost

    mutants = apply_all(operators, source)
    if config.line_range is not None:
        lo, hi = config.line_range
        mutants = [m for m in mutants if lo <= m.line <= hi]

    threshold = 0.0 if backend.unit == UNIT_STEPS else config.threshold
    outcomes = _evaluate_all(backend, config, mutants, inputs.entries,
                             budgets, baseline_outputs, baseline_prog, stem,
                             ext, original_tau, threshold)
    verdicts: list[MutantVerdict] = []
    current_tau = original_tau
    best: Mutant | None = None
    best_index: int | None = None
    first_with_text: dict[bytes, str] = {}
    for idx, (mutant, (status, failing, tau, runs)) in enumerate(zip(mutants, outcomes)):
        earlier = first_with_text.setdefault(mutant.mutated_text, mutant.id)
        verdict = MutantVerdict(
            mutant_id=mutant.id, operator=mutant.operator,
            line=mutant.line, col=mutant.col,
            original=mutant.original, replacement=mutant.replacement,
            status=status, runs=runs,
            duplicate_of=None if earlier == mutant.id else earlier,
        )
        if status in (STATUS_KILLED, STATUS_CRASH, STATUS_TIMEOUT):
            verdict.input_id = inputs.entries[failing].id
        elif status == "equivalent":
            tau_cost = Cost(tau, backend.unit)
            verdict.tau = tau_cost
            if improvement_test(current_tau, tau_cost, threshold):
                verdict.status = STATUS_EQUIVALENT_FASTER
                current_tau = tau_cost
                best = mutant
                best_index = idx
            else:
                verdict.status = STATUS_EQUIVALENT_NOT_FASTER
        verdicts.append(verdict)

    if best_index is not None:
        verdicts[best_index].status = STATUS_SELECTED

    selected_source = best.mutated_text if best is not None else source.text
    if not confirm_equivalence(selected_source, source, inputs, config):
        raise RuntimeError(
            "internal error: selected source failed the final equivalence pass")

    return OptimizationReport(
        unit=backend.unit,
        original_tau=original_tau,
        final_tau=current_tau,
        selected=best,
        selected_source=selected_source,
        original_source=source.text,
        verdicts=verdicts,
        input_ids=tuple(e.id for e in inputs.entries),
        backend_kind=config.backend.kind,
        config_echo=_config_echo(operators, inputs, config),
        host=_host_block(),
    )


def _evaluate_all(backend, config, mutants, entries, budgets,
                  baseline_outputs, baseline_prog, stem, ext, original_tau,
                  threshold):
    if not config.memoize_baseline:
        return _evaluate_all_literal(backend, mutants, entries, budgets,
                                     baseline_prog, original_tau, threshold)
    if isinstance(backend, MiniBackend) and config.jobs > 1 and len(mutants) > 1:
        payloads = [(i, config.backend, m.mutated_text, tuple(entries),
                     tuple(budgets), tuple(baseline_outputs))
                    for i, m in enumerate(mutants)]
        outcomes: list = [None] * len(mutants)
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunk = max(1, len(payloads) // (config.jobs * 4))
            for idx, status, failing, tau, runs in pool.map(
                    _evaluate_mini_task, payloads, chunksize=chunk):
                outcomes[idx] = (status, failing, tau, runs)
        return outcomes
    return [
        _evaluate_one(backend, m.mutated_text, entries, budgets,
                      baseline_outputs, name=m.filename(stem, ext))
        for m in mutants
    ]


def _evaluate_all_literal(backend, mutants, entries, budgets, baseline_prog,
                          original_tau, threshold):
    """Algorithm-literal mode: re-run the current best program for every
    comparison instead of using memoized outputs.  A mutant is adopted as
    the new reference under the same improvement test the outer fold uses,
    so later mutants compare against the current best; its outputs equal the
    memoized ones by construction and the verdicts are identical."""
    best_prog = baseline_prog
    current_tau = original_tau
    outcomes = []
    for mutant in mutants:
        try:
            program = backend.compile(mutant.mutated_text)
        except CompileError:
            outcomes.append((STATUS_COMPILE_ERROR, None, None, 0))
            continue
        tau = 0
        runs = 0
        outcome = None
        for k, entry in enumerate(entries):
            reference = backend.run(best_prog, entry.values,
                                    backend.baseline_budget())
            result = backend.run(program, entry.values, budgets[k])
            runs += 1
            if result.verdict != "ok":
                outcome = (result.verdict, k, None, runs)
                break
            if result.output != reference.output:
                outcome = (STATUS_KILLED, k, None, runs)
                break
            tau += result.cost.value
        if outcome is None:
            outcome = ("equivalent", None, tau, runs)
            tau_cost = Cost(tau, backend.unit)
            if improvement_test(current_tau, tau_cost, threshold):
                current_tau = tau_cost
                best_prog = program
        outcomes.append(outcome)
    return outcomes


def _config_echo(operators, inputs, config: OptimizeConfig) -> dict:
    # jobs and memoize_baseline are deliberately absent: they are execution
    # strategy, observationally invisible, and reports must not depend on them
    return {
        "backend": config.backend.kind,
        "operators": [op.kind.lower() for op in operators],
        "inputs": inputs.origin,
        "repetitions": config.backend.repetitions,
        "warmups": config.backend.warmups,
        "timeout_factor": config.backend.timeout_factor,
        "step_budget_factor": config.backend.step_budget_factor,
        "threshold": config.threshold,
        "line_range": list(config.line_range) if config.line_range else None,
        "source_name": config.source_name,
    }
