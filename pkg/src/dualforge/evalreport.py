"""Score outcome files into accuracy tables and error-sample gain reports.

Scoring is a pure fold over outcomes: multiple-choice items score by label
equality, open items by normalize-and-compare with numeric tolerance.
Benchmark items with no outcome are scored incorrect (conservative) and
recorded.  Accuracy is reported as a percentage rounded half-to-even to
one decimal.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import AnswerForm, BenchmarkItem
from .inference import InferenceOutcome, ResolutionPath, answers_equal

logger = logging.getLogger(__name__)

REPORT_PATH_COLUMNS = tuple(path.value for path in ResolutionPath)

GAIN_MODES = ("fixed_fraction", "net_reduction")


class ScoringError(ValueError):
    """Outcomes and benchmark disagree in a way scoring cannot repair."""


@dataclass(frozen=True)
class ScoredItem:
    item_id: str
    predicted: str | None
    gold: str
    correct: bool
    path: str


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    benchmark: str
    items: tuple[ScoredItem, ...]
    missing: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def correct_count(self) -> int:
        return sum(1 for item in self.items if item.correct)

    @property
    def accuracy_percent(self) -> float:
        return round(100.0 * self.correct_count / self.n, 1)

    @property
    def path_counts(self) -> dict:
        counts = Counter(item.path for item in self.items)
        return {column: counts.get(column, 0) for column in REPORT_PATH_COLUMNS}


@dataclass(frozen=True)
class ErrorGainReport:
    baseline_run_id: str
    treatment_run_id: str
    baseline_error_count: int
    fixed_count: int
    gain: float
    mode: str = "fixed_fraction"


def _is_correct(outcome: InferenceOutcome, item: BenchmarkItem) -> bool:
    if item.answer_form is AnswerForm.MULTIPLE_CHOICE:
        return outcome.chosen_label is not None and outcome.chosen_label == item.gold
    if outcome.resolved_answer is None:
        return False
    return answers_equal(outcome.resolved_answer, item.gold)


def score_run(
    outcomes: Sequence[InferenceOutcome],
    benchmark: Sequence[BenchmarkItem],
    *,
    run_id: str = "run",
) -> RunRecord:
    """Score one outcome set against one benchmark.

    Every outcome must reference a benchmark item; benchmark items without
    an outcome are counted incorrect and listed in ``missing``.
    """
    if not benchmark:
        raise ScoringError("benchmark is empty")
    by_id = {item.id: item for item in benchmark}
    seen: dict[str, InferenceOutcome] = {}
    for outcome in outcomes:
        if outcome.item_id not in by_id:
            raise ScoringError(f"outcome references unknown item id {outcome.item_id!r}")
        if outcome.item_id in seen:
            raise ScoringError(f"duplicate outcome for item id {outcome.item_id!r}")
        seen[outcome.item_id] = outcome

    scored: list[ScoredItem] = []
    missing: list[str] = []
    for item in benchmark:
        outcome = seen.get(item.id)
        if outcome is None:
            missing.append(item.id)
            scored.append(
                ScoredItem(item.id, predicted=None, gold=item.gold, correct=False, path="missing")
            )
            continue
        predicted = (
            outcome.chosen_label
            if item.answer_form is AnswerForm.MULTIPLE_CHOICE
            else outcome.resolved_answer
        )
        scored.append(
            ScoredItem(
                item.id,
                predicted=predicted,
                gold=item.gold,
                correct=_is_correct(outcome, item),
                path=outcome.path.value,
            )
        )
    if missing:
        logger.warning(
            "scoring %s/%s: %d of %d items missing an outcome; scored incorrect",
            run_id,
            benchmark[0].benchmark,
            len(missing),
            len(benchmark),
        )
    return RunRecord(
        run_id=run_id,
        benchmark=benchmark[0].benchmark,
        items=tuple(scored),
        missing=tuple(missing),
    )


def compare_error_gain(
    baseline: RunRecord,
    treatment: RunRecord,
    mode: str = "fixed_fraction",
) -> ErrorGainReport:
    """Fraction of the baseline's errors that the treatment run fixes.

    mode="net_reduction" subtracts newly broken items, so the figure can go
    negative when the treatment regresses.
    """
    if mode not in GAIN_MODES:
        raise ScoringError(f"unknown gain mode {mode!r}")
    if baseline.benchmark != treatment.benchmark:
        raise ScoringError(
            f"benchmarks differ: {baseline.benchmark!r} vs {treatment.benchmark!r}"
        )
    baseline_ids = {item.item_id for item in baseline.items}
    treatment_ids = {item.item_id for item in treatment.items}
    if baseline_ids != treatment_ids:
        difference = sorted(baseline_ids ^ treatment_ids)
        raise ScoringError(f"item universes differ; symmetric difference: {difference}")

    treatment_correct = {item.item_id: item.correct for item in treatment.items}
    errors = [item.item_id for item in baseline.items if not item.correct]
    fixed = [item_id for item_id in errors if treatment_correct[item_id]]
    if not errors:
        gain = 0.0
    elif mode == "fixed_fraction":
        gain = len(fixed) / len(errors)
    else:
        treatment_errors = sum(1 for item in treatment.items if not item.correct)
        gain = (len(errors) - treatment_errors) / len(errors)
    return ErrorGainReport(
        baseline_run_id=baseline.run_id,
        treatment_run_id=treatment.run_id,
        baseline_error_count=len(errors),
        fixed_count=len(fixed),
        gain=gain,
        mode=mode,
    )


def _report_rows(records: Sequence[RunRecord]) -> list[list[str]]:
    header = ["run", "benchmark", "n", "correct", "accuracy", *REPORT_PATH_COLUMNS]
    rows = [header]
    for record in sorted(records, key=lambda r: (r.run_id, r.benchmark)):
        path_counts = record.path_counts
        rows.append(
            [
                record.run_id,
                record.benchmark,
                str(record.n),
                str(record.correct_count),
                f"{record.accuracy_percent:.1f}",
                *(str(path_counts[column]) for column in REPORT_PATH_COLUMNS),
            ]
        )
    return rows


def render_report(records: Sequence[RunRecord], format: str = "markdown") -> str:
    """One row per (run, benchmark), in deterministic lexicographic order."""
    if not records:
        raise ScoringError("at least one run record is required")
    rows = _report_rows(records)
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(rows)
        return buffer.getvalue()
    if format == "markdown":
        lines = ["| " + " | ".join(rows[0]) + " |"]
        lines.append("|" + "|".join(" --- " for _ in rows[0]) + "|")
        for row in rows[1:]:
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"
    raise ScoringError(f"unknown report format {format!r}")


def render_gain_report(report: ErrorGainReport, format: str = "markdown") -> str:
    rows = [
        ["baseline", "treatment", "baseline_errors", "fixed", "gain", "mode"],
        [
            report.baseline_run_id,
            report.treatment_run_id,
            str(report.baseline_error_count),
            str(report.fixed_count),
            f"{report.gain:.3f}",
            report.mode,
        ],
    ]
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(rows)
        return buffer.getvalue()
    if format == "markdown":
        lines = ["| " + " | ".join(rows[0]) + " |"]
        lines.append("|" + "|".join(" --- " for _ in rows[0]) + "|")
        lines.append("| " + " | ".join(rows[1]) + " |")
        return "\n".join(lines) + "\n"
    raise ScoringError(f"unknown report format {format!r}")
