from __future__ import annotations

import csv
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualforge.evalreport import (
    REPORT_PATH_COLUMNS,
    ErrorGainReport,
    RunRecord,
    ScoredItem,
    ScoringError,
    compare_error_gain,
    render_gain_report,
    render_report,
    score_run,
)
from dualforge.inference import Failure, InferenceOutcome, ResolutionPath, Value

from conftest import choice_item, open_item


def outcome(
    item_id: str,
    resolved: str | None,
    *,
    label: str | None = None,
    path: ResolutionPath = ResolutionPath.POT_SUCCEEDED,
) -> InferenceOutcome:
    failed = path in (ResolutionPath.COT_FALLBACK, ResolutionPath.UNRESOLVED)
    return InferenceOutcome(
        item_id=item_id,
        pot_prompt="p",
        pot_generation="g",
        pot_exec=Failure("exception") if failed else Value(resolved or ""),
        cot_generation="c" if failed else None,
        resolved_answer=resolved,
        chosen_label=label,
        path=path,
        wall_time=0.0,
    )


def simple_benchmark(n, benchmark="bench"):
    return [open_item(i, f"What is {i}+{i}?", str(2 * i), benchmark) for i in range(n)]


def run_of(benchmark, correct_flags, run_id="run"):
    outcomes = []
    for item, correct in zip(benchmark, correct_flags):
        predicted = item.gold if correct else f"not-{item.gold}"
        outcomes.append(outcome(item.id, predicted))
    return score_run(outcomes, benchmark, run_id=run_id)


# ---------------------------------------------------------------------------
# score_run
# ---------------------------------------------------------------------------


def test_three_of_four_is_75():
    benchmark = simple_benchmark(4)
    record = run_of(benchmark, [True, True, True, False])
    assert record.accuracy_percent == 75.0
    assert record.n == 4
    assert record.correct_count == 3


def test_empty_benchmark_is_an_error():
    with pytest.raises(ScoringError, match="empty"):
        score_run([], [])


def test_gsm8k_scale_all_correct_is_100():
    benchmark = simple_benchmark(1319, benchmark="GSM8K")
    outcomes = [outcome(item.id, item.gold) for item in benchmark]
    record = score_run(outcomes, benchmark, run_id="mock")
    assert record.n == 1319
    assert record.accuracy_percent == 100.0


def test_unknown_item_id_is_an_error():
    benchmark = simple_benchmark(2)
    with pytest.raises(ScoringError, match="ghost"):
        score_run([outcome("ghost", "1")], benchmark)


def test_duplicate_outcome_is_an_error():
    benchmark = simple_benchmark(2)
    rows = [outcome("item-0", "0"), outcome("item-0", "0")]
    with pytest.raises(ScoringError, match="duplicate"):
        score_run(rows, benchmark)


def test_missing_items_scored_incorrect_and_recorded():
    benchmark = simple_benchmark(4)
    rows = [outcome(item.id, item.gold) for item in benchmark[:2]]
    record = score_run(rows, benchmark)
    assert record.accuracy_percent == 50.0
    assert record.missing == ("item-2", "item-3")


def test_multiple_choice_scores_by_label_equality():
    benchmark = [
        choice_item(0, "Pick.", [("A", "10"), ("B", "12")], "B"),
        choice_item(1, "Pick.", [("A", "10"), ("B", "12")], "A"),
    ]
    rows = [
        outcome("item-0", "B", label="B", path=ResolutionPath.OPTION_DIRECT),
        # resolved text equals gold option TEXT but the label is wrong: incorrect
        outcome("item-1", "10", label="B", path=ResolutionPath.OPTION_CLOSEST),
    ]
    record = score_run(rows, benchmark)
    assert [item.correct for item in record.items] == [True, False]


def test_open_scores_by_normalize_compare():
    benchmark = [open_item(0, "Total?", "3,600")]
    record = score_run([outcome("item-0", "$3600.00")], benchmark)
    assert record.items[0].correct


def test_rescoring_is_pure():
    benchmark = simple_benchmark(5)
    rows = [outcome(item.id, item.gold) for item in benchmark]
    assert score_run(rows, benchmark) == score_run(rows, benchmark)


def test_accuracy_matches_independent_recount():
    rng = random.Random(4)
    benchmark = simple_benchmark(37)
    flags = [rng.random() < 0.6 for _ in benchmark]
    record = run_of(benchmark, flags)
    # one-pass recount oracle over the scored items
    correct = 0
    total = 0
    for item in record.items:
        total += 1
        if item.predicted is not None and item.predicted == item.gold:
            correct += 1
    assert record.accuracy_percent == round(100.0 * correct / total, 1)


# ---------------------------------------------------------------------------
# compare_error_gain
# ---------------------------------------------------------------------------


def test_gain_definition():
    benchmark = simple_benchmark(6)
    baseline = run_of(benchmark, [False, False, False, False, True, True], run_id="b")
    treatment = run_of(benchmark, [True, True, False, False, True, True], run_id="t")
    report = compare_error_gain(baseline, treatment)
    assert report.baseline_error_count == 4
    assert report.fixed_count == 2
    assert report.gain == 0.5


def test_identical_runs_gain_zero():
    benchmark = simple_benchmark(5)
    record = run_of(benchmark, [False, True, False, True, True])
    report = compare_error_gain(record, record)
    assert report.baseline_error_count == 2
    assert report.gain == 0.0


def test_table_style_fixture_50_errors_13_fixed():
    benchmark = simple_benchmark(100)
    baseline_flags = [i >= 50 for i in range(100)]  # items 0..49 wrong
    treatment_flags = [i < 13 or i >= 50 for i in range(100)]  # fixes 13 of them
    baseline = run_of(benchmark, baseline_flags, run_id="baseline")
    treatment = run_of(benchmark, treatment_flags, run_id="treatment")
    report = compare_error_gain(baseline, treatment)
    assert report.baseline_error_count == 50
    assert report.fixed_count == 13
    assert report.gain == pytest.approx(0.26)
    assert f"{report.gain:.3f}" == "0.260"
    assert f"{100 * report.gain:.1f}" == "26.0"


def test_differing_universes_error_lists_symmetric_difference():
    baseline = run_of(simple_benchmark(3), [True, True, True], run_id="b")
    treatment = run_of(simple_benchmark(4), [True, True, True, True], run_id="t")
    with pytest.raises(ScoringError, match="item-3"):
        compare_error_gain(baseline, treatment)


def test_net_reduction_mode_can_go_negative():
    benchmark = simple_benchmark(4)
    baseline = run_of(benchmark, [False, True, True, True], run_id="b")
    treatment = run_of(benchmark, [True, False, False, True], run_id="t")
    report = compare_error_gain(baseline, treatment, mode="net_reduction")
    assert report.fixed_count == 1
    assert report.gain == pytest.approx((1 - 2) / 1)


@settings(max_examples=80, deadline=None)
@given(
    flags=st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=40),
)
def test_gain_bounds_property(flags):
    benchmark = simple_benchmark(len(flags))
    baseline = run_of(benchmark, [b for b, _ in flags], run_id="b")
    treatment = run_of(benchmark, [t for _, t in flags], run_id="t")
    report = compare_error_gain(baseline, treatment)
    assert 0.0 <= report.gain <= 1.0
    assert 0 <= report.fixed_count <= report.baseline_error_count


# ---------------------------------------------------------------------------
# render_report
# ---------------------------------------------------------------------------


def two_run_records():
    benchmark = simple_benchmark(4)
    return [
        run_of(benchmark, [True, True, True, False], run_id="run-b"),
        run_of(benchmark, [True, False, False, False], run_id="run-a"),
    ]


def test_markdown_report_rows_and_columns():
    rendered = render_report(two_run_records(), "markdown")
    lines = rendered.strip().split("\n")
    assert len(lines) == 4  # header + separator + 2 data rows
    header_cells = [cell.strip() for cell in lines[0].strip("|").split("|")]
    assert header_cells == ["run", "benchmark", "n", "correct", "accuracy", *REPORT_PATH_COLUMNS]
    assert len(header_cells) == 5 + len(ResolutionPath)
    # deterministic lexicographic ordering by run id
    assert lines[2].startswith("| run-a")
    assert lines[3].startswith("| run-b")


def test_csv_report_round_trips():
    rendered = render_report(two_run_records(), "csv")
    rows = list(csv.reader(io.StringIO(rendered)))
    assert rows[0][:5] == ["run", "benchmark", "n", "correct", "accuracy"]
    parsed = {row[0]: row for row in rows[1:]}
    assert parsed["run-b"][4] == "75.0"
    assert parsed["run-a"][4] == "25.0"
    assert int(parsed["run-b"][2]) == 4


def test_report_requires_records():
    with pytest.raises(ScoringError):
        render_report([], "markdown")


def test_gain_report_formats():
    benchmark = simple_benchmark(4)
    baseline = run_of(benchmark, [False, False, True, True], run_id="b")
    treatment = run_of(benchmark, [True, False, True, True], run_id="t")
    report = compare_error_gain(baseline, treatment)
    markdown = render_gain_report(report, "markdown")
    assert "0.500" in markdown
    rendered_csv = render_gain_report(report, "csv")
    rows = list(csv.reader(io.StringIO(rendered_csv)))
    assert rows[1][2] == "2" and rows[1][3] == "1"
