from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dualforge.cli import build_parser, main
from dualforge.corpus import jsonl_lines, write_benchmark, write_corpus
from dualforge.masker import read_masked_examples

from conftest import choice_item, make_records, open_item


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(make_records(8), path)
    return path


@pytest.fixture
def bench_path(tmp_path):
    items = [
        open_item(0, "What is 3+4?", "7"),
        open_item(1, "What is 2*3?", "6"),
        choice_item(2, "Which is larger, 12 or 10?", [("A", "10"), ("B", "12")], "B"),
        open_item(3, "What is 10-1?", "9"),
    ]
    path = tmp_path / "bench.jsonl"
    write_benchmark(items, path)
    return path


@pytest.fixture
def rules_path(tmp_path):
    # Scripted endpoint: programs for two items, reasoning for the rest.
    rules = [
        {"contains": "What is 3+4? Let's write a program.", "text": "print(3+4)"},
        {"contains": "What is 2*3? Let's write a program.", "text": "print(2*3)"},
        {"contains": "Which is larger, 12 or 10? Let's write a program.", "text": "no program here"},
        {"contains": "What is 10-1? Let's write a program.", "text": "I refuse."},
        {"contains": "Which is larger", "text": "The answer is B."},
        {"default": "The answer is 9."},
    ]
    path = tmp_path / "rules.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rules) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# build-data
# ---------------------------------------------------------------------------


def test_build_data_irsp(corpus_path, tmp_path, capsys):
    out = tmp_path / "irsp.jsonl"
    code = main(["build-data", str(corpus_path), "--task", "irsp", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "built=8" in printed
    assert "skipped=0" in printed
    assert "r_mask=0.15" in printed  # operating-point default
    examples = read_masked_examples(out)
    assert len(examples) == 8


def test_build_data_ir_default_mask_ratio(corpus_path, tmp_path, capsys):
    out = tmp_path / "ir.jsonl"
    assert main(["build-data", str(corpus_path), "--task", "ir", "--out", str(out)]) == 0
    assert "r_mask=0.6" in capsys.readouterr().out


def test_build_data_counts_skips(tmp_path, capsys):
    from dualforge.corpus import SourceRecord, ThoughtKind

    records = [
        SourceRecord("a", "t", "Add 1 and 2. Total?", "One sentence", ThoughtKind.COT),
        SourceRecord("b", "t", "Add 3 and 4. Total?", "First 3. Then 4. Answer 7.", ThoughtKind.COT),
    ]
    corpus = tmp_path / "c.jsonl"
    write_corpus(records, corpus)
    out = tmp_path / "m.jsonl"
    assert main(["build-data", str(corpus), "--task", "irsp", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "built=1" in printed and "skipped=1" in printed
    assert "fewer than 2 thought segments" in printed


def test_build_data_ir_zero_maskable_is_data_error(tmp_path, capsys):
    from dualforge.corpus import SourceRecord, ThoughtKind

    records = [
        SourceRecord("a", "t", "No digits anywhere. None at all.", "Step. Another step.", ThoughtKind.COT),
    ]
    corpus = tmp_path / "c.jsonl"
    write_corpus(records, corpus)
    code = main(["build-data", str(corpus), "--task", "ir", "--out", str(tmp_path / "m.jsonl")])
    assert code == 2
    assert "zero maskable" in capsys.readouterr().err


def test_build_data_seed_and_r_mask_overrides(corpus_path, tmp_path, capsys):
    out = tmp_path / "irsp.jsonl"
    code = main(
        ["build-data", str(corpus_path), "--task", "irsp", "--out", str(out),
         "--r-mask", "0.4", "--seed", "11"]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "r_mask=0.4" in printed and "seed=11" in printed
    assert all(e.policy_used.seed == 11 for e in read_masked_examples(out))


# ---------------------------------------------------------------------------
# mix
# ---------------------------------------------------------------------------


def test_mix_counts_and_determinism(corpus_path, tmp_path, capsys):
    out1 = tmp_path / "train1.jsonl"
    out2 = tmp_path / "train2.jsonl"
    args = ["mix", str(corpus_path), "--r-task-irsp", "0.25", "--r-task-ir", "0.5"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    printed = capsys.readouterr().out
    assert '"base": 8' in printed and '"irsp": 2' in printed and '"ir": 4' in printed

    out3 = tmp_path / "train3.jsonl"
    assert main(args + ["--out", str(out3), "--seed", "99"]) == 0
    assert out3.read_bytes() != out1.read_bytes()


def test_mix_from_prebuilt_files(corpus_path, tmp_path):
    irsp_file = tmp_path / "irsp.jsonl"
    assert main(["build-data", str(corpus_path), "--task", "irsp", "--out", str(irsp_file)]) == 0
    out = tmp_path / "train.jsonl"
    code = main(
        ["mix", str(corpus_path), "--irsp-file", str(irsp_file),
         "--r-task-irsp", "0.5", "--r-task-ir", "0", "--out", str(out)]
    )
    assert code == 0
    lines = jsonl_lines(out.read_text(encoding="utf-8"))
    rows = [json.loads(line) for line in lines[1:]]
    assert sum(1 for r in rows if r["task"] == "irsp") == 4


def test_mix_bad_corpus_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n", encoding="utf-8")
    assert main(["mix", str(bad), "--out", str(tmp_path / "t.jsonl")]) == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def test_eval_with_mock_endpoint_and_executor(bench_path, rules_path, tmp_path, capsys):
    out = tmp_path / "outcomes.jsonl"
    code = main(
        ["eval", str(bench_path), "--endpoint", f"mock://{rules_path}",
         "--executor", "mock", "--out", str(out), "--concurrency", "1"]
    )
    assert code == 0
    rows = [json.loads(line) for line in jsonl_lines(out.read_text(encoding="utf-8"))]
    assert len(rows) == 4
    by_id = {row["item_id"]: row for row in rows}
    assert by_id["item-0"]["path"] == "pot_succeeded"
    assert by_id["item-0"]["resolved_answer"] == "7"
    assert by_id["item-1"]["resolved_answer"] == "6"
    assert by_id["item-2"]["path"] == "option_direct"
    assert by_id["item-2"]["chosen_label"] == "B"
    assert by_id["item-3"]["path"] == "cot_fallback"
    assert "evaluated=4" in capsys.readouterr().out


def test_eval_resume_appends_only_missing(bench_path, rules_path, tmp_path, capsys):
    out = tmp_path / "outcomes.jsonl"
    base = ["eval", str(bench_path), "--endpoint", f"mock://{rules_path}",
            "--executor", "mock", "--out", str(out)]
    assert main(base + ["--limit", "2"]) == 0
    assert len(jsonl_lines(out.read_text(encoding="utf-8"))) == 2
    capsys.readouterr()

    assert main(base + ["--resume"]) == 0
    printed = capsys.readouterr().out
    assert "evaluated=2 resumed=2" in printed
    rows = [json.loads(line) for line in jsonl_lines(out.read_text(encoding="utf-8"))]
    assert len(rows) == 4
    assert [row["item_id"] for row in rows] == [f"item-{i}" for i in range(4)]


def test_eval_parallel_output_order_is_stable(bench_path, rules_path, tmp_path):
    out = tmp_path / "outcomes.jsonl"
    code = main(
        ["eval", str(bench_path), "--endpoint", f"mock://{rules_path}",
         "--executor", "mock", "--out", str(out), "--concurrency", "4"]
    )
    assert code == 0
    rows = [json.loads(line) for line in jsonl_lines(out.read_text(encoding="utf-8"))]
    assert [row["item_id"] for row in rows] == [f"item-{i}" for i in range(4)]


def test_eval_without_endpoint_is_transport_error(bench_path, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("DUALFORGE_ENDPOINT", raising=False)
    code = main(["eval", str(bench_path), "--executor", "mock", "--out", str(tmp_path / "o.jsonl")])
    assert code == 3
    assert "endpoint" in capsys.readouterr().err


def test_eval_unreachable_endpoint_is_transport_error(bench_path, tmp_path, capsys):
    config = tmp_path / "c.toml"
    config.write_text("[endpoint]\ntimeout_s = 0.5\n", encoding="utf-8")
    code = main(
        ["eval", str(bench_path), "--endpoint", "http://127.0.0.1:9", "--config", str(config),
         "--executor", "mock", "--out", str(tmp_path / "o.jsonl")]
    )
    assert code == 3


def test_eval_endpoint_env_fallback(bench_path, rules_path, tmp_path, monkeypatch):
    monkeypatch.setenv("DUALFORGE_ENDPOINT", f"mock://{rules_path}")
    out = tmp_path / "outcomes.jsonl"
    assert main(["eval", str(bench_path), "--executor", "mock", "--out", str(out)]) == 0
    assert len(jsonl_lines(out.read_text(encoding="utf-8"))) == 4


# ---------------------------------------------------------------------------
# score / compare
# ---------------------------------------------------------------------------


@pytest.fixture
def outcomes_path(bench_path, rules_path, tmp_path):
    out = tmp_path / "outcomes.jsonl"
    assert main(
        ["eval", str(bench_path), "--endpoint", f"mock://{rules_path}",
         "--executor", "mock", "--out", str(out)]
    ) == 0
    return out


def test_score_markdown_and_accuracy(outcomes_path, bench_path, capsys):
    assert main(["score", str(outcomes_path), str(bench_path), "--run-id", "demo"]) == 0
    printed = capsys.readouterr().out
    assert "| demo | bench" in printed
    assert "accuracy=100.0 n=4" in printed


def test_score_csv_to_file(outcomes_path, bench_path, tmp_path, capsys):
    report = tmp_path / "report.csv"
    assert main(
        ["score", str(outcomes_path), str(bench_path), "--format", "csv", "--out", str(report)]
    ) == 0
    content = report.read_text(encoding="utf-8")
    assert content.startswith("run,benchmark,n,correct,accuracy")


def test_score_writes_figure(outcomes_path, bench_path, tmp_path):
    figure = tmp_path / "accuracy.png"
    assert main(
        ["score", str(outcomes_path), str(bench_path), "--figure", str(figure)]
    ) == 0
    assert figure.exists()
    assert figure.stat().st_size > 1000
    assert figure.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_compare_identical_runs_gain_zero(outcomes_path, bench_path, capsys):
    code = main(["compare", str(outcomes_path), str(outcomes_path), str(bench_path)])
    assert code == 0
    assert "gain=0.000" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_sweep_defaults_write_16_configs(tmp_path, capsys):
    out_dir = tmp_path / "sweeps"
    assert main(["sweep", "--out", str(out_dir)]) == 0
    files = sorted(out_dir.glob("*.toml"))
    assert len(files) == 16
    assert "wrote 16 configs" in capsys.readouterr().out

    from dualforge.config import load_config

    ratios = set()
    masks = set()
    for file in files:
        config = load_config(file)
        ratios.add(config.mix.r_task_irsp)
        masks.add(config.mix.irsp_policy.r_mask)
        assert config.mix.r_task_ir == 0.0
    assert ratios == {0.2, 0.4, 0.6, 0.8}
    assert masks == {0.15, 0.4, 0.6, 0.8}


def test_sweep_custom_lists(tmp_path):
    out_dir = tmp_path / "sweeps"
    assert main(
        ["sweep", "--task", "ir", "--r-task", "0.6", "--r-mask", "0.6", "--out", str(out_dir)]
    ) == 0
    files = list(out_dir.glob("*.toml"))
    assert len(files) == 1

    from dualforge.config import load_config

    config = load_config(files[0])
    assert config.mix.r_task_ir == 0.6
    assert config.mix.ir_policy.r_mask == 0.6


def test_sweep_out_of_range_is_data_error(tmp_path, capsys):
    code = main(["sweep", "--r-task", "1.5", "--out", str(tmp_path / "s")])
    assert code == 2


# ---------------------------------------------------------------------------
# usage and help
# ---------------------------------------------------------------------------


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["build-data"])  # missing required arguments
    assert excinfo.value.code == 1


def test_unknown_executor_choice_exits_1(bench_path, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["eval", str(bench_path), "--executor", "warp", "--out", str(tmp_path / "o")])
    assert excinfo.value.code == 1


CONTRACT_FLAGS = [
    "--config", "--seed", "--r-task", "--r-mask", "--endpoint",
    "--executor", "--resume", "--out", "--format",
]


def test_help_enumerates_contract_flags_and_env():
    parser = build_parser()
    helps = [parser.format_help()]
    for action in parser._subparsers._group_actions:
        helps.extend(sub.format_help() for sub in action.choices.values())
    combined = "\n".join(helps)
    for flag in CONTRACT_FLAGS:
        assert flag in combined, flag
    assert "sandbox" in combined and "mock" in combined
    assert "DUALFORGE_API_KEY" in combined
    assert "DUALFORGE_ENDPOINT" in combined


def test_console_entry_point_smoke():
    result = subprocess.run(
        [sys.executable, "-m", "dualforge.cli", "--help"], capture_output=True, text=True
    )
    assert result.returncode == 0
    assert "build-data" in result.stdout
