"""Primary-side integration with the sandboxed runner, through its pipe
protocol only.  Skipped when the runner package is not installed; the
acceptance suite does not depend on it."""

from __future__ import annotations

import importlib.util
import json

import pytest

from dualforge.cli import main
from dualforge.corpus import write_benchmark, jsonl_lines
from dualforge.inference import Failure, SandboxExecutor, Value

from conftest import open_item

runner_installed = importlib.util.find_spec("sandbox_runner") is not None
pytestmark = pytest.mark.skipif(not runner_installed, reason="sandbox runner not installed")


def test_sandbox_executor_value():
    assert SandboxExecutor().execute("print(3+4)") == Value("7")


def test_sandbox_executor_failure_taxonomy():
    executor = SandboxExecutor(timeout_s=1.0)
    assert executor.execute("x = 1/0") == Failure("exception")
    assert executor.execute("x = 1") == Failure("empty_output")
    assert executor.execute("while True: pass") == Failure("timeout")


def test_eval_with_sandbox_executor(tmp_path):
    bench = tmp_path / "bench.jsonl"
    write_benchmark([open_item(0, "What is 6*7?", "42")], bench)
    rules = tmp_path / "rules.jsonl"
    rules.write_text(
        json.dumps({"contains": "Let's write a program.", "text": "print(6*7)"}) + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "outcomes.jsonl"
    code = main(
        ["eval", str(bench), "--endpoint", f"mock://{rules}",
         "--executor", "sandbox", "--out", str(out)]
    )
    assert code == 0
    (row,) = [json.loads(line) for line in jsonl_lines(out.read_text(encoding="utf-8"))]
    assert row["path"] == "pot_succeeded"
    assert row["resolved_answer"] == "42"
