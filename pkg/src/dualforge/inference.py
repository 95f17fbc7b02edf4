"""Per-item answer production: program-first generation with execution,
chain-of-thought fallback, answer normalization, and option resolution.

The protocol for one benchmark item:

1. prompt the model with the question plus ``Let's write a program.``,
   extract the program from the generation, and execute it;
2. on any execution failure, re-prompt with the bare question and treat
   the generation as a reasoning chain, extracting its final answer;
3. multiple-choice items resolve to a label: directly when the generation
   contains a standalone option letter, otherwise by choosing the option
   closest to the extracted answer.

Everything here is deterministic given a deterministic client and
executor, which is what the acceptance suite exercises.
"""

from __future__ import annotations

import io
import json
import os
import re
import subprocess
import sys
import threading
import time
from contextlib import redirect_stdout
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import requests

from .corpus import AnswerForm, BenchmarkItem, Option, jsonl_lines
from .mixer import SERIALIZATION_TEMPLATE, render_prompt

POT_SUFFIX = "Let's write a program."
CLOSEST_OPTION_PROMPT = "Please find the closest option to {answer}. The options are {options}."

ANSWER_MARKERS = ("The answer is", "answer is", "####")

# Relative tolerance for numeric answer equality: below any benchmark's
# answer granularity, above float noise.
NUMERIC_RTOL = 1e-6

API_KEY_ENV = "DUALFORGE_API_KEY"
ENDPOINT_ENV = "DUALFORGE_ENDPOINT"


class TransportError(RuntimeError):
    """The model endpoint could not be reached or answered unusably."""


class ExecutorLaunchError(RuntimeError):
    """The program runner itself failed to start (distinct from program failure)."""


# ---------------------------------------------------------------------------
# Execution results
# ---------------------------------------------------------------------------

FAILURE_REASONS = frozenset({"exception", "timeout", "empty_output", "nonzero_exit"})


@dataclass(frozen=True)
class Value:
    text: str


@dataclass(frozen=True)
class Failure:
    reason: str

    def __post_init__(self) -> None:
        if self.reason not in FAILURE_REASONS:
            raise ValueError(f"unknown failure reason {self.reason!r}")


ExecResult = Value | Failure


class Executor(Protocol):
    def execute(self, program: str) -> ExecResult: ...


# ---------------------------------------------------------------------------
# Generation clients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    max_new: int = 1500
    temperature: float = 0.0
    stop: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.max_new < 1:
            raise ValueError("max_new must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


class ModelClient(Protocol):
    def generate(self, request: GenerationRequest) -> str: ...


class HttpModelClient:
    """HTTP client for a text-generation endpoint.

    adapter="raw" posts to {endpoint}/generate with
    {"prompt", "max_tokens", "temperature", "stop"} and reads {"text"};
    adapter="chat" maps the same request onto a chat-completions API.
    Auth comes from the DUALFORGE_API_KEY environment variable.
    """

    def __init__(
        self,
        endpoint: str,
        adapter: str = "raw",
        model: str | None = None,
        timeout_s: float = 120.0,
    ):
        if adapter not in ("raw", "chat"):
            raise ValueError(f"unknown adapter {adapter!r}")
        self.endpoint = endpoint.rstrip("/")
        self.adapter = adapter
        self.model = model
        self.timeout_s = timeout_s

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def generate(self, request: GenerationRequest) -> str:
        if self.adapter == "raw":
            url = f"{self.endpoint}/generate"
            payload = {
                "prompt": request.prompt,
                "max_tokens": request.max_new,
                "temperature": request.temperature,
                "stop": list(request.stop) if request.stop else None,
            }
        else:
            url = f"{self.endpoint}/v1/chat/completions"
            payload = {
                "model": self.model or "default",
                "messages": [{"role": "user", "content": request.prompt}],
                "max_tokens": request.max_new,
                "temperature": request.temperature,
                "stop": list(request.stop) if request.stop else None,
            }
        try:
            response = requests.post(
                url, json=payload, headers=self._headers(), timeout=self.timeout_s
            )
            response.raise_for_status()
            body = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise TransportError(f"{url}: {exc}") from exc
        try:
            if self.adapter == "raw":
                return str(body["text"])
            choice = body["choices"][0]
            message = choice.get("message")
            return str(message["content"] if message else choice["text"])
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"{url}: unexpected response shape: {body!r}") from exc


class ScriptedClient:
    """Deterministic stand-in for tests and offline runs.

    Rules are (substring, completion) pairs; the first rule whose substring
    occurs in the prompt wins.  Without a match the default completion is
    returned, or a TransportError raised when none is configured.
    """

    def __init__(self, rules: Sequence[tuple[str, str]], default: str | None = None):
        self.rules = list(rules)
        self.default = default
        self.calls: list[str] = []

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedClient":
        rules: list[tuple[str, str]] = []
        default = None
        for raw in jsonl_lines(Path(path).read_text(encoding="utf-8")):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            if "default" in obj:
                default = str(obj["default"])
            else:
                rules.append((str(obj["contains"]), str(obj["text"])))
        return cls(rules, default)

    def generate(self, request: GenerationRequest) -> str:
        self.calls.append(request.prompt)
        for needle, completion in self.rules:
            if needle in request.prompt:
                return completion
        if self.default is not None:
            return self.default
        raise TransportError("no scripted response matches the prompt")


MOCK_ENDPOINT_SCHEME = "mock://"


def make_client(
    endpoint: str,
    adapter: str = "raw",
    model: str | None = None,
    timeout_s: float = 120.0,
) -> ModelClient:
    """Endpoint factory: mock://path.jsonl gives a scripted offline client."""
    if endpoint.startswith(MOCK_ENDPOINT_SCHEME):
        return ScriptedClient.from_jsonl(endpoint[len(MOCK_ENDPOINT_SCHEME) :])
    return HttpModelClient(endpoint, adapter=adapter, model=model, timeout_s=timeout_s)


# ---------------------------------------------------------------------------
# Executors
# ---------------------------------------------------------------------------


class ScriptedExecutor:
    """Maps program substrings to canned results; for tests and fixtures."""

    def __init__(self, rules: Sequence[tuple[str, ExecResult]], default: ExecResult | None = None):
        self.rules = list(rules)
        self.default = default if default is not None else Failure("empty_output")
        self.calls: list[str] = []

    def execute(self, program: str) -> ExecResult:
        self.calls.append(program)
        for needle, result in self.rules:
            if needle in program:
                return result
        return self.default


class InProcessExecutor:
    """Runs programs with exec() in this interpreter; the --executor=mock path.

    No filesystem or import isolation: intended for trusted fixtures only.
    A timed-out program's thread is abandoned, not killed.
    """

    def __init__(self, timeout_s: float = 10.0):
        self.timeout_s = timeout_s

    def execute(self, program: str) -> ExecResult:
        buffer = io.StringIO()
        outcome: dict = {}

        def _run() -> None:
            try:
                with redirect_stdout(buffer):
                    exec(compile(program, "<program>", "exec"), {"__name__": "__main__"})
            except SystemExit as exc:
                if exc.code not in (None, 0):
                    outcome["failure"] = Failure("nonzero_exit")
            except BaseException as exc:  # program errors are data, not bugs
                outcome["failure"] = Failure("exception")
                outcome["error"] = repr(exc)

        worker = threading.Thread(target=_run, daemon=True)
        worker.start()
        worker.join(self.timeout_s)
        if worker.is_alive():
            return Failure("timeout")
        if "failure" in outcome:
            return outcome["failure"]
        lines = [line for line in buffer.getvalue().splitlines() if line.strip()]
        if not lines:
            return Failure("empty_output")
        return Value(lines[-1].strip())


class SandboxExecutor:
    """Client side of the sandboxed runner's JSON pipe protocol.

    Spawns one runner process per execution, feeds it a JSON request on
    stdin, and reads a JSON response from stdout.  A missing or broken
    runner raises ExecutorLaunchError; program failures come back as data.
    """

    def __init__(self, command: Sequence[str] | None = None, timeout_s: float = 10.0):
        self.command = list(command) if command else [sys.executable, "-m", "sandbox_runner"]
        self.timeout_s = timeout_s

    def execute(self, program: str) -> ExecResult:
        request = json.dumps({"program": program, "timeout_s": self.timeout_s})
        try:
            proc = subprocess.run(
                self.command,
                input=request,
                capture_output=True,
                text=True,
                timeout=self.timeout_s + 15.0,
            )
        except FileNotFoundError as exc:
            raise ExecutorLaunchError(f"runner not found: {self.command[0]}") from exc
        except subprocess.TimeoutExpired:
            return Failure("timeout")
        if not proc.stdout.strip():
            raise ExecutorLaunchError(
                f"runner produced no response (exit {proc.returncode}): {proc.stderr.strip()[-500:]}"
            )
        try:
            response = json.loads(proc.stdout)
            status = response["status"]
        except (ValueError, KeyError):
            if proc.returncode != 0:
                return Failure("nonzero_exit")
            raise ExecutorLaunchError(f"runner emitted malformed response: {proc.stdout[:200]!r}")
        if status == "ok":
            return Value(str(response.get("value", "")))
        if status in FAILURE_REASONS:
            return Failure(status)
        return Failure("nonzero_exit")


# ---------------------------------------------------------------------------
# Extraction and normalization
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)
_NUMBER_RE = re.compile(r"-?\d[\d,]*(?:\.\d+)?")
_GROUPED_NUMBER_RE = re.compile(r"[+-]?\d{1,3}(?:,\d{3})+(?:\.\d+)?")
_PLAIN_NUMBER_RE = re.compile(r"[+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_FRACTION_RE = re.compile(r"([+-]?\d+(?:\.\d+)?)\s*/\s*([+-]?\d+(?:\.\d+)?)")
_LATEX_FRAC_RE = re.compile(r"\\d?frac\{([+-]?[\d,.]+)\}\{([+-]?[\d,.]+)\}")


def extract_program(generation: str) -> str | None:
    """Pull the program out of a generation, or None when there is none.

    The last fenced code block wins; otherwise prose lines are stripped up
    to the first line that looks like an assignment or call.
    """
    blocks = _FENCE_RE.findall(generation)
    for block in reversed(blocks):
        if block.strip():
            return block.strip("\n")
    lines = generation.splitlines()
    for idx, line in enumerate(lines):
        if "=" in line or "(" in line:
            remainder = "\n".join(lines[idx:]).strip("\n")
            if remainder.strip():
                return remainder
    return None


def _last_marker_end(text: str) -> int | None:
    best = None
    for marker in ANSWER_MARKERS:
        pos = text.rfind(marker)
        if pos >= 0:
            end = pos + len(marker)
            if best is None or end > best:
                best = end
    return best


def extract_answer(cot: str) -> str | None:
    """Final answer from a reasoning chain, or None.

    Takes the token sequence after the last answer marker (to end of line,
    terminal punctuation trimmed); without a usable marker, falls back to
    the last standalone number in the text.
    """
    marker_end = _last_marker_end(cot)
    if marker_end is not None:
        remainder = cot[marker_end:].split("\n", 1)[0].strip()
        remainder = remainder.strip("*").strip()
        while remainder and remainder[-1] in ".!?,;:":
            remainder = remainder[:-1].rstrip()
        if remainder:
            return remainder
    matches = _NUMBER_RE.findall(cot)
    if matches:
        return matches[-1]
    return None


def _parse_number(text: str) -> float | None:
    t = text.strip()
    if not t:
        return None
    t = t.replace("\\$", "$").replace("\\%", "%")
    frac = _LATEX_FRAC_RE.fullmatch(t)
    if frac:
        num = _parse_number(frac.group(1))
        den = _parse_number(frac.group(2))
        if num is None or den is None or den == 0:
            return None
        return num / den
    for symbol in ("$", "€", "£"):
        t = t.replace(symbol, "")
    t = t.strip()
    if t.endswith("%"):
        t = t[:-1].strip()
    if t.endswith(".") and not t.endswith(".."):
        t = t[:-1]
    if _GROUPED_NUMBER_RE.fullmatch(t):
        return float(t.replace(",", ""))
    if _PLAIN_NUMBER_RE.fullmatch(t):
        return float(t)
    frac = _FRACTION_RE.fullmatch(t)
    if frac:
        den = float(frac.group(2))
        if den == 0:
            return None
        return float(frac.group(1)) / den
    return None


def normalize_answer(raw: str) -> float | str:
    """Canonical form: a float for anything numeric, else a folded string.

    Currency symbols, thousands commas, trailing percent signs, and $...$
    math wrappers are stripped; plain and LaTeX fractions parse as
    rationals.  Idempotent: normalizing a canonical form is a no-op.
    """
    s = str(raw).strip()
    if len(s) >= 2 and s.startswith("$") and s.endswith("$"):
        inner = s[1:-1].strip()
        if inner:
            s = inner
    number = _parse_number(s)
    if number is not None:
        return number
    return " ".join(s.split()).casefold()


def canonical_str(value: float | str) -> str:
    """Render a canonical answer for display and option prompts."""
    if isinstance(value, str):
        return value
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def numbers_equal(a: float, b: float) -> bool:
    return abs(a - b) <= NUMERIC_RTOL * max(1.0, abs(b))


def answers_equal(predicted: str, gold: str) -> bool:
    """Compare two raw answers under normalization and numeric tolerance."""
    ca = normalize_answer(predicted)
    cb = normalize_answer(gold)
    if isinstance(ca, float) and isinstance(cb, float):
        return numbers_equal(ca, cb)
    if isinstance(ca, str) and isinstance(cb, str):
        return ca == cb
    return False


def _lcs_length(a: str, b: str) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ch_a in a:
        cur = [0]
        for j, ch_b in enumerate(b, start=1):
            if ch_a == ch_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def _lcs_similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return 2.0 * _lcs_length(a, b) / (len(a) + len(b))


def closest_option(answer: float | str, options: Sequence[Option]) -> str:
    """Label of the option nearest to the answer; ties go to the earliest.

    Numeric answers compare by absolute distance against options whose text
    parses as a number; everything else falls back to normalized
    longest-common-subsequence similarity.
    """
    if not options:
        raise ValueError("options must be non-empty")
    canon = answer if isinstance(answer, float) else normalize_answer(str(answer))
    if isinstance(canon, float):
        best_label: str | None = None
        best_distance = float("inf")
        for option in options:
            value = normalize_answer(option.text)
            if not isinstance(value, float):
                continue
            distance = abs(canon - value)
            if distance < best_distance:
                best_label, best_distance = option.label, distance
        if best_label is not None:
            return best_label
    text = canonical_str(canon) if isinstance(canon, float) else canon
    best_label = options[0].label
    best_similarity = -1.0
    for option in options:
        option_text = " ".join(option.text.split()).casefold()
        similarity = _lcs_similarity(text, option_text)
        if similarity > best_similarity:
            best_label, best_similarity = option.label, similarity
    return best_label


def render_closest_prompt(
    answer: str, options: Sequence[Option], template: str = CLOSEST_OPTION_PROMPT
) -> str:
    rendered_options = ", ".join(f"{o.label}) {o.text}" for o in options)
    return template.format(answer=answer, options=rendered_options)


_OPTION_LETTER_RE = re.compile(r"(?<![A-Za-z0-9])([A-E])(?![A-Za-z0-9])")


def find_option_letter(text: str, labels: Sequence[str]) -> str | None:
    """A standalone option letter in the text, if any.

    Prefers the first standalone occurrence after the last answer marker,
    falling back to the last standalone occurrence anywhere.
    """
    matches = [m for m in _OPTION_LETTER_RE.finditer(text) if m.group(1) in labels]
    if not matches:
        return None
    marker_end = _last_marker_end(text)
    if marker_end is not None:
        after = [m for m in matches if m.start() >= marker_end]
        if after:
            return after[0].group(1)
    return matches[-1].group(1)


# ---------------------------------------------------------------------------
# The per-item protocol
# ---------------------------------------------------------------------------


class ResolutionPath(Enum):
    POT_SUCCEEDED = "pot_succeeded"
    COT_FALLBACK = "cot_fallback"
    OPTION_DIRECT = "option_direct"
    OPTION_CLOSEST = "option_closest"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class InferenceOutcome:
    item_id: str
    pot_prompt: str
    pot_generation: str
    pot_exec: ExecResult
    cot_generation: str | None
    resolved_answer: str | None
    chosen_label: str | None
    path: ResolutionPath
    wall_time: float
    closest_prompt: str | None = None
    error_label: str | None = None  # reserved for hand annotation


def _generate_with_retry(client: ModelClient, request: GenerationRequest) -> str:
    # One retry on transport errors, none on model refusals.
    try:
        return client.generate(request)
    except TransportError:
        return client.generate(request)


def run_item(
    item: BenchmarkItem,
    client: ModelClient,
    executor: Executor,
    *,
    max_new: int = 1500,
    temperature: float = 0.0,
    template: str = SERIALIZATION_TEMPLATE,
    closest_prompt_template: str = CLOSEST_OPTION_PROMPT,
    model_mediated_closest: bool = False,
) -> InferenceOutcome:
    """Run the full answer-production protocol for one item.

    The reasoning-chain fallback fires iff program execution failed, and a
    standalone option letter always preempts closest-option matching.  A PoT
    generation lost to transport errors (after one retry) degrades to the
    fallback; when the fallback generation also cannot be transported the
    error propagates.
    """
    start_time = time.perf_counter()
    pot_prompt = render_prompt(f"{item.question} {POT_SUFFIX}", template)
    pot_transport_failed = False
    try:
        pot_generation = _generate_with_retry(
            client, GenerationRequest(pot_prompt, max_new, temperature)
        )
    except TransportError:
        pot_transport_failed = True
        pot_generation = ""

    if pot_transport_failed:
        pot_exec: ExecResult = Failure("empty_output")
    else:
        program = extract_program(pot_generation)
        pot_exec = Failure("empty_output") if program is None else executor.execute(program)

    cot_generation: str | None = None
    if isinstance(pot_exec, Failure):
        cot_prompt = render_prompt(item.question, template)
        cot_generation = _generate_with_retry(
            client, GenerationRequest(cot_prompt, max_new, temperature)
        )

    answer_text: str | None
    if isinstance(pot_exec, Value):
        answer_text = pot_exec.text
    else:
        answer_text = extract_answer(cot_generation) if cot_generation else None

    resolved_answer: str | None = None
    chosen_label: str | None = None
    closest_prompt: str | None = None

    if item.answer_form is AnswerForm.MULTIPLE_CHOICE:
        assert item.options is not None
        labels = [o.label for o in item.options]
        search_text = pot_exec.text if isinstance(pot_exec, Value) else (cot_generation or "")
        letter = find_option_letter(search_text, labels)
        if letter is not None:
            path = ResolutionPath.OPTION_DIRECT
            chosen_label = letter
            resolved_answer = letter
        elif answer_text is not None and answer_text.strip():
            closest_prompt = render_closest_prompt(
                answer_text, item.options, closest_prompt_template
            )
            chosen_label = _resolve_closest(
                answer_text, item, client, closest_prompt,
                model_mediated_closest, max_new, temperature, template,
            )
            resolved_answer = chosen_label
            path = ResolutionPath.OPTION_CLOSEST
        else:
            path = ResolutionPath.UNRESOLVED
    else:
        if answer_text is not None and answer_text.strip():
            resolved_answer = canonical_str(normalize_answer(answer_text))
            path = (
                ResolutionPath.POT_SUCCEEDED
                if isinstance(pot_exec, Value)
                else ResolutionPath.COT_FALLBACK
            )
        else:
            path = ResolutionPath.UNRESOLVED

    outcome = InferenceOutcome(
        item_id=item.id,
        pot_prompt=pot_prompt,
        pot_generation=pot_generation,
        pot_exec=pot_exec,
        cot_generation=cot_generation,
        resolved_answer=resolved_answer,
        chosen_label=chosen_label,
        path=path,
        wall_time=time.perf_counter() - start_time,
        closest_prompt=closest_prompt,
    )
    _check_protocol(outcome)
    return outcome


def _resolve_closest(
    answer_text: str,
    item: BenchmarkItem,
    client: ModelClient,
    closest_prompt: str,
    model_mediated: bool,
    max_new: int,
    temperature: float,
    template: str,
) -> str:
    assert item.options is not None
    if model_mediated:
        labels = [o.label for o in item.options]
        try:
            generation = _generate_with_retry(
                client,
                GenerationRequest(render_prompt(closest_prompt, template), max_new, temperature),
            )
            letter = find_option_letter(generation, labels)
            if letter is not None:
                return letter
        except TransportError:
            pass  # fall back to local selection
    return closest_option(normalize_answer(answer_text), item.options)


def _check_protocol(outcome: InferenceOutcome) -> None:
    fallback_fired = outcome.cot_generation is not None
    pot_failed = isinstance(outcome.pot_exec, Failure)
    if fallback_fired != pot_failed:
        raise AssertionError(
            f"protocol violation for {outcome.item_id}: fallback={fallback_fired}, "
            f"pot_failed={pot_failed}"
        )
    if outcome.path is ResolutionPath.POT_SUCCEEDED and not isinstance(outcome.pot_exec, Value):
        raise AssertionError("PotSucceeded requires a Value execution")
    if outcome.path is ResolutionPath.COT_FALLBACK and outcome.cot_generation is None:
        raise AssertionError("CotFallback requires a fallback generation")


# ---------------------------------------------------------------------------
# Outcome persistence
# ---------------------------------------------------------------------------


def _exec_to_json(result: ExecResult) -> dict:
    if isinstance(result, Value):
        return {"status": "ok", "value": result.text}
    return {"status": result.reason}


def _exec_from_json(obj: dict) -> ExecResult:
    if obj.get("status") == "ok":
        return Value(str(obj.get("value", "")))
    return Failure(str(obj["status"]))


def outcome_to_json(outcome: InferenceOutcome) -> dict:
    return {
        "item_id": outcome.item_id,
        "pot_prompt": outcome.pot_prompt,
        "pot_generation": outcome.pot_generation,
        "pot_exec": _exec_to_json(outcome.pot_exec),
        "cot_generation": outcome.cot_generation,
        "resolved_answer": outcome.resolved_answer,
        "chosen_label": outcome.chosen_label,
        "path": outcome.path.value,
        "wall_time": outcome.wall_time,
        "closest_prompt": outcome.closest_prompt,
        "error_label": outcome.error_label,
    }


def outcome_from_json(obj: dict) -> InferenceOutcome:
    return InferenceOutcome(
        item_id=str(obj["item_id"]),
        pot_prompt=str(obj.get("pot_prompt", "")),
        pot_generation=str(obj.get("pot_generation", "")),
        pot_exec=_exec_from_json(obj.get("pot_exec", {"status": "empty_output"})),
        cot_generation=obj.get("cot_generation"),
        resolved_answer=obj.get("resolved_answer"),
        chosen_label=obj.get("chosen_label"),
        path=ResolutionPath(obj["path"]),
        wall_time=float(obj.get("wall_time", 0.0)),
        closest_prompt=obj.get("closest_prompt"),
        error_label=obj.get("error_label"),
    )


def write_outcomes(outcomes: Iterable[InferenceOutcome], path: str | Path, append: bool = False) -> int:
    path = Path(path)
    mode = "a" if append else "w"
    count = 0
    with path.open(mode, encoding="utf-8", newline="") as handle:
        for outcome in outcomes:
            handle.write(json.dumps(outcome_to_json(outcome), ensure_ascii=False))
            handle.write("\n")
            count += 1
    return count


def read_outcomes(path: str | Path) -> list[InferenceOutcome]:
    out = []
    for raw in jsonl_lines(Path(path).read_text(encoding="utf-8")):
        if raw.strip():
            out.append(outcome_from_json(json.loads(raw)))
    return out
