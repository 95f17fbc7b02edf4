"""Ingestion and validation of training corpora and evaluation benchmarks.

Both file kinds are line-delimited JSON, UTF-8, one record per line:

    corpus line:    {"id": str, "source": str, "instruction": str,
                     "response": str, "thought_kind": "cot"|"pot",
                     "answer": str|null}
    benchmark line: {"id": str, "question": str,
                     "answer_form": "open"|"multiple_choice",
                     "options": [{"label": str, "text": str}]|null,
                     "gold": str}

Loading is a pure function of file contents: order-stable, locale
independent, and safe to call concurrently on distinct paths.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable


class CorpusFormatError(ValueError):
    """A corpus or benchmark file violates its schema."""


class ThoughtKind(Enum):
    COT = "cot"
    POT = "pot"


class AnswerForm(Enum):
    OPEN = "open"
    MULTIPLE_CHOICE = "multiple_choice"


ALLOWED_OPTION_LABELS = frozenset("ABCDE")


@dataclass(frozen=True)
class SourceRecord:
    """One <instruction, thought, answer> training triple."""

    id: str
    source: str
    instruction: str
    response: str
    thought_kind: ThoughtKind
    answer: str | None = None


@dataclass(frozen=True)
class Option:
    label: str
    text: str


@dataclass(frozen=True)
class BenchmarkItem:
    """One evaluation question with its answer form and gold answer."""

    id: str
    benchmark: str
    question: str
    answer_form: AnswerForm
    options: tuple[Option, ...] | None
    gold: str


@dataclass(frozen=True)
class CorpusManifest:
    name: str
    path: str
    record_count: int
    thought_kind_counts: dict


@dataclass(frozen=True)
class Violation:
    field: str
    message: str


def jsonl_lines(text: str) -> list[str]:
    """Split on "\\n" only; str.splitlines would also break on Unicode line
    separators that are legal inside JSON strings."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def validate_record(record: SourceRecord) -> list[Violation]:
    """Check per-record invariants; an empty report means the record is valid.

    Violations are data, not failures: corpus-level checks (id uniqueness)
    live in :func:`load_corpus`.
    """
    report: list[Violation] = []
    if not record.id:
        report.append(Violation("id", "id must be non-empty"))
    if not record.instruction.strip():
        report.append(Violation("instruction", "instruction is empty after whitespace trimming"))
    if not record.response.strip():
        report.append(Violation("response", "response is empty after whitespace trimming"))
    if not isinstance(record.thought_kind, ThoughtKind):
        report.append(Violation("thought_kind", f"not a ThoughtKind: {record.thought_kind!r}"))
    return report


def _parse_corpus_line(raw: str, line_no: int) -> SourceRecord:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"line {line_no}: malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {line_no}: expected a JSON object")
    for key in ("id", "source", "instruction", "response", "thought_kind"):
        if key not in obj:
            raise CorpusFormatError(f"line {line_no}: missing field {key!r}")
    kind_raw = obj["thought_kind"]
    try:
        kind = ThoughtKind(kind_raw)
    except ValueError:
        raise CorpusFormatError(
            f"line {line_no}: unknown thought_kind {kind_raw!r} (expected 'cot' or 'pot')"
        ) from None
    record = SourceRecord(
        id=str(obj["id"]),
        source=str(obj["source"]),
        instruction=str(obj["instruction"]),
        response=str(obj["response"]),
        thought_kind=kind,
        answer=None if obj.get("answer") is None else str(obj["answer"]),
    )
    report = validate_record(record)
    if report:
        details = "; ".join(f"{v.field}: {v.message}" for v in report)
        raise CorpusFormatError(f"line {line_no}: invalid record: {details}")
    return record


def load_corpus(path: str | Path) -> tuple[list[SourceRecord], CorpusManifest]:
    """Load a corpus file, returning records in file order plus a manifest."""
    path = Path(path)
    records: list[SourceRecord] = []
    seen: dict[str, int] = {}
    counts: Counter = Counter()
    with path.open(encoding="utf-8", newline="") as handle:
        for line_no, raw in enumerate(jsonl_lines(handle.read()), start=1):
            record = _parse_corpus_line(raw, line_no)
            if record.id in seen:
                raise CorpusFormatError(
                    f"duplicate id {record.id!r} at line {line_no} "
                    f"(first occurrence at line {seen[record.id]})"
                )
            seen[record.id] = line_no
            counts[record.thought_kind] += 1
            records.append(record)
    manifest = CorpusManifest(
        name=path.stem,
        path=str(path),
        record_count=len(records),
        thought_kind_counts={kind: counts.get(kind, 0) for kind in ThoughtKind},
    )
    if manifest.record_count != sum(manifest.thought_kind_counts.values()):
        raise CorpusFormatError("manifest arithmetic violated: counts do not sum to record_count")
    return records, manifest


def write_corpus(records: Iterable[SourceRecord], path: str | Path) -> None:
    """Write records as corpus JSONL; load_corpus on the result round-trips."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for record in records:
            handle.write(
                json.dumps(
                    {
                        "id": record.id,
                        "source": record.source,
                        "instruction": record.instruction,
                        "response": record.response,
                        "thought_kind": record.thought_kind.value,
                        "answer": record.answer,
                    },
                    ensure_ascii=False,
                )
            )
            handle.write("\n")


def _parse_benchmark_line(raw: str, line_no: int, benchmark: str) -> BenchmarkItem:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"line {line_no}: malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {line_no}: expected a JSON object")
    for key in ("id", "question", "answer_form", "gold"):
        if key not in obj:
            raise CorpusFormatError(f"line {line_no}: missing field {key!r}")
    try:
        form = AnswerForm(obj["answer_form"])
    except ValueError:
        raise CorpusFormatError(
            f"line {line_no}: unknown answer_form {obj['answer_form']!r}"
        ) from None

    raw_options = obj.get("options")
    options: tuple[Option, ...] | None = None
    if raw_options is not None:
        if not isinstance(raw_options, list):
            raise CorpusFormatError(f"line {line_no}: options must be a list or null")
        options = tuple(Option(label=str(o["label"]), text=str(o["text"])) for o in raw_options)

    item = BenchmarkItem(
        id=str(obj["id"]),
        benchmark=benchmark,
        question=str(obj["question"]),
        answer_form=form,
        options=options,
        gold=str(obj["gold"]),
    )
    _check_item(item, line_no)
    return item


def _check_item(item: BenchmarkItem, line_no: int) -> None:
    if not item.question.strip():
        raise CorpusFormatError(f"line {line_no}: empty question")
    if item.answer_form is AnswerForm.MULTIPLE_CHOICE:
        if not item.options:
            raise CorpusFormatError(
                f"line {line_no}: multiple_choice item {item.id!r} has no options"
            )
        labels = [o.label for o in item.options]
        if len(set(labels)) != len(labels):
            raise CorpusFormatError(f"line {line_no}: duplicate option labels in {item.id!r}")
        bad = [l for l in labels if l not in ALLOWED_OPTION_LABELS]
        if bad:
            raise CorpusFormatError(
                f"line {line_no}: option labels must be single letters A-E, got {bad!r}"
            )
        if item.gold not in labels:
            raise CorpusFormatError(
                f"line {line_no}: gold {item.gold!r} is not among option labels {labels!r}"
            )
    elif item.options:
        raise CorpusFormatError(
            f"line {line_no}: open item {item.id!r} must not carry options"
        )


def load_benchmark(path: str | Path, benchmark: str) -> list[BenchmarkItem]:
    """Load a benchmark file; every item is validated against its answer form."""
    if not benchmark:
        raise CorpusFormatError("benchmark name must be non-empty")
    path = Path(path)
    items: list[BenchmarkItem] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        for line_no, raw in enumerate(jsonl_lines(handle.read()), start=1):
            item = _parse_benchmark_line(raw, line_no, benchmark)
            if item.id in seen:
                raise CorpusFormatError(
                    f"duplicate id {item.id!r} at line {line_no} "
                    f"(first occurrence at line {seen[item.id]})"
                )
            seen[item.id] = line_no
            items.append(item)
    return items


def write_benchmark(items: Iterable[BenchmarkItem], path: str | Path) -> None:
    """Write benchmark items as JSONL in the load_benchmark schema."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for item in items:
            handle.write(
                json.dumps(
                    {
                        "id": item.id,
                        "question": item.question,
                        "answer_form": item.answer_form.value,
                        "options": None
                        if item.options is None
                        else [{"label": o.label, "text": o.text} for o in item.options],
                        "gold": item.gold,
                    },
                    ensure_ascii=False,
                )
            )
            handle.write("\n")
