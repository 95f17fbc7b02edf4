"""Decompose thoughts and instructions into maskable segments.

Three segmentations share one contract: segments carry exact character
spans into the source text, spans are non-overlapping and ascending, and
interleaving segment texts with the gaps between them reconstructs the
source byte-for-byte.  All rules are deliberately simple and deterministic
because they directly shape training data:

* reasoning steps: split at newlines, and within a line after sentence-final
  punctuation followed by whitespace ("." guarded against decimals);
* program statements: one segment per non-blank physical line;
* instruction clauses: sentence-final punctuation as above, plus commas and
  semicolons that separate at least three words on each side.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

_SENTENCE_FINAL = ".!?"
_CLAUSE_SEPARATORS = ",;"

_ASCII_DIGIT_RE = re.compile(r"[0-9]")

# Closed set by design: predictable false negatives beat a cardinal parser.
_NUMBER_WORDS = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty "
    "thirty forty fifty sixty seventy eighty ninety hundred thousand million "
    "half twice"
).split()
_NUMBER_WORD_RE = re.compile(
    r"\b(?:" + "|".join(_NUMBER_WORDS) + r")\b", re.IGNORECASE
)


class SegmentKind(Enum):
    COT_STEP = "cot_step"
    POT_STATEMENT = "pot_statement"
    CLAUSE = "clause"
    QUESTION = "question"


@dataclass(frozen=True)
class Segment:
    text: str
    span: tuple[int, int]
    has_numeral: bool
    kind: SegmentKind


def detect_numerals(text: str) -> bool:
    """True iff text contains an ASCII digit or a standalone number word."""
    return bool(_ASCII_DIGIT_RE.search(text)) or bool(_NUMBER_WORD_RE.search(text))


def _make_segment(source: str, start: int, end: int, kind: SegmentKind) -> Segment:
    text = source[start:end]
    return Segment(text=text, span=(start, end), has_numeral=detect_numerals(text), kind=kind)


def _is_decimal_period(text: str, i: int) -> bool:
    """A period with digits immediately on both sides never ends a segment."""
    return (
        text[i] == "."
        and 0 < i < len(text) - 1
        and text[i - 1].isdigit()
        and text[i + 1].isdigit()
    )


def _is_sentence_cut(text: str, i: int) -> bool:
    """True when a boundary falls immediately after position i."""
    c = text[i]
    if c not in _SENTENCE_FINAL:
        return False
    if _is_decimal_period(text, i):
        return False
    return i + 1 < len(text) and text[i + 1].isspace()


def _degenerate(source: str, kind: SegmentKind) -> list[Segment]:
    # Whitespace-only input: one segment flagged degenerate by its empty
    # trimmed text; callers reject it.
    return [_make_segment(source, 0, len(source), kind)]


def segment_cot_steps(response: str) -> list[Segment]:
    """Split a chain-of-thought response into reasoning steps."""
    if not response:
        raise ValueError("response must be non-empty")
    if not response.strip():
        return _degenerate(response, SegmentKind.COT_STEP)

    segments: list[Segment] = []
    n = len(response)
    i = 0
    while i < n:
        while i < n and response[i].isspace():
            i += 1
        if i == n:
            break
        start = i
        while i < n:
            if response[i] == "\n":
                break
            if _is_sentence_cut(response, i):
                i += 1
                break
            i += 1
        end = i
        while end > start and response[end - 1].isspace():
            end -= 1
        segments.append(_make_segment(response, start, end, SegmentKind.COT_STEP))
    return segments


def segment_pot_statements(response: str) -> list[Segment]:
    """Split a program-of-thought response into per-line statements."""
    if not response:
        raise ValueError("response must be non-empty")

    segments: list[Segment] = []
    offset = 0
    for line in response.split("\n"):
        if line.strip():
            segments.append(
                _make_segment(response, offset, offset + len(line), SegmentKind.POT_STATEMENT)
            )
        offset += len(line) + 1
    return segments


def _word_count(text: str) -> int:
    return len(text.split())


def _next_sentence_end(text: str, start: int) -> int:
    """Position where the sentence containing `start` ends (exclusive)."""
    for i in range(start, len(text)):
        if _is_sentence_cut(text, i):
            return i + 1
    return len(text)


def segment_instruction_clauses(instruction: str) -> list[Segment]:
    """Split an instruction into clauses and questions.

    Sentence-final punctuation always ends a clause (and stays attached to
    it).  A comma or semicolon ends a clause only when at least three words
    sit on each side of it, which keeps enumeration commas intact; the
    separator itself belongs to the gap.  A clause whose trimmed text ends
    with "?" is a question.
    """
    if not instruction:
        raise ValueError("instruction must be non-empty")
    if not instruction.strip():
        return _degenerate(instruction, SegmentKind.CLAUSE)

    raw_spans: list[tuple[int, int]] = []
    n = len(instruction)
    i = 0
    while i < n:
        while i < n and (instruction[i].isspace() or instruction[i] in _CLAUSE_SEPARATORS):
            i += 1
        if i == n:
            break
        start = i
        while i < n:
            c = instruction[i]
            if _is_sentence_cut(instruction, i):
                i += 1
                break
            if c in _CLAUSE_SEPARATORS:
                left = instruction[start:i]
                right = instruction[i + 1 : _next_sentence_end(instruction, i + 1)]
                if _word_count(left) >= 3 and _word_count(right) >= 3:
                    break
            i += 1
        end = i
        while end > start and instruction[end - 1].isspace():
            end -= 1
        if end > start:
            raw_spans.append((start, end))
        if i < n and instruction[i] in _CLAUSE_SEPARATORS:
            i += 1

    segments: list[Segment] = []
    for start, end in raw_spans:
        text = instruction[start:end]
        kind = SegmentKind.QUESTION if text.strip().endswith("?") else SegmentKind.CLAUSE
        segments.append(_make_segment(instruction, start, end, kind))
    return segments


def reconstruct(source: str, segments: list[Segment]) -> str:
    """Rebuild the source from segments plus their gaps (sanity oracle)."""
    parts: list[str] = []
    prev = 0
    for seg in segments:
        start, end = seg.span
        parts.append(source[prev:start])
        parts.append(seg.text)
        prev = end
    parts.append(source[prev:])
    return "".join(parts)
