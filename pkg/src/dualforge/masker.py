"""Construct the two auxiliary training tasks by masking segments.

Forward examples (reasoning-state prediction) hide reasoning steps inside
the thought and ask for them back given the full instruction.  Reverse
examples (instruction reconstruction) hide numeral-bearing clauses or
questions inside the instruction and ask for them back given the full
thought.  Masked spans are replaced by the literal ``<MASK>`` tag; the
target is the hidden segments in original order, newline-joined.

Records that cannot be masked safely (fewer than two segments, no eligible
clause, or text that already contains the mask tag) raise
:class:`RecordSkipped` so callers can drop and count them instead of
emitting degenerate training signal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .corpus import SourceRecord, ThoughtKind, jsonl_lines
from .seeding import derive_rng, sample_without_replacement
from .segmenter import (
    Segment,
    SegmentKind,
    segment_cot_steps,
    segment_instruction_clauses,
    segment_pot_statements,
)

MASK_TAG = "<MASK>"

# {instruction} and {masked_thought} / {response} and {masked_instruction}
# are required placeholders; the exact strings are configuration.
IRSP_WRAPPER = (
    "Fill in the masked reasoning steps.\n"
    "Instruction: {instruction}\n"
    "Thought: {masked_thought}"
)
IR_WRAPPER = (
    "Reconstruct the masked parts of the instruction.\n"
    "Thought: {response}\n"
    "Instruction: {masked_instruction}"
)


class MaskingError(ValueError):
    """A masking request that can never be satisfied."""


class RecordSkipped(Exception):
    """Signal that a record fails masking preconditions; carries the reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class TaskKind(Enum):
    IRSP = "irsp"
    IR = "ir"


@dataclass(frozen=True)
class MaskPolicy:
    """How many segments to hide and with what seed.

    r_mask is the fraction of segments masked, in (0, 1); at least
    min_masked segments are always hidden and at least min_revealed always
    remain visible.
    """

    r_mask: float
    min_masked: int = 1
    min_revealed: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.r_mask < 1.0:
            raise MaskingError(f"r_mask must lie in (0, 1), got {self.r_mask}")
        if self.min_masked < 1:
            raise MaskingError("min_masked must be >= 1")
        if self.min_revealed < 1:
            raise MaskingError("min_revealed must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise MaskingError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class MaskedExample:
    task_kind: TaskKind
    source_id: str
    rendered_input: str
    target: str
    masked_indices: tuple[int, ...]
    policy_used: MaskPolicy


def select_mask_indices(
    n_segments: int,
    eligible: Sequence[int],
    policy: MaskPolicy,
    record_salt: str,
) -> list[int]:
    """Pick which segments to mask, deterministically per (seed, salt).

    The count is ceil(r_mask * n_segments) clamped to [min_masked,
    min(len(eligible), n_segments - min_revealed)]; indices are drawn
    uniformly without replacement from `eligible` and returned ascending.
    """
    if n_segments < 2:
        raise MaskingError("unmaskable: cannot keep one revealed and one masked")
    eligible = sorted(set(eligible))
    if not eligible:
        raise MaskingError("no eligible segments")
    if any(i < 0 or i >= n_segments for i in eligible):
        raise MaskingError("eligible indices out of range")

    upper = min(len(eligible), n_segments - policy.min_revealed)
    if upper < policy.min_masked:
        raise MaskingError(
            "unmaskable: cannot satisfy min_masked="
            f"{policy.min_masked} with min_revealed={policy.min_revealed} "
            f"over {n_segments} segments ({len(eligible)} eligible)"
        )
    count = min(max(math.ceil(policy.r_mask * n_segments), policy.min_masked), upper)
    rng = derive_rng(policy.seed, record_salt)
    return sorted(sample_without_replacement(eligible, count, rng))


def mask_spans(source: str, segments: Sequence[Segment], indices: Sequence[int]) -> str:
    """Replace the chosen segments with the mask tag, keeping all gaps."""
    parts: list[str] = []
    prev = 0
    for idx in indices:
        start, end = segments[idx].span
        parts.append(source[prev:start])
        parts.append(MASK_TAG)
        prev = end
    parts.append(source[prev:])
    return "".join(parts)


def _thought_segments(record: SourceRecord) -> list[Segment]:
    if record.thought_kind is ThoughtKind.COT:
        return segment_cot_steps(record.response)
    return segment_pot_statements(record.response)


def irsp_skip_reason(record: SourceRecord) -> str | None:
    """Why a record cannot produce a forward example, or None if it can."""
    if MASK_TAG in record.instruction or MASK_TAG in record.response:
        return "contains mask tag"
    if len(_thought_segments(record)) < 2:
        return "fewer than 2 thought segments"
    return None


def ir_eligible_indices(
    segments: Sequence[Segment], include_plain_questions: bool = True
) -> list[int]:
    """Clause indices eligible for reverse masking.

    Numeral-bearing clauses always qualify; questions without numerals
    qualify only when include_plain_questions is set.
    """
    out = []
    for i, seg in enumerate(segments):
        if seg.has_numeral:
            out.append(i)
        elif include_plain_questions and seg.kind is SegmentKind.QUESTION:
            out.append(i)
    return out


def ir_skip_reason(record: SourceRecord, include_plain_questions: bool = True) -> str | None:
    """Why a record cannot produce a reverse example, or None if it can."""
    if MASK_TAG in record.instruction or MASK_TAG in record.response:
        return "contains mask tag"
    clauses = segment_instruction_clauses(record.instruction)
    if len(clauses) < 2:
        return "fewer than 2 instruction clauses"
    if not ir_eligible_indices(clauses, include_plain_questions):
        return "no eligible clauses"
    return None


def build_irsp_example(
    record: SourceRecord,
    policy: MaskPolicy,
    wrapper: str = IRSP_WRAPPER,
) -> MaskedExample:
    """Render one forward example: full instruction, partially hidden thought."""
    reason = irsp_skip_reason(record)
    if reason is not None:
        raise RecordSkipped(reason)
    segments = _thought_segments(record)
    indices = select_mask_indices(
        len(segments), range(len(segments)), policy, record_salt=record.id
    )
    masked_thought = mask_spans(record.response, segments, indices)
    example = MaskedExample(
        task_kind=TaskKind.IRSP,
        source_id=record.id,
        rendered_input=wrapper.format(
            instruction=record.instruction, masked_thought=masked_thought
        ),
        target="\n".join(segments[i].text for i in indices),
        masked_indices=tuple(indices),
        policy_used=policy,
    )
    _check_example(example)
    return example


def build_ir_example(
    record: SourceRecord,
    policy: MaskPolicy,
    wrapper: str = IR_WRAPPER,
    include_plain_questions: bool = True,
) -> MaskedExample:
    """Render one reverse example: full thought, partially hidden instruction."""
    reason = ir_skip_reason(record, include_plain_questions)
    if reason is not None:
        raise RecordSkipped(reason)
    clauses = segment_instruction_clauses(record.instruction)
    eligible = ir_eligible_indices(clauses, include_plain_questions)
    indices = select_mask_indices(len(clauses), eligible, policy, record_salt=record.id)
    masked_instruction = mask_spans(record.instruction, clauses, indices)
    example = MaskedExample(
        task_kind=TaskKind.IR,
        source_id=record.id,
        rendered_input=wrapper.format(
            response=record.response, masked_instruction=masked_instruction
        ),
        target="\n".join(clauses[i].text for i in indices),
        masked_indices=tuple(indices),
        policy_used=policy,
    )
    _check_example(example)
    return example


def _check_example(example: MaskedExample) -> None:
    if example.rendered_input.count(MASK_TAG) != len(example.masked_indices):
        raise MaskingError("tag-count invariant violated")
    if not example.target:
        raise MaskingError("empty target")
    if list(example.masked_indices) != sorted(set(example.masked_indices)):
        raise MaskingError("masked_indices must be strictly ascending")


def write_masked_examples(examples: Sequence[MaskedExample], path) -> None:
    """Persist masked examples as JSONL, one example per line."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        for example in examples:
            handle.write(
                json.dumps(
                    {
                        "task": example.task_kind.value,
                        "source_id": example.source_id,
                        "rendered_input": example.rendered_input,
                        "target": example.target,
                        "masked_indices": list(example.masked_indices),
                        "policy": {
                            "r_mask": example.policy_used.r_mask,
                            "min_masked": example.policy_used.min_masked,
                            "min_revealed": example.policy_used.min_revealed,
                            "seed": example.policy_used.seed,
                        },
                    },
                    ensure_ascii=False,
                )
            )
            handle.write("\n")


def read_masked_examples(path) -> list[MaskedExample]:
    """Load masked examples written by write_masked_examples."""
    out: list[MaskedExample] = []
    for raw in jsonl_lines(Path(path).read_text(encoding="utf-8")):
        if not raw.strip():
            continue
        obj = json.loads(raw)
        policy = obj.get("policy", {})
        out.append(
            MaskedExample(
                task_kind=TaskKind(obj["task"]),
                source_id=obj["source_id"],
                rendered_input=obj["rendered_input"],
                target=obj["target"],
                masked_indices=tuple(obj["masked_indices"]),
                policy_used=MaskPolicy(
                    r_mask=float(policy.get("r_mask", 0.15)),
                    min_masked=int(policy.get("min_masked", 1)),
                    min_revealed=int(policy.get("min_revealed", 1)),
                    seed=int(policy.get("seed", 0)),
                ),
            )
        )
    return out


def wrapper_affixes(wrapper: str, body_placeholder: str, **fields: str) -> tuple[str, str]:
    """Split a rendered wrapper into (prefix, suffix) around the masked body.

    Lets callers recover the masked thought/instruction from rendered_input
    without re-running segmentation.
    """
    sentinel = "\x00dualforge-body\x00"
    rendered = wrapper.format(**fields, **{body_placeholder: sentinel})
    prefix, _, suffix = rendered.partition(sentinel)
    return prefix, suffix
