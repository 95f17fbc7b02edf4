"""Assemble multi-task training mixtures with exact supervision spans.

Every example is serialized under one prompt template whose response slot
is final, so the supervised span is always the file's trailing characters:

    Below is an instruction that describes a task. Write a response that
    appropriately completes the request.

    ### Human: {instruction}

    ### Assistant: {response}

Task ratios are auxiliary-count relative to base-count (a ratio of 0.2
adds 20% more examples); the alternative share-of-mixture semantics is
available via ``ratio_semantics="share_of_mixture"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from .corpus import SourceRecord, jsonl_lines
from .masker import (
    IR_WRAPPER,
    IRSP_WRAPPER,
    MaskedExample,
    MaskPolicy,
    TaskKind,
    build_ir_example,
    build_irsp_example,
    ir_skip_reason,
    irsp_skip_reason,
)
from .seeding import derive_rng, sample_with_replacement, sample_without_replacement, shuffled

SERIALIZATION_TEMPLATE = (
    "Below is an instruction that describes a task. "
    "Write a response that appropriately completes the request."
    "\n\n### Human: {instruction}"
    "\n\n### Assistant: {response}"
)

TRAINING_SCHEMA = "dualforge-train-v1"

# Default study grid for the ratio sweeps.
DEFAULT_SWEEP_RATIOS = (0.2, 0.4, 0.6, 0.8)
DEFAULT_SWEEP_MASKS = (0.15, 0.4, 0.6, 0.8)


class MixtureError(ValueError):
    """A mixture request that cannot be satisfied."""


class Task(Enum):
    BASE = "base"
    IRSP = "irsp"
    IR = "ir"


@dataclass(frozen=True)
class MixSpec:
    """Mixture composition: task ratios, mask policies, and the shuffle seed."""

    r_task_irsp: float = 0.2
    r_task_ir: float = 0.6
    irsp_policy: MaskPolicy = MaskPolicy(r_mask=0.15)
    ir_policy: MaskPolicy = MaskPolicy(r_mask=0.6)
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        for name, value in (("r_task_irsp", self.r_task_irsp), ("r_task_ir", self.r_task_ir)):
            if not 0.0 <= value <= 1.0:
                raise MixtureError(f"{name} must lie in [0, 1], got {value}")

    def snapshot(self) -> dict:
        return {
            "r_task_irsp": self.r_task_irsp,
            "r_task_ir": self.r_task_ir,
            "irsp_policy": _policy_snapshot(self.irsp_policy),
            "ir_policy": _policy_snapshot(self.ir_policy),
            "shuffle_seed": self.shuffle_seed,
        }


def _policy_snapshot(policy: MaskPolicy) -> dict:
    return {
        "r_mask": policy.r_mask,
        "min_masked": policy.min_masked,
        "min_revealed": policy.min_revealed,
        "seed": policy.seed,
    }


@dataclass(frozen=True)
class TrainingExample:
    id: str
    task: Task
    full_text: str
    response_span: tuple[int, int]
    meta: dict


@dataclass(frozen=True)
class MixtureReport:
    counts: dict
    skipped: dict
    pool_sizes: dict
    spec: MixSpec


@dataclass(frozen=True)
class TrainingManifest:
    path: str
    counts: dict
    total: int
    spec_snapshot: dict | None


def serialize_example(
    instruction: str,
    response: str,
    task: Task,
    *,
    example_id: str,
    meta: dict | None = None,
    template: str = SERIALIZATION_TEMPLATE,
) -> TrainingExample:
    """Render one prompt+response text with the exact response span."""
    if not instruction or not response:
        raise MixtureError("instruction and response must be non-empty")
    full_text = template.format(instruction=instruction, response=response)
    start = len(full_text) - len(response)
    if full_text[start:] != response:
        raise MixtureError("serialization template must place {response} last")
    return TrainingExample(
        id=example_id,
        task=task,
        full_text=full_text,
        response_span=(start, len(full_text)),
        meta=meta or {},
    )


def render_prompt(instruction: str, template: str = SERIALIZATION_TEMPLATE) -> str:
    """The serialized prompt with an empty response slot, for inference."""
    return template.format(instruction=instruction, response="")


def auxiliary_count(n_base: int, ratio: float) -> int:
    """round(ratio * n_base) with round-half-to-even, for platform stability."""
    return round(ratio * n_base)


def _share_of_mixture_counts(n_base: int, spec: MixSpec) -> tuple[int, int]:
    total_ratio = spec.r_task_irsp + spec.r_task_ir
    if total_ratio >= 1.0:
        raise MixtureError("share_of_mixture semantics require r_task_irsp + r_task_ir < 1")
    total = n_base / (1.0 - total_ratio)
    return round(spec.r_task_irsp * total), round(spec.r_task_ir * total)


def _draw(pool: Sequence, count: int, seed: int, salt: str) -> list:
    rng = derive_rng(seed, salt)
    if count <= len(pool):
        return sample_without_replacement(pool, count, rng)
    return sample_with_replacement(pool, count, rng)


def _auxiliary_examples(
    task: Task,
    count: int,
    records: Sequence[SourceRecord],
    prebuilt: Sequence[MaskedExample] | None,
    policy: MaskPolicy,
    build: Callable[[SourceRecord], MaskedExample],
    skip_reason: Callable[[SourceRecord], str | None],
    template: str,
) -> tuple[list[TrainingExample], int, int]:
    """Sample and serialize `count` auxiliary examples for one task."""
    skipped = 0
    if prebuilt is not None:
        pool: list = list(prebuilt)
    else:
        pool = []
        for record in records:
            if skip_reason(record) is None:
                pool.append(record)
            else:
                skipped += 1
    if not pool:
        raise MixtureError(f"task {task.value!r} has ratio > 0 but zero maskable records")

    drawn = _draw(pool, count, policy.seed, f"sample:{task.value}")
    examples: list[TrainingExample] = []
    for k, entry in enumerate(drawn):
        if isinstance(entry, MaskedExample):
            masked = entry
            meta = {"source_id": masked.source_id}
        else:
            masked = build(entry)
            meta = {"source_id": masked.source_id, "thought_kind": entry.thought_kind.value}
        meta["policy"] = _policy_snapshot(masked.policy_used)
        examples.append(
            serialize_example(
                masked.rendered_input,
                masked.target,
                task,
                example_id=f"{task.value}-{k:06d}-{masked.source_id}",
                meta=meta,
                template=template,
            )
        )
    return examples, len(pool), skipped


def assemble_mixture(
    base: Sequence[SourceRecord],
    spec: MixSpec,
    *,
    irsp_pool: Sequence[MaskedExample] | None = None,
    ir_pool: Sequence[MaskedExample] | None = None,
    template: str = SERIALIZATION_TEMPLATE,
    irsp_wrapper: str = IRSP_WRAPPER,
    ir_wrapper: str = IR_WRAPPER,
    include_plain_questions: bool = True,
    ratio_semantics: str = "relative_to_base",
) -> tuple[list[TrainingExample], MixtureReport]:
    """Serialize the base set plus sampled auxiliary examples, shuffled.

    Auxiliary counts are exact: round(ratio * len(base)) per task
    (share-of-mixture semantics behind the flag).  Sampling draws without
    replacement from records that survive masking preconditions, falling
    back to replacement only when the request exceeds the maskable pool.
    Prebuilt example pools (from earlier build runs) may be passed instead.
    """
    if not base:
        raise MixtureError("base corpus must be non-empty")
    if ratio_semantics == "relative_to_base":
        n_irsp = auxiliary_count(len(base), spec.r_task_irsp)
        n_ir = auxiliary_count(len(base), spec.r_task_ir)
    elif ratio_semantics == "share_of_mixture":
        n_irsp, n_ir = _share_of_mixture_counts(len(base), spec)
    else:
        raise MixtureError(f"unknown ratio_semantics {ratio_semantics!r}")

    examples = [
        serialize_example(
            record.instruction,
            record.response,
            Task.BASE,
            example_id=f"base-{record.id}",
            meta={"source_id": record.id, "thought_kind": record.thought_kind.value},
            template=template,
        )
        for record in base
    ]

    pool_sizes: dict = {}
    skipped: dict = {}
    if n_irsp > 0:
        irsp_examples, pool_size, n_skipped = _auxiliary_examples(
            Task.IRSP,
            n_irsp,
            base,
            irsp_pool,
            spec.irsp_policy,
            lambda record: build_irsp_example(record, spec.irsp_policy, irsp_wrapper),
            irsp_skip_reason,
            template,
        )
        examples.extend(irsp_examples)
        pool_sizes[Task.IRSP.value] = pool_size
        skipped[Task.IRSP.value] = n_skipped
    if n_ir > 0:
        ir_examples, pool_size, n_skipped = _auxiliary_examples(
            Task.IR,
            n_ir,
            base,
            ir_pool,
            spec.ir_policy,
            lambda record: build_ir_example(
                record, spec.ir_policy, ir_wrapper, include_plain_questions
            ),
            lambda record: ir_skip_reason(record, include_plain_questions),
            template,
        )
        examples.extend(ir_examples)
        pool_sizes[Task.IR.value] = pool_size
        skipped[Task.IR.value] = n_skipped

    examples = shuffled(examples, spec.shuffle_seed)
    counts = {task.value: sum(1 for e in examples if e.task is task) for task in Task}
    report = MixtureReport(counts=counts, skipped=skipped, pool_sizes=pool_sizes, spec=spec)
    return examples, report


def write_training_file(
    examples: Sequence[TrainingExample],
    path: str | Path,
    *,
    spec: MixSpec | None = None,
) -> TrainingManifest:
    """Write examples as JSONL behind a schema header, order preserved.

    Span fidelity is asserted for every example at write time.  An empty
    example list produces an empty file.
    """
    path = Path(path)
    counts = {task.value: 0 for task in Task}
    with path.open("w", encoding="utf-8", newline="") as handle:
        if examples:
            handle.write(json.dumps({"_schema": TRAINING_SCHEMA, "offset_unit": "scalar"}))
            handle.write("\n")
        for example in examples:
            start, end = example.response_span
            if end != len(example.full_text):
                raise MixtureError(f"example {example.id}: response span must end the text")
            counts[example.task.value] += 1
            handle.write(
                json.dumps(
                    {
                        "id": example.id,
                        "task": example.task.value,
                        "text": example.full_text,
                        "response_start": start,
                        "response_end": end,
                        "meta": example.meta,
                    },
                    ensure_ascii=False,
                )
            )
            handle.write("\n")
    return TrainingManifest(
        path=str(path),
        counts=counts,
        total=len(examples),
        spec_snapshot=spec.snapshot() if spec is not None else None,
    )


def read_training_file(path: str | Path) -> list[TrainingExample]:
    """Reload a training file written by write_training_file."""
    path = Path(path)
    lines = jsonl_lines(path.read_text(encoding="utf-8"))
    if not lines:
        return []
    header = json.loads(lines[0])
    if header.get("_schema") != TRAINING_SCHEMA:
        raise MixtureError(f"{path}: missing or unknown schema header")
    out: list[TrainingExample] = []
    for raw in lines[1:]:
        obj = json.loads(raw)
        out.append(
            TrainingExample(
                id=obj["id"],
                task=Task(obj["task"]),
                full_text=obj["text"],
                response_span=(obj["response_start"], obj["response_end"]),
                meta=obj.get("meta", {}),
            )
        )
    return out


def sweep_grid(
    ratios: Sequence[float] | None = None,
    masks: Sequence[float] | None = None,
    task: TaskKind = TaskKind.IRSP,
    *,
    seed: int = 0,
) -> list[MixSpec]:
    """Cartesian ratio x mask grid of MixSpecs for one task, ratio-major.

    Defaults reproduce the standard 4x4 study grid; the non-swept task is
    disabled (ratio 0) so each config isolates one variable.
    """
    ratios = tuple(DEFAULT_SWEEP_RATIOS if ratios is None else ratios)
    masks = tuple(DEFAULT_SWEEP_MASKS if masks is None else masks)
    if not ratios or not masks:
        raise MixtureError("ratio and mask lists must be non-empty")
    for value in (*ratios, *masks):
        if not 0.0 < value < 1.0:
            raise MixtureError(f"sweep values must lie in (0, 1), got {value}")

    specs: list[MixSpec] = []
    for ratio in ratios:
        for mask in masks:
            if task is TaskKind.IRSP:
                specs.append(
                    MixSpec(
                        r_task_irsp=ratio,
                        r_task_ir=0.0,
                        irsp_policy=MaskPolicy(r_mask=mask, seed=seed),
                        shuffle_seed=seed,
                    )
                )
            else:
                specs.append(
                    MixSpec(
                        r_task_irsp=0.0,
                        r_task_ir=ratio,
                        ir_policy=MaskPolicy(r_mask=mask, seed=seed),
                        shuffle_seed=seed,
                    )
                )
    return specs
