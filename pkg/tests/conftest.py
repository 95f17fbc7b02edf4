from __future__ import annotations

import random

import pytest

from dualforge.corpus import AnswerForm, BenchmarkItem, Option, SourceRecord, ThoughtKind

WORDS = (
    "Tom Sue Anna the a store garden apples pears cats dogs price total cost "
    "sum left gave bought sold each day week share group more fewer boxes"
).split()


def make_record(
    i: int = 0,
    *,
    kind: ThoughtKind = ThoughtKind.COT,
    instruction: str | None = None,
    response: str | None = None,
) -> SourceRecord:
    if instruction is None:
        instruction = (
            f"Tom has {i + 2} cats, and Sue has {i + 3} dogs. How many pets are there?"
        )
    if response is None:
        if kind is ThoughtKind.COT:
            response = f"Tom brings {i + 2}. Sue brings {i + 3}. The answer is {2 * i + 5}."
        else:
            response = f"a = {i + 2}\nb = {i + 3}\nprint(a + b)"
    return SourceRecord(
        id=f"rec-{i}",
        source="unit",
        instruction=instruction,
        response=response,
        thought_kind=kind,
        answer=str(2 * i + 5),
    )


def make_records(n: int, *, pot_every: int = 3) -> list[SourceRecord]:
    return [
        make_record(i, kind=ThoughtKind.POT if pot_every and i % pot_every == 0 else ThoughtKind.COT)
        for i in range(n)
    ]


def random_cot_text(rng: random.Random, min_sentences: int = 2, max_sentences: int = 6) -> str:
    sentences = []
    for _ in range(rng.randint(min_sentences, max_sentences)):
        words = [rng.choice(WORDS) for _ in range(rng.randint(1, 7))]
        if rng.random() < 0.7:
            words.insert(rng.randrange(len(words) + 1), str(rng.randint(0, 999)))
        if rng.random() < 0.2:
            words.append(f"{rng.randint(1, 99)}.{rng.randint(10, 99)}")
        sentences.append(" ".join(words) + rng.choice([".", ".", "!", "?"]))
    separator = "\n" if rng.random() < 0.3 else " "
    return separator.join(sentences)


def random_pot_text(rng: random.Random, min_lines: int = 2, max_lines: int = 6) -> str:
    lines = []
    for k in range(rng.randint(min_lines, max_lines)):
        lines.append(f"v{k} = {rng.randint(0, 99)} {rng.choice('+-*')} {rng.randint(1, 9)}")
        if rng.random() < 0.2:
            lines.append("")
    lines.append("print(v0)")
    return "\n".join(lines)


def random_instruction(rng: random.Random) -> str:
    clauses = []
    for _ in range(rng.randint(1, 3)):
        words = [rng.choice(WORDS) for _ in range(rng.randint(3, 6))]
        if rng.random() < 0.8:
            words.insert(rng.randrange(len(words) + 1), str(rng.randint(0, 500)))
        clauses.append(" ".join(words))
    question_words = [rng.choice(WORDS) for _ in range(rng.randint(3, 5))]
    return ". ".join(clauses) + ". How many " + " ".join(question_words) + "?"


def random_record(rng: random.Random, index: int) -> SourceRecord:
    kind = ThoughtKind.POT if rng.random() < 0.3 else ThoughtKind.COT
    response = random_pot_text(rng) if kind is ThoughtKind.POT else random_cot_text(rng)
    return SourceRecord(
        id=f"rand-{index}",
        source="random",
        instruction=random_instruction(rng),
        response=response,
        thought_kind=kind,
        answer=None,
    )


def open_item(i: int, question: str, gold: str, benchmark: str = "bench") -> BenchmarkItem:
    return BenchmarkItem(
        id=f"item-{i}",
        benchmark=benchmark,
        question=question,
        answer_form=AnswerForm.OPEN,
        options=None,
        gold=gold,
    )


def choice_item(
    i: int,
    question: str,
    options: list[tuple[str, str]],
    gold: str,
    benchmark: str = "bench",
) -> BenchmarkItem:
    return BenchmarkItem(
        id=f"item-{i}",
        benchmark=benchmark,
        question=question,
        answer_form=AnswerForm.MULTIPLE_CHOICE,
        options=tuple(Option(label, text) for label, text in options),
        gold=gold,
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)
