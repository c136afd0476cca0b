"""Character-level attacks on treebank forms.

Four single-edit attacks (drop, swap, insert, replace) are applied to a
target fraction of each sentence's content words. Every attacked word is
exactly one Damerau-Levenshtein edit away from the original; annotations,
comments, and multiword surface forms are never touched.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .conllu import Sentence, Treebank
from .keyboard import KeyboardLayout, adjacent_keys
from .rng import GOLDEN_GAMMA, RngStream, splitmix64_next

CONTENT_UPOS = frozenset({"ADJ", "ADV", "INTJ", "PROPN", "NOUN", "VERB"})

_MASK64 = (1 << 64) - 1


class AttackKind(enum.Enum):
    DROP = "drop"
    SWAP = "swap"
    INSERT = "insert"
    REPLACE = "replace"


# Canonical draw order: index i of this tuple is selected by a uniform
# draw below 4, so the order is part of the reproducibility contract.
ALL_KINDS = (AttackKind.DROP, AttackKind.SWAP, AttackKind.INSERT, AttackKind.REPLACE)


@dataclass
class PerturbationPolicy:
    """Which tokens may be attacked, and on which keyboard."""

    layout: KeyboardLayout
    content_upos: frozenset[str] = CONTENT_UPOS
    min_form_length: int = 3

    def __post_init__(self):
        if self.min_form_length < 2:
            raise ValueError("min_form_length must be >= 2")


@dataclass
class AttackRecord:
    """Provenance of one attack; sentence_index is 0-based, position 1-based."""

    sentence_index: int
    token_id: int
    original_form: str
    perturbed_form: str
    kind: AttackKind
    position: int
    rng_seed: int

    def to_line(self) -> str:
        return "\t".join(
            (
                str(self.sentence_index),
                str(self.token_id),
                self.original_form,
                self.perturbed_form,
                self.kind.value,
                str(self.position),
                f"{self.rng_seed:016x}",
            )
        )

    @classmethod
    def from_line(cls, line: str) -> "AttackRecord":
        fields = line.split("\t")
        if len(fields) != 7:
            raise ValueError(f"expected 7 tab-separated fields, got {len(fields)}")
        return cls(
            sentence_index=int(fields[0]),
            token_id=int(fields[1]),
            original_form=fields[2],
            perturbed_form=fields[3],
            kind=AttackKind(fields[4].lower()),
            position=int(fields[5]),
            rng_seed=int(fields[6], 16),
        )


def serialize_records(records: list[AttackRecord]) -> str:
    """Sidecar format: one record per line, no header."""
    return "".join(record.to_line() + "\n" for record in records)


def parse_records(text: str) -> list[AttackRecord]:
    return [AttackRecord.from_line(line) for line in text.splitlines() if line]


def eligible_tokens(sentence: Sentence, policy: PerturbationPolicy) -> list[int]:
    """Ids of attackable tokens, in positional order.

    A token qualifies if its UPOS is a content tag, its form has at least
    ``min_form_length`` characters, and at least one of those characters is
    on the keyboard (case-insensitively).
    """
    alphabet = policy.layout.alphabet
    out = []
    for token in sentence.tokens:
        if token.upos not in policy.content_upos:
            continue
        if len(token.form) < policy.min_form_length:
            continue
        if not any(c.lower() in alphabet for c in token.form):
            continue
        out.append(token.id)
    return out


def target_count(rate: float, eligible_count: int) -> int:
    """Number of attack targets: ``floor(rate * n + 0.5)``, clamped to n."""
    return min(int(rate * eligible_count + 0.5), eligible_count)


def select_targets(eligible: list[int], rate: float, rng: RngStream) -> set[int]:
    """Pick the target ids by a seeded partial Fisher-Yates shuffle."""
    k = target_count(rate, len(eligible))
    pool = list(eligible)
    for i in range(k):
        j = i + rng.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return set(pool[:k])


def _inherit_case(replacement: str, original: str) -> str:
    if original.isupper():
        upper = replacement.upper()
        if len(upper) == len(replacement):
            return upper
    return replacement


def apply_attack(
    form: str, kind: AttackKind, rng: RngStream, layout: KeyboardLayout
) -> tuple[str, int] | None:
    """One random edit of the given kind; ``None`` when it has no legal site.

    Returns ``(perturbed_form, position)`` with a 1-based position: the
    removed character for drop, the left character of the swapped pair, the
    inserted character's index in the result for insert, and the replaced
    character for replace.
    """
    n = len(form)
    if kind is AttackKind.DROP:
        # The first character is never dropped; word-initial letters carry
        # the most recognition weight.
        if n < 2:
            return None
        pos = 2 + rng.below(n - 1)
        return form[: pos - 1] + form[pos:], pos
    if kind is AttackKind.SWAP:
        pairs = [i for i in range(1, n) if form[i - 1] != form[i]]
        if not pairs:
            return None
        i = rng.choice(pairs)
        return form[: i - 1] + form[i] + form[i - 1] + form[i + 1 :], i
    if kind is AttackKind.INSERT:
        # Fat-finger model: the inserted character neighbors the key just
        # before the insertion gap.
        gaps = [i for i in range(1, n + 1) if adjacent_keys(layout, form[i - 1])]
        if not gaps:
            return None
        gap = rng.choice(gaps)
        neighbors = sorted(adjacent_keys(layout, form[gap - 1]))
        inserted = _inherit_case(rng.choice(neighbors), form[gap - 1])
        return form[:gap] + inserted + form[gap:], gap + 1
    if kind is AttackKind.REPLACE:
        sites = [i for i in range(1, n + 1) if adjacent_keys(layout, form[i - 1])]
        if not sites:
            return None
        pos = rng.choice(sites)
        neighbors = sorted(adjacent_keys(layout, form[pos - 1]))
        replacement = _inherit_case(rng.choice(neighbors), form[pos - 1])
        return form[: pos - 1] + replacement + form[pos:], pos
    raise ValueError(f"unknown attack kind {kind!r}")


def attack_form(
    form: str, rng: RngStream, layout: KeyboardLayout
) -> tuple[str, AttackKind, int] | None:
    """Draw a kind uniformly and apply it, redrawing among the remaining
    kinds when the drawn one has no legal site. ``None`` if all four fail."""
    remaining = list(ALL_KINDS)
    while remaining:
        kind = remaining.pop(rng.below(len(remaining)))
        result = apply_attack(form, kind, rng, layout)
        if result is not None:
            perturbed, position = result
            return perturbed, kind, position
    return None


def sentence_seed(treebank_seed: int, sentence_index: int) -> int:
    """Derive an independent per-sentence stream seed from the master seed."""
    state = (treebank_seed ^ ((sentence_index + 1) * GOLDEN_GAMMA)) & _MASK64
    return splitmix64_next(state)[1]


def _perturb_sentence(
    sentence: Sentence,
    policy: PerturbationPolicy,
    rate: float,
    sentence_index: int,
    seed: int,
) -> tuple[Sentence, list[AttackRecord]]:
    rng = RngStream(seed)
    eligible = eligible_tokens(sentence, policy)
    targets = select_targets(eligible, rate, rng)
    if not targets:
        return sentence, []
    pool = [tid for tid in eligible if tid not in targets]
    forms = {t.id: t.form for t in sentence.tokens}
    records = []
    queue = [tid for tid in eligible if tid in targets]
    index = 0
    while index < len(queue):
        tid = queue[index]
        index += 1
        result = attack_form(forms[tid], rng, policy.layout)
        if result is None:
            # No applicable attack at all: hand the slot to an unselected
            # eligible token, or drop it when the pool is exhausted.
            if pool:
                queue.append(pool.pop(rng.below(len(pool))))
            continue
        perturbed, kind, position = result
        records.append(
            AttackRecord(
                sentence_index=sentence_index,
                token_id=tid,
                original_form=forms[tid],
                perturbed_form=perturbed,
                kind=kind,
                position=position,
                rng_seed=seed,
            )
        )
    records.sort(key=lambda r: r.token_id)
    new_forms = {r.token_id: r.perturbed_form for r in records}
    tokens = [
        replace(t, form=new_forms[t.id]) if t.id in new_forms else t
        for t in sentence.tokens
    ]
    return replace(sentence, tokens=tokens), records


def perturb_treebank(
    tb: Treebank, policy: PerturbationPolicy, rate: float, seed: int
) -> tuple[Treebank, list[AttackRecord]]:
    """Attack a copy of ``tb`` at the given rate; fully seed-deterministic.

    Each sentence is perturbed from its own derived stream, so any parallel
    schedule would produce identical output. Records are returned
    sentence-major, token-minor.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    sentences = []
    records: list[AttackRecord] = []
    for index, sentence in enumerate(tb.sentences):
        perturbed, sent_records = _perturb_sentence(
            sentence, policy, rate, index, sentence_seed(seed, index)
        )
        sentences.append(perturbed)
        records.extend(sent_records)
    return Treebank(sentences=sentences, source_name=tb.source_name), records
