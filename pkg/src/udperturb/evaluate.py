"""Scoring of predicted treebanks against gold: LAS/UAS, tag accuracy,
run aggregation, and score curves relative to a baseline."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .conllu import FEATS_COLUMN, UPOS_COLUMN, XPOS_COLUMN, Treebank

FULL_DEPREL = "full"
UNIVERSAL_DEPREL = "universal"


class AlignmentError(ValueError):
    """Gold and predicted treebanks have different shapes."""


@dataclass
class ScoreOptions:
    deprel_granularity: str = FULL_DEPREL
    include_punct: bool = True


@dataclass
class EvalScore:
    las: float
    uas: float
    token_count: int


@dataclass
class RunAggregate:
    mean: float
    stddev: float
    n: int


def _check_shapes(gold: Treebank, pred: Treebank) -> None:
    if len(gold.sentences) != len(pred.sentences):
        raise AlignmentError(
            f"sentence count mismatch: gold {len(gold.sentences)}, "
            f"predicted {len(pred.sentences)}"
        )
    for index, (g, p) in enumerate(zip(gold.sentences, pred.sentences)):
        if len(g.tokens) != len(p.tokens):
            raise AlignmentError(
                f"token count mismatch in sentence {index}: "
                f"gold {len(g.tokens)}, predicted {len(p.tokens)}"
            )


def _deprel_key(deprel: str, granularity: str) -> str:
    deprel = deprel.lower()
    if granularity == UNIVERSAL_DEPREL:
        return deprel.split(":", 1)[0]
    return deprel


def attachment_scores(
    gold: Treebank, pred: Treebank, opt: ScoreOptions | None = None
) -> EvalScore:
    """UAS/LAS percentages over all compared tokens.

    Multiword ranges and empty nodes never enter the comparison; with
    ``include_punct`` off, tokens whose gold UPOS is PUNCT are skipped too.
    """
    opt = opt or ScoreOptions()
    _check_shapes(gold, pred)
    total = head_correct = label_correct = 0
    for g, p in zip(gold.sentences, pred.sentences):
        for gt, pt in zip(g.tokens, p.tokens):
            if not opt.include_punct and gt.upos == "PUNCT":
                continue
            total += 1
            if gt.head == pt.head:
                head_correct += 1
                if _deprel_key(gt.deprel, opt.deprel_granularity) == _deprel_key(
                    pt.deprel, opt.deprel_granularity
                ):
                    label_correct += 1
    if total == 0:
        return EvalScore(las=0.0, uas=0.0, token_count=0)
    return EvalScore(
        las=100.0 * label_correct / total,
        uas=100.0 * head_correct / total,
        token_count=total,
    )


def tag_accuracy(gold: Treebank, pred: Treebank, column: str) -> float:
    """Exact-match percentage for UPOS, XPOS, or FEATS.

    FEATS is compared as a set-like bundle: the key=value items are sorted
    before comparison so key order never causes a mismatch.
    """
    _check_shapes(gold, pred)
    total = correct = 0
    for g, p in zip(gold.sentences, pred.sentences):
        for gt, pt in zip(g.tokens, p.tokens):
            total += 1
            if column == UPOS_COLUMN:
                match = gt.upos == pt.upos
            elif column == XPOS_COLUMN:
                match = gt.xpos == pt.xpos
            elif column == FEATS_COLUMN:
                match = sorted(gt.feats) == sorted(pt.feats)
            else:
                raise ValueError(f"unknown tag column {column!r}")
            if match:
                correct += 1
    if total == 0:
        return 0.0
    return 100.0 * correct / total


def aggregate_runs(scores: list[float]) -> RunAggregate:
    """Mean and sample standard deviation (n-1) of repeated-run scores."""
    if not scores:
        raise ValueError("cannot aggregate an empty score list")
    mean = statistics.fmean(scores)
    stddev = statistics.stdev(scores) if len(scores) > 1 else 0.0
    return RunAggregate(mean=mean, stddev=stddev, n=len(scores))


def delta_curve(
    model: dict[int, RunAggregate], baseline: dict[int, RunAggregate]
) -> dict[int, float]:
    """Per-rate difference of means, model minus baseline."""
    missing_in_model = sorted(set(baseline) - set(model))
    missing_in_baseline = sorted(set(model) - set(baseline))
    if missing_in_model or missing_in_baseline:
        raise ValueError(
            f"rate keys differ: missing in model {missing_in_model}, "
            f"missing in baseline {missing_in_baseline}"
        )
    return {rate: model[rate].mean - baseline[rate].mean for rate in sorted(model)}
