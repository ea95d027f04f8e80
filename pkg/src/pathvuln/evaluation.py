"""Metrics, test-set evaluation, and scoring of raw source input."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .errors import EmptyBag, EmptyEvaluationSet, ParseError, ParseUnsupported, Unscorable
from .lexer import tokenize
from .network import ModelParams, pack_bags, predict_proba
from .parser import Ast, parse_function, split_functions
from .paths import BagOfContexts, MiningLimits, extract_bag
from .vocab import TAGS, Vocabulary, encode_bag

#: id of the positive (vulnerable) class in TAGS.
POSITIVE = TAGS.index("vuln")


@dataclass(frozen=True)
class Metrics:
    """Binary confusion counts; vuln is the positive class.

    Every derived rate falls back to 0.0 when its denominator is zero.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if (p + r) else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def format_percent(value: float) -> str:
    """Render a rate as a percentage with two decimals, rounding half up."""
    return f"{Decimal(str(value * 100)).quantize(Decimal('0.01'), rounding=ROUND_HALF_UP)}%"


def classify(q: np.ndarray) -> int:
    """Predicted class id from one probability row; ties go to safe."""
    return POSITIVE if q[POSITIVE] > q[1 - POSITIVE] else 1 - POSITIVE


@dataclass(frozen=True)
class SamplePrediction:
    sample_id: int
    label_id: int
    predicted_id: int
    q_vuln: float


def evaluate(
    params: ModelParams, encoded_bags, *, batch_size: int = 1024
) -> tuple[Metrics, list[SamplePrediction]]:
    """Score every bag (input order, no shuffling) and tally the confusion."""
    bags = list(encoded_bags)
    if not bags:
        raise EmptyEvaluationSet("no functions to evaluate")
    predictions = []
    tp = fp = tn = fn = 0
    for at in range(0, len(bags), batch_size):
        chunk = bags[at : at + batch_size]
        q = predict_proba(params, pack_bags(chunk))
        for bag, row in zip(chunk, q):
            pred = classify(row)
            predictions.append(
                SamplePrediction(
                    sample_id=bag.sample_id,
                    label_id=bag.label_id,
                    predicted_id=pred,
                    q_vuln=float(row[POSITIVE]),
                )
            )
            if bag.label_id == POSITIVE:
                if pred == POSITIVE:
                    tp += 1
                else:
                    fn += 1
            elif pred == POSITIVE:
                fp += 1
            else:
                tn += 1
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn), predictions


def function_name(ast: Ast) -> str:
    """Best-effort function name straight off the tree root."""
    for child in ast.root.children:
        if child.kind == "NameExpr":
            return child.value
        if child.kind == "CallExpr" and child.children and child.children[0].kind == "NameExpr":
            return child.children[0].value
    return "<anonymous>"


@dataclass(frozen=True)
class ScoredFunction:
    name: str
    label: str
    q_vuln: float


def score_ast(
    ast: Ast,
    params: ModelParams,
    value_vocab: Vocabulary,
    path_vocab: Vocabulary,
    limits: MiningLimits = MiningLimits(),
    *,
    seed: int = 0,
    sample_id: int = 0,
) -> ScoredFunction:
    try:
        contexts = extract_bag(ast, limits, seed=seed, sample_id=sample_id)
    except EmptyBag as exc:
        raise Unscorable(str(exc)) from None
    bag = BagOfContexts(sample_id, TAGS[0], tuple(contexts))
    encoded = encode_bag(bag, value_vocab, path_vocab)
    q = predict_proba(params, pack_bags([encoded]))[0]
    return ScoredFunction(
        name=function_name(ast), label=TAGS[classify(q)], q_vuln=float(q[POSITIVE])
    )


def score_source(
    source: str,
    params: ModelParams,
    value_vocab: Vocabulary,
    path_vocab: Vocabulary,
    limits: MiningLimits = MiningLimits(),
    *,
    seed: int = 0,
) -> list[tuple[ScoredFunction | None, str | None]]:
    """Score every function definition found in a source blob.

    Returns one (scored, failure_reason) pair per candidate function;
    exactly one member of each pair is set. Raises LexError when the blob
    cannot be tokenized at all.
    """
    tokens = tokenize(source)
    spans = split_functions(tokens)
    results: list[tuple[ScoredFunction | None, str | None]] = []
    for index, span in enumerate(spans):
        line = span[0].line
        try:
            ast = parse_function(span)
            scored = score_ast(
                ast, params, value_vocab, path_vocab, limits, sample_id=index
            )
        except (ParseError, ParseUnsupported, Unscorable) as exc:
            results.append((None, f"function at line {line}: {exc}"))
            continue
        results.append((scored, None))
    return results
