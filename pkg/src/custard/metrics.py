"""Ranking construction and ranking-quality metrics."""

from __future__ import annotations

import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

DEFAULT_KS = (20, 100)


class UndefinedMetricError(ValueError):
    """The metric has no value, e.g. a ranking with no positives or no negatives."""


@dataclass(frozen=True, eq=False)
class Ranking:
    """Validation nodes in descending score order.

    Ties are broken by ascending node id so equal-score orderings are
    deterministic.
    """

    nodes: np.ndarray
    scores: np.ndarray

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(eq=False)
class RankedResult:
    """One trial's ranking with its relevance mask and per-trial metrics."""

    ranking: Ranking
    positives: np.ndarray
    relevance: np.ndarray
    metrics: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.ranking)


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    n_trials: int


def rank_validation(scores: np.ndarray, training) -> Ranking:
    """Order all non-training nodes by descending score, node id on ties."""
    scores = np.asarray(scores, dtype=np.float64)
    mask = np.ones(scores.size, dtype=bool)
    training = np.asarray(training, dtype=np.int64)
    if training.size:
        if training.min() < 0 or training.max() >= scores.size:
            raise ValueError("training contains out-of-range node ids")
        mask[training] = False
    nodes = np.flatnonzero(mask)
    vals = scores[nodes]
    order = np.lexsort((nodes, -vals))
    return Ranking(nodes[order], vals[order])


def _relevance(ranking: Ranking, positives) -> np.ndarray:
    positives = np.asarray(positives, dtype=np.int64)
    return np.isin(ranking.nodes, positives)


def _auc_from_relevance(scores: np.ndarray, relevance: np.ndarray) -> float:
    pos = int(relevance.sum())
    neg = int(relevance.size - pos)
    if pos == 0 or neg == 0:
        raise UndefinedMetricError(
            f"AUC undefined with {pos} positives and {neg} negatives in the ranking"
        )
    ranks = rankdata(scores)  # ascending midranks, ties averaged
    u = float(ranks[relevance].sum()) - pos * (pos + 1) / 2.0
    return u / (pos * neg)


def auc(ranking: Ranking, positives) -> float:
    """Probability a random positive outranks a random negative; ties count half."""
    return _auc_from_relevance(ranking.scores, _relevance(ranking, positives))


def precision_at_k(ranking: Ranking, positives, k: int) -> float:
    """Fraction of the top ``min(k, len(ranking))`` entries that are positive."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if len(ranking) == 0:
        raise UndefinedMetricError("precision undefined on an empty ranking")
    depth = min(k, len(ranking))
    rel = _relevance(ranking, positives)
    return float(rel[:depth].sum()) / depth


def evaluate_ranking(ranking: Ranking, positives, ks: Sequence[int] = DEFAULT_KS) -> RankedResult:
    """Bundle a ranking with its relevance mask and standard metrics.

    Metrics that are undefined for this ranking are recorded as NaN with a
    warning instead of failing the trial.
    """
    rel = _relevance(ranking, positives)
    metrics: dict[str, float] = {}
    try:
        metrics["auc"] = _auc_from_relevance(ranking.scores, rel)
    except UndefinedMetricError as exc:
        warnings.warn(f"auc skipped: {exc}", stacklevel=2)
        metrics["auc"] = float("nan")
    for k in ks:
        try:
            metrics[f"p_at_{k}"] = precision_at_k(ranking, positives, k)
        except UndefinedMetricError as exc:
            warnings.warn(f"p_at_{k} skipped: {exc}", stacklevel=2)
            metrics[f"p_at_{k}"] = float("nan")
    return RankedResult(ranking, np.asarray(positives, dtype=np.int64), rel, metrics)


def pool_instance(results: Sequence[RankedResult], ks: Sequence[int] = DEFAULT_KS) -> dict[str, float]:
    """Micro-pool one trial instance across labels.

    Stacks the per-label rankings by rank position, sums true and false
    positive counts at each position, and computes AUC and precision@k on
    the pooled counts. Raises UndefinedMetricError when the pooled lists
    contain no positives or no negatives.
    """
    if len(results) == 0:
        raise ValueError("nothing to pool")
    longest = max(len(r) for r in results)
    if longest == 0:
        raise UndefinedMetricError("all rankings are empty")
    tp = np.zeros(longest)
    fp = np.zeros(longest)
    for r in results:
        rel = r.relevance.astype(np.float64)
        tp[: rel.size] += rel
        fp[: rel.size] += 1.0 - rel
    total_tp = float(tp.sum())
    total_fp = float(fp.sum())
    if total_tp == 0 or total_fp == 0:
        raise UndefinedMetricError(
            f"pooled metrics undefined with {total_tp:.0f} positives and {total_fp:.0f} negatives"
        )
    # each false positive at position r is outranked by the true positives
    # above it; ties within a position contribute half
    tp_above = np.cumsum(tp) - tp
    area = float((fp * (tp_above + 0.5 * tp)).sum())
    pooled: dict[str, float] = {"auc": area / (total_tp * total_fp)}
    for k in ks:
        hits = 0.0
        depth_total = 0
        for r in results:
            depth = min(k, len(r))
            hits += float(r.relevance[:depth].sum())
            depth_total += depth
        pooled[f"p_at_{k}"] = hits / depth_total if depth_total else float("nan")
    return pooled


def aggregate(trial_metrics: Sequence[Mapping[str, float]]) -> dict[str, MetricSummary]:
    """Mean and population standard deviation of each metric across trials.

    NaN entries are excluded per metric with a warning; ``n_trials`` counts
    the values that contributed.
    """
    if len(trial_metrics) == 0:
        raise ValueError("no trial metrics to aggregate")
    names: list[str] = []
    for m in trial_metrics:
        for name in m:
            if name not in names:
                names.append(name)
    out: dict[str, MetricSummary] = {}
    for name in names:
        values = np.asarray(
            [m[name] for m in trial_metrics if name in m], dtype=np.float64
        )
        finite = values[~np.isnan(values)]
        if finite.size < values.size:
            warnings.warn(
                f"{name}: excluded {values.size - finite.size} undefined trial value(s)",
                stacklevel=2,
            )
        if finite.size == 0:
            warnings.warn(f"{name}: no defined values, metric omitted", stacklevel=2)
            continue
        out[name] = MetricSummary(
            mean=float(finite.mean()), std=float(finite.std()), n_trials=int(finite.size)
        )
    return out
