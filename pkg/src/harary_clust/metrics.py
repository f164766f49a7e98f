"""Clustering quality measures for signed graphs.

All measures are computed from the four edge counts (positive/negative
edges within/between clusters) using the graph's original signs.

Empty edge classes follow one convention throughout: the violation
fractions ``pos_out`` and ``neg_in`` are 0 when their class is empty (an
absent edge class cannot be violated), while the displayed ``pos_in`` is 1
and ``neg_out`` is 0, matching the single-cluster starting point.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeCounts:
    pos_between: int
    pos_within: int
    neg_within: int
    neg_between: int

    @property
    def total(self) -> int:
        return self.pos_between + self.pos_within + self.neg_within + self.neg_between

    @property
    def positives(self) -> int:
        return self.pos_between + self.pos_within

    @property
    def negatives(self) -> int:
        return self.neg_within + self.neg_between


@dataclass(frozen=True)
class Fractions:
    pos_out: float
    neg_in: float
    pos_in: float
    neg_out: float


def _labels_array(labels, n: int) -> np.ndarray:
    if isinstance(labels, Mapping):
        missing = [v for v in range(n) if v not in labels]
        if missing:
            raise KeyError(f"no label for vertex {missing[0]}")
        labels = [labels[v] for v in range(n)]
    arr = np.asarray(labels)
    if arr.shape != (n,):
        raise KeyError(f"expected {n} labels, got {arr.shape[0] if arr.ndim else 0}")
    return arr


def edge_counts(g, labels: Sequence | Mapping | np.ndarray) -> EdgeCounts:
    lab = _labels_array(labels, g.n)
    same = lab[g.src] == lab[g.dst]
    pos = g.sign > 0
    return EdgeCounts(
        pos_between=int(np.count_nonzero(pos & ~same)),
        pos_within=int(np.count_nonzero(pos & same)),
        neg_within=int(np.count_nonzero(~pos & same)),
        neg_between=int(np.count_nonzero(~pos & ~same)),
    )


def unhappy_ratio(c: EdgeCounts) -> float:
    if c.total == 0:
        raise UndefinedMetricError("unhappy ratio needs at least one edge")
    return (c.pos_between + c.neg_within) / c.total


def fractions(c: EdgeCounts) -> Fractions:
    if c.positives:
        pos_out = c.pos_between / c.positives
        pos_in = c.pos_within / c.positives
    else:
        pos_out, pos_in = 0.0, 1.0
    if c.negatives:
        neg_in = c.neg_within / c.negatives
        neg_out = c.neg_between / c.negatives
    else:
        neg_in, neg_out = 0.0, 0.0
    return Fractions(pos_out, neg_in, pos_in, neg_out)


def unhappy_score(c: EdgeCounts) -> float:
    f = fractions(c)
    return f.pos_out + f.neg_in


def violating(c: EdgeCounts) -> float:
    """Fraction-form violation: pos_out + neg_in (same value as unhappy_score)."""
    return unhappy_score(c)


def loss(c: EdgeCounts, v_iso: int, v_total: int, alpha: float = 0.5, beta: float = 1.0) -> float:
    """beta * (alpha * pos_out + (1 - alpha) * neg_in) + (1 - beta) * v_iso / v_total."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if v_total < 1:
        raise ValueError("v_total must be >= 1")
    if not 0 <= v_iso <= v_total:
        raise ValueError("v_iso must lie in [0, v_total]")
    f = fractions(c)
    return beta * (alpha * f.pos_out + (1.0 - alpha) * f.neg_in) + (1.0 - beta) * v_iso / v_total


def overall_loss(g, labels) -> float:
    return unhappy_score(edge_counts(g, labels))


@dataclass(frozen=True)
class MetricsRecord:
    counts: EdgeCounts
    unhappy_ratio: float
    unhappy_score: float
    pos_out: float
    neg_in: float
    pos_in: float
    neg_out: float
    violating: float
    loss: float
    alpha: float
    beta: float
    v_iso: int
    v_total: int
    overall_loss: float

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("counts"))
        return d


def metrics_record(g, labels, alpha: float = 0.5, beta: float = 1.0) -> MetricsRecord:
    """Every measure for one labelling; isolated vertices are singleton clusters."""
    lab = _labels_array(labels, g.n)
    c = edge_counts(g, lab)
    f = fractions(c)
    _, sizes = np.unique(lab, return_counts=True)
    v_iso = int(np.count_nonzero(sizes == 1))
    return MetricsRecord(
        counts=c,
        unhappy_ratio=unhappy_ratio(c) if c.total else 0.0,
        unhappy_score=f.pos_out + f.neg_in,
        pos_out=f.pos_out,
        neg_in=f.neg_in,
        pos_in=f.pos_in,
        neg_out=f.neg_out,
        violating=f.pos_out + f.neg_in,
        loss=loss(c, v_iso, max(g.n, 1), alpha, beta),
        alpha=alpha,
        beta=beta,
        v_iso=v_iso,
        v_total=g.n,
        overall_loss=f.pos_out + f.neg_in,
    )
