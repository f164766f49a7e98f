"""Hierarchical clustering by repeated best Harary cuts.

Every connected component starts as one cluster.  The largest cluster that
is neither frozen nor too small is cut along its best Harary cut; the split
is kept only if it lowers the whole-graph violation score by more than
``epsilon``, otherwise it is undone and the cluster is frozen.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .balance import TREE_METHODS, best_harary_cut
from .graph import SignedGraph, connected_components, induced_subgraph
from .metrics import MetricsRecord, metrics_record, overall_loss


@dataclass(frozen=True)
class Config:
    iterations: int = 1000
    alpha: float = 0.5
    beta: float = 1.0
    epsilon: float = 1e-8
    gamma: int = 2
    time_limit_s: int = -1
    seed: int = 42
    tree_method: str = "random-bfs"
    workers: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.time_limit_s < -1:
            raise ValueError("time limit must be -1 (unlimited) or >= 0")
        if self.tree_method not in TREE_METHODS:
            raise ValueError(f"tree_method must be one of {TREE_METHODS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


class ClusterAssignment:
    """Vertex labels, the fresh-label counter and the frozen ("processed") labels."""

    def __init__(self, label_of: np.ndarray, label_counter: int):
        self.label_of = np.asarray(label_of, dtype=np.int64).copy()
        self.label_counter = int(label_counter)
        self.processed: set[int] = set()
        self.members: dict[int, list[int]] = {}
        for v, lab in enumerate(self.label_of.tolist()):
            self.members.setdefault(lab, []).append(v)

    def size(self, label: int) -> int:
        return len(self.members.get(label, ()))

    def snapshot(self):
        return self.label_of.copy(), self.label_counter, {k: list(v) for k, v in self.members.items()}

    def restore(self, snap) -> None:
        label_of, counter, members = snap
        self.label_of = label_of.copy()
        self.label_counter = counter
        self.members = {k: list(v) for k, v in members.items()}

    def split(self, label: int, parts: list[list[int]]) -> list[int]:
        """Give each part of ``label`` a fresh label; returns the new labels."""
        new = []
        del self.members[label]
        for part in parts:
            lab = self.label_counter
            self.label_counter += 1
            self.label_of[part] = lab
            self.members[lab] = sorted(part)
            new.append(lab)
        return new


def initial_labels(g: SignedGraph) -> ClusterAssignment:
    comps = connected_components(g)
    return ClusterAssignment(comps.component_of, len(comps))


def select_component(a: ClusterAssignment, gamma: int) -> int | None:
    """Largest label not frozen and with more than ``gamma`` vertices (ties: lowest id)."""
    best, best_size = None, -1
    for lab in sorted(a.members):
        size = len(a.members[lab])
        if size <= gamma or lab in a.processed:
            continue
        if size > best_size:
            best, best_size = lab, size
    return best


@dataclass(frozen=True)
class TraceRow:
    split: int
    label: int
    size: int
    frustration: int
    pos_in: float
    neg_out: float
    overall_loss: float
    clusters: int
    elapsed_s: float


TRACE_HEADER = ("split", "label", "size", "frustration", "pos_in", "neg_out", "overall_loss", "clusters", "elapsed_s")


@dataclass(frozen=True)
class Attempt:
    label: int
    size: int
    loss_before: float
    loss_after: float
    committed: bool


@dataclass
class ClusterResult:
    labels: np.ndarray  # dense 0..C-1, cluster 0 is the largest
    assignment: ClusterAssignment
    trace: list[TraceRow]
    attempts: list[Attempt]
    metrics: MetricsRecord
    clusters_ge5: int
    clusters_lt5: int
    config: Config
    elapsed_s: float
    timed_out: bool = False
    initial_loss: float = field(default=0.0)

    @property
    def split_count(self) -> int:
        return len(self.trace)

    @property
    def cluster_count(self) -> int:
        return self.clusters_ge5 + self.clusters_lt5


def densify_labels(label_of: np.ndarray) -> np.ndarray:
    """Relabel 0..C-1 by descending cluster size, ties by smallest member."""
    uniq, first, inverse, sizes = np.unique(label_of, return_index=True, return_inverse=True, return_counts=True)
    order = np.lexsort((first, -sizes))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse].astype(np.int64)


def run(g: SignedGraph, config: Config | None = None, **overrides) -> ClusterResult:
    """Cluster ``g``; deterministic for a given graph and config."""
    config = replace(config or Config(), **overrides) if overrides else (config or Config())
    t0 = time.perf_counter()
    a = initial_labels(g)
    current = overall_loss(g, a.label_of)
    initial = current
    trace: list[TraceRow] = []
    attempts: list[Attempt] = []
    timed_out = False
    while True:
        if config.time_limit_s >= 0 and time.perf_counter() - t0 >= config.time_limit_s:
            timed_out = True
            break
        label = select_component(a, config.gamma)
        if label is None:
            break
        verts = a.members[label]
        sub = induced_subgraph(g, verts)
        cut = best_harary_cut(
            sub.graph,
            config.iterations,
            config.alpha,
            config.beta,
            seed=config.seed,
            stream=len(attempts),
            method=config.tree_method,
            workers=config.workers,
        )
        parts = [sub.to_parent[c].tolist() for c in cut.components.components]
        snap = a.snapshot()
        a.split(label, parts)
        candidate = overall_loss(g, a.label_of)
        committed = current - candidate > config.epsilon
        attempts.append(Attempt(label, len(verts), current, candidate, committed))
        if not committed:
            a.restore(snap)
            a.processed.add(label)
            continue
        current = candidate
        rec = metrics_record(g, a.label_of)
        trace.append(
            TraceRow(
                split=len(trace) + 1,
                label=label,
                size=len(verts),
                frustration=cut.state.frustration,
                pos_in=rec.pos_in,
                neg_out=rec.neg_out,
                overall_loss=current,
                clusters=len(a.members),
                elapsed_s=time.perf_counter() - t0,
            )
        )
    labels = densify_labels(a.label_of)
    sizes = np.bincount(labels)
    return ClusterResult(
        labels=labels,
        assignment=a,
        trace=trace,
        attempts=attempts,
        metrics=metrics_record(g, labels, config.alpha, config.beta),
        clusters_ge5=int(np.count_nonzero(sizes >= 5)),
        clusters_lt5=int(np.count_nonzero(sizes < 5)),
        config=config,
        elapsed_s=time.perf_counter() - t0,
        timed_out=timed_out,
        initial_loss=initial,
    )
