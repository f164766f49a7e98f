import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cycle, signed_graphs
from harary_clust.balance import (
    balanced_state,
    best_harary_cut,
    harary_cut,
    iteration_rng,
    sample_spanning_tree,
    switching_from_tree,
)
from harary_clust.clusterer import (
    ClusterAssignment,
    Config,
    densify_labels,
    initial_labels,
    run,
    select_component,
)
from harary_clust.graph import SignedGraph, connected_components, induced_subgraph
from harary_clust.metrics import overall_loss
from harary_clust.synthetic import planted_partition, random_signed_graph


def assignment(sizes):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return ClusterAssignment(labels, len(sizes))


class TestConfig:
    def test_defaults(self):
        c = Config()
        assert (c.iterations, c.alpha, c.beta, c.epsilon, c.gamma, c.time_limit_s) == (1000, 0.5, 1.0, 1e-8, 2, -1)
        assert c.tree_method == "random-bfs" and c.seed == 42

    @pytest.mark.parametrize(
        "kw",
        [dict(iterations=0), dict(alpha=2), dict(beta=-1), dict(epsilon=-1), dict(gamma=-1),
         dict(time_limit_s=-2), dict(tree_method="dfs"), dict(workers=0), dict(seed=2**64)],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            Config(**kw)


class TestInitialLabels:
    def test_connected(self):
        a = initial_labels(cycle([1, -1, 1]))
        assert a.label_of.tolist() == [0, 0, 0] and a.label_counter == 1

    def test_components_and_isolated(self):
        g = SignedGraph.from_edges(5, [(0, 1, 1), (2, 3, -1)])
        a = initial_labels(g)
        assert sorted(set(a.label_of.tolist())) == [0, 1, 2] and a.label_counter == 3
        assert a.label_of[4] not in (a.label_of[0], a.label_of[2])


class TestSelectComponent:
    def test_all_processed(self):
        a = assignment([5, 4])
        a.processed |= {0, 1}
        assert select_component(a, 2) is None

    def test_largest(self):
        assert select_component(assignment([3, 12]), 2) == 1

    def test_gamma_inclusive(self):
        assert select_component(assignment([2, 2]), 2) is None
        assert select_component(assignment([2, 3]), 2) == 1

    def test_tie_smallest_label(self):
        assert select_component(assignment([4, 6, 6]), 2) == 1


class TestAssignment:
    def test_split_and_restore(self):
        a = assignment([4, 2])
        snap = a.snapshot()
        new = a.split(0, [[0, 1], [2], [3]])
        assert new == [2, 3, 4] and a.label_counter == 5 and a.size(0) == 0
        a.restore(snap)
        assert a.label_of.tolist() == [0, 0, 0, 0, 1, 1] and a.label_counter == 2 and a.members[0] == [0, 1, 2, 3]


def test_densify_by_size():
    assert densify_labels(np.array([7, 3, 3, 9, 3, 7])).tolist() == [1, 0, 0, 2, 0, 1]


class TestRun:
    def test_all_positive(self):
        res = run(cycle([1] * 8), iterations=50)
        assert res.split_count == 0 and res.cluster_count == 1 and res.labels.tolist() == [0] * 8

    def test_triangle(self, tri):
        res = run(tri, iterations=10)
        assert res.initial_loss == 1.0
        assert res.split_count == 1 and res.metrics.overall_loss == pytest.approx(0.5)

    def test_gamma_stops(self, tri):
        assert run(tri, iterations=10, gamma=3).split_count == 0

    def test_time_limit_zero(self, tri):
        res = run(tri, iterations=10, time_limit_s=0)
        assert res.timed_out and not res.attempts

    def test_balanced_graph_recovers_bipartition(self):
        g = SignedGraph.from_edges(6, [(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1), (0, 3, -1), (2, 5, -1), (1, 4, -1)])
        res = run(g, iterations=100)
        assert res.metrics.overall_loss == 0
        assert sorted(map(sorted, _clusters(res.labels))) == [[0, 1, 2], [3, 4, 5]]

    def test_planted_blocks(self):
        # two antagonistic blocks are balanced, so the planted split is exact
        g, blocks = planted_partition([12, 10], 0.9, 0.3, 0.0, rng=3)
        res = run(g, iterations=200)
        assert res.metrics.overall_loss == 0
        assert len(set(zip(blocks.tolist(), res.labels.tolist()))) == 2

    def test_kruskal_method(self):
        g = random_signed_graph(15, 0.5, 0.4, rng=1, connected=True)
        res = run(g, iterations=50, tree_method="random-kruskal")
        assert res.metrics.overall_loss <= res.initial_loss

    def test_overrides_config(self, tri):
        res = run(tri, Config(iterations=5), seed=7)
        assert res.config.iterations == 5 and res.config.seed == 7


def _clusters(labels):
    return [np.flatnonzero(labels == k).tolist() for k in range(labels.max() + 1)]


@settings(max_examples=30, deadline=None)
@given(signed_graphs(min_n=2, max_n=16, min_edges=1), st.integers(0, 10_000), st.sampled_from([0.0, 1e-8, 0.05]))
def test_run_invariants(g, seed, epsilon):
    res = run(g, iterations=15, seed=seed, epsilon=epsilon)
    cfg = res.config
    assert res.split_count == len(res.trace) == sum(a.committed for a in res.attempts)
    current = res.initial_loss
    for a in res.attempts:
        assert a.loss_before == current
        if a.committed:
            assert a.loss_before - a.loss_after > cfg.epsilon
            current = a.loss_after
        else:
            assert a.loss_before - a.loss_after <= cfg.epsilon
    assert res.metrics.overall_loss == pytest.approx(current, abs=1e-12)
    assert overall_loss(g, res.assignment.label_of) == current
    losses = [res.initial_loss] + [row.overall_loss for row in res.trace]
    assert all(x - y > cfg.epsilon for x, y in zip(losses, losses[1:]))
    # processed labels keep the size they had when frozen; every cluster is connected
    frozen = {a.label: a.size for a in res.attempts if not a.committed}
    assert set(frozen) == res.assignment.processed
    for lab, size in frozen.items():
        assert res.assignment.size(lab) == size
    for members in _clusters(res.labels):
        assert len(connected_components(induced_subgraph(g, members).graph)) == 1
    sizes = np.bincount(res.labels)
    assert list(sizes) == sorted(sizes, reverse=True)
    assert res.clusters_ge5 == np.count_nonzero(sizes >= 5) and res.cluster_count == sizes.size


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_deterministic_across_runs_and_workers(seed):
    g = random_signed_graph(30, 0.3, 0.4, rng=seed)
    base = run(g, iterations=40, seed=seed)
    for workers in (1, 4):
        again = run(g, iterations=40, seed=seed, workers=workers)
        assert again.labels.tolist() == base.labels.tolist()
        assert [r.frustration for r in again.trace] == [r.frustration for r in base.trace]


def test_rejected_split_restores_state(monkeypatch):
    seen = []
    orig_split, orig_restore = ClusterAssignment.split, ClusterAssignment.restore

    def split(self, label, parts):
        seen.append((self.label_of.copy(), self.label_counter, {k: list(v) for k, v in self.members.items()}))
        return orig_split(self, label, parts)

    def restore(self, snap):
        orig_restore(self, snap)
        label_of, counter, members = seen[-1]
        assert np.array_equal(self.label_of, label_of) and self.label_of.dtype == label_of.dtype
        assert self.label_counter == counter and self.members == members
        seen.append("restored")

    monkeypatch.setattr(ClusterAssignment, "split", split)
    monkeypatch.setattr(ClusterAssignment, "restore", restore)
    g = random_signed_graph(25, 0.4, 0.5, rng=11, connected=True)
    res = run(g, iterations=30, epsilon=0.2)
    assert seen.count("restored") == sum(not a.committed for a in res.attempts) > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_beta_zero_minimises_isolated(seed):
    g = random_signed_graph(10, 0.5, 0.5, rng=seed, connected=True)
    cut = best_harary_cut(g, 30, beta=0.0, seed=seed)
    singles = [
        sum(size == 1 for size in harary_cut(
            g, balanced_state(g, switching_from_tree(g, sample_spanning_tree(g, "random-bfs", iteration_rng(seed, 0, i))))
        ).components.sizes())
        for i in range(30)
    ]
    assert sum(size == 1 for size in cut.components.sizes()) == min(singles)
    assert cut.loss == pytest.approx(min(singles) / g.n)
