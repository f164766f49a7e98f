"""Nearest balanced states from sampled spanning trees, and Harary cuts.

A spanning tree fixes a switching function: the root gets +1 and every other
vertex inherits its parent's value times the sign of the tree edge, so all
tree edges agree with the switching.  The non-tree edges that disagree are
the frustrated ones; flipping them yields a balanced state whose negative
edges, once deleted, leave the Harary cut.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, minimum_spanning_tree

from .graph import (
    ComponentSet,
    SignedGraph,
    component_labels,
    components_from_mask,
    connected_components,
)
from .metrics import edge_counts, loss as loss_value

TREE_METHODS = ("random-bfs", "random-kruskal")

EXHAUSTIVE_MAX_N = 24

# below this many CSR entries pure-Python traversal beats scipy's call overhead
SMALL_GRAPH_ENTRIES = 1024


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class SpanningTree:
    root: int
    parent: np.ndarray
    parent_sign: np.ndarray
    order: np.ndarray  # root first, every vertex after its parent

    def edges(self) -> set[frozenset]:
        return {frozenset((v, int(p))) for v, p in enumerate(self.parent.tolist()) if v != p}


@dataclass(frozen=True)
class BalancedState:
    sigma: np.ndarray
    frustration: int

    @property
    def bipartition(self) -> tuple[list[int], list[int]]:
        plus = np.flatnonzero(self.sigma > 0).tolist()
        minus = np.flatnonzero(self.sigma < 0).tolist()
        return plus, minus


@dataclass(frozen=True)
class HararyCutResult:
    state: BalancedState
    components: ComponentSet
    loss: float | None = None
    iteration_index: int = 0


def iteration_rng(seed: int, stream: int, iteration: int) -> np.random.Generator:
    """Generator for one sampling iteration, independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, stream, iteration]))


def _check_connected(g: SignedGraph) -> None:
    if g.n == 0:
        raise DisconnectedGraphError("graph has no vertices")
    if g.n > 1 and len(connected_components(g)) != 1:
        raise DisconnectedGraphError("spanning trees need a connected graph")


def _parent_signs(g: SignedGraph, parent: np.ndarray, root: int) -> np.ndarray:
    key, srt = g.pair_index
    child = np.arange(g.n)
    lo, hi = np.minimum(child, parent), np.maximum(child, parent)
    pos = np.searchsorted(key, lo * g.n + hi)
    psign = np.ones(g.n, dtype=np.int8)
    nonroot = child != root
    psign[nonroot] = g.sign[srt[pos[nonroot]]]
    return psign


def _tree_from_bfs(g: SignedGraph, adj: csr_matrix, root: int) -> SpanningTree:
    order, pred = breadth_first_order(adj, root, directed=True, return_predecessors=True)
    if order.size != g.n:
        raise DisconnectedGraphError("spanning trees need a connected graph")
    parent = pred.astype(np.int64)
    parent[root] = root
    return SpanningTree(root, parent, _parent_signs(g, parent, root), order.astype(np.int64))


def _bfs_python(g: SignedGraph, nbr_order: np.ndarray, root: int) -> SpanningTree:
    indptr, nbr, nsign, _ = g.csr
    nbr_l = nbr[nbr_order].tolist()
    sign_l = nsign[nbr_order].tolist()
    ptr = indptr.tolist()
    n = g.n
    parent = [-1] * n
    psign = [1] * n
    parent[root] = root
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for k in range(ptr[u], ptr[u + 1]):
            w = nbr_l[k]
            if parent[w] < 0:
                parent[w] = u
                psign[w] = sign_l[k]
                order.append(w)
                queue.append(w)
    if len(order) != n:
        raise DisconnectedGraphError("spanning trees need a connected graph")
    return SpanningTree(root, np.array(parent), np.array(psign, dtype=np.int8), np.array(order))


def _bfs_scipy(g: SignedGraph, nbr_order: np.ndarray, root: int) -> SpanningTree:
    indptr, nbr, _, _ = g.csr
    adj = csr_matrix((np.ones(nbr.size), nbr[nbr_order], indptr), shape=(g.n, g.n))
    return _tree_from_bfs(g, adj, root)


def _random_bfs(g: SignedGraph, rng: np.random.Generator) -> SpanningTree:
    nbr = g.csr[1]
    # both BFS back ends follow stored neighbour order, so shuffle within
    # every row: sort entries by (row, random key)
    nbr_order = np.lexsort((rng.random(nbr.size), g.csr_rows))
    root = int(rng.integers(g.n))
    if nbr.size <= SMALL_GRAPH_ENTRIES:
        return _bfs_python(g, nbr_order, root)
    return _bfs_scipy(g, nbr_order, root)


def _random_kruskal(g: SignedGraph, rng: np.random.Generator) -> SpanningTree:
    n = g.n
    # strictly positive weights: csgraph treats explicit zeros as missing edges
    w = rng.random(g.m) + 1e-9
    mst = minimum_spanning_tree(csr_matrix((w, (g.src, g.dst)), shape=(n, n)))
    mst = (mst + mst.T).tocsr()
    return _tree_from_bfs(g, mst, int(rng.integers(n)))


def sample_spanning_tree(g: SignedGraph, method: str, rng: np.random.Generator) -> SpanningTree:
    """Random spanning tree of a connected graph.

    ``random-bfs`` runs BFS from a random root visiting each vertex's
    neighbours in a fresh random order; ``random-kruskal`` takes the minimum
    spanning tree under i.i.d. uniform edge weights.
    """
    if method == "random-bfs":
        return _random_bfs(g, rng)
    if method == "random-kruskal":
        if g.n == 1:
            return SpanningTree(0, np.zeros(1, np.int64), np.ones(1, np.int8), np.zeros(1, np.int64))
        return _random_kruskal(g, rng)
    raise ValueError(f"unknown tree method {method!r}; expected one of {TREE_METHODS}")


def switching_from_tree(g: SignedGraph, tree: SpanningTree) -> np.ndarray:
    if tree.order.size != g.n:
        raise ValueError("tree does not span the graph")
    sigma = [0] * g.n
    parent = tree.parent.tolist()
    psign = tree.parent_sign.tolist()
    order = tree.order.tolist()
    sigma[order[0]] = 1
    for v in order[1:]:
        sigma[v] = sigma[parent[v]] * psign[v]
    return np.array(sigma, dtype=np.int8)


def frustrated_mask(g: SignedGraph, sigma: np.ndarray) -> np.ndarray:
    return g.sign != sigma[g.src] * sigma[g.dst]


def balanced_state(g: SignedGraph, sigma: np.ndarray) -> BalancedState:
    sigma = np.asarray(sigma, dtype=np.int8)
    if sigma.shape != (g.n,) or not np.all(np.abs(sigma) == 1):
        raise ValueError("sigma must hold +1/-1 for every vertex")
    return BalancedState(sigma, int(np.count_nonzero(frustrated_mask(g, sigma))))


def resign(g: SignedGraph, sigma: np.ndarray) -> SignedGraph:
    """The graph with every edge re-signed to sigma(u) * sigma(v)."""
    sigma = np.asarray(sigma, dtype=np.int8)
    return SignedGraph(g.n, g.src, g.dst, sigma[g.src] * sigma[g.dst], g.names)


def switch(g: SignedGraph, sigma: np.ndarray) -> SignedGraph:
    """Apply switching: edge (u, v) becomes sigma(u) * sign(u, v) * sigma(v)."""
    sigma = np.asarray(sigma, dtype=np.int8)
    return SignedGraph(g.n, g.src, g.dst, sigma[g.src] * g.sign * sigma[g.dst], g.names)


def is_balanced(g: SignedGraph) -> np.ndarray | None:
    """Return a switching function with zero frustration, or None."""
    indptr, nbr, nsign, _ = g.csr
    ptr, nbr_l, sign_l = indptr.tolist(), nbr.tolist(), nsign.tolist()
    sigma = [0] * g.n
    for start in range(g.n):
        if sigma[start]:
            continue
        sigma[start] = 1
        queue = deque([start])
        while queue:
            u = queue.popleft()
            su = sigma[u]
            for k in range(ptr[u], ptr[u + 1]):
                w = nbr_l[k]
                want = su * sign_l[k]
                if not sigma[w]:
                    sigma[w] = want
                    queue.append(w)
                elif sigma[w] != want:
                    return None
    return np.array(sigma, dtype=np.int8)


def frustration_exhaustive(g: SignedGraph, chunk: int = 1 << 15) -> tuple[int, np.ndarray]:
    """Exact frustration index by enumerating all switchings with sigma(0) = +1."""
    n = g.n
    if n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive search limited to n <= {EXHAUSTIVE_MAX_N}, got {n}")
    if n <= 1 or g.m == 0:
        return 0, np.ones(n, dtype=np.int8)
    total = 1 << (n - 1)
    shifts = np.arange(n - 1, dtype=np.int64)
    best, best_sigma = g.m + 1, None
    for start in range(0, total, chunk):
        states = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (states[:, None] >> shifts) & 1
        sig = np.ones((states.size, n), dtype=np.int8)
        sig[:, 1:] = 1 - 2 * bits
        fr = np.count_nonzero(sig[:, g.src] * sig[:, g.dst] != g.sign, axis=1)
        i = int(np.argmin(fr))
        if fr[i] < best:
            best, best_sigma = int(fr[i]), sig[i].copy()
    return best, best_sigma


def harary_cut(g: SignedGraph, state: BalancedState) -> HararyCutResult:
    """Delete the balanced state's negative edges and split into components."""
    keep = state.sigma[g.src] * state.sigma[g.dst] > 0
    return HararyCutResult(state, components_from_mask(g.n, g.src, g.dst, keep))


def cut_loss(g: SignedGraph, cut: HararyCutResult, alpha: float, beta: float) -> float:
    """Weighted violation loss of a cut, measured on the component's own signs."""
    v_iso = sum(1 for c in cut.components.components if len(c) == 1)
    return loss_value(edge_counts(g, cut.components.component_of), v_iso, g.n, alpha, beta)


Refiner = Callable[[SignedGraph, np.ndarray], np.ndarray]


@dataclass(frozen=True, order=True)
class _Scored:
    loss: float
    frustration: int
    iteration_index: int
    sigma: np.ndarray = field(compare=False)


def _evaluate(g, method, seed, stream, i, alpha, beta, refine) -> _Scored:
    tree = sample_spanning_tree(g, method, iteration_rng(seed, stream, i))
    sigma = switching_from_tree(g, tree)
    if refine is not None:
        sigma = refine(g, sigma)
    product = sigma[g.src] * sigma[g.dst]
    _, comp = component_labels(g, product > 0)
    v_iso = int(np.count_nonzero(np.bincount(comp) == 1))
    value = loss_value(edge_counts(g, comp), v_iso, g.n, alpha, beta)
    return _Scored(value, int(np.count_nonzero(product != g.sign)), i, sigma)


def best_harary_cut(
    g: SignedGraph,
    iterations: int,
    alpha: float = 0.5,
    beta: float = 1.0,
    *,
    seed: int = 42,
    stream: int = 0,
    method: str = "random-bfs",
    workers: int = 1,
    refine: Refiner | None = None,
) -> HararyCutResult:
    """Lowest-loss Harary cut over ``iterations`` sampled balanced states.

    Iteration ``i`` draws its randomness from ``(seed, stream, i)`` only, so
    the result does not depend on ``workers``.  Ties go to lower frustration,
    then to the earlier iteration.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if method not in TREE_METHODS:
        raise ValueError(f"unknown tree method {method!r}")
    _check_connected(g)

    def run(chunk: range) -> _Scored:
        return min(_evaluate(g, method, seed, stream, i, alpha, beta, refine) for i in chunk)

    if workers <= 1 or iterations < 2:
        best = run(range(iterations))
    else:
        workers = min(workers, iterations)
        chunks = [range(k, iterations, workers) for k in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            best = min(pool.map(run, chunks))
    cut = harary_cut(g, BalancedState(best.sigma, best.frustration))
    return HararyCutResult(cut.state, cut.components, best.loss, best.iteration_index)


def hill_climb(g: SignedGraph, sigma: np.ndarray) -> np.ndarray:
    """Optional refinement: flip single vertices while that lowers frustration.

    Not used unless passed as ``refine`` to :func:`best_harary_cut`.
    """
    sigma = np.asarray(sigma, dtype=np.int8).copy()
    indptr, nbr, nsign, _ = g.csr
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            a, b = indptr[v], indptr[v + 1]
            agree = nsign[a:b] * sigma[v] * sigma[nbr[a:b]]
            if np.count_nonzero(agree < 0) > np.count_nonzero(agree > 0):
                sigma[v] = -sigma[v]
                improved = True
    return sigma
