"""Signed graph model, edge-list ingestion and component machinery."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

FORMATS = ("konect", "amazon-ratings")

_SPLIT = re.compile(r"[,\s]+")


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class RawEdge:
    """One edge as read from a file, before any cleanup."""

    src: Hashable
    dst: Hashable
    weight: float


def map_rating(rating: int) -> int:
    """Map a 1..5 star rating to an edge sign (3 is neutral and maps to 0)."""
    if isinstance(rating, bool) or rating not in (1, 2, 3, 4, 5):
        raise ValueError(f"rating must be an integer in 1..5, got {rating!r}")
    if rating >= 4:
        return 1
    if rating == 3:
        return 0
    return -1


def _parse_rating(token: str, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"rating {token!r} is not a number") from None
    if value != int(value) or not 1 <= value <= 5:
        raise ParseError(lineno, f"rating {token!r} outside 1..5")
    return int(value)


def parse_edge_list(stream: TextIO | Iterable[str], fmt: str = "konect") -> list[RawEdge]:
    """Read raw edges from a line-oriented stream.

    ``konect``: ``u v [w [extra...]]`` separated by whitespace or commas, ids are
    integers, a missing weight means +1, lines starting with ``%`` or ``#``
    are comments.

    ``amazon-ratings``: ``user,item,rating[,timestamp]``.  Users and items live
    in disjoint id spaces (``u:<id>`` and ``i:<id>``) and the rating is
    converted with :func:`map_rating`.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    edges: list[RawEdge] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line[0] in "%#":
            continue
        if fmt == "konect":
            parts = [p for p in _SPLIT.split(line) if p]
            if len(parts) < 2:
                raise ParseError(lineno, f"expected 'u v [w]', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"vertex ids must be integers: {line!r}") from None
            if u < 0 or v < 0:
                raise ParseError(lineno, "vertex ids must be non-negative")
            w = 1.0
            if len(parts) >= 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(lineno, f"weight {parts[2]!r} is not a number") from None
            edges.append(RawEdge(u, v, w))
        else:
            parts = [p.strip() for p in line.split(",")]
            if len(parts) not in (3, 4) or not parts[0] or not parts[1]:
                raise ParseError(lineno, f"expected 'user,item,rating[,timestamp]', got {line!r}")
            rating = _parse_rating(parts[2], lineno)
            edges.append(RawEdge(f"u:{parts[0]}", f"i:{parts[1]}", float(map_rating(rating))))
    return edges


class SignedGraph:
    """Immutable undirected signed graph.

    Edges are stored as parallel arrays ``src < dst`` with ``sign`` in
    {+1, -1}; a CSR index gives O(deg) neighbour traversal.  ``names[i]`` is
    the original id of dense vertex ``i``.
    """

    def __init__(
        self,
        n: int,
        src: Sequence[int] | np.ndarray,
        dst: Sequence[int] | np.ndarray,
        sign: Sequence[int] | np.ndarray,
        names: Sequence[Hashable] | None = None,
    ):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        sign = np.asarray(sign, dtype=np.int8)
        if not (src.shape == dst.shape == sign.shape) or src.ndim != 1:
            raise ValueError("src, dst and sign must be 1-d arrays of equal length")
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if src.size:
            if src.min() < 0 or max(src.max(), dst.max()) >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            if not np.all(np.abs(sign) == 1):
                raise ValueError("signs must be +1 or -1")
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        if lo.size and np.unique(lo * n + hi).size != lo.size:
            raise ValueError("duplicate unordered pair")
        self._n = int(n)
        self._src, self._dst, self._sign = lo, hi, sign
        for arr in (self._src, self._dst, self._sign):
            arr.flags.writeable = False
        if names is None:
            names = range(self._n)
        self._names = tuple(names)
        if len(self._names) != self._n:
            raise ValueError("names must have one entry per vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]], names=None) -> "SignedGraph":
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [], names)
        u, v, s = zip(*edges)
        return cls(n, u, v, s, names)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return int(self._src.size)

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def dst(self) -> np.ndarray:
        return self._dst

    @property
    def sign(self) -> np.ndarray:
        return self._sign

    @property
    def names(self) -> tuple:
        return self._names

    @property
    def m_pos(self) -> int:
        return int(np.count_nonzero(self._sign > 0))

    @property
    def m_neg(self) -> int:
        return int(np.count_nonzero(self._sign < 0))

    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self._src.tolist(), self._dst.tolist(), self._sign.tolist()))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, neighbour, neighbour_sign, edge_id), both directions per edge."""
        m = self.m
        rows = np.concatenate([self._src, self._dst])
        cols = np.concatenate([self._dst, self._src])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((cols, rows))
        rows, cols, eid = rows[order], cols[order], eid[order]
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, cols, self._sign[eid], eid

    @cached_property
    def csr_rows(self) -> np.ndarray:
        """Row (source vertex) of every CSR entry."""
        return np.repeat(np.arange(self._n), np.diff(self.csr[0]))

    @cached_property
    def pair_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted ``src * n + dst`` keys and the edge order that sorts them."""
        key = self._src * self._n + self._dst
        srt = np.argsort(key)
        return key[srt], srt

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.csr[0])

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        indptr, nbr, nsign, _ = self.csr
        a, b = indptr[v], indptr[v + 1]
        return list(zip(nbr[a:b].tolist(), nsign[a:b].tolist()))

    def edge_sign(self, u: int, v: int) -> int | None:
        for w, s in self.neighbors(u):
            if w == v:
                return s
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return (
            self._n == other._n
            and self._names == other._names
            and sorted(self.edges()) == sorted(other.edges())
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"SignedGraph(n={self._n}, m={self.m}, m+={self.m_pos}, m-={self.m_neg})"


def preprocess(raw: Iterable[RawEdge]) -> SignedGraph:
    """Clean raw edges into a :class:`SignedGraph`.

    Self-loops are dropped, direction is folded, weight >= 0 becomes +1 and
    weight < 0 becomes -1.  Same-sign repeats of an unordered pair keep the
    first occurrence; a pair seen with both signs is dropped entirely.  Vertex
    ids are densified in sorted order of the original ids that survive.
    """
    first: dict[frozenset, tuple[Hashable, Hashable, int]] = {}
    conflicted: set[frozenset] = set()
    for e in raw:
        if e.src == e.dst:
            continue
        key = frozenset((e.src, e.dst))
        s = 1 if e.weight >= 0 else -1
        seen = first.get(key)
        if seen is None:
            first[key] = (e.src, e.dst, s)
        elif seen[2] != s:
            conflicted.add(key)
    kept = [first[k] for k in first if k not in conflicted]
    if not kept:
        raise EmptyGraphError("no edges left after preprocessing")
    ids = list(dict.fromkeys(x for a, b, _ in kept for x in (a, b)))
    try:
        ids.sort()
    except TypeError:  # mixed id types: keep first-appearance order
        pass
    index = {x: i for i, x in enumerate(ids)}
    triples = []
    for a, b, s in kept:
        ia, ib = index[a], index[b]
        triples.append((min(ia, ib), max(ia, ib), s))
    return SignedGraph.from_edges(len(ids), triples, names=ids)


def load_graph(path, fmt: str = "konect") -> SignedGraph:
    with open(path, encoding="utf-8") as fh:
        return preprocess(parse_edge_list(fh, fmt))


@dataclass(frozen=True)
class ComponentSet:
    components: list[list[int]]
    component_of: np.ndarray

    def __len__(self) -> int:
        return len(self.components)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]


EdgePredicate = Callable[[int, int, int], bool]


def connected_components(
    g: SignedGraph,
    keep_edge: EdgePredicate | np.ndarray | None = None,
) -> ComponentSet:
    """Connected components of ``g`` using only edges selected by ``keep_edge``.

    ``keep_edge`` is either a predicate ``(u, v, sign) -> bool`` or a boolean
    mask over ``g``'s edge order.  Components are ordered by smallest vertex
    and list their vertices in ascending order.
    """
    if keep_edge is None:
        mask = np.ones(g.m, dtype=bool)
    elif callable(keep_edge):
        mask = np.fromiter(
            (bool(keep_edge(u, v, s)) for u, v, s in g.edges()), dtype=bool, count=g.m
        )
    else:
        mask = np.asarray(keep_edge, dtype=bool)
        if mask.shape != (g.m,):
            raise ValueError("edge mask must have one entry per edge")
    return components_from_mask(g.n, g.src, g.dst, mask)


def components_from_mask(n: int, src: np.ndarray, dst: np.ndarray, mask: np.ndarray) -> ComponentSet:
    u, v = src[mask], dst[mask]
    adj = csr_matrix((np.ones(u.size, dtype=np.int8), (u, v)), shape=(n, n))
    _, raw = _cc(adj, directed=False)
    # renumber so component ids follow the smallest member vertex
    _, first_idx, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first_idx))
    comp_of = rank[inverse].astype(np.int64)
    order = np.argsort(comp_of, kind="stable")
    bounds = np.cumsum(np.bincount(comp_of, minlength=len(first_idx)))[:-1]
    comps = [c.tolist() for c in np.split(order, bounds)]
    return ComponentSet(comps, comp_of)


def component_labels(g: SignedGraph, mask: np.ndarray, small: int = 1024) -> tuple[int, np.ndarray]:
    """Unordered component labels of the edges selected by ``mask``.

    Cheaper than :func:`connected_components`: ids are arbitrary and no
    member lists are built.  Graphs with at most ``small`` CSR entries use a
    union-find in plain Python.
    """
    if 2 * g.m <= small:
        parent = list(range(g.n))
        for u, v in zip(g.src[mask].tolist(), g.dst[mask].tolist()):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            if u != v:
                parent[max(u, v)] = min(u, v)
        roots = []
        for x in range(g.n):
            r = x
            while parent[r] != r:
                r = parent[r]
            roots.append(r)
        lab = np.array(roots, dtype=np.int64)
        return int(np.count_nonzero(lab == np.arange(g.n))), lab
    indptr, nbr, _, eid = g.csr
    keep = mask[eid]
    ptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(g.csr_rows[keep], minlength=g.n), out=ptr[1:])
    adj = csr_matrix((np.ones(int(keep.sum()), dtype=np.int8), nbr[keep], ptr), shape=(g.n, g.n))
    k, lab = _cc(adj, directed=True, connection="weak")
    return int(k), lab


@dataclass(frozen=True)
class Subgraph:
    """An induced subgraph together with its vertex maps back to the parent."""

    graph: SignedGraph
    to_parent: np.ndarray
    from_parent: dict[int, int]


def induced_subgraph(g: SignedGraph, vertices: Iterable[int]) -> Subgraph:
    """Subgraph of ``g`` on ``vertices``, carrying ``g``'s own edge signs."""
    verts = np.unique(np.fromiter(vertices, dtype=np.int64))
    if verts.size == 0:
        raise ValueError("vertex set is empty")
    if verts[0] < 0 or verts[-1] >= g.n:
        raise ValueError("vertex outside graph")
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(verts.size)
    keep = (local[g.src] >= 0) & (local[g.dst] >= 0)
    sub = SignedGraph(
        int(verts.size),
        local[g.src[keep]],
        local[g.dst[keep]],
        g.sign[keep],
        names=[g.names[i] for i in verts.tolist()],
    )
    return Subgraph(sub, verts, {int(p): i for i, p in enumerate(verts.tolist())})
