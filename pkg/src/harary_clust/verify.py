"""Property suite behind ``harary-clust verify-duality``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .balance import is_balanced, switch
from .duality import (
    BALANCED_K4E_SPECTRUM,
    UNBALANCED_K4E_SPECTRUM,
    NotBalancedError,
    all_signings,
    eigen_symmetric,
    k4_minus_edge,
    signed_laplacian,
    spectrum,
    verify_isospectral,
    zero_eigenvector_bipartition,
)
from .graph import SignedGraph, connected_components
from .synthetic import random_signed_graph

TOL = 1e-8


@dataclass
class Report:
    lines: list[str] = field(default_factory=list)
    failures: list[tuple[str, SignedGraph | None]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, name: str, passed: bool, witness: SignedGraph | None = None, detail: str = "") -> None:
        self.lines.append(f"{'PASS' if passed else 'FAIL'}  {name}{'  ' + detail if detail else ''}")
        if not passed:
            self.failures.append((name, witness))

    @property
    def text(self) -> str:
        out = list(self.lines)
        for name, g in self.failures:
            if g is not None:
                out.append(f"counterexample for {name}: n={g.n}")
                out.extend(f"{u} {v} {s}" for u, v, s in g.edges())
        return "\n".join(out)


def _fmt(values) -> str:
    return " ".join(f"{x + 0.0 if abs(x) >= 5e-5 else 0.0:8.4f}" for x in values)


def k4e_table() -> list[str]:
    """Eigen-table for K4 minus an edge: all-positive, two switchings, one unbalanced signing."""
    g = k4_minus_edge()
    cases = [
        ("S0 all positive", None),
        ("S1 switch v1", np.array([-1, 1, 1, 1])),
        ("S2 switch v1,v2", np.array([-1, -1, 1, 1])),
    ]
    lines = ["graph             eigenvalues"]
    for name, sigma in cases:
        es = eigen_symmetric(signed_laplacian(g, sigma))
        lines.append(f"{name:<17} {_fmt(es.values)}")
        for row in es.vectors:
            lines.append(f"{'':<17} {_fmt(row)}")
    unb = find_unbalanced_k4e()
    if unb is not None:
        es = eigen_symmetric(signed_laplacian(unb))
        lines.append(f"{'unbalanced':<17} {_fmt(es.values)}   signs={unb.sign.tolist()}")
    return lines


def find_unbalanced_k4e() -> SignedGraph | None:
    for sg in all_signings(k4_minus_edge()):
        if is_balanced(sg) is None and np.allclose(spectrum(sg), UNBALANCED_K4E_SPECTRUM, atol=TOL, rtol=0):
            return sg
    return None


def _switch_eigvec_check(g: SignedGraph, sigma: np.ndarray) -> bool:
    # every eigenpair (lam, v) of L(g) must map to (lam, sigma * v) of L(switched g)
    base = eigen_symmetric(signed_laplacian(g))
    lap_s = signed_laplacian(g, sigma)
    flipped = base.vectors * sigma[:, None]
    return bool(np.allclose(lap_s @ flipped, flipped * base.values, atol=TOL))


def run_suite(n_max: int = 8, trials: int = 20, seed: int = 42, inject_unbalanced: bool = False) -> Report:
    rng = np.random.default_rng(seed)
    rep = Report()
    rep.lines.extend(k4e_table())

    g = k4_minus_edge()
    rep.check("K4-minus-edge spectrum is {0,2,4,4}", np.allclose(spectrum(g), BALANCED_K4E_SPECTRUM, atol=TOL), g)

    bad = None
    for sg in all_signings(g):
        vals = spectrum(sg)
        if is_balanced(sg) is not None:
            good = np.allclose(vals, BALANCED_K4E_SPECTRUM, atol=TOL)
        else:
            good = vals[0] > TOL
        if not good:
            bad = sg
            break
    rep.check("all 32 signings: balanced share {0,2,4,4}, unbalanced have no 0", bad is None, bad)
    rep.check("an unbalanced signing has spectrum {2-r2, 3-r3, 2+r2, 3+r3}", find_unbalanced_k4e() is not None)

    fixtures = [(g, np.ones(4, dtype=np.int8), np.array([-1, 1, 1, 1], dtype=np.int8))]
    if inject_unbalanced:
        tri = SignedGraph.from_edges(3, [(0, 1, 1), (0, 2, 1), (1, 2, -1)])
        fixtures.append((tri, np.ones(3, dtype=np.int8), np.ones(3, dtype=np.int8)))
    for i in range(trials):
        n = int(rng.integers(2, n_max + 1))
        h = random_signed_graph(n, 0.5, 0.0, rng=rng)
        fixtures.append((h, rng.choice([-1, 1], size=n).astype(np.int8), rng.choice([-1, 1], size=n).astype(np.int8)))

    fail = None
    for h, s1, s2 in fixtures:
        try:
            same = verify_isospectral(h, s1, s2) and _switch_eigvec_check(h, s2)
        except NotBalancedError:
            same = False
        if not same:
            fail = h
            break
    rep.check("switchings of a balanced graph are isospectral; eigenvectors flip with sigma", fail is None, fail)

    fail = None
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        base = random_signed_graph(n, 0.6, 0.0, rng=rng, connected=True)
        sigma = rng.choice([-1, 1], size=n).astype(np.int8)
        h = switch(base, sigma)
        plus, minus = zero_eigenvector_bipartition(h)
        wit = is_balanced(h)
        sides = {frozenset(np.flatnonzero(wit > 0).tolist()), frozenset(np.flatnonzero(wit < 0).tolist())}
        if {frozenset(plus), frozenset(minus)} != sides:
            fail = h
            break
    rep.check("0-eigenvector sign split equals the Harary bipartition", fail is None, fail)

    fail = None
    for _ in range(trials):
        parts = int(rng.integers(1, 4))
        sizes = rng.integers(1, max(2, n_max // parts) + 1, size=parts)
        edges, offset = [], 0
        for size in sizes.tolist():
            block = random_signed_graph(size, 0.7, 0.0, rng=rng, connected=True)
            edges += [(u + offset, v + offset, s) for u, v, s in block.edges()]
            offset += size
        h = SignedGraph.from_edges(offset, edges)
        h = switch(h, rng.choice([-1, 1], size=offset).astype(np.int8))
        zeros = int(np.count_nonzero(np.abs(spectrum(h)) < 1e-6))
        if zeros != len(connected_components(h)):
            fail = h
            break
    rep.check("multiplicity of eigenvalue 0 equals number of components (balanced)", fail is None, fail)

    fail = None
    for _ in range(trials):
        n = int(rng.integers(3, n_max + 1))
        h = random_signed_graph(n, 0.6, 0.5, rng=rng, connected=True)
        if is_balanced(h) is None and spectrum(h)[0] <= TOL:
            fail = h
            break
    rep.check("connected unbalanced graphs have smallest eigenvalue > 0", fail is None, fail)
    return rep
