"""Desk-scale checks of the link between balance and the signed Laplacian.

Dense matrices only; this is for verifying small graphs, not for clustering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .balance import is_balanced, switch
from .graph import SignedGraph, connected_components

MAX_DENSE_N = 2048
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class NotBalancedError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # column k pairs with values[k]


def signed_laplacian(g: SignedGraph, sigma: np.ndarray | None = None) -> np.ndarray:
    """L = D - A with A(u, v) = sign(u, v), optionally after switching by sigma."""
    if g.n > MAX_DENSE_N:
        raise ValueError(f"dense Laplacian capped at n={MAX_DENSE_N}, got {g.n}")
    if sigma is not None:
        g = switch(g, sigma)
    lap = np.zeros((g.n, g.n))
    s = g.sign.astype(float)
    lap[g.src, g.dst] = -s
    lap[g.dst, g.src] = -s
    lap[np.diag_indices(g.n)] = g.degree
    return lap


def _canonical_signs(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, k]) > tol)
        if nz.size and out[nz[0], k] < 0:
            out[:, k] = -out[:, k]
    return out


def eigen_symmetric(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenSystem:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Stops once the largest off-diagonal magnitude drops below
    ``tol * max(1, ||A||_F)``.  Eigenvectors are normalised and signed so
    their first non-negligible entry is positive.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=1e-12, rtol=0):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    off = np.abs(a - np.diag(np.diag(a)))
    for _ in range(max_sweeps + 1):
        if n < 2 or off.max() < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < threshold * 1e-3:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = np.abs(a - np.diag(np.diag(a)))
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return EigenSystem(values[order], _canonical_signs(v[:, order]))


def spectrum(g: SignedGraph, sigma: np.ndarray | None = None) -> np.ndarray:
    return eigen_symmetric(signed_laplacian(g, sigma)).values


def verify_isospectral(g: SignedGraph, sigma1: np.ndarray, sigma2: np.ndarray, tol: float = 1e-8) -> bool:
    """Compare spectra of two switchings of ``g``; both must be balanced."""
    for s in (sigma1, sigma2):
        if is_balanced(switch(g, s)) is None:
            raise NotBalancedError("isospectrality is only claimed for balanced signings")
    return bool(np.allclose(spectrum(g, sigma1), spectrum(g, sigma2), atol=tol, rtol=0))


def zero_eigenvector_bipartition(g: SignedGraph, tol: float = 1e-6) -> tuple[list[int], list[int]]:
    """Split vertices by the sign of the Laplacian's 0-eigenvector.

    Requires a connected balanced graph; the vector is scaled so its largest
    entry has magnitude 1, at which point every entry is +1 or -1.
    """
    if g.n > 1 and len(connected_components(g)) != 1:
        raise ValueError("graph must be connected")
    es = eigen_symmetric(signed_laplacian(g))
    if es.values[0] > tol:
        raise NotBalancedError(f"smallest eigenvalue {es.values[0]:.3g} > 0: graph is unbalanced")
    vec = es.vectors[:, 0]
    vec = vec / np.abs(vec).max()
    if not np.allclose(np.abs(vec), 1.0, atol=tol):
        raise NotBalancedError("0-eigenvector entries are not all +-1")
    plus = np.flatnonzero(vec > 0).tolist()
    minus = np.flatnonzero(vec < 0).tolist()
    return plus, minus


def k4_minus_edge(signs=(1, 1, 1, 1, 1)) -> SignedGraph:
    """K4 without edge (2, 3): edges (0,1) (0,2) (0,3) (1,2) (1,3)."""
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
    return SignedGraph.from_edges(4, [(u, v, s) for (u, v), s in zip(pairs, signs)])


def all_signings(g: SignedGraph):
    for signs in itertools.product((1, -1), repeat=g.m):
        yield SignedGraph(g.n, g.src, g.dst, signs, g.names)


UNBALANCED_K4E_SPECTRUM = np.sort(
    [2 - math.sqrt(2), 3 - math.sqrt(3), 2 + math.sqrt(2), 3 + math.sqrt(3)]
)
BALANCED_K4E_SPECTRUM = np.array([0.0, 2.0, 4.0, 4.0])
