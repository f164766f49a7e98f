"""Random signed graphs for tests, demos and the bundled sweep dataset."""

from __future__ import annotations

import numpy as np

from .graph import SignedGraph, connected_components


def random_signed_graph(
    n: int,
    p_edge: float = 0.5,
    p_neg: float = 0.5,
    rng: np.random.Generator | int | None = None,
    connected: bool = False,
    max_tries: int = 1000,
) -> SignedGraph:
    """G(n, p) with each edge negative with probability ``p_neg``.

    With ``connected=True`` draws are repeated until the graph is connected.
    """
    rng = np.random.default_rng(rng)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < p_edge
        signs = np.where(rng.random(int(keep.sum())) < p_neg, -1, 1)
        g = SignedGraph(n, iu[keep], ju[keep], signs)
        if not connected or n <= 1 or len(connected_components(g)) == 1:
            return g
    raise RuntimeError(f"no connected G({n}, {p_edge}) in {max_tries} draws")


def planted_partition(
    sizes: list[int],
    p_in: float,
    p_out: float,
    flip: float,
    rng: np.random.Generator | int | None = None,
) -> tuple[SignedGraph, np.ndarray]:
    """Signed planted partition: positive inside blocks, negative across.

    Edges appear with probability ``p_in`` inside a block and ``p_out``
    across; each sign is then flipped with probability ``flip``.  Returns the
    graph (vertices without edges are kept) and the planted block labels.
    """
    rng = np.random.default_rng(rng)
    blocks = np.repeat(np.arange(len(sizes)), sizes)
    n = blocks.size
    iu, ju = np.triu_indices(n, k=1)
    same = blocks[iu] == blocks[ju]
    keep = rng.random(iu.size) < np.where(same, p_in, p_out)
    signs = np.where(same[keep], 1, -1)
    signs = np.where(rng.random(signs.size) < flip, -signs, signs)
    return SignedGraph(n, iu[keep], ju[keep], signs), blocks
