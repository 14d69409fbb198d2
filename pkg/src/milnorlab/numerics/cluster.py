"""Single-linkage clustering and local PCA dimension of point clouds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform


class ClusterTooSmall(ValueError):
    pass


def single_linkage(points, h: float) -> list[np.ndarray]:
    """Connected components of the graph joining points at distance <= h.

    Clusters are index arrays, sorted internally, and ordered by their
    lexicographically smallest member point, so the partition does not
    depend on input order.
    """
    if not h > 0:
        raise ValueError("linkage radius must be positive")
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return []
    P = np.atleast_2d(P)
    n = len(P)
    pairs = cKDTree(P).query_pairs(h, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    _, labels = connected_components(graph, directed=False)
    clusters = [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]

    def key(idx):
        sub = P[idx]
        first = np.lexsort(sub.T[::-1])[0]
        return tuple(sub[first])

    return sorted(clusters, key=key)


def count_clusters(points, h: float) -> int:
    return len(single_linkage(points, h))


@dataclass
class LinkageChoice:
    h: float
    counts: tuple  # cluster counts at h/2, h, 2h
    rule: str  # "median_nn", "mst_gap" or "major_scan"
    min_size: int = 1  # clusters below this size are stragglers, not components

    @property
    def stable(self) -> bool:
        return len(set(self.counts)) == 1


def _plateau(P, h, min_size=1):
    return tuple(sum(len(c) >= min_size for c in single_linkage(P, f * h)) for f in (0.5, 1.0, 2.0))


def mst_edges(points, k: int = 16) -> np.ndarray:
    """Sorted edge lengths of the Euclidean minimum spanning tree.

    Coincident points are merged first.  Small clouds use all pairwise
    distances.  Larger ones use the k-nearest-neighbour graph, and when
    that graph falls apart, each piece gets its shortest edge to the rest
    (Boruvka steps) until it is connected; those bridging edges are EMST
    edges by the cut property.
    """
    P = np.unique(np.atleast_2d(np.asarray(points, dtype=float)), axis=0)
    n = len(P)
    if n < 2:
        return np.zeros(0)
    if n <= 1500:
        return np.sort(minimum_spanning_tree(squareform(pdist(P))).data)
    k = min(k, n - 1)
    dk, ik = cKDTree(P).query(P, k=k + 1)
    rows = list(np.repeat(np.arange(n), k))
    cols = list(ik[:, 1:].ravel())
    w = list(dk[:, 1:].ravel())
    while True:
        graph = coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
        ncomp, labels = connected_components(graph, directed=False)
        if ncomp == 1:
            break
        for c in range(ncomp):
            inside = np.flatnonzero(labels == c)
            outside = np.flatnonzero(labels != c)
            d, j = cKDTree(P[outside]).query(P[inside])
            b = int(np.argmin(d))
            rows.append(inside[b])
            cols.append(outside[j[b]])
            w.append(d[b])
    return np.sort(minimum_spanning_tree(graph).data)


def choose_linkage_radius(points, factor: float = 3.0, floor: float = 1e-12, major_fraction: float = 0.02) -> LinkageChoice:
    """Pick a linkage radius and scan (h/2, h, 2h).

    First try h = factor * median nearest-neighbour distance.  If the count
    is not constant over the scan, take the first gap of ratio >= 4 between
    consecutive minimum-spanning-tree edges above that scale and put h at
    its geometric middle.  Single-linkage counts are constant between
    consecutive MST edge lengths, so such a gap is exactly a plateau.

    Curves sampled from uniform seeds thin out towards the ball boundary,
    so neither rule may find a plateau.  The last resort doubles h until
    the number of clusters holding at least ``major_fraction`` of the
    points is constant (and positive) over the scan; smaller clusters are
    then stragglers.  Without any plateau the unstable median rule is
    returned.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(P)
    if n < 2:
        return LinkageChoice(1.0, (n, n, n), "median_nn")
    d, _ = cKDTree(P).query(P, k=2)
    h0 = max(factor * float(np.median(d[:, 1])), floor)
    counts = _plateau(P, h0)
    if len(set(counts)) == 1:
        return LinkageChoice(h0, counts, "median_nn")
    edges = mst_edges(P)
    big = edges[edges >= h0 / 2]
    for a, b in zip(big[:-1], big[1:]):
        if b >= 4.0 * a:
            h = float(np.sqrt(a * b))
            return LinkageChoice(h, _plateau(P, h), "mst_gap")
    min_size = max(2, int(np.ceil(major_fraction * n)))
    diag = float(np.linalg.norm(P.max(axis=0) - P.min(axis=0)))
    h = h0
    while 2 * h <= diag:
        c = _plateau(P, h, min_size)
        if c[0] > 0 and len(set(c)) == 1:
            return LinkageChoice(h, c, "major_scan", min_size)
        h *= 2
    return LinkageChoice(h0, counts, "median_nn")


def local_dim(points, k: int = 10, rel_threshold: float = 0.1, noise_floor: float = 1e-6, max_probes: int = 400) -> int:
    """Majority vote of local PCA dimensions over the k-neighbourhoods.

    A covariance eigenvalue counts when it is at least ``rel_threshold``
    times the largest one and its square root exceeds ``noise_floor``.
    At most ``max_probes`` evenly spaced points are used as centres.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n, dim = P.shape
    if k < dim + 1:
        raise ClusterTooSmall(f"neighbourhood size {k} must be at least dim+1 = {dim + 1}")
    if n < k:
        raise ClusterTooSmall(f"cluster of {n} points is smaller than k = {k}")
    centres = np.unique(np.linspace(0, n - 1, min(n, max_probes)).round().astype(int))
    _, nbr = cKDTree(P).query(P[centres], k=k)
    Q = P[nbr]  # (c, k, dim)
    Q = Q - Q.mean(axis=1, keepdims=True)
    cov = np.einsum("cki,ckj->cij", Q, Q) / k
    ev = np.linalg.eigvalsh(cov)  # ascending
    top = ev[:, -1:]
    counted = (ev >= rel_threshold * top) & (ev > noise_floor**2)
    dims = counted.sum(axis=1)
    votes = np.bincount(dims, minlength=dim + 1)
    return int(np.argmax(votes))  # ties resolve to the smaller dimension
