"""Essential-spectrum diagnostics for radial operators.

For a diagonal operator the essential spectrum is the set of limit
points of its eigenvalue sequence.  This module estimates that set from
a window tail by single-linkage clustering, and runs the construction
in the other direction: given a polyline target set, it emits a
sequence whose steps shrink like 1/(n+1) (so the first-difference
seminorm stays below the chosen speed) while the divergence of the
harmonic series makes the walk sweep the whole polyline infinitely
often -- every point of the polyline becomes a limit point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WindowError
from .sequences import EigenvalueSequence

__all__ = [
    "SpectrumPath",
    "limit_points",
    "sequence_from_path",
    "connectedness_check",
]

# Above this tail size, exact pairwise linkage gives way to a cell-grid
# pass (same-cell points are always linked; cells are half the linkage
# tolerance, so intra-cell distances cannot exceed it).
_PAIRWISE_LIMIT = 4000


@dataclass(frozen=True)
class SpectrumPath:
    """Polyline through complex vertices, parametrised by arc length."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("path needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise DomainError("path vertices must be finite")
        if v.size > 1 and np.any(v[1:] == v[:-1]):
            raise DomainError("consecutive vertices must be distinct")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def segment_lengths(self) -> np.ndarray:
        if self.vertices.size == 1:
            return np.zeros(0)
        return np.abs(np.diff(self.vertices))

    @property
    def total_length(self) -> float:
        return float(np.sum(self.segment_lengths))

    def point_at(self, s) -> np.ndarray:
        """Point(s) at arc-length position(s) s in [0, L], vectorised."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.vertices.size == 1:
            return np.full(s.shape, self.vertices[0])
        cum = np.concatenate([[0.0], np.cumsum(self.segment_lengths)])
        s = np.clip(s, 0.0, cum[-1])
        re = np.interp(s, cum, self.vertices.real)
        im = np.interp(s, cum, self.vertices.imag)
        return re + 1j * im

    def sample(self, resolution: float) -> np.ndarray:
        """Points along the path at arc-length spacing <= resolution."""
        if self.total_length == 0.0:
            return self.vertices[:1].copy()
        count = max(2, int(np.ceil(self.total_length / resolution)) + 1)
        return self.point_at(np.linspace(0.0, self.total_length, count))


def sequence_from_path(path: SpectrumPath, n_values: int, speed: float = 1.0) -> EigenvalueSequence:
    """Bouncing arc-length walk along the path with steps min(speed/(n+1), L).

    Equivalent formulation used here: the reflecting walk is the
    triangle-wave fold of the monotone walk, so the positions come from
    one cumulative sum.  Every chord is at most its arc step, hence
    (n+1)|Delta^1_n| <= speed exactly.
    """
    if n_values < 2:
        raise DomainError("need N >= 2 sequence values")
    if speed <= 0:
        raise DomainError("speed must be > 0")
    L = path.total_length
    if L == 0.0:
        return EigenvalueSequence(np.full(n_values, path.vertices[0]))
    steps = np.minimum(speed / np.arange(1, n_values), L)
    sigma = np.concatenate([[0.0], np.cumsum(steps)])
    folded = L - np.abs(np.mod(sigma, 2.0 * L) - L)
    return EigenvalueSequence(path.point_at(folded))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def _single_linkage_labels(points: np.ndarray, tol: float) -> np.ndarray:
    """Connected components of the graph with edges between points at
    distance <= tol."""
    n = points.size
    uf = _UnionFind(n)
    if n <= _PAIRWISE_LIMIT:
        for i in range(n - 1):
            close = np.nonzero(np.abs(points[i + 1 :] - points[i]) <= tol)[0]
            for j in close:
                uf.union(i, int(j) + i + 1)
    else:
        cell = tol / 2.0
        keys = np.stack(
            [np.floor(points.real / cell).astype(np.int64),
             np.floor(points.imag / cell).astype(np.int64)],
            axis=1,
        )
        buckets: dict[tuple[int, int], list[int]] = {}
        for idx, key in enumerate(map(tuple, keys)):
            buckets.setdefault(key, []).append(idx)
        # same cell => distance <= cell * sqrt(2) < tol: link directly;
        # nearby cells (Chebyshev distance <= 2) need an exact check
        for (cx, cy), members in buckets.items():
            first = members[0]
            for other in members[1:]:
                uf.union(first, other)
            arr = points[members]
            for dx in range(0, 3):
                for dy in range(-2, 3):
                    if dx == 0 and dy <= 0:
                        continue
                    other_members = buckets.get((cx + dx, cy + dy))
                    if not other_members:
                        continue
                    other_arr = points[other_members]
                    dist = np.abs(arr[:, None] - other_arr[None, :])
                    ii, jj = np.nonzero(dist <= tol)
                    for a, b in zip(ii, jj):
                        uf.union(members[int(a)], other_members[int(b)])
    roots = np.fromiter((uf.find(i) for i in range(n)), dtype=np.int64, count=n)
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def limit_points(
    lam: EigenvalueSequence, tail_fraction: float, cluster_tol: float
) -> np.ndarray:
    """Cluster representatives (centroids) of the window tail: a
    finite-resolution estimate of the limit-point set of the sequence.

    The tail is {lambda_n : n >= (1 - tail_fraction) N}; clusters are
    single-linkage components at cluster_tol.
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise DomainError("tail_fraction must lie in (0, 1]")
    if cluster_tol <= 0:
        raise DomainError("cluster_tol must be > 0")
    n = len(lam)
    if n * tail_fraction < 10:
        raise WindowError(
            f"tail of {n} * {tail_fraction} = {n * tail_fraction:.1f} values is too short (< 10)"
        )
    start = int(np.ceil((1.0 - tail_fraction) * n))
    tail = lam.values[start:]
    labels = _single_linkage_labels(tail, cluster_tol)
    reps = np.array(
        [tail[labels == lab].mean() for lab in range(labels.max() + 1)]
    )
    order = np.lexsort((reps.imag, reps.real))
    return reps[order]


def connectedness_check(points: np.ndarray, gap_tol: float) -> bool:
    """True iff the gap graph (edges between points at distance
    <= gap_tol) is connected."""
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        raise DomainError("connectedness check needs a nonempty point set")
    if gap_tol <= 0:
        raise DomainError("gap_tol must be > 0")
    labels = _single_linkage_labels(pts, gap_tol)
    return bool(labels.max() == 0)
