"""Finite-difference calculus on windowed eigenvalue sequences.

A radial operator on the Bergman space is diagonal in the monomial
basis, so everything about it is encoded in its eigenvalue sequence.
This module works with finite windows of such sequences and provides

* the signed-binomial m-th difference ``difference``,
* the weighted first/second difference seminorms ``d1_seminorm`` and
  ``d2_seminorm`` (the quantities whose boundedness characterises
  limits of radial Toeplitz operators),
* the classical moment-problem boundedness grid ``hausdorff_grid``
  built from the normalised sequence mu_n = lambda_n / (n + 1).

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, WindowError

__all__ = [
    "EigenvalueSequence",
    "SeminormValue",
    "SeminormReport",
    "binomial",
    "binomial_row",
    "difference",
    "difference_all",
    "d1_seminorm",
    "d2_seminorm",
    "sup_norm",
    "seminorm_report",
    "hausdorff_value",
    "hausdorff_grid",
    "HausdorffGrid",
]

# Exact integer binomials are used up to this order; beyond it the
# coefficients are evaluated in floating point through log-gamma.
_EXACT_BINOMIAL_LIMIT = 64

# Differences of order <= this are computed by the direct signed sum;
# higher orders fall back to repeated first differences, which keeps
# intermediate terms the same size as the data.
_DIRECT_DIFFERENCE_LIMIT = 8


@dataclass(frozen=True)
class EigenvalueSequence:
    """A finite window lambda_0 .. lambda_{N-1} of a radial operator's
    eigenvalues (complex, indexed from 0)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("sequence window must be one-dimensional with N >= 1")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sequence entries must be finite (no NaN/inf)")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    def real_window(self) -> np.ndarray:
        return self.values.real.copy()

    @classmethod
    def from_function(cls, fn, n: int) -> "EigenvalueSequence":
        """Build a window from a vectorised callable of the index array."""
        idx = np.arange(n)
        return cls(np.asarray(fn(idx), dtype=complex))


class SeminormValue(NamedTuple):
    """One seminorm evaluation: the window supremum and where it is attained."""

    value: float
    argmax: int


@dataclass(frozen=True)
class SeminormReport:
    """Window sup-norm and both difference seminorms, with argmax locations."""

    sup_norm: float
    d1: float
    d2: float
    d1_argmax: int
    d2_argmax: int
    hausdorff_max: float | None = None

    def as_dict(self) -> dict:
        out = {
            "sup_norm": self.sup_norm,
            "d1": self.d1,
            "d2": self.d2,
            "d1_argmax": self.d1_argmax,
            "d2_argmax": self.d2_argmax,
        }
        if self.hausdorff_max is not None:
            out["hausdorff_max"] = self.hausdorff_max
        return out


def binomial(n: int, k: int) -> float:
    """C(n, k) as a float: exact integer arithmetic for n <= 64,
    log-gamma beyond (where the exact value may not even fit a float)."""
    if k < 0 or k > n:
        return 0.0
    if n <= _EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return float(
        np.exp(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))
    )


def binomial_row(n_values: np.ndarray, k: int) -> np.ndarray:
    """Vectorised C(n, k) over an integer array of n, same policy as
    :func:`binomial`."""
    n_values = np.asarray(n_values)
    out = np.zeros(n_values.shape, dtype=float)
    small = n_values <= _EXACT_BINOMIAL_LIMIT
    if np.any(small):
        out[small] = [float(math.comb(int(n), k)) if n >= k else 0.0
                      for n in n_values[small]]
    big = ~small
    if np.any(big):
        nb = n_values[big].astype(float)
        out[big] = np.exp(gammaln(nb + 1.0) - gammaln(k + 1.0) - gammaln(nb - k + 1.0))
    return out


def _difference_window(values: np.ndarray, m: int) -> np.ndarray:
    """All m-th differences of a window at once: entry n holds
    Delta^m_n, for 0 <= n <= N - 1 - m."""
    n_out = values.size - m
    if m <= _DIRECT_DIFFERENCE_LIMIT:
        out = np.zeros(n_out, dtype=values.dtype)
        for j in range(m + 1):
            coeff = (-1) ** (m + j) * math.comb(m, j)
            out += coeff * values[j : j + n_out]
        return out
    out = values
    for _ in range(m):
        out = out[1:] - out[:-1]
    return out


def difference(x: EigenvalueSequence, m: int, n: int) -> complex:
    """The m-th difference Delta^m_n of the window, i.e. the signed
    binomial sum (-1)^m sum_j C(m,j)(-1)^j x_{n+j}.

    Delta^1_n x = x_{n+1} - x_n and Delta^2_n x = x_n - 2 x_{n+1} + x_{n+2}.
    """
    if m < 0 or n < 0:
        raise DomainError(f"difference order and index must be >= 0, got m={m}, n={n}")
    nvals = len(x)
    if n + m > nvals - 1:
        raise WindowError(
            f"Delta^{m}_{n} needs entries up to index {n + m}, window has N={nvals}"
        )
    if m <= _DIRECT_DIFFERENCE_LIMIT:
        total = 0.0 + 0.0j
        for j in range(m + 1):
            total += (-1) ** (m + j) * math.comb(m, j) * x.values[n + j]
        return complex(total)
    window = x.values[n : n + m + 1]
    for _ in range(m):
        window = window[1:] - window[:-1]
    return complex(window[0])


def difference_all(x: EigenvalueSequence, m: int) -> np.ndarray:
    """Vector of Delta^m_n for every admissible n in the window."""
    if m < 0:
        raise DomainError(f"difference order must be >= 0, got {m}")
    if m > len(x) - 1:
        raise WindowError(f"order-{m} differences need N >= {m + 1}, window has N={len(x)}")
    return _difference_window(x.values, m)


def sup_norm(x: EigenvalueSequence) -> float:
    return float(np.max(np.abs(x.values)))


def d1_seminorm(x: EigenvalueSequence) -> SeminormValue:
    """Window first-difference seminorm: max over 0 <= n <= N-2 of
    (n+1)|Delta^1_n x|."""
    if len(x) < 2:
        raise WindowError("d1 seminorm needs a window of length N >= 2")
    diffs = _difference_window(x.values, 1)
    weighted = (np.arange(1, len(x))) * np.abs(diffs)
    arg = int(np.argmax(weighted))
    return SeminormValue(float(weighted[arg]), arg)


def d2_seminorm(x: EigenvalueSequence) -> SeminormValue:
    """Window second-difference seminorm: max over 0 <= n <= N-3 of
    (n+2)^2 |Delta^2_n x|."""
    if len(x) < 3:
        raise WindowError("d2 seminorm needs a window of length N >= 3")
    diffs = _difference_window(x.values, 2)
    weights = (np.arange(2, len(x)).astype(float)) ** 2
    weighted = weights * np.abs(diffs)
    arg = int(np.argmax(weighted))
    return SeminormValue(float(weighted[arg]), arg)


def seminorm_report(
    x: EigenvalueSequence, include_hausdorff: bool = False, hausdorff_k_max: int | None = None
) -> SeminormReport:
    """Full seminorm report for a window (N >= 3)."""
    d1 = d1_seminorm(x)
    d2 = d2_seminorm(x)
    hmax = None
    if include_hausdorff:
        k_max = hausdorff_k_max if hausdorff_k_max is not None else min(len(x) - 1, 64)
        grid = hausdorff_grid(x, m_max=min(2, k_max), k_max=k_max)
        hmax = grid.overall_max
    return SeminormReport(
        sup_norm=sup_norm(x),
        d1=d1.value,
        d2=d2.value,
        d1_argmax=d1.argmax,
        d2_argmax=d2.argmax,
        hausdorff_max=hmax,
    )


def _mu_window(lam: EigenvalueSequence) -> np.ndarray:
    return lam.values / np.arange(1, len(lam) + 1)


def hausdorff_value(lam: EigenvalueSequence, m: int, k: int) -> float:
    """One cell of the moment-problem boundedness grid:
    (k+1) C(k,m) |Delta^m_{k-m} mu| with mu_n = lambda_n / (n+1).

    Uniform boundedness of these cells over all 0 <= m <= k is the
    classical criterion for lambda to be the eigenvalue sequence of a
    Toeplitz operator with bounded radial symbol.
    """
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if m > k or k >= len(lam):
        raise WindowError(
            f"need 0 <= m <= k <= N-1, got m={m}, k={k}, N={len(lam)}"
        )
    mu = _mu_window(lam)
    mu_seq = EigenvalueSequence(mu)
    delta = difference(mu_seq, m, k - m)
    return float((k + 1) * binomial(k, m) * abs(delta))


@dataclass(frozen=True)
class HausdorffGrid:
    """Grid H(m, k) for 0 <= m <= min(m_max, k), m <= k <= k_max.

    ``table[m, k]`` is NaN where the cell is undefined (k < m).
    """

    table: np.ndarray
    m_max: int
    k_max: int
    row_max: np.ndarray = field(repr=False)
    row_argmax: np.ndarray = field(repr=False)

    @property
    def overall_max(self) -> float:
        return float(np.max(self.row_max))

    def as_dict(self) -> dict:
        return {
            "m_max": self.m_max,
            "k_max": self.k_max,
            "row_max": [float(v) for v in self.row_max],
            "row_argmax": [int(v) for v in self.row_argmax],
            "overall_max": self.overall_max,
            "table": [
                [None if np.isnan(v) else float(v) for v in row] for row in self.table
            ],
        }


def hausdorff_grid(lam: EigenvalueSequence, m_max: int, k_max: int) -> HausdorffGrid:
    """Full boundedness grid with per-m row maxima.

    Row m = 0 reproduces |lambda_k|; row maxima for m = 0, 1 (resp.
    0..2) are the finite-window diagnostics for the first/second
    difference seminorm conditions.
    """
    if m_max < 0 or k_max < 0:
        raise DomainError("m_max and k_max must be >= 0")
    if m_max > k_max or k_max >= len(lam):
        raise WindowError(
            f"need m_max <= k_max <= N-1, got m_max={m_max}, k_max={k_max}, N={len(lam)}"
        )
    mu = _mu_window(lam)
    table = np.full((m_max + 1, k_max + 1), np.nan)
    for m in range(m_max + 1):
        deltas = _difference_window(mu, m)  # Delta^m_n for n = 0..N-1-m
        ks = np.arange(m, k_max + 1)
        # cell (m, k) uses Delta^m at starting index k - m
        vals = (ks + 1) * binomial_row(ks, m) * np.abs(deltas[ks - m])
        table[m, ks] = vals
    row_max = np.nanmax(table, axis=1)
    row_argmax = np.nanargmax(table, axis=1)
    return HausdorffGrid(
        table=table, m_max=m_max, k_max=k_max, row_max=row_max, row_argmax=row_argmax
    )
