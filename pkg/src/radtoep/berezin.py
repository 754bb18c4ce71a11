"""k-Berezin transforms of radial operators and radial symbols.

Three computational routes live here, deliberately independent so they
can cross-validate each other:

* ``berezin_of_radial_operator`` expands the transform of a diagonal
  operator into a power series in x = r^2 by expanding the k-kernel in
  monomials.  The coefficient of x^m is

      C(m+k+1, m)^2 * sum_{j=0}^k C(k,j) (-1)^j lambda_{m+j} / (m+j+1)

  with the prefactor (k+1)(1-x)^(2+k).

* ``berezin_of_radial_symbol`` evaluates the transform of a function
  directly as a disk integral (conformally substituted so that the
  symbol is sampled on centered circles): tensor quadrature with an
  adaptive trapezoid in the angle and panel Gauss-Legendre in the
  radius.

* ``berezin_iterate_eigenvalues`` computes the eigenvalues of the
  Toeplitz re-quantisation T_{B_k(S)}.  Each basis projection E_m has a
  polynomial transform, so its moments are finite alternating sums of
  Beta integrals; these weights are evaluated in exact rational
  arithmetic (the alternating sums cancel catastrophically in floating
  point) and the window's constant extension is folded in exactly via
  the row-sum identity sum_m w_k(p, m) = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, ToleranceError, WindowError
from .moments import RadialSymbol
from .quadrature import QuadratureConfig, integrate_adaptive
from .sequences import EigenvalueSequence

__all__ = [
    "R_MAX",
    "BerezinProfile",
    "berezin_of_radial_operator",
    "berezin_of_radial_symbol",
    "berezin_iterate_eigenvalues",
    "tabulate_symbol_transform",
    "ConvergenceReport",
    "convergence_report",
    "ResidualTable",
    "laplacian_identity_check",
    "commutativity_check",
]

# Series evaluation ceiling: the x^m coefficients grow like m^(2k+2), so
# close to the unit circle the truncated series is ill-conditioned while
# everything downstream weights that region weakly.
R_MAX = 0.995

# Above this transform order the squared kernel binomials overflow
# float64 for the series lengths the ceiling requires.
_K_LIMIT = 40

_COEFF_BLOCK = 512
_MAX_TERMS = 200_000


@dataclass(frozen=True)
class BerezinProfile:
    """The radial function r -> B_k(S)(r) as a truncated power series in
    x = r^2 with prefactor (k+1)(1-x)^(2+k)."""

    k: int
    coefficients: np.ndarray
    truncation_tol: float
    tail_bound: float
    window_extended: bool
    r_max: float = R_MAX

    @property
    def truncation_order(self) -> int:
        return int(self.coefficients.size)

    def _check_radii(self, r: np.ndarray):
        if np.any(r < 0) or np.any(r > self.r_max * (1 + 1e-12)):
            raise DomainError(f"profile is defined for r in [0, {self.r_max}]")

    def value(self, r):
        """B_k(S)(r), vectorised over r in [0, r_max]."""
        r = np.asarray(r, dtype=float)
        self._check_radii(r)
        x = r * r
        series = np.polynomial.polynomial.polyval(x, self.coefficients)
        out = (self.k + 1) * (1.0 - x) ** (2 + self.k) * series
        return out if np.iscomplexobj(self.coefficients) else np.real(out)

    def invariant_laplacian(self, r):
        """(1-x)^2 (x f''(x) + f'(x)) for f(x) = B_k(S) as a function of
        x = r^2: the invariant Laplacian of the profile, computed by
        analytic differentiation of the series."""
        r = np.asarray(r, dtype=float)
        self._check_radii(r)
        x = r * r
        c = self.coefficients
        m = np.arange(c.size)
        polyval = np.polynomial.polynomial.polyval
        p0 = polyval(x, c)
        p1 = polyval(x, (c * m)[1:]) if c.size > 1 else 0.0
        p2 = polyval(x, (c * m * (m - 1))[2:]) if c.size > 2 else 0.0
        kp1 = self.k + 1
        a = 2 + self.k
        one_minus = 1.0 - x
        f1 = kp1 * (-a * one_minus ** (a - 1) * p0 + one_minus**a * p1)
        f2 = kp1 * (
            a * (a - 1) * one_minus ** (a - 2) * p0
            - 2 * a * one_minus ** (a - 1) * p1
            + one_minus**a * p2
        )
        out = one_minus**2 * (x * f2 + f1)
        return out if np.iscomplexobj(c) else np.real(out)


def _extended_values(lam: EigenvalueSequence, needed: int, strict: bool, what: str) -> tuple[np.ndarray, bool]:
    vals = lam.values
    if vals.size >= needed:
        return vals, False
    if strict:
        raise WindowError(
            f"{what} needs lambda window of length >= {needed}, got {vals.size} "
            "(strict window mode forbids extension)"
        )
    warnings.warn(
        f"{what}: window of length {vals.size} extended to {needed} by its last value",
        RuntimeWarning,
        stacklevel=3,
    )
    return np.concatenate([vals, np.full(needed - vals.size, vals[-1])]), True


def berezin_of_radial_operator(
    lam: EigenvalueSequence,
    k: int,
    tol: float = 1e-12,
    strict_window: bool = False,
) -> BerezinProfile:
    """Series form of B_k(S) for the radial operator with eigenvalues lam.

    The series is truncated adaptively so that a geometric bound on the
    dropped tail is <= tol at r = r_max.  If the window is shorter than
    the truncation order requires it is extended by its last value
    (bounded sequences have bounded tails); ``strict_window`` turns that
    into an error.
    """
    if k < 0:
        raise DomainError(f"transform order must be >= 0, got {k}")
    if k > _K_LIMIT:
        raise DomainError(
            f"series profiles support k <= {_K_LIMIT}; the iterate path has no such limit"
        )
    if tol <= 0:
        raise DomainError("tol must be > 0")

    x_max = R_MAX * R_MAX
    prefac = (k + 1) * (1.0 - x_max) ** (2 + k)
    lam_max = float(np.max(np.abs(lam.values)))
    if lam_max == 0.0:
        return BerezinProfile(
            k=k,
            coefficients=np.zeros(1),
            truncation_tol=tol,
            tail_bound=0.0,
            window_extended=False,
        )

    j_coeffs = np.array([(-1) ** j * math.comb(k, j) for j in range(k + 1)], dtype=float)

    coeffs = []
    extended = False
    values = lam.values
    binom = 1.0  # C(m+k+1, m) at the current m, by multiplicative recurrence
    m = 0
    while True:
        m_end = m + _COEFF_BLOCK
        if values.size < m_end + k:
            values, ext = _extended_values(lam, m_end + k, strict_window, "series profile")
            extended = extended or ext
        block_binom = np.empty(_COEFF_BLOCK)
        for i in range(_COEFF_BLOCK):
            block_binom[i] = binom
            binom *= (m + i + k + 2) / (m + i + 1)
        ms = np.arange(m, m_end)
        inner = np.zeros(_COEFF_BLOCK, dtype=complex)
        for j in range(k + 1):
            inner += j_coeffs[j] * values[ms + j] / (ms + j + 1)
        coeffs.append(block_binom**2 * inner)
        m = m_end

        # geometric tail bound at r_max: term bounds shrink by at least
        # q = x * (m+k+2)^2 / ((m+1)(m+2)) per step once q < 1
        q = x_max * (m + k + 2) ** 2 / ((m + 1) * (m + 2))
        if q < 1.0:
            log_term = (
                math.log(prefac)
                + 2.0 * math.log(binom)
                + k * math.log(2.0)
                + math.log(lam_max)
                - math.log(m + 1)
                + m * math.log(x_max)
            )
            tail = math.exp(log_term) / (1.0 - q) if log_term < 700 else math.inf
            if tail <= tol:
                break
        if m >= _MAX_TERMS:
            raise ToleranceError(
                f"series profile needs more than {_MAX_TERMS} terms for tol={tol}",
                achieved=None,
            )

    coeff_arr = np.concatenate(coeffs)
    if not np.iscomplexobj(lam.values) or np.all(lam.values.imag == 0.0):
        coeff_arr = coeff_arr.real
    return BerezinProfile(
        k=k,
        coefficients=coeff_arr,
        truncation_tol=tol,
        tail_bound=tail,
        window_extended=extended,
    )


# -- symbol side ---------------------------------------------------------


def _angular_mean(a: float, rho: np.ndarray, q: int, rel_tol: float = 1e-13,
                  max_nodes: int = 1 << 22) -> np.ndarray:
    """Mean over the angle of |1 - a rho e^{i theta}|^(-2q), vectorised
    over rho.  Node-doubling trapezoid; the integrand is analytic in the
    angle, so convergence is geometric."""
    rho = np.asarray(rho, dtype=float)
    ar = a * rho
    if np.any(ar >= 1.0):
        raise DomainError("angular factor requires a * rho < 1")
    if a == 0.0:
        return np.ones_like(rho)

    base = (1.0 - ar) ** 2

    def f_sum(theta: np.ndarray) -> np.ndarray:
        # |1 - ar e^{i theta}|^2 = (1 - ar)^2 + 4 ar sin^2(theta/2)
        s = np.sin(0.5 * theta) ** 2
        return np.sum((base[None, :] + 4.0 * ar[None, :] * s[:, None]) ** (-q), axis=0)

    n = 32
    theta0 = np.arange(n) * (2.0 * math.pi / n)
    vals = f_sum(theta0) / n
    while n <= max_nodes:
        mid_sum = np.zeros_like(vals)
        step = 2.0 * math.pi / n
        chunk = max(1, (1 << 16) // max(1, rho.size))
        for start in range(0, n, chunk):
            idx = np.arange(start, min(start + chunk, n))
            mid_sum += f_sum((idx + 0.5) * step)
        new_vals = 0.5 * (vals + mid_sum / n)
        n *= 2
        if np.all(np.abs(new_vals - vals) <= rel_tol * np.abs(new_vals) + 1e-300):
            return new_vals
        vals = new_vals
    raise ToleranceError(
        f"angular quadrature did not settle within {max_nodes} nodes", achieved=None
    )


def berezin_of_radial_symbol(
    symbol: RadialSymbol,
    k: int,
    r: float,
    config: QuadratureConfig = QuadratureConfig(),
) -> complex:
    """B_k(b)(r): the transform of a radial function at the real point r,
    as the disk integral of b against the k-th kernel measure moved to r.

    After centering the automorphism on the symbol the integrand is
    b(rho) (1-rho^2)^k |1 - r rho e^{i theta}|^(-2(k+2)) against
    normalised area, integrated angle-first.  Radial panels are aligned
    with the breakpoints of piecewise symbols, so discontinuities never
    cross a panel.  The result is real for real symbols.
    """
    if k < 0:
        raise DomainError(f"transform order must be >= 0, got {k}")
    if not 0.0 <= r < 1.0:
        raise DomainError(f"evaluation point must satisfy 0 <= r < 1, got {r}")
    q = k + 2
    prefac = (k + 1) * (1.0 - r * r) ** (2 + k)
    local = QuadratureConfig(
        nodes_per_panel=config.nodes_per_panel,
        abs_tol=config.abs_tol / prefac,
        max_panels=config.max_panels,
    )
    breakpoints = ()
    if symbol.variant == "piecewise":
        breakpoints = tuple(symbol.breakpoints[1:-1])

    def integrand_factory(extract):
        def integrand(s):
            s = np.asarray(s, dtype=float)
            rho = np.sqrt(s)
            ang = _angular_mean(r, rho, q)
            return extract(symbol.eval_t(s)) * (1.0 - s) ** k * ang

        return integrand

    real_part = integrate_adaptive(
        integrand_factory(np.real), 0.0, 1.0, local, breakpoints
    )
    if symbol.is_complex:
        imag_part = integrate_adaptive(
            integrand_factory(np.imag), 0.0, 1.0, local, breakpoints
        )
        return prefac * complex(real_part, imag_part)
    return complex(prefac * real_part)


def tabulate_symbol_transform(
    symbol: RadialSymbol,
    k: int,
    config: QuadratureConfig = QuadratureConfig(abs_tol=1e-9),
    interior_points: int = 241,
    ceiling: float = 0.9995,
) -> RadialSymbol:
    """Tabulate r -> B_k(b)(r) on a radial grid (uniform in r^2, then
    geometrically refined toward 1) and wrap it as an interpolated
    radial symbol, for nested transforms.

    Beyond ``ceiling`` the interpolant extends by its last value; the
    transform is continuous there and downstream integrals weight that
    sliver by at most 1 - ceiling^2.
    """
    s_cap = ceiling * ceiling
    s_grid = list(np.linspace(0.0, 0.96, interior_points))
    gap = 0.04
    while 1.0 - gap / 2.0 < s_cap:
        gap /= 2.0
        s_grid.append(1.0 - gap)
    s_grid.append(s_cap)
    s_grid = np.unique(np.asarray(s_grid))
    radii = np.sqrt(s_grid)
    values = np.array(
        [berezin_of_radial_symbol(symbol, k, float(r), config).real for r in radii]
    )
    return RadialSymbol.tabulated(radii, values, sup_bound=symbol.sup_bound)


# -- iterated quantisation -----------------------------------------------


def _basis_weight(k: int, p: int, m: int) -> Fraction:
    """Exact weight w_k(p, m): the p-th eigenvalue of T_{B_k(E_m)} for
    the rank-one basis projection E_m.

    w = (p+1)(k+1)/(m+1) * sum_j (-1)^j C(k,j) C(m-j+k+1, k+1)^2
        * (m-j+p)! (k+2)! / (m-j+p+k+3)!

    The alternating sum cancels to O(m^-2) from terms of size m^(k-2),
    hence the exact arithmetic.
    """
    kfac = math.factorial(k + 2)
    total = Fraction(0)
    for j in range(min(k, m) + 1):
        shift = m - j + p
        denom = 1
        for i in range(shift + 1, shift + k + 4):
            denom *= i
        term = Fraction(
            math.comb(k, j) * math.comb(m - j + k + 1, k + 1) ** 2 * kfac, denom
        )
        total += -term if j % 2 else term
    return total * Fraction((p + 1) * (k + 1), m + 1)


@lru_cache(maxsize=64)
def _weight_table(k: int, n_in: int, n_out: int) -> np.ndarray:
    """Float table of w_k(p, m), p < n_out, m < n_in (computed exactly,
    rounded once)."""
    table = np.empty((n_out, n_in))
    for p in range(n_out):
        for m in range(n_in):
            table[p, m] = float(_basis_weight(k, p, m))
    table.setflags(write=False)
    return table


def berezin_iterate_eigenvalues(
    lam: EigenvalueSequence, k: int, n_out: int, tol: float = 0.0
) -> EigenvalueSequence:
    """Eigenvalues lambda_p(T_{B_k(S)}) for p < n_out.

    The window is treated as an infinite sequence extended by its last
    value; with that convention the result is exact (per-basis-element
    moment integrals in closed form, constant tail folded in through the
    row-sum identity), so ``tol`` is accepted for interface symmetry but
    unused.
    """
    if k < 0:
        raise DomainError(f"transform order must be >= 0, got {k}")
    if n_out < 1:
        raise DomainError("need n_out >= 1 output eigenvalues")
    vals = lam.values
    last = vals[-1]
    w = _weight_table(k, len(lam), n_out)
    out = last + w @ (vals - last)
    if lam.is_real:
        out = out.real.astype(complex)
    return EigenvalueSequence(out)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-k deviation of the re-quantised operator from the original."""

    k_values: np.ndarray
    sup_deviation: np.ndarray
    iterate_sup_norm: np.ndarray
    n_window: int

    @property
    def nonincreasing_fraction(self) -> float:
        d = self.sup_deviation
        if d.size < 2:
            return 1.0
        return float(np.mean(np.diff(d) <= 1e-15))

    @property
    def final_over_initial(self) -> float:
        if self.sup_deviation[0] == 0.0:
            return 0.0 if self.sup_deviation[-1] == 0.0 else math.inf
        return float(self.sup_deviation[-1] / self.sup_deviation[0])

    def as_dict(self) -> dict:
        return {
            "k_values": [int(k) for k in self.k_values],
            "sup_deviation": [float(v) for v in self.sup_deviation],
            "iterate_sup_norm": [float(v) for v in self.iterate_sup_norm],
            "n_window": self.n_window,
            "nonincreasing_fraction": self.nonincreasing_fraction,
            "final_over_initial": self.final_over_initial,
        }


def convergence_report(
    lam: EigenvalueSequence, k_max: int, n_out: int
) -> ConvergenceReport:
    """Sweep k = 0..k_max of the re-quantisation deviation
    sup_{p < n_out} |lambda_p(T_{B_k(S)}) - lambda_p| and the iterate's
    sup norm."""
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    if len(lam) < n_out:
        target = _extended_values(lam, n_out, strict=False, what="convergence report")[0]
    else:
        target = lam.values[:n_out]
    deviations = []
    sup_norms = []
    ks = np.arange(k_max + 1)
    for k in ks:
        it = berezin_iterate_eigenvalues(lam, int(k), n_out)
        deviations.append(float(np.max(np.abs(it.values - target))))
        sup_norms.append(float(np.max(np.abs(it.values))))
    return ConvergenceReport(
        k_values=ks,
        sup_deviation=np.asarray(deviations),
        iterate_sup_norm=np.asarray(sup_norms),
        n_window=n_out,
    )


# -- identity checks -------------------------------------------------------


@dataclass(frozen=True)
class ResidualTable:
    """Point-wise comparison of two evaluations of the same quantity."""

    radii: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.lhs - self.rhs)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    def as_dict(self) -> dict:
        return {
            "radii": [float(r) for r in self.radii],
            "lhs": [complex(v).real if abs(complex(v).imag) == 0 else str(v) for v in self.lhs],
            "rhs": [complex(v).real if abs(complex(v).imag) == 0 else str(v) for v in self.rhs],
            "residuals": [float(v) for v in self.residuals],
            "max_residual": self.max_residual,
        }


def laplacian_identity_check(
    lam: EigenvalueSequence,
    k: int,
    sample_radii,
    tol: float = 1e-12,
    strict_window: bool = False,
) -> ResidualTable:
    """Residuals of the ladder identity: the invariant Laplacian of
    B_k(S) against (k+1)(k+2) (B_k(S) - B_{k+1}(S)) at the sample radii,
    with the left side from analytic series differentiation."""
    radii = np.asarray(sample_radii, dtype=float)
    prof_k = berezin_of_radial_operator(lam, k, tol, strict_window)
    prof_k1 = berezin_of_radial_operator(lam, k + 1, tol, strict_window)
    lhs = prof_k.invariant_laplacian(radii)
    rhs = (k + 1) * (k + 2) * (prof_k.value(radii) - prof_k1.value(radii))
    return ResidualTable(radii=radii, lhs=np.atleast_1d(lhs), rhs=np.atleast_1d(rhs))


def commutativity_check(
    symbol: RadialSymbol,
    j: int,
    k: int,
    sample_radii,
    config: QuadratureConfig = QuadratureConfig(abs_tol=1e-9),
) -> ResidualTable:
    """Residuals of B_k(B_j(b)) - B_j(B_k(b)) at the sample radii.

    Each inner transform is tabulated on a radial grid and interpolated,
    then the outer transform integrates the interpolant, so the achieved
    accuracy is the nested-quadrature level (~1e-4), not machine
    precision.
    """
    if j == k:
        raise DomainError("commutativity check needs two distinct orders")
    radii = np.asarray(sample_radii, dtype=float)
    inner_j = tabulate_symbol_transform(symbol, j, config)
    inner_k = tabulate_symbol_transform(symbol, k, config)
    lhs = np.array(
        [berezin_of_radial_symbol(inner_j, k, float(r), config) for r in radii]
    )
    rhs = np.array(
        [berezin_of_radial_symbol(inner_k, j, float(r), config) for r in radii]
    )
    return ResidualTable(radii=radii, lhs=lhs, rhs=rhs)
