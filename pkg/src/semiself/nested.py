"""Iterates of the span-b map and the nested membership ladder.

The (m+1)-fold iterate has cumulant ``sum_k C(k+m, m) C_mu(b^{-k} z)``; the
binomial weights arise because the iterate is a stochastic time change by the
inverse of the piecewise-linear ``ramp_integral``.  Membership at level m is
decided by peeling off inverse factors m+1 times and requiring every factor's
measure to stay nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mapping as mp
from . import measures as ms
from . import triplets as tp
from .errors import DomainError, UnsupportedComponentError

M_MAX = 8


def _check_level(m: int) -> int:
    if int(m) != m or m < 0:
        raise ValueError("level m must be a nonnegative integer")
    if m > M_MAX:
        raise ValueError(f"level m capped at {M_MAX}")
    return int(m)


# ---------------------------------------------------------------------------
# the time-change function and its inverse


def ramp_integral(m: int, u) -> np.ndarray:
    """``f(u) = integral_0^u C([v]+m, m) dv``: piecewise linear with slope
    C(k+m, m) on [k, k+1) and integer values f(k) = C(k+m, m+1)."""
    m = _check_level(m)
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0):
        raise ValueError("argument must be nonnegative")
    k = np.floor(u).astype(int)
    base = np.vectorize(lambda kk: float(math.comb(kk + m, m + 1)))(k)
    slope = np.vectorize(lambda kk: float(math.comb(kk + m, m)))(k)
    out = base + (u - k) * slope
    return out if out.ndim else float(out)


def ramp_integral_inverse(m: int, y) -> np.ndarray:
    """Inverse of :func:`ramp_integral`: locate the integer cell by binary
    search on the closed-form values, then invert the linear piece."""
    m = _check_level(m)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise ValueError("argument must be nonnegative")

    def inv_one(yy):
        lo, hi = 0, 1
        while math.comb(hi + m, m + 1) <= yy:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if math.comb(mid + m, m + 1) <= yy:
                lo = mid
            else:
                hi = mid
        return lo + (yy - math.comb(lo + m, m + 1)) / math.comb(lo + m, m)

    out = np.vectorize(inv_one)(y)
    return out if out.ndim else float(out)


def binom_identity_check(n: int, k: int) -> bool:
    """Exact hockey-stick identity ``sum_{j=0}^{n-k} C(n-j, k) = C(n+1, k+1)``."""
    if not 0 <= k <= n:
        raise ValueError("needs 0 <= k <= n")
    return sum(math.comb(n - j, k) for j in range(n - k + 1)) == math.comb(n + 1, k + 1)


# ---------------------------------------------------------------------------
# iterated forward map


def iterated_cumulant(mu: tp.LevyTriplet, b: float, m: int, z,
                      tol: float = 1e-10) -> tp.CumulantGrid:
    """Cumulant of the (m+1)-fold mapped law; requires a finite (m+1)-th
    log-moment (the exact domain of the iterate)."""
    m = _check_level(m)
    return mp.forward_cumulant(mu, b, z, m=m, tol=tol)


def iterated_forward_triplet(mu: tp.LevyTriplet, b: float, m: int) -> tp.LevyTriplet:
    """Exact triplet of the (m+1)-fold mapped law (repeated pushforward)."""
    m = _check_level(m)
    if mu.levy.components and not math.isfinite(ms.log_moment(mu.levy, m + 1)):
        raise DomainError(f"log^{m + 1}-moment is infinite")
    out = mu
    for _ in range(m + 1):
        out = mp.forward_triplet(out, b)
    return out


@dataclass(frozen=True)
class NestedCertificate:
    """Membership ladder: ``verdicts[j]`` decides level j, which needs the
    first j+1 inverse factors to all have nonnegative measures."""

    b: float
    m: int
    verdicts: tuple           # bool per level 0..m
    factors: tuple            # peeled factor triplets rho^(1)..rho^(m+1)
    first_violation: tuple | None   # (level, lattice index) or None

    @property
    def verdict(self) -> bool:
        return self.verdicts[-1]

    def to_dict(self) -> dict:
        from . import specio
        return {
            "b": self.b, "m": self.m,
            "verdicts": [bool(v) for v in self.verdicts],
            "first_violation": list(self.first_violation)
            if self.first_violation else None,
            "factors": [specio.triplet_to_dict(f) for f in self.factors],
        }


def is_nested_member(mu: tp.LevyTriplet, b: float, m: int) -> NestedCertificate:
    """Decide membership in the nested classes up to level m by iterated
    exact differencing of the measure."""
    m = _check_level(m)
    tp.validate(mu).require()
    for comp in mu.levy.components:
        if isinstance(comp, ms.RadialDensity):
            raise UnsupportedComponentError(
                "membership needs atoms or scale lattices")
    factors = []
    verdicts = []
    first_violation = None
    current = mu
    ok_so_far = True
    for level in range(m + 1):
        inv = mp.inverse_factor(current, b)
        factors.append(inv.rho)
        if ok_so_far and not inv.nonnegative:
            ok_so_far = False
            first_violation = (level, inv.violations[0][1])
        verdicts.append(ok_so_far)
        if not ok_so_far:
            # deeper factors of a signed measure are not meaningful
            break
        current = inv.rho
    while len(verdicts) < m + 1:
        verdicts.append(False)
    return NestedCertificate(b=float(b), m=m, verdicts=tuple(verdicts),
                             factors=tuple(factors),
                             first_violation=first_violation)


# ---------------------------------------------------------------------------
# semi-stable laws on a scale lattice


@dataclass(frozen=True)
class SemiStableSpec:
    """Scale-lattice law with exact b-scaling: mass ``w b^{-alpha k}`` at
    radius ``r0 b^k`` for every integer k along ``direction``."""

    b: float
    alpha: float
    direction: tuple = (1.0,)
    w: float = 1.0
    r0: float = 1.0

    def __post_init__(self):
        mp.check_span(self.b)
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("index alpha must lie strictly in (0, 2)")
        if self.w <= 0.0 or self.r0 <= 0.0:
            raise ValueError("w and r0 must be positive")


def semi_stable_triplet(spec: SemiStableSpec, tol: float = 1e-12) -> tp.LevyTriplet:
    """Triplet whose measure satisfies ``nu(bB) = b^{-alpha} nu(B)`` exactly.

    For alpha != 1 the drift is set so the law is strictly semi-stable
    (``a C(z) = C(bz)`` with a = b^alpha and no extra linear term); at
    alpha = 1 no drift achieves strictness, so the drift is left at zero and
    the linear term is reported by the fitting check instead.
    """
    b, a = spec.b, spec.b ** spec.alpha
    lat = ms.ScaleLattice(
        direction=np.asarray(spec.direction, dtype=float),
        base=b,
        segments=(ms.Segment(w=spec.w, r=b ** (-spec.alpha)),),
        anchor=spec.r0)
    levy = ms.LevyMeasure((lat,))
    d = lat.dim
    gamma = np.zeros(d)
    if abs(spec.alpha - 1.0) > 1e-12:
        # h = integral b x (1/(1+|bx|^2) - 1/(1+|x|^2)) nu(dx) makes
        # C(bz) - a C(z) = i<z, gamma (b - a) + h> vanish
        def integrand(points, lattice=None):
            n2 = np.sum(points * points, axis=1)
            return b * points * (1.0 / (1.0 + b * b * n2) - 1.0 / (1.0 + n2))[:, None]

        h, _ = ms.sum_over_measure(
            levy, integrand,
            small_c=b * abs(1.0 - b * b), small_p=3,
            large_bound=lambda R: (b + 1.0 / b) / R,
            tol=tol, out_shape=(d,), dtype=float)
        gamma = h / (a - b)
    return tp.LevyTriplet(np.zeros((d, d)), levy, gamma)


@dataclass(frozen=True)
class SemiStableFit:
    """Fitted scaling ``a`` and linear term ``c`` in
    ``a C(z) = C(bz) + i <c, z>`` plus the residual of the fit."""

    b: float
    a: float
    c: np.ndarray
    max_residual: float
    tol: float

    @property
    def verdict(self) -> bool:
        return self.max_residual < self.tol

    @property
    def alpha(self) -> float:
        return math.log(self.a) / math.log(self.b)


def is_semi_stable(mu: tp.LevyTriplet, b: float, grid=None,
                   tol: float = 1e-8) -> SemiStableFit:
    """Fit the scaling relation on a grid: ``a`` from the real parts at the
    reference point with largest |Re C|, then ``c`` by least squares on the
    imaginary parts, then the verdict from the max residual."""
    b = mp.check_span(b)
    zgrid = tp._as_grid(grid if grid is not None else
                        mp.default_grid(mu.dim), mu.dim)
    c1 = tp.cumulant(mu, zgrid, tol=tol / 100.0)
    c2 = tp.cumulant(mu, zgrid, tol=tol / 100.0, arg_pow=(b, 1))
    re = np.abs(c1.values.real)
    i0 = int(np.argmax(re))
    if re[i0] < 1e-12:
        raise ValueError("degenerate law: Re C vanishes on the whole grid")
    a = float(c2.values.real[i0] / c1.values.real[i0])
    # a Im C(z) - Im C(bz) = <c, z>
    rhs = a * c1.values.imag - c2.values.imag
    cvec, *_ = np.linalg.lstsq(zgrid, rhs, rcond=None)
    res = np.abs(a * c1.values - c2.values - 1j * (zgrid @ cvec))
    return SemiStableFit(b=b, a=a, c=cvec, max_residual=float(np.max(res)),
                         tol=tol)
