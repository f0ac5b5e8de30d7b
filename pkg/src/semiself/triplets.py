"""Levy-Khintchine triplets and cumulant evaluation.

The cumulant of a triplet ``(A, nu, gamma)`` at ``z`` is

    -<z, A z>/2 + i <gamma, z> + integral (e^{i<z,x>} - 1 - i<z,x>/(1+|x|^2)) nu(dx)

with the centering function fixed to ``x / (1 + |x|^2)`` throughout.
Cumulants are always computed by summation / quadrature, never as a logarithm
of a characteristic function, so values are branch-free by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import measures as ms
from .errors import InvalidTripletError

TOL_PSD = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def require(self):
        if not self.ok:
            raise InvalidTripletError("; ".join(self.violations))


@dataclass(frozen=True)
class LevyTriplet:
    """Gaussian matrix, Levy measure and drift of an infinitely divisible law."""

    gauss: np.ndarray
    levy: ms.LevyMeasure
    drift: np.ndarray

    def __post_init__(self):
        drift = np.atleast_1d(np.asarray(self.drift, dtype=float))
        gauss = np.asarray(self.gauss, dtype=float)
        if gauss.ndim == 0:
            gauss = gauss.reshape(1, 1)
        if gauss.shape != (drift.shape[0], drift.shape[0]):
            raise ValueError("gauss must be d x d matching the drift dimension")
        if self.levy.components and self.levy.dim != drift.shape[0]:
            raise ValueError("measure dimension mismatch")
        gauss.setflags(write=False)
        drift.setflags(write=False)
        object.__setattr__(self, "gauss", gauss)
        object.__setattr__(self, "drift", drift)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]


def gaussian(variance, drift=None) -> LevyTriplet:
    """Pure Gaussian triplet; ``variance`` is the matrix A (scalar ok in d=1)."""
    A = np.atleast_2d(np.asarray(variance, dtype=float))
    d = A.shape[0]
    return LevyTriplet(A, ms.EMPTY, np.zeros(d) if drift is None else drift)


def compound_poisson(points, weights, drift=None) -> LevyTriplet:
    """Finite-activity triplet with atomic Levy measure."""
    atoms = ms.Atoms(points, weights)
    d = atoms.dim
    return LevyTriplet(np.zeros((d, d)), ms.LevyMeasure((atoms,)),
                       np.zeros(d) if drift is None else drift)


def poisson_unit(rate=1.0) -> LevyTriplet:
    """Compound Poisson at the single jump 1 in d=1 with cumulant
    ``rate * (e^{iz} - 1)`` (drift chosen to cancel the centering term)."""
    return compound_poisson([[1.0]], [rate], drift=[rate * 0.5])


def validate(triplet: LevyTriplet, tol_psd: float = TOL_PSD) -> ValidationReport:
    """Check symmetry / positive semidefiniteness of A, absence of mass at the
    origin and finiteness of ``integral (|x|^2 ^ 1) nu``."""
    violations = []
    A = triplet.gauss
    if not np.all(np.isfinite(A)):
        violations.append("non-finite gaussian matrix")
    elif not np.allclose(A, A.T, atol=1e-12):
        violations.append("gaussian matrix not symmetric")
    else:
        lam = np.linalg.eigvalsh(0.5 * (A + A.T))
        if lam.size and lam.min() < -tol_psd:
            violations.append("gaussian matrix not nonnegative definite")
    if not np.all(np.isfinite(triplet.drift)):
        violations.append("non-finite drift")
    for comp in triplet.levy.components:
        violations.extend(ms.component_violations(comp))
    if not violations and triplet.levy.components:
        try:
            v = ms.square_one_integral(triplet.levy)
        except Exception as exc:  # divergent enumeration
            violations.append(f"integral of |x|^2 ^ 1 diverges ({exc})")
        else:
            if not np.isfinite(v):
                violations.append("integral of |x|^2 ^ 1 diverges")
    return ValidationReport(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class CumulantGrid:
    """Cumulant values with truncation-error bounds on a grid of arguments."""

    grid: np.ndarray          # (m, d)
    values: np.ndarray        # (m,) complex
    err_bound: np.ndarray     # (m,)

    def max_err(self) -> float:
        return float(np.max(self.err_bound)) if self.err_bound.size else 0.0


def _as_grid(z, dim) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        z = z.reshape(1, 1)
    elif z.ndim == 1:
        z = z[None, :] if z.shape[0] == dim and dim > 1 else z[:, None]
    if z.shape[1] != dim:
        raise ValueError(f"grid dimension {z.shape[1]} != triplet dimension {dim}")
    return z


# beyond this phase magnitude, double-precision rounding of <z, x> puts
# O(|u| * eps) garbage into the phase; reduce mod 2 pi exactly instead
PHASE_SAFE = 1e6

_TWO_PI_STR = ("6.28318530717958647692528676655900576839433879875021164194988918"
               "4615632812572417997256069650684234135964296173026564613294187689"
               "2191011644634507188162569622349005682054038770422111192892458979")


def _reduced_phases(u: np.ndarray, zbase: np.ndarray, lattice,
                    arg_pow=None, cache=None) -> np.ndarray:
    """Replace entries of the phase matrix ``u[i, j] ~ <z_j, x_i>`` that are
    too large for double precision with ``beta_j * scale * base**k_i mod 2 pi``
    computed in high-precision decimal arithmetic.

    ``arg_pow = (pbase, power)`` expresses an exact argument scale
    ``pbase**power``, so pre-scaled grids never round the phase away.
    """
    import decimal

    comp, ks = lattice
    rows, cols = np.nonzero(np.abs(u) > PHASE_SAFE)
    if rows.size == 0:
        return u
    beta = comp.anchor * (zbase @ comp.direction)
    kmax = int(np.max(ks[rows]))
    prec = 60 + max(int(kmax * math.log10(comp.base)) + 1, 0)
    if arg_pow is not None:
        prec += int(abs(arg_pow[1]) * math.log10(max(arg_pow[0], 2.0))) + 1
    # when the argument scale shares the lattice base, the phase depends on
    # the grid column and the combined exponent only, so results are cachable
    # across the terms of a scaled series
    fold = arg_pow is not None and arg_pow[0] == comp.base
    with decimal.localcontext() as ctx:
        ctx.prec = prec
        two_pi = decimal.Decimal(_TWO_PI_STR)
        base = decimal.Decimal(comp.base)
        scale = (decimal.Decimal(arg_pow[0]) ** int(arg_pow[1])
                 if arg_pow is not None and not fold else decimal.Decimal(1))
        powers: dict = {}
        out = u.copy()
        for i, j in zip(rows, cols):
            k = int(ks[i])
            e = k + int(arg_pow[1]) if fold else k
            if cache is not None and fold:
                hit = cache.get((id(comp), j, e))
                if hit is not None:
                    out[i, j] = hit
                    continue
            pk = powers.get(e)
            if pk is None:
                pk = base ** e
                powers[e] = pk
            val = float(
                (decimal.Decimal(float(beta[j])) * scale * pk) % two_pi)
            out[i, j] = val
            if cache is not None and fold:
                cache[(id(comp), j, e)] = val
    return out


def centered_exp_integrand(zgrid: np.ndarray, points: np.ndarray,
                           lattice=None, arg_pow=None,
                           zbase=None, phase_cache=None) -> np.ndarray:
    """``g(z, x) = e^{i<z,x>} - 1 - i<z,x>/(1+|x|^2)`` as an (n_points, n_z) array.

    When the grid is a pre-scaled copy ``zgrid = pbase**power * zbase``, pass
    ``arg_pow=(pbase, power)`` and the unscaled ``zbase`` so huge lattice
    phases are reduced exactly."""
    with np.errstate(over="ignore"):
        u = points @ zgrid.T                      # (n, m)
        n2 = np.sum(points * points, axis=1)      # (n,)
        u_osc = u
        if lattice is not None and np.any(np.abs(u) > PHASE_SAFE):
            u_osc = _reduced_phases(u, zbase if zbase is not None else zgrid,
                                    lattice, arg_pow, cache=phase_cache)
        return np.exp(1j * u_osc) - 1.0 - 1j * u / (1.0 + n2[:, None])


def measure_cumulant(levy: ms.LevyMeasure, zgrid: np.ndarray, tol=1e-12,
                     arg_pow=None, zbase=None):
    """Jump part of the cumulant on a grid, with a truncation-error bound."""
    m = zgrid.shape[0]
    if levy.is_zero() or m == 0:
        return np.zeros(m, dtype=complex), 0.0
    zmax = float(np.max(np.linalg.norm(zgrid, axis=1))) or 1.0

    def f(points, lattice=None):
        return centered_exp_integrand(zgrid, points, lattice,
                                      arg_pow=arg_pow, zbase=zbase)

    vals, err = ms.sum_over_measure(
        levy, f,
        small_c=zmax * zmax / 2.0 + zmax, small_p=2,
        large_bound=lambda R: 2.0 + zmax / 2.0,
        tol=tol, out_shape=(m,), dtype=complex)
    return vals, err


def cumulant(triplet: LevyTriplet, z, tol=1e-12, arg_pow=None) -> CumulantGrid:
    """Cumulant function on a grid of arguments ``z`` (shape (m, d) or (d,)).

    ``arg_pow = (base, power)`` evaluates at ``base**power * z`` with the
    scale applied exactly in the lattice phase reduction, so arguments like
    ``z / b`` lose no precision against huge jump radii."""
    zbase = _as_grid(z, triplet.dim)
    zgrid = zbase * arg_pow[0] ** arg_pow[1] if arg_pow is not None else zbase
    quad_part = -0.5 * np.einsum("ij,jk,ik->i", zgrid, triplet.gauss, zgrid)
    drift_part = 1j * (zgrid @ triplet.drift)
    jump, err = measure_cumulant(triplet.levy, zgrid, tol=tol,
                                 arg_pow=arg_pow, zbase=zbase)
    values = quad_part + drift_part + jump
    return CumulantGrid(grid=zgrid, values=values,
                        err_bound=np.full(zgrid.shape[0], err))


def cumulant_at(triplet: LevyTriplet, z, tol=1e-12, arg_pow=None) -> complex:
    """Cumulant at a single argument."""
    return complex(cumulant(triplet, np.atleast_1d(z), tol=tol,
                            arg_pow=arg_pow).values[0])


# ---------------------------------------------------------------------------
# triplet arithmetic


def convolve(a: LevyTriplet, b: LevyTriplet) -> LevyTriplet:
    return LevyTriplet(a.gauss + b.gauss,
                       ms.LevyMeasure(a.levy.components + b.levy.components),
                       a.drift + b.drift)


def power(triplet: LevyTriplet, t: float) -> LevyTriplet:
    """Triplet of the t-th convolution power (law of ``X_t``)."""
    comps = []
    for c in triplet.levy.components:
        if isinstance(c, ms.Atoms):
            comps.append(ms.Atoms(c.points, t * c.weights))
        elif isinstance(c, ms.ScaleLattice):
            comps.append(ms.ScaleLattice(
                c.direction, c.base,
                tuple(ms.Segment(t * s.w, s.r, s.kmin, s.kmax, s.power)
                      for s in c.segments),
                c.anchor))
        elif isinstance(c, ms.RadialDensity):
            h = c.density
            comps.append(ms.RadialDensity(
                c.direction, lambda s, _h=h, _t=t: _t * np.asarray(_h(s)),
                name=c.name, params={**c.params, "time_scale": t}))
        else:
            raise TypeError(type(c))
    return LevyTriplet(t * triplet.gauss, ms.LevyMeasure(tuple(comps)),
                       t * triplet.drift)


def scale(triplet: LevyTriplet, s: float, tol=1e-12) -> LevyTriplet:
    """Triplet of ``s X`` for ``s > 0``: Gaussian scales by ``s^2``, the
    measure is pushed to ``s x`` and the drift picks up the centering shift."""
    if s <= 0.0:
        raise ValueError("scale factor must be positive")
    comps = []
    for c in triplet.levy.components:
        if isinstance(c, ms.Atoms):
            comps.append(ms.Atoms(s * c.points, c.weights))
        elif isinstance(c, ms.ScaleLattice):
            comps.append(ms.ScaleLattice(c.direction, c.base, c.segments,
                                         s * c.anchor))
        elif isinstance(c, ms.RadialDensity):
            h = c.density
            comps.append(ms.RadialDensity(
                c.direction,
                lambda u, _h=h, _s=s: np.asarray(_h(np.asarray(u) / _s)) / _s,
                name=c.name, params={**c.params, "space_scale": s}))
        else:
            raise TypeError(type(c))

    def shift_integrand(points, lattice=None):
        n2 = np.sum(points * points, axis=1)
        return s * points * (1.0 / (1.0 + s * s * n2) - 1.0 / (1.0 + n2))[:, None]

    shift = np.zeros(triplet.dim)
    if triplet.levy.components:
        c_small = s * abs(1.0 - s * s)
        shift, _ = ms.sum_over_measure(
            triplet.levy, shift_integrand,
            small_c=max(c_small, 1e-30), small_p=3,
            large_bound=lambda R: (s + 1.0 / s) / R,
            tol=tol, out_shape=(triplet.dim,), dtype=float)
    return LevyTriplet(s * s * triplet.gauss, ms.LevyMeasure(tuple(comps)),
                       s * triplet.drift + shift)
