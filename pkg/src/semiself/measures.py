"""Levy measures assembled from atoms, geometric scale lattices and radial densities.

A measure is a finite list of components:

* ``Atoms`` -- finitely many point masses.
* ``ScaleLattice`` -- mass on the geometric radius lattice ``anchor * base**k``
  along a single direction, with the mass law stored symbolically as
  piecewise-geometric segments ``m(k) = w * r**k * k**(-power)``.  Keeping the
  law symbolic makes rescaling by ``base`` and differencing exact
  integer-index operations.
* ``RadialDensity`` -- a density ``h(s)`` on ``(0, inf)`` along one direction,
  evaluated by adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import InvalidTripletError, ToleranceError, UnsupportedComponentError

NEG_INF = float("-inf")
POS_INF = float("inf")

_ENUM_CAP = 200_000
_DIR_DECIMALS = 9


def unit_direction(v) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = float(np.linalg.norm(v))
    if not np.isfinite(n) or n <= 0.0:
        raise ValueError("direction must be a nonzero finite vector")
    u = v / n
    u.setflags(write=False)
    return u


def _frozen_array(a, dtype=float, ndim=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    if ndim is not None:
        arr = np.atleast_1d(arr)
        while arr.ndim < ndim:
            arr = arr[None, :]
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Atoms:
    """Finitely many point masses ``weights[i]`` at ``points[i]``.

    Negative weights are representable (they appear in factorization
    residues) but are flagged by :func:`component_violations`.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pts.shape[0] != w.shape[0]:
            raise ValueError("points and weights length mismatch")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Segment:
    """Mass law ``m(k) = w * r**k / k**power`` on integer indices
    ``kmin <= k <= kmax`` (ends may be infinite)."""

    w: float
    r: float
    kmin: float = NEG_INF
    kmax: float = POS_INF
    power: int = 0

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError("segment ratio must be positive")
        if self.kmin > self.kmax:
            raise ValueError("empty segment range")
        if self.power and (self.kmin == NEG_INF or self.kmin < 1):
            raise ValueError("power segments require kmin >= 1")

    def mass(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        inside = (k >= self.kmin) & (k <= self.kmax)
        out = np.where(inside, self.w * np.exp(k * math.log(self.r)), 0.0)
        if self.power:
            out = np.where(inside, out * np.where(k > 0, k, 1.0) ** (-self.power), out)
        return out


@dataclass(frozen=True)
class ScaleLattice:
    """Mass on radii ``anchor * base**k`` along ``direction``."""

    direction: np.ndarray
    base: float
    segments: tuple
    anchor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "direction", unit_direction(self.direction))
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.base <= 1.0 + 1e-9:
            raise ValueError("lattice base must exceed 1")
        if self.anchor <= 0.0:
            raise ValueError("lattice anchor must be positive")

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def radius(self, k) -> np.ndarray:
        return self.anchor * np.exp(np.asarray(k, dtype=float) * math.log(self.base))

    def mass(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return sum((seg.mass(k) for seg in self.segments), np.zeros_like(k))


@dataclass(frozen=True)
class RadialDensity:
    """Density ``h(s)`` on ``(0, inf)`` along ``direction``.

    ``density`` must accept numpy arrays.  ``name``/``params`` carry the
    serializable description when the density came from the JSON schema.
    """

    direction: np.ndarray
    density: Callable
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "direction", unit_direction(self.direction))

    @property
    def dim(self) -> int:
        return self.direction.shape[0]


Component = object  # Atoms | ScaleLattice | RadialDensity


@dataclass(frozen=True)
class LevyMeasure:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        dims = {c.dim for c in comps}
        if len(dims) > 1:
            raise ValueError("mixed component dimensions")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim if self.components else 0

    def is_zero(self) -> bool:
        return not self.components


EMPTY = LevyMeasure(())


# ---------------------------------------------------------------------------
# quadrature helpers


def _quad(fun, tol=1e-9):
    """Integrate ``fun`` over (0, inf), splitting at 1."""
    v1, e1 = integrate.quad(fun, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
    v2, e2 = integrate.quad(fun, 1.0, np.inf, epsabs=tol, epsrel=tol, limit=200)
    return v1 + v2, e1 + e2


def _quad_vec(fun, tol=1e-9):
    v1, e1 = integrate.quad_vec(fun, 0.0, 1.0, epsabs=tol, epsrel=tol)
    v2, e2 = integrate.quad_vec(lambda u: fun(1.0 / u) / u**2, 1e-12, 1.0,
                                epsabs=tol, epsrel=tol)
    return v1 + v2, e1 + e2


# ---------------------------------------------------------------------------
# lattice enumeration with analytic tail bounds


def _segment_window(lat: ScaleLattice, seg: Segment, small_c, small_p,
                    large_bound, tol):
    """Finite index window [klo, khi] for one segment plus tail bounds.

    ``small_c * |x|**small_p`` (small_p >= 2) bounds the integrand below
    radius 1; ``large_bound(R)`` bounds it at radius R >= 1 and may grow
    slowly with R.
    """
    b = lat.base
    logb = math.log(b)
    loga = math.log(lat.anchor)
    tol_part = max(tol, 1e-300) / 4.0

    # --- lower end
    if seg.kmin != NEG_INF:
        klo, tail_lo = int(seg.kmin), 0.0
    else:
        q = seg.r * b * b
        if q <= 1.0:
            raise InvalidTripletError("lattice mass diverges near the origin")
        # tail_{k<=K} m(k)|x_k|^2 <= w * anchor^2 * q^(K+1)/(q-1); the extra
        # |x|^(small_p-2) factor is bounded by R_K^(small_p-2).
        k_unit = math.floor(-loga / logb)  # radius <= 1 from here down
        lw = math.log(seg.w) + 2.0 * loga - math.log(q - 1.0) + math.log(max(small_c, 1e-300))
        slope = math.log(q) + (small_p - 2) * logb

        def bound_log(K):
            return lw + (K + 1) * math.log(q) + (small_p - 2) * (loga + K * logb)

        K = min(k_unit, int(seg.kmax) if seg.kmax != POS_INF else k_unit)
        need = math.log(tol_part)
        if bound_log(K) > need:
            K = K - int(math.ceil((bound_log(K) - need) / slope)) - 1
        klo, tail_lo = K + 1, math.exp(min(bound_log(K), 300.0))

    # --- upper end
    if seg.kmax != POS_INF:
        khi, tail_hi = int(seg.kmax), 0.0
    else:
        k = max(klo, math.floor(-loga / logb))
        prev = None
        ratio_hits = 0
        tail_hi = None
        while k - klo < _ENUM_CAP:
            if loga + k * logb > 700.0:
                # radii beyond double range; only slowly decaying power tails
                # get here, and their remainder goes to the error budget
                env_cap = float(large_bound(math.exp(700.0)))
                flat_env = env_cap <= float(large_bound(math.exp(350.0))) * \
                    (1.0 + 1e-9)
                p, kk = seg.power, float(k)
                if seg.r != 1.0 or p <= (1 if flat_env else 2):
                    raise ToleranceError("lattice tail bound did not converge")
                if flat_env:
                    tail_hi = env_cap * seg.w * kk ** (1 - p) / (p - 1)
                else:
                    # envelope grows at most linearly in log radius
                    scale = max(1.0, (loga + kk * logb) / 700.0)
                    tail_hi = env_cap * seg.w * scale * (
                        kk ** (1 - p) / (p - 1)
                        + logb / 700.0 * kk ** (2 - p) / (p - 2))
                khi = k - 1
                return klo, khi, tail_lo + tail_hi
            R = lat.radius(k)
            env = small_c * R**small_p if R < 1.0 else float(large_bound(R))
            term = float(seg.mass(np.array([k]))[0]) * env
            if prev is not None and prev > 0:
                ratio = term / prev
                ratio_hits = ratio_hits + 1 if ratio < 0.95 else 0
                if term < tol_part / 8.0 and ratio_hits >= 3:
                    rho = min(max(ratio, 1e-12), 0.95)
                    tail_hi = term * rho / (1.0 - rho)
                    break
                if term < tol_part / 8.0 and 0.95 <= ratio < 1.0 and seg.power:
                    # algebraic decay: estimate exponent and integral tail
                    p_hat = -math.log(ratio) / math.log((k) / (k - 1.0)) if k > 1 else 0.0
                    if p_hat > 1.05:
                        tail_hi = term * k / (p_hat - 1.0)
                        if tail_hi < tol_part:
                            break
                        tail_hi = None
            prev = term
            k += 1
        else:
            raise ToleranceError("lattice enumeration cap exceeded")
        if tail_hi is None:
            raise ToleranceError("lattice tail bound did not converge")
        khi = k
    return klo, khi, tail_lo + tail_hi


def _enumerate_component(lat: ScaleLattice, small_c, small_p, large_bound, tol):
    """All lattice points needed to evaluate an integrand within ``tol``."""
    radii, masses, indices = [], [], []
    err = 0.0
    for seg in lat.segments:
        klo, khi, tail = _segment_window(lat, seg, small_c, small_p, large_bound, tol)
        ks = np.arange(klo, khi + 1, dtype=float)
        radii.append(lat.radius(ks))
        masses.append(seg.mass(ks))
        indices.append(ks.astype(int))
        err += tail
    if not radii:
        return np.zeros(0), np.zeros(0), np.zeros(0, dtype=int), 0.0
    return (np.concatenate(radii), np.concatenate(masses),
            np.concatenate(indices), err)


def lattice_points(lat: ScaleLattice, mass_tol=1e-14):
    """Enumerate (points, masses) carrying all but ``mass_tol`` of the
    integral ``min(|x|^2, 1)`` -- a generic 'almost all of the measure' set."""
    r, m, _, err = _enumerate_component(lat, 1.0, 2, lambda R: 1.0, mass_tol)
    return r[:, None] * lat.direction[None, :], m, err


# ---------------------------------------------------------------------------
# generic integration against a measure


def sum_over_measure(levy: LevyMeasure, f, *, small_c, small_p, large_bound,
                     tol, out_shape=(), dtype=complex, quad_tol=None):
    """Evaluate ``integral f(x) nu(dx)`` with an error bound.

    ``f(points, lattice=None)`` maps an ``(n, d)`` array to ``(n,) + out_shape``;
    for lattice components it also receives ``lattice=(component, indices)``
    so it can reduce huge oscillatory phases exactly.
    ``small_c * |x|**small_p`` must dominate ``|f|`` for ``|x| <= 1``
    (``small_p >= 2``) and ``large_bound(R)`` for ``|x| = R >= 1``.
    """
    total = np.zeros(out_shape, dtype=dtype)
    err = 0.0
    qt = quad_tol if quad_tol is not None else max(tol, 1e-12)
    for comp in levy.components:
        if isinstance(comp, Atoms):
            vals = f(comp.points)
            total = total + np.tensordot(comp.weights, vals, axes=(0, 0))
        elif isinstance(comp, ScaleLattice):
            r, m, ks, tail = _enumerate_component(comp, small_c, small_p,
                                                  large_bound, tol)
            if r.size:
                pts = r[:, None] * comp.direction[None, :]
                vals = f(pts, lattice=(comp, ks))
                total = total + np.tensordot(m, vals, axes=(0, 0))
            err += tail
        elif isinstance(comp, RadialDensity):
            xi = comp.direction

            def integrand(s, _xi=xi, _h=comp.density):
                return np.asarray(_h(np.asarray([s]))[0], dtype=float) * \
                    f(np.asarray([s * _xi]))[0]

            v, e = _quad_vec(integrand, qt)
            total = total + v
            err += e
        else:
            raise UnsupportedComponentError(f"unknown component {type(comp)!r}")
    return total, err


# ---------------------------------------------------------------------------
# structural checks


def component_violations(comp) -> list:
    out = []
    if isinstance(comp, Atoms):
        radii = np.linalg.norm(comp.points, axis=1)
        if np.any(radii == 0.0):
            out.append("mass at origin")
        if np.any(comp.weights <= 0.0):
            out.append("nonpositive atom weight")
        if not np.all(np.isfinite(comp.points)) or not np.all(np.isfinite(comp.weights)):
            out.append("non-finite atom data")
    elif isinstance(comp, ScaleLattice):
        b = comp.base
        # signed segment pairs are fine as long as the summed law is >= 0
        ok, witness = segments_nonnegative(comp.segments)
        if not ok:
            out.append(f"negative lattice mass at index {witness}")
        for seg in comp.segments:
            if seg.kmax == POS_INF and not (seg.r < 1.0 or (seg.r == 1.0 and seg.power > 1)):
                out.append("total mass beyond radius 1 diverges")
            if seg.kmin == NEG_INF and seg.r * b * b <= 1.0 + 1e-12:
                out.append("integral of |x|^2 near 0 diverges")
    elif isinstance(comp, RadialDensity):
        s = np.geomspace(1e-6, 1e6, 61)
        h = np.asarray(comp.density(s), dtype=float)
        if np.any(h < -1e-12):
            out.append("negative radial density")
        try:
            v, _ = _quad(lambda t: float(comp.density(np.asarray([t]))[0]) * min(t * t, 1.0))
        except Exception:
            out.append("radial density quadrature failed")
        else:
            if not np.isfinite(v) or v > 1e12:
                out.append("integral of |x|^2 ^ 1 not finite (radial)")
    else:
        out.append(f"unknown component type {type(comp)!r}")
    return out


def square_one_integral(levy: LevyMeasure, tol=1e-10) -> float:
    """``integral (|x|^2 ^ 1) nu(dx)`` -- finite iff the measure is valid."""

    def f(pts, lattice=None):
        with np.errstate(over="ignore"):
            n2 = np.sum(pts * pts, axis=1)
        return np.minimum(n2, 1.0)

    v, _ = sum_over_measure(levy, f, small_c=1.0, small_p=2,
                            large_bound=lambda R: 1.0, tol=tol,
                            out_shape=(), dtype=float)
    return float(v)


# ---------------------------------------------------------------------------
# log-moments


def _lattice_log_moment(lat: ScaleLattice, p: int) -> float:
    b, logb, loga = lat.base, math.log(lat.base), math.log(lat.anchor)
    total = 0.0
    for seg in lat.segments:
        kc = -loga / logb  # radius 1 index
        kstart = max(math.floor(kc) + 1, seg.kmin)
        if kstart > seg.kmax:
            continue
        if seg.kmax == POS_INF:
            if seg.r > 1.0:
                return math.inf
            if seg.r == 1.0 and seg.power - p <= 1:
                return math.inf
        k = int(kstart)
        acc, prev = 0.0, None
        while True:
            if seg.kmax != POS_INF and k > seg.kmax:
                break
            term = float(seg.mass(np.array([k]))[0]) * (loga + k * logb) ** p
            acc += term
            if seg.kmax == POS_INF and prev is not None and term < 1e-17 * max(acc, 1e-300):
                break
            if seg.kmax == POS_INF and seg.r == 1.0 and k - kstart >= 10_000:
                # slowly decaying power tail: finish with the integral bound
                def f(x, _s=seg, _la=loga, _lb=logb, _p=p):
                    return _s.w * x ** (-_s.power) * (_la + x * _lb) ** _p

                tail, _ = integrate.quad(f, k + 0.5, math.inf, limit=200)
                acc += tail
                break
            if k - kstart > _ENUM_CAP:
                raise ToleranceError("log-moment summation cap exceeded")
            prev = term
            k += 1
        total += acc
    return total


def log_moment(levy: LevyMeasure, p: int = 1) -> float:
    """``integral_{|x|>1} (log|x|)**p nu(dx)``, or ``inf`` when divergent."""
    if p < 1 or int(p) != p:
        raise ValueError("log-moment order must be an integer >= 1")
    total = 0.0
    for comp in levy.components:
        if isinstance(comp, Atoms):
            radii = np.linalg.norm(comp.points, axis=1)
            sel = radii > 1.0
            total += float(np.sum(comp.weights[sel] * np.log(radii[sel]) ** p))
        elif isinstance(comp, ScaleLattice):
            v = _lattice_log_moment(comp, p)
            if math.isinf(v):
                return math.inf
            total += v
        elif isinstance(comp, RadialDensity):
            # substitute u = log(s); divergence shows up as a huge or failed quad
            def integrand(u, _h=comp.density, _p=p):
                s = math.exp(u)
                return float(_h(np.asarray([s]))[0]) * s * u**_p

            try:
                v, e = integrate.quad(integrand, 0.0, 60.0, limit=300)
                vtail, _ = integrate.quad(integrand, 60.0, 2000.0, limit=300)
            except Exception:
                return math.inf
            if not np.isfinite(v) or v + vtail > 1e10 or vtail > max(1e-6 * v, 1e-9):
                return math.inf
            total += v + vtail
        else:
            raise UnsupportedComponentError(f"unknown component {type(comp)!r}")
    return total


# ---------------------------------------------------------------------------
# polar decomposition (atoms / lattices only)


def polar_atoms(levy: LevyMeasure):
    """Group mass by direction, one spherical weight 1 per occupied direction.

    Returns a list of ``(direction, spherical_weight, radial)`` where
    ``radial`` is ``("atoms", radii, masses)`` or ``("lattice", lattice)``.
    """
    out = []
    buckets = {}
    for comp in levy.components:
        if isinstance(comp, Atoms):
            radii = np.linalg.norm(comp.points, axis=1)
            for x, w, r in zip(comp.points, comp.weights, radii):
                if r == 0.0:
                    raise InvalidTripletError("mass at origin")
                key = tuple(np.round(x / r, _DIR_DECIMALS))
                buckets.setdefault(key, []).append((r, w))
        elif isinstance(comp, ScaleLattice):
            out.append((comp.direction, 1.0, ("lattice", comp)))
        else:
            raise UnsupportedComponentError("polar decomposition needs atoms or lattices")
    for key, pairs in buckets.items():
        pairs.sort()
        radii = np.array([p[0] for p in pairs])
        masses = np.array([p[1] for p in pairs])
        out.append((np.array(key), 1.0, ("atoms", radii, masses)))
    return out


# ---------------------------------------------------------------------------
# exact lattice algebra used by the span-b mapping


@dataclass
class Family:
    """All mass of one measure lying on a single geometric skeleton:
    direction ``direction``, radii ``anchor * b**k``."""

    direction: np.ndarray
    base: float
    anchor: float
    segments: list


def _family_key(direction, frac):
    return (tuple(np.round(direction, _DIR_DECIMALS)), round(frac, 7))


def canonical_families(levy: LevyMeasure, b: float, tol=1e-9) -> dict:
    """Sort atoms and lattices into skeleton families for span ``b``.

    Lattice components must already use base ``b``; atoms are converted to
    single-point segments on the skeleton they fall on.
    """
    logb = math.log(b)
    fams: dict = {}

    def add(direction, anchor, seg):
        la = math.log(anchor) / logb
        shift = math.floor(la + tol)
        frac = la - shift
        if frac > 1.0 - tol:
            shift += 1
            frac -= 1.0
        a0 = math.exp(frac * logb)
        key = _family_key(direction, frac)
        fam = fams.setdefault(key, Family(np.asarray(direction), b, a0, []))
        fams[key] = fam
        fam.segments.append(Segment(
            w=seg.w * seg.r ** (-shift) if seg.r != 1.0 else seg.w,
            r=seg.r,
            kmin=seg.kmin + shift if seg.kmin != NEG_INF else NEG_INF,
            kmax=seg.kmax + shift if seg.kmax != POS_INF else POS_INF,
        ))

    for comp in levy.components:
        if isinstance(comp, Atoms):
            radii = np.linalg.norm(comp.points, axis=1)
            if np.any(radii == 0.0):
                raise InvalidTripletError("mass at origin")
            for x, w, r in zip(comp.points, comp.weights, radii):
                add(x / r, r, Segment(w=float(w), r=1.0, kmin=0, kmax=0))
        elif isinstance(comp, ScaleLattice):
            if abs(comp.base - b) > tol * b:
                raise UnsupportedComponentError(
                    "lattice base must match the mapping span for exact algebra")
            for seg in comp.segments:
                if seg.power:
                    raise UnsupportedComponentError(
                        "power-law lattice segments support cumulant-level maps only")
                add(comp.direction, comp.anchor, seg)
        else:
            raise UnsupportedComponentError(
                "triplet-level mapping needs atoms or scale lattices")
    return fams


def simplify_segments(segments: Sequence[Segment], drop_tol=1e-12) -> list:
    """Merge same-ratio segments over the common refinement of their ranges."""
    if not segments:
        return []
    bounds = set()
    for s in segments:
        if s.kmin != NEG_INF:
            bounds.add(s.kmin)
        if s.kmax != POS_INF:
            bounds.add(s.kmax + 1)
    cuts = [NEG_INF] + sorted(bounds) + [POS_INF]
    wmax = max(abs(s.w) for s in segments)
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        kmax = hi - 1 if hi != POS_INF else POS_INF
        if lo > kmax:
            continue
        by_r: dict = {}
        for s in segments:
            if s.kmin <= lo and s.kmax >= kmax:
                by_r[s.r] = by_r.get(s.r, 0.0) + s.w
        for r, w in sorted(by_r.items()):
            scale = abs(w)
            if r != 1.0 and lo != NEG_INF and kmax != POS_INF:
                scale = max(abs(w * r**lo), abs(w * r**kmax))
            elif r != 1.0 and lo != NEG_INF:
                scale = abs(w * r**lo)
            if scale > drop_tol * wmax:
                out.append(Segment(w=w, r=r, kmin=lo, kmax=kmax))
    return out


def difference_segments(segments: Sequence[Segment]) -> list:
    """Segments of ``nu - nu(b .)`` given the segments of ``nu`` (same family).

    ``nu(b .)`` has mass ``m(k+1)`` at index ``k``, i.e. each segment shifted
    down by one with weight multiplied by its ratio.
    """
    shifted = [Segment(w=-s.w * s.r, r=s.r,
                       kmin=s.kmin - 1 if s.kmin != NEG_INF else NEG_INF,
                       kmax=s.kmax - 1 if s.kmax != POS_INF else POS_INF)
               for s in segments]
    return simplify_segments(list(segments) + shifted)


def segments_nonnegative(segments: Sequence[Segment], window=96):
    """Decide ``m(k) >= 0`` for all integer k; returns (ok, witness_index).

    Checks an explicit window around every finite boundary plus sign of the
    asymptotically dominant term on each infinite side.
    """
    if not segments:
        return True, None
    finite = [s.kmin for s in segments if s.kmin != NEG_INF] + \
             [s.kmax for s in segments if s.kmax != POS_INF]
    lo = (min(finite) if finite else 0) - window
    hi = (max(finite) if finite else 0) + window
    ks = np.arange(lo, hi + 1, dtype=float)
    m = sum((s.mass(ks) for s in segments), np.zeros_like(ks))
    scale = max(float(np.max(np.abs(m))), 1e-300)
    bad = np.nonzero(m < -1e-10 * scale)[0]
    if bad.size:
        return False, int(ks[bad[0]])
    # infinite tails: dominant ratio wins
    for side in (-1, +1):
        live = [s for s in segments
                if (s.kmin == NEG_INF if side < 0 else s.kmax == POS_INF)]
        if not live:
            continue
        # as k -> -inf, smaller r dominates; as k -> +inf, larger r dominates
        dom = min(s.r for s in live) if side < 0 else max(s.r for s in live)
        wdom = sum(s.w for s in live if s.r == dom)
        if wdom < -1e-12:
            return False, lo - 1 if side < 0 else hi + 1
    return True, None


def segments_to_components(direction, b, anchor, segments) -> list:
    """Wrap a (possibly empty) segment list back into measure components."""
    segs = [s for s in segments if s.w != 0.0]
    if not segs:
        return []
    return [ScaleLattice(direction=direction, base=b,
                         segments=tuple(segs), anchor=anchor)]
