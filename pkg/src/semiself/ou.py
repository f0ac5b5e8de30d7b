"""Discrete-kick Ornstein-Uhlenbeck type processes.

The process is piecewise constant with epochs at k/c; at each epoch the state
contracts by 1/b after absorbing one noise increment:

    Z_k = (Z_{k-1} + dX_k) / b,     dX_k iid distributed as X_{1/c}.

With a finite log-moment on the noise, Z_k converges in law to the limit with
cumulant ``(1/c) sum_{k>=0} C_{X_1}(b^{-k-1} z)``; without it the process
does not settle, which the divergence diagnostic detects through a one-step
characteristic-function bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mapping as mp
from . import measures as ms
from . import sampling as sp
from . import triplets as tp
from .errors import DomainError, ToleranceError

DEFAULT_N = 100_000


@dataclass(frozen=True)
class OUConfig:
    """Contraction span b > 1, epoch rate c > 0 and start time t0."""

    b: float
    c: float
    t0: float = 0.0

    def __post_init__(self):
        mp.check_span(self.b)
        if self.c <= 0.0:
            raise ValueError("epoch rate c must be positive")

    def epoch(self, t: float) -> int:
        """Index of the last epoch at or before time t (state at k/c already
        includes the k-th kick)."""
        return int(math.floor(self.c * t + 1e-12))


@dataclass(frozen=True)
class PathBundle:
    """Simulated paths indexed by epoch; states are right-continuous."""

    config: OUConfig
    epoch0: int
    states: np.ndarray       # (n_paths, epochs + 1, d), states[:, 0] = M
    increments: np.ndarray   # (n_paths, epochs, d)
    seed: int

    @property
    def n_paths(self) -> int:
        return self.states.shape[0]

    @property
    def epochs(self) -> int:
        return self.increments.shape[1]

    @property
    def dim(self) -> int:
        return self.states.shape[2]

    def times(self) -> np.ndarray:
        return (self.epoch0 + np.arange(self.epochs + 1)) / self.config.c

    def state_at(self, t: float) -> np.ndarray:
        k = self.config.epoch(t) - self.epoch0
        if not 0 <= k <= self.epochs:
            raise ValueError("time outside the simulated window")
        return self.states[:, k, :]


def _resolve_init(init, n_paths: int, dim: int) -> np.ndarray:
    if isinstance(init, sp.SampleBatch):
        if init.n != n_paths or init.dim != dim:
            raise ValueError("initial batch shape mismatch")
        return np.asarray(init.values, dtype=float)
    m = np.asarray(init, dtype=float)
    if m.ndim <= 1:
        return np.broadcast_to(np.atleast_1d(m), (n_paths, dim)).copy()
    if m.shape != (n_paths, dim):
        raise ValueError("initial states must be (d,) or (n_paths, d)")
    return m.copy()


def solve_path(noise: tp.LevyTriplet, cfg: OUConfig, init, epochs: int,
               n_paths: int = 1, seed: int = 0) -> PathBundle:
    """Run the epoch recursion from ``init`` for ``epochs`` kicks."""
    if epochs < 0:
        raise ValueError("epochs must be nonnegative")
    d = noise.dim
    Z = _resolve_init(init, n_paths, d)
    states = np.empty((n_paths, epochs + 1, d))
    states[:, 0, :] = Z
    increments = np.empty((n_paths, epochs, d))
    seeds = np.random.SeedSequence(seed).generate_state(max(epochs, 1))
    for k in range(epochs):
        dX = sp.sample(noise, n_paths, int(seeds[k]), t=1.0 / cfg.c).values
        increments[:, k, :] = dX
        Z = (Z + dX) / cfg.b
        states[:, k + 1, :] = Z
    return PathBundle(config=cfg, epoch0=cfg.epoch(cfg.t0), states=states,
                      increments=increments, seed=int(seed))


def closed_form_states(bundle: PathBundle) -> np.ndarray:
    """States recomputed from the explicit solution
    ``Z_k = b^{-k} M + b^{-k} sum_l b^{l-1} dX_l`` (k counted from epoch0)."""
    b = bundle.config.b
    K = bundle.epochs
    out = np.empty_like(bundle.states)
    out[:, 0, :] = bundle.states[:, 0, :]
    for k in range(1, K + 1):
        w = b ** (np.arange(1, k + 1) - 1.0 - k)        # b^{l-1-k}
        out[:, k, :] = b ** (-float(k)) * bundle.states[:, 0, :] + \
            np.einsum("l,nld->nd", w, bundle.increments[:, :k, :])
    return out


def verify_langevin(bundle: PathBundle) -> float:
    """Max relative residual of the pathwise balance identity

        Z_k - M - sum_{l<=k} dX_l + (b - 1) sum_{l<=k} Z_l = 0.
    """
    b = bundle.config.b
    M = bundle.states[:, :1, :]
    cum_dx = np.cumsum(bundle.increments, axis=1)
    cum_z = np.cumsum(bundle.states[:, 1:, :], axis=1)
    res = bundle.states[:, 1:, :] - M - cum_dx + (b - 1.0) * cum_z
    scale = max(float(np.max(np.abs(bundle.states))),
                float(np.max(np.abs(cum_dx), initial=0.0)), 1.0)
    return float(np.max(np.abs(res), initial=0.0)) / scale


# ---------------------------------------------------------------------------
# limit law


def limit_cumulant(noise: tp.LevyTriplet, cfg: OUConfig, z,
                   tol: float = 1e-10) -> tp.CumulantGrid:
    """Cumulant ``(1/c) sum_{k>=0} C_{X_1}(b^{-k-1} z)`` of the limit law.

    Requires a finite log-moment on the noise measure; raises DomainError
    otherwise (the recursion then has no limit in law).
    """
    out = mp.forward_cumulant(noise, cfg.b, z, m=0, arg_pow=-1,
                              tol=tol * cfg.c)
    return tp.CumulantGrid(grid=out.grid, values=out.values / cfg.c,
                           err_bound=out.err_bound / cfg.c)


def transition_cumulant(noise: tp.LevyTriplet, cfg: OUConfig, s: float,
                        t: float, z, x=None, tol: float = 1e-12) -> tp.CumulantGrid:
    """Cumulant of ``Z_t`` given ``Z_s = x``: the kernel is a deterministic
    contraction ``b^{-D} x`` plus D independent scaled kicks, D the number of
    epochs in (s, t]."""
    if t < s:
        raise ValueError("needs s <= t")
    delta = cfg.epoch(t) - cfg.epoch(s)
    if delta > 100_000:
        raise ToleranceError("transition window spans too many epochs")
    zgrid = tp._as_grid(z, noise.dim)
    x = np.zeros(noise.dim) if x is None else np.atleast_1d(np.asarray(x, float))
    vals = 1j * cfg.b ** (-float(delta)) * (zgrid @ x)
    err = np.zeros(zgrid.shape[0])
    for k in range(delta):
        g = tp.cumulant(noise, zgrid, tol=tol, arg_pow=(cfg.b, -(k + 1)))
        vals = vals + g.values / cfg.c
        err += g.err_bound / cfg.c
    return tp.CumulantGrid(grid=zgrid, values=vals, err_bound=err)


def sample_limit_law(noise: tp.LevyTriplet, cfg: OUConfig, n: int, seed: int,
                     zmax: float = 5.0, tail_tol: float = 1e-4) -> sp.SampleBatch:
    """Draws from the limit law via the truncated series
    ``sum_{k<=K} b^{-k-1} dX_k`` with the discarded tail's cumulant bound
    below ``tail_tol`` at |z| = zmax."""
    if noise.levy.components and not math.isfinite(ms.log_moment(noise.levy, 1)):
        raise DomainError("log-moment is infinite; no limit law exists")
    b, c = cfg.b, cfg.c
    # once C is in its near-linear regime terms shrink at least like 1/b
    K, bound = 8, math.inf
    while K < 400:
        term = abs(tp.cumulant_at(noise, b ** (-(K + 1.0)) *
                                  np.full(noise.dim, zmax / math.sqrt(noise.dim))))
        bound = term / c * b / (b - 1.0) * 2.0
        if bound < tail_tol:
            break
        K += 4
    else:
        raise ToleranceError("limit-law truncation did not reach tolerance")
    seeds = np.random.SeedSequence(seed).generate_state(K + 1)
    total = np.zeros((n, noise.dim))
    for k in range(K + 1):
        total += b ** (-(k + 1.0)) * sp.sample(noise, n, int(seeds[k]),
                                               t=1.0 / c).values
    return sp.SampleBatch(total, t=1.0 / c, seed=int(seed),
                          metadata={"scheme": "truncated_series",
                                    "terms": K + 1, "tail_bound": bound})


@dataclass(frozen=True)
class LimitReport:
    """Monte Carlo validation of convergence to the limit law."""

    grid: np.ndarray
    ecf_gap_first: float        # terminal ECF (first start) vs finite-epoch CF
    ecf_gap_second: float       # same for the second start
    start_gap: float            # terminal ECFs of the two starts vs each other
    limit_gap: float            # finite-epoch CF vs limit CF (truncation bias)
    stationary_gaps: tuple      # ECF-vs-limit gaps at checked epochs, limit start
    conf_radius: float
    ok: bool


def validate_limit(noise: tp.LevyTriplet, cfg: OUConfig, n: int = DEFAULT_N,
                   epochs: int = 60, grid=None, seed: int = 0,
                   q: float = 3.0, n_stationary_checks: int = 5) -> LimitReport:
    """Check that the recursion forgets its start and lands on the limit law,
    and that a limit-law start is stationary across epochs."""
    if noise.levy.components and not math.isfinite(ms.log_moment(noise.levy, 1)):
        raise DomainError("log-moment is infinite; no limit law exists")
    d = noise.dim
    zgrid = tp._as_grid(grid if grid is not None else
                        np.linspace(-3.0, 3.0, 21), d)
    radius = q / math.sqrt(n)

    lim = limit_cumulant(noise, cfg, zgrid)
    phi_lim = np.exp(lim.values)

    def terminal(init, sd):
        Z = _resolve_init(init, n, d)
        snaps = {}
        checks = sorted({max(1, epochs - 1 - 2 * i) for i in range(n_stationary_checks)})
        seeds = np.random.SeedSequence(sd).generate_state(max(epochs, 1))
        for k in range(epochs):
            dX = sp.sample(noise, n, int(seeds[k]), t=1.0 / cfg.c).values
            Z = (Z + dX) / cfg.b
            if k + 1 in checks:
                snaps[k + 1] = Z.copy()
        return Z, snaps

    m2 = np.full(d, 2.0)
    Z1, _ = terminal(np.zeros(d), seed)
    Z2, _ = terminal(m2, seed + 1)

    fin1 = transition_cumulant(noise, cfg, 0.0, epochs / cfg.c, zgrid, x=np.zeros(d))
    fin2 = transition_cumulant(noise, cfg, 0.0, epochs / cfg.c, zgrid, x=m2)

    def ecf_vals(Z):
        return np.mean(np.exp(1j * (Z @ zgrid.T)), axis=0)

    e1, e2 = ecf_vals(Z1), ecf_vals(Z2)
    gap1 = float(np.max(np.abs(e1 - np.exp(fin1.values))))
    gap2 = float(np.max(np.abs(e2 - np.exp(fin2.values))))
    start_gap = float(np.max(np.abs(e1 - e2)))
    limit_gap = float(np.max(np.abs(np.exp(fin1.values) - phi_lim)))

    init_batch = sample_limit_law(noise, cfg, n, seed + 2,
                                  zmax=float(np.max(np.linalg.norm(zgrid, axis=1))))
    _, snaps = terminal(init_batch, seed + 3)
    stat_gaps = tuple(float(np.max(np.abs(ecf_vals(S) - phi_lim)))
                      for _, S in sorted(snaps.items()))
    bias = float(init_batch.metadata["tail_bound"])

    ok = (gap1 <= radius + limit_gap and gap2 <= radius + limit_gap
          and start_gap <= 2.0 * radius
          and all(g <= radius + bias for g in stat_gaps))
    return LimitReport(grid=zgrid, ecf_gap_first=gap1, ecf_gap_second=gap2,
                       start_gap=start_gap, limit_gap=limit_gap,
                       stationary_gaps=stat_gaps, conf_radius=radius, ok=ok)


# ---------------------------------------------------------------------------
# semi-stationarity


@dataclass(frozen=True)
class ShiftReport:
    """Joint-ECF comparison of ``(Z_t)_{t in times}`` against the same times
    shifted by ``shift``."""

    times: tuple
    shift: float
    marginal_gap: float
    joint_gap: float
    conf_radius: float

    def invariant(self) -> bool:
        return max(self.marginal_gap, self.joint_gap) <= 2.0 * self.conf_radius


def shift_invariance_gap(noise: tp.LevyTriplet, cfg: OUConfig, times, shift: float,
                         n: int = DEFAULT_N, seed: int = 0, zvals=None,
                         q: float = 3.0) -> ShiftReport:
    """Simulate from a limit-law start and measure how far the marginal and
    pairwise joint ECFs move under a time shift."""
    times = tuple(float(t) for t in times)
    all_t = times + tuple(t + shift for t in times)
    if min(all_t) < 0.0:
        raise ValueError("times and shifted times must be nonnegative")
    zv = np.atleast_1d(np.asarray(
        zvals if zvals is not None else [0.7, 1.9, 3.1], dtype=float))
    d = noise.dim
    zmax = float(np.max(np.abs(zv))) * math.sqrt(d) * 2.0

    init = sample_limit_law(noise, cfg, n, seed, zmax=zmax)
    epochs = cfg.epoch(max(all_t))
    bundle = solve_path(noise, cfg, init, epochs, n_paths=n, seed=seed + 1)

    def joint(pair_t):
        # E exp(i (z1 Z_{t1} + z2 Z_{t2})) over a small z1 x z2 grid
        s1 = bundle.state_at(pair_t[0]) @ np.ones(d)
        s2 = bundle.state_at(pair_t[1]) @ np.ones(d)
        ph = zv[None, :, None] * s1[:, None, None] + zv[None, None, :] * s2[:, None, None]
        return np.mean(np.exp(1j * ph), axis=0)

    marg_gap = 0.0
    for t in times:
        a = np.mean(np.exp(1j * np.outer(bundle.state_at(t) @ np.ones(d), zv)), axis=0)
        b_ = np.mean(np.exp(1j * np.outer(bundle.state_at(t + shift) @ np.ones(d), zv)), axis=0)
        marg_gap = max(marg_gap, float(np.max(np.abs(a - b_))))

    joint_gap = 0.0
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            g = np.abs(joint((times[i], times[j])) -
                       joint((times[i] + shift, times[j] + shift)))
            joint_gap = max(joint_gap, float(np.max(g)))

    return ShiftReport(times=times, shift=shift, marginal_gap=marg_gap,
                       joint_gap=joint_gap, conf_radius=q / math.sqrt(n))


def semistationary_path(noise: tp.LevyTriplet, cfg: OUConfig, horizon: float,
                        n: int = DEFAULT_N, seed: int = 0, zvals=None):
    """Realize the process from a limit-law start over [0, horizon] and check
    shift-invariance of marginal and joint ECFs by one period 1/c."""
    period = 1.0 / cfg.c
    upper = max(horizon - period, period)
    times = tuple(np.linspace(0.3 * period, upper, 3))
    report = shift_invariance_gap(noise, cfg, times, period, n=n, seed=seed,
                                  zvals=zvals)
    init = sample_limit_law(noise, cfg, n, seed)
    bundle = solve_path(noise, cfg, init, cfg.epoch(horizon), n_paths=n,
                        seed=seed + 1)
    return bundle, report


# ---------------------------------------------------------------------------
# divergence diagnostic


@dataclass(frozen=True)
class DivergenceReport:
    """One-step characteristic function of the increment against its bound
    ``|E exp(i<b z0, Z_t - Z_{t - 1/c}>)| <= |CF_noise(z0)|^{1/c}``."""

    z0: np.ndarray
    times: tuple
    estimates: tuple
    bound: float
    conf_radius: float
    ok: bool


def divergence_diagnostic(noise: tp.LevyTriplet, cfg: OUConfig, z0, times,
                          n: int = DEFAULT_N, seed: int = 0,
                          q: float = 3.0) -> DivergenceReport:
    """The modulus stays below a constant < 1, so increments never die out:
    the process keeps moving instead of converging in probability."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    re_c = tp.cumulant_at(noise, z0).real
    if re_c > -1e-12:
        raise ValueError("pick z0 with |CF(z0)| strictly below 1 "
                         "(deterministic noise is excluded)")
    bound = math.exp(re_c / cfg.c)
    times = tuple(float(t) for t in times)
    epochs = cfg.epoch(max(times))
    bundle = solve_path(noise, cfg, np.zeros(noise.dim), epochs, n_paths=n,
                        seed=seed)
    ests = []
    for t in times:
        k = cfg.epoch(t) - bundle.epoch0
        if k < 1:
            raise ValueError("each time must lie at least one epoch in")
        diff = bundle.states[:, k, :] - bundle.states[:, k - 1, :]
        ests.append(abs(complex(np.mean(np.exp(1j * cfg.b * (diff @ z0))))))
    radius = q / math.sqrt(n)
    ok = all(e <= bound + radius for e in ests)
    return DivergenceReport(z0=z0, times=times, estimates=tuple(ests),
                            bound=bound, conf_radius=radius, ok=ok)
