"""Ring of particles with long-range inverse-power coupling, in relative form.

State is (r, p): r_j is the deviation of the gap x_{j+1} - x_j from its
equilibrium value 1 and p_j = dx_j/dt.  A site interacts with its m-th
neighbors through the window sum G_m r (m consecutive gaps); every potential
here is the inverse-power pair term with its equilibrium value and slope
subtracted, which is what keeps truncation and small-amplitude evaluation
well conditioned.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import AlphaParams

SERIES_CROSSOVER = 1e-3


class CollisionError(RuntimeError):
    """Particle ordering about to be lost (a gap argument reached -1)."""

    def __init__(self, message, t=None, alpha=None, epsilon=None):
        super().__init__(message)
        self.t = t
        self.alpha = alpha
        self.epsilon = epsilon


@dataclass
class LatticeState:
    """Gap deviations r, velocities p, and the elapsed time t."""

    r: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.r.shape != self.p.shape or self.r.ndim != 1:
            raise ValueError("r and p must be 1-d arrays of equal length")
        if self.r.size < 16:
            raise ValueError(f"ring must have at least 16 sites, got {self.r.size}")
        if np.max(np.abs(self.r)) >= 1.0:
            raise CollisionError("a gap deviation reached 1; ordering lost", t=self.t)


@dataclass(frozen=True)
class LatticeConfig:
    """Ring size, interaction exponent, range cutoff and time step."""

    N: int
    alpha: float
    cutoff: int
    dt: float

    def __post_init__(self):
        if self.N < 16:
            raise ValueError("N must be at least 16")
        if not 1 <= self.cutoff <= self.N // 2 - 1:
            raise ValueError(f"cutoff must lie in [1, N/2 - 1], got {self.cutoff}")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if not 1.0 < self.alpha < 3.0:
            raise ValueError(f"alpha must lie in (1, 3), got {self.alpha}")


def gsum(r: np.ndarray, m: int) -> np.ndarray:
    """Periodic window sums out[j] = r[j] + ... + r[j+m-1], via prefix sums."""
    r = np.asarray(r, dtype=float)
    N = r.size
    if not 1 <= m <= N:
        raise ValueError(f"m must lie in [1, {N}], got {m}")
    cs = np.concatenate(([0.0], np.cumsum(np.concatenate((r, r)))))
    return cs[m:m + N] - cs[:N]


def _gsum_all(r: np.ndarray, M: int) -> np.ndarray:
    """Stacked window sums for m = 1..M from one doubled prefix-sum pass."""
    N = r.size
    cs = np.concatenate(([0.0], np.cumsum(np.concatenate((r, r)))))
    return np.stack([cs[m:m + N] - cs[:N] for m in range(1, M + 1)])


def _kernel(a, mu, alpha: float):
    """(mu+a)^-alpha - mu^-alpha + alpha*a*mu^-(alpha+1), safe for small a/mu.

    The subtracted equilibrium value and slope cancel the first two Taylor
    terms, so the direct expression loses accuracy when |a/mu| is tiny; below
    the crossover a four-term series in a/mu is used instead.
    """
    a = np.asarray(a, dtype=float)
    mu = np.asarray(mu, dtype=float)
    x = a / mu
    if np.any(x <= -1.0) or np.any(mu <= 0.0):
        raise CollisionError("potential argument outside the ordered regime")
    lead = mu ** (-alpha)
    direct = lead * (np.expm1(-alpha * np.log1p(x)) + alpha * x)
    x2 = x * x
    series = lead * (alpha * (alpha + 1) / 2.0) * x2 * (
        1.0 + x * (-(alpha + 2) / 3.0
                   + x * ((alpha + 2) * (alpha + 3) / 12.0
                          - x * (alpha + 2) * (alpha + 3) * (alpha + 4) / 60.0)))
    return np.where(np.abs(x) < SERIES_CROSSOVER, series, direct)


def _kernel_prime(a, mu, alpha: float):
    """Derivative of _kernel in a: -alpha*((mu+a)^-(alpha+1) - mu^-(alpha+1)).

    The expm1/log1p composition is cancellation-free for every a/mu > -1,
    so no series branch is needed here.
    """
    a = np.asarray(a, dtype=float)
    mu = np.asarray(mu, dtype=float)
    x = a / mu
    if np.any(x <= -1.0) or np.any(mu <= 0.0):
        raise CollisionError("potential argument outside the ordered regime")
    b = alpha + 1.0
    return alpha * mu ** (-b) * (-np.expm1(-b * np.log1p(x)))


def v_m(g, m: int, alpha: float):
    """Renormalized pair potential at range m, evaluated at window sum g."""
    return _kernel(g, float(m), alpha)


def v_m_prime(g, m: int, alpha: float):
    """Slope of the renormalized pair potential at range m."""
    return _kernel_prime(g, float(m), alpha)


def w_m(a, b, m: int, alpha: float):
    """Second-order remainder of v_m around b: v_m(b+a) - v_m(b) - v_m'(b)*a."""
    return _kernel(a, float(m) + np.asarray(b, dtype=float), alpha)


def w_m_prime(a, b, m: int, alpha: float):
    """Derivative of w_m in a."""
    return _kernel_prime(a, float(m) + np.asarray(b, dtype=float), alpha)


def w_m_db(a, b, m: int, alpha: float):
    """Derivative of w_m in b."""
    return -alpha * _kernel(a, float(m) + np.asarray(b, dtype=float), alpha + 1.0)


def force(r: np.ndarray, config: LatticeConfig) -> np.ndarray:
    """Acceleration of each site: sum over ranges m of the backward
    m-difference of the pair slopes, truncated at config.cutoff."""
    r = np.asarray(r, dtype=float)
    M = config.cutoff
    G = _gsum_all(r, M)
    ms = np.arange(1, M + 1, dtype=float)[:, None]
    w = _kernel_prime(G, ms, config.alpha)
    f = np.zeros(r.size)
    for m in range(1, M + 1):
        wm = w[m - 1]
        f += wm
        f -= np.roll(wm, m)
    return f


def _drift(p: np.ndarray) -> np.ndarray:
    # dr_j/dt = p_{j+1} - p_j
    return np.roll(p, -1) - p


def verlet_step(state: LatticeState, config: LatticeConfig) -> LatticeState:
    """One kick-drift-kick step of length config.dt."""
    dt = config.dt
    f = force(state.r, config)
    if dt * float(np.max(np.abs(f))) > 1.0:
        warnings.warn("dt * max|force| exceeds 1; step is too coarse",
                      RuntimeWarning, stacklevel=2)
    p = state.p + (0.5 * dt) * f
    r = state.r + dt * _drift(p)
    p = p + (0.5 * dt) * force(r, config)
    return LatticeState(r=r, p=p, t=state.t + dt)


def run_steps(state: LatticeState, config: LatticeConfig, nsteps: int) -> LatticeState:
    """nsteps kick-drift-kick steps with one force evaluation per step
    (the trailing half-kick force doubles as the next leading one)."""
    r = state.r.copy()
    p = state.p.copy()
    dt = config.dt
    f = force(r, config)
    for i in range(nsteps):
        p += (0.5 * dt) * f
        r += dt * _drift(p)
        if np.max(np.abs(r)) >= 1.0:
            raise CollisionError("a gap deviation reached 1; ordering lost",
                                 t=state.t + (i + 1) * dt, alpha=config.alpha)
        f = force(r, config)
        p += (0.5 * dt) * f
    return LatticeState(r=r, p=p, t=state.t + nsteps * config.dt)


def energy(state: LatticeState, config: LatticeConfig) -> float:
    """Kinetic plus truncated interaction energy (zero at equilibrium)."""
    G = _gsum_all(state.r, config.cutoff)
    ms = np.arange(1, config.cutoff + 1, dtype=float)[:, None]
    pot = float(np.sum(_kernel(G, ms, config.alpha)))
    return 0.5 * float(np.dot(state.p, state.p)) + pot


def p2_functional(eta: np.ndarray, alpha: float, cutoff: int):
    """Quadratic window form sum_m m^(-alpha-2) ||G_m eta||^2 up to cutoff.

    Returns (value, tail_bound) where tail_bound caps the dropped m > cutoff
    contribution by ||eta||^2 * cutoff^(1-alpha)/(alpha-1).
    """
    eta = np.asarray(eta, dtype=float)
    if cutoff < 1 or cutoff > eta.size:
        raise ValueError(f"cutoff must lie in [1, {eta.size}], got {cutoff}")
    G = _gsum_all(eta, cutoff)
    ms = np.arange(1, cutoff + 1, dtype=float)
    value = float(np.sum(ms ** (-alpha - 2.0) * np.sum(G * G, axis=1)))
    tail = float(np.dot(eta, eta)) * cutoff ** (1.0 - alpha) / (alpha - 1.0)
    return value, tail


def error_energy(xi: np.ndarray, eta: np.ndarray, rtilde: np.ndarray,
                 config: LatticeConfig) -> float:
    """Modified energy 0.5 ||xi||^2 + sum_j sum_m w_m(G_m eta, G_m rtilde).

    Valid (and provably norm-equivalent) only under the smallness condition
    ||eta||, ||rtilde|| <= 1/4, which is enforced.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    rtilde = np.asarray(rtilde, dtype=float)
    if np.linalg.norm(eta) > 0.25 or np.linalg.norm(rtilde) > 0.25:
        raise ValueError("smallness violated: need ||eta||, ||rtilde|| <= 1/4")
    M = config.cutoff
    Ge = _gsum_all(eta, M)
    Gr = _gsum_all(rtilde, M)
    ms = np.arange(1, M + 1, dtype=float)[:, None]
    pot = float(np.sum(_kernel(Ge, ms + Gr, config.alpha)))
    return 0.5 * float(np.dot(xi, xi)) + pot


def error_energy_constants(params: AlphaParams):
    """Two-sided coefficients (lo, hi) with
    lo*||eta||^2 <= error_energy - kinetic <= hi*||eta||^2
    under the smallness precondition of error_energy."""
    a = params.alpha
    lo = 2.0 ** (a + 1) * a * (a + 1) * (2.0 * params.zeta_a1 - params.zeta_a) / 3.0 ** (a + 2)
    hi = 2.0 ** (a + 1) * a * (a + 1) * params.zeta_a
    return lo, hi
