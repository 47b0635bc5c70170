"""Scalar constants of the long-range chain and its long-wave limit.

Everything in this module is a plain function of the interaction exponent
alpha: zeta-type lattice sums, the dispersion constant eta defined by a
singular integral, its rectangle-rule approximant, the wave speed, the
three coefficients of the effective dispersive equation, and the exponent
tables used by the scaling experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

DEFAULT_TOL = 1e-10

# hard cap on series lengths so bad tolerances cannot hang the process
_MAX_TERMS = 5_000_000


def zeta(s: float, tol: float = DEFAULT_TOL) -> float:
    """Sum of m**(-s) over m >= 1, for s > 1, to absolute accuracy tol.

    Partial sum plus an Euler-Maclaurin tail through the second correction
    term; the cutoff doubles until the first neglected term is below tol/2,
    which keeps the cutoff in the tens for any sane tolerance.
    """
    if s <= 1.0:
        raise ValueError(f"sum diverges for s <= 1 (got s={s})")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    M = 24
    while s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * M ** (-s - 5) / 30240.0 >= tol / 2 \
            and M < 2 ** 20:
        M *= 2
    m = np.arange(1, M, dtype=float)
    head = math.fsum(m ** (-s))
    tail = (M ** (1 - s) / (s - 1) + M ** (-s) / 2
            + s * M ** (-s - 1) / 12
            - s * (s + 1) * (s + 2) * M ** (-s - 3) / 720)
    return head + tail


def _sinc(x):
    # sin(x)/x with the removable singularity filled in (numpy sinc is
    # normalized by pi, hence the rescale)
    return np.sinc(np.asarray(x) / np.pi)


def _weight_small(s: float) -> float:
    # 1 - s^2/12 - sinc(s/2)^2 expanded around 0; leading term -s^4/360
    s2 = s * s
    return s2 * s2 * (-1.0 / 360.0 + s2 * (1.0 / 20160.0 - s2 / 1814400.0))


def eta_integral(alpha: float, tol: float = DEFAULT_TOL) -> float:
    """Integral of (1 - sinc(s/2)**2) / s**alpha over (0, inf), alpha in (1, 3).

    Near zero the integrand behaves like s**(2-alpha)/12; that quadratic
    piece is integrated in closed form on [0, 2] and only the smooth
    remainder goes to the adaptive routine.  On [2, inf) the power-law
    parts are exact and the oscillatory remainder 2*cos(s)/s**(alpha+2)
    is handed to the cosine-weighted infinite-interval rule.
    """
    if not 1.0 < alpha < 3.0:
        raise ValueError(f"alpha must lie in (1, 3), got {alpha}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    def smooth_part(s):
        if s == 0.0:
            return 0.0
        if s < 0.5:
            num = _weight_small(s)
        else:
            half = s / 2.0
            num = 1.0 - s * s / 12.0 - (math.sin(half) / half) ** 2
        return num / s ** alpha

    head = quad(smooth_part, 0.0, 2.0, epsabs=tol / 4, epsrel=1e-13, limit=200)[0]
    head += 2.0 ** (3 - alpha) / (12.0 * (3.0 - alpha))
    # on [2, inf): 1/s^a - 2/s^(a+2) + 2 cos(s)/s^(a+2)
    tail = 2.0 ** (1 - alpha) / (alpha - 1) - 2.0 ** (-alpha) / (alpha + 1)
    osc = quad(lambda s: s ** (-alpha - 2.0), 2.0, np.inf,
               weight='cos', wvar=1.0, epsabs=tol / 4, limit=400)[0]
    return head + tail + 2.0 * osc


def eta_riemann(alpha: float, h: float, tol: float = DEFAULT_TOL) -> float:
    """Right-endpoint rectangle-rule value of the eta integral on the grid h*m.

    Writing 1 - sinc(hm/2)**2 = 1 - 2(1 - cos(hm))/(hm)**2 termwise turns the
    sum into two zeta values plus a cosine-weighted sum, which is truncated
    where its power-law tail bound drops below tol/2.  Only the truncation is
    approximate; the identity itself is exact.
    """
    if not 1.0 < alpha < 3.0:
        raise ValueError(f"alpha must lie in (1, 3), got {alpha}")
    if h <= 0.0:
        raise ValueError("h must be positive")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    pref = 2.0 * h ** (-alpha - 1.0)
    # sum_{m>m*} m^(-alpha-2) <= m*^(-alpha-1)/(alpha+1)
    mstar = int(math.ceil((2.0 * pref / ((alpha + 1) * tol)) ** (1.0 / (alpha + 1))))
    mstar = max(16, min(mstar, _MAX_TERMS))
    m = np.arange(1, mstar + 1, dtype=float)
    cos_sum = math.fsum(np.cos(h * m) * m ** (-alpha - 2.0))
    return (h ** (1.0 - alpha) * zeta(alpha, tol)
            - pref * (zeta(alpha + 2.0, tol) - cos_sum))


def zeta_gap(alpha: float, tol: float = 1e-12) -> float:
    """The coercivity gap 2*zeta(alpha+1) - zeta(alpha).

    Negative below the threshold root, positive above it; its sign decides
    whether the quadratic window form is equivalent to the plain norm.
    """
    if alpha <= 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    return 2.0 * zeta(alpha + 1.0, tol) - zeta(alpha, tol)


def find_alpha_star(tol: float = 1e-10, lo: float = 1.3, hi: float = 1.6) -> float:
    """Root of zeta_gap, located by bisection on a sign-checked bracket."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    flo = zeta_gap(lo)
    fhi = zeta_gap(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RuntimeError(f"no sign change on [{lo}, {hi}]: {flo:+.3e}, {fhi:+.3e}")
    while hi - lo > tol / 2:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = zeta_gap(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (fhi > 0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AlphaParams:
    """Frozen bundle of every alpha-dependent scalar used downstream.

    c is the long-wave speed, kappa1..kappa3 the coefficients of the
    effective dispersive equation, gamma the approximation-error exponent
    and beta the residual exponent; beta - alpha = gamma always.
    """

    alpha: float
    zeta_a: float
    zeta_a1: float
    c: float
    kappa1: float
    kappa2: float
    kappa3: float
    eta: float
    gamma: float
    beta: float


def make_alpha_params(alpha: float, tol: float = DEFAULT_TOL) -> AlphaParams:
    """Evaluate every derived constant for one exponent alpha in (1, 3).

    The exponent tables are piecewise: gamma = 2*alpha - 5/2 up to and
    including alpha = 2, and 3/2 above it; beta = gamma + alpha.
    """
    if not 1.0 < alpha < 3.0:
        raise ValueError(f"alpha must lie in (1, 3), got {alpha}")
    za = zeta(alpha, tol)
    za1 = zeta(alpha + 1.0, tol)
    eta = eta_integral(alpha, tol)
    c = math.sqrt(alpha * (alpha + 1.0) * za)
    gamma = 2.0 * alpha - 2.5 if alpha <= 2.0 else 1.5
    return AlphaParams(
        alpha=alpha,
        zeta_a=za,
        zeta_a1=za1,
        c=c,
        kappa1=2.0 * c,
        kappa2=alpha * (alpha + 1.0) * (alpha + 2.0) * za,
        kappa3=alpha * (alpha + 1.0) * eta,
        eta=eta,
        gamma=gamma,
        beta=gamma + alpha,
    )
