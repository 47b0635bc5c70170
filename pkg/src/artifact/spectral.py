"""Real periodic fields with cached discrete spectra and Fourier multipliers.

The spectrum convention is spectrum = fft(values)/n, so spectrum[j] is the
coefficient of exp(i*k_j*X) and a unit constant field has spectrum
(1, 0, ..., 0).  Wavenumbers follow the usual FFT layout with the unpaired
-n/2 mode last in the negative block; any operation whose multiplier is not
real there zeroes that bin to keep fields real.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

CONJ_TOL = 1e-9


def wavenumbers(n: int, period: float) -> np.ndarray:
    """FFT-ordered wavenumbers 2*pi*j/period for j = 0..n/2-1, -n/2..-1."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def dealias_mask(n: int, fraction: float = 2.0 / 3.0) -> np.ndarray:
    """Boolean mask keeping integer frequencies with |j| <= fraction*(n/2)."""
    j = np.fft.fftfreq(n) * n
    return np.abs(j) <= fraction * (n // 2)


def pad_spectrum(c: np.ndarray, num: int) -> np.ndarray:
    """Zero-pad FFT-ordered coefficients from even length n to even num >= n.

    The unpaired top mode of the source is split half-and-half between the
    +n/2 and -n/2 bins of the target so the padded spectrum is conjugate
    symmetric (when num == n this reassembles the original bin exactly).
    """
    n = c.size
    if n % 2 or num % 2:
        raise ValueError("spectrum lengths must be even")
    if num < n:
        raise ValueError(f"cannot pad length {n} down to {num}")
    half = n // 2
    out = np.zeros(num, dtype=complex)
    out[:half] = c[:half]
    out[num - half + 1:] = c[half + 1:]
    out[half] += 0.5 * c[half]
    out[num - half] += 0.5 * c[half]
    return out


def sample_spectrum(c: np.ndarray, period: float, num: int, shift: float = 0.0
                    ) -> np.ndarray:
    """Values of the interpolant at the num uniform points j*period/num + shift.

    Works for any even num: refining zero-pads, coarsening aliases bins
    modulo num, which is exact for point evaluation.  The unpaired top mode
    is split half-and-half between +n/2 and -n/2 and the shift phases act at
    the true signed wavenumbers.
    """
    c = np.asarray(c, dtype=complex)
    n = c.size
    if n % 2 or num % 2:
        raise ValueError("spectrum lengths must be even")
    half = n // 2
    modes = np.concatenate([np.arange(0, half), (half, -half),
                            np.arange(-half + 1, 0)])
    weights = np.concatenate([c[:half], (0.5 * c[half], 0.5 * c[half]),
                              c[half + 1:]])
    if shift != 0.0:
        weights = weights * np.exp(2j * np.pi * modes * shift / period)
    out = np.zeros(num, dtype=complex)
    np.add.at(out, np.mod(modes, num), weights)
    return np.fft.ifft(out).real * num


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid of n nodes (a power of two, at least 8) on [0, period)."""

    period: float
    n: int

    def __post_init__(self):
        if self.period <= 0.0:
            raise ValueError("period must be positive")
        if self.n < 8 or not _is_pow2(self.n):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * (self.period / self.n)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return wavenumbers(self.n, self.period)

    @property
    def nyquist_index(self) -> int:
        return self.n // 2


class SpectralField:
    """A real field on a PeriodicGrid together with its discrete spectrum.

    values and spectrum are kept consistent; construct through from_values
    or from_spectrum and treat instances as immutable.
    """

    __slots__ = ("grid", "values", "spectrum")

    def __init__(self, grid: PeriodicGrid, values: np.ndarray, spectrum: np.ndarray):
        self.grid = grid
        self.values = values
        self.spectrum = spectrum

    @classmethod
    def from_values(cls, grid: PeriodicGrid, values) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError(f"values must have shape ({grid.n},), got {values.shape}")
        return cls(grid, values, np.fft.fft(values) / grid.n)

    @classmethod
    def from_spectrum(cls, grid: PeriodicGrid, spectrum) -> "SpectralField":
        spectrum = np.asarray(spectrum, dtype=complex)
        if spectrum.shape != (grid.n,):
            raise ValueError(f"spectrum must have shape ({grid.n},), got {spectrum.shape}")
        return cls(grid, np.fft.ifft(spectrum).real * grid.n, spectrum)

    def mean(self) -> float:
        return float(self.spectrum[0].real)

    def __add__(self, other):
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.values + other.values,
                             self.spectrum + other.spectrum)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.values - other.values,
                             self.spectrum - other.spectrum)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return SpectralField(self.grid, scalar * self.values, scalar * self.spectrum)

    __rmul__ = __mul__


def _check_same_grid(f: SpectralField, g: SpectralField):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def _eval_multiplier(m, k: np.ndarray) -> np.ndarray:
    try:
        mk = np.asarray(m(k), dtype=complex)
        if mk.shape == k.shape:
            return mk
    except (TypeError, ValueError):
        pass
    return np.array([m(float(kk)) for kk in k], dtype=complex)


def apply_multiplier(f: SpectralField, m) -> SpectralField:
    """Apply the diagonal operator with symbol m(k) to the field.

    m must satisfy m(-k) = conj(m(k)) so real fields stay real; this is
    checked on the grid's paired wavenumbers.  The unpaired top mode is
    zeroed whenever its multiplier value is not real.
    """
    k = f.grid.wavenumbers
    mk = _eval_multiplier(m, k)
    half = f.grid.nyquist_index
    scale = 1.0 + float(np.max(np.abs(mk)))
    mismatch = np.max(np.abs(np.conj(mk[1:half]) - mk[:half:-1]))
    if mismatch > CONJ_TOL * scale:
        raise ValueError("multiplier must satisfy m(-k) = conj(m(k)) "
                         f"(max mismatch {mismatch:.3e})")
    out = mk * f.spectrum
    if abs(mk[half].imag) > CONJ_TOL * scale:
        out[half] = 0.0
    return SpectralField.from_spectrum(f.grid, out)


def hilbert(f: SpectralField) -> SpectralField:
    """Periodic Hilbert transform: multiplier -i*sign(k), constants to zero."""
    return apply_multiplier(f, lambda k: -1j * np.sign(k))


def frac_deriv(f: SpectralField, alpha: float) -> SpectralField:
    """|D|^alpha with multiplier |k|**alpha; alpha = 0 is the identity."""
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    return apply_multiplier(f, lambda k: np.abs(k) ** alpha + 0j)


def hilbert_frac(f: SpectralField, alpha: float) -> SpectralField:
    """Composition of the Hilbert transform with |D|^alpha."""
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    return apply_multiplier(f, lambda k: -1j * np.sign(k) * np.abs(k) ** alpha)


def average_multiplier(k: np.ndarray, h: float) -> np.ndarray:
    """Symbol of the sliding window mean (1/h) * integral over [X, X+h]."""
    kh = k * h
    return np.where(kh == 0.0, 1.0 + 0j,
                    (np.exp(1j * kh) - 1.0) / np.where(kh == 0.0, 1.0, 1j * kh))


def average_op(f: SpectralField, h: float) -> SpectralField:
    """Sliding mean over [X, X+h] (h may be negative: the window flips)."""
    if h == 0.0:
        raise ValueError("h must be nonzero")
    return apply_multiplier(f, lambda k: average_multiplier(k, h))


def antiderivative_meanzero(f: SpectralField, mean_tol: float = 1e-10
                            ) -> SpectralField:
    """Primitive w with dX w = -f and w(0) = 0, for mean-zero periodic f."""
    c = f.spectrum
    if abs(c[0]) > mean_tol:
        raise ValueError(f"input mean {c[0].real:.3e} exceeds {mean_tol:.1e}; "
                         "the primitive would not be periodic")
    k = f.grid.wavenumbers
    w = np.zeros_like(c)
    w[1:] = -c[1:] / (1j * k[1:])
    w[f.grid.nyquist_index] = 0.0
    w[0] = -np.sum(w[1:])
    return SpectralField.from_spectrum(f.grid, w)


def eval_at(f: SpectralField, x):
    """Trigonometric interpolation at arbitrary points (reduced mod period).

    The unpaired top mode contributes its symmetrized (cosine) part, which
    agrees with the grid values at the nodes and keeps the result real.
    """
    k = f.grid.wavenumbers
    half = f.grid.nyquist_index
    c = f.spectrum
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    phases = np.exp(1j * xs[:, None] * k[None, :half])
    tail = np.exp(1j * xs[:, None] * k[None, half + 1:])
    vals = (phases @ c[:half]).real + (tail @ c[half + 1:]).real
    vals += c[half].real * np.cos(k[half] * xs)
    return float(vals[0]) if np.isscalar(x) or np.ndim(x) == 0 else vals


def resample_uniform(f: SpectralField, num: int, shift: float = 0.0) -> np.ndarray:
    """Fast eval_at on the uniform points j*period/num + shift (num even, >= n)."""
    return sample_spectrum(f.spectrum, f.grid.period, num, shift)


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Discrete Sobolev norm sqrt(P * sum (1 + k^2)^s |c_k|^2).

    s = 0 recovers the continuum L2 norm of the trigonometric interpolant.
    """
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    k = f.grid.wavenumbers
    return math.sqrt(f.grid.period
                     * float(np.sum((1.0 + k * k) ** s * np.abs(f.spectrum) ** 2)))


def l2_norm(f: SpectralField) -> float:
    return sobolev_norm(f, 0.0)


def write_field_csv(f: SpectralField, path):
    """Serialize as rows X,value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["X", "value"])
        for x, v in zip(f.grid.nodes, f.values):
            writer.writerow([repr(float(x)), repr(float(v))])


def write_field_binary(f: SpectralField, path):
    """Little-endian float64 dump: period, n, then the n values."""
    header = np.array([f.grid.period, float(f.grid.n)])
    np.concatenate([header, f.values]).astype("<f8").tofile(path)


def read_field_binary(path) -> SpectralField:
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 2:
        raise ValueError(f"truncated field dump: {path}")
    period, n = float(raw[0]), int(raw[1])
    if raw.size != 2 + n:
        raise ValueError(f"field dump length mismatch in {path}")
    return SpectralField.from_values(PeriodicGrid(period, n), raw[2:])
