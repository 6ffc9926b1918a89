"""Generalized Fourier transforms between position and momentum amplitudes.

A representation is fixed by a weight function f(k):

* flat kernel        f(k) = e^{i sgn(k) phi} / sqrt(2 pi)
* sqrt-|k| kernel    f(k) = sqrt(|k| / 2 pi) e^{i sgn(k) phi}
* positive-only      phi = pi/2 forced, f(k) = 0 for k < 0; this is the
  textbook description and is kept only as a forward map -- it has no
  inverse because half the spectral amplitudes are discarded.

The forward map per direction channel s is
    a_s(x_j) = sum_m f(k_m) e^{i s k_m x_j} alpha_s(k_m) dk
and the inverse divides out f pointwise, so the pair is exact on the
lattice whenever f has no zeros (the sqrt-|k| kernel's k = 0 zero is
treated as a pseudo-inverse null mode).  sgn(0) == 0 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grid import Grid

_TWO_PI = 2.0 * np.pi


class NonInvertibleKernelError(ValueError):
    """Raised when inverting a kernel that discards negative frequencies."""


class KernelKind(str, Enum):
    FLAT = "flat"
    SQRT_ABS_K = "sqrt_abs_k"
    STANDARD_POSITIVE_ONLY = "standard_positive_only"


@dataclass(frozen=True)
class KernelSpec:
    """Choice of f(k) plus the sign-locked phase phi in [0, 2 pi)."""

    kind: KernelKind
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.phase < _TWO_PI:
            raise ValueError(f"phase must lie in [0, 2 pi), got {self.phase}")
        if self.kind == KernelKind.STANDARD_POSITIVE_ONLY and self.phase != np.pi / 2:
            raise ValueError("the positive-only kernel forces phase = pi/2")

    def values(self, k: np.ndarray) -> np.ndarray:
        """Sample f(k) pointwise on the given wavenumbers (sgn(0) == 0)."""
        k = np.asarray(k, dtype=float)
        phase_factor = np.exp(1j * np.sign(k) * self.phase)
        if self.kind == KernelKind.FLAT:
            return phase_factor / np.sqrt(_TWO_PI)
        magnitude = np.sqrt(np.abs(k) / _TWO_PI)
        if self.kind == KernelKind.SQRT_ABS_K:
            return magnitude * phase_factor
        return np.where(k > 0, magnitude * phase_factor, 0.0 + 0.0j)


def flat_kernel(phase: float = 0.0) -> KernelSpec:
    return KernelSpec(KernelKind.FLAT, phase)


def sqrt_abs_k_kernel(phase: float = 0.0) -> KernelSpec:
    return KernelSpec(KernelKind.SQRT_ABS_K, phase)


def standard_positive_only_kernel() -> KernelSpec:
    return KernelSpec(KernelKind.STANDARD_POSITIVE_ONLY, np.pi / 2)


def centered_phase_sum(values: np.ndarray, sign: int) -> np.ndarray:
    """Evaluate w[b] = sum_a v[a] exp(sign * i * 2 pi (a-n/2)(b-n/2) / n).

    This is the common core of every lattice transform here: with
    v = f(k) alpha(k) it is the position sum over the centered k lattice,
    and with position samples it is the inverse phase sum.  Implemented
    with FFTs (O(n log n)), exact for both exponent signs.  Works on the
    last axis.
    """
    v = np.asarray(values)
    n = v.shape[-1]
    shifted = np.fft.ifftshift(v, axes=-1)
    if sign > 0:
        core = np.fft.ifft(shifted, axis=-1) * n
    else:
        core = np.fft.fft(shifted, axis=-1)
    return np.fft.fftshift(core, axes=-1)


def forward_channel(alpha: np.ndarray, grid: Grid, kernel: KernelSpec, s: int) -> np.ndarray:
    """Momentum -> position for one direction channel (exponent carries s)."""
    f = kernel.values(grid.k_values)
    return grid.dk * centered_phase_sum(f * alpha, +1 if s > 0 else -1)


def inverse_channel(a: np.ndarray, grid: Grid, kernel: KernelSpec, s: int) -> np.ndarray:
    """Position -> momentum for one direction channel.

    Exact inverse of :func:`forward_channel` on the lattice.  For the
    sqrt-|k| kernel the k = 0 mode is annihilated by f(0) = 0; its
    inverse coefficient is defined as 0 (the mode carries zero energy and
    is dynamically inert, so it is a representation null space).
    """
    if kernel.kind == KernelKind.STANDARD_POSITIVE_ONLY:
        raise NonInvertibleKernelError(
            "the positive-only kernel has no inverse: half the spectrum "
            "(k < 0) is projected out, so position amplitudes do not "
            "determine momentum amplitudes"
        )
    f = kernel.values(grid.k_values)
    inv_f = np.zeros_like(f)
    nonzero = f != 0
    inv_f[nonzero] = 1.0 / f[nonzero]
    raw = centered_phase_sum(a, -1 if s > 0 else +1)
    return (grid.dx / _TWO_PI) * inv_f * raw


def overlap_kernel(grid: Grid, kernel: KernelSpec, s: int, separation: float) -> complex:
    """Band-limited overlap of two single-excitation states a distance apart.

    Evaluates sum_m |f(k_m)|^2 e^{i s k_m separation} dk, the integrand of
    the equal-time commutator of the position-space annihilation
    operators.  For the flat kernel this is the lattice delta (height
    1/dx at separation 0, zero at other lattice separations); for the
    sqrt-|k| kernel it is the band-limited derivative-of-delta profile
    that makes those excitations only highly (not truly) localised.
    """
    f = kernel.values(grid.k_values)
    phases = np.exp(1j * np.sign(s) * grid.k_values * separation)
    return complex(np.sum(np.abs(f) ** 2 * phases) * grid.dk)
