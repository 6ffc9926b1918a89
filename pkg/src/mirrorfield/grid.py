"""Centered position/wavenumber lattices and unit systems.

All continuum integrals in this package are discretized as plain Riemann
sums (dk -> sum * dk, dx -> sum * dx), which makes the flat-kernel
transform pair exactly unitary on the lattice.  Both x = 0 and k = 0 are
lattice points: the mirror sits at x = 0 and sgn(k) needs an explicit
k = 0 rule.  The band limit k_max = pi/dx is the implicit truncation of
every infinite wavenumber integral; "delta functions" on the lattice are
band-limited spikes of height 1/dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_REL_TOL = 1e-12


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants carried symbolically through all observables.

    ``area`` is the transverse cross-section the field occupies around
    the propagation axis.  The speed of light must satisfy
    c = 1/sqrt(epsilon * mu) to within 1e-12 relative.
    """

    hbar: float = 1.0
    c: float = 1.0
    epsilon: float = 1.0
    mu: float = 1.0
    area: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "epsilon", "mu", "area"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"unit system field {name!r} must be finite and > 0, got {value}")
        expected_c = 1.0 / math.sqrt(self.epsilon * self.mu)
        if abs(self.c - expected_c) > _REL_TOL * expected_c:
            raise ValueError(
                f"c = {self.c} inconsistent with 1/sqrt(epsilon*mu) = {expected_c}"
            )


def natural_units() -> UnitSystem:
    """Unit system with hbar = c = epsilon = mu = area = 1."""
    return UnitSystem()


@dataclass(frozen=True)
class Grid:
    """Paired spatial/spectral lattices with fixed transform conventions.

    x_j = (j - n/2) * dx for j = 0..n-1, and k_m = (m - n/2) * dk with
    dk = 2*pi/L, so dx * dk * n = 2*pi exactly.  Index n/2 carries x = 0
    and k = 0.
    """

    n_points: int
    dx: float
    length: float
    dk: float
    x_values: np.ndarray
    k_values: np.ndarray

    @property
    def k_max(self) -> float:
        """Band limit pi/dx (the k lattice spans [-k_max, k_max))."""
        return math.pi / self.dx

    def index_of_x(self, x: float) -> int:
        """Nearest lattice index to position x."""
        j = int(round(x / self.dx + self.n_points / 2))
        if not 0 <= j < self.n_points:
            raise ValueError(f"x = {x} outside grid [{self.x_values[0]}, {self.x_values[-1]}]")
        return j

    def index_of_k(self, k: float) -> int:
        """Nearest lattice index to wavenumber k."""
        m = int(round(k / self.dk + self.n_points / 2))
        if not 0 <= m < self.n_points:
            raise ValueError(f"k = {k} outside band [{self.k_values[0]}, {self.k_values[-1]}]")
        return m

    def is_on_lattice(self, x: float, tol: float = 1e-9) -> bool:
        """True if x coincides with a lattice point to within tol*dx."""
        j = x / self.dx + self.n_points / 2
        return abs(j - round(j)) <= tol and 0 <= round(j) < self.n_points


def make_grid(n_points: int, dx: float) -> Grid:
    """Build the centered lattice pair.

    n_points must be even and >= 4 (the centering convention needs a
    dedicated index for x = 0 and one for k = 0); dx must be positive.
    """
    if n_points < 4 or n_points % 2 != 0:
        raise ValueError(f"n_points must be even and >= 4, got {n_points}")
    if not (math.isfinite(dx) and dx > 0):
        raise ValueError(f"dx must be finite and > 0, got {dx}")

    length = n_points * dx
    dk = 2.0 * math.pi / length
    half = n_points // 2
    x_values = (np.arange(n_points) - half) * dx
    k_values = (np.arange(n_points) - half) * dk
    x_values.setflags(write=False)
    k_values.setflags(write=False)
    return Grid(
        n_points=n_points,
        dx=dx,
        length=length,
        dk=dk,
        x_values=x_values,
        k_values=k_values,
    )


def negate_k_indices(n_points: int) -> np.ndarray:
    """Index map sending the mode at k to the mode at -k.

    Uses the torus convention (m -> (n - m) mod n): the band-edge mode at
    k = -pi/dx is its own partner, because +pi/dx is congruent to -pi/dx
    modulo the spectral period.  Band-limited states should leave that
    mode unpopulated.
    """
    n = n_points
    return (n - np.arange(n)) % n
