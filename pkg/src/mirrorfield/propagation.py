"""Exact free-space evolution of amplitude fields.

Free evolution multiplies every momentum amplitude by e^{-i k c t},
independent of the direction channel: the equation of motion
a_s(x, t) = a_s(x - s c t, 0) puts s into both the transform exponent and
the drift, and the two factors of s cancel.  Modes at negative k rotate
with negative frequency omega = c k while carrying positive energy
hbar c |k|; the generator of these phases (the dynamical Hamiltonian) is
therefore not the energy observable, and its signed spectrum is exposed
through :func:`dynamical_spectrum` for tests.

Boundary conditions are periodic (inherited from the FFT), so scenarios
must keep packets away from wrap-around within their simulated horizons.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid
from .grid import UnitSystem, natural_units
from .fields import MOMENTUM, POSITION, AmplitudeField, S_VALUES
from .transforms import KernelKind


def evolve_free(field: AmplitudeField, t: float, units: UnitSystem | None = None) -> AmplitudeField:
    """Advance a momentum-representation field by a time t (t < 0 reverses)."""
    if field.representation != MOMENTUM:
        raise ValueError("evolve_free expects a momentum-representation field")
    units = units or natural_units()
    phases = np.exp(-1j * field.grid.k_values * units.c * t)
    return field.with_data(field.data * phases)


def shift_position(
    field: AmplitudeField, cells: int, s_channel: int | None = None
) -> AmplitudeField:
    """Whole-cell fast path for free evolution in the flat position picture.

    Circularly shifts the s channel by s*cells lattice points (both
    channels when s_channel is None), which matches evolve_free at
    t = cells*dx/c exactly: the spectral phases for a whole-cell time are
    a pure lattice translation.
    """
    if field.representation != POSITION or field.kernel.kind != KernelKind.FLAT:
        raise ValueError("shift_position requires the flat-kernel position representation")
    if not isinstance(cells, (int, np.integer)):
        raise ValueError(f"shift must be a whole number of cells, got {cells!r}")
    out = field.data.copy()
    for i, s in enumerate(S_VALUES):
        if s_channel is not None and s != s_channel:
            continue
        out[i] = np.roll(field.data[i], s * cells, axis=-1)
    return field.with_data(out)


def dynamical_spectrum(grid: Grid, units: UnitSystem | None = None) -> np.ndarray:
    """Signed eigenvalues hbar*c*k of the free generator, one per lattice mode.

    Diagnostic accessor: the generator itself is never stored as a
    matrix, only applied through spectral phases.
    """
    units = units or natural_units()
    return units.hbar * units.c * grid.k_values
