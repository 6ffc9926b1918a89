"""Field observables: E/B profiles, normal-ordered energy, Maxwell residuals.

The electric and magnetic profiles are assembled from the quadrature
amplitude <xi_(s,lambda)(x)> = sqrt(2) Re a_(s,lambda)(x) in the
sqrt-|k| position representation (the representation in which these
observables take their simple form; flat-kernel states must be converted
first):

    E(x) = sum_s sqrt(hbar c / (eps A)) [xi_sH yhat + xi_sV zhat]
    B(x) = sum_s (s/c) sqrt(hbar c / (eps A)) [-xi_sV yhat + xi_sH zhat]

Energies are normal-ordered throughout: the divergent vacuum constant is
dropped, so the vacuum reads exactly zero and coherent-pair comparisons
(quadrupling, cancellation) are between finite numbers.  In momentum
space the energy carries an anomalous alpha(k) alpha(-k) cross-term that
couples each mode to its frequency mirror; on the lattice the mirror
mode is indexed modulo n, which pairs the band edge with itself (one
more reason to keep states band-limited).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import UnitSystem, natural_units, negate_k_indices
from .fields import (
    MOMENTUM,
    POSITION,
    AmplitudeField,
    S_VALUES,
    to_linear,
)
from .propagation import evolve_free
from .transforms import KernelKind, KernelSpec, sqrt_abs_k_kernel


class BandEdgeWarning(UserWarning):
    """Significant spectral weight near the lattice band edge."""


@dataclass(frozen=True)
class FieldProfiles:
    """Real E/B components and energy density over the position lattice."""

    x: np.ndarray
    e_y: np.ndarray
    e_z: np.ndarray
    b_y: np.ndarray
    b_z: np.ndarray
    energy_density: np.ndarray


def _require_sqrt_position(field: AmplitudeField, op: str) -> None:
    if field.representation != POSITION or field.kernel.kind != KernelKind.SQRT_ABS_K:
        raise ValueError(
            f"{op} is defined in the sqrt-|k| position representation; "
            "convert with to_momentum/to_position(..., sqrt_abs_k_kernel()) first"
        )
    if field.interpretation != "coherent":
        raise ValueError(
            f"{op} assumes the coherent-amplitude interpretation; "
            "single-excitation states have different observable formulas"
        )


def field_profiles(field: AmplitudeField, units: UnitSystem | None = None) -> FieldProfiles:
    """Expectation values of the E and B field components plus energy density."""
    _require_sqrt_position(field, "field_profiles")
    units = units or natural_units()
    field = to_linear(field)

    prefactor = np.sqrt(units.hbar * units.c / (units.epsilon * units.area))
    # xi per (s, lambda): sqrt(2) Re a
    xi = np.sqrt(2.0) * field.data.real
    e_y = prefactor * (xi[0, 0] + xi[1, 0])
    e_z = prefactor * (xi[0, 1] + xi[1, 1])
    s_over_c = np.array(S_VALUES, dtype=float)[:, None] / units.c
    b_y = prefactor * np.sum(s_over_c * (-xi[:, 1]), axis=0)
    b_z = prefactor * np.sum(s_over_c * xi[:, 0], axis=0)
    density = energy_density(field, units)
    return FieldProfiles(field.grid.x_values, e_y, e_z, b_y, b_z, density)


def energy_density(field: AmplitudeField, units: UnitSystem | None = None) -> np.ndarray:
    """Normal-ordered energy density hbar c sum_(s,lambda) 2 (Re a(x))^2."""
    _require_sqrt_position(field, "energy_density")
    units = units or natural_units()
    return units.hbar * units.c * np.sum(2.0 * field.data.real**2, axis=(0, 1))


def energy_total(
    field: AmplitudeField,
    kernel: KernelSpec,
    units: UnitSystem | None = None,
) -> float:
    """Normal-ordered energy expectation from momentum amplitudes.

    sum over channels and modes of
        dk * 2 pi hbar c * (|f(k)|^2 |alpha(k)|^2
                            + Re[f(k) f(-k) alpha(k) alpha(-k)])
    For the sqrt-|k| kernel the weights reduce to hbar c |k| and the
    cross-term is what makes conjugate coherent pairs interfere: energy
    quadruples for alpha(-k) = alpha(k)* and cancels to zero for
    alpha(-k) = -alpha(k)*.
    """
    if field.representation != MOMENTUM:
        raise ValueError("energy_total expects a momentum-representation field")
    if field.interpretation != "coherent":
        raise ValueError("energy_total assumes the coherent-amplitude interpretation")
    units = units or natural_units()
    return float(np.sum(energy_by_channel(field, kernel, units)))


def energy_by_channel(
    field: AmplitudeField,
    kernel: KernelSpec,
    units: UnitSystem | None = None,
) -> np.ndarray:
    """Energy split per (s, polarization) channel, shape (2, 2).

    The energy observable is diagonal in both indices, so the split is
    exact; it is what scenario energy ledgers report.
    """
    if field.representation != MOMENTUM:
        raise ValueError("energy_by_channel expects a momentum-representation field")
    units = units or natural_units()
    grid = field.grid
    f = kernel.values(grid.k_values)
    flip = negate_k_indices(grid.n_points)
    alpha = field.data
    direct = np.abs(f) ** 2 * np.abs(alpha) ** 2
    anomalous = (f * f[flip] * alpha * alpha[..., flip]).real
    weights = 2.0 * np.pi * units.hbar * units.c * grid.dk
    return weights * np.sum(direct + anomalous, axis=-1)


def _spectral_derivative(profile: np.ndarray, dx: float) -> np.ndarray:
    """d/dx of a real periodic profile; the Nyquist mode's odd derivative is zeroed."""
    n = profile.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    spectrum = np.fft.fft(profile)
    spectrum *= 1j * k
    spectrum[n // 2] = 0.0
    return np.fft.ifft(spectrum).real


def band_edge_fraction(field: AmplitudeField, cutoff: float = 0.8) -> float:
    """Fraction of |alpha|^2 beyond cutoff * k_max (momentum representation)."""
    if field.representation != MOMENTUM:
        raise ValueError("band_edge_fraction expects a momentum-representation field")
    total = np.sum(np.abs(field.data) ** 2)
    if total == 0.0:
        return 0.0
    outside = np.abs(field.grid.k_values) > cutoff * field.grid.k_max
    return float(np.sum(np.abs(field.data[..., outside]) ** 2) / total)


def maxwell_residual(
    field: AmplitudeField,
    units: UnitSystem | None = None,
    dt_probe: float = 1e-3,
    kernel: KernelSpec | None = None,
) -> float:
    """Max-norm residual of the two 1D curl equations (diagnostic, never raises).

    Time derivatives come from central differences of free evolution by
    +-dt_probe (O(dt^2) accurate); space derivatives are spectral.  The
    residual is meaningful for band-limited fields; significant weight
    beyond 0.8 k_max trips a :class:`BandEdgeWarning`.
    """
    if field.representation != MOMENTUM:
        raise ValueError("maxwell_residual expects a momentum-representation field")
    units = units or natural_units()
    kernel = kernel or sqrt_abs_k_kernel()
    if kernel.kind != KernelKind.SQRT_ABS_K:
        raise ValueError("maxwell_residual probes E/B in the sqrt-|k| representation")

    if band_edge_fraction(field) > 1e-9:
        warnings.warn(
            "field has significant weight near the band edge; the residual "
            "reflects lattice truncation rather than Maxwell violation",
            BandEdgeWarning,
            stacklevel=2,
        )

    from .fields import to_position  # local import keeps module load order simple

    def profiles_at(t: float) -> FieldProfiles:
        return field_profiles(to_position(evolve_free(field, t, units), kernel), units)

    now = profiles_at(0.0)
    plus = profiles_at(dt_probe)
    minus = profiles_at(-dt_probe)

    def ddt(attr: str) -> np.ndarray:
        return (getattr(plus, attr) - getattr(minus, attr)) / (2.0 * dt_probe)

    dx = field.grid.dx
    eps_mu = units.epsilon * units.mu
    residuals = [
        ddt("b_y") - _spectral_derivative(now.e_z, dx),
        ddt("b_z") + _spectral_derivative(now.e_y, dx),
        eps_mu * ddt("e_y") + _spectral_derivative(now.b_z, dx),
        eps_mu * ddt("e_z") - _spectral_derivative(now.b_y, dx),
    ]
    return float(max(np.max(np.abs(r)) for r in residuals))


def profiles_to_csv(
    profiles: FieldProfiles,
    units: UnitSystem | None = None,
    kernel: KernelSpec | None = None,
) -> str:
    """CSV emitter: columns x, E_y, E_z, B_y, B_z, u(x); header records units/kernel."""
    units = units or natural_units()
    lines = [
        f"# units: hbar={units.hbar!r} c={units.c!r} epsilon={units.epsilon!r} "
        f"mu={units.mu!r} area={units.area!r}",
    ]
    if kernel is not None:
        lines.append(f"# kernel: kind={kernel.kind.value} phase={kernel.phase!r}")
    lines.append("x,E_y,E_z,B_y,B_z,u")
    for row in zip(
        profiles.x, profiles.e_y, profiles.e_z, profiles.b_y, profiles.b_z,
        profiles.energy_density,
    ):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
