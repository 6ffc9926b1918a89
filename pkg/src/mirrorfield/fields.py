"""Field states: complex amplitudes per channel plus wave-packet builders.

An :class:`AmplitudeField` stores one complex amplitude per direction
channel s in {+1, -1}, per polarization, per lattice point.  The same
container serves two physical readings -- coherent amplitudes <a> and
single-excitation wavefunctions -- because every evolution implemented
here (free propagation, mirror scattering) is linear in the mode
amplitudes.  The ``interpretation`` tag only matters to the observables
module, whose energy formulas assume the coherent-amplitude reading.

Momentum-representation amplitudes are kernel-agnostic; a position
representation always records which kernel produced it.

Serialization formats (external interfaces):

* NDJSON -- one header record ``{"record": "header", ...}`` followed by
  one record ``{"channel": "s+1:H", "index": j, "re": ..., "im": ...}``
  per amplitude.
* binary -- little-endian: magic ``MFLD``, version u8, representation u8
  (0 momentum / 1 position), kernel kind u8 (0 flat / 1 sqrt_abs_k /
  2 standard_positive_only / 255 none), polarization basis u8
  (0 linear / 1 circular), interpretation u8 (0 coherent / 1 single
  excitation), n_points u32, dx f64, kernel phase f64, then 4*n (re, im)
  f64 pairs in channel-major order (s=+1 pol0, s=+1 pol1, s=-1 pol0,
  s=-1 pol1), index ascending.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, make_grid
from .transforms import (
    KernelKind,
    KernelSpec,
    forward_channel,
    inverse_channel,
)

S_VALUES = (1, -1)
LINEAR_POLS = ("H", "V")
CIRCULAR_POLS = ("+", "-")

MOMENTUM = "momentum"
POSITION = "position"

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class OffLatticeWarning(UserWarning):
    """A requested packet center was snapped to the nearest lattice point."""


@dataclass(frozen=True)
class AmplitudeField:
    """Amplitudes over (s, polarization, lattice point)."""

    grid: Grid
    data: np.ndarray  # complex128, shape (2, 2, n_points)
    representation: str = MOMENTUM
    kernel: KernelSpec | None = None
    polarization_basis: str = "linear"
    interpretation: str = "coherent"

    def __post_init__(self):
        expected = (2, 2, self.grid.n_points)
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != {expected}")
        if self.data.dtype != np.complex128:
            raise ValueError(f"data dtype must be complex128, got {self.data.dtype}")
        if not np.all(np.isfinite(self.data.view(float))):
            raise ValueError("field data contains non-finite entries")
        if self.representation not in (MOMENTUM, POSITION):
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.representation == POSITION and self.kernel is None:
            raise ValueError("position representation must record its kernel")
        if self.representation == MOMENTUM and self.kernel is not None:
            raise ValueError("momentum representation is kernel-agnostic")
        if self.polarization_basis not in ("linear", "circular"):
            raise ValueError(f"unknown polarization basis {self.polarization_basis!r}")
        if self.interpretation not in ("coherent", "single_excitation"):
            raise ValueError(f"unknown interpretation {self.interpretation!r}")

    @property
    def pol_labels(self) -> tuple[str, str]:
        return LINEAR_POLS if self.polarization_basis == "linear" else CIRCULAR_POLS

    def channel(self, s: int, pol: str) -> np.ndarray:
        """Amplitude array of one (s, polarization) channel (a view)."""
        return self.data[S_VALUES.index(s), self.pol_labels.index(pol)]

    def copy(self) -> "AmplitudeField":
        return replace(self, data=self.data.copy())

    def with_data(self, data: np.ndarray, **overrides) -> "AmplitudeField":
        """New field with replaced amplitudes (and optional tag overrides)."""
        return replace(self, data=np.ascontiguousarray(data, dtype=np.complex128), **overrides)

    def norm_squared(self) -> float:
        """sum |amplitude|^2 weighted by the lattice measure (dk or dx)."""
        weight = self.grid.dk if self.representation == MOMENTUM else self.grid.dx
        return float(np.sum(np.abs(self.data) ** 2) * weight)


def zero_field(
    grid: Grid,
    representation: str = MOMENTUM,
    kernel: KernelSpec | None = None,
    polarization_basis: str = "linear",
    interpretation: str = "coherent",
) -> AmplitudeField:
    """Vacuum amplitudes (all channels zero)."""
    data = np.zeros((2, 2, grid.n_points), dtype=np.complex128)
    return AmplitudeField(grid, data, representation, kernel, polarization_basis, interpretation)


def _snap_center(grid: Grid, center_x: float) -> float:
    if grid.is_on_lattice(center_x):
        return grid.x_values[grid.index_of_x(center_x)]
    snapped = grid.x_values[grid.index_of_x(center_x)]
    warnings.warn(
        f"packet center {center_x} is off-lattice; snapped to {snapped}",
        OffLatticeWarning,
        stacklevel=3,
    )
    return snapped


def gaussian_packet(
    grid: Grid,
    s: int,
    pol: str,
    center_x: float,
    width_sigma: float,
    carrier_k: float = 0.0,
    amplitude: complex = 1.0,
    interpretation: str = "coherent",
) -> AmplitudeField:
    """Gaussian wave packet on one (s, pol) channel, in momentum representation.

    alpha(k) follows (2 pi sigma^2)^(1/4) exp(-sigma^2 (k - carrier)^2 / 2)
    times the center phase e^{-i s k center_x}, rescaled on the lattice so
    that sum |alpha|^2 dk = |amplitude|^2 exactly.  The packet must be
    resolvable (sigma >= 3 dx) and band-limited
    (|carrier_k| + 4/sigma <= k_max).
    """
    if width_sigma < 3.0 * grid.dx:
        raise ValueError(f"width_sigma = {width_sigma} not resolvable; need >= 3*dx = {3 * grid.dx}")
    if abs(carrier_k) + 4.0 / width_sigma > grid.k_max:
        raise ValueError(
            f"packet violates band limit: |carrier_k| + 4/sigma = "
            f"{abs(carrier_k) + 4.0 / width_sigma} > k_max = {grid.k_max}"
        )
    center_x = _snap_center(grid, center_x)
    k = grid.k_values
    envelope = (2.0 * np.pi * width_sigma**2) ** 0.25 * np.exp(
        -0.5 * width_sigma**2 * (k - carrier_k) ** 2
    )
    alpha = envelope * np.exp(-1j * np.sign(s) * k * center_x)
    alpha *= amplitude / np.sqrt(np.sum(np.abs(alpha) ** 2) * grid.dk)

    field = zero_field(grid, interpretation=interpretation)
    field.channel(s, pol)[:] = alpha
    return field


def band_flat_packet(
    grid: Grid,
    s: int,
    pol: str,
    center_x: float,
    amplitude: complex = 1.0,
    phase: float = 0.0,
    interpretation: str = "coherent",
) -> AmplitudeField:
    """Spectrally flat packet: a truly-localised excitation at center_x.

    alpha(k) = amplitude * sqrt(dx / 2 pi) * e^{-i sgn(k) phase}
    * e^{-i s k center_x} on every mode, so sum |alpha|^2 dk =
    |amplitude|^2 and the flat-kernel position representation with the
    matching phase is a lattice delta at center_x.  Off-lattice centers
    snap to the nearest point with an :class:`OffLatticeWarning` rather
    than interpolating, which keeps delta-packet tests exact.
    """
    center_x = _snap_center(grid, center_x)
    k = grid.k_values
    alpha = (
        amplitude
        * np.sqrt(grid.dx / (2.0 * np.pi))
        * np.exp(-1j * np.sign(k) * phase)
        * np.exp(-1j * np.sign(s) * k * center_x)
    )
    field = zero_field(grid, interpretation=interpretation)
    field.channel(s, pol)[:] = alpha
    return field


def to_position(field: AmplitudeField, kernel: KernelSpec) -> AmplitudeField:
    """Transform momentum amplitudes into the position representation of kernel."""
    if field.representation != MOMENTUM:
        raise ValueError("to_position expects a momentum-representation field")
    out = np.empty_like(field.data)
    for i, s in enumerate(S_VALUES):
        out[i] = forward_channel(field.data[i], field.grid, kernel, s)
    return field.with_data(out, representation=POSITION, kernel=kernel)


def to_momentum(field: AmplitudeField, kernel: KernelSpec | None = None) -> AmplitudeField:
    """Invert the position representation back to momentum amplitudes.

    The kernel defaults to the one recorded on the field.  Raises
    :class:`~mirrorfield.transforms.NonInvertibleKernelError` for the
    positive-only kernel.
    """
    if field.representation != POSITION:
        raise ValueError("to_momentum expects a position-representation field")
    if kernel is None:
        kernel = field.kernel
    elif kernel != field.kernel:
        raise ValueError("kernel does not match the one recorded on the field")
    out = np.empty_like(field.data)
    for i, s in enumerate(S_VALUES):
        out[i] = inverse_channel(field.data[i], field.grid, kernel, s)
    return field.with_data(out, representation=MOMENTUM, kernel=None)


def to_circular(field: AmplitudeField) -> AmplitudeField:
    """Change the polarization basis to circular: A_+- = (A_H +- i A_V)/sqrt(2)."""
    if field.polarization_basis == "circular":
        return field.copy()
    h, v = field.data[:, 0], field.data[:, 1]
    out = np.empty_like(field.data)
    out[:, 0] = (h + 1j * v) * _SQRT_HALF
    out[:, 1] = (h - 1j * v) * _SQRT_HALF
    return field.with_data(out, polarization_basis="circular")


def to_linear(field: AmplitudeField) -> AmplitudeField:
    """Change the polarization basis back to linear (involutive round trip)."""
    if field.polarization_basis == "linear":
        return field.copy()
    p, m = field.data[:, 0], field.data[:, 1]
    out = np.empty_like(field.data)
    out[:, 0] = (p + m) * _SQRT_HALF
    out[:, 1] = (p - m) * (-1j * _SQRT_HALF)
    return field.with_data(out, polarization_basis="linear")


# --- serialization ---------------------------------------------------------

_KERNEL_CODES = {
    None: 255,
    KernelKind.FLAT: 0,
    KernelKind.SQRT_ABS_K: 1,
    KernelKind.STANDARD_POSITIVE_ONLY: 2,
}
_KERNEL_FROM_CODE = {
    0: KernelKind.FLAT,
    1: KernelKind.SQRT_ABS_K,
    2: KernelKind.STANDARD_POSITIVE_ONLY,
}
_BASIS_CODES = {"linear": 0, "circular": 1}
_INTERP_CODES = {"coherent": 0, "single_excitation": 1}
_HEADER_STRUCT = struct.Struct("<4sBBBBBIdd")
_MAGIC = b"MFLD"


def _channel_label(s: int, pol: str) -> str:
    return f"s{s:+d}:{pol}"


def to_ndjson(field: AmplitudeField) -> str:
    """Serialize to newline-delimited JSON (header record + one per amplitude)."""
    header = {
        "record": "header",
        "n_points": field.grid.n_points,
        "dx": field.grid.dx,
        "representation": field.representation,
        "kernel_kind": field.kernel.kind.value if field.kernel else None,
        "kernel_phase": field.kernel.phase if field.kernel else None,
        "polarization_basis": field.polarization_basis,
        "interpretation": field.interpretation,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for i, s in enumerate(S_VALUES):
        for j, pol in enumerate(field.pol_labels):
            label = _channel_label(s, pol)
            for index, value in enumerate(field.data[i, j]):
                lines.append(
                    json.dumps(
                        {"channel": label, "index": index, "re": value.real, "im": value.imag}
                    )
                )
    return "\n".join(lines) + "\n"


def from_ndjson(text: str) -> AmplitudeField:
    """Rebuild a field from :func:`to_ndjson` output."""
    lines = [line for line in text.splitlines() if line.strip()]
    header = json.loads(lines[0])
    if header.get("record") != "header":
        raise ValueError("NDJSON stream must start with a header record")
    grid = make_grid(header["n_points"], header["dx"])
    kernel = None
    if header["kernel_kind"] is not None:
        kernel = KernelSpec(KernelKind(header["kernel_kind"]), header["kernel_phase"])
    field = zero_field(
        grid,
        representation=header["representation"],
        kernel=kernel,
        polarization_basis=header["polarization_basis"],
        interpretation=header["interpretation"],
    )
    labels = {
        _channel_label(s, pol): (i, j)
        for i, s in enumerate(S_VALUES)
        for j, pol in enumerate(field.pol_labels)
    }
    for line in lines[1:]:
        record = json.loads(line)
        i, j = labels[record["channel"]]
        field.data[i, j, record["index"]] = record["re"] + 1j * record["im"]
    return field


def to_binary(field: AmplitudeField) -> bytes:
    """Serialize to the compact little-endian layout (see module docstring)."""
    header = _HEADER_STRUCT.pack(
        _MAGIC,
        1,
        0 if field.representation == MOMENTUM else 1,
        _KERNEL_CODES[field.kernel.kind if field.kernel else None],
        _BASIS_CODES[field.polarization_basis],
        _INTERP_CODES[field.interpretation],
        field.grid.n_points,
        field.grid.dx,
        field.kernel.phase if field.kernel else 0.0,
    )
    return header + field.data.astype("<c16").tobytes()


def from_binary(blob: bytes) -> AmplitudeField:
    """Rebuild a field from :func:`to_binary` output."""
    magic, version, rep_code, kernel_code, basis_code, interp_code, n, dx, phase = (
        _HEADER_STRUCT.unpack_from(blob)
    )
    if magic != _MAGIC:
        raise ValueError("not a mirrorfield binary state (bad magic)")
    if version != 1:
        raise ValueError(f"unsupported binary state version {version}")
    grid = make_grid(n, dx)
    kernel = None
    if kernel_code != 255:
        kernel = KernelSpec(_KERNEL_FROM_CODE[kernel_code], phase)
    data = np.frombuffer(blob, dtype="<c16", offset=_HEADER_STRUCT.size)
    data = data.reshape(2, 2, n).astype(np.complex128)
    basis = {v: k for k, v in _BASIS_CODES.items()}[basis_code]
    interp = {v: k for k, v in _INTERP_CODES.items()}[interp_code]
    return AmplitudeField(
        grid,
        data,
        MOMENTUM if rep_code == 0 else POSITION,
        kernel,
        basis,
        interp,
    )
