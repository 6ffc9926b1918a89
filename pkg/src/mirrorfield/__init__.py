"""mirrorfield: the 1D quantized EM field in position space, with mirrors.

The field carries both positive- and negative-frequency modes (k of
either sign, all with positive energy hbar c |k|), which is what makes
the position representation invertible and lets a local, Hermitian,
time-independent Hamiltonian scatter light off a two-sided
semi-transparent mirror without touching outgoing wave packets.
"""

from .grid import Grid, UnitSystem, make_grid, natural_units, negate_k_indices
from .transforms import (
    KernelKind,
    KernelSpec,
    NonInvertibleKernelError,
    flat_kernel,
    overlap_kernel,
    sqrt_abs_k_kernel,
    standard_positive_only_kernel,
)
from .fields import (
    AmplitudeField,
    OffLatticeWarning,
    band_flat_packet,
    from_binary,
    from_ndjson,
    gaussian_packet,
    to_binary,
    to_circular,
    to_linear,
    to_momentum,
    to_ndjson,
    to_position,
    zero_field,
)
from .observables import (
    BandEdgeWarning,
    FieldProfiles,
    band_edge_fraction,
    energy_by_channel,
    energy_density,
    energy_total,
    field_profiles,
    maxwell_residual,
    profiles_to_csv,
)
from .propagation import dynamical_spectrum, evolve_free, shift_position
from .mirror import (
    DenseMirrorKernel,
    EquivalenceReport,
    MirrorKernel,
    ScatteringSpectrum,
    SeparableMirrorKernel,
    apply_scattering,
    dense_kernel,
    dense_kernel_from_bytes,
    dense_kernel_to_bytes,
    evolve_mirror,
    gaussian_mirror_kernel,
    minimum_steps,
    positive_only_scattering,
    scattering_equivalence_check,
    scattering_unitary,
    separable_kernel,
    separable_kernel_from_csv,
    separable_kernel_to_csv,
    separable_to_dense,
    spectrum_to_csv,
    total_rotation_angle,
    xi_profile,
    xi_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeField",
    "BandEdgeWarning",
    "DenseMirrorKernel",
    "EquivalenceReport",
    "FieldProfiles",
    "Grid",
    "KernelKind",
    "KernelSpec",
    "MirrorKernel",
    "NonInvertibleKernelError",
    "OffLatticeWarning",
    "ScatteringSpectrum",
    "SeparableMirrorKernel",
    "UnitSystem",
    "apply_scattering",
    "band_edge_fraction",
    "band_flat_packet",
    "dense_kernel",
    "dense_kernel_from_bytes",
    "dense_kernel_to_bytes",
    "dynamical_spectrum",
    "energy_by_channel",
    "energy_density",
    "energy_total",
    "evolve_free",
    "evolve_mirror",
    "field_profiles",
    "flat_kernel",
    "from_binary",
    "from_ndjson",
    "gaussian_mirror_kernel",
    "gaussian_packet",
    "make_grid",
    "maxwell_residual",
    "minimum_steps",
    "natural_units",
    "negate_k_indices",
    "overlap_kernel",
    "positive_only_scattering",
    "profiles_to_csv",
    "scattering_equivalence_check",
    "scattering_unitary",
    "separable_kernel",
    "separable_kernel_from_csv",
    "separable_kernel_to_csv",
    "separable_to_dense",
    "shift_position",
    "spectrum_to_csv",
    "sqrt_abs_k_kernel",
    "standard_positive_only_kernel",
    "to_binary",
    "to_circular",
    "to_linear",
    "to_momentum",
    "to_ndjson",
    "to_position",
    "total_rotation_angle",
    "xi_profile",
    "xi_spectrum",
    "zero_field",
]
