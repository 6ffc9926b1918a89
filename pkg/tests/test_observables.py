import numpy as np
import pytest

import mirrorfield as mf

from conftest import random_field


def _sqrt_position(field):
    return mf.to_position(field, mf.sqrt_abs_k_kernel())


def test_vacuum_gives_zero_everything(grid):
    vacuum = mf.zero_field(grid)
    assert mf.energy_total(vacuum, mf.sqrt_abs_k_kernel()) == 0.0
    profiles = mf.field_profiles(_sqrt_position(vacuum))
    for component in (profiles.e_y, profiles.e_z, profiles.b_y, profiles.b_z,
                      profiles.energy_density):
        assert np.max(np.abs(component)) == 0.0
    assert mf.maxwell_residual(vacuum) == 0.0


def test_right_mover_field_structure(grid):
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 8 * grid.dx, 1.5)
    profiles = mf.field_profiles(_sqrt_position(packet))
    np.testing.assert_allclose(profiles.b_z, profiles.e_y, atol=1e-14)  # B_z = E_y / c
    assert np.max(np.abs(profiles.e_z)) == 0.0
    assert np.max(np.abs(profiles.b_y)) == 0.0


def test_left_mover_flips_magnetic_sign(grid):
    packet = mf.gaussian_packet(grid, -1, "H", 0.0, 8 * grid.dx, 1.5)
    profiles = mf.field_profiles(_sqrt_position(packet))
    np.testing.assert_allclose(profiles.b_z, -profiles.e_y, atol=1e-14)


def test_v_polarization_maps_to_z_and_y(grid):
    packet = mf.gaussian_packet(grid, 1, "V", 0.0, 8 * grid.dx, 1.5)
    profiles = mf.field_profiles(_sqrt_position(packet))
    np.testing.assert_allclose(profiles.b_y, -profiles.e_z, atol=1e-14)
    assert np.max(np.abs(profiles.e_y)) == 0.0


def test_single_mode_energy_value(grid):
    m = grid.index_of_k(2.0)
    k0 = grid.k_values[m]
    alpha = 0.7 + 0.4j
    field = mf.zero_field(grid)
    field.data[0, 0, m] = alpha
    expected = abs(k0) * abs(alpha) ** 2 * grid.dk  # hbar c |k| |alpha|^2 dk
    assert mf.energy_total(field, mf.sqrt_abs_k_kernel()) == pytest.approx(expected, rel=1e-12)


def test_conjugate_pair_quadruples_energy(grid):
    m = grid.index_of_k(2.0)
    flip = mf.negate_k_indices(grid.n_points)
    alpha = 0.7 + 0.4j
    single = mf.zero_field(grid)
    single.data[0, 0, m] = alpha
    pair = single.copy()
    pair.data[0, 0, flip[m]] = np.conj(alpha)
    kernel = mf.sqrt_abs_k_kernel()
    e_single = mf.energy_total(single, kernel)
    e_pair = mf.energy_total(pair, kernel)
    assert e_pair / e_single == pytest.approx(4.0, abs=1e-9)


def test_anticonjugate_pair_cancels_energy(grid):
    m = grid.index_of_k(2.0)
    flip = mf.negate_k_indices(grid.n_points)
    alpha = 0.7 + 0.4j
    single = mf.zero_field(grid)
    single.data[0, 0, m] = alpha
    pair = single.copy()
    pair.data[0, 0, flip[m]] = -np.conj(alpha)
    kernel = mf.sqrt_abs_k_kernel()
    assert abs(mf.energy_total(pair, kernel)) <= 1e-9 * mf.energy_total(single, kernel)


def test_energy_phase_independent_for_sign_locked_kernels(grid):
    # the sgn(k) phi factor is what keeps H_eng independent of phi
    m = grid.index_of_k(2.0)
    flip = mf.negate_k_indices(grid.n_points)
    field = mf.zero_field(grid)
    field.data[0, 0, m] = 0.3 - 0.9j
    field.data[0, 0, flip[m]] = 1.1 + 0.2j
    energies = [
        mf.energy_total(field, mf.sqrt_abs_k_kernel(phi)) for phi in (0.0, 0.7, np.pi / 2, 4.0)
    ]
    np.testing.assert_allclose(energies, energies[0], rtol=1e-12)


def test_density_sum_equals_momentum_energy(grid, rng):
    field = random_field(grid, rng)
    energy = mf.energy_total(field, mf.sqrt_abs_k_kernel())
    density = mf.energy_density(_sqrt_position(field))
    assert np.sum(density) * grid.dx == pytest.approx(energy, rel=1e-12)


def test_density_matches_classical_eb_form(grid):
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 8 * grid.dx, 2.0)
    profiles = mf.field_profiles(_sqrt_position(packet))
    # (A/2)(eps E^2 + B^2/mu) with natural units
    classical = 0.5 * (
        profiles.e_y**2 + profiles.e_z**2 + profiles.b_y**2 + profiles.b_z**2
    )
    np.testing.assert_allclose(profiles.energy_density, classical, rtol=1e-10, atol=1e-14)


def test_disjoint_packets_add_densities(big_grid):
    grid = big_grid
    left = mf.gaussian_packet(grid, 1, "H", -60 * grid.dx, 6 * grid.dx, 2.0)
    right = mf.gaussian_packet(grid, -1, "H", 60 * grid.dx, 6 * grid.dx, 2.0)
    both = left.with_data(left.data + right.data)
    d_both = mf.energy_density(_sqrt_position(both))
    d_sum = mf.energy_density(_sqrt_position(left)) + mf.energy_density(_sqrt_position(right))
    np.testing.assert_allclose(d_both, d_sum, atol=1e-10 * d_both.max())


def test_energy_invariant_under_free_evolution(grid, rng):
    field = random_field(grid, rng)
    kernel = mf.sqrt_abs_k_kernel()
    before = mf.energy_total(field, kernel)
    after = mf.energy_total(mf.evolve_free(field, 7.3), kernel)
    assert after == pytest.approx(before, rel=1e-12)


def test_energy_positivity_randomized(rng):
    small = mf.make_grid(64, 0.5)
    kernel = mf.sqrt_abs_k_kernel()
    for _ in range(1000):
        field = random_field(small, rng, zero_band_edge=False)
        assert mf.energy_total(field, kernel) >= 0.0


def test_energy_positivity_flat_kernel(rng):
    small = mf.make_grid(64, 0.5)
    kernel = mf.flat_kernel()
    for _ in range(200):
        field = random_field(small, rng, zero_band_edge=False)
        assert mf.energy_total(field, kernel) >= 0.0


def test_global_phase_invariance_for_positive_support(grid, rng):
    field = random_field(grid, rng)
    field.data[..., grid.k_values <= 0] = 0.0
    kernel = mf.sqrt_abs_k_kernel()
    base = mf.energy_total(field, kernel)
    for theta in (0.3, 1.0, 2.5):
        rotated = field.with_data(field.data * np.exp(1j * theta))
        assert mf.energy_total(rotated, kernel) == pytest.approx(base, rel=1e-12)


def test_energy_by_channel_is_diagonal_split(grid, rng):
    field = random_field(grid, rng)
    kernel = mf.sqrt_abs_k_kernel()
    per_channel = mf.energy_by_channel(field, kernel)
    assert per_channel.shape == (2, 2)
    assert per_channel.sum() == pytest.approx(mf.energy_total(field, kernel), rel=1e-12)
    only_h_plus = mf.zero_field(grid)
    only_h_plus.data[0, 0] = field.data[0, 0]
    assert mf.energy_by_channel(only_h_plus, kernel)[0, 0] == pytest.approx(
        per_channel[0, 0], rel=1e-12
    )


def test_wrong_representation_raises_with_conversion_hint(grid, rng):
    field = random_field(grid, rng)
    with pytest.raises(ValueError, match="sqrt"):
        mf.field_profiles(field)  # momentum representation
    flat = mf.to_position(field, mf.flat_kernel())
    with pytest.raises(ValueError, match="convert"):
        mf.energy_density(flat)


def test_single_excitation_interpretation_rejected_by_energy(grid, rng):
    field = random_field(grid, rng).with_data(
        random_field(grid, rng).data, interpretation="single_excitation"
    )
    with pytest.raises(ValueError, match="coherent"):
        mf.energy_total(field, mf.sqrt_abs_k_kernel())
    with pytest.raises(ValueError, match="coherent"):
        mf.field_profiles(mf.to_position(field, mf.sqrt_abs_k_kernel()))


def test_maxwell_residual_small_and_second_order():
    grid = mf.make_grid(1024, 0.1)
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 20 * grid.dx, 3.0)
    profiles = mf.field_profiles(_sqrt_position(packet))
    peak_e = np.max(np.abs(profiles.e_y))
    assert mf.maxwell_residual(packet, dt_probe=0.01 * grid.dx) <= 1e-6 * peak_e / grid.dx
    probes = [0.32 * grid.dx / 2**i for i in range(4)]
    residuals = [mf.maxwell_residual(packet, dt_probe=p) for p in probes]
    slope = np.polyfit(np.log(probes), np.log(residuals), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_maxwell_band_edge_packet_is_flagged():
    grid = mf.make_grid(1024, 0.1)
    smooth = mf.gaussian_packet(grid, 1, "H", 0.0, 20 * grid.dx, 3.0)
    edgy = mf.gaussian_packet(grid, 1, "H", 0.0, 4 * grid.dx, 21.0)
    smooth_residual = mf.maxwell_residual(smooth, dt_probe=0.01 * grid.dx)
    with pytest.warns(mf.BandEdgeWarning):
        edge_residual = mf.maxwell_residual(edgy, dt_probe=0.01 * grid.dx)
    assert edge_residual > 100 * smooth_residual


def test_dimensional_scaling(grid):
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 8 * grid.dx, 2.0)
    natural = mf.natural_units()
    scaled = mf.UnitSystem(hbar=3.0, c=1.0, epsilon=1.0, mu=1.0, area=2.0)
    kernel = mf.sqrt_abs_k_kernel()
    assert mf.energy_total(packet, kernel, scaled) == pytest.approx(
        3.0 * mf.energy_total(packet, kernel, natural), rel=1e-12
    )
    p_nat = mf.field_profiles(_sqrt_position(packet), natural)
    p_scl = mf.field_profiles(_sqrt_position(packet), scaled)
    np.testing.assert_allclose(p_scl.e_y, np.sqrt(3.0 / 2.0) * p_nat.e_y, rtol=1e-12)


def test_profiles_csv_emitter(grid):
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 8 * grid.dx, 2.0)
    profiles = mf.field_profiles(_sqrt_position(packet))
    text = mf.profiles_to_csv(profiles, kernel=mf.sqrt_abs_k_kernel())
    lines = text.splitlines()
    assert lines[0].startswith("# units:")
    assert "kernel: kind=sqrt_abs_k" in lines[1]
    assert lines[2] == "x,E_y,E_z,B_y,B_z,u"
    assert len(lines) == 3 + grid.n_points
    row = lines[3 + grid.index_of_x(0.0)].split(",")
    assert float(row[0]) == 0.0
    assert float(row[1]) == pytest.approx(profiles.e_y[grid.index_of_x(0.0)], rel=1e-15)


def test_maxwell_holds_in_any_unit_system():
    grid = mf.make_grid(512, 0.1)
    units = mf.UnitSystem(hbar=2.0, c=0.5, epsilon=4.0, mu=1.0, area=3.0)
    packet = mf.gaussian_packet(grid, 1, "H", 0.0, 15 * grid.dx, 3.0)
    residual = mf.maxwell_residual(packet, units, dt_probe=0.01 * grid.dx / units.c)
    profiles = mf.field_profiles(mf.to_position(packet, mf.sqrt_abs_k_kernel()), units)
    peak_e = np.max(np.abs(profiles.e_y))
    assert residual <= 1e-5 * peak_e / grid.dx
