import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mirrorfield as mf
from mirrorfield.transforms import forward_channel, inverse_channel

from conftest import random_field
from oracles import sqrt_overlap_closed_form, sqrt_overlap_quadrature


def test_flat_round_trip_random_fields(grid, rng):
    for _ in range(20):
        field = random_field(grid, rng)
        back = mf.to_momentum(mf.to_position(field, mf.flat_kernel()))
        assert np.max(np.abs(back.data - field.data)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(phase=st.floats(min_value=0.0, max_value=6.28), seed=st.integers(0, 2**32 - 1))
def test_flat_round_trip_any_phase(phase, seed):
    grid = mf.make_grid(64, 0.5)
    field = random_field(grid, np.random.default_rng(seed))
    kernel = mf.flat_kernel(phase)
    back = mf.to_momentum(mf.to_position(field, kernel))
    assert np.max(np.abs(back.data - field.data)) < 1e-12


def test_positive_only_is_not_invertible(grid, rng):
    field = random_field(grid, rng)
    position = mf.to_position(field, mf.standard_positive_only_kernel())
    with pytest.raises(mf.NonInvertibleKernelError):
        mf.to_momentum(position)


def test_positive_only_forces_phase():
    with pytest.raises(ValueError):
        mf.KernelSpec(mf.KernelKind.STANDARD_POSITIVE_ONLY, 0.0)


def test_sqrt_round_trip_vs_dense_matrix_inverse(rng):
    # pseudo-inverse oracle: build the forward matrix explicitly on n = 64
    grid = mf.make_grid(64, 0.5)
    kernel = mf.sqrt_abs_k_kernel(0.7)
    f = kernel.values(grid.k_values)
    for s in (1, -1):
        forward = f[None, :] * np.exp(1j * s * np.outer(grid.x_values, grid.k_values)) * grid.dk
        alpha = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        alpha[grid.index_of_k(0.0)] = 0.0  # stay off the null mode
        a = forward_channel(alpha, grid, kernel, s)
        np.testing.assert_allclose(a, forward @ alpha, atol=1e-10)
        recovered = inverse_channel(a, grid, kernel, s)
        via_pinv = np.linalg.pinv(forward) @ a
        np.testing.assert_allclose(recovered, via_pinv, atol=1e-10)
        np.testing.assert_allclose(recovered, alpha, atol=1e-10)


def test_sqrt_kernel_k0_null_mode(grid):
    field = mf.zero_field(grid)
    field.data[0, 0, grid.index_of_k(0.0)] = 1.0
    position = mf.to_position(field, mf.sqrt_abs_k_kernel())
    assert np.max(np.abs(position.data)) == 0.0  # f(0) = 0 annihilates it
    back = mf.to_momentum(position)
    assert np.max(np.abs(back.data)) == 0.0  # pseudo-inverse maps it to zero


def test_single_mode_becomes_plane_wave(grid):
    kernel = mf.flat_kernel()
    m = grid.index_of_k(2.0)
    k0 = grid.k_values[m]
    for s in (1, -1):
        field = mf.zero_field(grid)
        field.data[0 if s == 1 else 1, 0, m] = 1.0
        position = mf.to_position(field, kernel)
        expected = kernel.values(np.array([k0]))[0] * np.exp(1j * s * k0 * grid.x_values) * grid.dk
        np.testing.assert_allclose(position.channel(s, "H"), expected, atol=1e-14)


def test_uniform_spectrum_is_lattice_delta(grid):
    field = mf.zero_field(grid)
    field.data[0, 0, :] = 1.0
    position = mf.to_position(field, mf.flat_kernel())
    profile = position.channel(1, "H")
    center = grid.index_of_x(0.0)
    # all phases align at x = 0: peak = n dk / sqrt(2 pi)
    assert profile[center] == pytest.approx(
        grid.n_points * grid.dk / np.sqrt(2 * np.pi), rel=1e-12
    )
    off_peak = np.delete(np.abs(profile), center)
    assert np.max(off_peak) < 1e-12 * abs(profile[center])


def test_band_flat_sqrt_construction_is_localized(grid):
    # alpha(k) = C / f(k) makes the sqrt-kernel position profile a real
    # band-limited delta, the localized-packet construction
    kernel = mf.sqrt_abs_k_kernel()
    f = kernel.values(grid.k_values)
    field = mf.zero_field(grid)
    nonzero = f != 0
    field.data[0, 0, nonzero] = 0.5 / f[nonzero]
    position = mf.to_position(field, kernel)
    profile = position.channel(1, "H")
    center = grid.index_of_x(0.0)
    np.testing.assert_allclose(profile.imag, 0.0, atol=1e-12 * abs(profile[center]))
    assert abs(profile[center]) == pytest.approx(
        0.5 * (grid.n_points - 1) * grid.dk, rel=1e-12
    )
    # off-center the profile is the (small) band-limited delta tail
    assert np.max(np.abs(np.delete(profile, center))) < 0.01 * abs(profile[center])


def test_overlap_flat_is_lattice_delta(grid):
    kernel = mf.flat_kernel()
    at_zero = mf.overlap_kernel(grid, kernel, 1, 0.0)
    assert at_zero.real == pytest.approx(1.0 / grid.dx, rel=1e-12)
    assert at_zero.imag == pytest.approx(0.0, abs=1e-12)
    for m in (1, 2, 7, -5):
        value = mf.overlap_kernel(grid, kernel, 1, m * grid.dx)
        assert abs(value) < 1e-12 / grid.dx


def test_overlap_sqrt_closed_form():
    # fine lattice with k_max = pi (dx = 1), compared against the
    # hand-integrated closed form and adaptive quadrature
    grid = mf.make_grid(8192, 1.0)
    kernel = mf.sqrt_abs_k_kernel()
    delta = 0.5
    closed = sqrt_overlap_closed_form(np.pi, delta)
    quad_value = sqrt_overlap_quadrature(np.pi, delta)
    assert closed == pytest.approx(quad_value.real, rel=1e-10)
    assert abs(quad_value.imag) < 1e-10
    discrete = mf.overlap_kernel(grid, kernel, 1, delta)
    assert discrete.real == pytest.approx(closed, rel=2e-3)
    # Riemann-sum error shrinks with dk: quadruple n, error drops
    finer = mf.overlap_kernel(mf.make_grid(32768, 1.0), kernel, 1, delta)
    assert abs(finer.real - closed) < abs(discrete.real - closed)


def test_overlap_sqrt_decays_and_matches_flat_scaling(grid):
    sqrt_kernel = mf.sqrt_abs_k_kernel()
    flat = mf.flat_kernel()
    at_zero = mf.overlap_kernel(grid, sqrt_kernel, 1, 0.0).real
    mean_abs_k = float(np.mean(np.abs(grid.k_values)))
    flat_delta = mf.overlap_kernel(grid, flat, 1, 0.0).real
    # lattice identity: sqrt overlap peak = flat delta height * band mean |k|
    assert at_zero == pytest.approx(flat_delta * mean_abs_k, rel=1e-12)
    tail = max(
        abs(mf.overlap_kernel(grid, sqrt_kernel, 1, m * grid.dx)) for m in (4, 9, 16, 33)
    )
    assert tail < 0.2 * at_zero


def test_overlap_sqrt_imaginary_part_vanishes_on_lattice(grid):
    # the commutator integrand sum |f|^2 sin(k delta) cancels by
    # antisymmetry at lattice separations (band edge contributes sin(pi m) = 0)
    for m in (0, 1, 3, 10, -7):
        value = mf.overlap_kernel(grid, mf.sqrt_abs_k_kernel(), 1, m * grid.dx)
        assert abs(value.imag) < 1e-12 * (1.0 / grid.dx)


def test_phase_covariance_band_reweighting(grid, rng):
    # changing phi multiplies positive-k amplitudes by e^{i phi} and
    # negative-k ones by e^{-i phi} when recovering momentum amplitudes
    phi = 0.9
    field = random_field(grid, rng)
    position = mf.to_position(field, mf.flat_kernel())
    rephased = mf.to_momentum(position.with_data(position.data, kernel=mf.flat_kernel(phi)))
    sign = np.sign(grid.k_values)
    expected = field.data * np.exp(-1j * sign * phi)
    np.testing.assert_allclose(rephased.data, expected, atol=1e-12)


def test_phase_covariance_delta_profile_invariant(grid):
    # the phi-matched band-flat packet stays a lattice delta for every phi
    reference = None
    for phi in (0.0, 0.4, np.pi / 2, 3.0):
        packet = mf.band_flat_packet(grid, 1, "H", 2 * grid.dx, phase=phi)
        position = mf.to_position(packet, mf.flat_kernel(phi))
        profile = np.abs(position.channel(1, "H"))
        if reference is None:
            reference = profile
        np.testing.assert_allclose(profile, reference, atol=1e-12 * profile.max())


def test_positive_only_equals_masked_sqrt(grid, rng):
    field = random_field(grid, rng)
    masked = field.copy()
    masked.data[..., grid.k_values < 0] = 0.0
    via_positive_only = mf.to_position(field, mf.standard_positive_only_kernel())
    via_sqrt = mf.to_position(masked, mf.sqrt_abs_k_kernel(np.pi / 2))
    np.testing.assert_allclose(via_positive_only.data, via_sqrt.data, atol=1e-12)


def test_flat_transform_preserves_inner_products(grid, rng):
    # discrete statement of the bosonic commutator delta(x - x')
    a = random_field(grid, rng)
    b = random_field(grid, rng)
    pa = mf.to_position(a, mf.flat_kernel())
    pb = mf.to_position(b, mf.flat_kernel())
    before = np.sum(np.conj(a.data) * b.data) * grid.dk
    after = np.sum(np.conj(pa.data) * pb.data) * grid.dx
    assert abs(before - after) < 1e-12 * abs(before)


def test_representation_mismatch_errors(grid, rng):
    field = random_field(grid, rng)
    with pytest.raises(ValueError):
        mf.to_momentum(field)  # already momentum
    position = mf.to_position(field, mf.flat_kernel())
    with pytest.raises(ValueError):
        mf.to_position(position, mf.flat_kernel())
    with pytest.raises(ValueError):
        mf.to_momentum(position, mf.sqrt_abs_k_kernel())  # wrong kernel
