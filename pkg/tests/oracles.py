"""Independent reference implementations the engines are validated against.

These deliberately share no code with the library: the unitary comes
from an eigendecomposition instead of the hard-coded closed form, the
free-propagation reference is the analytic translated Gaussian, the
rotation solution applies the 2x2 rotation matrix literally, and the
quadratures go through scipy.integrate.
"""

import numpy as np
from scipy.integrate import quad


def dense_unitary_oracle(xi: complex) -> np.ndarray:
    """exp(-i G) for G = [[0, xi*], [xi, 0]] via eigendecomposition of G."""
    g = np.array([[0.0, np.conj(xi)], [xi, 0.0]], dtype=complex)
    eigenvalues, vectors = np.linalg.eigh(g)
    return vectors @ np.diag(np.exp(-1j * eigenvalues)) @ vectors.conj().T


def gaussian_translation_oracle(grid, s, x0, sigma, k0, amplitude, t, c=1.0):
    """Analytic flat-kernel position profile of a translated Gaussian packet.

    a(x, t) = A (pi sigma^2)^(-1/4) exp(-u^2 / (2 sigma^2)) exp(i s k0 u)
    with u = x - x0 - s c t; normalized so the position-space L2 norm is
    |A|.  Valid while the packet is far from the band edge and the
    boundary.
    """
    u = grid.x_values - x0 - np.sign(s) * c * t
    envelope = (np.pi * sigma**2) ** -0.25 * np.exp(-(u**2) / (2.0 * sigma**2))
    return amplitude * envelope * np.exp(1j * np.sign(s) * k0 * u)


def rotation_solution_oracle(a_plus_0, a_minus_0, theta):
    """The closed-form rotation [[cos, -sin], [sin, cos]] applied literally."""
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    return (
        cos_t * a_plus_0 - sin_t * a_minus_0,
        sin_t * a_plus_0 + cos_t * a_minus_0,
    )


def sqrt_overlap_closed_form(k_max: float, delta: float) -> float:
    """(1/2 pi) integral of |k| e^{i k delta} over [-k_max, k_max], by hand.

    Evaluates to (k_max delta sin(k_max delta) + cos(k_max delta) - 1)
    / (pi delta^2); the imaginary part vanishes by antisymmetry.
    """
    kd = k_max * delta
    return (kd * np.sin(kd) + np.cos(kd) - 1.0) / (np.pi * delta**2)


def sqrt_overlap_quadrature(k_max: float, delta: float) -> complex:
    """Same integral by adaptive quadrature (independent of the closed form)."""
    real, _ = quad(lambda k: abs(k) * np.cos(k * delta) / (2 * np.pi), -k_max, k_max, limit=200)
    imag, _ = quad(lambda k: abs(k) * np.sin(k * delta) / (2 * np.pi), -k_max, k_max, limit=200)
    return real + 1j * imag


def linear_profile_angle(x_knots, omega_samples, a: float, b: float, c: float = 1.0) -> float:
    """(1/c) integral over [a, b] of the piecewise-linear interpolant of the samples.

    Independent quadrature (scipy) with the knots passed as breakpoints.
    """
    def interpolant(u):
        return np.interp(u, x_knots, omega_samples, left=0.0, right=0.0)

    inside = x_knots[(x_knots > a) & (x_knots < b)]
    total = 0.0
    # quad caps the number of breakpoints; integrate in chunks of knots
    edges = np.concatenate(([a], inside, [b]))
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = quad(interpolant, lo, hi, limit=50)
        total += value
    return total / c
