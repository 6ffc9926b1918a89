"""Scattering off a two-sided semi-transparent mirror, two ways.

The closed-form operator rotates each (k, circular-pol) direction pair
by the angle |Xi_k|; the time-resolved engine integrates the local
coupling as the interaction-picture potential sweeps outward at c.  For
a separable kernel the two agree to machine precision, and a packet's
shape survives reflection exactly (mirror-imaged, scaled by sin).
"""

import numpy as np

import mirrorfield as mf

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    HAS_MPL = True
except ImportError:
    HAS_MPL = False

grid = mf.make_grid(2048, 0.25)
flat = mf.flat_kernel()
units = mf.natural_units()

for angle, label in [(np.pi / 2, "perfect mirror"), (np.pi / 4, "50/50 splitter")]:
    kernel = mf.gaussian_mirror_kernel(grid, angle, sigma=0.5, support_halfwidth=1.0)
    spectrum = mf.xi_spectrum(kernel)
    packet = mf.gaussian_packet(grid, 1, "H", -25.0, 2.0, 3.0)

    scattered = mf.apply_scattering(packet, spectrum)
    energies = mf.energy_by_channel(scattered, mf.sqrt_abs_k_kernel())
    print(f"{label}: |Xi| = {abs(spectrum.xi[0]):.6f}")
    print(f"  reflectance sin^2|Xi| = {np.sin(abs(spectrum.xi[0]))**2:.6f}")
    print(f"  reflected energy fraction (operator) = {energies[1].sum() / energies.sum():.9f}")

    report = mf.scattering_equivalence_check(packet, kernel, (0.0, 160 * grid.dx))
    phase = report.reflected_phase
    print(f"  engines agree to {report.max_discrepancy:.2e}; "
          f"reflected phase convention {phase.real:+.0f}{phase.imag:+.0f}j\n")

# time-resolved movie frames of the pi/2 reflection
kernel = mf.gaussian_mirror_kernel(grid, np.pi / 2, sigma=0.5, support_halfwidth=1.0)
packet = mf.gaussian_packet(grid, 1, "H", -25.0, 2.0, 3.0)
frames = []
for t_end in (0.0, 15.0, 22.0, 25.0, 28.0, 35.0, 50.0):
    interaction = mf.to_position(packet, flat)
    evolved = mf.evolve_mirror(interaction, kernel, 0.0, t_end) if t_end else interaction
    schrodinger = mf.evolve_free(mf.to_momentum(evolved), t_end, units)
    profiles = mf.field_profiles(mf.to_position(schrodinger, mf.sqrt_abs_k_kernel()))
    frames.append((t_end, profiles.energy_density))
    incoming = np.sum(profiles.energy_density[grid.x_values < 0]) * grid.dx
    total = np.sum(profiles.energy_density) * grid.dx
    print(f"t = {t_end:5.1f}: energy left of mirror {incoming / total:.3f}")

if HAS_MPL:
    fig, ax = plt.subplots(figsize=(9, 6))
    for i, (t_end, density) in enumerate(frames):
        ax.plot(grid.x_values, density + 0.4 * i, lw=0.9, label=f"t = {t_end:g}")
    ax.axvline(0.0, color="k", ls=":", lw=0.8)
    ax.set_xlim(-60, 60)
    ax.set_xlabel("x")
    ax.set_ylabel("u(x) (offset per frame)")
    ax.set_title("A wave packet bouncing off a pi/2 mirror at x = 0")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("demo04_mirror_reflection.png", dpi=130)
    print("saved demo04_mirror_reflection.png")
