"""Scenario runner and command-line interface.

Scenario files are TOML; data payloads are the CSV/NDJSON/binary formats
defined by the owning modules.  The runner owns all picture bookkeeping:
the simulation state is kept as Schroedinger-picture momentum amplitudes
at an absolute clock t, free evolution advances the clock, mirror
windows convert to the interaction picture (|psi_I(t)> = U_dyn^dag(t,0)
|psi_S(t)>), integrate, and convert back.  A ``scatter`` event applies
the closed-form scattering operator, which acts per wavenumber and hence
commutes with free evolution: it treats the current state as the
incoming asymptote and re-dates the outgoing asymptote to the same
clock, so snapshots are physically meaningful once the outgoing packets
have cleared the interface.

Exit codes: 0 success, 2 scenario schema violations (with a
line-anchored message), 1 runtime failures or warnings under --strict.
Numerical warnings (wrap-around, band edge, off-lattice snapping) are
emitted as NDJSON records on stderr.

Subcommands: run, propagate, scatter, spectrum, mirror-evolve,
observables, check.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .grid import Grid, UnitSystem, make_grid, natural_units
from .fields import (
    AmplitudeField,
    band_flat_packet,
    from_binary,
    gaussian_packet,
    to_binary,
    to_momentum,
    to_ndjson,
    to_position,
    zero_field,
)
from .observables import (
    band_edge_fraction,
    energy_by_channel,
    field_profiles,
    profiles_to_csv,
)
from .propagation import evolve_free
from .transforms import KernelKind, KernelSpec, flat_kernel, sqrt_abs_k_kernel
from .mirror import (
    MirrorKernel,
    SeparableMirrorKernel,
    apply_scattering,
    dense_kernel_from_bytes,
    evolve_mirror,
    gaussian_mirror_kernel,
    minimum_steps,
    scattering_equivalence_check,
    scattering_unitary,
    separable_kernel_from_csv,
    spectrum_to_csv,
    xi_spectrum,
)

OUT_DIR_ENV = "MIRRORFIELD_OUT_DIR"

_SNAPSHOT_OUTPUTS = ("profiles", "energy", "state_ndjson", "state_binary", "state_position_ndjson")


class ScenarioError(Exception):
    """Scenario file violates the schema; message carries a file/line anchor."""


# --- scenario parsing --------------------------------------------------------


@dataclass
class Scenario:
    grid: Grid
    units: UnitSystem
    representation: KernelSpec
    packets: list
    mirror: MirrorKernel | None
    schedule: list
    out_dir: str | None
    write_spectrum: bool
    source: Path
    text: str


def _line_of(text: str, needle: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


def _anchor(path: Path, text: str, needle: str, message: str) -> ScenarioError:
    lineno = _line_of(text, needle)
    where = f"{path}:{lineno}" if lineno else f"{path}"
    return ScenarioError(f"{where}: {message}")


def _expect_table(raw: dict, key: str, path: Path, text: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise _anchor(path, text, key, f"[{key}] must be a table")
    return value


def load_scenario(path: str | os.PathLike) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario file ({exc})") from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: TOML parse error: {exc}") from exc

    grid_conf = _expect_table(raw, "grid", path, text)
    try:
        grid = make_grid(int(grid_conf["n_points"]), float(grid_conf["dx"]))
    except KeyError as exc:
        raise _anchor(path, text, "grid", f"[grid] missing key {exc}") from exc
    except ValueError as exc:
        raise _anchor(path, text, "grid", str(exc)) from exc

    units_conf = _expect_table(raw, "units", path, text)
    try:
        units = UnitSystem(**units_conf) if units_conf else natural_units()
    except (TypeError, ValueError) as exc:
        raise _anchor(path, text, "units", str(exc)) from exc

    rep_conf = _expect_table(raw, "representation", path, text)
    rep_kind = rep_conf.get("kernel", "sqrt_abs_k")
    try:
        representation = KernelSpec(KernelKind(rep_kind), float(rep_conf.get("phase", 0.0)))
    except ValueError as exc:
        raise _anchor(path, text, "representation", str(exc)) from exc

    packets = raw.get("packets", [])
    if not isinstance(packets, list):
        raise _anchor(path, text, "packets", "[[packets]] must be an array of tables")
    for index, packet in enumerate(packets):
        kind = packet.get("type")
        if kind not in ("gaussian", "band_flat"):
            raise _anchor(
                path, text, "packets", f"packet #{index + 1}: unknown type {kind!r}"
            )
        if packet.get("s") not in (1, -1):
            raise _anchor(path, text, "packets", f"packet #{index + 1}: s must be 1 or -1")
        if packet.get("polarization", "H") not in ("H", "V"):
            raise _anchor(
                path, text, "packets", f"packet #{index + 1}: polarization must be H or V"
            )

    mirror = None
    if "mirror" in raw:
        mirror_conf = _expect_table(raw, "mirror", path, text)
        mirror = _build_mirror(mirror_conf, grid, units, path, text)

    schedule = raw.get("schedule", [])
    if not isinstance(schedule, list):
        raise _anchor(path, text, "schedule", "[[schedule]] must be an array of tables")
    for index, event in enumerate(schedule):
        op = event.get("op")
        if op not in ("free", "scatter", "mirror", "snapshot"):
            raise _anchor(path, text, "schedule", f"event #{index + 1}: unknown op {op!r}")
        if op in ("free", "mirror") and "duration" not in event:
            raise _anchor(
                path, text, "schedule", f"event #{index + 1}: op {op!r} needs a duration"
            )
        if op in ("scatter", "mirror") and mirror is None:
            raise _anchor(
                path, text, "schedule",
                f"event #{index + 1}: op {op!r} requires a [mirror] section",
            )
        if op == "snapshot":
            for output in event.get("outputs", ["profiles", "energy"]):
                if output not in _SNAPSHOT_OUTPUTS:
                    raise _anchor(
                        path, text, "schedule",
                        f"event #{index + 1}: unknown snapshot output {output!r}",
                    )

    output_conf = _expect_table(raw, "output", path, text)
    return Scenario(
        grid=grid,
        units=units,
        representation=representation,
        packets=packets,
        mirror=mirror,
        schedule=schedule,
        out_dir=output_conf.get("directory"),
        write_spectrum=bool(output_conf.get("spectrum", mirror is not None)),
        source=path,
        text=text,
    )


def _build_mirror(
    conf: dict, grid: Grid, units: UnitSystem, path: Path, text: str
) -> MirrorKernel:
    kind = conf.get("kind", "separable")
    if kind not in ("separable", "dense"):
        raise _anchor(path, text, "mirror", f"unknown mirror kind {kind!r}")
    if "file" in conf:
        kernel_path = Path(conf["file"])
        if not kernel_path.is_absolute():
            kernel_path = path.parent / kernel_path
        try:
            return load_kernel_file(kernel_path, grid)
        except (OSError, ValueError) as exc:
            raise _anchor(path, text, "mirror", f"kernel file {kernel_path}: {exc}") from exc
    if kind == "dense":
        raise _anchor(path, text, "mirror", "dense mirrors must come from a file")
    shape = conf.get("shape", "gaussian")
    if shape != "gaussian":
        raise _anchor(path, text, "mirror", f"unknown separable mirror shape {shape!r}")
    try:
        return gaussian_mirror_kernel(
            grid,
            total_angle=float(conf["total_angle"]),
            sigma=float(conf["sigma"]),
            center=float(conf.get("center", 0.0)),
            support_halfwidth=(
                float(conf["support_halfwidth"]) if "support_halfwidth" in conf else None
            ),
            units=units,
        )
    except KeyError as exc:
        raise _anchor(path, text, "mirror", f"[mirror] missing key {exc}") from exc
    except ValueError as exc:
        raise _anchor(path, text, "mirror", str(exc)) from exc


def load_kernel_file(path: Path, grid: Grid | None = None) -> MirrorKernel:
    """Load a mirror kernel, sniffing dense binary (magic MKRN) vs separable CSV."""
    blob = Path(path).read_bytes()
    if blob[:4] == b"MKRN":
        if grid is None:
            n = int.from_bytes(blob[4:8], "little")
            dx = np.frombuffer(blob[8:16], dtype="<f8")[0]
            grid = make_grid(n, float(dx))
        return dense_kernel_from_bytes(blob, grid)
    return separable_kernel_from_csv(blob.decode(), grid)


# --- scenario execution ------------------------------------------------------


@dataclass
class _Runner:
    scenario: Scenario
    out_dir: Path
    threads: int = 1
    strict: bool = False
    stderr: object = sys.stderr
    warnings_seen: int = 0
    _jobs: list = dataclass_field(default_factory=list)

    def warn(self, event: int, category: str, message: str) -> None:
        record = {"record": "warning", "event": event, "category": category, "message": message}
        print(json.dumps(record, sort_keys=True), file=self.stderr)
        self.warnings_seen += 1

    def queue_file(self, name: str, producer) -> None:
        self._jobs.append((name, producer))

    def flush_files(self) -> None:
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                payloads = list(pool.map(lambda job: job[1](), self._jobs))
        else:
            payloads = [producer() for _, producer in self._jobs]
        for (name, _), payload in zip(self._jobs, payloads):
            target = self.out_dir / name
            if isinstance(payload, bytes):
                target.write_bytes(payload)
            else:
                target.write_text(payload)
        self._jobs.clear()


def _build_initial_state(scenario: Scenario) -> AmplitudeField:
    state = zero_field(scenario.grid)
    for packet in scenario.packets:
        amplitude = complex(packet.get("amplitude_re", 1.0), packet.get("amplitude_im", 0.0))
        common = dict(
            grid=scenario.grid,
            s=packet["s"],
            pol=packet.get("polarization", "H"),
            center_x=float(packet["center_x"]),
            amplitude=amplitude,
        )
        if packet["type"] == "gaussian":
            built = gaussian_packet(
                width_sigma=float(packet["width_sigma"]),
                carrier_k=float(packet.get("carrier_k", 0.0)),
                **common,
            )
        else:
            built = band_flat_packet(phase=float(packet.get("phase", 0.0)), **common)
        state = state.with_data(state.data + built.data)
    return state


def _ledger_row(event: int, label: str, t: float, state: AmplitudeField, units: UnitSystem,
                kernel: KernelSpec) -> str:
    per_channel = energy_by_channel(state, kernel, units)
    total = float(per_channel.sum())
    e_plus, e_minus = float(per_channel[0].sum()), float(per_channel[1].sum())
    frac_plus = e_plus / total if total > 0 else 0.0
    frac_minus = e_minus / total if total > 0 else 0.0
    values = [event, label, t, total, e_plus, e_minus, frac_plus, frac_minus]
    return ",".join(str(v) if isinstance(v, (int, str)) else repr(float(v)) for v in values)


def _numerical_checks(runner: _Runner, event: int, state: AmplitudeField) -> None:
    edge = band_edge_fraction(state)
    if edge > 1e-9:
        runner.warn(
            event, "band-edge",
            f"fraction {edge:.3e} of the spectral weight lies beyond 0.8*k_max",
        )
    position = to_position(state, flat_kernel())
    profile = np.max(np.abs(position.data), axis=(0, 1))
    peak = float(profile.max())
    if peak > 0 and float(max(profile[0], profile[-1])) > 1e-8 * peak:
        runner.warn(
            event, "wrap-around",
            "packet support reaches the periodic boundary; translations wrap",
        )


def run_scenario(
    scenario: Scenario,
    out_dir: str | os.PathLike | None = None,
    threads: int = 1,
    strict: bool = False,
    stderr=None,
) -> int:
    """Execute a scenario deterministically; returns the process exit code."""
    resolved = out_dir or os.environ.get(OUT_DIR_ENV) or scenario.out_dir or "."
    runner = _Runner(
        scenario,
        Path(resolved),
        threads=threads,
        strict=strict,
        stderr=stderr if stderr is not None else sys.stderr,
    )
    runner.out_dir.mkdir(parents=True, exist_ok=True)

    units = scenario.units
    ledger_kernel = (
        scenario.representation
        if scenario.representation.kind != KernelKind.STANDARD_POSITIVE_ONLY
        else sqrt_abs_k_kernel()
    )

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        state = _build_initial_state(scenario)
    for item in caught:
        runner.warn(0, type(item.message).__name__, str(item.message))

    if scenario.mirror is not None and scenario.write_spectrum:
        spectrum = xi_spectrum(scenario.mirror, units)
        runner.queue_file("spectrum.csv", lambda s=spectrum: spectrum_to_csv(s))

    ledger = [
        "event,op,time,E_total,E_s_plus,E_s_minus,frac_s_plus,frac_s_minus",
        _ledger_row(0, "init", 0.0, state, units, ledger_kernel),
    ]
    _numerical_checks(runner, 0, state)

    if not scenario.schedule:
        # an empty schedule still records where the run started
        frozen = state.copy()

        def initial_profiles(current=frozen):
            prof = field_profiles(to_position(current, sqrt_abs_k_kernel()), units)
            return profiles_to_csv(prof, units, sqrt_abs_k_kernel())

        runner.queue_file("profiles_initial.csv", initial_profiles)
        runner.queue_file("state_initial.ndjson", lambda c=frozen: to_ndjson(c))
        runner.queue_file("state_initial.bin", lambda c=frozen: to_binary(c))

    t = 0.0
    snapshot_count = 0
    for number, event in enumerate(scenario.schedule, start=1):
        op = event["op"]
        if op == "free":
            duration = float(event["duration"])
            state = evolve_free(state, duration, units)
            t += duration
        elif op == "scatter":
            spectrum = xi_spectrum(scenario.mirror, units)
            state = apply_scattering(state, spectrum)
        elif op == "mirror":
            duration = float(event["duration"])
            steps = int(event["steps"]) if "steps" in event else None
            method = event.get("method", "auto")
            interaction = to_position(evolve_free(state, -t, units), flat_kernel())
            evolved = evolve_mirror(
                interaction, scenario.mirror, t, t + duration, steps, method, units
            )
            state = evolve_free(to_momentum(evolved), t + duration, units)
            t += duration
        else:  # snapshot
            snapshot_count += 1
            label = event.get("label", f"snapshot{snapshot_count}")
            outputs = event.get("outputs", ["profiles", "energy"])
            frozen = state.copy()
            if "profiles" in outputs:
                def profiles_payload(current=frozen):
                    prof = field_profiles(to_position(current, sqrt_abs_k_kernel()), units)
                    return profiles_to_csv(prof, units, sqrt_abs_k_kernel())

                runner.queue_file(f"profiles_{label}.csv", profiles_payload)
            if "state_ndjson" in outputs:
                runner.queue_file(f"state_{label}.ndjson", lambda c=frozen: to_ndjson(c))
            if "state_binary" in outputs:
                runner.queue_file(f"state_{label}.bin", lambda c=frozen: to_binary(c))
            if "state_position_ndjson" in outputs:
                def position_payload(current=frozen):
                    return to_ndjson(to_position(current, scenario.representation))

                runner.queue_file(f"state_position_{label}.ndjson", position_payload)
        ledger.append(_ledger_row(number, op, t, state, units, ledger_kernel))
        _numerical_checks(runner, number, state)

    runner.queue_file("energy_ledger.csv", lambda rows=tuple(ledger): "\n".join(rows) + "\n")
    runner.flush_files()

    if strict and runner.warnings_seen:
        print(
            f"error: --strict and {runner.warnings_seen} warning(s) were emitted",
            file=runner.stderr,
        )
        return 1
    return 0


# --- check -------------------------------------------------------------------


def _auto_horizon(state: AmplitudeField, kernel: MirrorKernel, units: UnitSystem) -> float:
    """A horizon long enough for every populated incoming site to cross the mirror."""
    position = to_position(state, flat_kernel()) if state.representation == "momentum" else state
    profile = np.max(np.abs(position.data), axis=(0, 1))
    peak = profile.max()
    grid = position.grid
    span = grid.length / 2.0
    if peak > 0:
        populated = np.nonzero(profile > 1e-9 * peak)[0]
        span = float(
            max(abs(grid.x_values[populated[0]]), abs(grid.x_values[populated[-1]]))
        )
    if isinstance(kernel, SeparableMirrorKernel):
        bounds = kernel.support_bounds
    else:
        bounds = None
        if kernel.support is not None:
            r_lo, r_hi, c_lo, c_hi = kernel.support
            bounds = (
                min(grid.x_values[r_lo], grid.x_values[c_lo]),
                max(grid.x_values[r_hi], grid.x_values[c_hi]),
            )
    reach = max(abs(b) for b in bounds) if bounds else 0.0
    return (span + reach + 4.0 * grid.dx) / units.c


def run_check(scenario: Scenario, out_dir: str | os.PathLike | None, stdout) -> int:
    """Oracle gates + engine cross-validation, printed as a pass/fail table."""
    units = scenario.units
    rows = []

    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(100):
        xi = rng.uniform(0.0, 10.0) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        u = scattering_unitary(xi)
        worst = max(worst, float(np.max(np.abs(u @ u.conj().T - np.eye(2)))))
    rows.append(("unitary_gate", worst, 1e-13))

    report = None
    if scenario.mirror is not None and scenario.packets:
        state = _build_initial_state(scenario)
        horizon = _auto_horizon(state, scenario.mirror, units)
        try:
            report = scattering_equivalence_check(
                state, scenario.mirror, (0.0, horizon), units=units
            )
            rows.append(("scattering_equivalence", report.max_discrepancy, 1e-6))
        except ValueError as exc:
            rows.append((f"scattering_equivalence ({exc})", float("inf"), 1e-6))

        if isinstance(scenario.mirror, SeparableMirrorKernel):
            interaction = to_position(state, flat_kernel())
            steps = 2 * minimum_steps(scenario.mirror, 0.0, horizon, units)
            via_rotation = evolve_mirror(
                interaction, scenario.mirror, 0.0, horizon, method="rotation", units=units
            )
            via_rk4 = evolve_mirror(
                interaction, scenario.mirror, 0.0, horizon, steps=steps, method="rk4", units=units
            )
            diff = float(np.max(np.abs(via_rotation.data - via_rk4.data)))
            rows.append(("rk4_vs_rotation", diff, 1e-6))

    all_pass = True
    print(f"{'gate':<28}{'value':>14}{'tolerance':>12}  status", file=stdout)
    for name, value, tolerance in rows:
        ok = value <= tolerance
        all_pass &= ok
        print(
            f"{name:<28}{value:>14.3e}{tolerance:>12.0e}  {'PASS' if ok else 'FAIL'}",
            file=stdout,
        )

    if out_dir and report is not None:
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        (target / "equivalence_report.json").write_text(report.to_json() + "\n")
    return 0 if all_pass else 1


# --- entry point ---------------------------------------------------------------


def _load_state(path: str) -> AmplitudeField:
    return from_binary(Path(path).read_bytes())


def _write_or_print(payload: str, out: str | None, stdout) -> None:
    if out:
        Path(out).write_text(payload)
    else:
        stdout.write(payload)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mirrorfield",
        description="1D position-space quantized field simulator with mirror scattering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out-dir", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--strict", action="store_true", help="warnings become errors")

    p_prop = sub.add_parser("propagate", help="free-evolve a binary state")
    p_prop.add_argument("--state", required=True)
    p_prop.add_argument("--duration", type=float, required=True)
    p_prop.add_argument("--out", required=True)

    p_scat = sub.add_parser("scatter", help="apply the closed-form scattering operator")
    p_scat.add_argument("--state", required=True)
    p_scat.add_argument("--kernel", required=True)
    p_scat.add_argument("--out", required=True)

    p_spec = sub.add_parser("spectrum", help="Xi_k spectrum of a mirror kernel as CSV")
    p_spec.add_argument("--kernel", required=True)
    p_spec.add_argument("--out", default=None)

    p_mev = sub.add_parser("mirror-evolve", help="time-resolved interaction-picture evolution")
    p_mev.add_argument("--state", required=True)
    p_mev.add_argument("--kernel", required=True)
    p_mev.add_argument("--t-start", type=float, required=True)
    p_mev.add_argument("--t-end", type=float, required=True)
    p_mev.add_argument("--steps", type=int, default=None)
    p_mev.add_argument("--method", default="auto", choices=["auto", "rotation", "rk4"])
    p_mev.add_argument("--out", required=True)

    p_obs = sub.add_parser("observables", help="E/B/energy-density profiles as CSV")
    p_obs.add_argument("--state", required=True)
    p_obs.add_argument("--out", default=None)

    p_check = sub.add_parser("check", help="oracle gates and engine cross-validation")
    p_check.add_argument("--scenario", required=True)
    p_check.add_argument("--out-dir", default=None)

    args = parser.parse_args(argv)
    stdout = sys.stdout

    try:
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            return run_scenario(scenario, args.out_dir, args.threads, args.strict)

        if args.command == "propagate":
            state = _load_state(args.state)
            if state.representation != "momentum":
                state = to_momentum(state)
            Path(args.out).write_bytes(to_binary(evolve_free(state, args.duration)))
            return 0

        if args.command == "scatter":
            state = _load_state(args.state)
            if state.representation != "momentum":
                state = to_momentum(state)
            kernel = load_kernel_file(Path(args.kernel), state.grid)
            scattered = apply_scattering(state, xi_spectrum(kernel))
            Path(args.out).write_bytes(to_binary(scattered))
            return 0

        if args.command == "spectrum":
            kernel = load_kernel_file(Path(args.kernel))
            _write_or_print(spectrum_to_csv(xi_spectrum(kernel)), args.out, stdout)
            return 0

        if args.command == "mirror-evolve":
            state = _load_state(args.state)
            if state.representation == "momentum":
                state = to_position(state, flat_kernel())
            kernel = load_kernel_file(Path(args.kernel), state.grid)
            evolved = evolve_mirror(
                state, kernel, args.t_start, args.t_end, args.steps, args.method
            )
            Path(args.out).write_bytes(to_binary(evolved))
            return 0

        if args.command == "observables":
            state = _load_state(args.state)
            if state.representation != "momentum":
                state = to_momentum(state)
            profiles = field_profiles(to_position(state, sqrt_abs_k_kernel()))
            _write_or_print(profiles_to_csv(profiles, kernel=sqrt_abs_k_kernel()), args.out, stdout)
            return 0

        if args.command == "check":
            scenario = load_scenario(args.scenario)
            return run_check(scenario, args.out_dir or os.environ.get(OUT_DIR_ENV), stdout)

    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
