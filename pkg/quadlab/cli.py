# quadlab/cli.py
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, List, Optional

import typer

from quadlab.common.errors import AttitudeDiverged, QuadlabError

app = typer.Typer(help="Quadcopter flight-dynamics, control and system-identification workbench")

ConfigOpt = typer.Option(None, "--config", "-c", help="Flat key: value workbench config (defaults if omitted)")
SeedOpt = typer.Option(None, "--seed", help="Overrides the config seed")
JsonOpt = typer.Option(False, "--json", help="Print the summary as JSON")
OutOpt = typer.Option(Path("reports"), "--out", "-o", help="Output directory")


def load_cfg(path: Optional[Path]):
    # lazy import keeps `--help` fast
    from quadlab.logio.config import load_config

    return load_config(path)


def _emit(summary: dict, as_json: bool) -> None:
    from quadlab.common.reporters import to_json

    if as_json:
        typer.echo(to_json(summary))
        return
    for k, v in summary.items():
        typer.echo(f"{k}: {v}")


def _guard(fn: Callable[[], None]) -> None:
    """QuadlabError / bad arguments -> message on stderr and exit 1; divergence -> exit 2."""
    try:
        fn()
    except AttitudeDiverged as e:
        typer.echo(f"AttitudeDiverged: {e}", err=True)
        raise typer.Exit(2)
    except (QuadlabError, ValueError) as e:
        typer.echo(f"{type(e).__name__}: {e}", err=True)
        raise typer.Exit(1)


@app.command("simulate")
def cmd_simulate(
    scenario: str = typer.Option("hover", help="Scenario name, e.g. impulse-roll, chirp-pitch, doublet-yaw"),
    plant: str = typer.Option("nonlinear", help="nonlinear | linear"),
    open_loop: bool = typer.Option(False, "--open-loop", help="Kill switch on, no stabilization"),
    perturb: bool = typer.Option(False, "--perturb", help="With --open-loop: 1% extra thrust on rotor 1"),
    loop_rate: Optional[float] = typer.Option(None, "--loop-rate", help="Control loop rate in Hz"),
    duration: Optional[float] = typer.Option(None, help="Seconds (scenario default if omitted)"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
    out: Path = OutOpt,
):
    """Fly a scenario; writes the flight log, trajectory and summary."""
    def run():
        from quadlab.common.io import write_frame_csv
        from quadlab.common.reporters import write_json, write_summary
        from quadlab.controller.closed_loop import closed_loop_simulate, sweep_dt
        from quadlab.controller.scenarios import build_scenario
        from quadlab.logio.flightlog import write_log

        name = scenario
        if open_loop:
            if not perturb:
                raise ValueError("--open-loop needs --perturb (an untouched trim never leaves hover)")
            name = "open-loop-perturb"
        wcfg = load_cfg(config)
        cfg = wcfg.closed_loop(seed)
        dt = wcfg.sim_dt
        if loop_rate is not None:
            cfg = cfg.with_loop_rate(loop_rate)
            dt = sweep_dt(loop_rate, wcfg.sim_dt)
        try:
            res = closed_loop_simulate(plant, cfg, name, dt, duration)
        except AttitudeDiverged as e:
            if e.trajectory is not None:
                write_frame_csv(out / f"trajectory_{name}.csv", e.trajectory)
            raise
        write_log(out / f"log_{name}.csv", res.log)
        write_frame_csv(out / f"trajectory_{name}.csv", res.trajectory)
        write_frame_csv(out / f"channels_{name}.csv", res.channels)
        summary = res.summary()
        summary["plant"] = plant
        summary["loop_rate_hz"] = cfg.cascade.loop_rate_hz
        summary["seed"] = cfg.seed
        summary["filters"] = {"imu": cfg.imu_filter.kind, "receiver": cfg.receiver_filter.kind}
        sc = build_scenario(name, cfg)
        # free responses only; a sweep never settles by construction
        summary["degraded"] = bool(sc.axis and sc.excitation is None and not math.isfinite(res.settling[sc.axis]))
        write_json(out / f"simulate_{name}.json", summary)
        write_summary(out / f"simulate_{name}.txt", f"simulate {name}", summary)
        _emit(summary, as_json)
        if summary["degraded"]:
            typer.echo(f"warning: {name} did not settle at {cfg.cascade.loop_rate_hz:g} Hz", err=True)

    _guard(run)


@app.command("linearize")
def cmd_linearize(
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
    out: Path = OutOpt,
):
    """Hover A/B matrices, eigenvalues, controllability and the printed-model errata."""
    def run():
        from quadlab.common.reporters import write_json
        from quadlab.dynamics.eom import hover_trim
        from quadlab.dynamics.state import BodyState
        from quadlab.linearization import classify, controllability, eigenvalues, errata_report, linearize_at
        from quadlab.linearization import write_matrices

        wcfg = load_cfg(config)
        params = wcfg.vehicle()
        model = linearize_at(BodyState(), hover_trim(params)[1], params)
        poles = eigenvalues(model)
        rank, full = controllability(model)
        summary = {
            "gravity_u_theta": model.entry("u", "theta"),
            "gravity_v_phi": model.entry("v", "phi"),
            "eigenvalues": [complex(p) for p in poles],
            "stability": classify(poles),
            "controllability_rank": rank,
            "controllable": full,
            "errata": errata_report(model),
            "seed": wcfg.seed if seed is None else seed,
        }
        write_matrices(out / "hover_matrices.txt", model)
        write_json(out / "linearize.json", summary)
        _emit(summary, as_json)

    _guard(run)


@app.command("sysid")
def cmd_sysid(
    axis: str = typer.Option("roll", help="roll | pitch | yaw"),
    plant: str = typer.Option("nonlinear", help="nonlinear | linear"),
    kind: str = typer.Option("chirp", help="chirp | piloted"),
    structure: str = typer.Option("full", help="full | roll-angle | pitch-angle | yaw-rate"),
    flight_log: Optional[Path] = typer.Option(None, "--log", help="Identify from an existing flight log"),
    band_lo: float = typer.Option(0.5, help="Fit band low edge, rad/s"),
    band_hi: float = typer.Option(12.0, help="Fit band high edge, rad/s"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
    out: Path = OutOpt,
):
    """Frequency response + LOES fit; writes the FRF/coherence CSV and the model summary."""
    def run():
        from quadlab.controller.scenarios import check_axis
        from quadlab.logio.flightlog import read_log_frame
        from quadlab.sysid.pipeline import end_to_end_identify, identify_from_log

        check_axis(axis)
        wcfg = load_cfg(config)
        band = (band_lo, band_hi)
        if flight_log is not None:
            report = identify_from_log(read_log_frame(flight_log), axis, structure, band, wcfg.window())
            report.flight_log = None
        else:
            cfg = wcfg.closed_loop(seed)
            report = end_to_end_identify(plant, axis, wcfg.chirp(axis), cfg.noise, cfg.seed, cfg,
                                         structure, band, wcfg.window(), kind, wcfg.sim_dt)
        report.write(out)
        _emit(report.summary(), as_json)

    _guard(run)


@app.command("validate")
def cmd_validate(
    model: Path = typer.Option(..., "--model", help="Model summary YAML written by `sysid`"),
    flight_log: Path = typer.Option(..., "--log", help="Flight log holding a doublet"),
    axis: str = typer.Option("roll", help="roll | pitch | yaw"),
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
    out: Path = OutOpt,
):
    """Doublet check of a fitted model: RMS error, peak ratio, lag."""
    def run():
        from quadlab.common.io import write_frame_csv
        from quadlab.common.reporters import write_json
        from quadlab.logio.flightlog import read_log_frame
        from quadlab.sysid.loes import read_model_summary
        from quadlab.validation.timedomain import validate_doublet

        res = validate_doublet(read_model_summary(model), read_log_frame(flight_log), axis)
        write_frame_csv(out / f"doublet_{axis}.csv", res.overlay)
        metrics = res.metrics()
        if seed is not None:
            metrics["seed"] = seed
        write_json(out / f"validate_{axis}.json", metrics)
        _emit(metrics, as_json)

    _guard(run)


@app.command("chirp-gen")
def cmd_chirp_gen(
    axis: str = typer.Option("roll", help="Sets the amplitude from the axis command limit"),
    piloted: bool = typer.Option(False, "--piloted", help="Irregular hand-flown style sweep instead"),
    dt: float = typer.Option(0.01, help="Sample interval, s"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Path = OutOpt,
):
    """Write the excitation sweep (t, delta, omega, phase) as CSV."""
    def run():
        from quadlab.common.io import write_frame_csv
        from quadlab.excitation import chirp_signal, piloted_sweep

        wcfg = load_cfg(config)
        spec = wcfg.chirp(axis)
        frame = piloted_sweep(spec, dt, wcfg.seed if seed is None else seed) if piloted else chirp_signal(spec, dt)
        path = write_frame_csv(out / f"{'piloted' if piloted else 'chirp'}_{axis}.csv", frame)
        typer.echo(f"wrote {len(frame)} samples to {path}")

    _guard(run)


@app.command("geo")
def cmd_geo(
    lat1: float = typer.Argument(..., help="deg"),
    lon1: float = typer.Argument(..., help="deg"),
    lat2: float = typer.Argument(..., help="deg"),
    lon2: float = typer.Argument(..., help="deg"),
    heading: Optional[float] = typer.Option(None, help="Compass heading, deg; adds the heading error"),
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
):
    """Great-circle distance and course between two waypoints."""
    def run():
        from quadlab.geo import course_to, distance_between, heading_error

        summary = {"distance_m": distance_between(lat1, lon1, lat2, lon2)}
        summary["course_deg"] = course_to(lat1, lon1, lat2, lon2)
        if heading is not None:
            summary["heading_error_deg"] = heading_error(summary["course_deg"], heading)
        if seed is not None:
            summary["seed"] = seed
        _emit(summary, as_json)

    _guard(run)


@app.command("filter-traces")
def cmd_filter_traces(
    duration: float = typer.Option(10.0, help="IMU record length, s"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Path = OutOpt,
):
    """IMU and receiver streams through every filter, one CSV each."""
    def run():
        from quadlab.common.io import write_frame_csv
        from quadlab.sensors.traces import imu_traces, receiver_step_traces

        wcfg = load_cfg(config)
        imu = imu_traces(wcfg.vehicle(), wcfg.imu_filter(), wcfg.noise(), wcfg.seed if seed is None else seed,
                         duration)
        rx = receiver_step_traces(wcfg.receiver_filter(), limit_deg=wcfg.roll_limit_deg)
        typer.echo(f"wrote {write_frame_csv(out / 'filter_imu.csv', imu)}")
        typer.echo(f"wrote {write_frame_csv(out / 'filter_receiver.csv', rx)}")

    _guard(run)


@app.command("loop-rate-sweep")
def cmd_loop_rate_sweep(
    rates: List[float] = typer.Option([20.0, 50.0, 100.0, 1000.0], "--rate", help="Repeat for each rate, Hz"),
    scenario: str = typer.Option("impulse-roll"),
    plant: str = typer.Option("nonlinear", help="nonlinear | linear"),
    duration: float = typer.Option(5.0),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    as_json: bool = JsonOpt,
    out: Path = OutOpt,
):
    """Stable/unstable table of one scenario across control loop rates."""
    def run():
        from quadlab.common.io import write_frame_csv
        from quadlab.controller.closed_loop import loop_rate_sweep

        table = loop_rate_sweep(load_cfg(config).closed_loop(seed), rates, scenario, plant, duration)
        write_frame_csv(out / "loop_rate_sweep.csv", table)
        if as_json:
            _emit({"rates": table.to_dict(orient="records")}, True)
        else:
            typer.echo(table.to_string(index=False))

    _guard(run)


def main():
    app()


if __name__ == "__main__":
    main()
