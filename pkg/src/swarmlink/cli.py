"""Command-line entry points: scenario runs, benchmark, patterns, live server."""

from __future__ import annotations

import json
import time
from pathlib import Path

import click
import numpy as np

from .bench import (
    BenchConfig,
    bench_scenario_duration,
    compute_metrics,
    default_bench_config,
    format_report,
    reference_for,
    run_comparison,
)
from .config import ConfigError, ScenarioConfig, load_scenario, save_scenario
from .patterns import ALL_LABELS, PatternConfig, encode_pattern_by_label
from .sim import run_scenario
from .trace import Trace


@click.group()
def main() -> None:
    """Impedance-coupled swarm simulator."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True, help="trace CSV path")
@click.option("--events", "events_path", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None, help="override the config seed")
def run(config_path, out_path, events_path, seed) -> None:
    """Run one scenario and write its trace CSV (events to a sidecar JSONL)."""
    cfg = _load(config_path)
    if seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=seed)
    trace = run_scenario(cfg)
    trace.write_csv(out_path)
    if events_path is None:
        events_path = str(Path(out_path).with_suffix("")) + "_events.jsonl"
    trace.write_events(events_path)
    click.echo(f"wrote {trace.n_ticks} ticks x {trace.n_drones} drones to {out_path}")


@main.group()
def bench() -> None:
    """Square-trajectory benchmark."""


@bench.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="scenario JSON used as the base configuration")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--repeats", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
def bench_run(config_path, out_dir, repeats, seed) -> None:
    """Run all four configurations and write report.json / report.csv / traces."""
    if config_path is not None:
        base = _load(config_path)
        if base.hand.type != "square":
            raise click.ClickException("benchmark base config needs a square hand source")
        from dataclasses import replace

        base = replace(base, duration_s=bench_scenario_duration(base.hand))
        bench_cfg = BenchConfig(base=base, repeats=repeats, seed=seed)
    else:
        bench_cfg = default_bench_config(repeats=repeats, seed=seed)

    out = Path(out_dir)
    report = run_comparison(bench_cfg, out_dir=out)
    _write_reference_csv(bench_cfg.base, out / "ref.csv")
    save_scenario(bench_cfg.base, out / "base_config.json")
    click.echo(format_report(report))
    click.echo(f"\nreport written to {out / 'report.json'}")


def _write_reference_csv(config: ScenarioConfig, path: Path) -> None:
    n_ticks = config.n_ticks()
    _, ref = reference_for(config, n_ticks)
    dt = config.controller.dt
    with open(path, "w") as fh:
        fh.write("t,x,y,z\n")
        for k in range(n_ticks):
            vals = [k * dt] + [float(v) for v in ref[k]]
            fh.write(",".join(repr(v) for v in vals) + "\n")


@bench.command("metrics")
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--ref", "ref_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="scenario JSON providing formation offsets (default: zero offsets)")
@click.option("--start-tick", type=int, default=0, show_default=True)
def bench_metrics(trace_path, ref_path, config_path, start_tick) -> None:
    """Compute the error/speed metrics of a trace against a reference CSV."""
    trace = Trace.read_csv(trace_path)
    ref = _read_reference_csv(ref_path)
    if config_path is not None:
        cfg = _load(config_path)
        from .topology import formation_offsets

        offsets = formation_offsets(
            cfg.topology.drones, cfg.topology.spacing_m, cfg.topology.height_m
        )
    else:
        offsets = np.zeros((trace.n_drones, 3))
    report = compute_metrics(trace, ref, offsets, start_tick=start_tick)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


def _read_reference_csv(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "t,x,y,z":
        raise click.ClickException(f"{path}: expected header t,x,y,z")
    return np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[1:] if ln])


@main.command()
@click.argument("label", required=False)
@click.option("--list", "list_all", is_flag=True, help="list the 12 pattern labels")
@click.option("--json", "as_json", is_flag=True, help="print the schedule as JSON")
@click.option("--play", is_flag=True, help="emit events as timed log lines")
@click.option("--inter-onset-ms", type=int, default=150, show_default=True)
@click.option("--burst-ms", type=int, default=300, show_default=True)
def pattern(label, list_all, as_json, play, inter_onset_ms, burst_ms) -> None:
    """Print or play one of the 12 surface x direction schedules (e.g. RR)."""
    if list_all or label is None:
        for lb in ALL_LABELS:
            click.echo(lb)
        return
    cfg = PatternConfig(inter_onset_ms=inter_onset_ms, burst_ms=burst_ms)
    try:
        schedule = encode_pattern_by_label(label.upper(), cfg)
    except KeyError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(schedule.to_json())
        return
    events = [
        (ev.onset_ms, finger, ev)
        for finger, line in enumerate(schedule.actuators)
        for ev in line
    ]
    events.sort(key=lambda e: (e[0], e[1]))
    click.echo(f"pattern {schedule.label}: {schedule.duration_ms()} ms total")
    start = time.monotonic()
    for onset, finger, ev in events:
        if play:
            delay = onset / 1000.0 - (time.monotonic() - start)
            if delay > 0:
                time.sleep(delay)
        click.echo(
            f"t={onset:4d} ms  finger {finger}  {ev.frequency_hz:6.1f} Hz  "
            f"amp {ev.amplitude:.2f}  for {ev.duration_ms} ms"
        )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--bind", default="127.0.0.1:8000", show_default=True)
@click.option("--record", "record_dir", type=click.Path(), default=None)
@click.option("--speed", type=float, default=1.0, show_default=True)
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="UI bundle directory (default: frontend/static if present)")
def serve(config_path, bind, record_dir, speed, static_dir) -> None:
    """Run the live steering server (WebSocket at /ws, UI at /)."""
    from .server import serve as serve_impl

    serve_impl(_load(config_path), bind=bind, speed=speed, record_dir=record_dir,
               static_dir=static_dir)


@main.command()
@click.option("--session", "session_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def replay(session_dir, out_path) -> None:
    """Replay a recorded live session into a trace CSV."""
    from .session import replay_session

    trace = replay_session(session_dir)
    trace.write_csv(out_path)
    click.echo(f"replayed {trace.n_ticks} ticks to {out_path}")


@main.command("init-config")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--kind", type=click.Choice(["star", "ring", "tree"]), default="star")
@click.option("--drones", type=int, default=3, show_default=True)
def init_config(out_path, kind, drones) -> None:
    """Write a default scenario config to edit."""
    from dataclasses import replace

    from .topology import TopologyKind

    cfg = ScenarioConfig()
    cfg = replace(
        cfg, topology=replace(cfg.topology, kind=TopologyKind(kind), drones=drones)
    )
    save_scenario(cfg, out_path)
    click.echo(f"wrote {out_path}")


def _load(path) -> ScenarioConfig:
    try:
        return load_scenario(path)
    except ConfigError as exc:
        raise click.ClickException(str(exc))


if __name__ == "__main__":
    main()
