"""Square-trajectory benchmark: four control configurations, error/speed metrics.

Runs the impedance controller under the star, ring and tree link topologies
plus the pure potential-field controller over the same square reference,
averages each configuration over seeded repeats, and reports per-axis mean/max
position error, RMSE, XY speed stats and cross-correlation tracking lag.
Reference values measured on the physical system are printed alongside for
context; they come from real flights and are never asserted against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import HandConfig, ScenarioConfig
from .sim import run_scenario
from .topology import TopologyKind
from .trace import Trace
from .trajectory import ReferenceTrajectory, square_trajectory

# (mean_x, mean_y, max_x, max_y) in metres, physical-flight reference
PHYSICAL_REFERENCE_ERRORS = {
    "impedance_ring": (0.13, 0.14, 0.35, 0.36),
    "impedance_tree": (0.14, 0.16, 0.35, 0.37),
    "impedance_star": (0.10, 0.11, 0.27, 0.29),
    "potential_field": (0.22, 0.22, 0.49, 0.45),
}
# (max_speed, mean_speed) in m/s, physical-flight reference
PHYSICAL_REFERENCE_SPEEDS = {
    "impedance_ring": (0.69, 0.24),
    "impedance_tree": (0.70, 0.24),
    "impedance_star": (0.69, 0.22),
    "potential_field": (0.47, 0.20),
    "ground_truth": (0.65, 0.18),
}

BENCH_CONFIG_NAMES = (
    "impedance_star",
    "impedance_ring",
    "impedance_tree",
    "potential_field",
)


@dataclass(frozen=True)
class MetricsReport:
    mean_err_x: float
    mean_err_y: float
    max_err_x: float
    max_err_y: float
    rmse_xy: float
    max_speed_xy: float
    mean_speed_xy: float
    lag_s: float

    def __post_init__(self) -> None:
        assert self.mean_err_x <= self.max_err_x + 1e-12
        assert self.mean_err_y <= self.max_err_y + 1e-12

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}

    @classmethod
    def average(cls, reports: list["MetricsReport"]) -> "MetricsReport":
        return cls(
            **{
                k: float(np.mean([getattr(r, k) for r in reports]))
                for k in cls.__dataclass_fields__
            }
        )


def tracking_lag(ref_x: np.ndarray, follower_x: np.ndarray, dt: float, max_lag_s: float = 5.0) -> float:
    """Time shift maximizing cross-correlation (follower assumed to lag).

    Each candidate shift is scored with the Pearson correlation of the
    overlapping windows, so window length and local means cannot bias the
    argmax.  Ties resolve to the smallest lag.
    """
    a = np.asarray(ref_x, dtype=float)
    b = np.asarray(follower_x, dtype=float)
    n = len(a)
    max_k = min(int(round(max_lag_s / dt)), n - 2)
    best_k, best_c = 0, -np.inf
    for k in range(0, max_k + 1):
        aa = a[: n - k]
        bb = b[k:]
        da = aa - aa.mean()
        db = bb - bb.mean()
        denom = float(np.linalg.norm(da) * np.linalg.norm(db))
        c = float(np.dot(da, db)) / denom if denom > 0.0 else 0.0
        if c > best_c + 1e-12:
            best_c, best_k = c, k
    return best_k * dt


def compute_metrics(
    trace: Trace,
    ref_positions: np.ndarray,
    offsets: np.ndarray,
    start_tick: int = 0,
) -> MetricsReport:
    """Per-axis |error| stats against (reference + formation offset), XY speeds, lag.

    `ref_positions` must share the trace's time base, one row per tick.
    """
    if trace.n_ticks == 0:
        raise ValueError("empty trace")
    if len(ref_positions) < trace.n_ticks:
        raise ValueError(
            f"reference covers {len(ref_positions)} ticks, trace has {trace.n_ticks}"
        )
    sl = slice(start_tick, trace.n_ticks)
    ref = np.asarray(ref_positions)[sl]
    pos = trace.pos[sl]
    vel = trace.vel[sl]
    n = trace.n_drones

    # err[t, d, axis] = drone - (ref + offset)
    err = pos[:, :, :2] - (ref[:, None, :2] + np.asarray(offsets)[None, :, :2])
    abs_err = np.abs(err)
    speed_xy = np.linalg.norm(vel[:, :, :2], axis=2)

    lags = [
        tracking_lag(ref[:, 0], pos[:, d, 0], trace.dt) for d in range(n)
    ]
    return MetricsReport(
        mean_err_x=float(abs_err[:, :, 0].mean()),
        mean_err_y=float(abs_err[:, :, 1].mean()),
        max_err_x=float(abs_err[:, :, 0].max()),
        max_err_y=float(abs_err[:, :, 1].max()),
        rmse_xy=float(np.sqrt((err**2).sum(axis=2).mean())),
        max_speed_xy=float(speed_xy.max()),
        mean_speed_xy=float(speed_xy.mean()),
        lag_s=float(np.mean(lags)),
    )


@dataclass(frozen=True)
class BenchConfig:
    base: ScenarioConfig = field(
        default_factory=lambda: ScenarioConfig(
            hand=HandConfig(type="square", position=(0.0, 0.0, 1.0)),
            start_at_slots=True,
        )
    )
    repeats: int = 3
    seed: int = 1

    def scenario_for(self, name: str, seed: int) -> ScenarioConfig:
        if name == "potential_field":
            topo = replace(self.base.topology, kind=TopologyKind.STAR)
            ctl = replace(self.base.controller, mode="apf")
        else:
            kind = TopologyKind(name.split("_", 1)[1])
            topo = replace(self.base.topology, kind=kind)
            ctl = replace(self.base.controller, mode="impedance")
        return replace(self.base, topology=topo, controller=ctl, seed=seed)


def bench_scenario_duration(hand: HandConfig) -> float:
    """Settle time plus the full trajectory duration for a square hand source."""
    traj = square_trajectory(
        side=hand.side_m,
        peak_speed=hand.peak_speed,
        dwell=hand.dwell_s,
        laps=hand.laps,
        accel=hand.accel,
        origin=hand.position,
    )
    return hand.settle_s + traj.total_time


def default_bench_config(
    repeats: int = 3, seed: int = 1, laps: int = 1, noise_sigma: float | None = None
) -> BenchConfig:
    hand = HandConfig(type="square", position=(0.0, 0.0, 1.0), laps=laps)
    base = ScenarioConfig(hand=hand, start_at_slots=True)
    if noise_sigma is not None:
        base = replace(base, plant=replace(base.plant, noise_sigma=noise_sigma))
    base = replace(base, duration_s=bench_scenario_duration(hand))
    return BenchConfig(base=base, repeats=repeats, seed=seed)


def reference_for(config: ScenarioConfig, n_ticks: int) -> tuple[ReferenceTrajectory, np.ndarray]:
    """The square trajectory and its per-tick positions on the scenario's time base."""
    hand = config.hand
    if hand.type != "square":
        raise ValueError("benchmark scenarios use the square hand source")
    traj = square_trajectory(
        side=hand.side_m,
        peak_speed=hand.peak_speed,
        dwell=hand.dwell_s,
        laps=hand.laps,
        accel=hand.accel,
        origin=hand.position,
    )
    dt = config.controller.dt
    ts = np.arange(n_ticks) * dt
    ref = np.stack([traj.position_at(float(t) - hand.settle_s) for t in ts])
    return traj, ref


def run_one(config: ScenarioConfig) -> tuple[Trace, MetricsReport]:
    trace = run_scenario(config)
    traj, ref = reference_for(config, trace.n_ticks)
    if traj.profile == "triangular":
        trace.events.append(
            {"tick": 0, "t": 0.0, "type": "triangular_fallback", "peak": traj.peak_reached}
        )
    start_tick = int(round(config.hand.settle_s / config.controller.dt))
    offsets = _offsets_for(config)
    return trace, compute_metrics(trace, ref, offsets, start_tick=start_tick)


def _offsets_for(config: ScenarioConfig) -> np.ndarray:
    from .topology import formation_offsets

    t = config.topology
    return formation_offsets(t.drones, t.spacing_m, t.height_m)


def run_comparison(bench: BenchConfig | None = None, out_dir: str | Path | None = None) -> dict:
    """Run all four configurations `repeats` times each and emit the comparison report."""
    bench = bench or default_bench_config()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    rows = {}
    for name in BENCH_CONFIG_NAMES:
        reports = []
        for r in range(bench.repeats):
            seed = bench.seed + r
            cfg = bench.scenario_for(name, seed)
            trace, metrics = run_one(cfg)
            reports.append(metrics)
            if out is not None:
                trace.write_csv(out / f"trace_{name}_seed{seed}.csv")
                trace.write_events(out / f"events_{name}_seed{seed}.jsonl")
        rows[name] = {
            "metrics": MetricsReport.average(reports).to_dict(),
            "runs": [m.to_dict() for m in reports],
            "seeds": [bench.seed + r for r in range(bench.repeats)],
        }

    star_rmse = rows["impedance_star"]["metrics"]["rmse_xy"]
    reductions = {
        f"star_vs_{other.split('_', 1)[1]}_rmse_reduction_pct": 100.0
        * (1.0 - star_rmse / rows[other]["metrics"]["rmse_xy"])
        for other in BENCH_CONFIG_NAMES
        if other != "impedance_star"
    }

    hand = bench.base.hand
    traj = square_trajectory(
        side=hand.side_m,
        peak_speed=hand.peak_speed,
        dwell=hand.dwell_s,
        laps=hand.laps,
        accel=hand.accel,
        origin=hand.position,
    )
    ts, p, v = traj.sample(bench.base.controller.dt)
    speeds = np.linalg.norm(v[:, :2], axis=1)
    report = {
        "configs": rows,
        "rmse_reductions": reductions,
        "trajectory": {
            "profile": traj.profile,
            "side_m": hand.side_m,
            "peak_speed": hand.peak_speed,
            "dwell_s": traj.dwell,
            "laps": hand.laps,
            "max_speed": float(speeds.max()),
            "mean_speed": float(speeds.mean()),
        },
        "physical_reference": {
            "errors": PHYSICAL_REFERENCE_ERRORS,
            "speeds": PHYSICAL_REFERENCE_SPEEDS,
        },
        "repeats": bench.repeats,
        "seed": bench.seed,
    }
    if out is not None:
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        (out / "report.csv").write_text(report_csv(report))
    return report


def report_csv(report: dict) -> str:
    cols = (
        "config,mean_err_x,mean_err_y,max_err_x,max_err_y,rmse_xy,"
        "max_speed_xy,mean_speed_xy,lag_s"
    )
    lines = [cols]
    for name in BENCH_CONFIG_NAMES:
        m = report["configs"][name]["metrics"]
        lines.append(
            ",".join(
                [name]
                + [
                    f"{m[k]:.6f}"
                    for k in (
                        "mean_err_x",
                        "mean_err_y",
                        "max_err_x",
                        "max_err_y",
                        "rmse_xy",
                        "max_speed_xy",
                        "mean_speed_xy",
                        "lag_s",
                    )
                ]
            )
        )
    return "\n".join(lines) + "\n"


def format_report(report: dict) -> str:
    """Human-readable table with the physical reference values alongside."""
    out = []
    t = report["trajectory"]
    out.append(
        f"square reference: side {t['side_m']} m, profile {t['profile']}, "
        f"max speed {t['max_speed']:.3f} m/s, mean speed {t['mean_speed']:.3f} m/s "
        f"(physical ground truth: 0.65 / 0.18)"
    )
    out.append("")
    hdr = (
        f"{'config':<17}{'mean_x':>8}{'mean_y':>8}{'max_x':>8}{'max_y':>8}"
        f"{'rmse':>8}{'v_max':>8}{'v_mean':>8}{'lag_s':>7}   physical mean/max (x,y)"
    )
    out.append(hdr)
    for name in BENCH_CONFIG_NAMES:
        m = report["configs"][name]["metrics"]
        px = PHYSICAL_REFERENCE_ERRORS[name]
        ps = PHYSICAL_REFERENCE_SPEEDS[name]
        out.append(
            f"{name:<17}"
            f"{m['mean_err_x']:>8.3f}{m['mean_err_y']:>8.3f}"
            f"{m['max_err_x']:>8.3f}{m['max_err_y']:>8.3f}"
            f"{m['rmse_xy']:>8.3f}"
            f"{m['max_speed_xy']:>8.3f}{m['mean_speed_xy']:>8.3f}"
            f"{m['lag_s']:>7.2f}"
            f"   {px[0]:.2f}/{px[1]:.2f} mean, {px[2]:.2f}/{px[3]:.2f} max, "
            f"{ps[0]:.2f} v_max"
        )
    out.append("")
    for k, v in sorted(report["rmse_reductions"].items()):
        out.append(f"{k}: {v:.1f}%")
    out.append(
        "physical-flight RMSE reductions for context: 20.6% vs other impedance "
        "topologies, 40.9% vs potential field"
    )
    return "\n".join(out)
