"""Config files, replicate sweeps, and deterministic result files.

Configs are JSON objects whose keys mirror the usual experiment-table names
(number_of_nodes, buffer_size, noise_variance, ...).  A handful of keys may
hold lists instead of scalars; those become sweep axes and the harness runs
the full Cartesian product times the replicate count.  Every run's seed is
derived from the master seed, the cell's parameter values, and the replicate
index, so results never depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytics, engine, games, spatial

AXIS_KEYS = ("r", "eta", "velocity", "number_of_seeders", "buffer_size")

_BOUNDARIES = ("torus", "reflect")
_MOBILITIES = ("static", "random_direction", "levy_walk")
_CONNECTIVITIES = ("unit_disk", "quasi_unit_disk")

RESULT_COLUMNS = (
    "run_id",
    "scenario",
    "r",
    "eta",
    "v",
    "n_seeders",
    "M",
    "seed",
    "slots",
    "termination",
    "steady_state_fc",
    "final_fc",
    "pending_final",
    "delivered_fraction",
)


class ConfigError(ValueError):
    """Raised when a config file cannot be turned into runnable settings."""


def _scenario_defaults(scenario: str) -> dict:
    common = {
        "arena_width": 1000.0,
        "arena_height": 1000.0,
        "boundary": "torus",
        "alpha": 0.9,
        "beta": 0.9,
        "flight_min": 1.0,
        "flight_max": None,
        "pause_max": 10.0,
        "velocity": 5.0,
        "radius": 75.0,
        "r_inner": 40.0,
        "r_outer": 75.0,
        "zeta": 0.3,
        "r": 2.0,
        "eta": None,
        "cost": 1.0,
        "kappa": 1.0,
        "initial_cooperator_ratio": 0.5,
        "gated_update": True,
        "unnormalized_benefit": False,
        "complement_band": False,
        "sources_stay_frozen": False,
        "replicates": 1,
        "seed": 0,
        "game_variant": None,
    }
    if scenario == "content_download":
        common.update(
            number_of_nodes=400,
            number_of_seeders=30,
            number_of_sources=None,
            buffer_size=50,
            noise_variance=0.1,
            mobility="levy_walk",
            connectivity="quasi_unit_disk",
            max_slots=300,
        )
    elif scenario == "info_dissemination":
        common.update(
            number_of_nodes=300,
            number_of_seeders=None,
            number_of_sources=50,
            buffer_size=None,
            noise_variance=0.0,
            mobility="random_direction",
            connectivity="unit_disk",
            max_slots=5000,
        )
    else:
        common.update(
            number_of_nodes=300,
            number_of_seeders=None,
            number_of_sources=None,
            buffer_size=None,
            noise_variance=0.0,
            mobility="random_direction",
            connectivity="unit_disk",
            max_slots=5000,
        )
    return common


_NUMERIC = {
    "arena_width": (0.0, None),
    "arena_height": (0.0, None),
    "alpha": (0.0, None),
    "beta": (0.0, None),
    "flight_min": (0.0, None),
    "pause_max": (-1e-9, None),
    "velocity": (-1e-9, None),
    "radius": (0.0, None),
    "r_inner": (0.0, None),
    "r_outer": (0.0, None),
    "zeta": (0.0, None),
    "r": (-1e-9, None),
    "eta": (-1e-9, None),
    "cost": (0.0, None),
    "kappa": (0.0, None),
    "noise_variance": (-1e-9, None),
    "initial_cooperator_ratio": (-1e-9, 1.0 + 1e-9),
}

_INTEGRAL = {
    "number_of_nodes": 1,
    "number_of_seeders": 1,
    "number_of_sources": 1,
    "buffer_size": 1,
    "max_slots": 1,
    "replicates": 1,
    "seed": 0,
}

_FLAGS = ("gated_update", "unnormalized_benefit", "complement_band", "sources_stay_frozen")


@dataclass(frozen=True)
class SweepSpec:
    """A resolved config: fixed settings plus axis lists and replicates."""

    scenario: str
    settings: dict
    axes: dict
    replicates: int
    master_seed: int

    def cells(self) -> list[dict]:
        """Cartesian product of the axes, in config order."""
        out = [dict()]
        for key, values in self.axes.items():
            out = [{**cell, key: v} for cell in out for v in values]
        return out


def _check_scalar(key: str, value, problems: list):
    if key in _FLAGS:
        if not isinstance(value, bool):
            problems.append(f"{key} must be true or false")
        return
    if key in _INTEGRAL:
        if value is None:
            return
        if isinstance(value, bool) or not isinstance(value, int):
            problems.append(f"{key} must be an integer")
        elif value < _INTEGRAL[key]:
            problems.append(f"{key} must be >= {_INTEGRAL[key]}")
        return
    if key in _NUMERIC:
        if value is None:
            return
        lo, hi = _NUMERIC[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"{key} must be a number")
        elif not (value > lo if lo == 0.0 else value >= lo) or (hi is not None and value > hi):
            problems.append(f"{key} out of range")
        return
    if key == "boundary" and value not in _BOUNDARIES:
        problems.append(f"boundary must be one of {_BOUNDARIES}")
    if key == "mobility" and value not in _MOBILITIES:
        problems.append(f"mobility must be one of {_MOBILITIES}")
    if key == "connectivity" and value not in _CONNECTIVITIES:
        problems.append(f"connectivity must be one of {_CONNECTIVITIES}")
    if key == "game_variant" and value is not None and value not in games.VARIANTS:
        problems.append(f"game_variant must be one of {games.VARIANTS}")


def parse_config(source) -> SweepSpec:
    """Read a JSON config from a path, a JSON string, or a dict.

    Unknown keys are rejected by name; constraint violations are collected
    and reported together.  List values are only accepted for the sweepable
    keys (r or eta, velocity, number_of_seeders, buffer_size).
    """
    if isinstance(source, dict):
        raw = dict(source)
    else:
        text = str(source)
        if os.path.exists(text):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: line {err.lineno}: {err.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    scenario = raw.pop("scenario", None)
    if scenario not in engine.SCENARIOS:
        raise ConfigError(
            f"scenario must be one of {engine.SCENARIOS}, got {scenario!r}"
        )

    settings = _scenario_defaults(scenario)
    problems = []
    unknown = sorted(set(raw) - set(settings))
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")

    axes: dict = {}
    for key, value in raw.items():
        if key in unknown:
            continue
        if isinstance(value, list):
            if key not in AXIS_KEYS:
                problems.append(f"{key} cannot be a sweep axis")
                continue
            if len(value) == 0:
                problems.append(f"axis {key} is empty")
                continue
            for v in value:
                _check_scalar(key, v, problems)
            axes[key] = list(value)
        else:
            _check_scalar(key, value, problems)
            settings[key] = value

    if "r" in raw and "eta" in raw:
        problems.append("give either r or eta, not both")
    if settings.get("r_inner") and settings.get("r_outer"):
        if settings["r_inner"] >= settings["r_outer"]:
            problems.append("r_inner must be below r_outer")
    if problems:
        raise ConfigError("; ".join(problems))

    for key in AXIS_KEYS:
        if key not in axes and settings.get(key) is not None:
            axes[key] = [settings[key]]
    if "eta" in raw:
        axes.pop("r", None)
    else:
        axes.pop("eta", None)
    if scenario != "content_download":
        axes.pop("number_of_seeders", None)
        axes.pop("buffer_size", None)

    return SweepSpec(
        scenario=scenario,
        settings=settings,
        axes=axes,
        replicates=int(settings["replicates"]),
        master_seed=int(settings["seed"]),
    )


def cell_key(cell: dict) -> str:
    """Canonical, order-independent text form of a cell's coordinates."""
    return ";".join(f"{k}={cell[k]!r}" for k in sorted(cell))


def derive_seed(master_seed: int, cell: dict, replicate: int) -> int:
    """Mix master seed, cell coordinates, and replicate index into one seed.

    The cell enters through a hash of its canonical key, so adding values to
    an axis, or whole new axes, never changes the seed of an existing cell.
    """
    digest = hashlib.sha256(cell_key(cell).encode()).digest()
    cell_entropy = int.from_bytes(digest[:16], "big")
    ss = np.random.SeedSequence([master_seed, cell_entropy, replicate])
    return int(ss.generate_state(2, np.uint64)[0])


def build_sim_config(spec: SweepSpec, cell: dict, seed: int) -> engine.SimConfig:
    """Materialize one cell of the sweep into an engine config."""
    s = {**spec.settings, **cell}
    arena = spatial.ArenaConfig(s["arena_width"], s["arena_height"], s["boundary"])
    velocity = float(s["velocity"])
    if s["mobility"] == "static" or velocity == 0.0:
        mobility = spatial.Static()
    elif s["mobility"] == "random_direction":
        mobility = spatial.RandomDirection(velocity)
    else:
        flight_max = s["flight_max"] if s["flight_max"] is not None else s["arena_width"]
        mobility = spatial.LevyWalk(
            spatial.LevyParams(
                alpha=s["alpha"],
                beta=s["beta"],
                velocity=velocity,
                flight_min=s["flight_min"],
                flight_max=flight_max,
                pause_max=s["pause_max"],
            )
        )
    if s["connectivity"] == "unit_disk":
        connectivity = spatial.UnitDisk(s["radius"])
    else:
        connectivity = spatial.QuasiUnitDisk(
            s["r_inner"], s["r_outer"], s["zeta"], s["complement_band"]
        )
    variant = s["game_variant"]
    if variant is None:
        variant = (
            "dissemination"
            if spec.scenario in ("info_dissemination", "content_download")
            else "wireless_framework"
        )
    use_eta = s["eta"] is not None and "r" not in cell
    game = games.GameParams(
        synergy=float(s["r"]),
        cost=float(s["cost"]),
        kappa=float(s["kappa"]),
        noise_sigma=float(s["noise_variance"]),
        variant=variant,
        gated_update=bool(s["gated_update"]),
        unnormalized_benefit=bool(s["unnormalized_benefit"]),
    )
    n_packets = s["buffer_size"]
    if spec.scenario == "info_dissemination":
        n_packets = s["number_of_sources"]
    try:
        return engine.SimConfig(
            scenario=spec.scenario,
            n_nodes=int(s["number_of_nodes"]),
            game=game,
            arena=arena,
            mobility=mobility,
            connectivity=connectivity,
            eta=float(s["eta"]) if use_eta else None,
            n_sources=s["number_of_sources"],
            n_seeders=s["number_of_seeders"],
            n_packets=n_packets,
            initial_coop_ratio=float(s["initial_cooperator_ratio"]),
            max_slots=s["max_slots"],
            seed=seed,
            sources_stay_frozen=bool(s["sources_stay_frozen"]),
        )
    except (engine.SimConfigError, ValueError) as err:
        raise ConfigError(str(err))


@dataclass
class RunRecord:
    """One finished run with its sweep coordinates."""

    cell_index: int
    replicate: int
    cell: dict
    result: engine.RunResult

    def run_id(self) -> str:
        return f"c{self.cell_index:03d}-r{self.replicate:03d}"


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list


def _execute(args) -> RunRecord:
    spec, cell_index, cell, replicate = args
    seed = derive_seed(spec.master_seed, cell, replicate)
    config = build_sim_config(spec, cell, seed)
    return RunRecord(cell_index, replicate, cell, engine.run(config))


def run_sweep(
    spec: SweepSpec, parallelism: int = 1, replicates: int | None = None
) -> SweepResult:
    """Run every (cell, replicate) pair and return records in stable order.

    ``parallelism`` > 1 farms runs out to worker processes; because every
    run's seed is derived, not sequential, the result table is identical for
    any worker count.
    """
    reps = spec.replicates if replicates is None else int(replicates)
    if reps < 1:
        raise ConfigError("replicates must be at least 1")
    jobs = [
        (spec, ci, cell, rep)
        for ci, cell in enumerate(spec.cells())
        for rep in range(reps)
    ]
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(_execute, jobs, chunksize=4))
    else:
        records = [_execute(job) for job in jobs]
    records.sort(key=lambda rec: (rec.cell_index, rec.replicate))
    return SweepResult(spec=spec, records=records)


def result_rows(sweep: SweepResult) -> list[dict]:
    """Flatten a sweep into one summary dict per run."""
    rows = []
    for rec in sweep.records:
        res = rec.result
        packets = res.pending is not None
        if sweep.spec.scenario == "content_download":
            n_seeders = rec.cell.get(
                "number_of_seeders", sweep.spec.settings["number_of_seeders"]
            )
        else:
            n_seeders = ""
        if packets:
            m = _n_packets(rec, sweep)
            delivered = float(res.received_counts.sum() / (res.n_nodes * m))
        rows.append(
            {
                "run_id": rec.run_id(),
                "scenario": res.scenario,
                "r": res.synergy,
                "eta": res.eta,
                "v": rec.cell.get("velocity", sweep.spec.settings["velocity"]),
                "n_seeders": n_seeders,
                "M": m if packets else "",
                "seed": res.seed,
                "slots": res.slots,
                "termination": res.termination,
                "steady_state_fc": engine.steady_state_fraction(res),
                "final_fc": res.final_coop_fraction(),
                "pending_final": int(res.pending[-1]) if packets else "",
                "delivered_fraction": delivered if packets else "",
            }
        )
    return rows


def _n_packets(rec: RunRecord, sweep: SweepResult) -> int:
    if sweep.spec.scenario == "info_dissemination":
        return int(sweep.spec.settings["number_of_sources"])
    return int(rec.cell.get("buffer_size", sweep.spec.settings["buffer_size"]))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_outputs(sweep: SweepResult, out_dir: str) -> dict:
    """Write the result tables; returns {name: path}.

    results.csv: one row per run.  timeseries.csv: per-slot cooperator
    fraction and pending count.  ecdf.csv: pooled per-cell packet-count
    distributions (only for packet scenarios).  meeting.csv: neighbor
    renewal fractions per velocity, quadrature and Monte Carlo side by
    side.  summary.json: per-cell means and standard errors plus the
    resolved settings.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    rows = result_rows(sweep)
    paths["results"] = os.path.join(out_dir, "results.csv")
    _write_csv(paths["results"], RESULT_COLUMNS, [[row[c] for c in RESULT_COLUMNS] for row in rows])

    paths["timeseries"] = os.path.join(out_dir, "timeseries.csv")
    ts_rows = []
    for rec in sweep.records:
        res = rec.result
        pend = res.pending
        for t in range(res.slots):
            ts_rows.append(
                [
                    rec.run_id(),
                    t + 1,
                    float(res.coop_fraction[t]),
                    int(pend[t]) if pend is not None else "",
                ]
            )
    _write_csv(paths["timeseries"], ("run_id", "slot", "fc", "pending"), ts_rows)

    paths["ecdf"] = os.path.join(out_dir, "ecdf.csv")
    ecdf_rows = []
    by_cell: dict = {}
    for rec in sweep.records:
        if rec.result.received_counts is not None:
            by_cell.setdefault(rec.cell_index, []).append(rec)
    for ci in sorted(by_cell):
        recs = by_cell[ci]
        counts = np.concatenate([r.result.received_counts for r in recs])
        m = _n_packets(recs[0], sweep)
        support = np.arange(m + 1)
        ecdf = (counts[None, :] <= support[:, None]).mean(axis=1)
        key = cell_key(recs[0].cell)
        for s, frac in zip(support, ecdf):
            ecdf_rows.append([key, int(s), float(frac)])
    _write_csv(paths["ecdf"], ("cell", "packet_count", "cumulative_fraction"), ecdf_rows)

    paths["meeting"] = os.path.join(out_dir, "meeting.csv")
    speeds = sorted(
        {float(v) for v in sweep.spec.axes.get("velocity", [sweep.spec.settings["velocity"]])}
    )
    rad = (
        sweep.spec.settings["radius"]
        if sweep.spec.settings["connectivity"] == "unit_disk"
        else sweep.spec.settings["r_outer"]
    )
    meeting_rows = meeting_table(
        speeds, rad, master_seed=sweep.spec.master_seed
    )
    _write_csv(paths["meeting"], ("v", "f_old", "f_new", "method"), meeting_rows)

    paths["summary"] = os.path.join(out_dir, "summary.json")
    cells_out = []
    grouped: dict = {}
    for row, rec in zip(rows, sweep.records):
        grouped.setdefault(rec.cell_index, []).append((row, rec))
    for ci in sorted(grouped):
        pairs = grouped[ci]
        fc = np.array([p[0]["steady_state_fc"] for p in pairs])
        entry = {
            "cell_index": ci,
            "cell": pairs[0][1].cell,
            "n_runs": len(pairs),
            "mean_steady_state_fc": float(fc.mean()),
            "se_steady_state_fc": _stderr(fc),
        }
        dfracs = [p[0]["delivered_fraction"] for p in pairs if p[0]["delivered_fraction"] != ""]
        if dfracs:
            d = np.array(dfracs, dtype=float)
            entry["mean_delivered_fraction"] = float(d.mean())
            entry["se_delivered_fraction"] = _stderr(d)
            entry["mean_pending_final"] = float(
                np.mean([p[0]["pending_final"] for p in pairs])
            )
        cells_out.append(entry)
    summary = {
        "scenario": sweep.spec.scenario,
        "master_seed": sweep.spec.master_seed,
        "replicates": len(sweep.records) // max(1, len(sweep.spec.cells())),
        "settings": {k: sweep.spec.settings[k] for k in sorted(sweep.spec.settings)},
        "axes": sweep.spec.axes,
        "cells": cells_out,
    }
    with open(paths["summary"], "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(len(values)))


def meeting_table(
    speeds,
    radius: float = 75.0,
    region_radius: float = 500.0,
    samples: int = 200_000,
    master_seed: int = 0,
) -> list:
    """Neighbor-renewal fractions per speed, both methods, as CSV rows."""
    if radius >= region_radius:
        region_radius = 10.0 * radius
    rows = []
    for v in speeds:
        geom = analytics.MeetingGeometry(
            speed=float(v), radius=float(radius), region_radius=float(region_radius)
        )
        f_old, f_new = analytics.meeting_fractions_quadrature(geom)
        rows.append([float(v), f_old, f_new, "quadrature"])
        seed = derive_seed(master_seed, {"meeting_v": float(v)}, 0)
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        f_old_mc, f_new_mc = analytics.meeting_monte_carlo(geom, samples, rng)
        rows.append([float(v), f_old_mc, f_new_mc, "montecarlo"])
    return rows


def format_rows_csv(header, rows) -> str:
    """Render rows the same way emit_outputs does, for in-memory checks."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
