"""Campaign dataset: persistence (JSONL / CSV), normalization metadata,
and coverage measurement.

One JSONL file holds a whole campaign: the first line is the meta record,
followed by one line per simulation run.  JSON's shortest round-trip float
encoding keeps every numeric field bit-exact across save/load.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .models import Trajectory
from .signal import ControlSignal

SCHEMA_VERSION = 1


@dataclass
class UsedTargetRecord:
    """A consumed target: raw output-space coordinates plus the exclusion
    radius (normalized units of the epoch it was used in)."""

    t_raw: np.ndarray
    r_at_use: float
    epoch: int
    order: int


@dataclass
class RunRecord:
    run_id: int
    epoch: int
    phase: int
    u_bar: np.ndarray  # mean input, unit-cube coordinates
    u_bar_eng: np.ndarray  # mean input, engineering units
    signal: ControlSignal
    trajectory: Trajectory
    seed_y: np.ndarray | None = None  # normalized seed, None if disqualified
    provenance: dict | None = None


@dataclass
class Dataset:
    """Full record of one campaign."""

    meta: dict
    runs: list[RunRecord] = field(default_factory=list)
    used_targets: list[UsedTargetRecord] = field(default_factory=list)
    initial_conditions: list[np.ndarray] = field(default_factory=list)
    norm_bounds: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return _to_lines(self) == _to_lines(other)

    @property
    def n_runs(self) -> int:
        return len(self.runs)


def _arr(x):
    return np.asarray(x, dtype=float).tolist()


def _run_to_obj(r: RunRecord) -> dict:
    return {
        "record": "run",
        "run_id": r.run_id,
        "epoch": r.epoch,
        "phase": r.phase,
        "u_bar": _arr(r.u_bar),
        "u_bar_eng": _arr(r.u_bar_eng),
        "signal": {
            "breakpoints": _arr(r.signal.breakpoints),
            "levels": _arr(r.signal.levels),
            "mean_u": _arr(r.signal.mean_u),
            "total_duration": r.signal.total_duration,
        },
        "trajectory": {
            "times": _arr(r.trajectory.times),
            "states": _arr(r.trajectory.states),
            "outputs": _arr(r.trajectory.outputs),
            "controls": _arr(r.trajectory.controls),
            "status": r.trajectory.status,
            "diverged_at": r.trajectory.diverged_at,
        },
        "seed_y": None if r.seed_y is None else _arr(r.seed_y),
        "provenance": r.provenance,
    }


def _run_from_obj(o: dict) -> RunRecord:
    sig = ControlSignal(
        breakpoints=np.array(o["signal"]["breakpoints"]),
        levels=np.array(o["signal"]["levels"]),
        mean_u=np.array(o["signal"]["mean_u"]),
        total_duration=o["signal"]["total_duration"],
    )
    t = o["trajectory"]
    traj = Trajectory(
        run_id=o["run_id"],
        times=np.array(t["times"]),
        states=np.array(t["states"]),
        outputs=np.array(t["outputs"]),
        controls=np.array(t["controls"]),
        status=t["status"],
        diverged_at=t["diverged_at"],
    )
    return RunRecord(
        run_id=o["run_id"],
        epoch=o["epoch"],
        phase=o["phase"],
        u_bar=np.array(o["u_bar"]),
        u_bar_eng=np.array(o["u_bar_eng"]),
        signal=sig,
        trajectory=traj,
        seed_y=None if o["seed_y"] is None else np.array(o["seed_y"]),
        provenance=o["provenance"],
    )


def _to_lines(ds: Dataset) -> list[str]:
    meta_obj = {
        "record": "meta",
        "schema_version": SCHEMA_VERSION,
        "meta": ds.meta,
        "used_targets": [
            {"t_raw": _arr(u.t_raw), "r_at_use": u.r_at_use, "epoch": u.epoch,
             "order": u.order}
            for u in ds.used_targets
        ],
        "initial_conditions": [_arr(ic) for ic in ds.initial_conditions],
        "norm_bounds": {
            str(e): {"lo": _arr(lo), "hi": _arr(hi)}
            for e, (lo, hi) in sorted(ds.norm_bounds.items())
        },
    }
    lines = [json.dumps(meta_obj, sort_keys=True)]
    for r in ds.runs:
        lines.append(json.dumps(_run_to_obj(r), sort_keys=True))
    return lines


def export_jsonl(ds: Dataset, path) -> None:
    """Write the dataset: one meta line, then one line per run."""
    with open(path, "w") as fh:
        for line in _to_lines(ds):
            fh.write(line + "\n")


def load_jsonl(path) -> Dataset:
    """Load a dataset written by export_jsonl; exact numeric round trip."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty dataset file")
    meta_obj = json.loads(lines[0])
    if meta_obj.get("record") != "meta":
        raise ConfigError(f"{path}: first line is not a meta record")
    if meta_obj.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: unsupported schema_version {meta_obj.get('schema_version')!r}"
        )
    ds = Dataset(meta=meta_obj["meta"])
    ds.used_targets = [
        UsedTargetRecord(np.array(u["t_raw"]), u["r_at_use"], u["epoch"], u["order"])
        for u in meta_obj["used_targets"]
    ]
    ds.initial_conditions = [np.array(ic) for ic in meta_obj["initial_conditions"]]
    ds.norm_bounds = {
        int(e): (np.array(b["lo"]), np.array(b["hi"]))
        for e, b in meta_obj["norm_bounds"].items()
    }
    for ln in lines[1:]:
        ds.runs.append(_run_from_obj(json.loads(ln)))
    return ds


def export_csv(ds: Dataset, path) -> None:
    """Flat table: one row per time sample, RFC-4180 quoting, lossless floats."""
    if not ds.runs:
        raise ConfigError("cannot export an empty dataset to CSV")
    du = ds.runs[0].trajectory.controls.shape[1]
    nx = ds.runs[0].trajectory.states.shape[1]
    ny = ds.runs[0].trajectory.outputs.shape[1]
    header = (
        ["run_id", "epoch", "phase", "t"]
        + [f"u_{i+1}" for i in range(du)]
        + [f"x_{i+1}" for i in range(nx)]
        + [f"y_{i+1}" for i in range(ny)]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in ds.runs:
            tr = r.trajectory
            for k in range(tr.n_samples):
                row = [r.run_id, r.epoch, r.phase, repr(float(tr.times[k]))]
                row += [repr(float(v)) for v in tr.controls[k]]
                row += [repr(float(v)) for v in tr.states[k]]
                row += [repr(float(v)) for v in tr.outputs[k]]
                w.writerow(row)


def all_output_samples(ds: Dataset, output_subset=None) -> np.ndarray:
    """Stack every recorded fixed-timestep output sample, optionally reduced
    to the configured output subset."""
    blocks = [r.trajectory.outputs for r in ds.runs if r.trajectory.n_samples]
    if not blocks:
        return np.empty((0, 0))
    y = np.vstack(blocks)
    if output_subset is not None:
        y = y[:, list(output_subset)]
    return y


def coverage(ds: Dataset, grid_bins: int, bounds=None) -> float:
    """Fraction of occupied cells of a uniform grid over the output space.

    All fixed-timestep output samples are counted.  bounds may pin the
    grid to an explicit (lo, hi) pair; by default the dataset's own
    per-dimension min/max is used.
    """
    if grid_bins < 2:
        raise ConfigError("grid_bins must be >= 2")
    subset = ds.meta.get("config", {}).get("output_subset")
    y = all_output_samples(ds, subset)
    if y.size == 0:
        raise ConfigError("dataset has no output samples")
    if bounds is None:
        lo, hi = y.min(axis=0), y.max(axis=0)
    else:
        lo, hi = np.asarray(bounds[0], dtype=float), np.asarray(bounds[1], dtype=float)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    idx = np.floor((y - lo) / span * grid_bins).astype(int)
    idx = np.clip(idx, 0, grid_bins - 1)
    occupied = len({tuple(row) for row in idx})
    return occupied / float(grid_bins ** y.shape[1])
