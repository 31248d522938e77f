import json

import numpy as np
import pytest

from dynsample.dataset import (
    Dataset,
    coverage,
    export_csv,
    export_jsonl,
    load_jsonl,
)
from dynsample.errors import ConfigError
from dynsample.models import builtin_model
from dynsample.sampler import CampaignConfig, run_campaign
from dynsample.signal import FaprbsSegment

from conftest import linear_model


@pytest.fixture(scope="module")
def toy_dataset():
    cfg = CampaignConfig(
        dt=0.1, horizon=2.0, segments=[FaprbsSegment(0.5, 4)],
        n_hss=2, max_sims_phase2=1, max_sims_phase3=1, rng_seed=3,
    )
    return run_campaign(cfg, linear_model(2))


def test_run_ids_dense(toy_dataset):
    assert [r.run_id for r in toy_dataset.runs] == list(range(toy_dataset.n_runs))


def test_meta_only_dataset_single_line(tmp_path):
    ds = Dataset(meta={"model": "none", "rng_seed": 0, "config": {},
                       "diagnostics": {"epochs": []}})
    path = tmp_path / "empty.jsonl"
    export_jsonl(ds, path)
    assert len(path.read_text().splitlines()) == 1
    assert load_jsonl(path) == ds


def test_jsonl_round_trip_exact(toy_dataset, tmp_path):
    p1 = tmp_path / "a.jsonl"
    export_jsonl(toy_dataset, p1)
    ds2 = load_jsonl(p1)
    assert ds2 == toy_dataset
    # bit-exact numerics after a second round trip
    p2 = tmp_path / "b.jsonl"
    export_jsonl(ds2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    r0 = toy_dataset.runs[0].trajectory.states
    r0b = ds2.runs[0].trajectory.states
    assert np.array_equal(r0, r0b)


def test_jsonl_unknown_schema_version(tmp_path, toy_dataset):
    p = tmp_path / "bad.jsonl"
    export_jsonl(toy_dataset, p)
    lines = p.read_text().splitlines()
    meta = json.loads(lines[0])
    meta["schema_version"] = 99
    p.write_text("\n".join([json.dumps(meta)] + lines[1:]))
    with pytest.raises(ConfigError, match="schema_version"):
        load_jsonl(p)


def test_csv_shape(toy_dataset, tmp_path):
    p = tmp_path / "out.csv"
    export_csv(toy_dataset, p)
    lines = p.read_text().splitlines()
    n_samples = sum(r.trajectory.n_samples for r in toy_dataset.runs)
    assert len(lines) == n_samples + 1
    du, nx, ny = 2, 2, 2
    assert len(lines[0].split(",")) == 4 + du + nx + ny


def test_csv_values_lossless(toy_dataset, tmp_path):
    p = tmp_path / "out.csv"
    export_csv(toy_dataset, p)
    row = p.read_text().splitlines()[1].split(",")
    tr = toy_dataset.runs[0].trajectory
    assert float(row[3]) == tr.times[0]
    assert float(row[4]) == tr.controls[0, 0]
    assert float(row[8]) == tr.outputs[0, 0]


def test_csv_empty_dataset_rejected(tmp_path):
    ds = Dataset(meta={})
    with pytest.raises(ConfigError):
        export_csv(ds, tmp_path / "x.csv")


def test_coverage_identical_samples(toy_dataset):
    ds = Dataset(meta=toy_dataset.meta)
    run = toy_dataset.runs[0]
    tr = run.trajectory
    const = np.tile(tr.outputs[:1], (5, 1))
    from dynsample.dataset import RunRecord

    ds.runs = [RunRecord(0, 0, 1, run.u_bar, run.u_bar_eng, run.signal,
                         type(tr)(0, tr.times[:5], tr.states[:5], const,
                                  tr.controls[:5], "completed"))]
    assert coverage(ds, 4) == pytest.approx(1 / 16)


def test_coverage_matches_histogram_oracle(toy_dataset):
    bins = 5
    y = np.vstack([r.trajectory.outputs for r in toy_dataset.runs])
    lo, hi = y.min(axis=0), y.max(axis=0)
    got = coverage(toy_dataset, bins)
    h, _, _ = np.histogram2d(y[:, 0], y[:, 1], bins=bins,
                             range=[[lo[0], hi[0]], [lo[1], hi[1]]])
    assert got == pytest.approx(np.count_nonzero(h) / bins**2)


def test_coverage_monotone_under_added_runs(toy_dataset):
    bounds = (np.array([-2.0, -2.0]), np.array([2.0, 2.0]))
    partial = Dataset(meta=toy_dataset.meta)
    prev = 0.0
    for r in toy_dataset.runs:
        partial.runs.append(r)
        c = coverage(partial, 10, bounds=bounds)
        assert c >= prev
        prev = c
