"""Command-line front end: run campaigns, inspect/export datasets, evaluate
surrogates, and emit SVG scatter plots of the output space.

Exit codes: 0 success, 2 configuration error, 3 epoch failure.
The DYNSAMPLE_LOG environment variable ({error, info, debug}) controls
verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import replace

from . import dataset as ds_mod
from . import surrogate as sur
from .errors import ConfigError, DynsampleError, EpochFailureError
from .models import builtin_model
from .sampler import CampaignConfig, run_campaign
from .signal import ControlBounds, FaprbsSegment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EPOCH_FAILURE = 3


def _setup_logging():
    level = os.environ.get("DYNSAMPLE_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def load_config(path, overrides=None):
    """Parse a TOML campaign config into (model, CampaignConfig)."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    overrides = overrides or {}
    raw.update({k: v for k, v in overrides.items() if v is not None})

    model = builtin_model(raw["model"])
    if "control_bounds" in raw:
        cb = raw["control_bounds"]
        model = replace(model, control_bounds=ControlBounds(
            np.array(cb["lower"], dtype=float),
            np.array(cb["upper"], dtype=float),
            np.array(cb["amplitude"], dtype=float),
        ))
    segments = [
        FaprbsSegment(float(s["hold_duration"]), int(s["n_holds"]))
        for s in raw.get("faprbs", {}).get("segments", [])
    ]
    kwargs = {}
    for key in (
        "n_hss", "max_sims_phase2", "score_threshold_phase2", "max_sims_phase3",
        "kappa", "radius_plateau_tol", "radius_plateau_iters", "max_epochs",
        "ic_min_distance", "seed_weighting", "seed_discount", "rng_seed", "jobs",
    ):
        if key in raw:
            kwargs[key] = raw[key]
    for key in ("output_subset", "state_subset"):
        if key in raw:
            kwargs[key] = tuple(raw[key])
    cfg = CampaignConfig(
        dt=float(raw["dt"]), horizon=float(raw["horizon"]),
        segments=segments, **kwargs,
    )
    cfg.validate(model)
    return model, cfg


def cmd_run(args) -> int:
    model, cfg = load_config(
        args.config, {"rng_seed": args.rng_seed, "jobs": args.jobs}
    )
    try:
        ds = run_campaign(cfg, model)
    except EpochFailureError as exc:
        print(f"epoch failure: {exc}", file=sys.stderr)
        return EXIT_EPOCH_FAILURE
    ds_mod.export_jsonl(ds, args.out)
    for e in ds.meta["diagnostics"]["epochs"]:
        print(
            f"epoch {e['epoch']}: phase1={e['phase1_count']} "
            f"(pre-dedup {e['phase1_prededup']}) "
            f"phase2={e.get('phase2_count', 0)} ({e.get('phase2_termination', '-')}) "
            f"phase3={e.get('phase3_count', 0)} ({e.get('phase3_termination', '-')})"
        )
    t = ds.timing
    if t["total_seconds"] > 0:
        frac = 100.0 * t["simulation_seconds"] / t["total_seconds"]
        print(
            f"{ds.n_runs} simulations in {t['total_seconds']:.2f} s; "
            f"{frac:.1f}% of the time in the integrator"
        )
    print(f"dataset written to {args.out}")
    return EXIT_OK


def _svg_scatter(ds, x_idx, y_idx):
    width, height, margin = 640, 480, 50
    samples = ds_mod.all_output_samples(ds)
    ny = samples.shape[1]
    if not (0 <= x_idx < ny and 0 <= y_idx < ny):
        raise ConfigError(f"output indices ({x_idx}, {y_idx}) out of range for {ny} outputs")
    xs, ys = samples[:, x_idx], samples[:, y_idx]

    seeds = []
    for r in ds.runs:
        if r.seed_y is not None:
            epoch = r.epoch
            lo, hi = ds.norm_bounds[epoch]
            span = np.where(hi - lo > 0, hi - lo, 1.0)
            raw = lo + np.asarray(r.seed_y) * span
            subset = ds.meta["config"]["output_subset"]
            full = dict(zip(subset, raw))
            if x_idx in full and y_idx in full:
                seeds.append((full[x_idx], full[y_idx], epoch))
    targets = []
    subset = ds.meta["config"]["output_subset"]
    for ut in ds.used_targets:
        full = dict(zip(subset, ut.t_raw))
        if x_idx in full and y_idx in full:
            targets.append((full[x_idx], full[y_idx]))

    all_x = np.concatenate([xs, [s[0] for s in seeds], [t[0] for t in targets]]) \
        if seeds or targets else xs
    all_y = np.concatenate([ys, [s[1] for s in seeds], [t[1] for t in targets]]) \
        if seeds or targets else ys
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(v):
        return margin + (v - x_lo) / x_span * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - y_lo) / y_span * (height - 2 * margin)

    palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height-margin}" x2="{width-margin}" '
        f'y2="{height-margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height-margin}" '
        f'stroke="black"/>',
        f'<text x="{width//2}" y="{height-10}" text-anchor="middle">output {x_idx}</text>',
        f'<text x="15" y="{height//2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {height//2})">output {y_idx}</text>',
    ]
    epochs = np.concatenate([
        np.full(r.trajectory.n_samples, r.epoch) for r in ds.runs
        if r.trajectory.n_samples
    ])
    for x, y, e in zip(xs, ys, epochs):
        color = palette[int(e) % len(palette)]
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="1.5" fill="{color}" '
            f'fill-opacity="0.4"/>'
        )
    for x, y, e in seeds:
        color = palette[int(e) % len(palette)]
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="{color}" '
            f'stroke="black"/>'
        )
    for x, y in targets:
        cx, cy, a = sx(x), sy(y), 4.0
        parts.append(
            f'<path d="M {cx-a:.2f} {cy-a:.2f} L {cx+a:.2f} {cy+a:.2f} '
            f'M {cx-a:.2f} {cy+a:.2f} L {cx+a:.2f} {cy-a:.2f}" '
            f'stroke="black" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_plot(args) -> int:
    ds = ds_mod.load_jsonl(args.dataset)
    if not ds.runs:
        print("dataset has no runs", file=sys.stderr)
        return EXIT_CONFIG
    svg = _svg_scatter(ds, args.x, args.y)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"plot written to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    train = ds_mod.load_jsonl(args.dataset)
    test = ds_mod.load_jsonl(args.test)
    n_train = train.runs[0].trajectory.outputs.shape[1] if train.runs else 0
    n_test = test.runs[0].trajectory.outputs.shape[1] if test.runs else 0
    if n_train == 0 or n_train != n_test:
        print(
            f"incompatible output dimensions: train={n_train}, test={n_test}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    spec = sur.LagSpec(args.n_lags, args.u_lags, args.k)
    norm = sur.norm_info(train)
    report = {
        "lag_spec": {
            "n_output_lags": spec.n_output_lags,
            "n_control_lags": spec.n_control_lags,
            "k_neighbors": spec.k_neighbors,
        },
        "outputs": [],
    }
    for idx in range(n_train):
        train_ex = sur.build_examples(train, spec, idx, norm=norm)
        pred = sur.fit(train_ex, spec, idx)
        test_x, test_y, _ = sur.build_examples(test, spec, idx, norm=norm)
        err = sur.mse(sur.predict_batch(pred, test_x), test_y)
        report["outputs"].append({
            "output_index": idx,
            "mse": err,
            "n_train_examples": int(train_ex[0].shape[0]),
            "n_test_examples": int(test_x.shape[0]),
        })
        print(f"output {idx}: one-step mse = {err:.6e}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"report written to {args.out}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    ds = ds_mod.load_jsonl(args.dataset)
    print(f"model: {ds.meta['model']}  rng_seed: {ds.meta['rng_seed']}")
    print(f"runs: {ds.n_runs}  epochs: {len(ds.meta['diagnostics']['epochs'])}")
    for e in ds.meta["diagnostics"]["epochs"]:
        print(
            f"  epoch {e['epoch']}: phase1={e['phase1_count']} "
            f"phase2={e.get('phase2_count', 0)} phase3={e.get('phase3_count', 0)}"
        )
    print(f"used targets: {len(ds.used_targets)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dynsample",
        description="Adaptive sampling campaigns for dynamic-system surrogate datasets",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a campaign from a config file")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--rng-seed", type=int, default=None, dest="rng_seed")
    pr.add_argument("--jobs", type=int, default=None)
    pr.set_defaults(func=cmd_run)

    pp = sub.add_parser("plot", help="SVG scatter of the output space")
    pp.add_argument("dataset")
    pp.add_argument("--x", type=int, default=0)
    pp.add_argument("--y", type=int, default=1)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_plot)

    pe = sub.add_parser("eval", help="one-step surrogate evaluation")
    pe.add_argument("dataset")
    pe.add_argument("--test", required=True)
    pe.add_argument("--n-lags", type=int, default=3, dest="n_lags")
    pe.add_argument("--u-lags", type=int, default=3, dest="u_lags")
    pe.add_argument("--k", type=int, default=3)
    pe.add_argument("--out", default=None)
    pe.set_defaults(func=cmd_eval)

    pi = sub.add_parser("inspect", help="print dataset meta and phase counts")
    pi.add_argument("dataset")
    pi.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EpochFailureError as exc:
        print(f"epoch failure: {exc}", file=sys.stderr)
        return EXIT_EPOCH_FAILURE
    except DynsampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
