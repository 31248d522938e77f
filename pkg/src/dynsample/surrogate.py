"""Lag-window one-step-ahead nearest-neighbor surrogate.

A deliberately small stand-in for a trained dynamic surrogate: features
are the last N values of one output channel plus the last O values of each
control channel; the prediction is the inverse-distance-weighted mean of
the k nearest stored examples.  Used to compare dataset quality, not to
ship a production model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError


@dataclass(frozen=True)
class LagSpec:
    n_output_lags: int  # N: lagged values of the modeled output
    n_control_lags: int  # O: lagged values per control channel
    k_neighbors: int = 3

    def __post_init__(self):
        if self.n_output_lags < 1:
            raise ConfigError("n_output_lags must be >= 1")
        if self.n_control_lags < 0:
            raise ConfigError("n_control_lags must be >= 0")
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be >= 1")


@dataclass(frozen=True)
class NormInfo:
    y_lo: np.ndarray
    y_hi: np.ndarray
    u_lo: np.ndarray
    u_hi: np.ndarray

    def norm_y(self, y):
        span = np.where(self.y_hi - self.y_lo > 0, self.y_hi - self.y_lo, 1.0)
        return (np.asarray(y, dtype=float) - self.y_lo) / span

    def norm_u(self, u):
        span = np.where(self.u_hi - self.u_lo > 0, self.u_hi - self.u_lo, 1.0)
        return (np.asarray(u, dtype=float) - self.u_lo) / span


def norm_info(ds: Dataset) -> NormInfo:
    """Min-max normalization bounds over every sample of a dataset."""
    ys = np.vstack([r.trajectory.outputs for r in ds.runs if r.trajectory.n_samples])
    us = np.vstack([r.trajectory.controls for r in ds.runs if r.trajectory.n_samples])
    return NormInfo(ys.min(axis=0), ys.max(axis=0), us.min(axis=0), us.max(axis=0))


def build_examples(
    ds: Dataset,
    lag_spec: LagSpec,
    output_index: int,
    norm: NormInfo | None = None,
    max_examples: int | None = None,
) -> tuple[np.ndarray, np.ndarray, NormInfo]:
    """Feature/label pairs for one output channel, normalized.

    Windows never cross run boundaries; runs shorter than the window are
    skipped.  Features for predicting y_{k+1}: y_{k-N+1..k} followed by
    u_{k-O+1..k} for each control channel.
    """
    if norm is None:
        norm = norm_info(ds)
    n_lag = lag_spec.n_output_lags
    c_lag = lag_spec.n_control_lags
    window = max(n_lag, c_lag)
    feats, labels = [], []
    for r in ds.runs:
        tr = r.trajectory
        if tr.n_samples <= window:
            continue
        y = norm.norm_y(tr.outputs)[:, output_index]
        u = norm.norm_u(tr.controls)
        for k in range(window - 1, tr.n_samples - 1):
            row = [y[k - n_lag + 1 : k + 1]]
            for c in range(u.shape[1]):
                row.append(u[k - c_lag + 1 : k + 1, c])
            feats.append(np.concatenate(row))
            labels.append(y[k + 1])
            if max_examples is not None and len(feats) >= max_examples:
                break
        if max_examples is not None and len(feats) >= max_examples:
            break
    if not feats:
        raise ConfigError("no run is long enough for the requested lag window")
    return np.array(feats), np.array(labels), norm


@dataclass(frozen=True)
class Predictor:
    features: np.ndarray
    labels: np.ndarray
    lag_spec: LagSpec
    norm: NormInfo
    output_index: int


def fit(
    examples: tuple[np.ndarray, np.ndarray, NormInfo],
    lag_spec: LagSpec,
    output_index: int = 0,
) -> Predictor:
    feats, labels, norm = examples
    if feats.shape[0] == 0:
        raise ConfigError("empty training set")
    return Predictor(feats, labels, lag_spec, norm, output_index)


def predict(pred: Predictor, features: np.ndarray) -> float:
    """Inverse-distance-weighted mean of the k nearest stored examples.

    Exact feature matches return the mean of the matching labels; ties at
    the k-th neighbor distance are all included with equal weight.
    """
    d = np.linalg.norm(pred.features - features, axis=1)
    if np.any(d == 0.0):
        return float(pred.labels[d == 0.0].mean())
    k = min(pred.lag_spec.k_neighbors, d.size)
    kth = np.partition(d, k - 1)[k - 1]
    sel = d <= kth * (1 + 1e-12)
    w = 1.0 / d[sel]
    return float(np.dot(w, pred.labels[sel]) / w.sum())


def predict_batch(pred: Predictor, features: np.ndarray) -> np.ndarray:
    return np.array([predict(pred, f) for f in features])


def rollout(
    pred: Predictor,
    y_history: np.ndarray,
    u_history: np.ndarray,
    u_future: np.ndarray,
    steps: int,
) -> np.ndarray:
    """Closed-loop rollout: predictions are fed back as lagged outputs.

    y_history: last N normalized outputs; u_history: (O, n_controls)
    normalized controls up to the current step; u_future: (steps,
    n_controls) controls applied during the rollout.
    """
    n_lag = pred.lag_spec.n_output_lags
    c_lag = pred.lag_spec.n_control_lags
    y_buf = list(np.asarray(y_history, dtype=float)[-n_lag:])
    u_buf = [np.asarray(r, dtype=float) for r in u_history][-c_lag:]
    out = []
    for k in range(steps):
        row = [np.array(y_buf[-n_lag:])]
        u_arr = np.array(u_buf[-c_lag:])
        for c in range(u_arr.shape[1]):
            row.append(u_arr[:, c])
        y_next = predict(pred, np.concatenate(row))
        out.append(y_next)
        y_buf.append(y_next)
        u_buf.append(np.asarray(u_future[k], dtype=float))
    return np.array(out)


def mse(predictions: np.ndarray, truth: np.ndarray) -> float:
    """Mean squared error over normalized outputs."""
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ConfigError(f"shape mismatch: {p.shape} vs {t.shape}")
    return float(np.mean((p - t) ** 2))
