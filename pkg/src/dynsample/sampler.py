"""Four-phase adaptive sampling campaign.

Each epoch shares one initial condition and runs:

  phase 1  space-filling mean inputs (hypercube corners, face centers,
           Hammersley points), one FAPRBS simulation per mean input
  phase 2  expansion of the convex hull of the seeds in output space by
           simulating midpoints of run pairs, scored by distance to the
           seed centroid and to the nearest seed
  phase 3  population of empty regions inside the hull: Voronoi vertices
           of the seeds propose d+1-run combinations, scored by empty-ball
           size versus sample counts in concentric balls
  phase 4  a new initial condition picked from previously traversed
           trajectories, as far as possible from the center of all visited
           states while keeping a minimum distance to used ICs

All geometric reasoning happens in min-max normalized coordinates whose
bounds are frozen per epoch at the end of phase 1.
"""

from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import geometry
from .dataset import Dataset, RunRecord, UsedTargetRecord
from .errors import ConfigError, DegenerateInputError, EpochFailureError
from .models import Model, Trajectory, simulate
from .signal import ControlSignal, FaprbsSegment, generate_faprbs

log = logging.getLogger("dynsample")


# ---------------------------------------------------------------------------
# configuration and small value types


@dataclass
class CampaignConfig:
    dt: float
    horizon: float
    segments: list[FaprbsSegment]
    n_hss: int = 5
    max_sims_phase2: int = 8
    score_threshold_phase2: float = 0.0
    max_sims_phase3: int = 8
    kappa: int = 3
    radius_plateau_tol: float = 0.02
    radius_plateau_iters: int = 2
    max_epochs: int = 1
    ic_min_distance: float | None = None
    output_subset: tuple[int, ...] | None = None
    state_subset: tuple[int, ...] | None = None
    seed_weighting: str = "uniform"  # "uniform" | "discount"
    seed_discount: float = 0.5
    rng_seed: int = 0
    jobs: int = 1

    def validate(self, model: Model) -> None:
        if self.dt <= 0 or self.horizon <= 0:
            raise ConfigError("dt and horizon must be > 0")
        if not self.segments:
            raise ConfigError("need at least one FAPRBS segment")
        total = sum(s.n_holds * s.hold_duration for s in self.segments)
        if self.horizon > total * (1 + 1e-12):
            raise ConfigError(
                f"horizon {self.horizon} exceeds FAPRBS duration {total}"
            )
        for s in self.segments:
            k = round(s.hold_duration / self.dt)
            if k < 1 or abs(k * self.dt - s.hold_duration) > 1e-9:
                raise ConfigError("dt must divide every FAPRBS hold duration")
        k = round(self.horizon / self.dt)
        if abs(k * self.dt - self.horizon) > 1e-9:
            raise ConfigError("dt must divide the horizon")
        if self.n_hss < 0:
            raise ConfigError("n_hss must be >= 0")
        if self.max_sims_phase2 < 0 or self.max_sims_phase3 < 0:
            raise ConfigError("phase simulation budgets must be >= 0")
        if self.kappa < 1:
            raise ConfigError("kappa must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.radius_plateau_iters < 1:
            raise ConfigError("radius_plateau_iters must be >= 1")
        if self.seed_weighting not in ("uniform", "discount"):
            raise ConfigError(f"unknown seed_weighting {self.seed_weighting!r}")
        if self.seed_weighting == "discount" and not 0 < self.seed_discount < 1:
            raise ConfigError("seed_discount must be in (0, 1)")
        out_dim = len(self.resolved_output_subset(model))
        if not 1 <= out_dim <= geometry.MAX_HULL_DIM:
            raise ConfigError(
                f"output subset dimension {out_dim} outside [1, {geometry.MAX_HULL_DIM}]"
            )
        for i in self.resolved_output_subset(model):
            if not 0 <= i < model.n_outputs:
                raise ConfigError(f"output index {i} out of range")
        for i in self.resolved_state_subset(model):
            if not 0 <= i < model.n_states:
                raise ConfigError(f"state index {i} out of range")
        model.control_bounds.__post_init__()  # re-check bound invariants

    def resolved_output_subset(self, model: Model) -> tuple[int, ...]:
        if self.output_subset is None:
            return tuple(range(model.n_outputs))
        return tuple(self.output_subset)

    def resolved_state_subset(self, model: Model) -> tuple[int, ...]:
        if self.state_subset is None:
            return tuple(range(model.n_states))
        return tuple(self.state_subset)


@dataclass(frozen=True)
class MinMaxNormalizer:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, samples: np.ndarray) -> "MinMaxNormalizer":
        return cls(samples.min(axis=0), samples.max(axis=0))

    @property
    def span(self) -> np.ndarray:
        s = self.hi - self.lo
        return np.where(s > 0, s, 1.0)

    def normalize(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=float) - self.lo) / self.span

    def denormalize(self, y: np.ndarray) -> np.ndarray:
        return self.lo + np.asarray(y, dtype=float) * self.span


@dataclass(frozen=True)
class Seed:
    """Weighted mean of one run's outputs, with the run's mean input."""

    run_id: int
    y_bar: np.ndarray  # normalized output-subset coordinates
    u_bar: np.ndarray  # unit-cube input coordinates
    epoch: int


@dataclass(frozen=True)
class Candidate:
    u_star: np.ndarray
    t_star: np.ndarray
    score: float
    provenance: tuple[int, ...]
    l_star: float
    r_star: float
    vertex: np.ndarray | None = None  # phase-3 diagnostic: the Voronoi vertex


# ---------------------------------------------------------------------------
# seed and scoring primitives


def seed_weights(n: int, weighting: str, gamma: float) -> np.ndarray:
    if weighting == "uniform":
        return np.ones(n)
    if weighting == "discount":
        return 1.0 - gamma ** (np.arange(n) + 1)
    raise ConfigError(f"unknown weighting {weighting!r}")


def compute_seed(
    traj: Trajectory,
    normalizer: MinMaxNormalizer,
    output_subset: tuple[int, ...],
    weighting: str = "uniform",
    gamma: float = 0.5,
    epoch: int = 0,
    u_bar: np.ndarray | None = None,
) -> Seed:
    """Weighted mean of the run's output samples in normalized coordinates."""
    if traj.n_samples < 1:
        raise ConfigError("cannot compute a seed from an empty trajectory")
    y = normalizer.normalize(traj.outputs[:, list(output_subset)])
    w = seed_weights(traj.n_samples, weighting, gamma)
    y_bar = (w[:, None] * y).sum(axis=0) / w.sum()
    return Seed(traj.run_id, y_bar, u_bar if u_bar is not None else np.empty(0), epoch)


def expansion_metrics(t_star: np.ndarray, seed_points: np.ndarray) -> tuple[float, float]:
    """Distance to the seed centroid (l*) and to the nearest seed (r*)."""
    center = seed_points.mean(axis=0)
    l_star = float(np.linalg.norm(t_star - center))
    r_star, _ = geometry.nearest_distance(t_star, seed_points)
    return l_star, r_star


def score_expansion(l_star: float, r_star: float) -> float:
    """Expansion score: improves with distance from the centroid and from
    the nearest seed."""
    return l_star * r_star


def count_in_balls(
    t_star: np.ndarray, r_star: float, kappa: int, all_outputs: np.ndarray
) -> np.ndarray:
    """Cumulative sample counts in closed balls of radius j*r_star, j=1..kappa."""
    if kappa < 1:
        raise ConfigError("kappa must be >= 1")
    if r_star <= 0:
        raise ConfigError("r_star must be > 0")
    if all_outputs.size == 0:
        return np.zeros(kappa, dtype=int)
    dists = np.linalg.norm(all_outputs - t_star, axis=1)
    return np.array([int(np.sum(dists <= j * r_star)) for j in range(1, kappa + 1)])


def score_population(r_star: float, counts: np.ndarray, kappa: int) -> float:
    """Population score: favors large empty balls; inner shells count more.

    score = r* / (1 + sum_j w_j n_j), w_j = (kappa - j + 1) / kappa.
    """
    w = (kappa - np.arange(1, kappa + 1) + 1) / kappa
    return float(r_star / (1.0 + float(np.dot(w, np.asarray(counts, dtype=float)))))


def phase1_unit_points(d_u: int, n_hss: int) -> tuple[np.ndarray, int]:
    """Phase-1 mean-input points in [0,1]^d_u and the pre-dedup count.

    Corners and face centers first, then the Hammersley set; exact
    coordinate duplicates are removed (first occurrence wins).
    """
    blocks = [geometry.corner_and_face_points(d_u)]
    if n_hss > 0:
        blocks.append(geometry.hammersley(n_hss, d_u))
    raw = np.vstack(blocks)
    return geometry.dedup_points(raw), raw.shape[0]


def phase4_next_ic(
    all_trajectories: list[Trajectory],
    used_ics: list[np.ndarray],
    state_subset: tuple[int, ...],
    ic_min_distance: float | None,
    rng_seed: int = 0,
) -> np.ndarray | None:
    """Pick a new initial condition from previously traversed states.

    Ranks every recorded state sample (all epochs) by distance from the
    center of all samples, in normalized state-subset coordinates, and
    returns the first whose distance to every used IC is at least the
    minimum distance.  Returns None when no point qualifies.
    """
    blocks = [t.states for t in all_trajectories if t.n_samples]
    if not blocks:
        return None
    states = np.vstack(blocks)
    sub = list(state_subset)
    norm = MinMaxNormalizer.fit(states[:, sub])
    pts = norm.normalize(states[:, sub])
    if ic_min_distance is None:
        ic_min_distance = geometry.mean_pairwise_distance_unit_cube(
            len(sub), 100_000, rng_seed
        )
    center = pts.mean(axis=0)
    order = np.argsort(-np.linalg.norm(pts - center, axis=1), kind="stable")
    used = np.array([norm.normalize(np.asarray(ic)[sub]) for ic in used_ics])
    for i in order:
        if np.all(np.linalg.norm(used - pts[i], axis=1) >= ic_min_distance):
            return states[i].copy()
    return None


# ---------------------------------------------------------------------------
# campaign engine


class _Campaign:
    def __init__(self, config: CampaignConfig, model: Model):
        config.validate(model)
        self.cfg = config
        self.model = model
        self.out_sub = config.resolved_output_subset(model)
        self.state_sub = config.resolved_state_subset(model)
        self.d = len(self.out_sub)
        self.runs: list[RunRecord] = []
        self.used_targets: list[UsedTargetRecord] = []
        self.normalizers: dict[int, MinMaxNormalizer] = {}
        self.seeds: dict[int, Seed] = {}  # current-epoch seeds by run_id
        self.diag: dict = {"epochs": []}
        self.sim_seconds = 0.0
        self.t_start = time.perf_counter()

    # -- helpers ----------------------------------------------------------

    def _u_eng(self, u_unit: np.ndarray) -> np.ndarray:
        b = self.model.control_bounds
        return b.lower + u_unit * (b.upper - b.lower)

    def _run(self, epoch: int, phase: int, u_unit: np.ndarray, x0: np.ndarray,
             provenance: dict | None = None) -> RunRecord:
        run_id = len(self.runs)
        u_eng = self._u_eng(u_unit)
        sig = generate_faprbs(
            u_eng, self.cfg.segments, self.model.control_bounds,
            rng_seed=[self.cfg.rng_seed, run_id],
        )
        t0 = time.perf_counter()
        traj = simulate(self.model, x0, sig, self.cfg.dt, self.cfg.horizon, run_id)
        self.sim_seconds += time.perf_counter() - t0
        rec = RunRecord(run_id, epoch, phase, u_unit, u_eng, sig, traj,
                        provenance=provenance)
        self.runs.append(rec)
        log.info("epoch=%d phase=%d run=%d status=%s", epoch, phase, run_id,
                 traj.status)
        return rec

    def _qualifies(self, traj: Trajectory) -> bool:
        if traj.status == "completed":
            return True
        completed_time = (traj.n_samples - 1) * self.cfg.dt
        return completed_time >= 0.5 * self.cfg.horizon

    def _seed_for(self, rec: RunRecord, epoch: int) -> Seed | None:
        if not self._qualifies(rec.trajectory):
            return None
        s = compute_seed(
            rec.trajectory, self.normalizers[epoch], self.out_sub,
            self.cfg.seed_weighting, self.cfg.seed_discount,
            epoch=epoch, u_bar=rec.u_bar,
        )
        rec.seed_y = s.y_bar
        return s

    def _epoch_seed_arrays(self) -> tuple[list[int], np.ndarray, np.ndarray]:
        ids = sorted(self.seeds)
        y = np.array([self.seeds[i].y_bar for i in ids])
        u = np.array([self.seeds[i].u_bar for i in ids])
        return ids, y, u

    def _target_valid(self, epoch: int, t_norm: np.ndarray) -> bool:
        norm = self.normalizers[epoch]
        for ut in self.used_targets:
            t_used = norm.normalize(ut.t_raw)
            if np.linalg.norm(t_norm - t_used) < ut.r_at_use:
                return False
        return True

    def _mark_used(self, epoch: int, t_norm: np.ndarray, r_star: float) -> None:
        t_raw = self.normalizers[epoch].denormalize(t_norm)
        self.used_targets.append(
            UsedTargetRecord(t_raw, float(r_star), epoch, len(self.used_targets))
        )

    def _epoch_outputs_norm(self, epoch: int) -> np.ndarray:
        blocks = [
            r.trajectory.outputs[:, list(self.out_sub)]
            for r in self.runs
            if r.epoch == epoch and r.trajectory.n_samples
        ]
        if not blocks:
            return np.empty((0, self.d))
        return self.normalizers[epoch].normalize(np.vstack(blocks))

    def _hull_volume(self) -> float | None:
        _, y, _ = self._epoch_seed_arrays()
        if y.shape[0] < self.d + 1:
            return None
        try:
            return geometry.convex_hull(y).volume
        except DegenerateInputError:
            return None

    # -- phases -----------------------------------------------------------

    def phase1(self, epoch: int, x0: np.ndarray, ediag: dict) -> None:
        pts, prededup = phase1_unit_points(self.model.n_controls, self.cfg.n_hss)
        ediag["phase1_prededup"] = prededup
        ediag["phase1_count"] = int(pts.shape[0])
        first_id = len(self.runs)
        if self.cfg.jobs > 1:
            b = self.model.control_bounds
            sigs = []
            for k in range(pts.shape[0]):
                sigs.append(generate_faprbs(
                    self._u_eng(pts[k]), self.cfg.segments, b,
                    rng_seed=[self.cfg.rng_seed, first_id + k],
                ))
            t0 = time.perf_counter()
            with ThreadPoolExecutor(max_workers=self.cfg.jobs) as ex:
                trajs = list(ex.map(
                    lambda a: simulate(self.model, x0, a[1], self.cfg.dt,
                                       self.cfg.horizon, first_id + a[0]),
                    enumerate(sigs),
                ))
            self.sim_seconds += time.perf_counter() - t0
            for k, (sig, traj) in enumerate(zip(sigs, trajs)):
                rec = RunRecord(first_id + k, epoch, 1, pts[k],
                                self._u_eng(pts[k]), sig, traj)
                self.runs.append(rec)
                log.info("epoch=%d phase=1 run=%d status=%s", epoch,
                         rec.run_id, traj.status)
        else:
            for k in range(pts.shape[0]):
                self._run(epoch, 1, pts[k], x0)

        epoch_runs = [r for r in self.runs if r.epoch == epoch]
        if not any(r.trajectory.status == "completed" for r in epoch_runs):
            raise EpochFailureError(f"epoch {epoch}: all phase-1 simulations diverged")

        # freeze this epoch's normalization from all data recorded so far
        all_y = np.vstack([
            r.trajectory.outputs[:, list(self.out_sub)]
            for r in self.runs if r.trajectory.n_samples
        ])
        self.normalizers[epoch] = MinMaxNormalizer.fit(all_y)

        self.seeds = {}
        for r in epoch_runs:
            s = self._seed_for(r, epoch)
            if s is not None:
                self.seeds[r.run_id] = s

    def phase2(self, epoch: int, x0: np.ndarray, ediag: dict) -> None:
        ediag["phase2_candidate_counts"] = []
        ediag["phase2_hull_volumes"] = [self._hull_volume()]
        count = 0
        reason = "max_sims"
        while count < self.cfg.max_sims_phase2:
            ids, y, u = self._epoch_seed_arrays()
            if len(ids) < 2:
                reason = "too_few_seeds"
                break
            center = y.mean(axis=0)
            candidates = []
            for a, b in itertools.combinations(range(len(ids)), 2):
                t_star = (y[a] + y[b]) / 2.0
                u_star = (u[a] + u[b]) / 2.0
                l_star = float(np.linalg.norm(t_star - center))
                r_star, _ = geometry.nearest_distance(t_star, y)
                candidates.append(Candidate(
                    u_star, t_star, score_expansion(l_star, r_star),
                    (ids[a], ids[b]), l_star, r_star,
                ))
            ediag["phase2_candidate_counts"].append(len(candidates))
            valid = [c for c in candidates if self._target_valid(epoch, c.t_star)]
            if not valid:
                reason = "no_valid_targets"
                break
            best = min(valid, key=lambda c: (-c.score, c.provenance))
            if best.score < self.cfg.score_threshold_phase2:
                reason = "score_threshold"
                break
            self._mark_used(epoch, best.t_star, best.r_star)
            rec = self._run(epoch, 2, best.u_star, x0, provenance={
                "kind": "expansion",
                "runs": list(best.provenance),
                "t_star": best.t_star.tolist(),
                "l_star": best.l_star,
                "r_star": best.r_star,
                "score": best.score,
            })
            s = self._seed_for(rec, epoch)
            if s is not None:
                self.seeds[rec.run_id] = s
            count += 1
            ediag["phase2_hull_volumes"].append(self._hull_volume())
        ediag["phase2_count"] = count
        ediag["phase2_termination"] = reason

    def _population_candidates(self, epoch: int) -> list[Candidate] | None:
        ids, y, u = self._epoch_seed_arrays()
        if len(ids) < self.d + 2:
            return None
        try:
            vertices = geometry.voronoi_vertices(
                y, rng_seed=[self.cfg.rng_seed, epoch]
            )
        except DegenerateInputError:
            return None
        out = []
        for vertex, defining, _radius in vertices:
            t_star = y[list(defining)].mean(axis=0)
            u_star = u[list(defining)].mean(axis=0)
            r_star, _ = geometry.nearest_distance(t_star, y[list(defining)])
            out.append(Candidate(
                u_star, t_star, 0.0,
                tuple(sorted(ids[j] for j in defining)),
                0.0, r_star, vertex=vertex,
            ))
        return out

    def phase3(self, epoch: int, x0: np.ndarray, ediag: dict) -> None:
        ediag["phase3_mean_r"] = []
        count = 0
        plateau = 0
        prev_mean = None
        reason = "max_sims"
        while count < self.cfg.max_sims_phase3:
            candidates = self._population_candidates(epoch)
            if candidates is None:
                reason = "degenerate_or_too_few_seeds"
                log.info("epoch=%d phase=3 skipped: %s", epoch, reason)
                break
            mean_r = float(np.mean([c.r_star for c in candidates]))
            ediag["phase3_mean_r"].append(mean_r)
            if prev_mean is not None and prev_mean > 0:
                if abs(mean_r - prev_mean) < self.cfg.radius_plateau_tol * prev_mean:
                    plateau += 1
                else:
                    plateau = 0
            prev_mean = mean_r
            if plateau >= self.cfg.radius_plateau_iters:
                reason = "radius_plateau"
                break
            valid = [
                c for c in candidates
                if c.r_star > 0 and self._target_valid(epoch, c.t_star)
            ]
            if not valid:
                reason = "no_valid_targets"
                break
            all_y = self._epoch_outputs_norm(epoch)
            scored = []
            for c in valid:
                counts = count_in_balls(c.t_star, c.r_star, self.cfg.kappa, all_y)
                scored.append(Candidate(
                    c.u_star, c.t_star,
                    score_population(c.r_star, counts, self.cfg.kappa),
                    c.provenance, c.l_star, c.r_star, vertex=c.vertex,
                ))
            best = min(scored, key=lambda c: (-c.score, c.provenance))
            self._mark_used(epoch, best.t_star, best.r_star)
            rec = self._run(epoch, 3, best.u_star, x0, provenance={
                "kind": "population",
                "runs": list(best.provenance),
                "t_star": best.t_star.tolist(),
                "vertex": None if best.vertex is None else best.vertex.tolist(),
                "r_star": best.r_star,
                "score": best.score,
            })
            s = self._seed_for(rec, epoch)
            if s is not None:
                self.seeds[rec.run_id] = s
            count += 1
        ediag["phase3_count"] = count
        ediag["phase3_termination"] = reason

    # -- driver -----------------------------------------------------------

    def run(self) -> Dataset:
        cfg = self.cfg
        x0 = np.asarray(self.model.default_x0, dtype=float)
        used_ics = [x0]
        ics = [x0]
        stop_reason = "max_epochs"
        for epoch in range(cfg.max_epochs):
            ediag: dict = {"epoch": epoch}
            self.diag["epochs"].append(ediag)
            self.phase1(epoch, x0, ediag)
            self.phase2(epoch, x0, ediag)
            self.phase3(epoch, x0, ediag)
            if epoch + 1 >= cfg.max_epochs:
                break
            nxt = phase4_next_ic(
                [r.trajectory for r in self.runs],
                used_ics,
                self.state_sub,
                cfg.ic_min_distance,
                cfg.rng_seed,
            )
            if nxt is None:
                stop_reason = "no_valid_initial_conditions"
                break
            x0 = nxt
            used_ics.append(x0)
            ics.append(x0)
        self.diag["stop_reason"] = stop_reason

        icmd = cfg.ic_min_distance
        if icmd is None:
            icmd = geometry.mean_pairwise_distance_unit_cube(
                len(self.state_sub), 100_000, cfg.rng_seed
            )

        meta = {
            "model": self.model.name,
            "rng_seed": cfg.rng_seed,
            "config": {
                "dt": cfg.dt,
                "horizon": cfg.horizon,
                "segments": [[s.hold_duration, s.n_holds] for s in cfg.segments],
                "n_hss": cfg.n_hss,
                "max_sims_phase2": cfg.max_sims_phase2,
                "score_threshold_phase2": cfg.score_threshold_phase2,
                "max_sims_phase3": cfg.max_sims_phase3,
                "kappa": cfg.kappa,
                "radius_plateau_tol": cfg.radius_plateau_tol,
                "radius_plateau_iters": cfg.radius_plateau_iters,
                "max_epochs": cfg.max_epochs,
                "ic_min_distance": icmd,
                "output_subset": list(self.out_sub),
                "state_subset": list(self.state_sub),
                "seed_weighting": cfg.seed_weighting,
                "seed_discount": cfg.seed_discount,
            },
            "diagnostics": self.diag,
        }
        ds = Dataset(meta=meta)
        ds.runs = self.runs
        ds.used_targets = self.used_targets
        ds.initial_conditions = ics
        ds.norm_bounds = {e: (n.lo, n.hi) for e, n in self.normalizers.items()}
        ds.timing = {  # not serialized; wall-clock is impure
            "total_seconds": time.perf_counter() - self.t_start,
            "simulation_seconds": self.sim_seconds,
        }
        return ds


def run_campaign(config: CampaignConfig, model: Model) -> Dataset:
    """Run a full adaptive campaign: epochs of phases 1-4.

    Deterministic for a fixed (config, model) pair including rng_seed.
    """
    return _Campaign(config, model).run()
