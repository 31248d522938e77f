"""Train the lag-window nearest-neighbor surrogate on a campaign dataset
and score its one-step predictions on withheld test trajectories.

The surrogate is a deliberately small stand-in for a trained dynamic
model: it measures dataset quality, not production accuracy.
"""

import numpy as np

from dynsample import surrogate
from dynsample.dataset import Dataset, RunRecord
from dynsample.models import builtin_model, simulate
from dynsample.sampler import CampaignConfig, run_campaign
from dynsample.signal import FaprbsSegment, generate_faprbs

model = builtin_model("lotka")
segments = [FaprbsSegment(0.5, 30), FaprbsSegment(1.5, 10)]
dt, horizon = 0.05, 30.0

cfg = CampaignConfig(
    dt=dt, horizon=horizon, segments=segments,
    n_hss=0, max_sims_phase2=8, max_sims_phase3=8, max_epochs=1, rng_seed=0,
)
train = run_campaign(cfg, model)
print(f"training set: {train.n_runs} runs")

# withheld test runs at mean inputs that never appear in training
rng = np.random.default_rng(99)
runs = []
for k in range(5):
    u_unit = rng.random(model.n_controls)
    u_eng = model.control_bounds.lower + u_unit * (
        model.control_bounds.upper - model.control_bounds.lower
    )
    sig = generate_faprbs(u_eng, segments, model.control_bounds, [99, k])
    runs.append(
        RunRecord(k, 0, 1, u_unit, u_eng, sig,
                  simulate(model, model.default_x0, sig, dt, horizon, k))
    )
test = Dataset(meta={"config": {}})
test.runs = runs

lag = surrogate.LagSpec(n_output_lags=3, n_control_lags=2, k_neighbors=3)
norm = surrogate.norm_info(train)
for idx in range(model.n_outputs):
    pred = surrogate.fit(
        surrogate.build_examples(train, lag, idx, norm=norm), lag, idx
    )
    fx, fy, _ = surrogate.build_examples(test, lag, idx, norm=norm)
    err = surrogate.mse(surrogate.predict_batch(pred, fx), fy)
    print(f"output {idx}: one-step test MSE {err:.3e} "
          f"({len(fy)} test windows, {len(pred.labels)} stored examples)")

# short closed-loop rollout from the first test run
tr = test.runs[0].trajectory
y_hist = norm.norm_y(tr.outputs[:3])[:, 0]
u_hist = norm.norm_u(tr.controls[:3])
u_future = norm.norm_u(tr.controls[3:43])
pred0 = surrogate.fit(surrogate.build_examples(train, lag, 0, norm=norm), lag, 0)
roll = surrogate.rollout(pred0, y_hist, u_hist, u_future, steps=40)
truth = norm.norm_y(tr.outputs[3:43])[:, 0]
print(f"40-step rollout MSE (output 0): {surrogate.mse(roll, truth):.3e}")
