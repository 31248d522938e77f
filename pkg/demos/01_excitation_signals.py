"""Build a multi-segment excitation signal and inspect its structure.

The signal concatenates APRBS segments with different hold durations:
short holds probe fast dynamics, long holds let slow modes settle.
"""

import numpy as np

from dynsample.signal import ControlBounds, FaprbsSegment, generate_faprbs, sample_at

bounds = ControlBounds(
    lower=np.array([5000.0, 59.0, 0.05]),
    upper=np.array([6000.0, 89.0, 0.07]),
    faprbs_amplitude=np.array([200.0, 6.0, 0.004]),
)
mean_u = np.array([5500.0, 74.0, 0.06])
segments = [FaprbsSegment(10.0, 30), FaprbsSegment(40.0, 10)]

sig = generate_faprbs(mean_u, segments, bounds, rng_seed=0)

print(f"total duration: {sig.total_duration}")
print(f"plateaus:       {len(sig.breakpoints)}")
holds = np.diff(np.append(sig.breakpoints, sig.total_duration))
print(f"hold durations: {sorted(set(holds.tolist()))}")
print(f"level ranges per channel:")
for c in range(3):
    lv = sig.levels[:, c]
    print(
        f"  channel {c}: [{lv.min():.4g}, {lv.max():.4g}] "
        f"inside [{mean_u[c] - bounds.faprbs_amplitude[c]:.4g}, "
        f"{mean_u[c] + bounds.faprbs_amplitude[c]:.4g}]"
    )

print("\nfirst 60 time units of channel 1:")
for t in np.arange(0.0, 60.0, 10.0):
    u = sample_at(sig, float(t))
    print(f"  t={t:5.1f}  u1={u[1]:.3f}")
