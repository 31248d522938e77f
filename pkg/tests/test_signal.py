import numpy as np
import pytest

from dynsample.errors import ConfigError
from dynsample.signal import ControlBounds, FaprbsSegment, generate_faprbs, sample_at


def test_segment_validation():
    with pytest.raises(ConfigError):
        FaprbsSegment(0.0, 5)
    with pytest.raises(ConfigError):
        FaprbsSegment(1.0, 0)


def test_bounds_validation_names_channel():
    with pytest.raises(ConfigError, match="channel 1"):
        ControlBounds(
            np.array([0.0, 0.0]), np.array([1.0, 1.0]), np.array([0.1, 0.8])
        )


def test_faprbs_two_segment_structure(unit_bounds):
    # 30 fast holds then 10 slow holds: 40 plateaus, 700 s total
    segments = [FaprbsSegment(10.0, 30), FaprbsSegment(40.0, 10)]
    sig = generate_faprbs(np.array([0.5]), segments, unit_bounds, rng_seed=0)
    assert sig.n_plateaus == 40
    assert sig.total_duration == 700.0
    changes = np.sum(np.any(np.diff(sig.levels, axis=0) != 0, axis=1))
    assert changes <= 39
    holds = np.diff(np.append(sig.breakpoints, sig.total_duration))
    assert sorted(holds.tolist()) == sorted([10.0] * 30 + [40.0] * 10)


def test_faprbs_clipping_at_bound():
    # mean sits on the lower bound, so roughly half the draws clip
    bounds = ControlBounds(np.array([0.05]), np.array([0.07]), np.array([0.004]))
    sig = generate_faprbs(
        np.array([0.05]), [FaprbsSegment(1.0, 200)], bounds, rng_seed=1
    )
    assert np.all(sig.levels >= 0.05)
    assert np.all(sig.levels <= 0.054 + 1e-15)
    assert np.any(sig.levels == 0.05)  # lower clip active


def test_faprbs_single_plateau_constant(unit_bounds):
    sig = generate_faprbs(np.array([0.5]), [FaprbsSegment(5.0, 1)], unit_bounds, 3)
    assert sig.n_plateaus == 1
    assert sample_at(sig, 0.0) is not None
    assert np.array_equal(sample_at(sig, 2.5), sig.levels[0])


def test_faprbs_amplitude_and_bound_safety(unit_bounds):
    rng_seeds = range(10)
    for s in rng_seeds:
        sig = generate_faprbs(
            np.array([0.3]), [FaprbsSegment(1.0, 20)], unit_bounds, s
        )
        assert np.all(sig.levels >= 0.0) and np.all(sig.levels <= 1.0)
        assert np.all(np.abs(sig.levels - 0.3) <= 0.2 + 1e-15)


def test_faprbs_determinism(unit_bounds, toy_segments):
    a = generate_faprbs(np.array([0.5]), toy_segments, unit_bounds, 42)
    b = generate_faprbs(np.array([0.5]), toy_segments, unit_bounds, 42)
    assert np.array_equal(a.levels, b.levels)
    assert np.array_equal(a.breakpoints, b.breakpoints)


def test_faprbs_duration_identity(unit_bounds):
    segments = [FaprbsSegment(0.25, 7), FaprbsSegment(1.5, 3), FaprbsSegment(2.0, 5)]
    sig = generate_faprbs(np.array([0.5]), segments, unit_bounds, 0)
    assert sig.total_duration == sum(s.n_holds * s.hold_duration for s in segments)


def test_sample_at_conventions(unit_bounds):
    sig = generate_faprbs(
        np.array([0.5]), [FaprbsSegment(1.0, 3)], unit_bounds, 0
    )
    assert np.array_equal(sample_at(sig, 0.0), sig.levels[0])
    # t exactly at a breakpoint returns the new level (right-open intervals)
    assert np.array_equal(sample_at(sig, 1.0), sig.levels[1])
    assert np.array_equal(sample_at(sig, 3.0), sig.levels[2])
    with pytest.raises(ValueError):
        sample_at(sig, 3.5)
    with pytest.raises(ValueError):
        sample_at(sig, -0.1)


def test_faprbs_rejects_mean_outside_bounds(unit_bounds):
    with pytest.raises(ConfigError):
        generate_faprbs(np.array([1.5]), [FaprbsSegment(1.0, 2)], unit_bounds, 0)
