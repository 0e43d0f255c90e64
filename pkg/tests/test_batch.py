import numpy as np
import pytest

from semimarkov.batch import sample_path_statistics
from semimarkov.presets import deterministic_cycle, symmetric_telegraph
from semimarkov.simulate import counting, integral_path, sample_markov_renewal


def test_deterministic_kernel_exact_functionals():
    stats = sample_path_statistics(deterministic_cycle(), 3, [0.5, 1.0, 2.5], 0, seed=1)
    # every replication of the deterministic kernel is the same triangle wave
    np.testing.assert_array_equal(stats.counts, np.tile([0, 1, 2], (3, 1)))
    np.testing.assert_array_equal(stats.state_idx, np.tile([0, 1, 0], (3, 1)))
    np.testing.assert_allclose(stats.integral, np.tile([0.5, 1.0, 0.5], (3, 1)), atol=1e-15)


def test_matches_trajectory_functionals_in_law():
    # same kernel, same stop: the lockstep engine and the per-trajectory
    # route must produce the same exact values for a deterministic path
    k = deterministic_cycle(c=0.75)
    stats = sample_path_statistics(k, 1, [2.0], 0, seed=3)
    traj = sample_markov_renewal(k, 0, until_time=2.0, seed=3)
    assert stats.counts[0, 0] == counting(traj, 2.0)
    assert stats.integral[0, 0] == pytest.approx(integral_path(traj, [2.0])[0], abs=1e-12)


def test_worker_count_invariance_with_multiple_chunks():
    k = symmetric_telegraph()
    a = sample_path_statistics(k, 1000, [1.0], 0, seed=9, workers=1, chunk_size=128)
    b = sample_path_statistics(k, 1000, [1.0], 0, seed=9, workers=3, chunk_size=128)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.state_idx, b.state_idx)
    np.testing.assert_array_equal(a.integral, b.integral)


def test_stop_validation():
    with pytest.raises(ValueError):
        sample_path_statistics(symmetric_telegraph(), 10, [1.0, 0.5], 0, seed=0)
    with pytest.raises(ValueError):
        sample_path_statistics(symmetric_telegraph(), 10, [], 0, seed=0)


def test_stop_at_time_zero():
    stats = sample_path_statistics(symmetric_telegraph(), 5, [0.0, 1.0], 0, seed=2)
    np.testing.assert_array_equal(stats.counts[:, 0], np.zeros(5))
    np.testing.assert_allclose(stats.integral[:, 0], np.zeros(5))
    np.testing.assert_array_equal(stats.state_idx[:, 0], np.zeros(5))
