import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semimarkov.errors import NotIrreducible
from semimarkov.kernel import SojournLaw, validate_kernel
from semimarkov.presets import (
    asymmetric_telegraph,
    deterministic_cycle,
    equal_rows_pm1,
    symmetric_telegraph,
    three_state_aperiodic,
)
from semimarkov.regen import (
    estimate_gamma2_cycles,
    evaluate_observable,
    harvest_cycles,
    split_cycles,
    stationary_observable_mean,
    wald_check,
)
from semimarkov.simulate import sample_markov_renewal
from semimarkov.telegraph import alternating_kernel

from conftest import kernels
from test_simulate import manual_trajectory


class TestSplitCycles:
    def test_five_state_example(self):
        # chain visits a,b,a,a,b with v0 = a: passages at chain indices 2 and 3
        traj = manual_trajectory([0, 1, 0, 0, 1], [1.0, 2.0, 3.0, 4.0])
        cs = split_cycles(traj, 0)
        np.testing.assert_array_equal(cs.anchors, [0, 2, 3])
        assert cs.n_cycles == 2
        # started at v0: delay segment empty, first cycle begins at chain index 0
        assert cs.head_slice == slice(0, 0)
        np.testing.assert_array_equal(cs.cycle_lengths(), [2, 1])
        prev, xi = cs.cycle_steps(0)
        np.testing.assert_array_equal(prev, [0, 1])
        np.testing.assert_allclose(xi, [1.0, 2.0])
        prev, xi = cs.cycle_steps(1)
        np.testing.assert_array_equal(prev, [0])
        assert cs.tail_slice == slice(3, 4)

    def test_delayed_start(self):
        traj = manual_trajectory([0, 1, 0, 0, 1], [1.0, 2.0, 3.0, 4.0])
        cs = split_cycles(traj, 1)
        np.testing.assert_array_equal(cs.anchors, [1, 4])
        assert cs.n_cycles == 1
        assert cs.head_slice == slice(0, 1)
        prev, _ = cs.cycle_steps(0)
        np.testing.assert_array_equal(prev, [1, 0, 0])
        assert cs.tail_slice == slice(4, 4)

    def test_cycles_start_at_reference_without_interior_visits(self):
        traj = sample_markov_renewal(three_state_aperiodic(), 2, n_steps=500, seed=3)
        cs = split_cycles(traj, 2)
        for i in range(cs.n_cycles):
            prev, _ = cs.cycle_steps(i)
            assert prev[0] == 2
            assert (prev[1:] != 2).all()

    def test_alternating_chain_cycle_length_is_m(self):
        k = alternating_kernel([1.0, -1.0, 0.5], [SojournLaw.exponential(1.0)] * 3)
        traj = sample_markov_renewal(k, 0, n_steps=91, seed=7)
        cs = split_cycles(traj, 0)
        assert cs.n_cycles == 30
        assert (cs.cycle_lengths() == 3).all()

    def test_no_revisit_is_flagged_not_error(self):
        traj = manual_trajectory([2, 1, 1], [1.0, 1.0])
        cs = split_cycles(traj, 0)
        assert cs.n_cycles == 0
        assert cs.head_slice == slice(0, 2)

    @given(kernels(max_states=3), st.integers(0, 2**31), st.integers(0, 2))
    @settings(max_examples=25)
    def test_reconstruction_identity(self, kernel, seed, v0):
        traj = sample_markov_renewal(kernel, 0, n_steps=40, seed=seed)
        cs = split_cycles(traj, v0)
        slices = [cs.head_slice] + [cs.cycle_slice(i) for i in range(cs.n_cycles)] + [cs.tail_slice]
        rebuilt = np.concatenate([traj.sojourns[s] for s in slices])
        np.testing.assert_array_equal(rebuilt, traj.sojourns)
        covered = np.concatenate([np.arange(s.start, s.stop) for s in slices])
        np.testing.assert_array_equal(covered, np.arange(traj.n_steps))


class TestGamma2Cycles:
    def test_deterministic_cycle_is_exactly_zero(self):
        est, se = estimate_gamma2_cycles(deterministic_cycle(), 0, 500, 0.0, seed=1)
        assert est == 0.0 and se == 0.0

    def test_symmetric_telegraph(self):
        est, se = estimate_gamma2_cycles(symmetric_telegraph(), 0, 20_000, 0.0, seed=10)
        assert abs(est - 1.0) <= 3 * se

    def test_equal_rows_independence_oracle(self):
        # rows equal: eta_k i.i.d., so gamma^2 = E[xi^2] = 2 for Exp(1)
        k = equal_rows_pm1()
        est, se = estimate_gamma2_cycles(k, 0, 20_000, 0.0, seed=11)
        assert abs(est - 2.0) <= 3 * se

    def test_reducible_rejected(self):
        k = equal_rows_pm1()
        bad = type(k)(states=k.states, P=np.eye(2), laws=k.laws)
        with pytest.raises(NotIrreducible):
            estimate_gamma2_cycles(bad, 0, 100, 0.0, seed=0)


class TestWald:
    def test_counting_identity(self):
        k = three_state_aperiodic()
        s = validate_kernel(k)
        lhs, rhs, se = wald_check(k, "one", 1, 20_000, seed=5)
        assert rhs == pytest.approx(1.0 / s.pi[1], abs=1e-12)
        assert abs(lhs - rhs) <= 3 * se

    def test_centered_observable_has_zero_mean(self):
        k = asymmetric_telegraph().kernel()
        lhs, rhs, se = wald_check(k, "centered", 0, 20_000, seed=6)
        assert rhs == 0.0
        assert abs(lhs) <= 3 * se

    def test_sojourn_observable_asymmetric_value(self):
        lhs, rhs, se = wald_check(asymmetric_telegraph().kernel(), "x", 0, 20_000, seed=7)
        assert rhs == pytest.approx(1.5, abs=1e-12)
        assert abs(lhs - rhs) <= 3 * se

    def test_velocity_weighted_observable(self):
        k = three_state_aperiodic()
        s = validate_kernel(k)
        lhs, rhs, se = wald_check(k, "vx", 2, 20_000, seed=8)
        assert rhs == pytest.approx(stationary_observable_mean("vx", k, s.pi) / s.pi[2], abs=1e-12)
        assert abs(lhs - rhs) <= 3 * se

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            wald_check(symmetric_telegraph(), "x*x", 0, 10, seed=0)


class TestCycleLengths:
    @pytest.mark.parametrize("v0", [0, 1, 2])
    def test_mean_cycle_length_is_kac_inverse(self, v0):
        k = three_state_aperiodic()
        cs, pi = harvest_cycles(k, v0, 15_000, seed=100 + v0)
        lengths = cs.cycle_lengths()[:15_000]
        se = lengths.std(ddof=1) / np.sqrt(lengths.size)
        assert abs(lengths.mean() - 1.0 / pi[v0]) <= 3 * se


def test_observable_catalog_evaluations():
    v = np.array([2.0, -1.0])
    x = np.array([0.5, 2.0])
    np.testing.assert_allclose(evaluate_observable("one", v, x), [1.0, 1.0])
    np.testing.assert_allclose(evaluate_observable("x", v, x), x)
    np.testing.assert_allclose(evaluate_observable("vx", v, x), [1.0, -2.0])
    np.testing.assert_allclose(evaluate_observable("centered", v, x, 1.0), [0.5, -4.0])
