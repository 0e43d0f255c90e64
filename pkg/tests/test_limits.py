import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semimarkov.errors import NotIrreducible, PeriodicChain
from semimarkov.kernel import validate_kernel
from semimarkov.limits import (
    autocovariance,
    gamma2_series,
    limit_parameters,
    mean_sojourn,
    occupancy_limit,
    theta,
)
from semimarkov.presets import (
    APERIODIC_TEST_KERNELS,
    asymmetric_telegraph,
    bipartite_periodic,
    deterministic_cycle,
    equal_rows_pm1,
    symmetric_telegraph,
    three_state_aperiodic,
)
from semimarkov.regen import estimate_gamma2_cycles
from semimarkov.simulate import sample_markov_renewal
from semimarkov.telegraph import alternating_limits, telegraph_limit, TelegraphSpec

from conftest import kernels


def pi_of(kernel):
    return validate_kernel(kernel).pi


class TestTheta:
    def test_symmetric_telegraph_is_centered(self):
        k = symmetric_telegraph()
        assert theta(k, pi_of(k)) == pytest.approx(0.0, abs=1e-15)

    def test_asymmetric_telegraph_substitution(self):
        k = asymmetric_telegraph().kernel()
        assert theta(k, pi_of(k)) == pytest.approx(1.0, abs=1e-14)

    def test_matches_iid_monte_carlo_ratio(self):
        # independent one-step oracle: V ~ pi, then one (next state, sojourn) draw
        k = three_state_aperiodic()
        pi = pi_of(k)
        th = theta(k, pi)
        rng = np.random.default_rng(12345)
        n = 400_000
        m = k.n_states
        v_idx = rng.choice(m, size=n, p=pi)
        u = rng.random(n)
        cum = np.cumsum(k.P, axis=1)
        w_idx = np.minimum((u[:, None] >= cum[v_idx]).sum(axis=1), m - 1)
        xi = np.empty(n)
        for v in range(m):
            for w in range(m):
                law = k.laws[v][w]
                if law is None:
                    continue
                sel = (v_idx == v) & (w_idx == w)
                if sel.any():
                    xi[sel] = law.sample(rng, int(sel.sum()))
        num = k.states[v_idx] * xi
        resid = num - th * xi
        se = resid.std(ddof=1) / np.sqrt(n) / xi.mean()
        assert abs(num.mean() / xi.mean() - th) <= 3 * se


class TestMeanSojourn:
    def test_symmetric(self):
        k = symmetric_telegraph()
        assert mean_sojourn(k, pi_of(k)) == 1.0

    def test_asymmetric(self):
        k = asymmetric_telegraph().kernel()
        assert mean_sojourn(k, pi_of(k)) == pytest.approx(0.75, abs=1e-15)

    def test_deterministic_everywhere(self):
        k = deterministic_cycle(c=2.5)
        assert mean_sojourn(k, pi_of(k)) == pytest.approx(2.5, abs=1e-15)


class TestAutocovariance:
    def test_equal_rows_lag_one_vanishes(self):
        k = equal_rows_pm1()
        assert autocovariance(k, pi_of(k), 0.0, 1) == pytest.approx(0.0, abs=1e-15)

    def test_equal_rows_lag_zero_is_second_moment(self):
        k = equal_rows_pm1()
        assert autocovariance(k, pi_of(k), 0.0, 0) == pytest.approx(2.0, abs=1e-14)

    def test_alternating_lag_one_hand_value(self):
        k = symmetric_telegraph()
        assert autocovariance(k, pi_of(k), 0.0, 1) == pytest.approx(-1.0, abs=1e-14)

    def test_matches_stationary_monte_carlo(self):
        # the closed form marginalizes the sojourn-conditioned step law; gate
        # it against a long stationary-start path before trusting the series
        k = three_state_aperiodic()
        pi = pi_of(k)
        th = theta(k, pi)
        traj = sample_markov_renewal(k, pi, n_steps=1_000_000, seed=123)
        eta = (k.states[traj.states[:-1]] - th) * traj.sojourns
        for lag in range(4):
            prod = eta * eta if lag == 0 else eta[:-lag] * eta[lag:]
            closed = autocovariance(k, pi, th, lag)
            se = prod.std(ddof=1) / np.sqrt(prod.size)
            assert abs(prod.mean() - closed) <= 3 * se


class TestGamma2Series:
    def test_equal_rows_reduces_to_lag_zero(self):
        k = equal_rows_pm1()
        assert gamma2_series(k, pi_of(k), 0.0) == pytest.approx(2.0, abs=1e-12)

    def test_periodic_chain_rejected(self):
        k = symmetric_telegraph()
        with pytest.raises(PeriodicChain):
            gamma2_series(k, pi_of(k), 0.0)

    def test_agrees_with_cycle_estimator(self):
        k = three_state_aperiodic()
        pi = pi_of(k)
        th = theta(k, pi)
        series = gamma2_series(k, pi, th)
        est, se = estimate_gamma2_cycles(k, 0, 30_000, th, seed=77)
        assert abs(est - series) <= 3 * se

    def test_truncation_matches_brute_partial_sum(self):
        # independent route: sum the lag covariances term by term, far past
        # the point where the geometric tail is negligible
        k = three_state_aperiodic()
        pi = pi_of(k)
        th = theta(k, pi)
        brute = autocovariance(k, pi, th, 0) + 2.0 * sum(
            autocovariance(k, pi, th, lag) for lag in range(1, 200)
        )
        assert gamma2_series(k, pi, th, tol=1e-12) == pytest.approx(brute, abs=1e-10)


class TestLimitParameters:
    def test_symmetric_telegraph_exact(self):
        p = limit_parameters(symmetric_telegraph())
        assert (p.theta, p.mu, p.gamma2, p.diffusion) == (0.0, 1.0, 1.0, 1.0)
        assert p.method == "alternating_closed_form"

    def test_asymmetric_telegraph_exact(self):
        p = limit_parameters(asymmetric_telegraph().kernel())
        assert p.theta == 1.0 and p.mu == 0.75 and p.gamma2 == 1.0
        assert abs(p.diffusion - 4.0 / 3.0) <= 1e-12

    def test_deterministic_cycle_has_zero_variance(self):
        p = limit_parameters(deterministic_cycle())
        assert p.gamma2 == 0.0 and p.diffusion == 0.0

    def test_aperiodic_uses_series(self):
        assert limit_parameters(three_state_aperiodic()).method == "series"

    def test_periodic_non_cyclic_uses_cycle_estimator(self):
        k = bipartite_periodic()
        p = limit_parameters(k, n_cycles=50_000, seed=9)
        assert p.method == "cycle"
        # enumeration oracle: every cycle from state 0 is exactly two steps,
        # the intermediate state u in {1, 2} chosen with probability 1/2
        s = validate_kernel(k)
        th = theta(k, s.pi)
        M1, M2 = k.moment_matrices()
        v = k.states
        second = 0.0
        for u in (1, 2):
            second += 0.5 * (
                (v[0] - th) ** 2 * M2[0, u]
                + 2.0 * (v[0] - th) * (v[u] - th) * M1[0, u] * M1[u, 0]
                + (v[u] - th) ** 2 * M2[u, 0]
            )
        oracle = s.pi[0] * second
        _, se = estimate_gamma2_cycles(k, 0, 50_000, th, seed=9)
        assert abs(p.gamma2 - oracle) <= 3 * se

    def test_reducible_rejected(self):
        k = equal_rows_pm1()
        bad = type(k)(states=k.states, P=np.eye(2), laws=k.laws)
        with pytest.raises(NotIrreducible):
            limit_parameters(bad)

    def test_deterministic_given_inputs(self):
        a = limit_parameters(bipartite_periodic())
        b = limit_parameters(bipartite_periodic())
        assert a == b


class TestOccupancyLimit:
    def test_symmetric(self):
        k = symmetric_telegraph()
        np.testing.assert_allclose(occupancy_limit(k, pi_of(k)), [0.5, 0.5], atol=1e-15)

    def test_asymmetric_substitution(self):
        k = asymmetric_telegraph().kernel()
        np.testing.assert_allclose(
            occupancy_limit(k, pi_of(k)), [2.0 / 3.0, 1.0 / 3.0], atol=1e-12
        )

    def test_equal_mean_sojourns_reduce_to_pi(self):
        k = deterministic_cycle(c=0.7)
        pi = pi_of(k)
        np.testing.assert_allclose(occupancy_limit(k, pi), pi, atol=1e-15)


class TestInvariants:
    @given(kernels())
    def test_centering_identity(self, kernel):
        pi = pi_of(kernel)
        th = theta(kernel, pi)
        mu_v = kernel.conditional_mean_sojourns()
        assert abs(float(pi @ ((kernel.states - th) * mu_v))) <= 1e-12

    @pytest.mark.parametrize("name", sorted(APERIODIC_TEST_KERNELS))
    def test_covariance_decay_bound(self, name):
        kernel = APERIODIC_TEST_KERNELS[name]()
        s = validate_kernel(kernel)
        th = theta(kernel, s.pi)
        covs = np.array([autocovariance(kernel, s.pi, th, lag) for lag in range(1, 31)])
        bound = abs(covs[0]) * s.slem ** np.arange(30)
        assert (np.abs(covs) <= bound + 1e-15).all()

    @given(
        st.floats(-3.0, 3.0),
        st.floats(-3.0, 3.0),
        st.floats(0.2, 5.0),
        st.floats(0.2, 5.0),
    )
    def test_closed_form_consistency_two_state_exponential(self, v1, v2, l1, l2):
        if abs(v1 - v2) < 0.05:
            return
        spec = TelegraphSpec(v1=v1, v2=v2, lambda1=l1, lambda2=l2)
        th, mu, g2 = alternating_limits(
            [v1, v2], [1.0 / l1, 1.0 / l2], [1.0 / l1**2, 1.0 / l2**2]
        )
        drift, diffusion = telegraph_limit(spec)
        p = limit_parameters(spec.kernel())
        assert abs(th - drift) <= 1e-12 * max(1.0, abs(drift))
        assert abs(g2 / mu - diffusion) <= 1e-12 * max(1.0, diffusion)
        assert abs(p.theta - drift) <= 1e-12 * max(1.0, abs(drift))
        assert abs(p.diffusion - diffusion) <= 1e-12 * max(1.0, diffusion)
