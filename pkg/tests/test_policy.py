import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from autosac import net, policy


def quadrature_normalization(mu, sigma):
    """Integral of the squashed density over the action interval, via u."""
    val, _ = quad(
        lambda u: float(np.exp(policy.log_prob([mu], [sigma], [u]))) * (1.0 - np.tanh(u) ** 2),
        -np.inf,
        np.inf,
    )
    return val


def quadrature_entropy(mu, sigma):
    def integrand(u):
        z = (u - mu) / sigma
        pdf = np.exp(-0.5 * z * z) / (sigma * np.sqrt(2 * np.pi))
        return pdf * float(policy.log_prob([mu], [sigma], [u]))

    val, _ = quad(integrand, -np.inf, np.inf)
    return -val


class TestDistribution:
    def test_zero_weight_head(self):
        head = policy.init_policy(3, 2, (8,), seed=0)
        for w in head.network.weights:
            w[:] = 0.0
        mu, sigma = policy.policy_distribution(head, np.zeros(3))
        assert np.array_equal(mu, np.zeros(2))
        assert np.array_equal(sigma, np.ones(2))

    def test_log_std_clamp(self):
        head = policy.init_policy(1, 1, (4,), seed=0)
        for w in head.network.weights:
            w[:] = 0.0
        head.network.biases[-1][:] = np.array([0.0, 50.0])
        _, sigma = policy.policy_distribution(head, np.zeros(1))
        assert sigma[0] == pytest.approx(np.exp(policy.LOG_STD_MAX))
        head.network.biases[-1][:] = np.array([0.0, -50.0])
        _, sigma = policy.policy_distribution(head, np.zeros(1))
        assert sigma[0] == pytest.approx(np.exp(policy.LOG_STD_MIN))

    def test_matches_forward_and_split(self):
        head = policy.init_policy(4, 3, (16, 16), seed=21)
        obs = np.random.default_rng(2).standard_normal(4)
        mu, sigma = policy.policy_distribution(head, obs)
        out, _ = net.forward(head.network, obs)
        assert np.array_equal(mu, out[:3])
        assert np.array_equal(sigma, np.exp(np.clip(out[3:], -20, 2)))

    def test_rejects_non_finite_obs(self):
        head = policy.init_policy(2, 1, (4,), seed=0)
        with pytest.raises(ValueError):
            policy.policy_distribution(head, np.array([1.0, np.nan]))


class TestSampling:
    def test_zero_noise_gives_tanh_mu(self):
        mu = np.array([0.3, -1.2])
        s = policy.sample_action(mu, np.ones(2), np.zeros(2))
        assert np.array_equal(s.action, np.tanh(mu))

    def test_log_prob_at_mode(self):
        s = policy.sample_action(np.zeros(1), np.ones(1), np.zeros(1))
        assert s.log_prob == pytest.approx(-0.5 * np.log(2 * np.pi), abs=1e-12)
        assert s.log_prob == pytest.approx(-0.91894, abs=1e-5)

    def test_density_normalizes(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            mu = float(rng.uniform(-2, 2))
            sigma = float(np.exp(rng.uniform(-2, 1)))
            assert quadrature_normalization(mu, sigma) == pytest.approx(1.0, abs=1e-3)

    def test_actions_strictly_inside_bounds(self):
        rng = np.random.default_rng(8)
        s = policy.sample_action(
            rng.standard_normal(100), np.exp(rng.uniform(-2, 1, 100)), rng.standard_normal(100)
        )
        assert np.all(np.abs(s.action) < 1.0)
        assert np.all(np.isfinite(s.log_prob))


class TestLogProb:
    def test_large_pre_squash_stays_finite(self):
        lp = policy.log_prob([0.0], [1.0], [20.0])
        assert np.isfinite(lp)
        # naive 1 - tanh(u)^2 underflows; the stable form matches ln4 - 2u
        assert policy.tanh_log_jacobian(20.0) == pytest.approx(np.log(4.0) - 40.0, abs=1e-12)
        assert np.isfinite(policy.log_prob([0.0], [1.0], [40.0]))

    def test_matches_high_precision_evaluation(self):
        rng = np.random.default_rng(11)
        mpmath.mp.dps = 60
        for _ in range(25):
            mu = float(rng.uniform(-2, 2))
            sigma = float(np.exp(rng.uniform(-2, 1)))
            u = float(rng.uniform(-6, 6))
            got = float(policy.log_prob([mu], [sigma], [u]))
            z = (mpmath.mpf(u) - mu) / sigma
            gauss = -z * z / 2 - mpmath.log(sigma) - mpmath.log(2 * mpmath.pi) / 2
            expect = gauss - mpmath.log(1 - mpmath.tanh(u) ** 2)
            assert got == pytest.approx(float(expect), abs=1e-9)

    def test_sums_over_dimensions(self):
        mu = np.array([0.1, -0.4])
        sigma = np.array([0.5, 1.5])
        u = np.array([0.7, -0.2])
        total = policy.log_prob(mu, sigma, u)
        parts = [float(policy.log_prob([mu[i]], [sigma[i]], [u[i]])) for i in range(2)]
        assert total == pytest.approx(sum(parts), abs=1e-12)

    def test_monotone_squash(self):
        u = np.linspace(-5, 5, 201)
        a = np.tanh(u)
        assert np.all(np.diff(a) > 0)


class TestReparamGradient:
    def test_partials_match_finite_differences(self):
        rng = np.random.default_rng(3)
        eps = rng.standard_normal((64, 2))
        mu = rng.uniform(-1, 1, 2)
        sigma = np.exp(rng.uniform(-1, 0.5, 2))

        def mean_lp(m, s):
            u = m + s * eps
            return policy.log_prob(np.broadcast_to(m, u.shape), np.broadcast_to(s, u.shape), u).mean()

        u = mu + sigma * eps
        d_mu, d_sigma = policy.reparam_log_prob_partials(sigma, u, eps)
        step = 1e-6
        for k in range(2):
            for vec, grad in ((mu, d_mu), (sigma, d_sigma)):
                orig = vec[k]
                vec[k] = orig + step
                hi = mean_lp(mu, sigma)
                vec[k] = orig - step
                lo = mean_lp(mu, sigma)
                vec[k] = orig
                fd = (hi - lo) / (2 * step)
                assert grad[:, k].mean() == pytest.approx(fd, rel=1e-3)

    def test_entropy_estimate_matches_quadrature(self):
        true_entropy = quadrature_entropy(0.0, 1.0)
        eps = np.random.default_rng(17).standard_normal((100000, 1))
        s = policy.sample_action(np.zeros((100000, 1)), np.ones((100000, 1)), eps)
        assert -s.log_prob.mean() == pytest.approx(true_entropy, abs=0.02)


class TestDeterministicAction:
    def test_zero_weight_head_acts_zero(self):
        head = policy.init_policy(3, 2, (8,), seed=0)
        for w in head.network.weights:
            w[:] = 0.0
        assert np.array_equal(policy.deterministic_action(head, np.zeros(3)), np.zeros(2))

    def test_equals_zero_noise_sample(self):
        head = policy.init_policy(3, 2, (8, 8), seed=5)
        obs = np.random.default_rng(6).standard_normal(3)
        mu, sigma = policy.policy_distribution(head, obs)
        s = policy.sample_action(mu, sigma, np.zeros(2))
        assert np.array_equal(policy.deterministic_action(head, obs), s.action)
