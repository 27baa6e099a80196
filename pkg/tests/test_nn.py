import numpy as np
import pytest

from prefrl.nn import ParamSet, finite_diff_grad, optimizer_step, sample_categorical, softmax

# exp-normalize of [1, 2, 3] evaluated at 50 decimal digits
SOFTMAX_123 = (0.090030573170380457998, 0.24472847105479765247, 0.66524095577482188953)


class TestSoftmax:
    def test_uniform_on_equal_logits(self):
        assert np.allclose(softmax([0.0, 0.0, 0.0]), [1 / 3] * 3, atol=1e-15)

    def test_no_overflow_on_large_logits(self):
        p = softmax([1000.0, 0.0])
        assert abs(p[0] - 1.0) <= 1e-12
        assert p[1] <= 1e-12

    def test_matches_high_precision_reference(self):
        assert np.allclose(softmax([1.0, 2.0, 3.0]), SOFTMAX_123, atol=1e-15)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            z = rng.normal(size=rng.integers(2, 12)) * 10
            c = rng.normal() * 100
            assert np.abs(softmax(z) - softmax(z + c)).max() < 1e-9

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            softmax([np.nan, 0.0])
        with pytest.raises(ValueError):
            softmax([np.inf, 0.0])

    def test_output_is_distribution(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = softmax(rng.normal(size=8) * 5)
            assert p.min() >= 0
            assert abs(p.sum() - 1.0) <= 1e-6


class TestSampleCategorical:
    def test_degenerate_distribution(self):
        rng = np.random.default_rng(0)
        assert all(sample_categorical([1.0, 0.0], rng) == 0 for _ in range(100))

    def test_seed_reproducibility(self):
        rng_a, rng_b = np.random.default_rng(11), np.random.default_rng(11)
        seq_a = [sample_categorical([0.5, 0.5], rng_a) for _ in range(200)]
        seq_b = [sample_categorical([0.5, 0.5], rng_b) for _ in range(200)]
        assert seq_a == seq_b

    def test_empirical_frequencies(self):
        probs = [0.2, 0.3, 0.5]
        rng = np.random.default_rng(42)
        counts = np.zeros(3)
        n = 100_000
        for _ in range(n):
            counts[sample_categorical(probs, rng)] += 1
        assert np.abs(counts / n - probs).max() < 0.01

    def test_rejects_invalid_distribution(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_categorical([0.5, 0.4], rng)
        with pytest.raises(ValueError):
            sample_categorical([-0.1, 1.1], rng)
        with pytest.raises(ValueError):
            sample_categorical([np.nan, 1.0], rng)


class TestOptimizerStep:
    def test_plain_descent_arithmetic(self):
        ps = ParamSet({"p": np.array([1.0])})
        ps.grads["p"][0] = 0.5
        optimizer_step(ps, lr=0.1)
        assert ps["p"][0] == pytest.approx(0.95)
        assert ps.grads["p"][0] == 0.0

    def test_zero_gradient_is_noop(self):
        ps = ParamSet({"p": np.array([1.0, -2.0])})
        optimizer_step(ps, lr=0.1)
        assert np.array_equal(ps["p"], [1.0, -2.0])

    def test_two_steps_on_quadratic(self):
        # f(p) = p^2, grad 2p: 1 -> 0.8 -> 0.64
        ps = ParamSet({"p": np.array([1.0])})
        for _ in range(2):
            ps.grads["p"][0] = 2.0 * ps["p"][0]
            optimizer_step(ps, lr=0.1)
        assert ps["p"][0] == pytest.approx(0.64)

    def test_decreases_convex_quadratic(self):
        rng = np.random.default_rng(5)
        ps = ParamSet({"p": rng.normal(size=6)})
        loss = lambda: float((ps["p"] ** 2).sum())
        before = loss()
        for _ in range(10):
            ps.grads["p"][...] = 2.0 * ps["p"]
            optimizer_step(ps, lr=0.01)
            after = loss()
            assert after < before
            before = after

    def test_momentum_accumulates(self):
        ps = ParamSet({"p": np.array([0.0])})
        ps.grads["p"][0] = 1.0
        optimizer_step(ps, lr=0.1, momentum=0.9)
        ps.grads["p"][0] = 1.0
        optimizer_step(ps, lr=0.1, momentum=0.9)
        # v1 = 1, v2 = 0.9 + 1 = 1.9; p = -(0.1 + 0.19)
        assert ps["p"][0] == pytest.approx(-0.29)

    def test_aborts_on_non_finite_gradient(self):
        ps = ParamSet({"ok": np.array([1.0]), "bad": np.array([1.0])})
        ps.grads["bad"][0] = np.nan
        with pytest.raises(ValueError, match="bad"):
            optimizer_step(ps, lr=0.1)
        assert ps["ok"][0] == 1.0  # nothing was touched


class TestFiniteDiff:
    def test_quadratic_derivative(self):
        ps = ParamSet({"p": np.array([3.0])})
        grad = finite_diff_grad(lambda q: float(q["p"][0] ** 2), ps, eps=1e-4)
        assert grad["p"][0] == pytest.approx(6.0, abs=1e-6)

    def test_constant_function(self):
        ps = ParamSet({"p": np.arange(4.0)})
        grad = finite_diff_grad(lambda q: 7.0, ps, eps=1e-4)
        assert np.array_equal(grad["p"], np.zeros(4))

    def test_restores_parameters(self):
        ps = ParamSet({"p": np.array([1.0, 2.0])})
        finite_diff_grad(lambda q: float(q["p"].sum()), ps)
        assert np.array_equal(ps["p"], [1.0, 2.0])

    def test_rejects_bad_eps_and_non_finite_loss(self):
        ps = ParamSet({"p": np.array([1.0])})
        with pytest.raises(ValueError):
            finite_diff_grad(lambda q: 0.0, ps, eps=0.0)
        with pytest.raises(ValueError):
            finite_diff_grad(lambda q: float("nan"), ps)


class TestParamSet:
    def test_rejects_non_finite_init(self):
        with pytest.raises(ValueError, match="w"):
            ParamSet({"w": np.array([np.inf])})

    def test_copy_is_independent(self):
        ps = ParamSet({"w": np.ones(3)})
        other = ps.copy()
        other["w"][0] = 99.0
        assert ps["w"][0] == 1.0

    def test_shapes_and_names(self):
        ps = ParamSet({"a": np.zeros((2, 3)), "b": np.zeros(4)})
        assert ps.names() == ["a", "b"]
        assert ps.num_scalars() == 10
        assert ps.grads["a"].shape == (2, 3)
