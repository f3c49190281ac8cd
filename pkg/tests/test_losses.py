import math

import numpy as np
import pytest
import scipy.sparse as sp

from rankaudit import (EnergyNorm, LpNorm, SoftMax, SquaredL2,
                       ValidationError, parse_loss)


def central_difference(loss, r, h=None):
    r = np.asarray(r, dtype=np.float64)
    if h is None:
        h = 1e-6 * np.abs(r).max()
    grad = np.zeros_like(r)
    for i in range(len(r)):
        up = r.copy()
        up[i] += h
        down = r.copy()
        down[i] -= h
        grad[i] = (loss.value(up) - loss.value(down)) / (2 * h)
    return grad


class TestSquaredL2:
    def test_value(self):
        assert SquaredL2().value(np.array([0.3, 0.4])) == pytest.approx(0.25)

    def test_gradient(self):
        grad = SquaredL2().gradient(np.array([0.3, 0.4]))
        assert np.allclose(grad, [0.6, 0.8])


class TestLpNorm:
    def test_p2_is_euclidean(self):
        loss = LpNorm(2)
        assert loss.value(np.array([3.0, 4.0])) == pytest.approx(5.0)
        assert np.allclose(loss.gradient(np.array([3.0, 4.0])), [0.6, 0.8])

    def test_p1_is_sum_of_abs(self):
        assert LpNorm(1).value(np.array([1.0, -2.0])) == pytest.approx(3.0)

    def test_gradient_undefined_at_zero(self):
        with pytest.raises(ValidationError):
            LpNorm(1.5).gradient(np.zeros(3))

    def test_gradient_finite_with_zero_entry(self):
        grad = LpNorm(1.5).gradient(np.array([0.0, 1.0]))
        assert np.all(np.isfinite(grad))
        assert grad[0] == 0.0

    def test_invalid_exponent(self):
        with pytest.raises(ValidationError):
            LpNorm(0.5)


class TestSoftMax:
    def test_value_at_zero(self):
        assert SoftMax().value(np.zeros(2)) == pytest.approx(math.log(2))

    def test_gradient_is_distribution(self):
        rng = np.random.default_rng(3)
        grad = SoftMax().gradient(rng.normal(size=10))
        assert np.all(grad > 0)
        assert grad.sum() == pytest.approx(1.0, abs=1e-12)

    def test_overflow_stability(self):
        big = np.array([1e4, 1e4 - 1.0])
        assert np.isfinite(SoftMax().value(big))
        assert np.all(np.isfinite(SoftMax().gradient(big)))


class TestEnergyNorm:
    def test_identity_matches_squared_l2(self):
        rng = np.random.default_rng(5)
        r = rng.random(6)
        loss = EnergyNorm(sp.eye(6))
        assert loss.value(r) == pytest.approx(SquaredL2().value(r), rel=1e-12)

    def test_gradient_is_twice_matrix_product(self):
        rng = np.random.default_rng(6)
        m = rng.random((5, 5))
        m = (m + m.T) / 2
        r = rng.random(5)
        assert np.allclose(EnergyNorm(m).gradient(r), 2 * m @ r, rtol=1e-12)

    def test_asymmetric_rejected(self):
        with pytest.raises(ValidationError, match="symmetric"):
            EnergyNorm(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            EnergyNorm(np.eye(3)).value(np.ones(4))


@pytest.mark.parametrize("make_loss", [
    SquaredL2,
    lambda: LpNorm(1.5),
    lambda: LpNorm(3),
    SoftMax,
    lambda: EnergyNorm((lambda m: sp.csr_matrix((m + m.T) / 2))(
        np.random.default_rng(8).random((12, 12)))),
])
def test_gradient_matches_finite_differences(make_loss):
    loss = make_loss()
    rng = np.random.default_rng(17)
    for _ in range(5):
        r = rng.uniform(0.01, 1.0, size=12)
        analytic = loss.gradient(r)
        numeric = central_difference(loss, r)
        scale = np.maximum(np.abs(numeric), 1e-12)
        assert np.max(np.abs(analytic - numeric) / scale) <= 1e-5


class TestParse:
    def test_spellings(self):
        assert isinstance(parse_loss("l2sq"), SquaredL2)
        assert isinstance(parse_loss("softmax"), SoftMax)
        lp = parse_loss("lp:1.5")
        assert isinstance(lp, LpNorm) and lp.p == 1.5

    def test_energy_from_file(self, tmp_path):
        path = tmp_path / "m.txt"
        np.savetxt(path, np.eye(3))
        loss = parse_loss(f"energy:{path}")
        assert isinstance(loss, EnergyNorm)

    def test_energy_from_npz(self, tmp_path):
        path = tmp_path / "m.npz"
        sp.save_npz(path, sp.eye(4, format="csr"))
        assert isinstance(parse_loss(f"energy:{path}"), EnergyNorm)

    def test_unknown_spelling(self):
        with pytest.raises(ValidationError):
            parse_loss("huber")

    def test_bad_lp(self):
        with pytest.raises(ValidationError):
            parse_loss("lp:abc")

    def test_passthrough(self):
        loss = SoftMax()
        assert parse_loss(loss) is loss
