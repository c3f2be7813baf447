import numpy as np
import numpy.testing as npt
import pytest

from lexsent.encoding import RhoHotFamily, one_hot, rho_hot
from lexsent.gradcheck import finite_diff_grad


class TestOneHot:
    def test_first_of_three(self):
        npt.assert_array_equal(one_hot(0, 3).data, [1, 0, 0])

    def test_last_of_three(self):
        npt.assert_array_equal(one_hot(2, 3).data, [0, 0, 1])

    def test_single_category(self):
        npt.assert_array_equal(one_hot(0, 1).data, [1])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            one_hot(3, 3)
        with pytest.raises(IndexError):
            one_hot(-1, 3)


class TestRhoHot:
    def test_reduces_to_one_hot(self):
        # rho=1, n=1 must be bitwise identical to one-hot
        for count in range(1, 65):
            fam = RhoHotFamily("f", [str(i) for i in range(count)], n=1, rho_init=1.0)
            for k in range(count):
                assert np.array_equal(rho_hot(fam, k).data, one_hot(k, count).data)

    def test_worked_vector(self):
        fam = RhoHotFamily("f", ["a", "b", "c"], n=2, rho_init=0.5)
        npt.assert_array_equal(rho_hot(fam, 1).data, [0, 0, 0.5, 0.5, 0, 0])

    def test_gradient_of_sum_is_n(self):
        for n in (1, 3, 11):
            fam = RhoHotFamily("f", ["a", "b", "c"], n=n, rho_init=0.7)
            loss = rho_hot(fam, 2).sum()
            loss.backward()
            assert float(fam.rho.grad) == n
            (numeric,) = finite_diff_grad(
                lambda: rho_hot(fam, 2).sum().item(), [fam.rho])
            assert abs(float(numeric) - n) < 1e-8

    def test_l1_norm(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            count = int(rng.integers(1, 9))
            n = int(rng.integers(1, 7))
            rho = float(rng.normal())
            fam = RhoHotFamily("f", [str(i) for i in range(count)], n=n, rho_init=rho)
            k = int(rng.integers(0, count))
            assert np.abs(rho_hot(fam, k).data).sum() == pytest.approx(n * abs(rho))

    def test_support_is_contiguous_block(self):
        fam = RhoHotFamily("f", ["a", "b", "c", "d"], n=5, rho_init=0.3)
        for k in range(4):
            v = rho_hot(fam, k).data
            (nz,) = np.nonzero(v)
            npt.assert_array_equal(nz, np.arange(k * 5, (k + 1) * 5))

    def test_absent_case_is_zero(self):
        fam = RhoHotFamily("f", ["a", "b"], n=3)
        npt.assert_array_equal(fam.encode_absent().data, np.zeros(6))

    def test_out_of_range(self):
        fam = RhoHotFamily("f", ["a", "b"], n=2)
        with pytest.raises(IndexError):
            rho_hot(fam, 2)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            RhoHotFamily("f", [], n=1)
        with pytest.raises(ValueError):
            RhoHotFamily("f", ["a"], n=0)
