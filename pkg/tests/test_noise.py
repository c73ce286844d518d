import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from burgers_spde.noise import (
    NoiseHierarchy,
    bbO_process,
    build_processes,
    fine_convolution,
    mode_path,
    ou_increment_std,
    parse_seed,
    psi_process,
    restrict,
    stochastic_convolution,
)
from burgers_spde.spectral import OperatorSpec

UNIT = OperatorSpec()
LAM1 = math.pi**2


class TestSeeds:
    def test_parse(self):
        assert parse_seed("0x2A") == 42
        assert parse_seed("42") == 42
        assert parse_seed(2**64 - 1) == 2**64 - 1

    @pytest.mark.parametrize("bad", [-1, 2**64, "0xg"])
    def test_reject(self, bad):
        with pytest.raises(ValueError):
            parse_seed(bad)


class TestNoiseHierarchy:
    def test_cells_addressable_without_predecessors(self):
        nz = NoiseHierarchy(123, 6)
        row = nz.mode_variates(7)
        for j in (0, 1, 3, 4, 5, 33, 63):
            assert nz.variate(7, j) == row[j]

    def test_deterministic_and_order_independent(self):
        a = NoiseHierarchy("0xdeadbeef", 5).variates(8)
        nz = NoiseHierarchy(0xDEADBEEF, 5)
        b = np.stack([nz.mode_variates(k) for k in reversed(range(1, 9))][::-1], axis=1)
        assert np.array_equal(a, b)

    def test_seeds_and_modes_differ(self):
        a = NoiseHierarchy(1, 4).mode_variates(1)
        assert not np.array_equal(a, NoiseHierarchy(2, 4).mode_variates(1))
        assert not np.array_equal(a, NoiseHierarchy(1, 4).mode_variates(2))

    def test_disabled_is_zero(self):
        nz = NoiseHierarchy(1, 4, enabled=False)
        assert not nz.variates(16).any()
        assert not stochastic_convolution(nz, 3, UNIT, 1.0).any()

    def test_bounds(self):
        nz = NoiseHierarchy(1, 3)
        with pytest.raises(ValueError):
            nz.mode_variates(9)
        with pytest.raises(ValueError):
            nz.variate(1, 8)
        with pytest.raises(ValueError):
            NoiseHierarchy(1, 0)

    def test_standard_normal_marginals(self):
        z = NoiseHierarchy(99, 12).variates(16).ravel()
        assert abs(z.mean()) < 4 / math.sqrt(z.size)
        assert abs(z.var() - 1) < 4 * math.sqrt(2 / z.size)
        assert stats.kstest(z, "norm").pvalue > 1e-3


class TestOUStd:
    def test_stationary_limit(self):
        assert ou_increment_std(1, 1e3, UNIT) == pytest.approx((2 * LAM1) ** -0.5, rel=1e-15)

    def test_scalar_oracle(self):
        want = float(mpmath.sqrt((1 - mpmath.exp(-2 * mpmath.pi**2 * mpmath.mpf("0.01"))) / (2 * mpmath.pi**2)))
        assert ou_increment_std(1, 0.01, UNIT) == pytest.approx(want, rel=1e-14)
        # the rounded figure 0.09524 is only good to about 2e-4 relative
        assert ou_increment_std(1, 0.01, UNIT) == pytest.approx(0.09524, rel=5e-4)

    def test_small_step(self):
        h = 1e-8 / LAM1
        assert abs(ou_increment_std(1, h, UNIT) / math.sqrt(h) - 1) < 1e-6

    def test_invalid_step(self):
        with pytest.raises(ValueError):
            ou_increment_std(1, 0.0, UNIT)


class TestStochasticConvolution:
    def test_starts_at_zero_and_shapes(self):
        nz = NoiseHierarchy(5, 6)
        for lv in (1, 3, 6):
            O = stochastic_convolution(nz, lv, UNIT, 1.0)
            assert O.shape == (2**lv + 1, 2**lv)
            assert not O[0].any()

    def test_level_out_of_range(self):
        with pytest.raises(ValueError):
            stochastic_convolution(NoiseHierarchy(5, 4), 5, UNIT, 1.0)

    def test_coupling_all_level_pairs(self):
        nz = NoiseHierarchy(17, 7)
        fine = fine_convolution(nz, 128, UNIT, 1.0)
        conv = {lv: stochastic_convolution(nz, lv, UNIT, 1.0) for lv in range(1, 8)}
        for lo in range(1, 7):
            for hi in range(lo + 1, 8):
                stride = 2 ** (hi - lo)
                assert np.array_equal(conv[lo], conv[hi][::stride, : 2**lo])
            assert np.array_equal(conv[lo], restrict(fine, 7, lo))

    def test_mode_path_matches_column(self):
        nz = NoiseHierarchy(8, 5)
        fine = fine_convolution(nz, 32, OperatorSpec(0.7, 1.0), 2.0)
        assert np.array_equal(mode_path(nz, 9, OperatorSpec(0.7, 1.0), 2.0), fine[:, 8])

    def test_normality_of_terminal_values(self):
        samples = 100_000
        for k in (1, 4, 16):
            x = np.array([mode_path(NoiseHierarchy(s, 4), k, UNIT, 1.0)[-1] for s in range(samples)])
            x /= math.sqrt((1 - math.exp(-2 * LAM1 * k * k)) / (2 * LAM1 * k * k))
            assert abs(stats.skew(x)) < 0.1
            assert abs(stats.kurtosis(x)) < 0.2


class TestPsi:
    def test_zero(self):
        O = np.zeros((9, 8))
        assert not psi_process(O, np.zeros(3), 3, UNIT, 1.0).any()

    def test_heat_flow(self):
        nz = NoiseHierarchy(1, 4, enabled=False)
        O = stochastic_convolution(nz, 4, UNIT, 1.0)
        psi = psi_process(O, np.array([1.0]), 4, UNIT, 1.0)
        t = np.arange(17) / 16
        np.testing.assert_allclose(psi[:, 0], np.exp(-LAM1 * t), rtol=1e-15)
        assert not psi[:, 1:].any()

    def test_initial_value_is_projection(self):
        nz = NoiseHierarchy(2, 3)
        xi = np.arange(1.0, 13.0)
        procs = build_processes(nz, 2, UNIT, 1.0, xi)
        assert np.array_equal(procs.Psi[0], xi[:4])
        assert np.array_equal(procs.times, np.arange(5) / 4)


class TestBbO:
    def test_eta_zero_identity(self):
        O = np.random.default_rng(0).standard_normal((9, 8))
        assert np.array_equal(bbO_process(O, 0.0, 3, UNIT, 1.0), O)

    def test_negative_eta(self):
        with pytest.raises(ValueError):
            bbO_process(np.zeros((3, 2)), -1.0, 1, UNIT, 1.0)

    def test_constant_input_closed_form(self):
        # frozen integrand is exact for constant O
        eta, k, steps, T = 2.5, 3, 32, 1.0
        O = np.zeros((steps + 1, 4))
        O[:, k - 1] = 0.7
        out = bbO_process(O, eta, 2, UNIT, T)
        r = LAM1 * k * k + eta
        t = np.arange(steps + 1) * T / steps
        want = 0.7 - 0.7 * eta * (1 - np.exp(-r * t)) / r
        np.testing.assert_allclose(out[:, k - 1], want, rtol=1e-13)

    def test_first_order_refinement(self):
        eta, T = 3.0, 1.0
        r = LAM1 + eta
        exact_T = math.sin(T) - eta * (r * math.sin(T) - math.cos(T) + math.exp(-r * T)) / (1 + r * r)
        errs = []
        for steps in (32, 64, 128, 256):
            t = np.arange(steps + 1) * T / steps
            O = np.zeros((steps + 1, 2))
            O[:, 0] = np.sin(t)
            errs.append(abs(bbO_process(O, eta, 1, UNIT, T)[-1, 0] - exact_T))
        order = np.polyfit(np.log([32, 64, 128, 256]), np.log(errs), 1)[0]
        assert -order >= 0.9
