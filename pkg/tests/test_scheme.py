import math

import numpy as np
import pytest

from burgers_spde.noise import NoiseHierarchy, fine_convolution, ou_increment_std
from burgers_spde.scheme import (
    InvalidParameters,
    ModelParams,
    _Stepper,
    compatibility_report,
    coupled_trajectories,
    initial_condition,
    mild_form,
    reference_solution,
    simulate_path,
    step,
    validate_params,
)
from burgers_spde.spectral import drift_weights, hr_norm

LAM1 = math.pi**2


def drift_part(rec):
    return rec.X - rec.processes.Psi


class TestValidation:
    def test_valid(self):
        assert validate_params(ModelParams(chi=0.01))
        assert validate_params(ModelParams(chi=0.0125))

    def test_gamma(self):
        with pytest.raises(InvalidParameters) as exc:
            validate_params(ModelParams(gamma=0.9, varrho=0.09))
        assert any("γ ∈ (3/4,7/8)" in e for e in exc.value.errors)

    def test_chi_above_bound(self):
        with pytest.raises(InvalidParameters) as exc:
            validate_params(ModelParams(varrho=0.15, chi=0.02))
        assert any("χ ∈ (0, (ϱ−ρ)/(1+ϑ)]" in e for e in exc.value.errors)

    def test_collects_all_errors(self):
        bad = ModelParams(c0=-1, kappa=-1, T=0, gamma=0.7, varrho=0.5, chi=0.0, q_moment=0.5)
        with pytest.raises(InvalidParameters) as exc:
            validate_params(bad)
        assert len(exc.value.errors) == 7

    def test_fixed_exponents(self):
        p = ModelParams()
        assert (p.alpha, p.rho, p.vartheta) == (0.5, 0.125, 1.0)
        with pytest.raises(TypeError):
            ModelParams(rho=0.2)

    def test_compatibility_report(self):
        rep = compatibility_report(ModelParams(xi=np.array([1.0])))
        assert rep["chi_abstract_max"] == pytest.approx(1 / 8)
        assert rep["chi_within_abstract_bound"]
        assert rep["xi_H_half_norm"] == pytest.approx(math.pi)


class TestStep:
    def test_heat_flow(self):
        p = ModelParams(c1=0.0)
        x = np.zeros(8)
        x[0] = 1.0
        z = np.zeros(8)
        h = 1 / 8
        for m in range(8):
            x, _ = step(x, x, z, z, p, 3)
            assert x[0] == pytest.approx(math.exp(-LAM1 * h * (m + 1)), rel=1e-14)
            assert not x[1:].any()

    def test_truncated_step_has_no_drift(self):
        p = ModelParams()
        rng = np.random.default_rng(0)
        X = rng.standard_normal(16) * 50
        psi, O0, O1 = (rng.standard_normal(16) for _ in range(3))
        X_next, on = step(X, psi, O0, O1, p, 4)
        assert not on
        decay = np.exp(-p.spec.eigenvalues(16) / 16)
        assert np.array_equal(X_next, decay * X + (O1 - decay * O0))

    def test_single_step_is_mild_integral(self):
        p = ModelParams()
        x = np.array([0.03, -0.02, 0.01, 0.005])
        X_next, on = step(x, x, np.zeros(4), np.zeros(4), p, 2)
        assert on
        lam = p.spec.eigenvalues(4)
        h = 0.25
        from burgers_spde.nonlinearity import burgers_f_exact

        drift = (1 - np.exp(-lam * h)) / lam * burgers_f_exact(x, p.burgers)[:4]
        np.testing.assert_allclose(X_next, np.exp(-lam * h) * x + drift, atol=1e-12, rtol=0)
        np.testing.assert_allclose(X_next - np.exp(-lam * h) * x, drift, rtol=1e-10, atol=1e-17)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            step(np.zeros(4), np.zeros(4), np.zeros(4), np.zeros(3), ModelParams(), 2)

    def test_public_step_matches_trajectory(self):
        p = ModelParams()
        rec = simulate_path(p, NoiseHierarchy(11, 5), 5)
        O = rec.processes.O
        for m in range(rec.X.shape[0] - 1):
            X_next, on = step(rec.X[m], rec.processes.Psi[m], O[m], O[m + 1], p, 5)
            assert on == rec.indicator[m]
            np.testing.assert_allclose(X_next, rec.X[m + 1], atol=1e-14, rtol=0)

    def test_threshold_grows_with_level(self):
        p = ModelParams()
        th = [_Stepper(p, lv).threshold for lv in range(1, 12)]
        assert np.all(np.diff(th) > 0)


class TestSimulatePath:
    def test_linear_case_equals_psi(self):
        p = ModelParams(c1=0.0, xi=np.array([0.4, 0.0, -1.0]))
        rec = simulate_path(p, NoiseHierarchy(3, 6), 6)
        assert np.array_equal(rec.X, rec.processes.Psi)

    def test_linear_case_closed_form_construction(self):
        # heat flow of xi plus an OU recursion built here from the raw variates
        p = ModelParams(c1=0.0, xi=np.array([0.4, 0.0, -1.0]))
        nz = NoiseHierarchy(3, 5)
        rec = simulate_path(p, nz, 5)
        lam = p.spec.eigenvalues(32)
        h = 1 / 32
        sig = ou_increment_std(np.arange(1, 33), h, p.spec)
        ou = np.zeros((33, 32))
        z = nz.variates(32)
        for j in range(32):
            ou[j + 1] = np.exp(-lam * h) * ou[j] + sig * z[j]
        t = np.arange(33) * h
        heat = np.exp(-np.outer(t, lam)) * np.pad(p.xi, (0, 29))
        assert np.array_equal(rec.X, heat + ou)

    def test_noise_free_first_mode(self):
        p = ModelParams(c1=0.0)
        rec = simulate_path(p, NoiseHierarchy(0, 6, enabled=False), 6)
        np.testing.assert_allclose(rec.X[:, 0], np.exp(-LAM1 * rec.times), rtol=0, atol=1e-14)

    def test_record_shapes_and_start(self):
        p = ModelParams(xi=np.arange(1.0, 70.0) ** -2)
        rec = simulate_path(p, NoiseHierarchy(4, 6), 5)
        assert rec.X.shape == rec.processes.Psi.shape == (33, 32)
        assert rec.indicator.shape == (32,)
        assert np.array_equal(rec.X[0], p.xi[:32])
        assert np.array_equal(rec.X[0], rec.processes.Psi[0])
        assert rec.norm_X_H[0] == hr_norm(rec.X[0], 0, p.spec)

    def test_deterministic(self):
        p = ModelParams()
        a = simulate_path(p, NoiseHierarchy(9, 7), 7)
        b = simulate_path(p, NoiseHierarchy(9, 7), 7)
        assert np.array_equal(a.X, b.X) and np.array_equal(a.indicator, b.indicator)

    def test_level_above_noise(self):
        with pytest.raises(ValueError):
            simulate_path(ModelParams(), NoiseHierarchy(0, 4), 5)

    def test_indicator_off_means_no_drift(self):
        p = ModelParams(c1=3.0, xi=np.array([2.0, 1.0]))
        rec = simulate_path(p, NoiseHierarchy(2, 6), 6)
        assert 0 < rec.indicator.sum() < rec.indicator.size
        decay = np.exp(-p.spec.eigenvalues(64) / 64)
        Y = drift_part(rec)
        for m in np.flatnonzero(~rec.indicator):
            np.testing.assert_allclose(Y[m + 1], decay * Y[m], rtol=0, atol=1e-15)


class TestGridPointEquivalence:
    @pytest.mark.parametrize("seed,level", [(0, 5), (1, 7), (2, 8)])
    def test_three_random_steps(self, seed, level):
        p = ModelParams(c1=2.0, xi=np.array([1.0, -0.5, 0.25]))
        rec = simulate_path(p, NoiseHierarchy(seed, level), level)
        Y = drift_part(rec)
        for m in np.random.default_rng(seed).integers(1, rec.X.shape[0], size=3):
            direct = mild_form(rec, int(m), p)
            assert np.max(np.abs(direct - rec.X[m])) <= 1e-12
            drift = direct - rec.processes.Psi[m]
            assert np.max(np.abs(drift - Y[m])) <= 1e-12 * max(1.0, np.max(np.abs(Y[m])))

    def test_detects_sign_error_in_weights(self, monkeypatch):
        import burgers_spde.scheme as sch

        monkeypatch.setattr(sch, "drift_weights", lambda n, h, spec: -drift_weights(n, h, spec))
        p = ModelParams()
        rec = simulate_path(p, NoiseHierarchy(0, 6), 6)
        assert np.max(np.abs(mild_form(rec, 64, p) - rec.X[64])) > 1e-6


class TestReference:
    def test_headroom(self):
        nz = NoiseHierarchy(0, 8)
        with pytest.raises(ValueError):
            reference_solution(ModelParams(), nz, [7])
        with pytest.raises(ValueError):
            reference_solution(ModelParams(), nz, [8])
        assert reference_solution(ModelParams(), nz, [6]).reference

    def test_linear_reference_and_coupling(self):
        p = ModelParams(c1=0.0)
        nz = NoiseHierarchy(5, 8)
        ref, runs = coupled_trajectories(p, nz, [4, 5, 6])
        assert np.array_equal(ref.X, ref.processes.Psi)
        for lv, run in runs.items():
            stride = 2 ** (8 - lv)
            # both are the same heat flow plus the same OU path on shared modes
            assert np.array_equal(run.X, ref.X[::stride, : 2**lv])


def test_initial_condition():
    assert np.array_equal(initial_condition([(1, 1.0), (3, 0.5)]), [1.0, 0.0, 0.5])
    assert np.array_equal(initial_condition([(2, 1.0)], n=4), [0, 1.0, 0, 0])
    with pytest.raises(ValueError):
        initial_condition([(0, 1.0)])
