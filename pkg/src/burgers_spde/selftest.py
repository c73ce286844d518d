"""Quick oracle and invariant checks run by ``burgers-spde selftest``."""

import math

import numpy as np

from . import analysis, noise, scheme
from .nonlinearity import BurgersSpec, burgers_f, burgers_f_exact
from .spectral import OperatorSpec, apply_fractional_power, apply_semigroup


def check_nonlinearity_oracle(trials=200, seed=0):
    rng = np.random.default_rng(seed)
    b = BurgersSpec(1.0, OperatorSpec())
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 65))
        v = rng.standard_normal(n)
        worst = max(worst, np.max(np.abs(burgers_f(v, b, 2 * n) - burgers_f_exact(v, b))))
    return worst <= 1e-11, f"max discrepancy {worst:.3e}"


def check_semigroup(seed=1):
    rng = np.random.default_rng(seed)
    spec = OperatorSpec(1.0, 0.5)
    v = rng.standard_normal(32)
    a = apply_semigroup(apply_semigroup(v, 0.013, spec), 0.021, spec)
    b = apply_semigroup(v, 0.034, spec)
    rel = np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
    f = apply_fractional_power(apply_fractional_power(v, 0.3, spec), -0.7, spec)
    g = apply_fractional_power(v, -0.4, spec)
    rel_f = np.max(np.abs(f - g) / np.abs(g))
    contract = np.linalg.norm(apply_semigroup(v, 0.1, spec)) <= np.linalg.norm(v)
    ok = rel <= 1e-12 and rel_f <= 1e-12 and contract
    return ok, f"semigroup rel {rel:.2e}, powers rel {rel_f:.2e}"


def check_ou_variance(seeds=10_000, modes=(1, 4, 16), T=1.0):
    spec = OperatorSpec()
    n_max = 4
    finals = np.empty((seeds, len(modes)))
    for s in range(seeds):
        nz = noise.NoiseHierarchy(s, n_max)
        for i, k in enumerate(modes):
            finals[s, i] = noise.mode_path(nz, k, spec, T)[-1]
    msgs, ok = [], True
    for i, k in enumerate(modes):
        lam = math.pi**2 * k**2
        target = (1.0 - math.exp(-2.0 * lam * T)) / (2.0 * lam)
        x = finals[:, i]
        var = x.var(ddof=1)
        m4 = np.mean((x - x.mean()) ** 4)
        se = math.sqrt(max(m4 - var**2, 0.0) / seeds)
        ok &= abs(var - target) <= 4 * se
        msgs.append(f"k={k}: {var:.4e} vs {target:.4e} (se {se:.1e})")
    return bool(ok), "; ".join(msgs)


def check_coupling(seed=3):
    spec = OperatorSpec()
    nz = noise.NoiseHierarchy(seed, 7)
    fine = noise.fine_convolution(nz, 1 << 7, spec, 1.0)
    ok = True
    for lv in range(1, 7):
        coarse = noise.stochastic_convolution(nz, lv, spec, 1.0)
        finer = noise.stochastic_convolution(nz, lv + 1, spec, 1.0, fine=fine)
        ok &= np.array_equal(coarse, finer[::2, : 1 << lv])
    return bool(ok), "level l equals restricted level l+1"


def check_grid_point_equivalence(seed=4, level=6):
    p = scheme.ModelParams(xi=np.array([0.5, -0.3]))
    nz = noise.NoiseHierarchy(seed, level)
    rec = scheme.simulate_path(p, nz, level)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in rng.integers(1, rec.X.shape[0], size=3):
        worst = max(worst, np.max(np.abs(scheme.mild_form(rec, int(m), p) - rec.X[m])))
    return worst <= 1e-12, f"max deviation {worst:.2e} (drift active on {rec.indicator.mean():.0%} of steps)"


def check_rate_fit():
    h = 2.0 ** -np.arange(3, 8)
    r1 = analysis.rate_fit(h, 3.0 * h)[0]
    r2 = analysis.rate_fit(h, 0.7 * np.sqrt(h))[0]
    ok = abs(r1 - 1.0) <= 1e-9 and abs(r2 - 0.5) <= 1e-9
    return ok, f"rates {r1:.12f}, {r2:.12f}"


CHECKS = {
    "nonlinearity_oracle_equivalence": check_nonlinearity_oracle,
    "semigroup_properties": check_semigroup,
    "ou_variance": check_ou_variance,
    "coupling_telescope": check_coupling,
    "grid_point_equivalence": check_grid_point_equivalence,
    "rate_fit_planted": check_rate_fit,
}


def run_all():
    """List of ``(name, passed, detail)``."""
    results = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
