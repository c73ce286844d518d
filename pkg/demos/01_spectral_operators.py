"""
Sine-spectral fields and the operators acting on them
=====================================================

A field is just an array of sine coefficients.  Everything linear is
diagonal, so the semigroup, fractional powers and ``H_r`` norms are
elementwise operations.
"""

import math

import numpy as np

from burgers_spde.spectral import (
    OperatorSpec,
    apply_fractional_power,
    apply_semigroup,
    hr_norm,
    point_eval,
    sup_norm,
)

spec = OperatorSpec(c0=1.0, kappa=0.0)

# %% A smooth field: coefficients decaying like k^-2.
v = 1.0 / np.arange(1, 33) ** 2
print("||v||_H            =", hr_norm(v, 0.0, spec))
print("||v||_{H_0.15}     =", hr_norm(v, 0.15, spec))
print("v(1/2)             =", point_eval(v, 0.5))
print("sup |v|            =", sup_norm(v))

# %% Heat flow damps high modes first.
for t in (0.0, 0.01, 0.1):
    w = apply_semigroup(v, t, spec)
    print(f"t={t:<5} mode-1 {w[0]:.4f}  mode-8 {w[7]:.2e}  norm {hr_norm(w, 0, spec):.4f}")

# %% Fractional powers compose additively in the exponent.
a = apply_fractional_power(apply_fractional_power(v, 0.3, spec), 0.2, spec)
b = apply_fractional_power(v, 0.5, spec)
print("max |P^0.3 P^0.2 v - P^0.5 v| =", np.max(np.abs(a - b)))
print("first entry of P^0.5 e_1 equals pi:", math.isclose(apply_fractional_power([1.0], 0.5, spec)[0], math.pi))
