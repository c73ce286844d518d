"""
The Burgers term c1 (v^2)' in coefficient space
================================================

The fast path squares the field on a padded grid and is exact because the
square of a degree-N sine polynomial has degree 2N.  An O(N^2) product-to-sum
evaluation serves as an independent check.
"""

import math

import numpy as np

from burgers_spde.nonlinearity import (
    BurgersSpec,
    CoercivityFunctionals,
    burgers_f,
    burgers_f_exact,
    check_negative_norm_inequality,
    negative_norm_constant,
)
from burgers_spde.spectral import OperatorSpec

b = BurgersSpec(c1=1.0, spec=OperatorSpec())

# %% (2 sin^2(pi x))' = 2 pi sin(2 pi x), i.e. F(e_1) = sqrt(2) pi e_2.
print("F(e_1)[:3] =", burgers_f(np.array([1.0]), b, 3), " sqrt(2) pi =", math.sqrt(2) * math.pi)

# %% Fast and exact paths agree to round-off.
rng = np.random.default_rng(0)
v = rng.standard_normal(48)
print("fast vs exact:", np.max(np.abs(burgers_f(v, b, 96) - burgers_f_exact(v, b))))

# %% <v, F(v)> vanishes: the transport term moves energy around but creates none.
print("<v, F(v)> =", np.dot(v, burgers_f(v, b, v.size)))

# %% The H_{-gamma} bound with its explicit constant.
c = negative_norm_constant(0.8, b)
lhs, rhs, holds = check_negative_norm_inequality(v, 0.8, b, c)
print(f"c = {c:.10f};  ||F(v)||_(-0.8) = {lhs:.4f} <= {rhs:.4f}: {holds}")

# %% Coercivity functionals use the sup norm of the perturbing field.
cf = CoercivityFunctionals.from_burgers(b)
print("phi(e_1) =", cf.phi(np.array([1.0]), 4095), " Phi(e_1) =", cf.Phi(np.array([1.0]), 4095))
