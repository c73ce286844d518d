"""
Checking the trajectory-wise a priori bound
===========================================

The bound controls sup_t ||X_t - Psi_t||_{H_varrho} through functionals of the
linear part only.  It is very loose (about fifteen orders of magnitude here) but it is
explicit, so it can be evaluated and checked for every simulated path.
"""

from burgers_spde.analysis import BoundConstants, apriori_check
from burgers_spde.noise import NoiseHierarchy
from burgers_spde.scheme import ModelParams, simulate_path

p = ModelParams()
bc = BoundConstants()
for seed in range(4):
    rec = simulate_path(p, NoiseHierarchy(seed, 6), 6)
    r = apriori_check(rec, rec.processes, bc, p)
    print(f"seed {seed}: lhs {r.lhs_max:.3e}  log10 rhs {r.log10_rhs:6.2f}  holds {r.holds}  theta {r.theta:.1f}")
print(r.header)

# %% Doubling theta can only raise the bound.
rhs = [apriori_check(rec, rec.processes, BoundConstants(theta=t), p).rhs for t in (50.0, 100.0)]
print("rhs(theta=50) < rhs(theta=100):", rhs[0] < rhs[1])
