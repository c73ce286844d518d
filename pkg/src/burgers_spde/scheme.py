"""Truncated accelerated exponential Euler scheme for stochastic Burgers.

On level ``l`` the scheme uses ``n = 2**l`` sine modes and step
``h = T / 2**l``.  At grid times it reads

    X_{m+1} = e^{hA} X_m + 1{||X_m||_rho + ||Psi_m||_rho <= h^-chi} W_h F(X_m)
              + (O_{m+1} - e^{hA} O_m),

where ``W_h = int_0^h e^{sA} ds`` acts diagonally and ``O`` is the exact
stochastic convolution.  Trajectories are advanced through the drift part
``Y = X - Psi``, which satisfies ``Y_{m+1} = e^{hA} Y_m + 1{...} W_h F(X_m)``;
this is the same recursion with the linear part carried exactly by ``Psi``.
"""

from dataclasses import dataclass, field

import numpy as np

from .noise import build_processes, fine_convolution
from .nonlinearity import BurgersSpec, burgers_f
from .spectral import OperatorSpec, as_field, drift_weights, hr_norm, hr_norms, project

ALPHA = 0.5
RHO = 0.125
VARTHETA = 1.0


class InvalidParameters(ValueError):
    """Raised with the full list of violated parameter constraints."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ModelParams:
    c1: float = 1.0
    c0: float = 1.0
    kappa: float = 0.0
    T: float = 1.0
    xi: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    gamma: float = 0.8
    varrho: float = 0.15
    chi: float = 0.0125
    q_moment: float = 2.0
    alpha: float = field(default=ALPHA, init=False)
    rho: float = field(default=RHO, init=False)
    vartheta: float = field(default=VARTHETA, init=False)

    @property
    def spec(self):
        return OperatorSpec(self.c0, self.kappa)

    @property
    def burgers(self):
        return BurgersSpec(self.c1, self.spec)

    @property
    def chi_max(self):
        return (self.varrho - self.rho) / (1 + self.vartheta)


def validate_params(p):
    """Return ``p`` if every constraint holds, else raise :class:`InvalidParameters`."""
    errors = []
    if not np.isfinite(p.c1):
        errors.append("c1 must be a finite real number")
    if not (np.isfinite(p.c0) and p.c0 > 0):
        errors.append("c0 ∈ (0,∞) violated")
    if not (np.isfinite(p.kappa) and p.kappa >= 0):
        errors.append("κ ∈ [0,∞) violated")
    if not (np.isfinite(p.T) and p.T > 0):
        errors.append("T ∈ (0,∞) violated")
    if not 0.75 < p.gamma < 0.875:
        errors.append(f"γ ∈ (3/4,7/8) violated: gamma = {p.gamma}")
    if not p.rho < p.varrho < 1 - p.gamma:
        errors.append(f"ϱ ∈ (1/8,1−γ) violated: varrho = {p.varrho}, gamma = {p.gamma}")
    # closed upper end; tolerance absorbs rounding in (varrho - 1/8) / 2
    if not 0 < p.chi <= p.chi_max * (1 + 1e-12):
        errors.append(
            f"χ ∈ (0, (ϱ−ρ)/(1+ϑ)] violated: chi = {p.chi} but (varrho − 1/8)/2 = {p.chi_max}"
        )
    if p.q_moment < 1:
        errors.append(f"q ≥ 1 violated: q = {p.q_moment}")
    xi = np.asarray(p.xi, dtype=np.float64)
    if xi.ndim != 1 or xi.size == 0 or not np.all(np.isfinite(xi)):
        errors.append("ξ must be a non-empty finite coefficient vector")
    if errors:
        raise InvalidParameters(errors)
    return p


def compatibility_report(p):
    """Derived quantities recorded alongside a run."""
    return {
        "chi_max": p.chi_max,
        "chi_abstract_max": (1 - p.alpha - p.rho) / (1 + 2 * p.vartheta),
        "chi_within_abstract_bound": p.chi <= (1 - p.alpha - p.rho) / (1 + 2 * p.vartheta),
        "xi_H_half_norm": hr_norm(p.xi, 0.5, p.spec),
    }


@dataclass
class TrajectoryRecord:
    level: int
    times: np.ndarray
    X: np.ndarray
    indicator: np.ndarray
    norm_X_H: np.ndarray
    norm_X_rho: np.ndarray
    norm_Psi_rho: np.ndarray
    processes: object
    reference: bool = False

    @property
    def h(self):
        return self.times[1] - self.times[0]


class _Stepper:
    def __init__(self, p, level):
        self.p = p
        self.n = 1 << level
        self.h = p.T / (1 << level)
        spec = p.spec
        self.decay = np.exp(-spec.eigenvalues(self.n) * self.h)
        self.weight = drift_weights(self.n, self.h, spec)
        self.threshold = self.h ** (-p.chi)
        self.rho_w = (spec.kappa + spec.eigenvalues(self.n)) ** p.varrho
        self.b = p.burgers

    def indicator(self, X_m, Psi_m):
        nx = np.linalg.norm(self.rho_w * X_m)
        npsi = np.linalg.norm(self.rho_w * Psi_m)
        return bool(nx + npsi <= self.threshold)

    def drift(self, X_m, on):
        if not on:
            return np.zeros(self.n)
        return self.weight * burgers_f(X_m, self.b, self.n)


def step(X_m, Psi_m, O_m, O_m1, p, level):
    """One scheme step from grid time ``t_m``; returns ``(X_{m+1}, indicator)``."""
    n = 1 << level
    fields = [as_field(a) for a in (X_m, Psi_m, O_m, O_m1)]
    if any(f.size != n for f in fields):
        raise ValueError(f"all fields must have dim 2**level = {n}")
    X_m, Psi_m, O_m, O_m1 = fields
    st = _Stepper(p, level)
    on = st.indicator(X_m, Psi_m)
    X_next = st.decay * X_m + st.drift(X_m, on) + (O_m1 - st.decay * O_m)
    return X_next, on


def simulate_path(p, noise, level, eta=0.0, fine=None, processes=None):
    """Run the scheme on level ``level`` driven by ``noise``."""
    if not 1 <= level <= noise.n_max:
        raise ValueError(f"level {level} outside 1..{noise.n_max}")
    if processes is None:
        processes = build_processes(noise, level, p.spec, p.T, p.xi, eta=eta, fine=fine)
    st = _Stepper(p, level)
    Psi = processes.Psi
    steps = Psi.shape[0] - 1
    X = np.empty_like(Psi)
    ind = np.zeros(steps, dtype=bool)
    X[0] = Psi[0]
    y = np.zeros(st.n)
    for m in range(steps):
        on = st.indicator(X[m], Psi[m])
        ind[m] = on
        y = st.decay * y + st.drift(X[m], on)
        X[m + 1] = Psi[m + 1] + y
    return TrajectoryRecord(
        level=level,
        times=processes.times,
        X=X,
        indicator=ind,
        norm_X_H=hr_norms(X, 0.0, p.spec),
        norm_X_rho=hr_norms(X, p.varrho, p.spec),
        norm_Psi_rho=hr_norms(Psi, p.varrho, p.spec),
        processes=processes,
    )


def mild_form(record, m, p):
    """``X_{t_m}`` from the integral form with piecewise-constant integrand.

    Sums ``e^{(t_m - t_{j+1}) A} int_0^h e^{sA} ds 1_j F(X_j)`` over ``j < m``,
    using the closed-form per-mode integral rather than the stepper's weights.
    """
    n = record.X.shape[1]
    lam = p.spec.eigenvalues(n)
    h = p.T / (record.X.shape[0] - 1)
    t = record.times
    w = (1.0 - np.exp(-lam * h)) / lam
    acc = np.zeros(n)
    for j in range(m):
        if record.indicator[j]:
            acc += np.exp(-lam * (t[m] - t[j + 1])) * w * burgers_f(record.X[j], p.burgers, n)
    return record.processes.Psi[m] + acc


def reference_solution(p, noise, levels, headroom=2, eta=0.0, fine=None):
    """Finest-level trajectory used in place of the exact mild solution."""
    levels = list(levels)
    if levels and noise.n_max < max(levels) + headroom:
        raise ValueError(
            f"reference level {noise.n_max} needs >= {headroom} levels above {max(levels)}"
        )
    rec = simulate_path(p, noise, noise.n_max, eta=eta, fine=fine)
    rec.reference = True
    return rec


def coupled_trajectories(p, noise, levels, headroom=2, eta=0.0):
    """Reference and per-level trajectories sharing one fine noise path."""
    fine = fine_convolution(noise, noise.max_modes, p.spec, p.T)
    ref = reference_solution(p, noise, levels, headroom=headroom, eta=eta, fine=fine)
    runs = {lv: simulate_path(p, noise, lv, eta=eta, fine=fine) for lv in levels}
    return ref, runs


def initial_condition(modes, n=None):
    """Coefficient vector from ``[(k, value), ...]`` pairs."""
    modes = list(modes)
    size = max([k for k, _ in modes] + [n or 1])
    xi = np.zeros(size)
    for k, c in modes:
        if k < 1:
            raise ValueError(f"mode index must be positive, got {k}")
        xi[k - 1] += c
    return xi if n is None else project(xi, n)
