"""Coupled Monte Carlo error estimation, the a priori bound check, rate fits."""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .noise import NoiseHierarchy
from .nonlinearity import CoercivityFunctionals, negative_norm_constant
from .noise import fine_convolution
from .scheme import reference_solution, simulate_path
from .spectral import hr_norms


class UndefinedRate(ValueError):
    pass


# ---------------------------------------------------------------------------
# coupled errors


def _aligned(a, b):
    """Views of two trajectories on their common (coarser) grid and mode set."""
    ma, mb = a.X.shape[0] - 1, b.X.shape[0] - 1
    if ma <= mb:
        coarse, fine = a, b
    else:
        coarse, fine = b, a
    mc, mf = coarse.X.shape[0] - 1, fine.X.shape[0] - 1
    if mf % mc:
        raise ValueError("trajectory grids are not nested")
    fx = fine.X[:: mf // mc]
    cx = coarse.X
    n = max(cx.shape[1], fx.shape[1])
    pad = lambda x: np.pad(x, ((0, 0), (0, n - x.shape[1])))
    return pad(cx), pad(fx)


def coupled_error_curve(a, b, r, spec):
    """``||a_t - b_t||_{H_r}`` at the grid times shared by two trajectories."""
    xa, xb = _aligned(a, b)
    return hr_norms(xa - xb, r, spec)


@dataclass
class LevelErrors:
    level: int
    n_modes: int
    h: float
    q: float
    strong_error: float
    std_err: float
    strong_curve: np.ndarray
    pathwise: np.ndarray
    pathwise_p50: float
    pathwise_p90: float
    pathwise_max: float


@dataclass
class ErrorReport:
    levels: list
    rows: list
    paths: int
    seeds: list
    n_max: int
    rate: float = float("nan")
    intercept: float = float("nan")
    r_squared: float = float("nan")
    monotone_fraction: float = float("nan")
    indicator_on_fraction: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def row(self, level):
        return self.rows[self.levels.index(level)]

    @property
    def strong_errors(self):
        return np.array([r.strong_error for r in self.rows])

    @property
    def steps(self):
        return np.array([r.h for r in self.rows])


def _one_seed(p, seed, levels, n_max, headroom, noise_on):
    noise = NoiseHierarchy(seed, n_max, enabled=noise_on)
    clock = {}
    t0 = time.perf_counter()
    fine = fine_convolution(noise, noise.max_modes, p.spec, p.T)
    ref = reference_solution(p, noise, levels, headroom=headroom, fine=fine)
    clock["reference"] = time.perf_counter() - t0
    out = {}
    for lv in levels:
        t0 = time.perf_counter()
        run = simulate_path(p, noise, lv, fine=fine)
        clock[lv] = time.perf_counter() - t0
        h_err = coupled_error_curve(ref, run, 0.0, p.spec)
        rho_err = coupled_error_curve(ref, run, p.varrho, p.spec)
        out[lv] = (h_err, float(rho_err.max()), float(run.indicator.mean()))
    return out, clock


def run_coupled(p, seeds, levels, n_max, q=2.0, headroom=2, threads=1, noise=True):
    """Strong and pathwise errors of each level against the level-``n_max`` reference.

    Work is split per seed; results are gathered in seed order, so the report
    does not depend on ``threads``.
    """
    seeds = list(seeds)
    levels = sorted(levels)
    if not seeds:
        raise ValueError("at least one seed is required")
    if len(set(levels)) != len(levels) or not levels:
        raise ValueError("levels must be distinct and non-empty")
    if n_max < max(levels) + headroom:
        raise ValueError(f"reference level {n_max} needs >= {headroom} levels above {max(levels)}")
    job = lambda s: _one_seed(p, s, levels, n_max, headroom, noise)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, seeds))
    else:
        results = [job(s) for s in seeds]
    per_seed = [r[0] for r in results]

    rows = []
    for lv in levels:
        errs = np.stack([ps[lv][0] for ps in per_seed]) ** q
        curve = errs.mean(axis=0)
        m_star = int(np.argmax(curve))
        se = float(errs[:, m_star].std(ddof=1) / math.sqrt(len(seeds))) if len(seeds) > 1 else 0.0
        pw = np.array([ps[lv][1] for ps in per_seed])
        rows.append(
            LevelErrors(
                level=lv,
                n_modes=1 << lv,
                h=p.T / (1 << lv),
                q=q,
                strong_error=float(curve[m_star]),
                std_err=se,
                strong_curve=curve,
                pathwise=pw,
                pathwise_p50=float(np.quantile(pw, 0.5)),
                pathwise_p90=float(np.quantile(pw, 0.9)),
                pathwise_max=float(pw.max()),
            )
        )
    report = ErrorReport(levels=levels, rows=rows, paths=len(seeds), seeds=seeds, n_max=n_max)
    report.indicator_on_fraction = {
        lv: float(np.mean([ps[lv][2] for ps in per_seed])) for lv in levels
    }
    report.timings = {
        key: math.fsum(r[1][key] for r in results) for key in ["reference", *levels]
    }
    report.monotone_fraction = monotone_fraction(report)
    if len(levels) >= 3 and np.all(report.strong_errors > 0):
        report.rate, report.intercept, report.r_squared = rate_fit(report)
    return report


def strong_error(p, seeds, levels, q=2.0, n_max=None, headroom=2, threads=1, noise=True):
    seeds = list(seeds)
    if len(seeds) < 8:
        raise ValueError("strong error estimation needs at least 8 seeds")
    n_max = max(levels) + headroom if n_max is None else n_max
    return run_coupled(p, seeds, levels, n_max, q=q, headroom=headroom, threads=threads, noise=noise)


def pathwise_error(p, seeds, levels, n_max=None, headroom=2, threads=1, noise=True):
    """Per-level quantiles of ``sup_t ||X^ref_t - X^l_t||_{H_varrho}``."""
    n_max = max(levels) + headroom if n_max is None else n_max
    rep = run_coupled(p, seeds, levels, n_max, headroom=headroom, threads=threads, noise=noise)
    return {
        r.level: {"p50": r.pathwise_p50, "p90": r.pathwise_p90, "max": r.pathwise_max}
        for r in rep.rows
    }, rep


def monotone_fraction(report):
    """Share of paths whose sup ``H_varrho`` error strictly decreases across all levels."""
    pw = np.stack([r.pathwise for r in report.rows], axis=1)
    if pw.shape[1] < 2:
        return 1.0
    return float(np.mean(np.all(np.diff(pw, axis=1) < 0, axis=1)))


def rate_fit(report_or_steps, errors=None):
    """Least-squares slope and intercept of ``log E`` against ``log h``, plus R^2."""
    if errors is None:
        steps, errors = report_or_steps.steps, report_or_steps.strong_errors
    else:
        steps = report_or_steps
    steps = np.asarray(steps, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if steps.size < 3:
        raise UndefinedRate("rate fit needs at least 3 levels")
    if np.any(errors <= 0) or not np.all(np.isfinite(errors)):
        raise UndefinedRate("rate undefined for zero or non-finite errors")
    x, y = np.log(steps), np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)


# ---------------------------------------------------------------------------
# a priori bound


def l4_embedding_bound(n, c0):
    """Upper bound for ``||u||_{L^4}^2 / ||(-A)^{1/8} u||_H^2`` on the first ``n`` modes.

    Hausdorff-Young on the odd periodic extension gives
    ``||u||_{L^4} <= 2^{1/4} ||a||_{l^{4/3}}``, and Hoelder against the weights
    ``(c0 pi^2 k^2)^{1/4}`` leaves ``sqrt(2) (sum_{k<=n} 1 / (pi sqrt(c0) k))^{1/2}``.
    """
    harmonic = math.fsum(1.0 / k for k in range(1, n + 1))
    return math.sqrt(2.0) * math.sqrt(harmonic / (math.pi * math.sqrt(c0)))


def lipschitz_theta(p, n):
    """Local Lipschitz constant of ``F`` from ``H_{1/8}`` into ``H_{-1/2}``."""
    return abs(p.c1) * p.c0**-0.5 * l4_embedding_bound(n, p.c0) + 1.0


def default_theta(p, n, eta=0.0):
    """Growth/Lipschitz constant in the form consumed by the a priori bound.

    With ``alpha = 1/2`` and ``F(0) = 0`` the ``H_{-1/2}/H_{-alpha}`` ratio is
    1; the remaining operator norms are diagonal and attained at mode 1.
    """
    th = lipschitz_theta(p, n)
    vt = p.vartheta
    lam1 = p.c0 * math.pi**2
    emb = (p.kappa + lam1) ** (p.rho - p.varrho)
    shift = max(1.0, (p.kappa + lam1) / (eta + lam1))
    growth = 8.0 * th**2 * max(1.0, emb ** (2 + 2 * vt))
    lipschitz = 3.0 * th**2 * (1.0 + emb ** (2 * vt)) * (1.0 + 2.0 ** max(2 * vt - 1, 0.0))
    return shift * max(growth, lipschitz)


@dataclass(frozen=True)
class BoundConstants:
    eta: float = 0.0
    beta: float = 1.0
    theta: float = None
    epsilon: float = 0.0
    c_neg: float = None
    varphi: float = 0.75
    slack: float = 1e-6

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0 <= self.varphi < 1:
            raise ValueError("varphi must lie in [0, 1)")
        if self.eta < 0 or self.epsilon < 0:
            raise ValueError("eta and epsilon must be nonnegative")


@dataclass
class BoundReport:
    level: int
    lhs_max: float
    rhs: float
    log10_rhs: float
    holds: bool
    margin: float
    overflow: bool
    theta: float
    c_neg: float
    eta: float
    lhs: np.ndarray
    log_rhs_curve: np.ndarray
    header: str = (
        "lhs = max_m ||X_m - Psi_m||_{H_varrho}; the bound's O is Psi = e^{tA} P_n xi + O^n "
        "and its shifted process is built from Psi; checked on the projected dynamics only"
    )


def _log_expm1(x):
    """``log(e^x - 1)`` for ``x > 0`` without overflow."""
    x = np.asarray(x, dtype=np.float64)
    big = x > 1.0
    safe = np.where(big, 1.0, x)
    return np.where(big, x + np.log1p(-np.exp(-np.where(big, x, 1.0))), np.log(np.expm1(safe)))


def apriori_check(traj, procs, bc, p):
    """Evaluate the a priori bound on ``sup_t ||X_t - Psi_t||_{H_varrho}`` for one path.

    The bound is the one for the projected system with ``phi -> 2 phi``,
    ``Phi -> 2 Phi`` and growth exponent ``2 vartheta``.  Integrals whose
    integrands are frozen at the left grid point are evaluated exactly; the
    ``||O_s||^2`` and ``||sqrt(eta) Psi_u||`` integrals use left endpoints.
    Everything is carried in logarithms, so an overflowing ``Phi`` yields a
    finite ``log10_rhs`` and ``rhs = inf``.
    """
    n = traj.X.shape[1]
    steps = traj.X.shape[0] - 1
    h = p.T / steps
    T = p.T
    kappa, eta, beta = p.kappa, bc.eta, bc.beta
    gamma, varrho, rho, alpha = p.gamma, p.varrho, p.rho, p.alpha
    vt = 2.0 * p.vartheta
    theta = default_theta(p, n, eta) if bc.theta is None else bc.theta
    c = negative_norm_constant(gamma, p.burgers) if bc.c_neg is None else bc.c_neg
    if not 0 < h <= min(1.0, T):
        raise ValueError("the bound requires h <= min(1, T)")

    lhs = hr_norms(traj.X - procs.Psi, varrho, p.spec)
    bbo = procs.BbO

    cf = CoercivityFunctionals.from_burgers(p.burgers)
    g = 2.0 * cf.phi_many(bbo[:-1]) + 2.0 * eta * (1.0 + beta)
    log_Phi2 = math.log(2.0) + cf.log_Phi_many(bbo[:-1])

    # G_m = int_{t_m}^T g(u) du with g frozen on each step
    G = np.concatenate([np.cumsum((h * g)[::-1])[::-1], [0.0]])
    log_step_int = G[1:] + _log_expm1(h * g) - np.log(g)

    bbo_sq = np.sum(bbo[:-1] ** 2, axis=1)
    psi_rho = hr_norms(procs.Psi[:-1], varrho, p.spec)
    with np.errstate(divide="ignore"):
        eta_int = h * np.sum((math.sqrt(eta) * psi_rho) ** (4 + 2 * vt)) if eta > 0 else 0.0
        log_K = (4 + 3 * vt) * math.log(max(1.0, eta, T)) + math.log(max(1.0, eta_int))
        log_rest = np.logaddexp(np.log(eta / (2 * beta) * bbo_sq), log_K)
    log_I = float(logsumexp(log_step_int + np.logaddexp(log_Phi2, log_rest)))

    bracket = (
        1.0
        + (kappa + math.sqrt(eta) + math.sqrt(eta) * abs(kappa - eta) * math.exp(eta))
        * (kappa + p.c0 * math.pi**2) ** (rho - varrho)
        + math.sqrt(theta)
        + math.sqrt(eta)
    )
    log_pref = math.log1p(
        theta * math.exp(kappa * (2 + vt)) * bracket ** (2 + vt)
        / ((1 - bc.varphi) * (1 - alpha - rho) ** (2 + vt))
    )
    sup_bbo_sq = float(np.max(np.sum(bbo**2, axis=1)))
    log_inner = np.logaddexp(math.log(bc.epsilon + sup_bbo_sq) if bc.epsilon + sup_bbo_sq > 0 else -np.inf,
                             log_pref + log_I)

    e = 1.0 - varrho - gamma
    t = traj.times
    with np.errstate(divide="ignore"):
        log_front = math.log(2.0 * c / e) if c > 0 else -np.inf
        log_t = np.where(t > 0, np.log(np.where(t > 0, t, 1.0)), -np.inf)
        log_rhs_curve = log_front + kappa * t + e * log_t + log_inner
    log_rhs_T = float(log_rhs_curve[-1])

    overflow = log_rhs_T > math.log(np.finfo(np.float64).max)
    rhs = math.inf if overflow else math.exp(log_rhs_T) if np.isfinite(log_rhs_T) else 0.0
    lhs_max = float(lhs.max())
    with np.errstate(divide="ignore", over="ignore"):
        rhs_curve = np.exp(log_rhs_curve)
    holds = bool(overflow or np.all(lhs <= rhs_curve * (1 + bc.slack)))
    holds = holds and lhs_max <= rhs * (1 + bc.slack)
    margin = math.inf if lhs_max == 0 else rhs / lhs_max
    return BoundReport(
        level=traj.level,
        lhs_max=lhs_max,
        rhs=rhs,
        log10_rhs=log_rhs_T / math.log(10.0),
        holds=holds,
        margin=margin,
        overflow=overflow,
        theta=theta,
        c_neg=c,
        eta=eta,
        lhs=lhs,
        log_rhs_curve=log_rhs_curve,
    )
