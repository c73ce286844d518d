"""The Burgers nonlinearity ``F(v) = c1 (v^2)'`` in sine-coefficient space.

Squaring a degree-``N`` sine polynomial gives a cosine polynomial of degree
``2N``; differentiating it gives a sine polynomial of degree ``2N``.  Both
:func:`burgers_f` (transform based) and :func:`burgers_f_exact` (direct
product-to-sum expansion) therefore compute the same finite object.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct, dst
from scipy.special import binom, zeta

from .spectral import SQRT2, OperatorSpec, as_field, hr_norm, sup_norm, sup_norms

EXACT_MAX_DIM = 256


@dataclass(frozen=True)
class BurgersSpec:
    c1: float = 1.0
    spec: OperatorSpec = field(default_factory=OperatorSpec)

    def __post_init__(self):
        if not np.isfinite(self.c1):
            raise ValueError(f"c1 must be finite, got {self.c1}")


def _grid_size(n):
    # power of two with room for all 2N cosine modes below the Nyquist index
    return 1 << math.ceil(math.log2(2 * n + 2))


def burgers_f(v, b, n_out=None):
    """``P_{n_out} F(v)`` via an alias-free sine/cosine transform pair.

    ``n_out`` defaults to ``len(v)``.  Modes beyond ``2 len(v)`` are zero.
    """
    v = as_field(v)
    n = v.size
    if n_out is None:
        n_out = n
    if n_out < 1:
        raise ValueError(f"n_out must be positive, got {n_out}")
    m = _grid_size(n)

    # synthesis on the interior nodes x_j = j / m, j = 1..m-1
    padded = np.zeros(m - 1)
    padded[:n] = v
    u = dst(padded, type=1) / SQRT2

    # square on all nodes j = 0..m (the endpoints vanish) and analyse in cosines
    sq = np.zeros(m + 1)
    sq[1:m] = u * u
    a = dct(sq, type=1) / m  # a[k] is the cos(k pi x) coefficient for 1 <= k < m

    k_max = min(n_out, 2 * n)
    k = np.arange(1, k_max + 1)
    out = np.zeros(n_out)
    out[:k_max] = -b.c1 * np.pi * k * a[1 : k_max + 1] / SQRT2
    return out


def burgers_f_exact(v, b):
    """All ``2 len(v)`` sine coefficients of ``F(v)`` by direct expansion.

    Uses ``2 sin(i pi x) sin(j pi x) = cos((i - j) pi x) - cos((i + j) pi x)``.
    Quadratic cost; intended for verification only.
    """
    v = as_field(v)
    n = v.size
    if n > EXACT_MAX_DIM:
        raise ValueError(f"exact expansion limited to dim <= {EXACT_MAX_DIM}, got {n}")
    idx = np.arange(1, n + 1)
    prod = np.multiply.outer(v, v).ravel()
    diff = np.abs(np.subtract.outer(idx, idx)).ravel()
    total = np.add.outer(idx, idx).ravel()
    cos_coef = np.bincount(diff, weights=prod, minlength=2 * n + 1)[: 2 * n + 1]
    cos_coef -= np.bincount(total, weights=prod, minlength=2 * n + 1)[: 2 * n + 1]
    m = np.arange(1, 2 * n + 1)
    return -b.c1 * np.pi * m * cos_coef[1:] / SQRT2


def _series_term(n, gamma, spec):
    return 2 * np.pi**2 * n**2 * (spec.kappa + spec.c0 * np.pi**2 * n**2) ** (-2 * gamma)


def negative_norm_series(gamma, spec, tail_tol=1e-12):
    """``sum_{n >= 1} 2 pi^2 n^2 (kappa + c0 pi^2 n^2)^(-2 gamma)``.

    Head terms are summed directly.  For the tail the summand is expanded in
    the binomial series of ``(1 + kappa / (c0 pi^2 n^2))^(-2 gamma)`` and each
    power of ``n`` is summed with the Hurwitz zeta function; the binomial
    series is cut once a geometric bound on the remainder is below
    ``tail_tol``.
    """
    if gamma <= 0.75:
        raise ValueError(f"series diverges for gamma <= 3/4, got {gamma}")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    a = spec.c0 * np.pi**2
    s = 2.0 * gamma
    # ratio q = kappa / (a (M+1)^2) <= 1/4 keeps the binomial series geometric
    head_m = max(64, math.ceil(math.sqrt(4.0 * spec.kappa / a)))
    n = np.arange(1, head_m + 1, dtype=np.float64)
    head = math.fsum(_series_term(n, gamma, spec))

    pref = 2 * np.pi**2 * a ** (-s)
    q_ratio = spec.kappa / a
    x0 = 2 * s - 2
    zeta0 = float(zeta(x0, head_m + 1))
    q = q_ratio / (head_m + 1) ** 2
    tail_terms = []
    j = 0
    while True:
        tail_terms.append(pref * binom(-s, j) * q_ratio**j * float(zeta(x0 + 2 * j, head_m + 1)))
        if q == 0:
            break
        # |term_i| <= pref |binom(-s, i)| q^i zeta0, and the ratio of successive
        # majorants for i > j is at most rho
        rho = q * max(1.0, (s + j + 1) / (j + 2))
        next_major = pref * abs(binom(-s, j + 1)) * q ** (j + 1) * zeta0
        if rho < 1 and next_major / (1 - rho) <= tail_tol:
            break
        j += 1
    return head + math.fsum(tail_terms)


def negative_norm_constant(gamma, b, tail_tol=1e-12):
    """Constant ``c`` with ``||F(v)||_{H_{-gamma}} <= c ||v||_H^2``."""
    return abs(b.c1) * math.sqrt(negative_norm_series(gamma, b.spec, tail_tol))


def check_negative_norm_inequality(v, gamma, b, c=None):
    """Return ``(lhs, rhs, holds)`` for the ``H_{-gamma}`` bound on ``F(v)``."""
    if c is None:
        c = negative_norm_constant(gamma, b)
    v = as_field(v)
    lhs = hr_norm(burgers_f_exact(v, b), -gamma, b.spec)
    rhs = c * float(np.dot(v, v))
    return lhs, rhs, bool(lhs <= rhs * (1 + 1e-9))


@dataclass(frozen=True)
class CoercivityFunctionals:
    """The pair ``phi, Phi`` controlling ``<v, F(v + w)>`` in terms of ``sup|w|``."""

    phi_const: float

    @classmethod
    def from_burgers(cls, b):
        return cls(max(2.0 * b.c1**2 / b.spec.c0, 4.0))

    def phi(self, v, grid_size=None):
        s = sup_norm(v, grid_size)
        return self.phi_const * (1.0 + s * s)

    def Phi(self, v, grid_size=None):
        s = sup_norm(v, grid_size)
        with np.errstate(over="ignore"):
            return float(self.phi_const * (1.0 + np.float64(s) ** self.phi_const))

    def phi_many(self, vs, grid_size=None):
        s = sup_norms(vs, grid_size)
        return self.phi_const * (1.0 + s * s)

    def log_Phi_many(self, vs, grid_size=None):
        """``log Phi`` row-wise; finite even where ``Phi`` itself overflows."""
        s = sup_norms(vs, grid_size)
        with np.errstate(divide="ignore"):
            log_s = np.log(s)
        return np.log(self.phi_const) + np.logaddexp(0.0, self.phi_const * log_s)
