"""Sine-spectral representation of L^2((0, 1)) with homogeneous Dirichlet data.

A field is a 1-D float64 array ``v`` of coefficients; ``v[k-1]`` multiplies
``e_k(x) = sqrt(2) sin(k pi x)``.  The operator ``A`` is diagonal in this basis
with ``A e_k = -lambda_k e_k`` and ``lambda_k = c0 pi^2 k^2``.  Interpolation
norms are realised through ``(kappa - A)^r``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class OperatorSpec:
    """Eigenstructure of ``A`` and the shift ``kappa`` used for ``H_r`` norms."""

    c0: float = 1.0
    kappa: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.c0) and self.c0 > 0):
            raise ValueError(f"c0 must be positive, got {self.c0}")
        if not (np.isfinite(self.kappa) and self.kappa >= 0):
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")

    def eigenvalues(self, n):
        """``lambda_1, ..., lambda_n`` as an array."""
        k = np.arange(1, n + 1, dtype=np.float64)
        return self.c0 * np.pi**2 * k**2


def as_field(v):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("a spectral field is a non-empty 1-D coefficient array")
    if not np.all(np.isfinite(v)):
        raise ValueError("spectral field has non-finite coefficients")
    return v


def basis_vector(k, n):
    """``e_k`` as a coefficient array of length ``n``."""
    if not 1 <= k <= n:
        raise ValueError(f"mode {k} outside 1..{n}")
    v = np.zeros(n)
    v[k - 1] = 1.0
    return v


def eigenvalue(k, spec):
    if int(k) != k or k < 1:
        raise ValueError(f"mode index must be a positive integer, got {k}")
    return spec.c0 * np.pi**2 * float(k) ** 2


def apply_semigroup(v, t, spec):
    """``e^{tA} v``."""
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    v = as_field(v)
    if t == 0:
        return v.copy()
    return np.exp(-spec.eigenvalues(v.size) * t) * v


def apply_fractional_power(v, r, spec):
    """``(kappa - A)^r v``."""
    v = as_field(v)
    if r == 0:
        return v.copy()
    return (spec.kappa + spec.eigenvalues(v.size)) ** r * v


def hr_norm(v, r, spec):
    """``||(kappa - A)^r v||_H``."""
    v = as_field(v)
    if r == 0:
        return float(np.linalg.norm(v))
    return float(np.linalg.norm((spec.kappa + spec.eigenvalues(v.size)) ** r * v))


def hr_norms(vs, r, spec):
    """Row-wise ``H_r`` norms of a stack of fields with shape ``(m, n)``."""
    vs = np.asarray(vs, dtype=np.float64)
    if r == 0:
        return np.linalg.norm(vs, axis=-1)
    w = (spec.kappa + spec.eigenvalues(vs.shape[-1])) ** r
    return np.linalg.norm(vs * w, axis=-1)


def project(v, n):
    """``P_n v``: keep the first ``n`` modes, zero-padding if ``v`` is shorter."""
    if int(n) != n or n < 1:
        raise ValueError(f"projection dimension must be a positive integer, got {n}")
    v = as_field(v)
    if v.size >= n:
        return v[:n].copy()
    out = np.zeros(n)
    out[: v.size] = v
    return out


def point_eval(v, x):
    """Value of the continuous representative of ``v`` at ``x``."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any((x_arr <= 0) | (x_arr >= 1)):
        raise ValueError("evaluation points must lie in the open interval (0, 1)")
    v = as_field(v)
    k = np.arange(1, v.size + 1)
    vals = SQRT2 * np.sin(np.pi * np.multiply.outer(x_arr, k)) @ v
    return float(vals) if vals.ndim == 0 else vals


def default_grid_size(n, factor=8):
    return max(4096, factor * n)


def sup_norm(v, grid_size=None):
    """Max of ``|v(x)|`` over ``x_j = j / (grid_size + 1)``, ``j = 1..grid_size``.

    Evaluated with a type-I DST, so the cost is ``O(grid_size log grid_size)``.
    """
    return float(sup_norms(as_field(v)[None, :], grid_size)[0])


def sup_norms(vs, grid_size=None):
    """Row-wise :func:`sup_norm` of a stack of fields with shape ``(m, n)``."""
    vs = np.atleast_2d(np.asarray(vs, dtype=np.float64))
    n = vs.shape[-1]
    if grid_size is None:
        grid_size = default_grid_size(n)
    if grid_size < 2 * n:
        raise ValueError(f"grid_size {grid_size} below 2 * dim = {2 * n}")
    padded = np.zeros(vs.shape[:-1] + (grid_size,))
    padded[..., :n] = vs
    # type-I DST gives 2 * sum_k c_k sin(pi k j / (grid_size + 1))
    vals = dst(padded, type=1, axis=-1) / SQRT2
    return np.max(np.abs(vals), axis=-1)


def drift_weight(k, h, spec):
    """``int_0^h e^{-lambda_k s} ds = (1 - e^{-lambda_k h}) / lambda_k``."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    k = np.asarray(k, dtype=np.float64)
    if np.any(k < 1):
        raise ValueError("mode index must be a positive integer")
    lam = spec.c0 * np.pi**2 * k**2
    w = -np.expm1(-lam * h) / lam
    return float(w) if w.ndim == 0 else w


def drift_weights(n, h, spec):
    """``drift_weight(k, h)`` for ``k = 1..n``."""
    return drift_weight(np.arange(1, n + 1), h, spec)
