"""Space-time white noise through its independent mode projections.

Every mode of the stochastic convolution ``O_t = int_0^t e^{(t-s)A} dW_s`` is
an Ornstein-Uhlenbeck process and is sampled exactly at the finest grid.
Coarser levels are restrictions (subsampling plus mode truncation) of the
finest path, so all levels are driven by the same Brownian motion.

The standard normal variate for mode ``k`` and fine step ``j`` is a pure
function of ``(seed, k, j)``: it is read from the Philox counter-based
generator keyed on ``(seed, k)`` at counter block ``j // 4``, lane ``j % 4``,
and mapped to a Gaussian by the inverse normal CDF.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .spectral import project

_MASK64 = (1 << 64) - 1


def parse_seed(seed):
    """Accept an int or a decimal/hex string; return an unsigned 64-bit int."""
    if isinstance(seed, str):
        seed = int(seed.strip(), 0)
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def _uniform_from_raw(raw):
    # 53 high bits, centred in their cell: strictly inside (0, 1)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class NoiseHierarchy:
    """Finest-level Gaussian variates ``zeta[k][j]``, ``k, j <= 2**n_max``.

    ``enabled=False`` gives the zero noise path (all variates are 0).
    """

    seed: int
    n_max: int
    enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "seed", parse_seed(self.seed))
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def fine_steps(self):
        return 1 << self.n_max

    @property
    def max_modes(self):
        return 1 << self.n_max

    def _check_mode(self, k):
        if not 1 <= k <= self.max_modes:
            raise ValueError(f"mode {k} outside 1..{self.max_modes}")

    def mode_variates(self, k):
        """``zeta[k][0 .. 2**n_max - 1]``."""
        self._check_mode(k)
        if not self.enabled:
            return np.zeros(self.fine_steps)
        raw = np.random.Philox(key=[self.seed, k]).random_raw(self.fine_steps)
        return ndtri(_uniform_from_raw(raw))

    def variate(self, k, j):
        """Single cell ``zeta[k][j]``, computed without its predecessors."""
        self._check_mode(k)
        if not 0 <= j < self.fine_steps:
            raise ValueError(f"step {j} outside 0..{self.fine_steps - 1}")
        if not self.enabled:
            return 0.0
        block = np.random.Philox(key=[self.seed, k], counter=[j // 4, 0, 0, 0])
        raw = block.random_raw(4)[j % 4 : j % 4 + 1]
        return float(ndtri(_uniform_from_raw(raw))[0])

    def variates(self, n_modes):
        """Array of shape ``(2**n_max, n_modes)``: row ``j``, column ``k - 1``."""
        if not 1 <= n_modes <= self.max_modes:
            raise ValueError(f"n_modes {n_modes} outside 1..{self.max_modes}")
        return np.stack([self.mode_variates(k) for k in range(1, n_modes + 1)], axis=1)


def ou_increment_std(k, h, spec):
    """Std of ``int_0^h e^{-lambda_k (h - s)} dbeta_s``: ``sqrt((1 - e^{-2 lambda_k h}) / (2 lambda_k))``."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    k = np.asarray(k, dtype=np.float64)
    lam = spec.c0 * np.pi**2 * k**2
    s = np.sqrt(-np.expm1(-2.0 * lam * h) / (2.0 * lam))
    return float(s) if s.ndim == 0 else s


def fine_convolution(noise, n_modes, spec, T):
    """Stochastic convolution on the finest grid, shape ``(2**n_max + 1, n_modes)``."""
    n_steps = noise.fine_steps
    h = T / n_steps
    zeta = noise.variates(n_modes)
    k = np.arange(1, n_modes + 1)
    decay = np.exp(-spec.eigenvalues(n_modes) * h)
    sigma = ou_increment_std(k, h, spec)
    out = np.zeros((n_steps + 1, n_modes))
    for j in range(n_steps):
        out[j + 1] = decay * out[j] + sigma * zeta[j]
    return out


def mode_path(noise, k, spec, T):
    """Finest-grid path of a single mode ``k``; equals column ``k - 1`` of :func:`fine_convolution`."""
    n_steps = noise.fine_steps
    h = T / n_steps
    zeta = noise.mode_variates(k)
    decay = np.exp(-spec.eigenvalues(k)[-1:] * h)
    sigma = ou_increment_std(np.array([k]), h, spec)
    out = np.zeros((n_steps + 1, 1))
    for j in range(n_steps):
        out[j + 1] = decay * out[j] + sigma * zeta[j]
    return out[:, 0]


def restrict(fine, n_max, level):
    """Level-``level`` values from a finest-grid array (subsample, truncate modes)."""
    if not 1 <= level <= n_max:
        raise ValueError(f"level {level} outside 1..{n_max}")
    stride = 1 << (n_max - level)
    return fine[::stride, : 1 << level].copy()


def stochastic_convolution(noise, level, spec, T, fine=None):
    """``O^n`` at the ``2**level + 1`` grid times of level ``level``, ``n = 2**level``.

    ``fine`` may carry a precomputed :func:`fine_convolution` with at least
    ``2**level`` modes.
    """
    if level > noise.n_max or level < 1:
        raise ValueError(f"level {level} outside 1..{noise.n_max}")
    if fine is None:
        fine = fine_convolution(noise, 1 << level, spec, T)
    return restrict(fine, noise.n_max, level)


def psi_process(O, xi, level, spec, T):
    """``Psi_{t_m} = e^{t_m A} P_n xi + O_{t_m}``."""
    n = 1 << level
    steps = O.shape[0] - 1
    times = T * np.arange(steps + 1) / steps
    p_xi = project(xi, n)
    flow = np.exp(-np.multiply.outer(times, spec.eigenvalues(n))) * p_xi
    return flow + O


def bbO_process(O, eta, level, spec, T):
    """``O_t - int_0^t e^{(t-s)(A - eta)} eta O_s ds`` on the grid.

    The integral is advanced with the left-endpoint value of ``O`` on each
    step, matching the floor convention of the scheme.
    """
    if eta < 0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    if eta == 0:
        return O.copy()
    n = 1 << level
    steps = O.shape[0] - 1
    h = T / steps
    rate = spec.eigenvalues(n) + eta
    decay = np.exp(-rate * h)
    weight = eta * (-np.expm1(-rate * h) / rate)
    d = np.zeros_like(O)
    for m in range(steps):
        d[m + 1] = decay * d[m] - weight * O[m]
    return O + d


@dataclass
class ProcessSet:
    """Grid values of ``O^n``, ``Psi^n`` and the shifted process built from ``Psi^n``."""

    level: int
    T: float
    O: np.ndarray
    Psi: np.ndarray
    BbO: np.ndarray
    eta: float = 0.0
    times: np.ndarray = field(init=False)

    def __post_init__(self):
        steps = self.O.shape[0] - 1
        self.times = self.T * np.arange(steps + 1) / steps

    @property
    def h(self):
        return self.T / (self.O.shape[0] - 1)


def build_processes(noise, level, spec, T, xi, eta=0.0, fine=None):
    O = stochastic_convolution(noise, level, spec, T, fine=fine)
    Psi = psi_process(O, xi, level, spec, T)
    BbO = bbO_process(Psi, eta, level, spec, T)
    return ProcessSet(level=level, T=T, O=O, Psi=Psi, BbO=BbO, eta=eta)
