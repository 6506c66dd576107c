"""Fourier analysis on the torus [0, 2pi).

Coefficients follow the integral convention

    uhat(k) = int_0^{2pi} u(x) e^{-ikx} dx,
    u(x)    = (1/2pi) sum_k uhat(k) e^{ikx},

so Plancherel reads ||u||_{L^2}^2 = (1/2pi) sum_k |uhat(k)|^2, and the
H^s norm is (1/2pi)^{1/2} ||<k>^s uhat||_{l^2} with <k> = (1+k^2)^{1/2}.

The linear flow is generated by the dispersion relation

    w(k) = eps^2 k^4 + k^2        (quartic model, complexified eps^2),
    w(k) = k^delta                (pure-power mode for generalisations),

with propagator multiplier e^{-i t w(k)}.  The quantum parameter enters
through eps^2 = alpha + i beta; the sign of beta splits the complex
parameter plane into dispersive (beta = 0), dissipative (beta < 0) and
blow-up (beta > 0) regimes, with the purely imaginary points eps = i/n
excluded because the smoothing operator (I - eps^2 Lap)^{-1} is singular
there.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionError, RegimeError, ResonantOperatorError

__all__ = [
    "Regime",
    "DispersionParams",
    "TorusGrid",
    "SpectralField",
    "bracket",
    "forward_transform",
    "inverse_transform",
    "dispersion_symbol",
    "dispersion_symbols",
    "real_dispersion_symbols",
    "apply_semigroup",
    "apply_smoothing",
    "sobolev_norm",
    "l2_norm",
    "gamma_constant",
]

_RESONANCE_RTOL = 1e-12


def bracket(x):
    """Japanese bracket <x> = (1 + x^2)^(1/2), elementwise."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


class Regime(enum.Enum):
    DISPERSIVE = "dispersive"
    DISSIPATIVE = "dissipative"
    BLOW_UP = "blow-up"
    RESONANT = "resonant"


@dataclass(frozen=True)
class DispersionParams:
    """Dispersion law w(k) = eps^2 k^4 + k^2, or k^delta in pure-power mode.

    eps^2 = alpha + i*beta is the fundamental datum (the equation only sees
    eps^2, which removes the eps -> -eps branch ambiguity); ``epsilon`` is
    the principal square root normalised to Im(eps) >= 0.
    """

    alpha: float
    beta: float = 0.0
    delta: int = 4
    monomial: bool = False

    def __post_init__(self):
        if self.delta < 2:
            raise ValueError(f"dispersion degree must be >= 2, got {self.delta}")
        if not self.monomial and self.delta != 4:
            raise ValueError("the eps^2 k^4 + k^2 law has fixed degree 4")

    @classmethod
    def from_epsilon(cls, eps: complex) -> "DispersionParams":
        e2 = complex(eps) * complex(eps)
        return cls(alpha=e2.real, beta=e2.imag)

    @classmethod
    def from_epsilon_squared(cls, eps_squared: complex) -> "DispersionParams":
        e2 = complex(eps_squared)
        return cls(alpha=e2.real, beta=e2.imag)

    @classmethod
    def pure_power(cls, delta: int) -> "DispersionParams":
        """Monomial dispersion w(k) = k^delta (real, unit coefficient)."""
        return cls(alpha=1.0, beta=0.0, delta=delta, monomial=True)

    @property
    def epsilon_squared(self) -> complex:
        return complex(self.alpha, self.beta)

    @property
    def epsilon(self) -> complex:
        e = cmath.sqrt(self.epsilon_squared)
        if e.imag < 0 or (e.imag == 0 and e.real < 0):
            e = -e
        return e

    def is_real_epsilon(self) -> bool:
        return self.beta == 0.0 and self.alpha >= 0.0

    def _resonant_mode(self) -> int | None:
        """Integer n >= 1 with eps = i/n, if any."""
        if self.beta != 0.0 or self.alpha >= 0.0:
            return None
        n = round(1.0 / math.sqrt(-self.alpha))
        if n >= 1 and abs(self.alpha * n * n + 1.0) <= _RESONANCE_RTOL * (1.0 + abs(self.alpha) * n * n):
            return n
        return None

    def regime(self) -> Regime:
        if self.beta < 0:
            return Regime.DISSIPATIVE
        if self.beta > 0:
            return Regime.BLOW_UP
        if self._resonant_mode() is not None:
            return Regime.RESONANT
        return Regime.DISPERSIVE


@lru_cache(maxsize=None)
def _frequencies(num_points: int) -> np.ndarray:
    f = np.fft.fftfreq(num_points, d=1.0 / num_points).astype(np.int64)
    f.setflags(write=False)
    return f


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid of x_j = 2pi j / num_points; frequencies in FFT order."""

    num_points: int

    def __post_init__(self):
        n = self.num_points
        if n < 4 or n % 2 != 0:
            raise ValueError(f"num_points must be even and >= 4, got {n}")

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.num_points

    @property
    def frequencies(self) -> np.ndarray:
        """Integer frequencies [0, 1, ..., n/2-1, -n/2, ..., -1]."""
        return _frequencies(self.num_points)

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.num_points) * self.spacing

    def index_of(self, k: int) -> int:
        n = self.num_points
        if not -n // 2 <= k < n // 2:
            raise DimensionError(f"frequency {k} outside grid of size {n}")
        return k % n


@dataclass
class SpectralField:
    """One time slice of u as Fourier coefficients uhat(k) on a TorusGrid."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (self.grid.num_points,):
            raise DimensionError(
                f"expected {self.grid.num_points} coefficients, got shape {self.coeffs.shape}"
            )

    @classmethod
    def zero(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.num_points, dtype=np.complex128))

    @classmethod
    def from_modes(cls, grid: TorusGrid, modes: dict[int, complex]) -> "SpectralField":
        """Build from amplitudes of e^{ikx}: u = sum_k a_k e^{ikx} gives uhat(k) = 2pi a_k."""
        f = cls.zero(grid)
        for k, a in modes.items():
            f.coeffs[grid.index_of(k)] = 2.0 * np.pi * a
        return f

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def samples(self) -> np.ndarray:
        return inverse_transform(self)


def forward_transform(grid: TorusGrid, samples) -> SpectralField:
    """Discrete realisation of uhat(k) = int_0^{2pi} u e^{-ikx} dx."""
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != (grid.num_points,):
        raise DimensionError(
            f"expected {grid.num_points} samples, got shape {samples.shape}"
        )
    return SpectralField(grid, grid.spacing * np.fft.fft(samples))


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Samples of u(x_j) = (1/2pi) sum_k uhat(k) e^{ikx_j}."""
    n = f.grid.num_points
    return np.fft.ifft(f.coeffs) * (n / (2.0 * np.pi))


def dispersion_symbol(k: int, params: DispersionParams) -> complex:
    """w(k) = eps^2 k^4 + k^2, or k^delta in pure-power mode."""
    if params.monomial:
        return complex(float(k) ** params.delta)
    k2 = float(k) * float(k)
    return params.epsilon_squared * k2 * k2 + k2


def dispersion_symbols(grid: TorusGrid, params: DispersionParams) -> np.ndarray:
    """Vector of w(k) over ``grid.frequencies`` (complex)."""
    k = grid.frequencies.astype(float)
    if params.monomial:
        return (k**params.delta).astype(np.complex128)
    k2 = k * k
    return params.epsilon_squared * k2 * k2 + k2


def real_dispersion_symbols(grid: TorusGrid, params: DispersionParams) -> np.ndarray:
    """Real w(k); raises RegimeError when eps is not real."""
    if params.beta != 0.0:
        raise RegimeError("operation requires real eps (beta = Im eps^2 must vanish)")
    k = grid.frequencies.astype(float)
    if params.monomial:
        return k**params.delta
    k2 = k * k
    return params.alpha * k2 * k2 + k2


def apply_semigroup(f: SpectralField, t: float, params: DispersionParams) -> SpectralField:
    """Linear propagator: multiply uhat(k) by e^{-i t w(k)}.

    In the dispersive regime the multiplier is unimodular and every H^s
    norm is preserved; outside it the flow is forward-only (t >= 0), since
    time reversal would exponentiate the damping/growth factor e^{beta t k^4}
    the wrong way.
    """
    regime = params.regime()
    if t < 0 and regime in (Regime.DISSIPATIVE, Regime.BLOW_UP):
        raise RegimeError(f"negative time not admissible in the {regime.value} regime")
    w = dispersion_symbols(f.grid, params)
    with np.errstate(over="ignore", invalid="ignore"):
        mult = np.exp(-1j * t * w)
    return SpectralField(f.grid, f.coeffs * mult)


def smoothing_multipliers(grid: TorusGrid, params: DispersionParams) -> np.ndarray:
    if params.regime() is Regime.RESONANT:
        n = params._resonant_mode()
        raise ResonantOperatorError(
            f"smoothing operator singular for eps = i/{n}: 1 + eps^2 k^2 vanishes at k = {n}"
        )
    k2 = (grid.frequencies.astype(float)) ** 2
    return 1.0 / (1.0 + params.epsilon_squared * k2)


def apply_smoothing(f: SpectralField, params: DispersionParams) -> SpectralField:
    """Smoothing operator (I - eps^2 Lap)^{-1}: multiply mode k by 1/(1 + eps^2 k^2)."""
    return SpectralField(f.grid, f.coeffs * smoothing_multipliers(f.grid, params))


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm (1/2pi)^{1/2} ||<k>^s uhat||_{l^2}; s = 0 is the L^2 norm."""
    weights = bracket(f.grid.frequencies) ** s
    return math.sqrt(np.sum(np.abs(weights * f.coeffs) ** 2) / (2.0 * np.pi))


def l2_norm(f: SpectralField) -> float:
    return math.sqrt(np.sum(np.abs(f.coeffs) ** 2) / (2.0 * np.pi))


def gamma_constant(params: DispersionParams) -> float:
    """Operator norm of the smoothing operator on H^s: sup_n |1/(1 + eps^2 n^2)|.

    The n = 0 term equals 1, and for |n|^2 >= 2/|eps^2| the terms drop below 1,
    so scanning |n| <= ceil(10/|eps^2|) + 10 provably covers the supremum.
    """
    if params.regime() is Regime.RESONANT:
        n = params._resonant_mode()
        raise ResonantOperatorError(f"gamma(eps) is infinite at eps = i/{n}")
    e2 = params.epsilon_squared
    mod = abs(e2)
    if mod == 0.0:
        return 1.0
    n_max = math.ceil(10.0 / mod) + 10
    best = 1.0  # n = 0
    chunk = 1_000_000
    lo = 1
    while lo <= n_max:
        hi = min(n_max, lo + chunk - 1)
        n = np.arange(lo, hi + 1, dtype=float)
        vals = 1.0 / np.abs(1.0 + e2 * n * n)
        best = max(best, float(vals.max()))
        lo = hi + 1
    return best
