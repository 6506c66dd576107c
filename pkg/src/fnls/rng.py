"""Deterministic random-field generation.

All randomness flows through a counter-based Philox4x64-10 generator keyed
by a single 64-bit seed (numpy's ``np.random.Philox``).  Counter-based
generators are stateless functions of (key, counter), so the exact stream
is reproducible from the seed alone and can be re-implemented in any
language from the published Philox specification.
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralField, TorusGrid, bracket


def make_generator(seed: int) -> np.random.Generator:
    """Philox4x64-10 generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians (real and imaginary parts N(0,1))."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_spectral_field(
    grid: TorusGrid,
    rng: np.random.Generator,
    decay: float = 1.0,
    band: int | None = None,
) -> SpectralField:
    """Random field with coefficients ~ <k>^{-decay} * CN(0,1), optionally band-limited."""
    k = grid.frequencies
    coeffs = random_complex(rng, grid.num_points) * bracket(k) ** (-decay)
    if band is not None:
        coeffs[np.abs(k) > band] = 0.0
    return SpectralField(grid, coeffs)


def random_smooth_field(
    grid: TorusGrid,
    rng: np.random.Generator,
    band: int = 8,
    h1_norm: float = 0.9,
) -> SpectralField:
    """Band-limited random field rescaled to a prescribed H^1 norm."""
    from .spectral import sobolev_norm

    f = random_spectral_field(grid, rng, decay=2.0, band=band)
    current = sobolev_norm(f, 1.0)
    f.coeffs *= h1_norm / current
    return f
