"""Exact-distribution samplers on top of reproducible streams.

The scalar draws route through :mod:`deathlab.kernels`; batch variants
consume the stream identically, one value per element, so scalar and
batch calls with the same stream position agree draw for draw.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .rng import RngStream

# counts above 2**53 would break exact float cross-checks downstream
MAX_EXACT_COUNT = 2**53


class SamplerError(ValueError):
    """Parameter outside a sampler's domain."""


def _check_prob(c: float, *, allow_zero: bool, allow_one: bool, name: str = "c") -> float:
    c = float(c)
    low_ok = c > 0.0 or (allow_zero and c == 0.0)
    high_ok = c < 1.0 or (allow_one and c == 1.0)
    if not (low_ok and high_ok):
        lo = "[0" if allow_zero else "(0"
        hi = "1]" if allow_one else "1)"
        raise SamplerError(f"{name} must lie in {lo},{hi}, got {c}")
    return c


def _check_count(x: int, name: str, minimum: int = 0) -> int:
    if x != int(x):
        raise SamplerError(f"{name} must be an integer, got {x}")
    x = int(x)
    if x < minimum:
        raise SamplerError(f"{name} must be >= {minimum}, got {x}")
    if x > MAX_EXACT_COUNT:
        raise SamplerError(f"{name} above 2**53 loses exactness, got {x}")
    return x


def sample_binomial(rng: RngStream, x: int, c: float) -> int:
    """One exact Binomial(x, c) draw: how many of x individuals die."""
    x = _check_count(x, "x")
    c = _check_prob(c, allow_zero=True, allow_one=True)
    return int(kernels.binomial_draw(rng.generator, x, c))


def sample_geometric(rng: RngStream, c: float) -> int:
    """One Geometric(c) draw on {1, 2, ...}: P(t) = (1-c)^(t-1) c."""
    c = _check_prob(c, allow_zero=False, allow_one=True)
    return int(kernels.geometric_draw(rng.generator, c))


def sample_max_geometric(rng: RngStream, n: int, c: float) -> int:
    """One draw of the maximum of n iid Geometric(c) variables.

    Uses single-uniform inversion of the CDF (1-(1-c)^t)^n evaluated in
    log space, so n = 10**6 costs the same as n = 1.
    """
    n = _check_count(n, "n", minimum=1)
    c = _check_prob(c, allow_zero=False, allow_one=True)
    return int(kernels.max_geometric_draw(rng.generator, n, c))


def sample_exponential(rng: RngStream, rate: float) -> float:
    """One Exponential(rate) draw by inversion."""
    rate = float(rate)
    if not rate > 0.0:
        raise SamplerError(f"rate must be positive, got {rate}")
    return -np.log1p(-rng.generator.random()) / rate


def sample_binomial_batch(rng: RngStream, x: int, c: float, size: int) -> np.ndarray:
    x = _check_count(x, "x")
    c = _check_prob(c, allow_zero=True, allow_one=True)
    out = np.empty(size, dtype=np.int64)
    kernels.binomial_batch(rng.generator, x, c, out)
    return out


def sample_geometric_batch(rng: RngStream, c: float, size: int) -> np.ndarray:
    c = _check_prob(c, allow_zero=False, allow_one=True)
    out = np.empty(size, dtype=np.int64)
    kernels.geometric_batch(rng.generator, c, out)
    return out


def sample_max_geometric_batch(rng: RngStream, n: int, c: float, size: int) -> np.ndarray:
    n = _check_count(n, "n", minimum=1)
    c = _check_prob(c, allow_zero=False, allow_one=True)
    out = np.empty(size, dtype=np.int64)
    kernels.max_geometric_batch(rng.generator, n, c, out)
    return out


def sample_exponential_batch(rng: RngStream, rate: float, size: int) -> np.ndarray:
    rate = float(rate)
    if not rate > 0.0:
        raise SamplerError(f"rate must be positive, got {rate}")
    return -np.log1p(-rng.generator.random(size)) / rate
