"""Pointwise functions of the transmuted logistic-exponential distribution.

The family has CDF

    G(y) = u * (1 + delta + u) / (1 + u)**2,    u = (exp(lam*y) - 1)**beta,

for y >= 0, with rate ``lam > 0``, shape ``beta > 0`` and transmutation
weight ``delta`` in (-1, 1).  ``delta = 0`` gives the logistic-exponential
distribution and ``beta = 1, delta = 0`` the exponential.

Everything is evaluated through ``log u = beta * log(exp(lam*y) - 1)`` and
the compact coordinate ``v = u / (1 + u) = expit(log u)``, in which

    G = v * (1 + delta*(1 - v)),        S = (1 - v) * (1 - delta*v),
    g = du/dy * (1 - v)**2 * (1 + delta - 2*delta*v).

The bracket ``1 + delta - 2*delta*v`` stays in [1 - |delta|, 1 + |delta|],
so log-space evaluation is stable from y near 0 up to ``lam*y`` of several
hundred where the naive ``exp(lam*y) - 1`` form has long overflowed.

Everything here is pure over immutable values and safe to call from any
number of threads; sampling owns its generator state through the explicit
seed rather than any global RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_expit

from .errors import DomainError, NumericalError, TailOverflowError

__all__ = [
    "NtleParams",
    "ModeResult",
    "MODE_BOUNDARY_AT_ZERO",
    "MODE_INTERIOR",
    "MODE_UNBOUNDED_AT_ZERO",
    "pdf",
    "log_pdf",
    "cdf",
    "survival",
    "hazard",
    "to_u",
    "from_u",
    "quantile",
    "sample",
    "mode",
]

_LN2 = math.log(2.0)

# Uniform draws below 2**-53 cannot occur from Generator.random() except as
# exact zero; clipping there keeps sampled values strictly positive.
_MIN_UNIFORM = 2.0 ** -53


@dataclass(frozen=True)
class NtleParams:
    """Parameter triple of the distribution.

    lam : float
        Rate, > 0 (units 1/time).
    beta : float
        Shape, > 0 (dimensionless).
    delta : float
        Transmutation weight, strictly inside (-1, 1).
    """

    lam: float
    beta: float
    delta: float

    def __post_init__(self):
        lam = float(self.lam)
        beta = float(self.beta)
        delta = float(self.delta)
        if not (math.isfinite(lam) and lam > 0.0):
            raise DomainError(f"lam must be finite and > 0, got {self.lam!r}")
        if not (math.isfinite(beta) and beta > 0.0):
            raise DomainError(f"beta must be finite and > 0, got {self.beta!r}")
        if not (math.isfinite(delta) and -1.0 < delta < 1.0):
            raise DomainError(f"delta must lie strictly in (-1, 1), got {self.delta!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "delta", delta)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lam, self.beta, self.delta)


MODE_BOUNDARY_AT_ZERO = "boundary_at_zero"
MODE_INTERIOR = "interior"
MODE_UNBOUNDED_AT_ZERO = "unbounded_at_zero"


@dataclass(frozen=True)
class ModeResult:
    """Location and character of the density maximum.

    kind is one of ``boundary_at_zero`` (finite density, maximal at 0),
    ``interior`` (stationary point of the density) or
    ``unbounded_at_zero`` (density diverges as y -> 0, only for beta < 1).
    """

    location: float
    kind: str


def _as_array(y, name: str = "y", positive: bool = False):
    """Validate and broadcast an argument; returns (1-d array, was_scalar)."""
    arr = np.asarray(y, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    if positive:
        bad = ~(flat > 0.0) | ~np.isfinite(flat)
    else:
        bad = ~(flat >= 0.0) | ~np.isfinite(flat)
    if bad.any():
        bound = "> 0" if positive else ">= 0"
        raise DomainError(
            f"{name} must be finite and {bound}; got {flat[bad][0]!r}"
        )
    return flat, scalar


def _ret(values: np.ndarray, scalar: bool):
    return float(values[0]) if scalar else values


def _log_expm1(z: np.ndarray) -> np.ndarray:
    """log(exp(z) - 1) for z >= 0 without overflow; -inf at z = 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < _LN2
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.expm1(z[small]))
    big = ~small
    out[big] = z[big] + np.log1p(-np.exp(-z[big]))
    return out


def _softplus(t: np.ndarray) -> np.ndarray:
    """log(1 + exp(t)) without overflow."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t > 0.0
    out[pos] = t[pos] + np.log1p(np.exp(-t[pos]))
    out[~pos] = np.log1p(np.exp(t[~pos]))
    return out


def _log_u(p: NtleParams, y: np.ndarray) -> np.ndarray:
    return p.beta * _log_expm1(p.lam * y)


def _log_pdf_raw(p: NtleParams, y: np.ndarray) -> np.ndarray:
    """Log density for y > 0; may contain non-finite entries, never raises."""
    z = p.lam * y
    lx = _log_expm1(z)
    lu = p.beta * lx
    v = expit(lu)
    bracket = 1.0 + p.delta - 2.0 * p.delta * v
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (
            math.log(p.beta)
            + math.log(p.lam)
            + z
            + (p.beta - 1.0) * lx
            + 2.0 * log_expit(-lu)
            + np.log(bracket)
        )
    return out


def _log_cdf_raw(p: NtleParams, y: np.ndarray) -> np.ndarray:
    lu = _log_u(p, y)
    with np.errstate(divide="ignore"):
        return log_expit(lu) + np.log1p(p.delta * expit(-lu))


def _log_sf_raw(p: NtleParams, y: np.ndarray) -> np.ndarray:
    lu = _log_u(p, y)
    return log_expit(-lu) + np.log1p(-p.delta * expit(lu))


def pdf(p: NtleParams, y):
    """Density g(y) for y >= 0.

    At y = 0 the density is 0 for beta > 1, lam*(1 + delta) for beta = 1
    (the y -> 0 limit) and unbounded for beta < 1, reported as ``inf``.
    """
    arr, scalar = _as_array(y)
    out = np.empty_like(arr)
    at_zero = arr == 0.0
    inner = ~at_zero
    if inner.any():
        out[inner] = np.exp(_log_pdf_raw(p, arr[inner]))
    if at_zero.any():
        if p.beta > 1.0:
            limit = 0.0
        elif p.beta == 1.0:
            limit = p.lam * (1.0 + p.delta)
        else:
            limit = np.inf
        out[at_zero] = limit
    return _ret(out, scalar)


def log_pdf(p: NtleParams, y):
    """Log density for y > 0, evaluated in log space (no overflow for
    lam*y up to several hundred)."""
    arr, scalar = _as_array(y, positive=True)
    out = _log_pdf_raw(p, arr)
    if not np.all(np.isfinite(out)):
        bad = arr[~np.isfinite(out)][0]
        raise NumericalError(f"log-density is not finite at y={bad!r}")
    return _ret(out, scalar)


def cdf(p: NtleParams, y):
    """Distribution function G(y) for y >= 0."""
    arr, scalar = _as_array(y)
    lu = _log_u(p, arr)
    v = expit(lu)
    # the product can round one ulp past the saturation point
    out = np.clip(v * (1.0 + p.delta * expit(-lu)), 0.0, 1.0)
    return _ret(out, scalar)


def survival(p: NtleParams, y):
    """Survival function S(y) = (1 + (1 - delta)*u) / (1 + u)**2 for y >= 0,
    evaluated directly (not as 1 - cdf) for tail accuracy."""
    arr, scalar = _as_array(y)
    lu = _log_u(p, arr)
    out = np.clip(expit(-lu) * (1.0 - p.delta * expit(lu)), 0.0, 1.0)
    return _ret(out, scalar)


def hazard(p: NtleParams, y):
    """Hazard rate g(y)/S(y) for y > 0, computed as exp(log g - log S).

    The log-space ratio stays finite well past the point where S itself
    underflows (it tends to beta*lam in the far tail); the tail-overflow
    error fires only if the log-space evaluation degenerates.
    """
    arr, scalar = _as_array(y, positive=True)
    log_sf = _log_sf_raw(p, arr)
    if np.any(np.isinf(log_sf)):
        raise TailOverflowError(
            "survival underflowed to 0; hazard not representable this deep in the tail"
        )
    out = np.exp(_log_pdf_raw(p, arr) - log_sf)
    if not np.all(np.isfinite(out)):
        raise NumericalError("hazard evaluation produced a non-finite value")
    return _ret(out, scalar)


def to_u(p: NtleParams, y):
    """Map y >= 0 to the substitution coordinate u = (exp(lam*y) - 1)**beta."""
    arr, scalar = _as_array(y)
    with np.errstate(over="ignore"):
        out = np.exp(_log_u(p, arr))
    return _ret(out, scalar)


def from_u(p: NtleParams, u):
    """Inverse of :func:`to_u`: y = log(1 + u**(1/beta)) / lam for u >= 0."""
    arr, scalar = _as_array(u, name="u")
    with np.errstate(divide="ignore"):
        lu = np.log(arr)
    out = _softplus(lu / p.beta) / p.lam
    return _ret(out, scalar)


def quantile(p: NtleParams, prob):
    """Quantile function Q(prob) for prob in (0, 1).

    Inverting G in the v coordinate gives the quadratic
    delta*v**2 - (1 + delta)*v + prob = 0; its root in (0, 1) and the
    matching root for 1 - v are both taken in conjugate form, which is
    free of cancellation for every delta and prob:

        v     = 2*prob / (1 + delta + sqrt((1 + delta)**2 - 4*delta*prob))
        1 - v = 2*(1 - prob) / (1 - delta + sqrt((1 - delta)**2 + 4*delta*(1 - prob)))

    then y = softplus(log(u)/beta) / lam with log u = log v - log(1 - v).
    """
    arr = np.asarray(prob, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    if np.any(~((flat > 0.0) & (flat < 1.0))):
        bad = flat[~((flat > 0.0) & (flat < 1.0))][0]
        raise DomainError(f"prob must lie strictly in (0, 1); got {bad!r}")
    d = p.delta
    v = 2.0 * flat / ((1.0 + d) + np.sqrt((1.0 + d) ** 2 - 4.0 * d * flat))
    comp = 1.0 - flat
    one_minus_v = 2.0 * comp / ((1.0 - d) + np.sqrt((1.0 - d) ** 2 + 4.0 * d * comp))
    lu = np.log(v) - np.log(one_minus_v)
    out = _softplus(lu / p.beta) / p.lam
    return _ret(out, scalar)


def sample(p: NtleParams, n: int, seed: int) -> np.ndarray:
    """Draw n values by inverse transform of seeded uniforms.

    The generator is numpy's PCG64 (``default_rng``), whose stream for a
    given seed is fixed across platforms, so identical (p, n, seed) give
    bit-identical output everywhere.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    probs = np.maximum(rng.random(int(n)), _MIN_UNIFORM)
    return quantile(p, probs)


def _mode_slope(x: np.ndarray, beta: float, delta: float) -> np.ndarray:
    """d/dx log g(y(x)) with x = exp(lam*y) - 1; sign is what matters.

    The two x**beta terms are rewritten with x**(1-beta) in the denominator
    so large x never overflows the numerator.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        xneg = np.exp((1.0 - beta) * np.log(x))  # x**(1-beta)
        t_bracket = beta * (1.0 - delta) / ((1.0 + delta) * xneg + (1.0 - delta) * x)
        t_denom = 3.0 * beta / (xneg + x)
        return 1.0 / (1.0 + x) + (beta - 1.0) / x + t_bracket - t_denom


def _bisect_mode(beta: float, delta: float, lo: float, hi: float) -> float:
    flo = _mode_slope(lo, beta, delta)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        fmid = float(_mode_slope(np.asarray(mid), beta, delta))
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= 1e-13 * lo:
            break
    return math.sqrt(lo * hi)


def mode(p: NtleParams) -> ModeResult:
    """Mode of the density.

    beta < 1: unbounded at the origin.  beta = 1: at 0 unless
    delta < -1/3, in which case the interior point log(-4*delta/(1-delta))/lam.
    beta > 1: interior stationary point, located by sign-change bracketing
    of the modal equation on a geometric grid in x followed by bisection.
    """
    if p.beta < 1.0:
        return ModeResult(0.0, MODE_UNBOUNDED_AT_ZERO)
    if p.beta == 1.0:
        if p.delta >= -1.0 / 3.0:
            return ModeResult(0.0, MODE_BOUNDARY_AT_ZERO)
        x_m = -(1.0 + 3.0 * p.delta) / (1.0 - p.delta)
        return ModeResult(math.log1p(x_m) / p.lam, MODE_INTERIOR)

    grid = np.geomspace(1e-12, 1e12, 1921)
    slopes = _mode_slope(grid, p.beta, p.delta)
    sign = np.sign(slopes)
    flips = np.nonzero((sign[:-1] > 0) & (sign[1:] <= 0))[0]
    if flips.size == 0:
        raise NumericalError(
            "modal equation has no sign change on x in [1e-12, 1e12]; "
            "cannot bracket the interior mode"
        )
    roots = [_bisect_mode(p.beta, p.delta, grid[i], grid[i + 1]) for i in flips]
    ys = [math.log1p(x) / p.lam for x in roots]
    dens = [pdf(p, y) for y in ys]
    best = int(np.argmax(dens))
    return ModeResult(ys[best], MODE_INTERIOR)
