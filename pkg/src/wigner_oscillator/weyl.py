"""Weyl-transform primitives for the harmonic oscillator.

Phase-plane coordinates are the dimensionless pair ``(x, y) = (p/(hbar*alpha), alpha*q)``
with ``alpha**2 = m*omega/hbar``, and polar coordinates ``x + i*y = r*exp(i*phi)``.
In these units the free oscillator energy is ``hbar*omega*r**2/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import gammaln

from .errors import NotPositiveDefiniteError

__all__ = [
    "OscillatorSpec",
    "PhasePoint",
    "PolarPoint",
    "wrap_angle",
    "laguerre",
    "laguerre_functions",
    "delta_matrix_element",
    "fock_projector_transform",
    "thermal_weyl_transform",
    "gaussian_quadratic_integral",
]

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def wrap_angle(phi):
    """Map angles onto ``[-pi, pi)``."""
    wrapped = np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    # mod can round up to exactly 2*pi for inputs a hair below a multiple of 2*pi
    wrapped = np.where(wrapped >= np.pi, wrapped - 2.0 * np.pi, wrapped)
    return wrapped if wrapped.ndim else float(wrapped)


@dataclass(frozen=True)
class OscillatorSpec:
    """Physical constants of the oscillator (SI or natural units)."""

    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "omega", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def alpha_sq(self) -> float:
        return self.mass * self.omega / self.hbar

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def to_dimensionless(self, p: float, q: float) -> PhasePoint:
        return PhasePoint(p / (self.hbar * self.alpha), self.alpha * q)

    def to_physical(self, point: PhasePoint) -> tuple[float, float]:
        """Return ``(p, q)`` for a dimensionless phase point."""
        return point.x * self.hbar * self.alpha, point.y / self.alpha


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"phase point must be finite, got ({self.x!r}, {self.y!r})")

    def to_polar(self) -> PolarPoint:
        return PolarPoint(math.hypot(self.x, self.y), math.atan2(self.y, self.x))

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class PolarPoint:
    """Polar phase-plane point; ``phi`` is wrapped onto ``[-pi, pi)`` on construction."""

    r: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"radius must be finite and non-negative, got {self.r!r}")
        if not math.isfinite(self.phi):
            raise ValueError(f"angle must be finite, got {self.phi!r}")
        object.__setattr__(self, "phi", wrap_angle(self.phi))

    def to_cartesian(self) -> PhasePoint:
        return PhasePoint(self.r * math.cos(self.phi), self.r * math.sin(self.phi))


def _laguerre_scaled(n: int, k: float, x):
    """Return ``(mantissa, log_scale)`` with ``L_n^k(x) = mantissa * exp(log_scale)``.

    The three-term recurrence is renormalised whenever it grows past 1e150, which keeps
    large orders at large arguments finite.
    """
    x = np.asarray(x, dtype=float)
    log_scale = np.zeros_like(x)
    prev = np.ones_like(x)
    if n == 0:
        return prev, log_scale
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            prev = np.where(big, prev / _RESCALE, prev)
            cur = np.where(big, cur / _RESCALE, cur)
            log_scale = log_scale + np.where(big, _LOG_RESCALE, 0.0)
    return cur, log_scale


def laguerre(n: int, k: int, x):
    """Generalized Laguerre polynomial ``L_n^k(x)`` by upward recurrence in ``n``.

    Parameters
    ----------
    n, k : int
        Degree and order, both non-negative.
    x : float or array_like
        Evaluation points.
    """
    if n < 0 or k < 0:
        raise ValueError(f"laguerre needs n >= 0 and k >= 0, got n={n}, k={k}")
    mantissa, log_scale = _laguerre_scaled(n, k, x)
    out = mantissa * np.exp(log_scale)
    return out if out.ndim else float(out)


def laguerre_functions(nmax: int, x) -> np.ndarray:
    """Rows ``exp(-x/2) * L_m(x)`` for ``m = 0..nmax``; shape ``(nmax + 1,) + x.shape``.

    These are bounded by one in magnitude for ``x >= 0``. For ``x`` beyond roughly 1400 the
    starting value underflows and the rows are returned as zero.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.exp(-0.5 * x)
    if nmax >= 1:
        out[1] = (1.0 - x) * out[0]
    for j in range(1, nmax):
        out[j + 1] = ((2 * j + 1 - x) * out[j] - j * out[j - 1]) / (j + 1)
    return out


_I_POWERS = (1.0, 1.0j, -1.0, -1.0j)


def delta_matrix_element(m: int, n: int, point: PolarPoint) -> complex:
    """Fock matrix element ``<h_m| Delta(r, phi) |h_n>`` of the Weyl kernel.

    The factorial ratio and radial powers are combined in log space, so indices of
    several hundred do not overflow.
    """
    if m < 0 or n < 0:
        raise ValueError(f"Fock indices must be non-negative, got ({m}, {n})")
    lo, hi = min(m, n), max(m, n)
    d = hi - lo
    r = point.r
    if d > 0 and r == 0.0:
        return 0j
    mantissa, log_scale = _laguerre_scaled(lo, d, 2.0 * r * r)
    if mantissa == 0.0:
        return 0j
    log_mag = (
        (1.0 + 0.5 * d) * math.log(2.0)
        + 0.5 * (gammaln(lo + 1) - gammaln(hi + 1))
        + (d * math.log(r) if d else 0.0)
        - r * r
        + float(log_scale)
    )
    magnitude = float(mantissa) * math.exp(log_mag)
    phase = (-1) ** n * _I_POWERS[d % 4] * complex(math.cos((n - m) * point.phi), math.sin((n - m) * point.phi))
    return magnitude * phase


def fock_projector_transform(n: int, r):
    """Weyl transform of ``|h_n><h_n|``: ``2 (-1)^n exp(-r^2) L_n(2 r^2)``."""
    r = np.asarray(r, dtype=float)
    x = 2.0 * r * r
    mantissa, log_scale = _laguerre_scaled(n, 0, x)
    out = 2.0 * (-1) ** n * mantissa * np.exp(log_scale - 0.5 * x)
    return out if out.ndim else float(out)


def thermal_weyl_transform(beta: float, spec: OscillatorSpec, r):
    """Weyl transform of ``exp(-beta*H)`` for the free oscillator at radius ``r``."""
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    b = 0.5 * spec.hbar * spec.omega * beta
    r = np.asarray(r, dtype=float)
    out = np.exp(-r * r * math.tanh(b)) / math.cosh(b)
    return out if out.ndim else float(out)


def gaussian_quadratic_integral(a, j) -> float:
    """``integral d^n k exp(-k.A.k/2 + i J.k) = sqrt((2 pi)^n / det A) exp(-J.A^-1.J / 2)``.

    Raises
    ------
    NotPositiveDefiniteError
        If ``A`` is not symmetric positive definite.
    """
    a = np.asarray(a, dtype=float)
    j = np.asarray(j, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or j.shape != (a.shape[0],):
        raise ValueError(f"shape mismatch: A {a.shape}, J {j.shape}")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise NotPositiveDefiniteError("A must be symmetric")
    try:
        factor = cho_factor(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"A is not positive definite: {exc}") from None
    log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
    quad = float(j @ cho_solve(factor, j))
    n = a.shape[0]
    return math.exp(0.5 * (n * math.log(2.0 * math.pi) - log_det) - 0.5 * quad)
