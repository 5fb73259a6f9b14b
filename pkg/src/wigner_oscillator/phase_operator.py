"""The Weyl-quantized phase operator on a truncated Fock basis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError
from .weyl import laguerre_functions

__all__ = [
    "FockMatrix",
    "SpectrumReport",
    "PhiSquaredDiagonal",
    "RadialAverage",
    "PI_SQ_OVER_3",
    "g_coefficient",
    "phi_matrix",
    "phi_squared_diagonal",
    "phi_squared_diagonals",
    "phi_spectrum",
    "phi_squared_weyl_radial_average",
]

PI_SQ_OVER_3 = math.pi**2 / 3.0
DEFAULT_DIM = 256
DEFAULT_TAIL_TERMS = 20_000
CESARO_WINDOW = 16


@dataclass(frozen=True)
class FockMatrix:
    """Dense operator matrix on the basis ``|h_0>, ..., |h_{dim-1}>``. Entries are read-only."""

    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise ValueError(f"entries must be a non-empty square matrix, got shape {entries.shape}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        if self.hermitian and self.hermiticity_error() > 1e-12:
            raise ValueError("matrix flagged hermitian but entries[m][n] != conj(entries[n][m])")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class SpectrumReport:
    dim: int
    eigenvalues: np.ndarray
    spread: float


@dataclass(frozen=True)
class PhiSquaredDiagonal:
    """Partial sums of ``<h_m|phi^2|h_m>`` and the integral estimate of the omitted tail."""

    value: float
    tail_bound: float

    @property
    def estimate(self) -> float:
        return self.value + self.tail_bound


@dataclass(frozen=True)
class RadialAverage:
    value: float | np.ndarray
    last_term: float | np.ndarray
    converged: bool


def _log_g(m, n):
    m = np.asarray(m)
    n = np.asarray(n)
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    s = np.where(lo % 2 == 0, 0.5, 1.0)
    return (
        -0.5 * (hi - lo) * math.log(2.0)
        + gammaln(0.5 * lo + s)
        - gammaln(0.5 * hi + s)
        + 0.5 * (gammaln(hi + 1.0) - gammaln(lo + 1.0))
    )


def g_coefficient(m, n):
    """Symmetric Gamma-ratio coefficient ``g_{m,n}``; accepts integer arrays."""
    if np.any(np.asarray(m) < 0) or np.any(np.asarray(n) < 0):
        raise ValueError("Fock indices must be non-negative")
    out = np.exp(_log_g(m, n))
    return out if out.ndim else float(out)


def phi_matrix(dim: int) -> FockMatrix:
    """``<h_m|phi|h_n> = (1 - delta_mn) i^(n-m+1) g_mn / (m - n)`` for ``m, n < dim``."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    m, n = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    powers = np.array([1.0, 1.0j, -1.0, -1.0j])[np.mod(n - m + 1, 4)]
    diff = np.where(m == n, 1, m - n)
    entries = np.where(m == n, 0.0, powers * g_coefficient(m, n) / diff)
    return FockMatrix(entries, hermitian=True)


def phi_squared_diagonal(
    m: int, tail_terms: int = DEFAULT_TAIL_TERMS, tol: float = 0.05
) -> PhiSquaredDiagonal:
    """Series for ``<h_m|phi^2|h_m>`` truncated after ``tail_terms`` upward terms.

    The upward terms decay like a power of ``n`` (``n**-1.5`` for even ``m``, ``n**-2.5`` for
    odd ``m``). The exponent is read off the last retained terms and the omitted tail is
    estimated by comparison with the matching integral.

    Raises
    ------
    ConvergenceError
        If the tail estimate exceeds ``tol``.
    """
    if m < 0 or tail_terms < 1:
        raise ValueError(f"need m >= 0 and tail_terms >= 1, got m={m}, tail_terms={tail_terms}")
    down = np.arange(1, m + 1)
    lower = float(np.sum(np.exp(2.0 * _log_g(m, m - down)) / down**2)) if m else 0.0
    up = np.arange(1, tail_terms + 1)
    terms = np.exp(2.0 * _log_g(m + up, m)) / up.astype(float) ** 2
    tail = _power_law_tail(terms)
    if tail > tol:
        raise ConvergenceError(
            f"phi^2 diagonal m={m}: tail estimate {tail:.3g} exceeds tol {tol:.3g} "
            f"after {tail_terms} terms"
        )
    return PhiSquaredDiagonal(lower + float(np.sum(terms)), tail)


def _power_law_tail(terms: np.ndarray) -> float:
    t = terms.size
    if t < 2:
        # one term gives no exponent; assume the slowest decay seen, n**-1.5
        return 2.0 * float(terms[-1])
    half = t // 2
    p = math.log(terms[half - 1] / terms[-1]) / math.log(t / half)
    if p <= 1.0:
        return math.inf
    return t * float(terms[-1]) / (p - 1.0)


@lru_cache(maxsize=16)
def _diagonals(dim: int, tail_terms: int) -> np.ndarray:
    out = np.array([phi_squared_diagonal(m, tail_terms, tol=math.inf).estimate for m in range(dim)])
    out.flags.writeable = False
    return out


def phi_squared_diagonals(dim: int, tail_terms: int = DEFAULT_TAIL_TERMS) -> np.ndarray:
    """Tail-corrected ``<h_m|phi^2|h_m>`` for ``m = 0..dim-1`` (cached, read-only)."""
    return _diagonals(dim, tail_terms)


def phi_spectrum(dim: int) -> SpectrumReport:
    """Eigenvalues of the truncated phase matrix, sorted ascending."""
    if dim < 2:
        raise ValueError(f"spectrum needs dim >= 2, got {dim}")
    try:
        eigenvalues = np.linalg.eigvalsh(phi_matrix(dim).entries)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed for dim={dim}: {exc}") from None
    return SpectrumReport(dim, eigenvalues, float(eigenvalues[-1] - eigenvalues[0]))


def phi_squared_weyl_radial_average(
    r, dim: int = DEFAULT_DIM, tol: float = 1e-2, tail_terms: int = DEFAULT_TAIL_TERMS
) -> RadialAverage:
    """Angular average of the Weyl transform of ``phi^2`` at radius ``r``.

    Sums ``pi^2/3 + sum_m (<h_m|phi^2|h_m> - pi^2/3) 2 (-1)^m exp(-r^2) L_m(2 r^2)`` over
    ``m < dim``. The alternating series is reported as the mean of its last 16 partial
    sums. ``converged`` is False when the largest final-term magnitude exceeds ``tol``.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    excess = phi_squared_diagonals(dim, tail_terms) - PI_SQ_OVER_3
    signs = np.where(np.arange(dim) % 2 == 0, 2.0, -2.0)
    lag = laguerre_functions(dim - 1, 2.0 * r_arr * r_arr)
    terms = (excess * signs).reshape((dim,) + (1,) * r_arr.ndim) * lag
    partial = np.cumsum(terms, axis=0)
    window = min(CESARO_WINDOW, dim)
    value = PI_SQ_OVER_3 + partial[-window:].mean(axis=0)
    last = np.abs(terms[-1])
    converged = bool(np.all(last <= tol))
    if value.ndim == 0:
        return RadialAverage(float(value), float(last), converged)
    return RadialAverage(value, last, converged)
