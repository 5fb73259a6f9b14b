"""Noise-averaged propagator and the closed forms that follow from it.

Under a white-noise force the ensemble-averaged Wigner propagator is the free rotation
by ``omega*t`` smeared by a Gaussian whose covariance (in ``x, y``) is
``N * [[s11, s12/2], [s12/2, s22]]``, with ``N = mu / (m omega^2 hbar)`` and ``s_ij`` the
trigonometric integrals over ``[0, omega*t]``. Everything here is a function of ``N``
and ``omega*t`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import ive, roots_legendre

from .errors import ConvergenceError
from .phase_operator import DEFAULT_TAIL_TERMS, PI_SQ_OVER_3, phi_squared_weyl_radial_average
from .weyl import OscillatorSpec, laguerre_functions

__all__ = [
    "NoiseSpec",
    "KernelMoments",
    "SMatrices",
    "FreeParticleMoments",
    "s_matrices",
    "kernel_moments",
    "survival_ground",
    "phase_density",
    "expect_angle_function",
    "longtime_radial_expectation",
    "longtime_phi_squared",
    "free_particle_kernel_moments",
    "transition_probability",
]


@dataclass(frozen=True)
class NoiseSpec:
    """White-noise strength ``mu`` (N^2 s) acting on a given oscillator."""

    mu: float
    oscillator: OscillatorSpec = field(default_factory=OscillatorSpec)

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be finite and non-negative, got {self.mu!r}")

    @classmethod
    def from_n_param(cls, n_param: float, oscillator: OscillatorSpec | None = None) -> NoiseSpec:
        osc = oscillator or OscillatorSpec()
        return cls(n_param * osc.mass * osc.omega**2 * osc.hbar, osc)

    @property
    def n_param(self) -> float:
        osc = self.oscillator
        return self.mu / (osc.mass * osc.omega**2 * osc.hbar)


@dataclass(frozen=True)
class SMatrices:
    s11: float
    s22: float
    s12: float
    a_matrix: np.ndarray
    det_a: float


@dataclass(frozen=True)
class KernelMoments:
    rotation_angle: float
    covariance: np.ndarray

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.rotation_angle), math.sin(self.rotation_angle)
        return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class FreeParticleMoments:
    """Mean ``(p, q)`` and covariance in physical units."""

    mean: np.ndarray
    covariance: np.ndarray


def _check_time(omega_t):
    if np.any(np.asarray(omega_t) < 0):
        raise ValueError("omega_t must be non-negative")


def s_matrices(n_param: float, omega_t: float) -> SMatrices:
    """Trigonometric integrals and the Gaussian matrix ``A = I/2 + N S'``."""
    _check_time(omega_t)
    s11 = 0.5 * omega_t + 0.25 * math.sin(2.0 * omega_t)
    s22 = 0.5 * omega_t - 0.25 * math.sin(2.0 * omega_t)
    s12 = math.sin(omega_t) ** 2
    a = np.array([[0.5 + n_param * s11, 0.5 * n_param * s12], [0.5 * n_param * s12, 0.5 + n_param * s22]])
    det_a = a[0, 0] * a[1, 1] - a[0, 1] ** 2
    return SMatrices(s11, s22, s12, a, float(det_a))


def kernel_moments(noise: NoiseSpec, omega_t: float) -> KernelMoments:
    s = s_matrices(noise.n_param, omega_t)
    n = noise.n_param
    cov = n * np.array([[s.s11, 0.5 * s.s12], [0.5 * s.s12, s.s22]])
    return KernelMoments(float(omega_t), cov)


def _four_det_a(n, omega_t):
    growth = 1.0 + n * omega_t
    return growth * growth - (n * np.sin(omega_t)) ** 2


def survival_ground(noise: NoiseSpec, omega_t):
    """Noise-averaged probability of remaining in the ground state."""
    _check_time(omega_t)
    n = noise.n_param
    wt = np.asarray(omega_t, dtype=float)
    out = 1.0 / np.sqrt((1.0 + 0.5 * n * wt) ** 2 - (0.5 * n * np.sin(wt)) ** 2)
    return out if out.ndim else float(out)


def phase_density(noise: NoiseSpec, omega_t: float, phi):
    """``P(phi, omega*t)`` for a ground-state start; ``P/(2 pi)`` is a density on ``[-pi, pi)``."""
    _check_time(omega_t)
    n = noise.n_param
    phi = np.asarray(phi, dtype=float)
    growth = 1.0 + n * omega_t
    out = math.sqrt(_four_det_a(n, omega_t)) / (growth - n * math.sin(omega_t) * np.cos(2.0 * phi - omega_t))
    return out if out.ndim else float(out)


def expect_angle_function(
    noise: NoiseSpec, omega_t: float, f: Callable[[float], float], tol: float = 1e-9
) -> float:
    """Ground-state expectation of an operator whose Weyl transform is ``f(phi)``."""
    value, err = quad(
        lambda phi: f(phi) * phase_density(noise, omega_t, phi) / (2.0 * math.pi),
        -math.pi,
        math.pi,
        epsabs=tol,
        epsrel=0.0,
        limit=400,
    )
    if err > tol:
        raise ConvergenceError(f"angle expectation quadrature error {err:.3g} exceeds {tol:.3g}")
    return value


def _radial_head(k, g, r_head, panel_nodes, panel_width=0.5):
    n_panels = max(1, math.ceil(r_head / panel_width))
    x, w = roots_legendre(panel_nodes)
    edges = np.linspace(0.0, r_head, n_panels + 1)
    half = 0.5 * np.diff(edges)
    r = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    wr = (half[:, None] * w[None, :]).ravel()
    return float(np.sum(wr * (2.0 * r / k) * np.exp(-r * r / k) * np.asarray(g(r), dtype=float)))


def longtime_radial_expectation(
    noise: NoiseSpec,
    omega_t: float,
    g: Callable,
    r_head: float = 12.0,
    tol: float = 1e-10,
) -> float:
    """Long-time limit ``integral_0^inf du exp(-u) g(sqrt(u N omega t))`` for radial operators.

    ``g`` takes an array of radii. The integral is split at ``u_c = r_head^2 / (N omega t)``.
    Below it the radial structure of ``g`` (which lives on the scale ``r ~ 1``) is resolved by
    composite Gauss-Legendre in ``r``, checked by doubling the node count. Above it the
    smooth remainder, which may still decay on any scale in ``u``, goes to adaptive
    quadrature. The combined error must stay below ``tol`` (relative to ``max(1, |value|)``).

    The limit is meaningful for ``N omega t`` of order 100 and above; that regime is the
    caller's responsibility.
    """
    _check_time(omega_t)
    k = noise.n_param * omega_t
    if k == 0:
        return float(np.asarray(g(np.zeros(1)))[0])
    coarse = _radial_head(k, g, r_head, 16)
    head = _radial_head(k, g, r_head, 32)
    u_c = r_head * r_head / k
    tail, tail_err = 0.0, 0.0
    if u_c < 745.0:
        tail, tail_err = quad(
            lambda u: math.exp(-u) * float(np.asarray(g(np.array([math.sqrt(u * k)])))[0]),
            u_c,
            np.inf,
            epsabs=0.1 * tol,
            epsrel=1e-12,
            limit=400,
        )
    value = head + tail
    err = abs(head - coarse) + tail_err
    if err > tol * max(1.0, abs(value)):
        raise ConvergenceError(f"long-time radial quadrature error {err:.3g} exceeds tol {tol:.3g}")
    return value


def longtime_phi_squared(
    noise: NoiseSpec, omega_t: float, dim: int = 128, tail_terms: int = DEFAULT_TAIL_TERMS, tol: float = 1e-9
) -> float:
    """Long-time limit of ``Tr(rho(t) phi^2)``, tending to ``pi^2/3`` for any initial state."""
    if dim < 64:
        raise ValueError(f"dim must be >= 64 for the long-time phi^2 limit, got {dim}")

    def radial(r):
        return phi_squared_weyl_radial_average(r, dim, tol=math.inf, tail_terms=tail_terms).value

    # beyond the Laguerre turning point at 2 r^2 = 4 dim + 2 every retained term is negligible
    r_head = math.sqrt(2.0 * dim + 1.0) + 8.0
    return longtime_radial_expectation(noise, omega_t, radial, r_head=r_head, tol=tol)


def free_particle_kernel_moments(noise: NoiseSpec, spec: OscillatorSpec, t: float, p0: float = 0.0, q0: float = 0.0) -> FreeParticleMoments:
    """Gaussian moments of the noise-driven free particle (the ``omega -> 0`` kernel)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    mu, m = noise.mu, spec.mass
    cov = np.array([[mu * t, mu * t * t / (2.0 * m)], [mu * t * t / (2.0 * m), mu * t**3 / (3.0 * m * m)]])
    return FreeParticleMoments(np.array([p0, q0 + p0 * t / m]), cov)


def transition_probability(
    initial_fock: int, final_fock: int, noise: NoiseSpec, omega_t: float, tol: float = 1e-11
) -> float:
    """Noise-averaged ``|<h_final|U_t|h_initial>|^2``.

    The phase-space overlap is evaluated in the Fourier-conjugate plane, where the Gaussian
    kernel acts multiplicatively and the Fock projectors become ``exp(-k^2/4) L_n(k^2/2)``.
    The angular integral of the anisotropic Gaussian is done in closed form (a modified
    Bessel function), leaving one adaptive radial quadrature in ``s = k^2/2``. The raw
    quadrature value is returned without clamping.
    """
    if initial_fock < 0 or final_fock < 0:
        raise ValueError("Fock indices must be non-negative")
    _check_time(omega_t)
    cov = kernel_moments(noise, omega_t).covariance
    c_lo, c_hi = np.linalg.eigvalsh(cov)
    c_lo = max(c_lo, 0.0)
    top = max(initial_fock, final_fock)

    def integrand(s):
        lag = laguerre_functions(top, s)
        return lag[initial_fock] * lag[final_fock] * math.exp(-c_lo * s) * ive(0, 0.5 * (c_hi - c_lo) * s)

    split = 4.0 * top + 40.0
    head, err_head = quad(integrand, 0.0, split, epsabs=tol, epsrel=1e-12, limit=1000)
    tail, err_tail = quad(integrand, split, np.inf, epsabs=tol, epsrel=1e-12, limit=200)
    if err_head + err_tail > 10 * tol:
        raise ConvergenceError(f"transition quadrature error {err_head + err_tail:.3g} exceeds {tol:.3g}")
    return head + tail


def longtime_phi_squared_series(n_omega_t: float, diagonals: np.ndarray) -> float:
    """Term-by-term long-time limit for a truncated phi^2 diagonal; used as an independent check."""
    k = n_omega_t
    m = np.arange(len(diagonals))
    ratio = (k - 1.0) / (k + 1.0)
    return PI_SQ_OVER_3 + float(np.sum(2.0 * (diagonals - PI_SQ_OVER_3) * ratio**m / (k + 1.0)))
