"""Ground-state survival for the resonantly pumped (parametric) oscillator.

Three routes to the same number: the closed form ``1/cosh(ut)``, a one-dimensional angular
quadrature of the averaged flow, and a full two-dimensional phase-plane quadrature driven
by the linear flow matrix of the unaveraged equations of motion.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .dynamics import FrequencyMod, flow_matrix
from .errors import ConvergenceError
from .weyl import OscillatorSpec

__all__ = ["parametric_survival", "parametric_survival_quadrature", "parametric_survival_flow", "ground_overlap"]


def parametric_survival(u_t):
    """``1/cosh(ut)``."""
    u_t = np.asarray(u_t, dtype=float)
    if np.any(u_t < 0):
        raise ValueError("u*t must be non-negative")
    out = 1.0 / np.cosh(u_t)
    return out if out.ndim else float(out)


def parametric_survival_quadrature(u_t: float, tol: float = 1e-13) -> float:
    """Angular quadrature of the averaged flow, kept as an independent check of ``1/cosh``."""
    if u_t < 0:
        raise ValueError("u*t must be non-negative")
    grow, shrink = math.exp(2.0 * u_t), math.exp(-2.0 * u_t)

    def integrand(phi):
        psi = phi + 0.25 * math.pi
        return 1.0 / (math.pi * (1.0 + grow * math.cos(psi) ** 2 + shrink * math.sin(psi) ** 2))

    # peaks sit where cos(phi + pi/4) vanishes
    value, err = quad(
        integrand, -math.pi, math.pi, points=(0.25 * math.pi, -0.75 * math.pi), epsabs=tol, epsrel=1e-13, limit=400
    )
    if err > 10 * tol:
        raise ConvergenceError(f"parametric survival quadrature error {err:.3g}")
    return value


def ground_overlap(m) -> float:
    """Survival ``(2/pi) integral exp(-r^2 - |M r|^2) d^2r`` for a linear phase-plane map ``M``.

    For a symplectic ``M`` this equals ``2 / sqrt(2 + ||M||_F^2)``.
    """
    m = np.asarray(m, dtype=float)
    q = np.eye(2) + m.T @ m
    return 2.0 / math.sqrt(np.linalg.det(q))


def parametric_survival_flow(
    ebar: float, t: float, omega0: float = 1.0, dt_fraction: float = 1.0 / 200.0, r_max: float = 8.0, tol: float = 1e-9
) -> float:
    """Survival from the full equations of motion by 2-D quadrature over the initial plane.

    The flow of ``x'' = -omega0^2 (1 + ebar cos(2 omega0 t)) x`` is linear, so the Wigner
    function at ``t`` is the ground Gaussian composed with the RK4 flow matrix. The overlap
    ``(2/pi) integral exp(-r^2) exp(-|M r|^2) d^2r`` is integrated over a disc of radius
    ``r_max`` with nested adaptive quadrature.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    freq = FrequencyMod.parametric(omega0=omega0, ebar=ebar, f=0.0)
    spec = OscillatorSpec(omega=omega0)
    period = 2.0 * math.pi / omega0
    m = flow_matrix(freq, t, period * dt_fraction, spec) if t > 0 else np.eye(2)
    q = np.eye(2) + m.T @ m

    def radial(r, phi):
        c, s = math.cos(phi), math.sin(phi)
        return r * math.exp(-r * r * (q[0, 0] * c * c + 2.0 * q[0, 1] * c * s + q[1, 1] * s * s)) * (2.0 / math.pi)

    def angular(phi):
        return quad(radial, 0.0, r_max, args=(phi,), epsabs=0.1 * tol, epsrel=1e-11, limit=200)[0]

    value, err = quad(angular, -math.pi, math.pi, epsabs=tol, epsrel=1e-11, limit=400)
    if err > 10 * tol:
        raise ConvergenceError(f"flow survival quadrature error {err:.3g}")
    return value
