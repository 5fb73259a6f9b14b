"""Classical phase-plane motion that carries the Wigner function.

All trajectories are expressed in the dimensionless coordinates of
:class:`~wigner_oscillator.weyl.OscillatorSpec`, where the free motion is a
counter-clockwise rotation ``x + i*y -> exp(i*omega*t) (x + i*y)``. The equations of
motion integrated here are ``p = m dq/dt`` and ``dp/dt = -m omega(t)^2 q - lambda(t)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .weyl import OscillatorSpec, PhasePoint, PolarPoint

__all__ = [
    "DriveSpec",
    "FrequencyMod",
    "Trajectory",
    "PARAMETRIC_GROWTH_WINDOW",
    "free_rotation",
    "driven_closed_form",
    "integrate_ode",
    "flow_matrix",
    "langevin_step",
    "adiabatic_phase_shift",
    "averaged_adiabatic",
    "averaged_parametric",
    "unwrapped_phase",
    "period_average",
]

# Detuning window, in units of u, inside which the parametric drive grows classically
# (-2u < f < 2u). Detuned motion is only available through integrate_ode.
PARAMETRIC_GROWTH_WINDOW = (-2.0, 2.0)

MAX_OMEGA_DT = 0.1
EBAR_WARNING = 0.2


@dataclass(frozen=True)
class DriveSpec:
    """External force ``lambda(t)``.

    ``kind`` is one of ``none``, ``sinusoid`` (``lambda0 * sin(omega*t + theta)``),
    ``white_noise`` (strength ``mu``) or ``custom_table`` (linear interpolation of
    ``table_t``/``table_values``).
    """

    kind: str = "none"
    lambda0: float = 0.0
    theta: float = 0.0
    mu: float = 0.0
    table_t: tuple[float, ...] = ()
    table_values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("none", "sinusoid", "white_noise", "custom_table"):
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if not math.isfinite(self.lambda0):
            raise ValueError("lambda0 must be finite")
        if not (self.mu >= 0):
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if self.kind == "custom_table" and (
            len(self.table_t) < 2 or len(self.table_t) != len(self.table_values)
        ):
            raise ValueError("custom_table needs matching time and value tables of length >= 2")

    def force(self, t: float, omega: float) -> float:
        if self.kind == "sinusoid":
            return self.lambda0 * math.sin(omega * t + self.theta)
        if self.kind == "custom_table":
            return float(np.interp(t, self.table_t, self.table_values))
        return 0.0


@dataclass(frozen=True)
class FrequencyMod:
    """Frequency profile ``omega(t)^2 = omega0^2 (1 + eps(t))``.

    Build with :meth:`constant`, :meth:`parametric`, :meth:`custom` or :meth:`from_table`.
    """

    omega0: float = 1.0
    kind: str = "constant"
    eps0: float = 0.0
    ebar: float = 0.0
    f: float = 0.0
    profile: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.kind not in ("constant", "parametric", "custom"):
            raise ValueError(f"unknown frequency profile {self.kind!r}")
        if self.kind == "custom" and self.profile is None:
            raise ValueError("custom frequency profile needs a callable")
        if self.kind == "parametric" and abs(self.ebar) > EBAR_WARNING:
            warnings.warn(
                f"ebar={self.ebar} is not small; the averaged parametric theory assumes |ebar| << 1",
                stacklevel=3,
            )

    @classmethod
    def constant(cls, omega0: float = 1.0, eps0: float = 0.0) -> FrequencyMod:
        return cls(omega0, "constant", eps0=eps0)

    @classmethod
    def parametric(cls, omega0: float = 1.0, ebar: float = 0.05, f: float = 0.0) -> FrequencyMod:
        return cls(omega0, "parametric", ebar=ebar, f=f)

    @classmethod
    def custom(cls, omega0: float, profile: Callable[[float], float]) -> FrequencyMod:
        return cls(omega0, "custom", profile=profile)

    @classmethod
    def from_table(cls, omega0: float, times, values) -> FrequencyMod:
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)
        return cls.custom(omega0, lambda t: float(np.interp(t, times, values)))

    @property
    def u(self) -> float:
        """Parametric growth rate ``ebar * omega0 / 4``."""
        return self.ebar * self.omega0 / 4.0

    def epsilon(self, t: float) -> float:
        if self.kind == "constant":
            return self.eps0
        if self.kind == "parametric":
            return self.ebar * math.cos(2.0 * (self.omega0 + self.f) * t)
        return float(self.profile(t))


@dataclass(frozen=True)
class Trajectory:
    """Sampled phase-plane path; ``points[:, 0]`` is ``x`` and ``points[:, 1]`` is ``y``."""

    times: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.points):
            raise ValueError("times and points differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def final(self) -> PhasePoint:
        return PhasePoint(float(self.points[-1, 0]), float(self.points[-1, 1]))

    @property
    def radius_sq(self) -> np.ndarray:
        return np.sum(self.points**2, axis=1)


def free_rotation(initial: PolarPoint, omega_t: float) -> PolarPoint:
    return PolarPoint(initial.r, initial.phi + omega_t)


def driven_closed_form(initial: PhasePoint, spec: OscillatorSpec, drive: DriveSpec, t: float) -> PhasePoint:
    """Exact motion under the resonant force ``lambda0 * sin(omega*t + theta)``."""
    if drive.kind not in ("sinusoid", "none"):
        raise ValueError(f"closed form needs a sinusoidal drive, got {drive.kind!r}")
    wt = spec.omega * t
    z = initial.as_complex() * complex(math.cos(wt), math.sin(wt))
    if drive.kind == "sinusoid" and drive.lambda0 != 0.0:
        amp = 1j * drive.lambda0 / (2.0 * spec.alpha * spec.hbar * spec.omega)
        z += amp * (
            wt * complex(math.cos(wt + drive.theta), math.sin(wt + drive.theta))
            - math.sin(wt) * complex(math.cos(drive.theta), -math.sin(drive.theta))
        )
    return PhasePoint(z.real, z.imag)


def _rk4(initial, spec, drive, freq, t_final, dt, record=True):
    if drive.kind == "white_noise":
        raise ValueError("white-noise drives are stochastic; use langevin_step")
    if not (dt > 0 and math.isfinite(dt) and math.isfinite(t_final) and t_final > 0):
        raise ValueError(f"need finite dt > 0 and t_final > 0, got dt={dt}, t_final={t_final}")
    omega0 = freq.omega0
    force_scale = 1.0 / (spec.hbar * math.sqrt(spec.mass * omega0 / spec.hbar))
    eps = freq.epsilon
    force = drive.force

    def rhs(t, x, y):
        return -omega0 * (1.0 + eps(t)) * y - force_scale * force(t, omega0), omega0 * x

    n = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / n
    x, y = float(initial.x), float(initial.y)
    out = np.empty((n + 1, 2)) if record else None
    if record:
        out[0] = x, y
    for k in range(n):
        t = k * h
        k1x, k1y = rhs(t, x, y)
        k2x, k2y = rhs(t + 0.5 * h, x + 0.5 * h * k1x, y + 0.5 * h * k1y)
        k3x, k3y = rhs(t + 0.5 * h, x + 0.5 * h * k2x, y + 0.5 * h * k2y)
        k4x, k4y = rhs(t + h, x + h * k3x, y + h * k3y)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if record:
            out[k + 1] = x, y
    if record:
        return np.linspace(0.0, t_final, n + 1), out, h
    return None, np.array([[x, y]]), h


def integrate_ode(
    initial: PhasePoint,
    spec: OscillatorSpec,
    drive: DriveSpec,
    freq: FrequencyMod,
    t_final: float,
    dt: float,
) -> Trajectory:
    """Fixed-step classic RK4 solution of the deterministic equations of motion.

    The base frequency is ``freq.omega0``; the coordinates use ``alpha`` built from it.
    The step is shrunk so that ``t_final`` is hit exactly.
    """
    times, points, h = _rk4(initial, spec, drive, freq, t_final, dt)
    if not np.all(np.isfinite(points)):
        raise FloatingPointError("trajectory left the finite range")
    return Trajectory(times, points, {"integrator": "rk4", "dt": h})


def flow_matrix(freq: FrequencyMod, t_final: float, dt: float, spec: OscillatorSpec | None = None) -> np.ndarray:
    """Linear map ``(x0, y0) -> (x(t), y(t))`` of the unforced, frequency-modulated oscillator."""
    spec = spec or OscillatorSpec(omega=freq.omega0)
    none = DriveSpec()
    cols = [_rk4(PhasePoint(*e), spec, none, freq, t_final, dt, record=False)[1][0] for e in ((1.0, 0.0), (0.0, 1.0))]
    return np.column_stack(cols)


def langevin_step(state: PhasePoint, spec: OscillatorSpec, noise, dt: float, gauss: float) -> PhasePoint:
    """Exact free rotation over ``dt`` followed by a white-noise momentum kick.

    The kick is ``sqrt(mu*dt) * gauss`` in momentum, i.e. ``sqrt(N*omega*dt) * gauss`` in ``x``.
    ``noise`` is anything with a ``mu`` attribute (normally a ``NoiseSpec``).
    """
    wdt = spec.omega * dt
    if not (dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    if wdt > MAX_OMEGA_DT:
        raise ValueError(f"omega*dt = {wdt:.3g} exceeds the accuracy guard {MAX_OMEGA_DT}")
    c, s = math.cos(wdt), math.sin(wdt)
    x = c * state.x - s * state.y
    y = s * state.x + c * state.y
    x += math.sqrt(noise.mu * dt) / (spec.hbar * spec.alpha) * gauss
    return PhasePoint(x, y)


def adiabatic_phase_shift(freq: FrequencyMod, t: float) -> float:
    """``e(t) = (omega0/2) * integral_0^t eps(s) ds``."""
    w0 = freq.omega0
    if freq.kind == "constant":
        return 0.5 * w0 * freq.eps0 * t
    if freq.kind == "parametric":
        nu = 2.0 * (w0 + freq.f)
        return 0.5 * w0 * freq.ebar * math.sin(nu * t) / nu
    if t == 0:
        return 0.0
    value, _ = quad(freq.epsilon, 0.0, t, limit=500, epsabs=1e-13, epsrel=1e-12)
    return 0.5 * w0 * value


def averaged_adiabatic(initial: PolarPoint, freq: FrequencyMod, t: float) -> PolarPoint:
    """Slow-modulation limit: radius frozen, phase advanced by ``omega0*t + e(t)``."""
    return PolarPoint(initial.r, initial.phi + adiabatic_phase_shift(freq, t) + freq.omega0 * t)


def averaged_parametric(initial: PolarPoint, u: float, t: float, omega0: float = 1.0) -> PolarPoint:
    """Averaged motion at exact parametric resonance (zero detuning).

    The slow angle is taken from ``atan2`` of the growing and decaying components, which
    stays continuous where the tangent form is singular.
    """
    if u < 0:
        raise ValueError(f"u must be non-negative, got {u}")
    psi0 = initial.phi + math.pi / 4.0
    grow = math.exp(u * t) * math.cos(psi0)
    decay = math.exp(-u * t) * math.sin(psi0)
    r = initial.r * math.hypot(grow, decay)
    theta = math.atan2(decay, grow) - math.pi / 4.0
    return PolarPoint(r, theta + omega0 * t)


def unwrapped_phase(trajectory: Trajectory, omega0: float) -> np.ndarray:
    """Slow phase ``theta(t) = arg(x + i*y) - omega0*t``, unwrapped along the path."""
    angle = np.unwrap(np.arctan2(trajectory.points[:, 1], trajectory.points[:, 0]))
    return angle - omega0 * trajectory.times


def period_average(values, samples_per_period: int) -> np.ndarray:
    """Centred running mean over one base period (trapezoid weights on ``spp + 1`` samples).

    The result is shorter than the input by ``samples_per_period``; element ``k`` is the
    average centred on input sample ``k + samples_per_period // 2``. Harmonics of the base
    period average to zero exactly.
    """
    spp = int(samples_per_period)
    weights = np.ones(spp + 1)
    weights[[0, -1]] = 0.5
    return np.convolve(np.asarray(values, dtype=float), weights / spp, mode="valid")
