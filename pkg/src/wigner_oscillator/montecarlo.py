"""Monte-Carlo ensembles of noise-kicked oscillator trajectories.

Each trajectory owns a counter-based Philox stream keyed by ``(seed, trajectory index)``;
its draws are consumed in a fixed order (two for the initial point, then one per step),
so the draw for a given step is a pure function of ``(seed, index, step)``. Work is split
into contiguous index ranges, results are concatenated in index order, and sums use
exactly rounded ``math.fsum``. Estimates are therefore bit-identical for any number of
partitions.

Kick placement: the rotation over ``omega*t`` is split into ``n`` equal steps and each
kick is applied at the midpoint of its step (rotate by ``d/2`` before the first exact
step and by ``d/2`` after the last). The kick integral is then a midpoint rule, with an
``O(dt^2)`` bias in second moments.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import MAX_OMEGA_DT
from .ensemble import NoiseSpec
from .weyl import OscillatorSpec, PhasePoint, fock_projector_transform, wrap_angle

__all__ = [
    "EnsembleConfig",
    "Estimate",
    "PhaseMoments",
    "KernelEstimate",
    "FreeParticleEstimate",
    "sample_ground_wigner",
    "simulate_endpoints",
    "estimate_survival",
    "estimate_transition_from_ground",
    "estimate_phase_moments",
    "estimate_kernel_moments",
    "estimate_free_particle_moments",
    "discrete_kernel_covariance",
    "survival_from_covariance",
]

_BLOCK = 4096
_STEP_CHUNK = 2048
_SQRT_HALF = math.sqrt(0.5)
MAX_DT_FRACTION = MAX_OMEGA_DT / (2.0 * math.pi)


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size, step (as a fraction of the period), seed and worker count.

    ``dt`` must satisfy ``omega*dt <= 0.1``, i.e. ``dt <= period/62.8``.
    """

    trajectories: int = 100_000
    dt: float = 1.0 / 200.0
    seed: int = 42
    partitions: int = 1

    def __post_init__(self):
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories}")
        if not (0.0 < self.dt <= MAX_DT_FRACTION):
            raise ValueError(f"dt must lie in (0, {MAX_DT_FRACTION:.4g}] periods, got {self.dt}")
        if not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.partitions < 1:
            raise ValueError(f"partitions must be >= 1, got {self.partitions}")

    def n_steps(self, omega_t: float) -> int:
        if omega_t == 0:
            return 0
        return math.ceil(omega_t / (2.0 * math.pi * self.dt) - 1e-9)


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    trajectories: int

    @classmethod
    def from_samples(cls, samples) -> Estimate:
        samples = np.asarray(samples, dtype=float).ravel()
        n = samples.size
        if n == 0:
            raise ValueError("no samples")
        mean = math.fsum(samples) / n
        if n == 1:
            return cls(mean, 0.0, 1)
        var = math.fsum((samples - mean) ** 2) / (n - 1)
        return cls(mean, math.sqrt(var / n), n)

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.value - target) <= n_se * self.std_error


@dataclass(frozen=True)
class PhaseMoments:
    """Estimates of ``<phi>`` and ``<phi^2>``."""

    mean: Estimate
    second_moment: Estimate


@dataclass(frozen=True)
class KernelEstimate:
    mean: np.ndarray
    mean_se: np.ndarray
    covariance: np.ndarray
    covariance_se: np.ndarray
    trajectories: int


@dataclass(frozen=True)
class FreeParticleEstimate:
    """Estimates of ``Var(p)``, ``Cov(p, q)`` and ``Var(q)`` in physical units."""

    var_p: Estimate
    cov_pq: Estimate
    var_q: Estimate


def sample_ground_wigner(gauss_pair) -> PhasePoint:
    """Map two standard normal draws to a point of the ground Wigner density ``exp(-r^2)/pi``."""
    g1, g2 = gauss_pair
    return PhasePoint(_SQRT_HALF * float(g1), _SQRT_HALF * float(g2))


def _generators(seed, lo, hi):
    return [np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64))) for i in range(lo, hi)]


def _run_block(lo, hi, seed, n_steps, dtheta, kick, start, ground, rotate):
    gens = _generators(seed, lo, hi)
    init = np.array([g.standard_normal(2) for g in gens])
    if ground:
        x = _SQRT_HALF * init[:, 0] + start[0]
        y = _SQRT_HALF * init[:, 1] + start[1]
    else:
        x = np.full(hi - lo, start[0])
        y = np.full(hi - lo, start[1])
    if n_steps == 0:
        return np.column_stack([x, y])
    c, s = (math.cos(dtheta), math.sin(dtheta)) if rotate else (1.0, 0.0)
    ch, sh = (math.cos(0.5 * dtheta), math.sin(0.5 * dtheta)) if rotate else (1.0, 0.0)
    x, y = ch * x + sh * y, -sh * x + ch * y
    done = 0
    while done < n_steps:
        width = min(_STEP_CHUNK, n_steps - done)
        kicks = kick * np.array([g.standard_normal(width) for g in gens])
        for j in range(width):
            x, y = c * x - s * y, s * x + c * y
            x = x + kicks[:, j]
        done += width
    x, y = ch * x - sh * y, sh * x + ch * y
    return np.column_stack([x, y])


def simulate_endpoints(
    noise: NoiseSpec,
    omega_t: float,
    cfg: EnsembleConfig,
    start: PhasePoint | None = None,
    ground: bool = True,
    rotate: bool = True,
) -> np.ndarray:
    """Endpoints ``(x, y)`` of ``cfg.trajectories`` kicked trajectories, in index order.

    With ``ground=True`` the initial points sample the ground Wigner density shifted by
    ``start`` (a coherent state); with ``ground=False`` every trajectory starts at ``start``.
    ``rotate=False`` freezes the free rotation and leaves only the kicks.
    """
    if omega_t < 0:
        raise ValueError("omega_t must be non-negative")
    start = start or PhasePoint(0.0, 0.0)
    n_steps = cfg.n_steps(omega_t)
    dtheta = omega_t / n_steps if n_steps else 0.0
    kick = math.sqrt(noise.n_param * dtheta)
    bounds = np.linspace(0, cfg.trajectories, cfg.partitions + 1).astype(int)

    def partition(k):
        lo, hi = int(bounds[k]), int(bounds[k + 1])
        blocks = [
            _run_block(b, min(b + _BLOCK, hi), cfg.seed, n_steps, dtheta, kick, (start.x, start.y), ground, rotate)
            for b in range(lo, hi, _BLOCK)
        ]
        return np.concatenate(blocks) if blocks else np.empty((0, 2))

    if cfg.partitions == 1:
        parts = [partition(0)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.partitions) as pool:
            parts = list(pool.map(partition, range(cfg.partitions)))
    return np.concatenate(parts)


def estimate_survival(noise: NoiseSpec, omega_t: float, cfg: EnsembleConfig) -> Estimate:
    """Ground-state survival as the ensemble mean of ``2 exp(-r(t)^2)``."""
    pts = simulate_endpoints(noise, omega_t, cfg)
    return Estimate.from_samples(2.0 * np.exp(-np.sum(pts * pts, axis=1)))


def estimate_transition_from_ground(noise: NoiseSpec, omega_t: float, final_fock: int, cfg: EnsembleConfig) -> Estimate:
    """``P(0 -> n)`` as the ensemble mean of the Fock-projector transform at the endpoints."""
    pts = simulate_endpoints(noise, omega_t, cfg)
    return Estimate.from_samples(fock_projector_transform(final_fock, np.hypot(pts[:, 0], pts[:, 1])))


def estimate_phase_moments(
    noise: NoiseSpec, omega_t: float, cfg: EnsembleConfig, displacement: PhasePoint | None = None
) -> PhaseMoments:
    """``<phi>`` and ``<phi^2>`` from endpoint angles of ground-sampled trajectories.

    The evolved ensemble is Gaussian with covariance ``I/2 + C``, whose angular marginal is
    the phase density, so the endpoint angle itself is the estimator. ``displacement``
    starts from a coherent state instead; no closed form exists for that case at finite
    times.
    """
    pts = simulate_endpoints(noise, omega_t, cfg, start=displacement)
    phi = wrap_angle(np.arctan2(pts[:, 1], pts[:, 0]))
    return PhaseMoments(Estimate.from_samples(phi), Estimate.from_samples(phi * phi))


def estimate_kernel_moments(
    noise: NoiseSpec, omega_t: float, cfg: EnsembleConfig, fixed_start: PhasePoint
) -> KernelEstimate:
    """Sample mean and covariance of endpoints started from one fixed point."""
    pts = simulate_endpoints(noise, omega_t, cfg, start=fixed_start, ground=False)
    n = pts.shape[0]
    means = [Estimate.from_samples(pts[:, i]) for i in range(2)]
    dev = pts - np.array([m.value for m in means])
    cov = np.empty((2, 2))
    cov_se = np.empty((2, 2))
    for i in range(2):
        for j in range(i, 2):
            # n/(n-1) turns the mean of products into the unbiased sample covariance
            est = Estimate.from_samples(dev[:, i] * dev[:, j])
            scale = n / (n - 1) if n > 1 else 1.0
            cov[i, j] = cov[j, i] = est.value * scale
            cov_se[i, j] = cov_se[j, i] = est.std_error * scale
    return KernelEstimate(
        np.array([m.value for m in means]), np.array([m.std_error for m in means]), cov, cov_se, n
    )


def estimate_free_particle_moments(
    noise: NoiseSpec, spec: OscillatorSpec, t: float, cfg: EnsembleConfig, n_steps: int = 200
) -> FreeParticleEstimate:
    """Kicked free particle in physical units, started at ``p = q = 0``.

    Each step drifts ``q`` by half a step, kicks ``p`` by ``sqrt(mu h)`` times a normal draw,
    then drifts again. Var(p) and Cov(p, q) are exact for this scheme; Var(q) carries a
    relative bias of ``-1/(4 n_steps^2)``.
    """
    if t <= 0 or n_steps < 1:
        raise ValueError("need t > 0 and n_steps >= 1")
    h = t / n_steps
    sigma = math.sqrt(noise.mu * h)
    half = 0.5 * h / spec.mass
    bounds = np.linspace(0, cfg.trajectories, cfg.partitions + 1).astype(int)

    def partition(k):
        out = []
        lo, hi = int(bounds[k]), int(bounds[k + 1])
        for b in range(lo, hi, _BLOCK):
            gens = _generators(cfg.seed, b, min(b + _BLOCK, hi))
            kicks = sigma * np.array([g.standard_normal(n_steps) for g in gens])
            p = np.zeros(len(gens))
            q = np.zeros(len(gens))
            for j in range(n_steps):
                q = q + half * p
                p = p + kicks[:, j]
                q = q + half * p
            out.append(np.column_stack([p, q]))
        return np.concatenate(out) if out else np.empty((0, 2))

    if cfg.partitions == 1:
        parts = [partition(0)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.partitions) as pool:
            parts = list(pool.map(partition, range(cfg.partitions)))
    pq = np.concatenate(parts)
    p, q = pq[:, 0], pq[:, 1]
    # the mean is known to be zero, so raw second moments are unbiased
    return FreeParticleEstimate(Estimate.from_samples(p * p), Estimate.from_samples(p * q), Estimate.from_samples(q * q))


def discrete_kernel_covariance(n_param: float, omega_t: float, n_steps: int) -> np.ndarray:
    """Exact covariance produced by the midpoint-kick scheme with ``n_steps`` steps."""
    if n_steps == 0:
        return np.zeros((2, 2))
    d = omega_t / n_steps
    remaining = omega_t - (np.arange(n_steps) + 0.5) * d
    v = np.stack([np.cos(remaining), np.sin(remaining)])
    return n_param * d * (v @ v.T)


def survival_from_covariance(cov) -> float:
    """Ground survival ``1/sqrt(det(I + C))`` after Gaussian smearing with covariance ``C``."""
    return 1.0 / math.sqrt(np.linalg.det(np.eye(2) + np.asarray(cov, dtype=float)))
