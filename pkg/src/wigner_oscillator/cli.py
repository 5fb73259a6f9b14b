"""Command-line sweeps that emit every computed curve as CSV or JSON.

Example::

    wigner-oscillator phase-expect --n-param 1 --omega-t-max 20 --output fig1.csv

CSV output starts with ``# key=value`` comment lines recording the full configuration
and library version, then a column header with units, then one row per grid point in
17-significant-digit scientific notation. :func:`read_table` parses both formats back.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import DriveSpec, FrequencyMod, adiabatic_phase_shift, integrate_ode, period_average, unwrapped_phase
from .ensemble import (
    NoiseSpec,
    expect_angle_function,
    kernel_moments,
    phase_density,
    s_matrices,
    survival_ground,
    transition_probability,
)
from .errors import ConvergenceError, NotPositiveDefiniteError
from .montecarlo import EnsembleConfig, estimate_phase_moments, estimate_survival
from .parametric import parametric_survival, parametric_survival_quadrature
from .phase_operator import phi_spectrum
from .weyl import OscillatorSpec, PhasePoint

__all__ = ["RunConfig", "Table", "run", "compute", "read_table", "main", "COMMANDS"]

COMMANDS = ("survival", "phase-dist", "phase-expect", "spectrum", "parametric", "adiabatic", "kernel", "transition", "mc-check")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_CONVERGENCE = 4
EXIT_OUTPUT = 5

_DEFAULT_GRID = {"mc-check": 6, "spectrum": 8, "transition": 41}


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation. ``grid_points=None`` picks a per-command default."""

    command: str
    n_param: float = 1.0
    omega_t_max: float = 20.0
    grid_points: int | None = None
    omega_t: float = 1.0
    dim: int = 256
    u: float | None = None
    ebar: float | None = None
    f: float = 0.0
    t_max: float | None = None
    eps0: float = 0.01
    slow_ratio: float = 100.0
    initial_fock: int = 0
    seed: int = 42
    trajectories: int = 100_000
    partitions: int = 1
    output: str = "-"
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.grid_points is not None and self.grid_points < 2:
            raise ValueError(f"grid_points must be >= 2, got {self.grid_points}")
        if not (self.omega_t_max > 0 and math.isfinite(self.omega_t_max)):
            raise ValueError(f"omega_t_max must be positive, got {self.omega_t_max}")
        if self.n_param < 0:
            raise ValueError(f"n_param must be non-negative, got {self.n_param}")
        if self.omega_t < 0:
            raise ValueError(f"omega_t must be non-negative, got {self.omega_t}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.u is not None and self.u < 0:
            raise ValueError(f"u must be non-negative, got {self.u}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.dim < 2 or self.initial_fock < 0:
            raise ValueError("dim must be >= 2 and initial_fock >= 0")
        if self.slow_ratio <= 0:
            raise ValueError(f"slow_ratio must be positive, got {self.slow_ratio}")

    @property
    def points(self) -> int:
        return self.grid_points if self.grid_points is not None else _DEFAULT_GRID.get(self.command, 201)


@dataclass(frozen=True)
class Table:
    columns: list[str]
    units: list[str]
    rows: np.ndarray
    meta: dict[str, str]

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def _row_map(cfg, fn, items):
    """Evaluate independent grid rows on ``cfg.partitions`` threads, keeping row order."""
    items = list(items)
    if cfg.partitions == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.partitions) as pool:
        return list(pool.map(fn, items))


def _omega_t_grid(cfg):
    return np.linspace(0.0, cfg.omega_t_max, cfg.points)


def _noise(cfg):
    return NoiseSpec.from_n_param(cfg.n_param)


def _survival(cfg):
    wt = _omega_t_grid(cfg)
    return ["omega_t", "survival"], ["rad", "1"], np.column_stack([wt, survival_ground(_noise(cfg), wt)])


def _phase_dist(cfg):
    phi = -math.pi + 2.0 * math.pi * np.arange(cfg.points) / cfg.points
    dens = phase_density(_noise(cfg), cfg.omega_t, phi) / (2.0 * math.pi)
    return ["phi", "density"], ["rad", "1/rad"], np.column_stack([phi, dens])


def _phase_expect(cfg):
    noise = _noise(cfg)

    def row(wt):
        return wt, expect_angle_function(noise, wt, lambda p: p), expect_angle_function(noise, wt, lambda p: p * p)

    rows = _row_map(cfg, row, _omega_t_grid(cfg))
    return ["omega_t", "mean_phi", "mean_phi_sq"], ["rad", "rad", "rad^2"], np.array(rows)


def _spectrum(cfg):
    dims = np.unique(np.linspace(2, cfg.dim, cfg.points).round().astype(int))

    def row(d):
        rep = phi_spectrum(int(d))
        return d, rep.spread, rep.eigenvalues[0], rep.eigenvalues[-1]

    rows = _row_map(cfg, row, dims)
    return ["dim", "spread", "min_eigenvalue", "max_eigenvalue"], ["1", "rad", "rad", "rad"], np.array(rows, dtype=float)


def _parametric_rate(cfg):
    if cfg.u is not None:
        return cfg.u
    if cfg.ebar is not None:
        return FrequencyMod.parametric(1.0, cfg.ebar, cfg.f).u
    return 1.0


def _parametric(cfg):
    u = _parametric_rate(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else (5.0 / u if u > 0 else 1.0)
    t = np.linspace(0.0, t_max, cfg.points)
    ut = u * t
    quad_col = np.array(_row_map(cfg, parametric_survival_quadrature, ut))
    return (
        ["t", "ut", "survival", "survival_quadrature"],
        ["1/omega0", "1", "1", "1"],
        np.column_stack([t, ut, parametric_survival(ut), quad_col]),
    )


def _adiabatic(cfg):
    omega0 = 1.0
    slow = omega0 / cfg.slow_ratio
    eps0 = cfg.eps0
    freq = FrequencyMod.custom(omega0, lambda s: eps0 * math.sin(slow * s))
    t_max = cfg.t_max if cfg.t_max is not None else 2.0 * math.pi / slow
    spp = 200
    traj = integrate_ode(PhasePoint(1.0, 0.0), OscillatorSpec(omega=omega0), DriveSpec(), freq, t_max, 2.0 * math.pi / (omega0 * spp))
    slow_phase = unwrapped_phase(traj, omega0)
    # period-averaged phase is defined half a period in from either end
    avg = period_average(slow_phase, spp)
    avg_t = traj.times[spp // 2 : spp // 2 + avg.size]
    t = np.linspace(0.0, t_max, cfg.points)
    theory = np.array([adiabatic_phase_shift(freq, s) for s in t])
    ode_phase = np.interp(t, traj.times, slow_phase)
    ode_avg = np.where((t >= avg_t[0]) & (t <= avg_t[-1]), np.interp(t, avg_t, avg), np.nan)
    radius = np.interp(t, traj.times, np.sqrt(traj.radius_sq))
    return (
        ["t", "radius_ode", "phase_ode", "phase_ode_period_avg", "phase_averaged_theory"],
        ["1/omega0", "1", "rad", "rad", "rad"],
        np.column_stack([t, radius, ode_phase, ode_avg, theory]),
    )


def _kernel(cfg):
    noise = _noise(cfg)
    rows = []
    for wt in _omega_t_grid(cfg):
        cov = kernel_moments(noise, wt).covariance
        rows.append((wt, cov[0, 0], cov[0, 1], cov[1, 1], s_matrices(cfg.n_param, wt).det_a))
    return ["omega_t", "cov_xx", "cov_xy", "cov_yy", "det_a"], ["rad", "1", "1", "1", "1"], np.array(rows)


def _transition(cfg):
    noise = _noise(cfg)
    n = np.arange(cfg.points)
    probs = _row_map(cfg, lambda k: transition_probability(cfg.initial_fock, int(k), noise, cfg.omega_t), n)
    return ["final_fock", "probability"], ["1", "1"], np.column_stack([n, probs])


def _mc_check(cfg):
    noise = _noise(cfg)
    ens = EnsembleConfig(trajectories=cfg.trajectories, seed=cfg.seed, partitions=cfg.partitions)
    rows = []
    for wt in _omega_t_grid(cfg):
        est = estimate_survival(noise, wt, ens)
        exact = survival_ground(noise, wt)
        z = (est.value - exact) / est.std_error if est.std_error > 0 else 0.0
        mom = estimate_phase_moments(noise, wt, ens)
        rows.append((wt, exact, est.value, est.std_error, z, mom.mean.value, mom.mean.std_error))
    return (
        ["omega_t", "survival_closed", "survival_mc", "survival_se", "z_score", "mean_phi_mc", "mean_phi_se"],
        ["rad", "1", "1", "1", "1", "rad", "rad"],
        np.array(rows),
    )


_HANDLERS = {
    "survival": _survival,
    "phase-dist": _phase_dist,
    "phase-expect": _phase_expect,
    "spectrum": _spectrum,
    "parametric": _parametric,
    "adiabatic": _adiabatic,
    "kernel": _kernel,
    "transition": _transition,
    "mc-check": _mc_check,
}


def compute(cfg: RunConfig) -> Table:
    """Evaluate the sweep for ``cfg`` without writing anything."""
    columns, units, rows = _HANDLERS[cfg.command](cfg)
    meta = {k: "" if v is None else str(v) for k, v in dataclasses.asdict(cfg).items()}
    meta["grid_points"] = str(cfg.points)
    meta["version"] = __version__
    return Table(columns, units, np.asarray(rows, dtype=float), meta)


def format_table(table: Table, fmt: str = "csv") -> str:
    if fmt == "json":
        payload = {
            "meta": table.meta,
            "columns": table.columns,
            "units": table.units,
            "rows": [[None if math.isnan(v) else v for v in row] for row in table.rows.tolist()],
        }
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    for key, value in table.meta.items():
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(f"{c} [{u}]" for c, u in zip(table.columns, table.units)) + "\n")
    for row in table.rows:
        buf.write(",".join("%.16e" % v for v in row) + "\n")
    return buf.getvalue()


def read_table(source) -> Table:
    """Parse CSV or JSON emitted by :func:`format_table` (a path or the text itself)."""
    text = source
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows = np.array([[math.nan if v is None else v for v in row] for row in payload["rows"]], dtype=float)
        return Table(payload["columns"], payload["units"], rows.reshape(-1, len(payload["columns"])), payload["meta"])
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError("no column header found")
    columns = [h.split(" [")[0] for h in header]
    units = [h.split(" [", 1)[1].rstrip("]") if " [" in h else "" for h in header]
    return Table(columns, units, np.array(rows, dtype=float).reshape(-1, len(columns)), meta)


def _coerce(field, raw):
    if raw is None or raw == "":
        return None
    kind = field.type if isinstance(field.type, str) else field.type.__name__
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    return str(raw)


def load_config_file(path) -> dict:
    """Read ``key=value`` lines (``#`` comments allowed; dashes and underscores both accepted)."""
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields:
            raise ValueError(f"{path}:{n}: expected key=value with a known key, got {line!r}")
        out[key] = _coerce(fields[key], value.strip())
    return out


def run(cfg: RunConfig, stdout=None) -> int:
    """Compute and write the table for ``cfg``. Returns the process exit status."""
    stdout = stdout or sys.stdout
    try:
        table = compute(cfg)
    except ConvergenceError as exc:
        print(f"error: numerical convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, NotPositiveDefiniteError) as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = format_table(table, cfg.format)
    if cfg.output in ("-", ""):
        stdout.write(text)
        return EXIT_OK
    try:
        Path(cfg.output).write_text(text)
    except OSError as exc:
        print(f"error: cannot write output {cfg.output!r}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wigner-oscillator",
        description="Noise-driven and parametric oscillator sweeps in phase space.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("command", choices=COMMANDS, help="which sweep to run")
    parser.add_argument("--config", help="key=value file of defaults; explicit flags win")
    parser.add_argument("--n-param", dest="n_param", type=float, help="dimensionless noise N = mu/(m omega^2 hbar)")
    parser.add_argument("--omega-t-max", dest="omega_t_max", type=float, help="end of the omega*t grid [rad]")
    parser.add_argument("--grid-points", dest="grid_points", type=int, help="number of grid rows (>= 2)")
    parser.add_argument("--omega-t", dest="omega_t", type=float, help="fixed omega*t for phase-dist and transition [rad]")
    parser.add_argument("--dim", type=int, help="largest Fock truncation for spectrum")
    parser.add_argument("--u", type=float, help="parametric growth rate u = ebar*omega0/4 [omega0]")
    parser.add_argument("--ebar", type=float, help="parametric modulation depth (sets u when --u is absent)")
    parser.add_argument("--f", type=float, help="parametric detuning [omega0]")
    parser.add_argument("--t-max", dest="t_max", type=float, help="end of the time grid [1/omega0]")
    parser.add_argument("--eps0", type=float, help="adiabatic modulation amplitude")
    parser.add_argument("--slow-ratio", dest="slow_ratio", type=float, help="omega0 / slow modulation frequency")
    parser.add_argument("--initial-fock", dest="initial_fock", type=int, help="initial Fock index for transition")
    parser.add_argument("--seed", type=int, help="Monte-Carlo seed (64-bit)")
    parser.add_argument("--trajectories", type=int, help="Monte-Carlo ensemble size")
    parser.add_argument("--partitions", type=int, help="worker threads for Monte-Carlo ensembles and grid rows")
    parser.add_argument("--output", help="output file, '-' for stdout")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    settings = {}
    path = args.pop("config", None)
    try:
        if path is not None:
            settings.update(load_config_file(path))
        settings.update(args)
        cfg = RunConfig(**settings)
    except OSError as exc:
        print(f"error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TypeError, ValueError) as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
