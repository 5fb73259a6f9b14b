"""Approach of <phi^2> to pi^2/3 as N*omega*t grows.

Long-time values come from the radial Laguerre-Laplace quadrature; one Monte-Carlo point
at N = 10, omega t = 100 checks the endpoint-angle variance.

    python3 scripts/phase_randomisation.py --out results/phase_randomisation.csv
"""
import argparse
import math
from pathlib import Path

import numpy as np

from wigner_oscillator.cli import Table, format_table
from wigner_oscillator.ensemble import NoiseSpec, longtime_phi_squared
from wigner_oscillator.montecarlo import EnsembleConfig, Estimate, simulate_endpoints
from wigner_oscillator.phase_operator import PI_SQ_OVER_3
from wigner_oscillator.weyl import wrap_angle


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=128)
    parser.add_argument("--trajectories", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", type=Path, default=Path("results/phase_randomisation.csv"))
    args = parser.parse_args()

    one = NoiseSpec.from_n_param(1.0)
    rows = []
    for k in np.logspace(1, 4, 13):
        value = longtime_phi_squared(one, k, dim=args.dim)
        rows.append((k, value, value - PI_SQ_OVER_3))
        print(f"N omega t = {k:9.1f}  <phi^2> = {value:.8f}  deviation {value - PI_SQ_OVER_3:+.2e}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    table = Table(["n_omega_t", "phi_sq", "deviation"], ["1", "rad^2", "rad^2"], np.array(rows), {"dim": str(args.dim)})
    args.out.write_text(format_table(table))

    pts = simulate_endpoints(NoiseSpec.from_n_param(10.0), 100.0, EnsembleConfig(trajectories=args.trajectories, seed=args.seed))
    phi = wrap_angle(np.arctan2(pts[:, 1], pts[:, 0]))
    var = Estimate.from_samples((phi - phi.mean()) ** 2)
    target = longtime_phi_squared(one, 1e3, dim=args.dim)
    print(f"MC at N=10, omega t=100: var(phi) = {var.value:.5f} +/- {var.std_error:.5f}, "
          f"long-time value {target:.5f}, pi^2/3 = {math.pi ** 2 / 3:.5f}")


if __name__ == "__main__":
    main()
