"""Phase-space (Wigner-Weyl) treatment of a harmonic oscillator under white noise or frequency modulation."""

__version__ = "0.1.0"

from .errors import ConvergenceError, NotPositiveDefiniteError
from .weyl import (
    OscillatorSpec,
    PhasePoint,
    PolarPoint,
    delta_matrix_element,
    fock_projector_transform,
    gaussian_quadratic_integral,
    laguerre,
    thermal_weyl_transform,
)
from .phase_operator import FockMatrix, SpectrumReport, g_coefficient, phi_matrix, phi_spectrum, phi_squared_diagonal
from .dynamics import DriveSpec, FrequencyMod, Trajectory, averaged_adiabatic, averaged_parametric, integrate_ode
from .ensemble import (
    KernelMoments,
    NoiseSpec,
    expect_angle_function,
    kernel_moments,
    longtime_phi_squared,
    longtime_radial_expectation,
    phase_density,
    survival_ground,
    transition_probability,
)
from .parametric import parametric_survival, parametric_survival_quadrature
from .montecarlo import EnsembleConfig, Estimate
