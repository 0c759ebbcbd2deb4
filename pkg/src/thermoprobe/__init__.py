"""Quantum thermometry of spin clusters with qubit and cavity probes.

A probe (two-level system or harmonic mode) undergoes repeated collisions with
identically prepared spin clusters. The coarse-grained dynamics is a Lindblad
equation whose rates depend on collective-spin moments of the cluster, so
coherences in the cluster change the temperature the probe reports.
"""

from .bath import (
    BathMoments,
    ClusterSpec,
    Dicke,
    ExplicitCluster,
    HECTwoQubit,
    bath_moments,
    cluster_state,
    concurrence,
    concurrence_and_l1,
    spec_moments,
)
from .dynamics import (
    Collision,
    LindbladGenerator,
    ProbeParams,
    Rates,
    Temperature,
    Trajectory,
    apparent_temperature,
    collision_step,
    collision_trajectory,
    evolve,
    generator,
    integrate,
    qubit_solution,
    rates,
    steady_state,
    thermalization_time,
)
from .errors import FitError, NumericalError, PhysicsError, ThermoprobeError
from .operators import Operator, collective_spin, expm, kron, partial_trace
from .spectra import (
    LorentzianFit,
    Spectrum,
    ew_longtime,
    ew_spectrum,
    lorentzian_fit,
    spectral_intensity,
    wk_spectrum,
)
from .thermometry import (
    EstimationResult,
    cramer_rao,
    invert_moments,
    optimal_alpha,
    optimal_temperature,
    qfi_temperature,
    qfi_zeta,
)

__version__ = "0.1.0"
