"""Spin depurification of a boosted spin-1/2 wavepacket.

A nonrelativistic, fully polarized spin-1/2 packet looks partly mixed to a
boosted observer because every momentum component undergoes its own Wigner
rotation.  This package computes that Bloch vector exactly by quadrature,
its small-momentum expansion, and the dispersion law and localization bound
that control the loss of purity.
"""

from .bloch import (
    BlochReport,
    BlochVector,
    bloch_approx,
    bloch_exact,
    bloch_from_density,
    density_matrix,
    purity_sq_bound,
    purity_sq_exact,
    purity_sq_formula,
    purity_sq_small_velocity,
    report,
)
from .integrator import (
    ConvergenceError,
    CrossValidation,
    IntegralResult,
    IntegrationError,
    IntegratorConfig,
    cross_validate,
    integrate,
)
from .kinematics import (
    E1,
    E2,
    E3,
    FourVelocity,
    WignerAngle,
    four_velocity,
    lambda_param,
    rotation_axis,
    wigner_angle_exact,
    wigner_angle_expanded,
)
from .wavepacket import (
    Amplitude,
    MomentReport,
    WavepacketSpec,
    expectation,
    moments,
    norm,
    normalize,
    pi_dispersion,
    pi_operator,
    position_dispersion,
)

__version__ = "0.1.0"
