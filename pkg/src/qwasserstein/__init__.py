"""Quantum Wasserstein-2 distance between one-mode Gaussian states."""
from .errors import (
    DegenerateChannel,
    DisplacedStateUnsupported,
    DivergentEntropy,
    InfeasibleInput,
    NoFeasiblePoint,
    NonPositiveDefinite,
    NotHermitian,
    NotSymplectic,
    OutOfRange,
    QWassersteinError,
    SingularInput,
    UnphysicalState,
)
from .gaussian import GaussianState, build_state, check_physical, williamson1
from .wasserstein import (
    Branch,
    ChannelPair,
    CouplingCovariance,
    WassersteinResult,
    classical_wasserstein2,
    self_distance,
    shifted_distance,
    thermal_wasserstein2,
    wasserstein2,
)

__version__ = "0.1.0"
