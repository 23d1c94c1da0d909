"""Three-state quantum walks on a line: coin classification, dispersion, peak velocity and trapping."""

from .coins import (
    C1Params,
    C2Params,
    Classification,
    CoinClass,
    CoinParams,
    UnitaryCoin,
    build_c1,
    build_c2,
    build_unitary,
    classify_coin,
    dft3,
    extract_dispersion_params,
    grover,
)
from .kinematics import DispersionParams, peak_velocity
from .simulator import simulate
from .spectrum import evolution_at_k, spectral_scan
from .trapping import limiting_amplitudes

__version__ = "0.1.0"
