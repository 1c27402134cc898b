"""Constellation-constrained rates for the two-user Gaussian MAC."""

from .channel import ChannelParams, MCConfig, params_from_snr
from .constellation import (
    Constellation,
    Family,
    RingSpec,
    gen_apsk,
    gen_cross_qam,
    gen_hex_qam,
    gen_psk,
    gen_square_qam,
    gen_star_qam,
    min_distance,
    normalize,
    rotate,
    single_point,
)
from .mi import MIEstimate, Method, mi_conditional, mi_marginal, rate_region_corner, secrecy_rates, sum_rate
from .optimizer import Objective, ThetaGrid, refine_rotation, sweep_rotation
from .oracle import QuadratureConfig, gaussian_capacity_bound, quad_mi_terms, sumset_entropy

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "MCConfig",
    "params_from_snr",
    "Constellation",
    "Family",
    "RingSpec",
    "gen_apsk",
    "gen_cross_qam",
    "gen_hex_qam",
    "gen_psk",
    "gen_square_qam",
    "gen_star_qam",
    "min_distance",
    "normalize",
    "rotate",
    "single_point",
    "MIEstimate",
    "Method",
    "mi_conditional",
    "mi_marginal",
    "rate_region_corner",
    "secrecy_rates",
    "sum_rate",
    "Objective",
    "ThetaGrid",
    "refine_rotation",
    "sweep_rotation",
    "QuadratureConfig",
    "gaussian_capacity_bound",
    "quad_mi_terms",
    "sumset_entropy",
]
