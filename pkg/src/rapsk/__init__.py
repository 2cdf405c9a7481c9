"""Regular amplitude-phase shift keying with multilevel coding.

The subpackages build the constellation, model the white-plus-phase-noise
channel, demap and decode multilevel codewords stage by stage, pick component
code rates, and run Monte Carlo sweeps.
"""

from .channel import AngularModel, ChannelParams, angular_sigma_a2, transmit
from .codes import available_rates, build_ira_ldpc, code_for_rate
from .constellation import (
    RapskConstellation,
    RapskParams,
    bits_to_int,
    build_qam,
    build_rapsk,
    int_to_bits,
    label_to_point,
    papr,
    papr_limit,
    point_to_indices,
)
from .mlcodec import MlcScheme, genie_level_errors, llr_exact, llr_fast, mlc_encode, msd_decode
from .ratedesign import RateRule, design_rates, level_error_prob, quantize_rates
from .simulation import SimConfig, emit_results, run, run_coded_ber, run_uncoded_ser, seed_stream

__version__ = "0.1.0"

__all__ = [
    "AngularModel",
    "ChannelParams",
    "MlcScheme",
    "RapskConstellation",
    "RapskParams",
    "RateRule",
    "SimConfig",
    "angular_sigma_a2",
    "available_rates",
    "bits_to_int",
    "build_ira_ldpc",
    "build_qam",
    "build_rapsk",
    "code_for_rate",
    "design_rates",
    "emit_results",
    "genie_level_errors",
    "int_to_bits",
    "label_to_point",
    "level_error_prob",
    "llr_exact",
    "llr_fast",
    "mlc_encode",
    "msd_decode",
    "papr",
    "papr_limit",
    "point_to_indices",
    "quantize_rates",
    "run",
    "run_coded_ber",
    "run_uncoded_ser",
    "seed_stream",
    "transmit",
]
