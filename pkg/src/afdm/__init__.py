"""AFDM baseband modem, doubly dispersive channel simulator, and
low-complexity detector bench."""

from .bandmat import BandHermitianMatrix, BandLdl, OpCounter, band_gram, ldl_band, solve_band
from .channel import (ChannelRealization, NoiseSpec, add_cpp, apply_channel,
                      sample_jakes_doppler, time_domain_matrix)
from .daft import AfdmConfig, daft, daft_matrix, idaft
from .detectors import (DetectorResult, DfeConfig, lmmse_band, lmmse_exact,
                        ml_detect, mrc_dfe, mrc_dfe_batch)
from .effective import (EffectiveChannel, build_effective, build_exact,
                        build_integer_sparse, truncate_and_index)
from .framing import (Frame, assemble_frame, compute_guard_width, extract_data,
                      qam_constellation, qam_demap, qam_map, truncation_matrix)
from .harness import (BerRecord, EpsilonRecord, ExperimentConfig, epsilon_sweep,
                      format_ber_csv, format_epsilon_csv, parse_config_file,
                      run_ber_sweep, run_ofdm_baseline)

__version__ = "0.1.0"

__all__ = [
    "AfdmConfig", "BandHermitianMatrix", "BandLdl", "BerRecord",
    "ChannelRealization", "DetectorResult", "DfeConfig", "EffectiveChannel",
    "EpsilonRecord", "ExperimentConfig", "Frame", "NoiseSpec", "OpCounter",
    "add_cpp", "apply_channel", "assemble_frame", "band_gram",
    "build_effective", "build_exact", "build_integer_sparse",
    "compute_guard_width", "daft", "daft_matrix", "epsilon_sweep",
    "extract_data", "format_ber_csv", "format_epsilon_csv", "idaft",
    "ldl_band", "lmmse_band", "lmmse_exact", "ml_detect", "mrc_dfe",
    "mrc_dfe_batch", "parse_config_file", "qam_constellation", "qam_demap",
    "qam_map", "run_ber_sweep", "run_ofdm_baseline", "sample_jakes_doppler",
    "solve_band", "time_domain_matrix", "truncate_and_index",
    "truncation_matrix",
]
