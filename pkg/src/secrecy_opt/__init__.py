"""Secrecy capacity, secure degrees of freedom and alignment precoders for
the helper-assisted Gaussian wiretap channel."""

from .channel import (
    AntennaConfig,
    CovariancePair,
    SecrecyResult,
    WiretapChannel,
    load_channel,
    sample_channel,
    save_channel,
    secrecy_rate,
)
from .errors import (
    DegenerateChannelError,
    DimensionMismatchError,
    InfeasibleConfigError,
    InvalidInputError,
    SecrecyOptError,
    SolverFailureError,
)
from .harness import ExperimentConfig, emit_results, empirical_sdof_slope, preset, run_sweep
from .linalg import GsvdResult, gsvd_transform, subspace_dims_oracle
from .mimome import GsReport, gauss_seidel_solve
from .misome import (
    AlignmentClosedForm,
    TwoLayerConfig,
    alignment_closed_form,
    misome_secrecy_capacity,
    zf_baseline,
)
from .sdof import (
    PrecoderPair,
    SdofBreakdown,
    alignment_precoders,
    positive_sdof_condition,
    sdof_closed_form,
    sdof_table_lookup,
    verify_alignment,
)

__version__ = "0.1.0"

__all__ = [
    "AntennaConfig",
    "AlignmentClosedForm",
    "CovariancePair",
    "DegenerateChannelError",
    "DimensionMismatchError",
    "ExperimentConfig",
    "GsReport",
    "GsvdResult",
    "InfeasibleConfigError",
    "InvalidInputError",
    "PrecoderPair",
    "SdofBreakdown",
    "SecrecyOptError",
    "SecrecyResult",
    "SolverFailureError",
    "TwoLayerConfig",
    "WiretapChannel",
    "alignment_closed_form",
    "alignment_precoders",
    "emit_results",
    "empirical_sdof_slope",
    "gauss_seidel_solve",
    "gsvd_transform",
    "load_channel",
    "misome_secrecy_capacity",
    "positive_sdof_condition",
    "preset",
    "run_sweep",
    "sample_channel",
    "save_channel",
    "sdof_closed_form",
    "sdof_table_lookup",
    "secrecy_rate",
    "subspace_dims_oracle",
    "verify_alignment",
    "zf_baseline",
]
