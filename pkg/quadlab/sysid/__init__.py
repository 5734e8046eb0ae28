from quadlab.sysid.frf import FrequencyResponse, WindowConfig, check_uniform, estimate_frf
from quadlab.sysid.loes import (
    REFERENCE_MODELS, STRUCTURES, FitTrace, LoesModel, fit_loes, read_model_summary, synthetic_frf,
    tf_frequency_response, write_model_summary,
)
from quadlab.sysid.pipeline import IdentificationReport, end_to_end_identify, identify_from_log, truth_mismatch

__all__ = [
    "FrequencyResponse", "WindowConfig", "check_uniform", "estimate_frf",
    "LoesModel", "FitTrace", "STRUCTURES", "REFERENCE_MODELS", "fit_loes", "synthetic_frf",
    "tf_frequency_response", "write_model_summary", "read_model_summary",
    "IdentificationReport", "identify_from_log", "end_to_end_identify", "truth_mismatch",
]
