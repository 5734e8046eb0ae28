from quadlab.excitation.chirp import ChirpSpec, chirp_sample, chirp_signal, sweep_gain, sweep_omega
from quadlab.excitation.doublet import doublet, piloted_sweep

__all__ = ["ChirpSpec", "sweep_gain", "sweep_omega", "chirp_sample", "chirp_signal", "doublet", "piloted_sweep"]
