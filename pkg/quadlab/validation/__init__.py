from quadlab.validation.timedomain import AXIS_CHANNELS, DoubletValidation, simulate_tf, validate_doublet

__all__ = ["AXIS_CHANNELS", "DoubletValidation", "simulate_tf", "validate_doublet"]
