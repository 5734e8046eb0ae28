from quadlab.sensors.imu import (
    AttitudeEstimate, AttitudeEstimator, ImuEmulator, ImuSample, NoiseConfig,
    accel_angles, complementary_step, sensor_model,
)
from quadlab.sensors.filters import (
    FilterConfig, apply_filter, bessel2_step, butterworth2_step, chebyshev1_step, lowpass1_step,
)
from quadlab.sensors.receiver import PilotCommand, PwmFrame, pwm_map, pwm_quantize
from quadlab.sensors.traces import imu_traces, receiver_step_traces

__all__ = [
    "ImuSample", "NoiseConfig", "ImuEmulator", "AttitudeEstimate", "AttitudeEstimator",
    "sensor_model", "accel_angles", "complementary_step",
    "FilterConfig", "apply_filter", "lowpass1_step", "butterworth2_step", "chebyshev1_step", "bessel2_step",
    "PwmFrame", "PilotCommand", "pwm_quantize", "pwm_map",
    "imu_traces", "receiver_step_traces",
]
