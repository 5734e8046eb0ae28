from quadlab.logio.flightlog import (
    AXIS_CHANNELS, LOG_COLUMNS, FlightLogRecord, read_log, read_log_frame, records_to_frame, require_channels,
    write_log,
)
from quadlab.logio.config import WorkbenchConfig, dump_config, load_config

__all__ = [
    "AXIS_CHANNELS", "LOG_COLUMNS", "FlightLogRecord", "records_to_frame", "write_log", "read_log",
    "read_log_frame", "require_channels",
    "WorkbenchConfig", "load_config", "dump_config",
]
