"""Age of Information over a two-user broadcast symbol-erasure channel with feedback."""

from .model import (
    ChannelParams,
    ConfigError,
    CycleRecord,
    DecodeEvent,
    PathTrace,
    Scheme,
    SimConfig,
    User,
    mean_age,
    validate_config,
)

__all__ = [
    "ChannelParams",
    "ConfigError",
    "CycleRecord",
    "DecodeEvent",
    "PathTrace",
    "Scheme",
    "SimConfig",
    "User",
    "mean_age",
    "validate_config",
]
