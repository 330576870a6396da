"""Delay Lyapunov matrices for linear systems with a point and a distributed delay."""

from ._core import (
    ConfigError,
    Error,
    LyapunovSolution,
    ResidualReport,
    SimulationBlowUp,
    SpectrumConditionViolated,
    SpectrumReport,
    TimeDelaySystem,
    check,
    cost,
    example1_system,
    load_system,
    oracle_P,
    sincos_system,
    solve,
)

__all__ = [
    "ConfigError",
    "Error",
    "LyapunovSolution",
    "ResidualReport",
    "SimulationBlowUp",
    "SpectrumConditionViolated",
    "SpectrumReport",
    "TimeDelaySystem",
    "check",
    "cost",
    "example1_system",
    "load_system",
    "oracle_P",
    "sincos_system",
    "solve",
]
