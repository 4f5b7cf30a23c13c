"""Scattering cross-section laboratory: python surface over the C++ core."""

try:
    from qscat._core import (
        ConfigError,
        NumericError,
        bound_states,
        catalog,
        cross_section,
        describe,
        phase_shifts,
        run,
        validate_config,
    )
except ImportError:  # build-tree layout: _core.so next to the package dir
    from _core import (
        ConfigError,
        NumericError,
        bound_states,
        catalog,
        cross_section,
        describe,
        phase_shifts,
        run,
        validate_config,
    )

__all__ = [
    "ConfigError",
    "NumericError",
    "bound_states",
    "catalog",
    "cross_section",
    "describe",
    "phase_shifts",
    "run",
    "validate_config",
]
