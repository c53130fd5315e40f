"""Scenario configuration, run orchestration and file outputs."""

from .config import ConfigError, ScenarioConfig, canonical_dict, load_config, parse_config  # noqa: F401
from .runner import (  # noqa: F401
    prepare_solution,
    run_greens,
    run_simulate,
    run_spectrum,
    run_verify,
    verify_battery,
)
