"""Simulation and analysis of a pulsating dc-link drive fed by a reconfigurable battery."""
from .backend import BackendConfig, BackendState, ModuleSpec
from .circuit import FilterParams, LoadKind, LoadSpec, SimTrace, simulate, simulate_dc_stage
from .metrics import FET_DEFAULT, IGBT_DEFAULT, DeviceLossParams, MetricsReport, evaluate
from .reference import PhaseTriple, ReferenceState, Sector, Strategy
from .scenario import Scenario, load_scenario, parse_scenario, serialize_scenario

__version__ = "0.1.0"

__all__ = [
    "BackendConfig", "BackendState", "ModuleSpec", "FilterParams", "LoadKind", "LoadSpec",
    "SimTrace", "simulate", "simulate_dc_stage", "FET_DEFAULT", "IGBT_DEFAULT",
    "DeviceLossParams", "MetricsReport", "evaluate", "PhaseTriple", "ReferenceState", "Sector",
    "Strategy", "Scenario", "load_scenario", "parse_scenario", "serialize_scenario",
]
