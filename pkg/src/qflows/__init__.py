"""Thermodynamic flow operators, uncertainty bounds, and Haar-averaged probes.

Workflow: build a model (models), evolve it (dynamics), form the flow or
battery observables (flows), and evaluate uncertainty bounds on them
(uncertainty). measurement adds projective schedules, haar the unitary
ensemble averages, and scenario/cli the reproducible CSV/JSON pipeline.
"""

from .dynamics import IntegrationError, TimeGrid, Trajectory
from .flows import (
    BatteryOperators,
    FlowOperators,
    battery_ops_closed,
    battery_ops_open,
    dissipator_adjoint,
    entropy_rate_superoperator,
    flow_ops_hamiltonian,
    flow_ops_lindblad,
)
from .haar import ProbeSetup, TwirlResult, mc_probe_oracle, twirl2
from .measurement import SpectralBasis, dephase, measure_nonselective_schedule, spectral_basis
from .models import HamiltonianParts, ModelSpec, TimeFunction, build_model
from .scenario import ScenarioConfig, parse_config, preset, run_scenario, serialize_config
from .uncertainty import (
    TPlusMinus,
    UncertaintyReport,
    commutator_probe,
    rs_report,
    sigma_u_bounds,
    sigma_udot_window,
    t_plus_minus,
)

__all__ = [
    "BatteryOperators",
    "FlowOperators",
    "HamiltonianParts",
    "IntegrationError",
    "ModelSpec",
    "ProbeSetup",
    "ScenarioConfig",
    "SpectralBasis",
    "TimeFunction",
    "TimeGrid",
    "TPlusMinus",
    "Trajectory",
    "TwirlResult",
    "UncertaintyReport",
    "battery_ops_closed",
    "battery_ops_open",
    "build_model",
    "commutator_probe",
    "dephase",
    "dissipator_adjoint",
    "entropy_rate_superoperator",
    "flow_ops_hamiltonian",
    "flow_ops_lindblad",
    "mc_probe_oracle",
    "measure_nonselective_schedule",
    "parse_config",
    "preset",
    "rs_report",
    "run_scenario",
    "serialize_config",
    "sigma_u_bounds",
    "sigma_udot_window",
    "spectral_basis",
    "t_plus_minus",
    "twirl2",
]

__version__ = "0.1.0"
