"""Declarative scenario configs, named presets, and the run pipeline.

A scenario is one model + engine + grid + analyses, serialized as TOML.
Running one writes <name>.csv (fixed column schema, 17 significant
digits, LF endings) and <name>.json (summary with final-time values,
violation count, and Monte Carlo probe results).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:
    import tomli as _toml

from . import flows, tensorops
from .dynamics import (
    TimeGrid,
    evolve_bloch_spin_boson,
    evolve_lindblad,
    evolve_von_neumann,
    qubit_propagator,
)
from .haar import ProbeSetup, mc_probe_oracle, probe_closed_V, probe_closed_rho
from .linalg import dag, trace
from .measurement import measure_nonselective_schedule, spectral_basis
from .models import (
    ModelSpec,
    TimeFunction,
    bloch_state,
    bloch_vector,
    build_model,
    spin_boson_bloch_matrix,
)
from .uncertainty import (
    entropy_heat_probe_spin_boson,
    commutator_probe,
    qubit_battery_bound_exact,
    qw_bound_two_oscillators,
    qw_bound_two_spins,
    rs_report,
    sigma_u_bounds,
    sigma_udot_window,
    spin_boson_report,
)

logger = logging.getLogger(__name__)

ENGINES = ("von_neumann", "lindblad", "qubit_exact", "bloch")
ANALYSES = (
    "flows",
    "qur_pairs",
    "battery",
    "measurement_schedule",
    "haar_probe",
    "entropy_rate",
)
ENGINE_COMPAT = {
    "two_spins": ("von_neumann",),
    "two_oscillators": ("von_neumann",),
    "qubit_battery": ("qubit_exact",),
    "spin_boson": ("lindblad", "bloch"),
}
ANALYSIS_COMPAT = {
    "flows": ("two_spins", "two_oscillators"),
    "qur_pairs": ("two_spins", "two_oscillators"),
    "battery": ("qubit_battery", "spin_boson"),
    "measurement_schedule": ("qubit_battery",),
    "haar_probe": ("qubit_battery",),
    "entropy_rate": ("spin_boson",),
}
VIOLATION_TOL = 1e-9
TAIL_LEVELS = 5
TAIL_THRESHOLD = 1e-8


class ConfigError(ValueError):
    """Raised for malformed or inconsistent scenario configs."""


@dataclass(frozen=True)
class InitialState:
    """Named initial condition: computational label, Bloch vector, or Fock levels."""

    kind: str
    label: str = ""
    vector: tuple = ()
    levels: tuple = ()


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: ModelSpec
    engine: str
    grid: TimeGrid
    initial_state: InitialState
    analyses: tuple
    output_path: str = "."
    rng_seed: int = 1234
    measurement_times: tuple = ()
    haar_n_samples: int = 10000
    haar_twirl_target: str = "rho_S"


@dataclass(frozen=True)
class RunResult:
    exit_code: int
    violations: int
    csv_path: Path
    json_path: Path


def validate_config(config: ScenarioConfig) -> list[str]:
    """Return a list of problems; empty means the config is runnable."""
    problems: list[str] = []
    if config.engine not in ENGINES:
        problems.append(f"unknown engine {config.engine!r}")
    elif config.engine not in ENGINE_COMPAT[config.model.model]:
        problems.append(
            f"engine {config.engine!r} incompatible with model {config.model.model!r}"
        )
    for a in config.analyses:
        if a not in ANALYSES:
            problems.append(f"unknown analysis {a!r}")
        elif config.model.model not in ANALYSIS_COMPAT[a]:
            problems.append(f"analysis {a!r} incompatible with model {config.model.model!r}")
    if "measurement_schedule" in config.analyses:
        times = config.measurement_times
        if not times:
            problems.append("measurement_schedule requires measurement times")
        elif list(times) != sorted(times):
            problems.append("measurement times must be sorted ascending")
        else:
            for t_m in times:
                if not (config.grid.t_start < t_m < config.grid.t_end):
                    problems.append(f"measurement time {t_m} outside the grid interior")
    if "haar_probe" in config.analyses:
        if config.haar_n_samples < 100:
            problems.append("haar n_samples must be at least 100")
        if config.haar_twirl_target not in ("rho_S", "V_S", "V_E"):
            problems.append(f"unknown twirl target {config.haar_twirl_target!r}")
    problems.extend(_validate_initial_state(config))
    if not config.output_path:
        problems.append("output_path must be nonempty")
    return problems


def _validate_initial_state(config: ScenarioConfig) -> list[str]:
    init = config.initial_state
    model = config.model.model
    if init.kind == "computational":
        if model != "two_spins":
            return [f"computational initial state not defined for {model!r}"]
        if len(init.label) != 2 or any(c not in "ud" for c in init.label):
            return [f"computational label must be two of 'u'/'d', got {init.label!r}"]
    elif init.kind == "fock":
        if model != "two_oscillators":
            return [f"fock initial state not defined for {model!r}"]
        cutoff = config.model.fock_cutoff or 0
        if len(init.levels) != 2 or any(
            not (0 <= int(n) < cutoff) for n in init.levels
        ):
            return [f"fock levels must be two integers in [0, {cutoff}), got {init.levels!r}"]
    elif init.kind == "bloch":
        if model not in ("qubit_battery", "spin_boson"):
            return [f"bloch initial state not defined for {model!r}"]
        if len(init.vector) != 3:
            return ["bloch vector must have three components"]
        if float(np.linalg.norm(np.asarray(init.vector, dtype=float))) > 1.0 + 1e-9:
            return ["bloch vector must have norm <= 1"]
    else:
        return [f"unknown initial state kind {init.kind!r}"]
    return []


# ---------------------------------------------------------------------------
# TOML parsing and emission


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    try:
        config = _config_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    problems = validate_config(config)
    if problems:
        raise ConfigError("; ".join(problems))
    return config


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def _config_from_dict(data: dict) -> ScenarioConfig:
    known = {
        "name",
        "engine",
        "output_path",
        "rng_seed",
        "analyses",
        "model",
        "grid",
        "initial_state",
        "measurement",
        "haar",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    model_tbl = dict(data["model"])
    drive_tbl = model_tbl.pop("drive", None)
    drive = TimeFunction(**drive_tbl) if drive_tbl else None
    spec = ModelSpec(
        model=model_tbl.pop("kind"),
        parameters=dict(model_tbl.pop("parameters", {})),
        drive=drive,
        fock_cutoff=model_tbl.pop("fock_cutoff", None),
    )
    if model_tbl:
        raise ConfigError(f"unknown model keys: {sorted(model_tbl)}")
    grid_tbl = data["grid"]
    grid = TimeGrid(
        t_start=float(grid_tbl["t_start"]),
        t_end=float(grid_tbl["t_end"]),
        n_steps=int(grid_tbl["n_steps"]),
    )
    init_tbl = dict(data["initial_state"])
    init = InitialState(
        kind=init_tbl.pop("kind"),
        label=init_tbl.pop("label", ""),
        vector=tuple(float(x) for x in init_tbl.pop("vector", ())),
        levels=tuple(int(n) for n in init_tbl.pop("levels", ())),
    )
    if init_tbl:
        raise ConfigError(f"unknown initial_state keys: {sorted(init_tbl)}")
    measurement = data.get("measurement", {})
    haar_tbl = data.get("haar", {})
    return ScenarioConfig(
        name=str(data["name"]),
        model=spec,
        engine=str(data["engine"]),
        grid=grid,
        initial_state=init,
        analyses=tuple(data.get("analyses", ())),
        output_path=str(data.get("output_path", ".")),
        rng_seed=int(data.get("rng_seed", 1234)),
        measurement_times=tuple(float(t) for t in measurement.get("times", ())),
        haar_n_samples=int(haar_tbl.get("n_samples", 10000)),
        haar_twirl_target=str(haar_tbl.get("twirl_target", "rho_S")),
    )


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to TOML")


def serialize_config(config: ScenarioConfig) -> str:
    """Emit the TOML text that parse_config maps back to an equal config."""
    lines = [
        f"name = {_toml_scalar(config.name)}",
        f"engine = {_toml_scalar(config.engine)}",
        f"output_path = {_toml_scalar(config.output_path)}",
        f"rng_seed = {_toml_scalar(config.rng_seed)}",
        f"analyses = {_toml_scalar(list(config.analyses))}",
        "",
        "[model]",
        f"kind = {_toml_scalar(config.model.model)}",
    ]
    if config.model.fock_cutoff is not None:
        lines.append(f"fock_cutoff = {_toml_scalar(config.model.fock_cutoff)}")
    lines += ["", "[model.parameters]"]
    for key, value in config.model.parameters.items():
        lines.append(f"{key} = {_toml_scalar(value)}")
    if config.model.drive is not None:
        d = config.model.drive
        lines += [
            "",
            "[model.drive]",
            f"kind = {_toml_scalar(d.kind)}",
            f"amplitude = {_toml_scalar(d.amplitude)}",
            f"rate = {_toml_scalar(d.rate)}",
            f"offset = {_toml_scalar(d.offset)}",
        ]
    lines += [
        "",
        "[grid]",
        f"t_start = {_toml_scalar(config.grid.t_start)}",
        f"t_end = {_toml_scalar(config.grid.t_end)}",
        f"n_steps = {_toml_scalar(config.grid.n_steps)}",
        "",
        "[initial_state]",
        f"kind = {_toml_scalar(config.initial_state.kind)}",
    ]
    if config.initial_state.kind == "computational":
        lines.append(f"label = {_toml_scalar(config.initial_state.label)}")
    elif config.initial_state.kind == "bloch":
        lines.append(f"vector = {_toml_scalar(list(config.initial_state.vector))}")
    elif config.initial_state.kind == "fock":
        lines.append(f"levels = {_toml_scalar(list(config.initial_state.levels))}")
    if config.measurement_times:
        lines += [
            "",
            "[measurement]",
            f"times = {_toml_scalar(list(config.measurement_times))}",
        ]
    if "haar_probe" in config.analyses:
        lines += [
            "",
            "[haar]",
            f"n_samples = {_toml_scalar(config.haar_n_samples)}",
            f"twirl_target = {_toml_scalar(config.haar_twirl_target)}",
        ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Presets


def _grid_10() -> TimeGrid:
    return TimeGrid(t_start=0.0, t_end=10.0, n_steps=1000)


def _spin_preset(name: str, drive: TimeFunction) -> ScenarioConfig:
    return ScenarioConfig(
        name=name,
        model=ModelSpec(
            model="two_spins", parameters={"g": 1.0, "hbar": 1.0}, drive=drive
        ),
        engine="von_neumann",
        grid=_grid_10(),
        initial_state=InitialState(kind="computational", label="uu"),
        analyses=("flows", "qur_pairs"),
    )


def _oscillator_preset(name: str, drive: TimeFunction) -> ScenarioConfig:
    return ScenarioConfig(
        name=name,
        model=ModelSpec(
            model="two_oscillators",
            parameters={"omega_b": 1.0, "m": 1.0, "g": 1.0, "hbar": 1.0},
            drive=drive,
            fock_cutoff=100,
        ),
        engine="von_neumann",
        grid=_grid_10(),
        initial_state=InitialState(kind="fock", levels=(0, 0)),
        analyses=("flows", "qur_pairs"),
    )


def _battery_preset(name: str, measured: bool) -> ScenarioConfig:
    analyses = ("battery", "measurement_schedule") if measured else ("battery",)
    return ScenarioConfig(
        name=name,
        model=ModelSpec(
            model="qubit_battery",
            parameters={
                "h0": 1.2,
                "h3": 0.2,
                "v0": 0.0,
                "v1": 0.5,
                "v2": 0.6,
                "v3": 0.0,
                "hbar": 1.0,
            },
        ),
        engine="qubit_exact",
        grid=_grid_10(),
        initial_state=InitialState(kind="bloch", vector=(0.0, 0.0, 0.5)),
        analyses=analyses,
        measurement_times=(10.0 / 3.0, 20.0 / 3.0) if measured else (),
    )


def _spin_boson_preset() -> ScenarioConfig:
    b0 = 1.0 / np.sqrt(3.0)
    return ScenarioConfig(
        name="fig6",
        model=ModelSpec(
            model="spin_boson",
            parameters={"alpha1": 1.0, "alpha3": 1.0, "gamma": 0.25, "hbar": 1.0},
        ),
        engine="bloch",
        grid=_grid_10(),
        initial_state=InitialState(kind="bloch", vector=(b0, b0, b0)),
        analyses=("battery", "entropy_rate"),
    )


def _probe_preset() -> ScenarioConfig:
    return ScenarioConfig(
        name="fig7_probe",
        model=ModelSpec(
            model="qubit_battery",
            parameters={
                "h0": 0.0,
                "h3": 0.2,
                "v0": 0.0,
                "v1": 0.5,
                "v2": 0.0,
                "v3": 0.0,
                "hbar": 1.0,
            },
        ),
        engine="qubit_exact",
        grid=_grid_10(),
        initial_state=InitialState(kind="bloch", vector=(0.0, 0.0, 0.5)),
        analyses=("battery", "haar_probe"),
    )


PRESET_BUILDERS = {
    "fig3_left": lambda: _spin_preset(
        "fig3_left", TimeFunction(kind="exp_decay", amplitude=2.0, rate=0.5)
    ),
    "fig3_right": lambda: _spin_preset(
        "fig3_right", TimeFunction(kind="sinusoid_offset", amplitude=1.0, rate=1.0, offset=2.0)
    ),
    "fig4_left": lambda: _oscillator_preset(
        "fig4_left", TimeFunction(kind="exp_decay", amplitude=2.0, rate=0.5)
    ),
    "fig4_right": lambda: _oscillator_preset(
        "fig4_right", TimeFunction(kind="sinusoid_offset", amplitude=1.0, rate=1.0, offset=2.0)
    ),
    "fig5_plain": lambda: _battery_preset("fig5_plain", measured=False),
    "fig5_measured": lambda: _battery_preset("fig5_measured", measured=True),
    "fig6": _spin_boson_preset,
    "fig7_probe": _probe_preset,
}

PRESET_DESCRIPTIONS = {
    "fig3_left": "two spins, f(t) = 2 exp(-t/2), g = hbar = 1, start |uu>, grid [0, 10] x 1000",
    "fig3_right": "two spins, f(t) = sin(t) + 2, g = hbar = 1, start |uu>, grid [0, 10] x 1000",
    "fig4_left": "coupled oscillators, omega_a(t) = 2 exp(-t/2), omega_b = m = g = hbar = 1, cutoff 100, start |0,0>",
    "fig4_right": "coupled oscillators, omega_a(t) = sin(t) + 2, omega_b = m = g = hbar = 1, cutoff 100, start |0,0>",
    "fig5_plain": "kicked qubit battery, h0 = 1.2, h3 = 0.2, v = (0.5, 0.6, 0), beta0 = (0, 0, 0.5)",
    "fig5_measured": (
        "kicked qubit battery with two equally-spaced measurements at t = 10/3 and 20/3, "
        "h0 = 1.2, h3 = 0.2, v = (0.5, 0.6, 0), beta0 = (0, 0, 0.5)"
    ),
    "fig6": "dephasing qubit, alpha1 = alpha3 = hbar = 1, gamma = 0.25, beta0 = (1, 1, 1)/sqrt(3)",
    "fig7_probe": (
        "unitary-averaged probe on the kicked qubit, h0 = 0, h3 = 0.2, v = (0.5, 0, 0), "
        "beta0 = (0, 0, 0.5), Monte Carlo rho twirl"
    ),
}


def preset_names() -> tuple:
    return tuple(PRESET_BUILDERS)


def preset(name: str) -> ScenarioConfig:
    try:
        return PRESET_BUILDERS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_BUILDERS)}"
        ) from None


def list_presets() -> str:
    return "\n".join(f"{name}: {PRESET_DESCRIPTIONS[name]}" for name in PRESET_BUILDERS)


# ---------------------------------------------------------------------------
# Running


def _initial_vector(config: ScenarioConfig, dim_total: int) -> np.ndarray:
    init = config.initial_state
    psi = np.zeros(dim_total, dtype=np.complex128)
    if init.kind == "computational":
        index = int("".join("0" if c == "u" else "1" for c in init.label), 2)
    else:
        cutoff = config.model.fock_cutoff
        index = int(init.levels[0]) * cutoff + int(init.levels[1])
    psi[index] = 1.0
    return psi


def _evolve(config: ScenarioConfig, parts) -> tuple[np.ndarray, list, np.ndarray | None]:
    """Run the configured engine; returns (times, states, betas or None)."""
    grid = config.grid
    if config.engine == "von_neumann":
        psi0 = _initial_vector(config, parts.dim_total)
        traj = evolve_von_neumann(parts, psi0, grid)
        return traj.times, list(traj.states), None
    rho0 = bloch_state(np.asarray(config.initial_state.vector, dtype=float))
    if config.engine == "lindblad":
        traj = evolve_lindblad(parts, rho0, grid)
        return traj.times, list(traj.states), None
    if config.engine == "qubit_exact":
        if "measurement_schedule" in config.analyses:
            basis = spectral_basis(parts.h_0)
            traj = measure_nonselective_schedule(
                parts, rho0, grid, basis, list(config.measurement_times)
            )
            return traj.times, list(traj.states), None
        states = []
        for t in grid.times:
            u = qubit_propagator(parts, float(t))
            states.append(u @ rho0 @ dag(u))
        return grid.times, states, None
    betas = evolve_bloch_spin_boson(
        alpha1=parts.params["alpha1"],
        alpha3=parts.params["alpha3"],
        gamma=parts.params["gamma"],
        hbar=parts.hbar,
        beta0=np.asarray(config.initial_state.vector, dtype=float),
        grid=grid,
    )
    states = [bloch_state(b) for b in betas]
    return grid.times, states, betas


class _Accumulator:
    """Ordered column store with a violation counter."""

    def __init__(self):
        self.columns: dict[str, list[float]] = {}
        self.violations = 0

    def add(self, name: str, value: float):
        self.columns.setdefault(name, []).append(float(value))

    def check(self, ok: bool):
        if not ok:
            self.violations += 1


def _base_columns(acc: _Accumulator, parts, times, states, betas, analyses):
    from .tensorops import KronOp

    if betas is not None:
        for b in betas:
            acc.add("exp_beta_1", b[0])
            acc.add("exp_beta_2", b[1])
            acc.add("exp_beta_3", b[2])
    elif states and np.asarray(states[0]).ndim == 1:
        if "flows" in analyses or "qur_pairs" in analyses:
            return
        dims = (parts.dim_s, parts.dim_e)
        for t, psi in zip(times, states):
            op = KronOp.from_terms([(1.0, parts.h_s(float(t)), None)], dims)
            acc.add("exp_u", tensorops.expect(op, psi))
    else:
        for rho in states:
            b = bloch_vector(rho)
            acc.add("exp_beta_1", b[0])
            acc.add("exp_beta_2", b[1])
            acc.add("exp_beta_3", b[2])


def _flow_columns(acc: _Accumulator, parts, times, states, with_pairs: bool):
    g = parts.params["g"]
    hbar = parts.hbar
    for t, psi in zip(times, states):
        t = float(t)
        ops = flows.flow_ops_hamiltonian(parts, t)
        named = (("u", ops.u), ("udot", ops.u_dot), ("qdot", ops.q_dot), ("wdot", ops.w_dot))
        variances = {}
        for name, op in named:
            acc.add(f"exp_{name}", tensorops.expect(op, psi))
            var = tensorops.variance(op, psi)
            variances[name] = var
            acc.add(f"var_{name}", var)
            acc.check(var >= -VIOLATION_TOL)
        if not with_pairs:
            continue
        rep = rs_report(ops.q_dot, ops.w_dot, psi)
        acc.add("cov_qdot_wdot", rep.cov_ab)
        acc.add("comm_qdot_wdot", rep.comm_term)
        acc.add("bound_qdot_wdot", rep.rs_bound)
        acc.check(rep.slack >= -VIOLATION_TOL)
        value = parts.drive.value(t)
        slope = parts.drive.derivative(t)
        if parts.model == "two_spins":
            cf = qw_bound_two_spins(value, slope, g, hbar, psi) ** 2
        else:
            cf = qw_bound_two_oscillators(
                value, slope, g, parts.params["m"], hbar, psi, parts
            )
        acc.add("bound_qdot_wdot_cf", cf)
        lower, upper = sigma_udot_window(ops.q_dot, ops.w_dot, psi)
        acc.add("bound_udot_lower", lower)
        acc.add("bound_udot_upper", upper)
        acc.check(lower - variances["udot"] <= VIOLATION_TOL)
        acc.check(variances["udot"] - upper <= VIOLATION_TOL)
        via = sigma_u_bounds(ops.u, ops.q_dot, ops.w_dot, ops.u_dot, psi)
        for name, bound in zip(("udot", "qdot", "wdot"), via):
            acc.add(f"bound_u_{name}", bound)
            acc.check(bound - variances["u"] <= VIOLATION_TOL)


def _battery_columns(acc: _Accumulator, parts, times, states):
    hbar = parts.hbar
    for t, rho in zip(times, states):
        t = float(t)
        if parts.model == "qubit_battery":
            ops = flows.battery_ops_closed(parts, t)
        else:
            ops = flows.battery_ops_open(parts, t)
        rep = rs_report(ops.e_b, ops.p_b, rho)
        acc.add("exp_e_b", tensorops.expect(ops.e_b, rho))
        acc.add("exp_p_b", tensorops.expect(ops.p_b, rho))
        acc.add("var_e_b", rep.var_a)
        acc.add("var_p_b", rep.var_b)
        acc.add("cov_e_b_p_b", rep.cov_ab)
        acc.add("comm_e_b_p_b", rep.comm_term)
        acc.add("bound_e_b_p_b", rep.rs_bound)
        acc.check(rep.var_a >= -VIOLATION_TOL)
        acc.check(rep.var_b >= -VIOLATION_TOL)
        acc.check(rep.slack >= -VIOLATION_TOL)
        beta = bloch_vector(rho)
        if parts.model == "qubit_battery":
            cf = qubit_battery_bound_exact(
                parts.params["h3"],
                np.array([parts.params["v1"], parts.params["v2"], parts.params["v3"]]),
                beta,
                parts.extras["alpha_vec"],
                0.0,
                hbar,
            )
            acc.add("comm_e_b_p_b_cf", cf)
        else:
            sb = spin_boson_report(
                parts.params["alpha1"],
                parts.params["alpha3"],
                parts.params["gamma"],
                hbar,
                beta,
            )
            acc.add("bound_e_b_p_b_cf", sb.rs_bound)


def _entropy_columns(acc: _Accumulator, parts, times, states):
    for t, rho in zip(times, states):
        t = float(t)
        op_s, value = flows.entropy_rate_superoperator(parts, rho, t)
        acc.add("exp_entropy_rate", value)
        q_op = flows.dissipator_adjoint(parts.lindblad_ops, parts.h_s(t))
        acc.add("comm_qdot_sdot", commutator_probe(q_op, op_s, rho))
        acc.add("comm_qdot_sdot_cf", entropy_heat_probe_spin_boson(parts, rho))


def _haar_columns(acc: _Accumulator, config: ScenarioConfig, parts, states):
    v_mat = parts.v_s(1.0)
    tr_v = float(np.real(trace(v_mat)))
    tr_v2 = float(np.real(trace(v_mat @ v_mat)))
    for rho in states:
        acc.add(
            "exp_probe_v_cf",
            probe_closed_V(parts.h_0, rho, tr_v2, parts.dim_s, parts.hbar, trace_v=tr_v),
        )
    rho0 = states[0]
    purity = float(np.real(trace(rho0 @ rho0)))
    closed = probe_closed_rho(parts.h_0, v_mat, purity, parts.dim_s, parts.hbar)
    setup = ProbeSetup(h_0=parts.h_0, v_s=v_mat, rho_s=rho0, hbar=parts.hbar)
    mean, se = mc_probe_oracle(
        setup, config.haar_twirl_target, config.haar_n_samples, config.rng_seed
    )
    return {"mean": mean, "se": se}, {"probe_rho_cf": closed}


def _truncation_window_end(times, states, cutoff: int) -> float:
    """Last time before leaked population at the top Fock levels exceeds threshold."""
    levels = min(TAIL_LEVELS, cutoff - 1)
    for i, psi in enumerate(states):
        grid_psi = np.abs(np.asarray(psi).reshape(cutoff, cutoff)) ** 2
        tail = max(grid_psi[cutoff - levels :, :].sum(), grid_psi[:, cutoff - levels :].sum())
        if tail > TAIL_THRESHOLD:
            return float(times[max(i - 1, 0)])
    return float(times[-1])


def _config_params(config: ScenarioConfig) -> dict:
    drive = config.model.drive
    return {
        "model": config.model.model,
        "engine": config.engine,
        "parameters": dict(config.model.parameters),
        "drive": None
        if drive is None
        else {
            "kind": drive.kind,
            "amplitude": drive.amplitude,
            "rate": drive.rate,
            "offset": drive.offset,
        },
        "fock_cutoff": config.model.fock_cutoff,
        "grid": {
            "t_start": config.grid.t_start,
            "t_end": config.grid.t_end,
            "n_steps": config.grid.n_steps,
        },
        "initial_state": {
            "kind": config.initial_state.kind,
            "label": config.initial_state.label,
            "vector": list(config.initial_state.vector),
            "levels": list(config.initial_state.levels),
        },
        "analyses": list(config.analyses),
        "rng_seed": config.rng_seed,
    }


def run_scenario(config: ScenarioConfig, out_dir=None) -> RunResult:
    """Run one scenario; write <name>.csv and <name>.json; return the result.

    Exit code 0 when all row-wise invariants hold, 3 when any variance or
    bound is violated beyond tolerance (outputs are still written so the
    violation can be inspected). Config and integration errors raise
    ConfigError and IntegrationError for the CLI to map to codes 1 and 2.
    """
    problems = validate_config(config)
    if problems:
        raise ConfigError("; ".join(problems))
    parts = build_model(config.model)
    logger.info("running scenario %s (%s / %s)", config.name, parts.model, config.engine)
    times, states, betas = _evolve(config, parts)

    acc = _Accumulator()
    _base_columns(acc, parts, times, states, betas, config.analyses)
    haar_summary = None
    finals_extra: dict = {}
    if "qur_pairs" in config.analyses:
        _flow_columns(acc, parts, times, states, with_pairs=True)
    elif "flows" in config.analyses:
        _flow_columns(acc, parts, times, states, with_pairs=False)
    for analysis in config.analyses:
        if analysis == "battery":
            _battery_columns(acc, parts, times, states)
        elif analysis == "entropy_rate":
            _entropy_columns(acc, parts, times, states)
        elif analysis == "haar_probe":
            haar_summary, finals_extra = _haar_columns(acc, config, parts, states)

    if parts.model == "two_oscillators":
        finals_extra["truncation_window_end"] = _truncation_window_end(
            times, states, config.model.fock_cutoff
        )
    if parts.model == "spin_boson":
        gamma_matrix = spin_boson_bloch_matrix(
            parts.params["alpha1"], parts.params["alpha3"], parts.params["gamma"], parts.hbar
        )
        eigs = sorted(np.linalg.eigvals(gamma_matrix), key=lambda z: (z.real, z.imag))
        finals_extra["generator_eigenvalues"] = [[z.real, z.imag] for z in eigs]
        finals_extra["sigma_p_infinity"] = 2.0 * abs(parts.params["alpha1"]) * float(
            np.sqrt(parts.params["gamma"] ** 2 + parts.params["alpha3"] ** 2 / parts.hbar**2)
        )

    out = Path(out_dir) if out_dir is not None else Path(config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{config.name}.csv"
    json_path = out / f"{config.name}.json"
    _write_csv(csv_path, times, acc.columns)
    finals = {name: values[-1] for name, values in acc.columns.items()}
    finals.update(finals_extra)
    summary = {
        "preset": config.name,
        "params": _config_params(config),
        "violations": acc.violations,
        "finals": finals,
        "haar": haar_summary,
    }
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    exit_code = 3 if acc.violations else 0
    if acc.violations:
        logger.error("%d bound violations in scenario %s", acc.violations, config.name)
    return RunResult(
        exit_code=exit_code, violations=acc.violations, csv_path=csv_path, json_path=json_path
    )


def _write_csv(path: Path, times, columns: dict):
    names = list(columns)
    for name in names:
        if len(columns[name]) != len(times):
            raise ValueError(f"column {name} length mismatch")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + names) + "\n")
        for i, t in enumerate(times):
            row = [f"{float(t):.16e}"] + [f"{columns[n][i]:.16e}" for n in names]
            fh.write(",".join(row) + "\n")
