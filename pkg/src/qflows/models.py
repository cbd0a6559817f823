"""Constructors for the four example systems.

Each builder returns a HamiltonianParts bundle: callables for the
time-dependent system Hamiltonian and its analytic derivative, plus the
static pieces (environment Hamiltonian, coupling, battery reference,
charging potential, jump operators) that the dynamics and flows modules
consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .tensorops import KronOp

SIGMA_0 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pauli_combination(c0: float, v: np.ndarray) -> np.ndarray:
    """c0 * identity + v . (sigma_x, sigma_y, sigma_z)."""
    v = np.asarray(v, dtype=float)
    return c0 * SIGMA_0 + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


def bloch_state(beta: np.ndarray) -> np.ndarray:
    """Qubit density matrix (I + beta . sigma) / 2."""
    beta = np.asarray(beta, dtype=float)
    if np.linalg.norm(beta) > 1.0 + 1e-9:
        raise ValueError(f"Bloch vector has norm {np.linalg.norm(beta):.6f} > 1")
    return pauli_combination(1.0, beta) / 2.0


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array(
        [
            linalg.expectation(SIGMA_X, rho),
            linalg.expectation(SIGMA_Y, rho),
            linalg.expectation(SIGMA_Z, rho),
        ]
    )


@dataclass(frozen=True)
class TimeFunction:
    """Analytic scalar drive with an exact derivative.

    kinds:
        constant:        offset
        exp_decay:       amplitude * exp(-rate * t) + offset
        sinusoid_offset: amplitude * sin(rate * t) + offset
        step:            offset + amplitude * theta(t), theta(0) = 1
    """

    kind: str
    amplitude: float = 0.0
    rate: float = 0.0
    offset: float = 0.0

    KINDS = ("constant", "exp_decay", "sinusoid_offset", "step")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown TimeFunction kind {self.kind!r}")
        for name in ("amplitude", "rate", "offset"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"TimeFunction parameter {name} is not finite")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(self.offset, t.shape).copy() if t.ndim else float(self.offset)
        if self.kind == "exp_decay":
            out = self.amplitude * np.exp(-self.rate * t) + self.offset
        elif self.kind == "sinusoid_offset":
            out = self.amplitude * np.sin(self.rate * t) + self.offset
        else:  # step, active on the closed interval t >= 0
            out = self.offset + self.amplitude * (t >= 0.0)
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exp_decay":
            out = -self.rate * self.amplitude * np.exp(-self.rate * t)
        elif self.kind == "sinusoid_offset":
            out = self.amplitude * self.rate * np.cos(self.rate * t)
        else:  # constant and step have zero derivative on t >= 0
            out = np.zeros_like(t)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of a model instance (CLI-facing)."""

    model: str
    parameters: dict
    drive: TimeFunction | None = None
    fock_cutoff: int | None = None

    MODELS = ("two_spins", "two_oscillators", "qubit_battery", "spin_boson")

    def __post_init__(self):
        if self.model not in self.MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        for k, v in self.parameters.items():
            arr = np.asarray(v, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"model parameter {k} is not finite")
        if self.fock_cutoff is not None and self.fock_cutoff < 2:
            raise ValueError("fock_cutoff must be >= 2")


@dataclass(frozen=True)
class HamiltonianParts:
    """Hamiltonian pieces and metadata for one model instance."""

    model: str
    dim_s: int
    dim_e: int | None
    hbar: float
    h_s: Callable[[float], np.ndarray]
    h_s_dot: Callable[[float], np.ndarray]
    h_e: np.ndarray | None = None
    v_se: "np.ndarray | KronOp | None" = None
    h_0: np.ndarray | None = None
    v_s: Callable[[float], np.ndarray] | None = None
    lindblad_ops: tuple[tuple[float, np.ndarray], ...] | None = None
    drive: TimeFunction | None = None
    params: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def dim_total(self) -> int:
        return self.dim_s * (self.dim_e or 1)


def build_two_spins(f: TimeFunction, g: float, hbar: float = 1.0) -> HamiltonianParts:
    """Driven spin pair: H_S = f(t) sigma_x, H_E = sigma_x, V_SE = g sigma_z x sigma_z."""
    v_se = g * linalg.kron(SIGMA_Z, SIGMA_Z)
    return HamiltonianParts(
        model="two_spins",
        dim_s=2,
        dim_e=2,
        hbar=hbar,
        h_s=lambda t: f.value(t) * SIGMA_X,
        h_s_dot=lambda t: f.derivative(t) * SIGMA_X,
        h_e=SIGMA_X.copy(),
        v_se=v_se,
        drive=f,
        params={"g": g, "hbar": hbar},
    )


def fock_ladder(cutoff: int) -> np.ndarray:
    """Lowering operator on the truncated Fock space."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(np.complex128)


def oscillator_ladder(x: np.ndarray, p: np.ndarray, m: float, omega: float, hbar: float) -> np.ndarray:
    """Lowering operator of the instantaneous frequency, built from fixed x and p."""
    return np.sqrt(m * omega / (2.0 * hbar)) * (x + 1j * p / (m * omega))


def build_two_oscillators(
    omega_a: TimeFunction,
    omega_b: float,
    m: float,
    g: float,
    hbar: float,
    cutoff: int,
) -> HamiltonianParts:
    """Parametrically driven oscillator coupled to a static oscillator.

    Operators are expressed in the fixed Fock basis of the reference
    frequency omega_a(0); x and p are basis-fixed matrices and the
    instantaneous lowering operator is rebuilt from them on demand.
    H_E is taken diagonal (number-basis truncation), which is what keeps
    the truncation error localized to the top levels.
    """
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    omega0 = float(omega_a.value(0.0))
    if omega0 <= 0:
        raise ValueError("omega_a(0) must be positive to define the Fock basis")
    lad = fock_ladder(cutoff)
    x_a = np.sqrt(hbar / (2.0 * m * omega0)) * (lad + linalg.dag(lad))
    p_a = 1j * np.sqrt(m * hbar * omega0 / 2.0) * (linalg.dag(lad) - lad)
    x_b = np.sqrt(hbar / (2.0 * m * omega_b)) * (lad + linalg.dag(lad))
    p_b = 1j * np.sqrt(m * hbar * omega_b / 2.0) * (linalg.dag(lad) - lad)
    kin_a = (p_a @ p_a) / (2.0 * m)
    xsq_a = x_a @ x_a
    h_e_diag = hbar * omega_b * (np.arange(cutoff, dtype=float) + 0.5)

    def h_s(t: float) -> np.ndarray:
        w = omega_a.value(t)
        return kin_a + 0.5 * m * w * w * xsq_a

    def h_s_dot(t: float) -> np.ndarray:
        w = omega_a.value(t)
        wd = omega_a.derivative(t)
        return m * w * wd * xsq_a

    v_se = KronOp.from_terms([(2.0 * g, x_a, x_b)])
    return HamiltonianParts(
        model="two_oscillators",
        dim_s=cutoff,
        dim_e=cutoff,
        hbar=hbar,
        h_s=h_s,
        h_s_dot=h_s_dot,
        h_e=np.diag(h_e_diag).astype(np.complex128),
        v_se=v_se,
        drive=omega_a,
        params={"omega_b": omega_b, "m": m, "g": g, "hbar": hbar, "cutoff": cutoff},
        extras={
            "x_a": x_a,
            "p_a": p_a,
            "x_b": x_b,
            "p_b": p_b,
            "ladder": lad,
            "kin_a": kin_a,
            "xsq_a": xsq_a,
            "h_e_diag": h_e_diag,
        },
    )


def build_qubit_battery(
    h0: float, h3: float, v0: float, v: np.ndarray, hbar: float = 1.0
) -> HamiltonianParts:
    """Qubit battery H_0 = h0 I + h3 sigma_z with step-switched charging potential."""
    v = np.asarray(v, dtype=float)
    h_0 = pauli_combination(h0, np.array([0.0, 0.0, h3]))
    v_s_matrix = pauli_combination(v0, v)
    step = TimeFunction(kind="step", amplitude=1.0)
    alpha0 = h0 + v0
    alpha_vec = np.array([v[0], v[1], h3 + v[2]])

    def v_s(t: float) -> np.ndarray:
        return step.value(t) * v_s_matrix

    def h_s(t: float) -> np.ndarray:
        return h_0 + v_s(t)

    return HamiltonianParts(
        model="qubit_battery",
        dim_s=2,
        dim_e=None,
        hbar=hbar,
        h_s=h_s,
        h_s_dot=lambda t: np.zeros((2, 2), dtype=np.complex128),
        h_0=h_0,
        v_s=v_s,
        drive=step,
        params={"h0": h0, "h3": h3, "v0": v0, "v1": v[0], "v2": v[1], "v3": v[2], "hbar": hbar},
        extras={"alpha0": alpha0, "alpha_vec": alpha_vec},
    )


def build_spin_boson(
    alpha1: float, alpha3: float, gamma: float, hbar: float = 1.0
) -> HamiltonianParts:
    """Dephasing qubit: H_S = alpha3 sigma_z + alpha1 sigma_x, jump operator sigma_z."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    h_0 = alpha3 * SIGMA_Z
    v_s_matrix = alpha1 * SIGMA_X
    h_s_matrix = h_0 + v_s_matrix
    return HamiltonianParts(
        model="spin_boson",
        dim_s=2,
        dim_e=None,
        hbar=hbar,
        h_s=lambda t: h_s_matrix,
        h_s_dot=lambda t: np.zeros((2, 2), dtype=np.complex128),
        h_0=h_0,
        v_s=lambda t: v_s_matrix,
        lindblad_ops=((gamma, SIGMA_Z.copy()),),
        params={"alpha1": alpha1, "alpha3": alpha3, "gamma": gamma, "hbar": hbar},
    )


def spin_boson_bloch_matrix(
    alpha1: float, alpha3: float, gamma: float, hbar: float = 1.0
) -> np.ndarray:
    """Bloch-space matrix Gamma of the dephasing qubit.

    Its eigenvalues set the decay and oscillation rates of the Bloch
    vector. Note the equation of motion carries a factor two:
    d beta / dt = -2 Gamma beta (see evolve_bloch_spin_boson).
    """
    return np.array(
        [
            [gamma, alpha3 / hbar, 0.0],
            [-alpha3 / hbar, gamma, alpha1 / hbar],
            [0.0, -alpha1 / hbar, 0.0],
        ]
    )


def build_model(spec: ModelSpec) -> HamiltonianParts:
    """Build HamiltonianParts from a declarative ModelSpec."""
    p = spec.parameters
    if spec.model == "two_spins":
        if spec.drive is None:
            raise ValueError("two_spins requires a drive TimeFunction")
        return build_two_spins(spec.drive, g=p["g"], hbar=p.get("hbar", 1.0))
    if spec.model == "two_oscillators":
        if spec.drive is None:
            raise ValueError("two_oscillators requires a drive TimeFunction")
        if spec.fock_cutoff is None:
            raise ValueError("two_oscillators requires fock_cutoff")
        return build_two_oscillators(
            spec.drive,
            omega_b=p["omega_b"],
            m=p["m"],
            g=p["g"],
            hbar=p.get("hbar", 1.0),
            cutoff=spec.fock_cutoff,
        )
    if spec.model == "qubit_battery":
        return build_qubit_battery(
            h0=p["h0"],
            h3=p["h3"],
            v0=p.get("v0", 0.0),
            v=np.array([p.get("v1", 0.0), p.get("v2", 0.0), p.get("v3", 0.0)]),
            hbar=p.get("hbar", 1.0),
        )
    return build_spin_boson(
        alpha1=p["alpha1"],
        alpha3=p["alpha3"],
        gamma=p["gamma"],
        hbar=p.get("hbar", 1.0),
    )
