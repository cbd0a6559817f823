"""Thermodynamic flow operators and battery operators.

The work-flow operator is the explicit time derivative of the system
Hamiltonian; the heat-flow operator is the commutator with the coupling
(Hamiltonian description) or the adjoint dissipator applied to the
system Hamiltonian (Lindblad description). Their sum tracks the rate of
change of the internal energy U = H_S along the evolution.

Operators act on the joint space when an environment is present (system
operators embedded as A x I), and on the system alone in the Lindblad
description. For large truncated spaces everything is returned in KronOp
form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .models import HamiltonianParts
from .tensorops import KronOp

K_B = 1.0


@dataclass(frozen=True)
class FlowOperators:
    """Work flow, heat flow, their sum, and the internal energy operator."""

    t: float
    w_dot: "np.ndarray | KronOp"
    q_dot: "np.ndarray | KronOp"
    u_dot: "np.ndarray | KronOp"
    u: "np.ndarray | KronOp"


@dataclass(frozen=True)
class BatteryOperators:
    """Battery energy, closed and dissipative power parts, and their sum."""

    t: float
    e_b: np.ndarray
    p_b_c: np.ndarray
    p_b_o: np.ndarray | None
    p_b: np.ndarray


def dissipator_adjoint(lindblad_ops, a: np.ndarray) -> np.ndarray:
    """Heisenberg-picture dissipator sum_k gamma_k (L+ A L - 0.5 {L+L, A})."""
    a = np.asarray(a, dtype=np.complex128)
    out = np.zeros_like(a)
    for gamma_k, l_op in lindblad_ops:
        ld = linalg.dag(l_op)
        ldl = ld @ l_op
        out += gamma_k * (ld @ a @ l_op - 0.5 * (ldl @ a + a @ ldl))
    return out


def flow_ops_hamiltonian(parts: HamiltonianParts, t: float) -> FlowOperators:
    """Flow operators for a system coupled to an explicit environment.

    The heat flow operator is the generic commutator -(i/hbar)[H_S x I, V_SE];
    with this form the first law holds exactly at any Fock truncation
    because [H_S x I, I x H_E] vanishes identically.
    """
    if parts.v_se is None:
        raise ValueError("flow_ops_hamiltonian requires v_se; use flow_ops_lindblad instead")
    hs = parts.h_s(t)
    hsd = parts.h_s_dot(t)
    hbar = parts.hbar
    if isinstance(parts.v_se, KronOp):
        dims = parts.v_se.dims
        w = KronOp.from_terms([(1.0, hsd, None)], dims)
        q = KronOp.from_terms(
            [((-1j / hbar) * c, linalg.commutator(hs, a), b) for c, a, b in parts.v_se.terms],
            dims,
        )
        return FlowOperators(t=t, w_dot=w, q_dot=q, u_dot=w + q, u=KronOp.from_terms([(1.0, hs, None)], dims))
    eye_e = np.eye(parts.dim_e, dtype=np.complex128)
    u = np.kron(hs, eye_e)
    w = np.kron(hsd, eye_e)
    q = (-1j / hbar) * linalg.commutator(u, parts.v_se)
    return FlowOperators(t=t, w_dot=w, q_dot=q, u_dot=w + q, u=u)


def flow_ops_lindblad(parts: HamiltonianParts, t: float) -> FlowOperators:
    """Flow operators in the Lindblad description; all live on the system."""
    if not parts.lindblad_ops:
        raise ValueError("flow_ops_lindblad requires lindblad_ops")
    hs = parts.h_s(t)
    w = parts.h_s_dot(t)
    q = dissipator_adjoint(parts.lindblad_ops, hs)
    return FlowOperators(t=t, w_dot=w, q_dot=q, u_dot=w + q, u=hs)


def entropy_rate_superoperator(
    parts: HamiltonianParts, state: np.ndarray, t: float, eps: float = linalg.LOG_EPS
) -> tuple[np.ndarray, float]:
    """State-dependent entropy-rate pair (operator, value).

    The operator is -k_B D*[log rho]; its expectation on the same state
    equals -k_B Tr(rho_dot log rho) along a Lindblad trajectory (the
    unitary part drops because rho commutes with its own logarithm). The
    operator depends on the state, so the pair is returned explicitly
    rather than pretending the rate is an observable.
    """
    if not parts.lindblad_ops:
        raise ValueError("entropy rate requires lindblad_ops")
    log_rho = linalg.matrix_log_hermitian(state, eps)
    op = -K_B * dissipator_adjoint(parts.lindblad_ops, log_rho)
    value = linalg.expectation(op, state)
    return op, value


def battery_ops_closed(parts: HamiltonianParts, t: float) -> BatteryOperators:
    """Battery energy E_B = H_0 and closed power -(i/hbar)[H_0, V_S(t)]."""
    if parts.h_0 is None or parts.v_s is None:
        raise ValueError("battery operators require h_0 and v_s")
    p_c = (-1j / parts.hbar) * linalg.commutator(parts.h_0, parts.v_s(t))
    return BatteryOperators(t=t, e_b=parts.h_0.copy(), p_b_c=p_c, p_b_o=None, p_b=p_c)


def battery_ops_open(parts: HamiltonianParts, t: float) -> BatteryOperators:
    """Battery operators including the environment contribution.

    Lindblad description: p_b_o is the adjoint dissipator applied to the
    full system Hamiltonian H_S = H_0 + V_S, which is the form whose
    variance and commutator enter the dephasing-qubit energy-power
    analysis. Note the adjoint dissipator is linear, so this equals
    D*[H_0] + D*[V_S], and the heat flow operator satisfies
    q_dot = D*[H_0] + D*[V_S] identically.

    Hamiltonian description: p_b_o = -(i/hbar)[H_0 x I, V_SE] and all
    operators are embedded on the joint space.
    """
    closed = battery_ops_closed(parts, t)
    if parts.lindblad_ops:
        p_o = dissipator_adjoint(parts.lindblad_ops, parts.h_s(t))
        return BatteryOperators(
            t=t, e_b=closed.e_b, p_b_c=closed.p_b_c, p_b_o=p_o, p_b=closed.p_b_c + p_o
        )
    if parts.v_se is None:
        raise ValueError("battery_ops_open requires lindblad_ops or v_se")
    v = parts.v_se.as_matrix() if isinstance(parts.v_se, KronOp) else parts.v_se
    eye_e = np.eye(parts.dim_e, dtype=np.complex128)
    e_b = np.kron(parts.h_0, eye_e)
    p_c = np.kron(closed.p_b_c, eye_e)
    p_o = (-1j / parts.hbar) * linalg.commutator(e_b, v)
    return BatteryOperators(t=t, e_b=e_b, p_b_c=p_c, p_b_o=p_o, p_b=p_c + p_o)
