"""Time evolution engines.

Four engines cover the example systems: adaptive unitary integration of
the Liouville equation (with an internal state-vector fast path for pure
initial states), Lindblad propagation, the exact step-switched qubit
propagator, and the closed-form Bloch-vector solution of the dephasing
qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import linalg
from .models import HamiltonianParts, spin_boson_bloch_matrix
from .tensorops import KronOp

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-11
TRACE_TOL = 1e-8
POSITIVITY_FLOOR = -1e-6
MAX_DENSE_DIM = 512


class IntegrationError(RuntimeError):
    """Raised when an engine cannot meet its accuracy or validity contract."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform output grid; n_steps is the number of grid points."""

    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_steps)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_steps - 1)


@dataclass
class Trajectory:
    """Time series of states; kind is "density" or "pure" (state vectors)."""

    times: np.ndarray
    states: list
    kind: str

    def density(self, i: int) -> np.ndarray:
        s = self.states[i]
        if self.kind == "pure":
            return np.outer(s, np.conjugate(s))
        return s


def _tols(tol) -> tuple[float, float]:
    if tol is None:
        return DEFAULT_RTOL, DEFAULT_ATOL
    return float(tol), float(tol) * 1e-2


def _dense_h_tot(parts: HamiltonianParts):
    if parts.dim_e is None:
        return lambda t: parts.h_s(t)
    eye_s = np.eye(parts.dim_s, dtype=np.complex128)
    eye_e = np.eye(parts.dim_e, dtype=np.complex128)
    v = parts.v_se.as_matrix() if isinstance(parts.v_se, KronOp) else parts.v_se
    static = np.kron(eye_s, parts.h_e) + (0 if v is None else v)

    def h_tot(t: float) -> np.ndarray:
        return np.kron(parts.h_s(t), eye_e) + static

    return h_tot


def _structured_h_apply(parts: HamiltonianParts):
    """H_tot(t) psi for bipartite parts, never materializing the full matrix."""
    h_e_diag = parts.extras.get("h_e_diag")
    h_e_t = None if parts.h_e is None else parts.h_e.T.copy()
    if parts.v_se is None:
        v_terms = ()
    elif isinstance(parts.v_se, KronOp):
        v_terms = parts.v_se.terms
    else:
        raise ValueError("structured evolution requires v_se as a KronOp")

    def apply_h(t: float, psi: np.ndarray) -> np.ndarray:
        out = parts.h_s(t) @ psi
        if h_e_diag is not None:
            out += psi * h_e_diag[None, :]
        elif h_e_t is not None:
            out += psi @ h_e_t
        for c, a, b in v_terms:
            term = psi if a is None else a @ psi
            if b is not None:
                term = term @ b.T
            out += c * term
        return out

    return apply_h


def _run_ivp(rhs, y0: np.ndarray, times: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        y0,
        t_eval=times,
        method="RK45",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationError(f"integrator failed: {sol.message}")
    return sol.y


def _drift_limit(rtol: float) -> float:
    """Permitted norm/trace drift: local integrator error accumulates over
    thousands of steps, so the guard scales with the requested tolerance."""
    return max(TRACE_TOL, 200.0 * rtol)


def _check_pure(states: list[np.ndarray], limit: float = TRACE_TOL) -> None:
    for k, psi in enumerate(states):
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > limit:
            raise IntegrationError(f"norm drift {drift:.3e} at output index {k}")


def _check_density(
    states: list[np.ndarray],
    limit: float = TRACE_TOL,
    psd_floor: float = POSITIVITY_FLOOR,
) -> None:
    for k, rho in enumerate(states):
        drift = abs(np.trace(rho) - 1.0)
        if drift > limit:
            raise IntegrationError(f"trace drift {drift:.3e} at output index {k}")
        herm = np.linalg.norm(rho - linalg.dag(rho))
        if herm > limit:
            raise IntegrationError(f"hermiticity drift {herm:.3e} at output index {k}")
        if np.linalg.eigvalsh((rho + linalg.dag(rho)) / 2.0)[0] < psd_floor:
            raise IntegrationError(f"positivity violated at output index {k}")


def evolve_von_neumann(
    parts: HamiltonianParts, rho0: np.ndarray, grid: TimeGrid, tol: float | None = None
) -> Trajectory:
    """Unitary evolution under H_tot(t).

    rho0 may be a density matrix (integrates the Liouville equation) or a
    state vector (integrates the Schrodinger equation; required for large
    truncated spaces where density matrices do not fit in memory).
    """
    rtol, atol = _tols(tol)
    times = grid.times
    hbar = parts.hbar
    y0 = np.asarray(rho0, dtype=np.complex128)

    if y0.ndim == 1:
        structured = (
            parts.dim_e is not None
            and parts.dim_e > 1
            and (parts.v_se is None or isinstance(parts.v_se, KronOp))
        )
        if structured:
            apply_h = _structured_h_apply(parts)
            d_s, d_e = parts.dim_s, parts.dim_e

            def rhs(t, y):
                psi = y.reshape(d_s, d_e)
                return (-1j / hbar) * apply_h(t, psi).ravel()

        else:
            if y0.shape[0] > MAX_DENSE_DIM:
                raise IntegrationError(
                    f"dense H at dimension {y0.shape[0]} exceeds the dense limit; "
                    "provide v_se as a KronOp for structured evolution"
                )
            h_tot = _dense_h_tot(parts)

            def rhs(t, y):
                return (-1j / hbar) * (h_tot(t) @ y)

        ys = _run_ivp(rhs, y0.ravel(), times, rtol, atol)
        states = [np.ascontiguousarray(ys[:, k]) for k in range(len(times))]
        _check_pure(states, _drift_limit(rtol))
        return Trajectory(times=times, states=states, kind="pure")

    d = y0.shape[0]
    if d > MAX_DENSE_DIM:
        raise IntegrationError(
            f"density-matrix integration at dimension {d} exceeds the dense limit; "
            "pass a pure state vector instead"
        )
    h_tot = _dense_h_tot(parts)

    def rhs(t, y):
        rho = y.reshape(d, d)
        return (-1j / hbar) * linalg.commutator(h_tot(t), rho).ravel()

    ys = _run_ivp(rhs, y0.ravel(), times, rtol, atol)
    states = [np.ascontiguousarray(ys[:, k].reshape(d, d)) for k in range(len(times))]
    _check_density(states, _drift_limit(rtol))
    return Trajectory(times=times, states=states, kind="density")


def lindblad_dissipator(lindblad_ops, rho: np.ndarray) -> np.ndarray:
    """Schrodinger-picture dissipator sum_k gamma_k (L rho L+ - 0.5 {L+L, rho})."""
    out = np.zeros_like(np.asarray(rho, dtype=np.complex128))
    for gamma_k, l_op in lindblad_ops:
        ld = linalg.dag(l_op)
        ldl = ld @ l_op
        out += gamma_k * (l_op @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def evolve_lindblad(
    parts: HamiltonianParts, rho0: np.ndarray, grid: TimeGrid, tol: float | None = None
) -> Trajectory:
    if not parts.lindblad_ops:
        raise ValueError("evolve_lindblad requires lindblad_ops")
    rtol, atol = _tols(tol)
    times = grid.times
    hbar = parts.hbar
    d = np.asarray(rho0).shape[0]
    ops = parts.lindblad_ops

    def rhs(t, y):
        rho = y.reshape(d, d)
        drho = (-1j / hbar) * linalg.commutator(parts.h_s(t), rho)
        drho += lindblad_dissipator(ops, rho)
        return drho.ravel()

    ys = _run_ivp(rhs, np.asarray(rho0, dtype=np.complex128).ravel(), times, rtol, atol)
    states = [np.ascontiguousarray(ys[:, k].reshape(d, d)) for k in range(len(times))]
    _check_density(states, _drift_limit(rtol))
    return Trajectory(times=times, states=states, kind="density")


def qubit_propagator(parts: HamiltonianParts, t: float) -> np.ndarray:
    """Exact propagator of the step-switched qubit battery for elapsed time t >= 0."""
    from .models import SIGMA_0, pauli_combination

    alpha0 = parts.extras["alpha0"]
    alpha_vec = parts.extras["alpha_vec"]
    hbar = parts.hbar
    a = float(np.linalg.norm(alpha_vec))
    phase = np.exp(-1j * alpha0 * t / hbar)
    if a == 0.0:
        return phase * SIGMA_0
    angle = a * t / hbar
    n_sigma = pauli_combination(0.0, alpha_vec / a)
    return phase * (np.cos(angle) * SIGMA_0 - 1j * np.sin(angle) * n_sigma)


def evolve_qubit_exact(parts: HamiltonianParts, rho0, t: float) -> np.ndarray:
    """rho(t) = U rho0 U+ with the exact qubit propagator.

    rho0 may be a 2x2 density matrix or a Bloch 3-vector.
    """
    if parts.model != "qubit_battery":
        raise ValueError("evolve_qubit_exact requires the qubit_battery model")
    rho0 = np.asarray(rho0)
    if rho0.ndim == 1 and rho0.shape[0] == 3:
        from .models import bloch_state

        rho0 = bloch_state(rho0.real)
    u = qubit_propagator(parts, t)
    return u @ rho0 @ linalg.dag(u)


def evolve_bloch_spin_boson(
    alpha1: float,
    alpha3: float,
    gamma: float,
    hbar: float,
    beta0: np.ndarray,
    grid: TimeGrid,
) -> np.ndarray:
    """Closed-form Bloch trajectory of the dephasing qubit.

    The equation of motion is d beta / dt = -2 Gamma beta with Gamma from
    spin_boson_bloch_matrix; the solution is computed by eigendecomposition
    of Gamma, falling back to direct integration if Gamma is defective.
    Returns an array of shape (n_steps, 3).
    """
    beta0 = np.asarray(beta0, dtype=float)
    times = grid.times
    generator = 2.0 * spin_boson_bloch_matrix(alpha1, alpha3, gamma, hbar)
    w, v = np.linalg.eig(generator)
    use_eig = np.linalg.cond(v) < 1e10
    if use_eig:
        coeffs = np.linalg.solve(v, beta0.astype(complex))
        decay = np.exp(-np.outer(w, times - times[0]))
        return np.ascontiguousarray((v @ (decay * coeffs[:, None])).T.real)

    def rhs(t, y):
        return -generator @ y

    sol = solve_ivp(rhs, (times[0], times[-1]), beta0, t_eval=times, rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise IntegrationError(f"Bloch integration failed: {sol.message}")
    return np.ascontiguousarray(sol.y.T)


def finite_difference(values: np.ndarray, dt: float, order: int = 4) -> np.ndarray:
    """Derivative of a uniformly sampled series.

    order 2: central differences with one-sided second-order edges.
    order 4: five-point central stencil with one-sided fourth-order
    stencils at the two points nearest each edge.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 5:
        raise ValueError("need a 1-d series of at least 5 samples")
    d = np.empty_like(v)
    if order == 2:
        d[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
        d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dt)
        return d
    if order != 4:
        raise ValueError("order must be 2 or 4")
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * dt)
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * dt)
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * dt)
    d[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * dt)
    d[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * dt)
    return d
