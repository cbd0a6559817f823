"""Robertson-Schrodinger bounds and commutator probes for flow observables.

All reported bounds are on products of variances (not standard
deviations) unless a function's docstring says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, tensorops
from .measurement import SpectralBasis, offdiagonal_part, spectral_basis
from .models import SIGMA_X, SIGMA_Y, SIGMA_Z, HamiltonianParts
from .tensorops import KronOp

COHERENCE_AGREEMENT_TOL = 1e-10


@dataclass(frozen=True)
class UncertaintyReport:
    """Two-observable second moments and the Robertson-Schrodinger bound.

    rs_bound = comm_term + cov_ab**2 lower-bounds product = var_a * var_b;
    slack = product - rs_bound is non-negative for valid states.
    """

    var_a: float
    var_b: float
    cov_ab: float
    comm_term: float
    rs_bound: float
    product: float
    slack: float


@dataclass(frozen=True)
class TPlusMinus:
    t_plus: float
    t_minus: float


def _sigma(var: float) -> float:
    return float(np.sqrt(max(var, 0.0)))


def rs_report(a, b, state) -> UncertaintyReport:
    """Robertson-Schrodinger data for observables a, b in the given state."""
    var_a = tensorops.variance(a, state)
    var_b = tensorops.variance(b, state)
    cov_ab = tensorops.covariance_sym(a, b, state)
    comm = tensorops.comm_expectation(a, b, state)
    comm_term = 0.25 * abs(comm) ** 2
    rs_bound = comm_term + cov_ab**2
    product = var_a * var_b
    return UncertaintyReport(
        var_a=var_a,
        var_b=var_b,
        cov_ab=cov_ab,
        comm_term=comm_term,
        rs_bound=rs_bound,
        product=product,
        slack=product - rs_bound,
    )


def qw_bound_two_spins(
    f: float,
    f_dot: float,
    g: float,
    hbar: float,
    state,
    commutator_only: bool = False,
) -> float:
    """Closed-form lower bound on sigma_q * sigma_w for the driven spin pair.

    Evaluates (g/hbar)|d(f^2)/dt| sqrt(<sz sz>^2 + <sy sz>^2 <sx 1>^2)
    at the given state; with commutator_only the covariance contribution
    is dropped, leaving the plain Robertson bound.
    """
    prefactor = (g / hbar) * abs(2.0 * f * f_dot)
    dims = (2, 2)
    zz = tensorops.expect(KronOp.from_terms([(1.0, SIGMA_Z, SIGMA_Z)], dims), state)
    if commutator_only:
        return prefactor * abs(zz)
    yz = tensorops.expect(KronOp.from_terms([(1.0, SIGMA_Y, SIGMA_Z)], dims), state)
    x1 = tensorops.expect(KronOp.from_terms([(1.0, SIGMA_X, None)], dims), state)
    return prefactor * float(np.sqrt(zz**2 + yz**2 * x1**2))


def qw_bound_two_oscillators(
    omega_a: float,
    omega_a_dot: float,
    g: float,
    m: float,
    hbar: float,
    state,
    parts: HamiltonianParts,
    commutator_only: bool = False,
) -> float:
    """Closed-form lower bound on var_q * var_w for coupled oscillators.

    parts supplies the truncated single-mode matrices (extras x_a, p_a,
    x_b) in the fixed factorised basis the state vector lives in.
    """
    x_a = parts.extras["x_a"]
    p_a = parts.extras["p_a"]
    x_b = parts.extras["x_b"]
    dims = (x_a.shape[0], x_b.shape[0])
    kappa = omega_a * omega_a_dot
    v_exp = 2.0 * g * tensorops.expect(KronOp.from_terms([(1.0, x_a, x_b)], dims), state)
    comm_term = hbar**2 * kappa**2 * v_exp**2
    if commutator_only:
        return float(comm_term)
    xsq = x_a @ x_a
    xsq_exp = tensorops.expect(KronOp.from_terms([(1.0, xsq, None)], dims), state)
    pa_xb = tensorops.pair_moment(
        KronOp.from_terms([(1.0, p_a, None)], dims),
        KronOp.from_terms([(1.0, None, x_b)], dims),
        state,
    )
    pxx_xb = 2.0 * g * tensorops.pair_moment(
        KronOp.from_terms([(1.0, p_a, None)], dims),
        KronOp.from_terms([(1.0, xsq, x_b)], dims),
        state,
    )
    inner = 2.0 * g * xsq_exp * pa_xb - 1j * hbar * v_exp - pxx_xb
    return float(comm_term + kappa**2 * abs(inner) ** 2)


def t_plus_minus(q, w, state) -> TPlusMinus:
    """Shifted Robertson-Schrodinger roots controlling the sum-variance window."""
    cov = tensorops.covariance_sym(q, w, state)
    comm = tensorops.comm_expectation(q, w, state)
    root = float(np.sqrt(0.25 * abs(comm) ** 2 + cov**2))
    return TPlusMinus(t_plus=max(root + cov, 0.0), t_minus=max(root - cov, 0.0))


def sigma_udot_window(q, w, state) -> tuple[float, float]:
    """Two-sided window for the variance of the total flow q + w."""
    sig_q = _sigma(tensorops.variance(q, state))
    sig_w = _sigma(tensorops.variance(w, state))
    tpm = t_plus_minus(q, w, state)
    lower = (sig_q - sig_w) ** 2 + 2.0 * tpm.t_plus
    upper = (sig_q + sig_w) ** 2 - 2.0 * tpm.t_minus
    return lower, upper


def _rs_ratio(a, b, state, denominator: float) -> float:
    if denominator <= 0.0:
        return 0.0
    cov = tensorops.covariance_sym(a, b, state)
    comm = tensorops.comm_expectation(a, b, state)
    return (0.25 * abs(comm) ** 2 + cov**2) / denominator


def sigma_u_bounds(u, q, w, u_dot, state) -> tuple[float, float, float]:
    """Three lower bounds on the variance of the stored energy u.

    via_udot divides the (u, u_dot) Robertson-Schrodinger numerator by
    the window upper bound on var(u_dot), so it stays a valid bound
    without measuring var(u_dot) itself. via_qdot and via_wdot divide
    the (u, q) and (u, w) numerators by var(q) and var(w). A vanishing
    denominator yields the vacuous bound 0.
    """
    sig_q = _sigma(tensorops.variance(q, state))
    sig_w = _sigma(tensorops.variance(w, state))
    tpm = t_plus_minus(q, w, state)
    upper = (sig_q + sig_w) ** 2 - 2.0 * tpm.t_minus
    via_udot = _rs_ratio(u, u_dot, state, upper)
    via_qdot = _rs_ratio(u, q, state, sig_q**2)
    via_wdot = _rs_ratio(u, w, state, sig_w**2)
    return via_udot, via_qdot, via_wdot


def commutator_probe(a, b, state) -> float:
    """Lower bound (1/4)|<[a, b]>|^2 on the variance product."""
    comm = tensorops.comm_expectation(a, b, state)
    return 0.25 * abs(comm) ** 2


def coherence_measure(basis: SpectralBasis, b: np.ndarray) -> float:
    """Squared Frobenius weight of b off-diagonal in the given eigenbasis.

    Computed two independent ways (projected off-diagonal part, and the
    commutator sum (1/2) sum_j ||[b, P_j]||_F^2); their agreement is
    enforced to COHERENCE_AGREEMENT_TOL.
    """
    off = offdiagonal_part(b, basis)
    direct = linalg.frobenius_norm_sq(off)
    via_comm = 0.5 * sum(
        linalg.frobenius_norm_sq(linalg.commutator(b, p)) for p in basis.projectors
    )
    scale = max(direct, via_comm, 1.0)
    if abs(direct - via_comm) > COHERENCE_AGREEMENT_TOL * scale:
        raise ValueError(f"coherence measure mismatch: {direct} vs {via_comm}")
    return direct


def probe_upper_bounds(a: np.ndarray, b: np.ndarray, state) -> tuple[float, float]:
    """Upper bounds on the commutator probe (1/4)|<[a, b]>|^2.

    cs_bound applies Cauchy-Schwarz against the coherent part of the
    state in either observable's eigenbasis (the smaller wins);
    coherence_bound caps ||[a, b]||_F^2 by 4 ||a||_F^2 C_a(b) and is an
    operator-level cap, so it bounds 4x the probe.
    """
    rho = np.asarray(state, dtype=np.complex128)
    if rho.ndim == 1:
        rho = np.outer(rho, np.conjugate(rho))
    basis_a = spectral_basis(a)
    basis_b = spectral_basis(b)
    chi_a = offdiagonal_part(rho, basis_a)
    chi_b = offdiagonal_part(rho, basis_b)
    cs_a = 0.25 * linalg.frobenius_norm_sq(linalg.commutator(a, chi_a)) * linalg.frobenius_norm_sq(b)
    cs_b = 0.25 * linalg.frobenius_norm_sq(linalg.commutator(b, chi_b)) * linalg.frobenius_norm_sq(a)
    cs_bound = min(cs_a, cs_b)
    coherence_bound = 4.0 * linalg.frobenius_norm_sq(a) * coherence_measure(basis_a, b)
    return cs_bound, coherence_bound


def bloch_rotate(beta, axis, angle: float) -> np.ndarray:
    """Rodrigues rotation of a Bloch vector about a (not necessarily unit) axis."""
    beta = np.asarray(beta, dtype=float)
    axis = np.asarray(axis, dtype=float)
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        return beta.copy()
    n = axis / norm
    parallel = n * float(n @ beta)
    return parallel + (beta - parallel) * np.cos(angle) + np.cross(n, beta) * np.sin(angle)


def qubit_battery_bound_exact(
    h3: float, v, beta, alpha, t: float, hbar: float = 1.0
) -> float:
    """Commutator probe for the kicked qubit at time t, in closed form.

    beta is the Bloch vector at the kick; alpha the precession axis
    (v1, v2, h3 + v3). The bound is evaluated after rotating beta about
    alpha through 2|alpha|t/hbar.
    """
    v = np.asarray(v, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta_t = bloch_rotate(beta, alpha, 2.0 * float(np.linalg.norm(alpha)) * t / hbar)
    amp = (2.0 * h3**2 / hbar) * (v[0] * beta_t[0] + v[1] * beta_t[1])
    return float(amp**2)


def spin_boson_report(
    alpha1: float, alpha3: float, gamma: float, hbar: float, beta
) -> UncertaintyReport:
    """Closed-form energy/power uncertainty data for the dephasing qubit.

    beta is the current Bloch vector. Observables are the system energy
    alpha3 sz and the heat flow evaluated on the dissipative channel.
    """
    b1, b2, b3 = (float(x) for x in np.asarray(beta, dtype=float))
    g1 = gamma * b1 - alpha3 * b2 / hbar
    var_e = alpha3**2 * (1.0 - b3**2)
    var_p = (2.0 * alpha1) ** 2 * ((gamma**2 + alpha3**2 / hbar**2) - g1**2)
    cov = 2.0 * alpha1 * alpha3 * b3 * g1
    comm_term = (2.0 * alpha1 * alpha3) ** 2 * (alpha3 * b1 / hbar + gamma * b2) ** 2
    rs_bound = comm_term + cov**2
    product = var_e * var_p
    return UncertaintyReport(
        var_a=var_e,
        var_b=var_p,
        cov_ab=cov,
        comm_term=comm_term,
        rs_bound=rs_bound,
        product=product,
        slack=product - rs_bound,
    )


def entropy_heat_probe_spin_boson(
    parts: HamiltonianParts, state: np.ndarray, eps: float = linalg.LOG_EPS
) -> float:
    """Commutator probe between heat flow and entropy flow for the dephasing qubit.

    Closed form gamma^4 |Tr(sz [h_s, log rho] sz rho)|^2, valid because
    the single dissipative channel is sz itself.
    """
    gamma = float(parts.params["gamma"])
    rho = np.asarray(state, dtype=np.complex128)
    if rho.ndim == 1:
        rho = np.outer(rho, np.conjugate(rho))
    h_s = parts.h_s(0.0)
    log_rho = linalg.matrix_log_hermitian(rho, eps=eps)
    inner = linalg.trace(SIGMA_Z @ linalg.commutator(h_s, log_rho) @ SIGMA_Z @ rho)
    return gamma**4 * abs(inner) ** 2
