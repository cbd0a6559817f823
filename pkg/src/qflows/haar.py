"""Unitary ensemble averages of commutator probes, with a Monte Carlo oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

TWIRL_TARGETS = ("rho_S", "V_S", "V_E")


def swap_matrix(d: int) -> np.ndarray:
    """Exchange operator on C^d x C^d: S (u x v) = v x u."""
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


@dataclass(frozen=True)
class TwirlResult:
    """Second-moment average of a bipartite operator over U x U conjugation."""

    lambda_plus: float
    lambda_minus: float
    l_i: float
    l_s: float

    @property
    def as_identity_swap(self) -> tuple[float, float]:
        return self.l_i, self.l_s


def twirl1(a: np.ndarray) -> np.ndarray:
    """First-moment average of U a U^dag: the trace-preserving multiple of identity."""
    a = linalg.as_complex_matrix(a)
    d = a.shape[0]
    return (linalg.trace(a) / d) * np.eye(d, dtype=np.complex128)


def twirl2(g: np.ndarray) -> TwirlResult:
    """Project an operator on C^d x C^d onto the symmetric/antisymmetric sectors.

    The averaged operator is lambda_plus P_+ + lambda_minus P_-, equal to
    l_i I + l_s S in the identity/swap basis.
    """
    g = linalg.as_complex_matrix(g)
    dim = g.shape[0]
    d = int(round(np.sqrt(dim)))
    if d * d != dim:
        raise ValueError(f"operator dimension {dim} is not a perfect square")
    s = swap_matrix(d)
    tr_g = linalg.trace(g)
    tr_gs = linalg.trace(g @ s)
    lam_p = (tr_g + tr_gs) / (d * (d + 1))
    lam_m = (tr_g - tr_gs) / (d * (d - 1))
    for name, val in (("lambda_plus", lam_p), ("lambda_minus", lam_m)):
        if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
            raise ValueError(f"{name} has imaginary part {val.imag:.3e}")
    lam_p, lam_m = lam_p.real, lam_m.real
    return TwirlResult(
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        l_i=(lam_p + lam_m) / 2.0,
        l_s=(lam_p - lam_m) / 2.0,
    )


def swap_coefficient(trace_v_sq: float, trace_v: float, d: int) -> float:
    """Swap weight of the twirl of V x V, from the two trace invariants of V."""
    return (d * trace_v_sq - trace_v**2) / (d * (d**2 - 1))


def purity_swap_coefficient(purity: float, d: int) -> float:
    """Swap weight of the twirl of rho x rho at the given purity."""
    if not (1.0 / d - 1e-9 <= purity <= 1.0 + 1e-9):
        raise ValueError(f"purity {purity} outside [1/{d}, 1]")
    return (d * purity - 1.0) / (d * (d**2 - 1))


def nested_commutator(h0: np.ndarray, v: np.ndarray) -> np.ndarray:
    return linalg.commutator(h0, linalg.commutator(h0, v))


def x_quartic_trace(h0: np.ndarray, v: np.ndarray) -> float:
    """Tr(H^2 (6 V H^2 V - 8 (H V)^2 + 2 H^2 V^2)), the expanded form of Tr([H,[H,V]]^2)."""
    h2 = h0 @ h0
    hv = h0 @ v
    inner = 6.0 * (v @ h2 @ v) - 8.0 * (hv @ hv) + 2.0 * (h2 @ v @ v)
    return float(np.real(linalg.trace(h2 @ inner)))


def thermal_state(h: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs state exp(-beta h)/Z for Hermitian h."""
    h = linalg.validate_hermitian(h, name="thermal_state hamiltonian")
    w, vecs = np.linalg.eigh(h)
    weights = np.exp(-beta * (w - w.min()))
    weights = weights / weights.sum()
    return (vecs * weights) @ linalg.dag(vecs)


def random_state_fixed_purity(
    d: int, purity: float, rng: np.random.Generator
) -> np.ndarray:
    """Density matrix with the requested purity, Haar-random eigenbasis.

    The spectrum used is one dominant weight with the remainder spread
    evenly, which realises any purity in [1/d, 1].
    """
    if not (1.0 / d - 1e-12 <= purity <= 1.0 + 1e-12):
        raise ValueError(f"purity {purity} outside [1/{d}, 1]")
    purity = min(max(purity, 1.0 / d), 1.0)
    x = (1.0 + np.sqrt(max((d - 1) * (d * purity - 1.0), 0.0))) / d
    spectrum = np.full(d, (1.0 - x) / (d - 1) if d > 1 else 0.0)
    spectrum[0] = x
    u = linalg.haar_random_unitary(d, rng)
    return (u * spectrum) @ linalg.dag(u)


def _resolve_env_state(rho_e) -> np.ndarray:
    if isinstance(rho_e, tuple):
        beta, h_e = rho_e
        return thermal_state(h_e, beta)
    return linalg.validate_state(rho_e)


def probe_closed_rho(
    h0: np.ndarray, v_s: np.ndarray, purity: float, d_s: int, hbar: float = 1.0
) -> float:
    """Average commutator probe over states of fixed purity, isolated system."""
    x = float(np.real(linalg.trace(np.linalg.matrix_power(nested_commutator(h0, v_s), 2))))
    return purity_swap_coefficient(purity, d_s) * x / (2.0 * hbar) ** 2


def probe_closed_V(
    h0: np.ndarray,
    rho_t: np.ndarray,
    trace_v_sq: float,
    d_s: int,
    hbar: float = 1.0,
    trace_v: float = 0.0,
) -> float:
    """Average commutator probe over conjugations of the drive term, isolated system."""
    g_rho = nested_commutator(h0, rho_t)
    k = float(np.real(linalg.trace(g_rho @ g_rho)))
    return swap_coefficient(trace_v_sq, trace_v, d_s) * k / (2.0 * hbar) ** 2


def probe_open_rho(
    h0: np.ndarray,
    v_s: np.ndarray,
    v_e: np.ndarray,
    rho_e,
    purity_s: float,
    d_s: int,
    hbar: float = 1.0,
) -> float:
    """Average commutator probe over system states of fixed purity, product coupling."""
    rho_e = _resolve_env_state(rho_e)
    x = float(np.real(linalg.trace(np.linalg.matrix_power(nested_commutator(h0, v_s), 2))))
    bath = abs(linalg.expectation(v_e, rho_e)) ** 2
    return purity_swap_coefficient(purity_s, d_s) * x * bath / (2.0 * hbar) ** 2


def probe_open_V(
    h0: np.ndarray,
    v_s: np.ndarray,
    v_e: np.ndarray,
    rho_e,
    rho_s_t: np.ndarray,
    d_e: int,
    hbar: float = 1.0,
) -> tuple[float, float]:
    """Average commutator probe over conjugations of the bath coupling.

    Returns the exact sector-resolved average and its large-bath
    simplification (Tr(V_E)^2 + Tr(V_E^2) purity_E) / d_E^2.
    """
    rho_e = _resolve_env_state(rho_e)
    g = nested_commutator(h0, v_s)
    sys_factor = abs(linalg.expectation(g, rho_s_t)) ** 2
    purity_e = float(np.real(linalg.trace(rho_e @ rho_e)))
    tw = twirl2(np.kron(v_e, v_e))
    m_exact = tw.lambda_plus * (1.0 + purity_e) / 2.0 + tw.lambda_minus * (1.0 - purity_e) / 2.0
    tr_v = float(np.real(linalg.trace(v_e)))
    tr_v2 = float(np.real(linalg.trace(v_e @ v_e)))
    m_large = (tr_v**2 + tr_v2 * purity_e) / d_e**2
    scale = sys_factor / (2.0 * hbar) ** 2
    return m_exact * scale, m_large * scale


@dataclass(frozen=True)
class ProbeSetup:
    """Operators and states defining a commutator probe for Monte Carlo averaging.

    v_e and rho_e are None for an isolated system; otherwise the drive
    is v_s x v_e and the state rho_s x rho_e.
    """

    h_0: np.ndarray
    v_s: np.ndarray
    rho_s: np.ndarray
    v_e: np.ndarray | None = None
    rho_e: np.ndarray | None = None
    hbar: float = 1.0


def _probe_value(setup: ProbeSetup, rho_s, v_s, v_e) -> float:
    if setup.v_e is None:
        a = setup.h_0
        v = v_s
        rho = rho_s
    else:
        d_e = setup.v_e.shape[0]
        a = np.kron(setup.h_0, np.eye(d_e))
        v = np.kron(v_s, v_e)
        rho = np.kron(rho_s, setup.rho_e)
    b = (-1j / setup.hbar) * linalg.commutator(a, v)
    val = linalg.trace(linalg.commutator(a, b) @ rho)
    return 0.25 * abs(val) ** 2


def mc_probe_oracle(
    setup: ProbeSetup,
    twirl_target: str,
    n_samples: int = 1000,
    rng_seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo estimate of an averaged probe, straight from the operators.

    Each sample conjugates the chosen target by a fresh Haar unitary and
    evaluates the raw probe (1/4)|Tr([E, P] rho)|^2 with no closed-form
    shortcuts, so the estimate arbitrates the analytic averages.
    Returns (mean, standard error).
    """
    if twirl_target not in TWIRL_TARGETS:
        raise ValueError(f"twirl_target must be one of {TWIRL_TARGETS}")
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    if twirl_target == "V_E" and setup.v_e is None:
        raise ValueError("twirl_target V_E requires an environment coupling")
    rng = np.random.default_rng(rng_seed)
    d_s = setup.h_0.shape[0]
    values = np.empty(n_samples)
    for k in range(n_samples):
        rho_s, v_s, v_e = setup.rho_s, setup.v_s, setup.v_e
        if twirl_target == "rho_S":
            u = linalg.haar_random_unitary(d_s, rng)
            rho_s = u @ rho_s @ linalg.dag(u)
        elif twirl_target == "V_S":
            u = linalg.haar_random_unitary(d_s, rng)
            v_s = u @ v_s @ linalg.dag(u)
        else:
            u = linalg.haar_random_unitary(setup.v_e.shape[0], rng)
            v_e = u @ v_e @ linalg.dag(u)
        values[k] = _probe_value(setup, rho_s, v_s, v_e)
    mean = float(values.mean())
    std_error = float(values.std(ddof=1) / np.sqrt(n_samples))
    return mean, std_error
