"""Dense complex linear algebra primitives shared by every other module.

All functions are pure and operate on plain numpy arrays. States may be
density matrices (2-d) or normalized state vectors (1-d); wherever a
"state" argument is accepted both forms work.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-10
LOG_EPS = 1e-12


def as_complex_matrix(m: np.ndarray) -> np.ndarray:
    """Validate a square, finite complex matrix and return it as complex128."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains NaN or infinite entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    return np.conjugate(np.swapaxes(m, -1, -2))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    return bool(np.linalg.norm(a - dag(a)) <= tol)


def validate_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL, name: str = "operator") -> np.ndarray:
    a = as_complex_matrix(m)
    dev = float(np.linalg.norm(a - dag(a)))
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian: Frobenius deviation {dev:.3e} > {tol:.1e}")
    return a


def validate_state(rho: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity of a density matrix.

    Returns the validated matrix; raises ValueError describing the first
    violated invariant otherwise.
    """
    a = validate_hermitian(rho, tol, name="state")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"state trace {tr} deviates from 1 by more than {tol:.1e}")
    w = np.linalg.eigvalsh((a + dag(a)) / 2.0)
    if w[0] < -tol:
        raise ValueError(f"state has negative eigenvalue {w[0]:.3e}")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b + b @ a


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int | str) -> np.ndarray:
    """Trace out one tensor factor of an operator on a bipartite space.

    Args:
        m: operator on the product space, dimension dims[0] * dims[1].
        dims: (d_S, d_E) factor dimensions.
        keep: 0 or "S" to keep the first factor, 1 or "E" for the second.
    """
    d_s, d_e = int(dims[0]), int(dims[1])
    a = as_complex_matrix(m)
    if a.shape[0] != d_s * d_e:
        raise ValueError(f"dims {dims} do not factor matrix dimension {a.shape[0]}")
    if isinstance(keep, str):
        keep = {"S": 0, "E": 1}.get(keep.upper(), -1)
    if keep not in (0, 1):
        raise ValueError("keep must be 0/'S' or 1/'E'")
    t = a.reshape(d_s, d_e, d_s, d_e)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def matrix_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs go through an eigendecomposition,
    everything else through scaling-and-squaring.
    """
    a = as_complex_matrix(m)
    if is_hermitian(a):
        w, v = np.linalg.eigh(a)
        return (v * np.exp(w)) @ dag(v)
    if is_hermitian(1j * a):
        w, v = np.linalg.eigh(1j * a)
        return (v * np.exp(-1j * w)) @ dag(v)
    return scipy.linalg.expm(a)


def matrix_log_hermitian(m: np.ndarray, eps: float = LOG_EPS) -> np.ndarray:
    """Logarithm of a Hermitian PSD matrix with eigenvalues clamped at eps.

    The clamp regularizes rank-deficient inputs (pure states) for entropy
    computations; eigenvalues below eps contribute log(eps).
    """
    a = validate_hermitian(m, name="matrix_log_hermitian input")
    w, v = np.linalg.eigh(a)
    return (v * np.log(np.maximum(w, eps))) @ dag(v)


def frobenius_norm_sq(m: np.ndarray) -> float:
    a = np.asarray(m)
    return float(np.sum(np.abs(a) ** 2))


def trace(m: np.ndarray) -> complex:
    return complex(np.trace(np.asarray(m)))


def expectation(op: np.ndarray, state: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    """Real expectation value of a Hermitian operator on a state.

    state may be a density matrix or a state vector. An imaginary part
    above tol signals corrupted inputs and raises.
    """
    a = np.asarray(op, dtype=np.complex128)
    s = np.asarray(state, dtype=np.complex128)
    if s.ndim == 1:
        if a.shape[1] != s.shape[0]:
            raise ValueError(f"dimension mismatch: {a.shape} vs {s.shape}")
        val = complex(np.vdot(s, a @ s))
    else:
        if a.shape[1] != s.shape[0]:
            raise ValueError(f"dimension mismatch: {a.shape} vs {s.shape}")
        val = complex(np.einsum("ij,ji->", a, s))
    scale = max(1.0, abs(val))
    if abs(val.imag) > tol * scale:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; inputs not Hermitian/valid")
    return float(val.real)


def haar_random_unitary(dim: int, rng_seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Gaussian matrix.

    The R diagonal phases are fixed so the distribution is exactly Haar.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
