"""Structured operators on bipartite spaces.

A KronOp is a sum of scaled Kronecker-product terms c * (A x B) applied
to state vectors through the reshape identity (A x B) psi = vec(A Psi B^T),
so the full d_S*d_E square matrix is never materialized. This is what
keeps the Fock-truncated oscillator runs (dimension 10^4) inside memory.

A factor given as None stands for the identity on that side and is
skipped during application.

The moment helpers at the bottom accept either a plain ndarray or a
KronOp as the operator, and either a state vector or a density matrix as
the state. They are the single dispatch point used by the uncertainty
analyses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


def _norm_factor(f, d: int | None):
    if f is None:
        return None, d
    a = np.asarray(f, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"KronOp factor must be square, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise ValueError(f"inconsistent factor dimension {a.shape[0]}, expected {d}")
    return a, a.shape[0]


@dataclass(frozen=True)
class KronOp:
    """Sum of Kronecker-product terms sum_k c_k (A_k x B_k)."""

    terms: tuple
    dims: tuple[int, int]

    @staticmethod
    def from_terms(terms, dims: tuple[int, int] | None = None) -> "KronOp":
        d_s = dims[0] if dims else None
        d_e = dims[1] if dims else None
        norm = []
        for c, a, b in terms:
            a, d_s = _norm_factor(a, d_s)
            b, d_e = _norm_factor(b, d_e)
            norm.append((complex(c), a, b))
        if d_s is None or d_e is None:
            raise ValueError("KronOp dimensions could not be inferred; pass dims")
        return KronOp(tuple(norm), (int(d_s), int(d_e)))

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def apply(self, vec: np.ndarray) -> np.ndarray:
        d_s, d_e = self.dims
        psi = vec.reshape(d_s, d_e)
        out = np.zeros_like(psi)
        for c, a, b in self.terms:
            t = psi if a is None else a @ psi
            if b is not None:
                t = t @ b.T
            out += c * t
        return out.reshape(vec.shape)

    def dagger(self) -> "KronOp":
        return KronOp(
            tuple(
                (
                    np.conjugate(c),
                    None if a is None else linalg.dag(a),
                    None if b is None else linalg.dag(b),
                )
                for c, a, b in self.terms
            ),
            self.dims,
        )

    def scaled(self, c: complex) -> "KronOp":
        return KronOp(tuple((complex(c) * ck, a, b) for ck, a, b in self.terms), self.dims)

    def __add__(self, other: "KronOp") -> "KronOp":
        if not isinstance(other, KronOp) or other.dims != self.dims:
            return NotImplemented
        return KronOp(self.terms + other.terms, self.dims)

    def matmul(self, other: "KronOp") -> "KronOp":
        """Term-wise product; term count multiplies, use sparingly."""
        if other.dims != self.dims:
            raise ValueError("dimension mismatch in KronOp product")

        def mul(x, y):
            if x is None:
                return y
            if y is None:
                return x
            return x @ y

        terms = []
        for c1, a1, b1 in self.terms:
            for c2, a2, b2 in other.terms:
                terms.append((c1 * c2, mul(a1, a2), mul(b1, b2)))
        return KronOp(tuple(terms), self.dims)

    def as_matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for c, a, b in self.terms:
            af = np.eye(self.dims[0], dtype=np.complex128) if a is None else a
            bf = np.eye(self.dims[1], dtype=np.complex128) if b is None else b
            out += c * np.kron(af, bf)
        return out


def apply_op(op, state_vec: np.ndarray) -> np.ndarray:
    if isinstance(op, KronOp):
        return op.apply(state_vec)
    return np.asarray(op) @ state_vec


def expect(op, state: np.ndarray) -> float:
    """<op> on a state vector or density matrix, checked real."""
    s = np.asarray(state)
    if isinstance(op, KronOp):
        if s.ndim == 1:
            val = complex(np.vdot(s, op.apply(s)))
        else:
            val = complex(np.trace(op.as_matrix() @ s))
        if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
            raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
        return float(val.real)
    return linalg.expectation(op, s)


def pair_moment(a, b, state: np.ndarray) -> complex:
    """<A B> for Hermitian A, B on a vector or density-matrix state."""
    s = np.asarray(state)
    if s.ndim == 1:
        left = apply_op(a, s)
        right = apply_op(b, s)
        return complex(np.vdot(left, right))
    if isinstance(a, KronOp) or isinstance(b, KronOp):
        raise ValueError("KronOp pair moments require a state vector")
    return complex(np.einsum("ij,ji->", np.asarray(a) @ np.asarray(b), s))


def variance(op, state: np.ndarray) -> float:
    m2 = pair_moment(op, op, state).real
    m1 = expect(op, state)
    return float(m2 - m1 * m1)


def covariance_sym(a, b, state: np.ndarray) -> float:
    """Symmetrized covariance 0.5<{A,B}> - <A><B> (real for Hermitian A, B)."""
    ab = pair_moment(a, b, state)
    ba = pair_moment(b, a, state)
    return float(0.5 * (ab + ba).real - expect(a, state) * expect(b, state))


def comm_expectation(a, b, state: np.ndarray) -> complex:
    """<[A, B]>, purely imaginary for Hermitian A, B."""
    return pair_moment(a, b, state) - pair_moment(b, a, state)
