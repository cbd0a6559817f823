"""Projective measurement, dephasing channels, and measured evolutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import TimeGrid, Trajectory, evolve_lindblad, evolve_von_neumann, qubit_propagator
from .models import HamiltonianParts

CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class SpectralBasis:
    """Orthogonal projectors onto eigenvalue clusters of a Hermitian operator."""

    projectors: tuple
    eigenvalues: tuple


def spectral_basis(a: np.ndarray, cluster_tol: float = CLUSTER_TOL) -> SpectralBasis:
    """Projectors per distinct eigenvalue cluster.

    Eigenvalues closer than cluster_tol are merged into one projector.
    Exactly diagonal inputs short-circuit to coordinate projectors so that
    dephasing such an operator's basis zeroes off-diagonal elements
    exactly, not merely to eigensolver precision.
    """
    a = linalg.validate_hermitian(a, name="spectral_basis input")
    d = a.shape[0]
    if np.count_nonzero(a - np.diag(np.diagonal(a))) == 0:
        diag = np.real(np.diagonal(a))
        order = np.argsort(diag, kind="stable")
        groups = _cluster(diag[order], cluster_tol)
        projectors = []
        values = []
        for idx in groups:
            p = np.zeros((d, d), dtype=np.complex128)
            for k in idx:
                p[order[k], order[k]] = 1.0
            projectors.append(p)
            values.append(float(np.mean(diag[order][idx])))
        return SpectralBasis(tuple(projectors), tuple(values))
    w, v = np.linalg.eigh(a)
    groups = _cluster(w, cluster_tol)
    projectors = []
    values = []
    for idx in groups:
        cols = v[:, idx]
        projectors.append(cols @ linalg.dag(cols))
        values.append(float(np.mean(w[idx])))
    return SpectralBasis(tuple(projectors), tuple(values))


def _cluster(sorted_values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for i in range(1, len(sorted_values)):
        if sorted_values[i] - sorted_values[groups[-1][0]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def dephase(state: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Non-selective projective measurement: rho -> sum_i P_i rho P_i."""
    rho = np.asarray(state, dtype=np.complex128)
    if rho.ndim == 1:
        rho = np.outer(rho, np.conjugate(rho))
    out = np.zeros_like(rho)
    for p in basis.projectors:
        out += p @ rho @ p
    return out


def diagonal_part(op: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Block-diagonal part of an operator in the given spectral basis."""
    out = np.zeros_like(np.asarray(op, dtype=np.complex128))
    for p in basis.projectors:
        out += p @ op @ p
    return out


def offdiagonal_part(op: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    op = np.asarray(op, dtype=np.complex128)
    return op - diagonal_part(op, basis)


def sample_measurement(
    state: np.ndarray, basis: SpectralBasis, rng: np.random.Generator
) -> tuple[int, float, np.ndarray]:
    """Selective projective measurement; returns (outcome index, eigenvalue, post state)."""
    rho = np.asarray(state, dtype=np.complex128)
    if rho.ndim == 1:
        rho = np.outer(rho, np.conjugate(rho))
    probs = np.array([max(linalg.expectation(p, rho), 0.0) for p in basis.projectors])
    probs = probs / probs.sum()
    k = int(rng.choice(len(probs), p=probs))
    p = basis.projectors[k]
    post = p @ rho @ p / probs[k]
    return k, basis.eigenvalues[k], post


def _segment_states(
    parts: HamiltonianParts,
    state: np.ndarray,
    t0: float,
    eval_times: np.ndarray,
    engine: str,
    tol: float | None,
) -> list[np.ndarray]:
    """Evolve a density matrix from t0, returning states at eval_times."""
    if len(eval_times) == 0:
        return []
    if engine == "qubit_exact":
        out = []
        for t in eval_times:
            u = qubit_propagator(parts, t - t0)
            out.append(u @ state @ linalg.dag(u))
        return out
    if abs(eval_times[0] - t0) > 1e-12:
        eval_times = np.concatenate(([t0], eval_times))
        skip_first = True
    else:
        skip_first = False
    n = len(eval_times)
    if n == 1:
        return [state.copy()]
    seg_grid = _RaggedGrid(eval_times)
    evolver = evolve_lindblad if engine == "lindblad" else evolve_von_neumann
    traj = evolver(parts, state, seg_grid, tol)
    states = traj.states[1:] if skip_first else traj.states
    return states


class _RaggedGrid:
    """TimeGrid stand-in whose output points need not be uniform."""

    def __init__(self, times: np.ndarray):
        self._times = np.asarray(times, dtype=float)

    @property
    def times(self) -> np.ndarray:
        return self._times


def measure_nonselective_schedule(
    parts: HamiltonianParts,
    rho0: np.ndarray,
    grid: TimeGrid,
    basis: SpectralBasis,
    times,
    engine: str = "qubit_exact",
    tol: float | None = None,
) -> Trajectory:
    """Evolve with dephasing applied at each scheduled time.

    The output trajectory contains the full grid plus, at every
    measurement instant, two records: the pre-measurement state and the
    dephased post-measurement state (duplicated time stamp).
    """
    times = list(times)
    if sorted(times) != times:
        raise ValueError("measurement times must be sorted ascending")
    for t_m in times:
        if not (grid.t_start < t_m < grid.t_end):
            raise ValueError(f"measurement time {t_m} outside the grid interior")
    rho = np.asarray(rho0, dtype=np.complex128)
    if rho.ndim == 1:
        rho = np.outer(rho, np.conjugate(rho))

    grid_times = grid.times
    out_times: list[float] = []
    out_states: list[np.ndarray] = []
    seg_start = grid_times[0]
    cursor = 0
    for t_m in times + [None]:
        if t_m is None:
            seg_times = grid_times[cursor:]
        else:
            end = cursor
            while end < len(grid_times) and grid_times[end] < t_m - 1e-12:
                end += 1
            seg_times = grid_times[cursor:end]
            cursor = end
            if cursor < len(grid_times) and abs(grid_times[cursor] - t_m) <= 1e-12:
                cursor += 1
        eval_times = np.asarray(seg_times, dtype=float)
        if t_m is not None:
            eval_times = np.concatenate((eval_times, [t_m]))
        states = _segment_states(parts, rho, seg_start, eval_times, engine, tol)
        if t_m is not None:
            pre = states[-1]
            post = dephase(pre, basis)
            out_times.extend(eval_times.tolist())
            out_states.extend(states)
            out_times.append(t_m)
            out_states.append(post)
            rho = post
            seg_start = t_m
        else:
            out_times.extend(eval_times.tolist())
            out_states.extend(states)
    return Trajectory(times=np.asarray(out_times), states=out_states, kind="density")
