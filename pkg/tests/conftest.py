"""Shared fixtures: deterministic RNG helpers and reusable trajectories."""

from __future__ import annotations

import numpy as np
import pytest

from qflows import dynamics, models


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (m + m.conj().T) / 2.0


def random_density(rng: np.random.Generator, d: int, pure: bool = False) -> np.ndarray:
    if pure:
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi = psi / np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_state_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)


@pytest.fixture(scope="session")
def two_spin_parts():
    drive = models.TimeFunction(kind="sinusoid_offset", amplitude=1.0, rate=1.0, offset=2.0)
    return models.build_two_spins(drive, g=1.0, hbar=1.0)


@pytest.fixture(scope="session")
def two_spin_traj(two_spin_parts):
    psi0 = np.zeros(4, dtype=np.complex128)
    psi0[0] = 1.0
    grid = dynamics.TimeGrid(0.0, 5.0, 501)
    return dynamics.evolve_von_neumann(two_spin_parts, psi0, grid)


@pytest.fixture(scope="session")
def oscillator_parts_small():
    drive = models.TimeFunction(kind="sinusoid_offset", amplitude=0.3, rate=1.0, offset=1.5)
    spec = models.ModelSpec(
        model="two_oscillators",
        parameters={"omega_b": 1.0, "m": 1.0, "g": 1.0, "hbar": 1.0},
        drive=drive,
        fock_cutoff=48,
    )
    return models.build_model(spec)


@pytest.fixture(scope="session")
def oscillator_traj_small(oscillator_parts_small):
    cutoff = oscillator_parts_small.dim_s
    psi0 = np.zeros(cutoff * cutoff, dtype=np.complex128)
    psi0[0] = 1.0
    grid = dynamics.TimeGrid(0.0, 2.0, 101)
    return dynamics.evolve_von_neumann(oscillator_parts_small, psi0, grid)


@pytest.fixture(scope="session")
def battery_parts():
    return models.build_qubit_battery(
        h0=1.2, h3=0.2, v0=0.0, v=np.array([0.5, 0.6, 0.0]), hbar=1.0
    )


@pytest.fixture(scope="session")
def spin_boson_parts():
    return models.build_spin_boson(alpha1=1.0, alpha3=1.0, gamma=0.25, hbar=1.0)
