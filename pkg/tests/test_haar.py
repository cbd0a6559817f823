"""Tests for unitary ensemble averages of commutator probes.

The analytic averages are arbitrated by the Monte Carlo oracle, which
evaluates the raw probe sample by sample with no closed-form shortcuts.
Module tests run the oracle at moderate sample counts; the acceptance
suite repeats the comparison at n = 10^4.
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import random_density, random_hermitian
from qflows import linalg
from qflows.haar import (
    ProbeSetup,
    mc_probe_oracle,
    nested_commutator,
    probe_closed_V,
    probe_closed_rho,
    probe_open_V,
    probe_open_rho,
    purity_swap_coefficient,
    random_state_fixed_purity,
    swap_coefficient,
    swap_matrix,
    thermal_state,
    twirl1,
    twirl2,
    x_quartic_trace,
)
from qflows.models import SIGMA_X, SIGMA_Z


class TestSwapMatrix:
    def test_exchanges_factors(self, rng):
        d = 3
        s = swap_matrix(d)
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        np.testing.assert_allclose(s @ np.kron(u, v), np.kron(v, u), atol=1e-12)

    def test_involution(self):
        s = swap_matrix(4)
        np.testing.assert_allclose(s @ s, np.eye(16), atol=1e-14)


class TestTwirl:
    def test_twirl1_monte_carlo(self, rng):
        a = random_hermitian(rng, 3)
        acc = np.zeros((3, 3), dtype=complex)
        g = np.random.default_rng(17)
        n = 3000
        for _ in range(n):
            u = linalg.haar_random_unitary(3, g)
            acc += u @ a @ linalg.dag(u)
        np.testing.assert_allclose(acc / n, twirl1(a), atol=0.05)

    def test_twirl2_monte_carlo(self, rng):
        d = 2
        a = random_hermitian(rng, d)
        b = random_hermitian(rng, d)
        g0 = np.kron(a, b)
        acc = np.zeros((d * d, d * d), dtype=complex)
        g = np.random.default_rng(23)
        n = 4000
        for _ in range(n):
            u = linalg.haar_random_unitary(d, g)
            uu = np.kron(u, u)
            acc += uu @ g0 @ linalg.dag(uu)
        tw = twirl2(g0)
        ref = tw.l_i * np.eye(d * d) + tw.l_s * swap_matrix(d)
        np.testing.assert_allclose(acc / n, ref, atol=0.05)

    def test_twirl2_trace_preserved(self, rng):
        d = 3
        g0 = np.kron(random_hermitian(rng, d), random_hermitian(rng, d))
        tw = twirl2(g0)
        # Tr(l_i I + l_s S) = l_i d^2 + l_s d must reproduce Tr(g0)
        assert tw.l_i * d**2 + tw.l_s * d == pytest.approx(
            np.trace(g0).real, abs=1e-10
        )

    def test_twirl2_rejects_non_square_dimension(self):
        with pytest.raises(ValueError, match="perfect square"):
            twirl2(np.eye(6))

    def test_identity_swap_decomposition(self, rng):
        tw = twirl2(np.kron(random_hermitian(rng, 2), random_hermitian(rng, 2)))
        l_i, l_s = tw.as_identity_swap
        assert l_i == pytest.approx((tw.lambda_plus + tw.lambda_minus) / 2.0)
        assert l_s == pytest.approx((tw.lambda_plus - tw.lambda_minus) / 2.0)


class TestSwapCoefficients:
    def test_v_twirl_matches_swap_coefficient(self, rng):
        for d in (2, 3, 4):
            v = random_hermitian(rng, d)
            tw = twirl2(np.kron(v, v))
            tr_v = float(np.trace(v).real)
            tr_v2 = float(np.trace(v @ v).real)
            assert tw.l_s == pytest.approx(swap_coefficient(tr_v2, tr_v, d), abs=1e-12)

    def test_rho_twirl_matches_purity_coefficient(self, rng):
        for d in (2, 3):
            rho = random_density(rng, d)
            purity = float(np.trace(rho @ rho).real)
            tw = twirl2(np.kron(rho, rho))
            assert tw.l_s == pytest.approx(purity_swap_coefficient(purity, d), abs=1e-12)

    def test_swap_weight_vanishes_at_minimal_purity(self):
        for d in (2, 3, 4):
            assert purity_swap_coefficient(1.0 / d, d) == 0.0

    def test_swap_weight_nonnegative(self, rng):
        for d in (2, 3, 4):
            for _ in range(10):
                rho = random_density(rng, d)
                purity = float(np.trace(rho @ rho).real)
                assert purity_swap_coefficient(purity, d) >= 0.0

    def test_purity_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="purity"):
            purity_swap_coefficient(0.1, 2)


class TestQuarticTrace:
    def test_matches_nested_commutator_square(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 5))
            h0 = random_hermitian(rng, d)
            v = random_hermitian(rng, d)
            g = nested_commutator(h0, v)
            direct = float(np.trace(g @ g).real)
            assert abs(x_quartic_trace(h0, v) - direct) <= 1e-9 * max(1.0, abs(direct))

    def test_single_qubit_closed_form(self, rng):
        # for h0 = a3 sz and v = v1 sx the trace is 32 a3^4 v1^2
        for _ in range(20):
            a3 = rng.uniform(0.1, 2.0)
            v1 = rng.uniform(0.1, 2.0)
            val = x_quartic_trace(a3 * SIGMA_Z, v1 * SIGMA_X)
            assert abs(val - 32.0 * a3**4 * v1**2) <= 1e-9 * max(1.0, val)

    def test_commuting_pair_gives_zero(self, rng):
        h0 = np.diag(rng.normal(size=3)).astype(complex)
        v = np.diag(rng.normal(size=3)).astype(complex)
        assert x_quartic_trace(h0, v) == pytest.approx(0.0, abs=1e-12)


class TestCyclicTraceIdentity:
    def test_nested_commutator_trace_transfer(self, rng):
        # Tr([A,[B,C]] D) = Tr([B,[A,D]] C), the identity behind moving the
        # average from the state to the drive
        for _ in range(50):
            d = int(rng.integers(2, 5))
            a, b = random_hermitian(rng, d), random_hermitian(rng, d)
            c, e = random_hermitian(rng, d), random_hermitian(rng, d)
            lhs = np.trace(linalg.commutator(a, linalg.commutator(b, c)) @ e)
            rhs = np.trace(linalg.commutator(b, linalg.commutator(a, e)) @ c)
            assert lhs == pytest.approx(rhs, abs=1e-10)


class TestStateFactories:
    def test_thermal_state_infinite_temperature(self, rng):
        h = random_hermitian(rng, 4)
        np.testing.assert_allclose(thermal_state(h, 0.0), np.eye(4) / 4.0, atol=1e-12)

    def test_thermal_state_commutes_with_h(self, rng):
        h = random_hermitian(rng, 4)
        rho = thermal_state(h, 0.7)
        linalg.validate_state(rho)
        assert np.linalg.norm(linalg.commutator(h, rho)) < 1e-10

    def test_thermal_state_ground_state_limit(self):
        h = np.diag([0.0, 1.0, 2.0]).astype(complex)
        rho = thermal_state(h, 50.0)
        np.testing.assert_allclose(rho, np.diag([1.0, 0.0, 0.0]), atol=1e-12)

    def test_fixed_purity_state(self):
        rng = np.random.default_rng(5)
        for d, purity in [(2, 0.625), (3, 0.5), (4, 1.0), (4, 0.25)]:
            rho = random_state_fixed_purity(d, purity, rng)
            linalg.validate_state(rho)
            assert np.trace(rho @ rho).real == pytest.approx(purity, abs=1e-12)

    def test_fixed_purity_out_of_range(self):
        with pytest.raises(ValueError, match="purity"):
            random_state_fixed_purity(2, 0.3, np.random.default_rng(0))

    def test_fixed_purity_seeded(self):
        a = random_state_fixed_purity(3, 0.6, np.random.default_rng(3))
        b = random_state_fixed_purity(3, 0.6, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)


class TestClosedFormAgainstOracle:
    def test_probe_closed_rho(self):
        h0 = 0.2 * SIGMA_Z
        v_s = 0.5 * SIGMA_X
        purity = 0.625
        rho0 = random_state_fixed_purity(2, purity, np.random.default_rng(1))
        closed = probe_closed_rho(h0, v_s, purity, 2)
        mean, se = mc_probe_oracle(
            ProbeSetup(h_0=h0, v_s=v_s, rho_s=rho0), "rho_S", n_samples=3000, rng_seed=7
        )
        assert abs(closed - mean) <= 3.0 * se

    def test_probe_closed_V_traceless(self, rng):
        h0 = 0.7 * SIGMA_Z
        v_s = random_hermitian(rng, 2)
        v_s = v_s - np.trace(v_s) / 2.0 * np.eye(2)
        rho_t = random_density(rng, 2)
        tr_v2 = float(np.trace(v_s @ v_s).real)
        closed = probe_closed_V(h0, rho_t, tr_v2, 2)
        mean, se = mc_probe_oracle(
            ProbeSetup(h_0=h0, v_s=v_s, rho_s=rho_t), "V_S", n_samples=3000, rng_seed=11
        )
        assert abs(closed - mean) <= 3.0 * se

    def test_probe_closed_V_with_trace(self, rng):
        # the general form keeps the Tr(V)^2 subtraction; a traceful drive
        # discriminates it from the traceless simplification
        h0 = 0.7 * SIGMA_Z
        v_s = random_hermitian(rng, 2) + 1.5 * np.eye(2)
        rho_t = random_density(rng, 2)
        tr_v = float(np.trace(v_s).real)
        tr_v2 = float(np.trace(v_s @ v_s).real)
        closed = probe_closed_V(h0, rho_t, tr_v2, 2, trace_v=tr_v)
        mean, se = mc_probe_oracle(
            ProbeSetup(h_0=h0, v_s=v_s, rho_s=rho_t), "V_S", n_samples=3000, rng_seed=13
        )
        assert abs(closed - mean) <= 3.0 * se

    def test_probe_open_rho(self, rng):
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        d_e = 3
        v_e = random_hermitian(rng, d_e)
        rho_e = thermal_state(random_hermitian(rng, d_e), 0.9)
        purity = 0.7
        rho_s = random_state_fixed_purity(2, purity, np.random.default_rng(2))
        closed = probe_open_rho(h0, v_s, v_e, rho_e, purity, 2)
        mean, se = mc_probe_oracle(
            ProbeSetup(h_0=h0, v_s=v_s, rho_s=rho_s, v_e=v_e, rho_e=rho_e),
            "rho_S",
            n_samples=3000,
            rng_seed=19,
        )
        assert abs(closed - mean) <= 3.0 * se

    def test_probe_open_V_exact(self, rng):
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        d_e = 3
        v_e = random_hermitian(rng, d_e)
        rho_e = thermal_state(random_hermitian(rng, d_e), 0.6)
        rho_s = random_density(rng, 2)
        exact, _ = probe_open_V(h0, v_s, v_e, rho_e, rho_s, d_e)
        mean, se = mc_probe_oracle(
            ProbeSetup(h_0=h0, v_s=v_s, rho_s=rho_s, v_e=v_e, rho_e=rho_e),
            "V_E",
            n_samples=3000,
            rng_seed=23,
        )
        assert abs(exact - mean) <= 3.0 * se

    def test_probe_open_V_large_bath_converges_to_exact(self, rng):
        # for traceless V_E at purity P the ratio exact/large is
        # d (d P - 1) / (P (d^2 - 1)), independent of the coupling details
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        rho_s = random_density(rng, 2)
        purity = 0.5
        gaps = []
        for d_e in (4, 8, 16):
            v_e = random_hermitian(rng, d_e)
            v_e = v_e - np.trace(v_e) / d_e * np.eye(d_e)
            rho_e = random_state_fixed_purity(d_e, purity, np.random.default_rng(d_e))
            exact, large = probe_open_V(h0, v_s, v_e, rho_e, rho_s, d_e)
            gap = abs(exact - large) / exact
            expected = purity * (d_e**2 - 1.0) / (d_e * (d_e * purity - 1.0)) - 1.0
            assert gap == pytest.approx(expected, abs=1e-10)
            gaps.append(gap)
        assert gaps[0] > gaps[1] > gaps[2]

    def test_open_rho_zero_mean_bath_coupling(self, rng):
        # <V_E> = 0 removes the only bath dependence of the state-averaged probe
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        v_e = np.diag([1.0, -1.0, 0.0]).astype(complex)
        rho_e = np.eye(3, dtype=complex) / 3.0
        assert probe_open_rho(h0, v_s, v_e, rho_e, 0.7, 2) == 0.0

    def test_identity_bath_coupling_reduces_to_closed(self, rng):
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        rho_e = thermal_state(random_hermitian(rng, 3), 0.4)
        open_val = probe_open_rho(h0, v_s, np.eye(3, dtype=complex), rho_e, 0.7, 2)
        closed_val = probe_closed_rho(h0, v_s, 0.7, 2)
        assert open_val == pytest.approx(closed_val, rel=1e-12)

    def test_thermal_bath_accepted_as_tuple(self, rng):
        h0 = 0.4 * SIGMA_Z
        v_s = 0.8 * SIGMA_X
        h_e = random_hermitian(rng, 3)
        direct = probe_open_rho(h0, v_s, h_e, thermal_state(h_e, 0.9), 0.7, 2)
        via_tuple = probe_open_rho(h0, v_s, h_e, (0.9, h_e), 0.7, 2)
        assert via_tuple == pytest.approx(direct, rel=1e-12)


class TestOracle:
    def test_seed_determinism(self, rng):
        setup = ProbeSetup(h_0=0.2 * SIGMA_Z, v_s=0.5 * SIGMA_X, rho_s=random_density(rng, 2))
        a = mc_probe_oracle(setup, "rho_S", n_samples=200, rng_seed=3)
        b = mc_probe_oracle(setup, "rho_S", n_samples=200, rng_seed=3)
        assert a == b

    def test_sample_floor(self, rng):
        setup = ProbeSetup(h_0=SIGMA_Z, v_s=SIGMA_X, rho_s=random_density(rng, 2))
        with pytest.raises(ValueError, match="at least 100"):
            mc_probe_oracle(setup, "rho_S", n_samples=10)

    def test_invalid_target(self, rng):
        setup = ProbeSetup(h_0=SIGMA_Z, v_s=SIGMA_X, rho_s=random_density(rng, 2))
        with pytest.raises(ValueError, match="twirl_target"):
            mc_probe_oracle(setup, "rho_E", n_samples=200)

    def test_env_target_requires_env(self, rng):
        setup = ProbeSetup(h_0=SIGMA_Z, v_s=SIGMA_X, rho_s=random_density(rng, 2))
        with pytest.raises(ValueError, match="environment"):
            mc_probe_oracle(setup, "V_E", n_samples=200)

    def test_maximally_mixed_state_probe_vanishes(self):
        # twirling rho = I/d leaves it invariant and Tr([A,B] I/d) = 0,
        # so only rounding noise from the conjugations survives
        setup = ProbeSetup(h_0=SIGMA_Z, v_s=SIGMA_X, rho_s=np.eye(2, dtype=complex) / 2.0)
        mean, se = mc_probe_oracle(setup, "rho_S", n_samples=200, rng_seed=1)
        assert mean < 1e-30
        assert se < 1e-30

    def test_averaged_product_dominates_averaged_probe(self, rng):
        # the variance product bounds the probe sample by sample, so the
        # Monte Carlo means must respect the same ordering
        h0 = 0.3 * SIGMA_Z + 0.1 * SIGMA_X
        v_s = random_hermitian(rng, 2)
        rho0 = random_state_fixed_purity(2, 0.8, np.random.default_rng(4))
        b = (-1j) * linalg.commutator(h0, v_s)
        g = np.random.default_rng(29)
        n = 600
        probes = np.empty(n)
        products = np.empty(n)
        for k in range(n):
            u = linalg.haar_random_unitary(2, g)
            rho = u @ rho0 @ linalg.dag(u)
            val = np.trace(linalg.commutator(h0, b) @ rho)
            probes[k] = 0.25 * abs(val) ** 2
            var_a = linalg.expectation(h0 @ h0, rho) - linalg.expectation(h0, rho) ** 2
            var_b = linalg.expectation(b @ b, rho) - linalg.expectation(b, rho) ** 2
            products[k] = var_a * var_b
        se = probes.std(ddof=1) / np.sqrt(n)
        assert products.mean() >= probes.mean() - 3.0 * se
