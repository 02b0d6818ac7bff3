import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eitnoise.errors import DegenerateSteadyState, DivisionDegenerate
from eitnoise.lambda_system import (
    AtomicParams,
    BlochState,
    NoiseModel,
    Verdict,
    bloch_rhs,
    excited_population_rate,
    expectation_matrix_rhs,
    population_exchange_steady_bb,
    steady_state,
    weak_probe_consistency,
)
from eitnoise.oracle_integrator import integrate, relax

from conftest import random_params


def random_state(rng):
    """A random physical state, read off a random density matrix."""
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    # S[i, j] = <|i><j|> = rho[j, i]
    return BlochState.from_expectation_matrix(rho.T)


class TestAtomicParams:
    def test_default_rate_relations(self):
        p = AtomicParams(gamma_b=0.3, gamma_c=0.5, gamma_bc_prime=0.1)
        assert p.gamma_ba == pytest.approx(0.45)
        assert p.gamma_ac == pytest.approx(0.45)
        assert p.gamma_total == pytest.approx(0.8)

    def test_overrides_kept(self):
        p = AtomicParams(gamma_ba=2.0, gamma_ac=3.0, gamma_total=7.0)
        assert (p.gamma_ba, p.gamma_ac, p.gamma_total) == (2.0, 3.0, 7.0)

    @pytest.mark.parametrize("field", ["g", "gamma_b", "gamma_bc_prime", "length", "N"])
    def test_negative_rejected(self, field):
        with pytest.raises(ValueError):
            AtomicParams(**{field: -1.0})

    def test_c_light_positive(self):
        with pytest.raises(ValueError):
            AtomicParams(c_light=0.0)


class TestBlochRhs:
    def test_dark_state_is_stationary(self, weak_probe_params):
        d = bloch_rhs(BlochState.dark(), weak_probe_params, 0.0)
        assert d.max_abs() == 0.0

    def test_excited_state_rates(self, weak_probe_params):
        p = weak_probe_params
        d = bloch_rhs(BlochState.excited(), p, 0.0)
        assert d.sigma_bb == p.gamma_b
        assert d.sigma_cc == p.gamma_c
        assert d.sigma_ac == 1j * np.conj(p.omega_c)
        assert d.sigma_ba == 0 and d.sigma_bc == 0

    def test_steady_state_is_fixed_point(self, weak_probe_params):
        s = steady_state(weak_probe_params, 0.01)
        assert bloch_rhs(s, weak_probe_params, 0.01).max_abs() < 1e-10

    def test_matches_heisenberg_matrix_form(self, rng):
        for _ in range(20):
            p = random_params(rng)
            s = random_state(rng)
            E = complex(*rng.normal(size=2))
            direct = bloch_rhs(s, p, E).as_complex()
            via_matrix = BlochState.from_expectation_matrix(
                expectation_matrix_rhs(s.expectation_matrix(), p, E)).as_complex()
            np.testing.assert_allclose(direct, via_matrix, atol=1e-13)

    def test_trace_conservation(self, rng):
        for _ in range(50):
            p = random_params(rng)
            s = random_state(rng)
            E = complex(*rng.normal(size=2))
            d = bloch_rhs(s, p, E)
            d_aa = excited_population_rate(s, p, E)
            assert abs(d.sigma_bb + d.sigma_cc + d_aa) < 1e-14
            assert abs(d_aa.imag) < 1e-14

    def test_hermiticity_closure(self, rng):
        for _ in range(50):
            p = random_params(rng)
            S = random_state(rng).expectation_matrix()
            dS = expectation_matrix_rhs(S, p, complex(*rng.normal(size=2)))
            assert np.max(np.abs(dS - dS.conj().T)) < 1e-14
            assert abs(np.trace(dS)) < 1e-14


class TestSteadyState:
    def test_zero_probe_gives_dark_state(self, weak_probe_params):
        s = steady_state(weak_probe_params, 0.0)
        assert s.sigma_bb == 1.0
        assert s.max_abs() == 1.0

    def test_degenerate_without_fields(self):
        p = AtomicParams(omega_c=0.0)
        with pytest.raises(DegenerateSteadyState):
            steady_state(p, 0.0)

    def test_deficit_order_eps_squared(self, weak_probe_params):
        s = steady_state(weak_probe_params, 0.01)
        deficit = 1 - s.sigma_bb
        assert 1e-5 < deficit < 1e-3

    def test_agrees_with_time_integration(self, weak_probe_params):
        # oracle: integrate from the dark state until the derivative settles
        s = steady_state(weak_probe_params, 0.01)
        y = relax(weak_probe_params, 0.01)
        assert abs((1 - y[0].real) / (1 - s.sigma_bb) - 1) < 1e-6
        np.testing.assert_allclose(y[2:], s.as_complex()[2:], rtol=1e-6, atol=1e-14)

    def test_invariants_hold(self, rng):
        for _ in range(20):
            p = random_params(rng)
            E = 0.3 * abs(p.omega_c) / p.g * rng.uniform()
            s = steady_state(p, E)
            s.validate(tol=1e-12)
            assert bloch_rhs(s, p, E).max_abs() < 1e-10

    def test_second_order_scaling(self, weak_probe_params):
        ratios = []
        for eps in (1e-2, 1e-3, 1e-4):
            s = steady_state(weak_probe_params, eps)
            ratios.append((s.sigma_aa + s.sigma_cc) / eps**2)
        assert np.all(np.isfinite(ratios))
        assert abs(ratios[2] / ratios[1] - 1) < 0.05


class TestDarkStateAttraction:
    def test_from_random_states(self, weak_probe_params, rng):
        p = weak_probe_params
        rate = min(p.gamma_b, p.gamma_c, p.gamma_bc_prime + p.omega_c_sq / p.gamma_ba)
        for _ in range(3):
            traj = integrate(p, 0.0, random_state(rng), 50 / rate, tol=1e-10, record=False)
            assert abs(1 - traj.final.sigma_bb) < 1e-8
            assert traj.final.max_abs() - 1 < 1e-8


class TestPopulationExchange:
    def test_zero_probe(self, weak_probe_params):
        assert population_exchange_steady_bb(weak_probe_params, 0.0) == 0.0

    def test_arithmetic_example(self):
        p = AtomicParams(g=1.0, gamma_ba=1.0, gamma_bc_popexch=0.1, omega_c=1.0)
        assert population_exchange_steady_bb(p, 0.1) == pytest.approx(-0.02 / 1.1, rel=1e-15)

    @given(E=st.complex_numbers(min_magnitude=1e-6, max_magnitude=10, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_negative_for_nonzero_probe(self, E):
        p = AtomicParams(g=1.0, gamma_ba=1.0, gamma_bc_popexch=0.1, omega_c=1.0)
        assert population_exchange_steady_bb(p, E) < 0

    def test_degenerate_denominator(self):
        p = AtomicParams(omega_c=0.0, gamma_bc_popexch=0.0)
        with pytest.raises(DivisionDegenerate):
            population_exchange_steady_bb(p, 0.1)


class TestConsistency:
    @pytest.mark.parametrize("model", list(NoiseModel))
    def test_zero_probe(self, weak_probe_params, model):
        rep = weak_probe_consistency(weak_probe_params, 0.0, model)
        assert rep.verdict is Verdict.CONSISTENT_SECOND_ORDER
        assert rep.population_deficit == 0.0

    def test_off_diagonal_consistent(self, weak_probe_params):
        rep = weak_probe_consistency(weak_probe_params, 0.01, "offdiag")
        assert rep.epsilon == pytest.approx(0.01)
        assert rep.verdict is Verdict.CONSISTENT_SECOND_ORDER
        assert rep.population_deficit <= 10 * 1e-4

    def test_population_exchange_inconsistent(self, weak_probe_params):
        p = weak_probe_params.replace(gamma_bc_popexch=0.1)
        rep = weak_probe_consistency(p, 0.01, NoiseModel.POPULATION_EXCHANGE)
        assert rep.verdict is Verdict.INCONSISTENT
        assert rep.population_deficit == 1 - population_exchange_steady_bb(p, 0.01)

    def test_strong_probe_rejected(self, weak_probe_params):
        with pytest.raises(ValueError):
            weak_probe_consistency(weak_probe_params, 2.0)
