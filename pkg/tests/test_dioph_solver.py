"""
Tests for residual systems, the rgn iteration and the deflated Diophantine search.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.api.error_handlers import ConfigError, DomainError, SolverError
from src.api.models import SolveConfig
from src.config.constants import EXTRACTOR_CAP, RGN_EPS0_TABLE, ROUND_TOLERANCE
from src.solver.dioph_solver import (
    brute_force,
    deflated_norm,
    known_series,
    solve_all,
    solve_config,
    system_from_config,
    verify_rounded,
)
from src.solver.residuals import (
    PRESETS,
    QUASI_PYTHAGOREAN,
    PenaltyKind,
    ResidualSystem,
    build_penalty,
    polynomial_system,
    quasi_pythagorean,
    quasi_pythagorean_twin,
)
from src.solver.rgn import RgnConfig, RgnState, extractor, initial_state, rgn_step, run_attempt

TWIN_PRIME_SOLUTIONS = [(5, 5, 7), (11, 7, 13), (29, 11, 31), (41, 13, 43), (71, 17, 73)]


def _fd_gradient(fn, x, h=1e-6):
    grad = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (fn(x + e) - fn(x - e)) / (2 * h)
    return grad


# ==================== RESIDUALS ====================

def test_polynomial_value_and_gradient():
    x = np.array([3.5, 4.25, 5.0])
    expected = 3.5**2 + 4.25**2 - 5.0**2
    assert QUASI_PYTHAGOREAN.value(x) == pytest.approx(expected)
    np.testing.assert_allclose(QUASI_PYTHAGOREAN.gradient(x), [7.0, 8.5, -10.0])
    np.testing.assert_allclose(QUASI_PYTHAGOREAN.gradient(x), _fd_gradient(QUASI_PYTHAGOREAN.value, x), rtol=1e-6)


def test_polynomial_value_many_matches_value():
    points = np.array([[2.0, 3.0, 4.0], [5.0, 5.0, 7.0], [1.5, 0.5, 2.5]])
    np.testing.assert_allclose(QUASI_PYTHAGOREAN.value_many(points), [QUASI_PYTHAGOREAN.value(p) for p in points])


def test_polynomial_exact_uses_integers():
    assert QUASI_PYTHAGOREAN.exact((5, 5, 7)) == 0
    assert QUASI_PYTHAGOREAN.exact((2, 3, 4)) == 4 + 9 - 16 - 1
    big = known_series(40, which=2)
    assert QUASI_PYTHAGOREAN.exact(big) == 0


def test_system_jacobian_with_primes_penalty(quad_function):
    system = build_penalty(quasi_pythagorean_twin(), PenaltyKind.PRIMES, quad_function)
    assert system.m == 3
    x = np.array([10.3, 20.7, 30.2])
    J = system.jac(x)
    assert J.shape == (3, 3)
    for row in range(system.m):
        numeric = _fd_gradient(lambda z: system.f(z)[row], x)
        np.testing.assert_allclose(J[row], numeric, rtol=1e-5, atol=1e-6)


def test_integer_penalty_vanishes_on_integers():
    system = build_penalty(quasi_pythagorean(), PenaltyKind.INTEGERS)
    np.testing.assert_allclose(system.residual(np.array([5.0, 5.0, 7.0])), [0.0, 0.0], atol=1e-20)
    assert system.f(np.array([5.5, 5.0, 7.0]))[-1] == pytest.approx(1.0)


def test_system_validation():
    with pytest.raises(SolverError):
        ResidualSystem(name="empty", equations=(), lower=(0.0,), upper=(1.0,))
    with pytest.raises(SolverError):
        quasi_pythagorean(lower=10, upper=10)
    with pytest.raises(SolverError):
        ResidualSystem(name="mismatch", equations=(QUASI_PYTHAGOREAN,), lower=(0.0, 0.0), upper=(1.0, 1.0))


def test_build_penalty_errors(quad_function):
    with pytest.raises(ConfigError):
        build_penalty(quasi_pythagorean(), PenaltyKind.PRIMES)
    with pytest.raises(DomainError):
        build_penalty(quasi_pythagorean(lower=1), PenaltyKind.PRIMES, quad_function)
    assert build_penalty(build_penalty(quasi_pythagorean(), "integers"), "none").penalty is None


@pytest.mark.parametrize(
    "equations",
    [
        [{"terms": [{"coeff": 1, "powers": [2, 0, 1]}]}],
        [{"terms": [{"coeff": 1, "powers": [-1, 0]}]}],
        [{"terms": []}],
    ],
)
def test_polynomial_system_rejects_bad_terms(equations):
    with pytest.raises(ConfigError):
        polynomial_system("bad", equations, 0, 10, 2)


def test_presets_registered():
    assert set(PRESETS) == {"quasi_pythagorean", "quasi_pythagorean_twin"}
    twin = PRESETS["quasi_pythagorean_twin"](2, 100)
    assert twin.exact_check((5, 5, 7))
    assert not twin.exact_check((7, 11, 13))


# ==================== RGN ====================

def test_extractor():
    point = np.array([5.0, 5.0, 7.0])
    assert extractor(point, []) == 1.0
    assert extractor(point, [point.copy()]) == EXTRACTOR_CAP
    far = extractor(point, [point + 100.0])
    assert far == pytest.approx(1.0, abs=1e-12)
    near = extractor(point, [point + 0.1])
    assert near > 5.0


def test_rgn_attempt_finds_square_root():
    system = polynomial_system("square", [{"terms": [{"coeff": 1, "powers": [2]}], "target": 4}], 0, 10, 1)
    attempt = run_attempt(system, [3.0], 1e-2, RgnConfig())
    assert attempt.converged
    assert attempt.x[0] == pytest.approx(2.0, abs=1e-6)


def test_rgn_steps_stay_in_box():
    system = polynomial_system("square", [{"terms": [{"coeff": 1, "powers": [2]}], "target": 4}], 3, 10, 1)
    attempt = run_attempt(system, [9.0], 1e-2, RgnConfig(max_iter=50))
    assert attempt.status == "stalled"
    assert 3.0 <= attempt.x[0] <= 10.0


def test_rgn_step_at_solution_is_zero():
    system = quasi_pythagorean_twin()
    x = np.array([5.0, 5.0, 7.0])
    x_new, it = rgn_step(system, x, RgnState(n_coeff=1.0, eps0=1e-2))
    assert it.rho == 0.0
    assert it.eps == 0.0
    assert it.step == 0.0
    np.testing.assert_array_equal(x_new, x)


@pytest.mark.parametrize("eps0", RGN_EPS0_TABLE)
def test_rgn_regularizer_solves_its_quadratic(quad_function, eps0):
    """eps_k (eps_k + tau_k) = N rho_k at every iteration."""
    system = build_penalty(quasi_pythagorean(), PenaltyKind.PRIMES, quad_function)
    x0 = np.array([4.8, 5.2, 6.9])
    state, _ = initial_state(system, x0, eps0)
    attempt = run_attempt(system, x0, eps0, RgnConfig())
    assert attempt.iterations
    for it in attempt.iterations:
        assert it.eps * (it.eps + it.tau) == pytest.approx(state.n_coeff * it.rho, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("eps0", RGN_EPS0_TABLE)
def test_rgn_converges_to_nearby_prime_solution(quad_function, eps0):
    system = build_penalty(quasi_pythagorean(), PenaltyKind.PRIMES, quad_function)
    attempt = run_attempt(system, [4.8, 5.2, 6.9], eps0, RgnConfig())
    assert attempt.converged
    np.testing.assert_allclose(attempt.x, [5.0, 5.0, 7.0], atol=ROUND_TOLERANCE)
    assert verify_rounded(attempt.x, system) == (5, 5, 7)


def test_deflation_keeps_attempts_off_found_solution(quad_function):
    system = build_penalty(quasi_pythagorean_twin(), PenaltyKind.PRIMES, quad_function)
    point = np.array([5.0, 5.0, 7.0])
    found = [point]
    cfg = RgnConfig()
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = rng.normal(size=3)
        x0 = point + 0.01 * d / np.linalg.norm(d)
        assert deflated_norm(system, x0, found) > cfg.tol_F
        attempt = run_attempt(system, x0, 1e-2, cfg, found)
        assert not (attempt.converged and np.linalg.norm(attempt.x - point) < ROUND_TOLERANCE)


def test_eps0_schedule_starts_with_eps0():
    cfg = RgnConfig(eps0=1.0)
    assert cfg.eps0_schedule()[0] == 1.0
    assert len(set(cfg.eps0_schedule())) == len(cfg.eps0_schedule())
    with pytest.raises(ValidationError):
        RgnConfig(eps0_table=(1.0, 0.0))


# ==================== VERIFICATION ====================

def test_verify_rounded_primes(quad_function):
    system = build_penalty(quasi_pythagorean_twin(), PenaltyKind.PRIMES, quad_function)
    assert verify_rounded([5.0, 5.0, 7.0], system) == (5, 5, 7)
    assert verify_rounded([5.0004, 4.9998, 7.0], system) == (5, 5, 7)
    assert verify_rounded([5.01, 5.0, 7.0], system) is None
    # integer solution of the twin system with a composite coordinate
    assert verify_rounded([19.0, 9.0, 21.0], system) is None
    assert verify_rounded([19.0, 9.0, 21.0], system, PenaltyKind.INTEGERS) == (19, 9, 21)


def test_verify_rounded_rejects_outside_box(table_1000):
    system = quasi_pythagorean_twin(lower=2, upper=50)
    assert verify_rounded([71.0, 17.0, 73.0], system, PenaltyKind.PRIMES, table_1000) is None
    with pytest.raises(ConfigError):
        verify_rounded([5.0, 5.0, 7.0], system, PenaltyKind.PRIMES)


# ==================== ORACLES ====================

def test_brute_force_twin(table_1000):
    assert brute_force(quasi_pythagorean_twin(), PenaltyKind.PRIMES, table_1000) == TWIN_PRIME_SOLUTIONS


def test_brute_force_quasi_pythagorean(table_1000):
    solutions = brute_force(quasi_pythagorean(), PenaltyKind.PRIMES, table_1000)
    assert len(solutions) == 34
    assert all(QUASI_PYTHAGOREAN.exact(s) == 0 for s in solutions)
    assert all(table_1000.contains(v) for s in solutions for v in s)
    assert set(TWIN_PRIME_SOLUTIONS) <= set(solutions)


def test_brute_force_integers_contains_known_series():
    solutions = set(brute_force(quasi_pythagorean(), PenaltyKind.INTEGERS))
    assert known_series(2) in solutions
    assert known_series(9) in solutions
    assert known_series(1, which=2) in solutions


def test_brute_force_errors():
    with pytest.raises(ConfigError):
        brute_force(quasi_pythagorean(), PenaltyKind.NONE)
    with pytest.raises(ConfigError):
        brute_force(quasi_pythagorean(), PenaltyKind.PRIMES)


@pytest.mark.parametrize("which", [1, 2])
def test_known_series_solve_equation(which):
    for n in range(1, 51):
        assert QUASI_PYTHAGOREAN.exact(known_series(n, which)) == 0


def test_known_series_errors():
    with pytest.raises(ConfigError):
        known_series(0)
    with pytest.raises(ConfigError):
        known_series(1, which=3)


# ==================== SEARCH ====================

def test_solve_from_exact_start(quad_function):
    cfg = RgnConfig(x0=[5.0, 5.0, 7.0], restarts=1, max_extractions=1)
    run = solve_all(quasi_pythagorean_twin(), PenaltyKind.PRIMES, cfg, quad_function)
    assert run.rounded == [(5, 5, 7)]
    assert run.attempts == 1
    assert not run.exhausted
    assert run.restart_log[0]["accepted"]
    assert run.to_dict()["rounded"] == [[5, 5, 7]]


def test_solve_config_from_preset(quad_function):
    config = SolveConfig(preset="quasi_pythagorean_twin", x0=[11, 7, 13], restarts=1, max_extractions=1)
    run = solve_config(config, quad_function)
    assert run.system == "quasi_pythagorean_twin"
    assert run.kind == "primes"
    assert run.rounded == [(11, 7, 13)]


def test_solve_config_validation():
    with pytest.raises(ValidationError):
        SolveConfig()
    with pytest.raises(ValidationError):
        SolveConfig(preset="quasi_pythagorean", variables=3, equations=[{"terms": [{"coeff": 1, "powers": [1, 0, 0]}]}])
    with pytest.raises(ValidationError):
        SolveConfig(equations=[{"terms": [{"coeff": 1, "powers": [1]}]}])
    with pytest.raises(ConfigError):
        system_from_config(SolveConfig(preset="quasi_pythagorean", x0=[1.0, 2.0]))


def test_system_from_custom_equations():
    config = SolveConfig(
        name="line",
        variables=2,
        equations=[{"terms": [{"coeff": 1, "powers": [1, 0]}, {"coeff": 1, "powers": [0, 1]}], "target": 10}],
        penalty="integers",
        lower=0,
        upper=10,
        seed=3,
    )
    system, rgn = system_from_config(config)
    assert system.name == "line"
    assert system.n == 2
    assert rgn.rng_seed == 3
    assert system.exact_check((4, 6))


def test_search_is_deterministic_for_a_seed(quad_function):
    cfg = RgnConfig(rng_seed=5, restarts=20, max_extractions=2)
    first = solve_all(quasi_pythagorean_twin(), PenaltyKind.PRIMES, cfg, quad_function)
    second = solve_all(quasi_pythagorean_twin(), PenaltyKind.PRIMES, cfg, quad_function)
    assert first.to_dict() == second.to_dict()


@pytest.mark.slow
def test_twin_search_recovers_all_solutions(quad_function):
    complete = 0
    for seed in range(4):
        cfg = RgnConfig(rng_seed=seed, restarts=300, max_extractions=20)
        run = solve_all(quasi_pythagorean_twin(), PenaltyKind.PRIMES, cfg, quad_function)
        assert set(run.rounded) <= set(TWIN_PRIME_SOLUTIONS)
        assert len(run.rounded) == len(set(run.rounded))
        complete += set(run.rounded) == set(TWIN_PRIME_SOLUTIONS)
    assert complete >= 3


@pytest.mark.slow
def test_quasi_pythagorean_search_agrees_with_brute_force(quad_function, table_1000):
    oracle = set(brute_force(quasi_pythagorean(), PenaltyKind.PRIMES, table_1000))
    cfg = RgnConfig(rng_seed=1, restarts=300, max_extractions=20)
    run = solve_all(quasi_pythagorean(), PenaltyKind.PRIMES, cfg, quad_function)
    assert set(run.rounded) <= oracle
    assert len(set(run.rounded)) == min(20, len(oracle))


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
