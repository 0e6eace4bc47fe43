from __future__ import annotations

import numpy as np
import pytest

from ffprog import standard_system
from ffprog.config import ToolkitSettings
from ffprog.context_cache import context_for
from ffprog.errors import ArityMismatch, BudgetExceeded, Inadmissible, MissingPhi
from ffprog.ffcore import ConfigurationSystem, IntPolynomial, PrimeContext, RationalFunction
from ffprog.fourier import GridFunction, WeightFunction, lp_norm, u_norm
from ffprog.operators import (
    avg_G,
    counting_lambda,
    dual_F,
    l2_discrepancy,
    line_average,
    main_term,
    oracle_lambda,
    shift_table,
    structured_average,
)


def _pair(p: int = 5) -> GridFunction:
    return GridFunction.indicator(p, 1, [(0,), (1,)])


def _weight(p: int, rng: np.random.Generator) -> WeightFunction:
    return WeightFunction(p, rng.random(p) * np.exp(2j * np.pi * rng.random(p)))


def test_shift_table(ctx5: PrimeContext) -> None:
    f = GridFunction.from_flat(5, 1, range(5), bounded=False)
    table = shift_table(f, (2,), ctx5)
    assert table.shape == (5, 5)
    assert table[1, 0] == 2
    assert table[3, 4] == (4 + 6) % 5


def test_average_example(square_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    G = avg_G(WeightFunction.constant(5), [_pair()], (), square_system, ctx5)
    assert G((0,)) == pytest.approx(0.6)


def test_dual_function_example(square_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    F = dual_F(WeightFunction.constant(5), [_pair()], (), square_system, ctx5)
    assert F((0,)) == pytest.approx(0.52)


def test_counting_example(square_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    theta = WeightFunction.constant(5)
    fs = [_pair(), _pair()]
    assert counting_lambda(theta, fs, square_system, ctx5) == pytest.approx(0.24)
    assert oracle_lambda(theta, fs, square_system, ctx5) == pytest.approx(0.24)
    assert main_term(theta, fs, square_system, ctx5) == pytest.approx(0.16)


def test_dual_pairing_identity(plane_system: ConfigurationSystem, rng: np.random.Generator) -> None:
    for p in (5, 7):
        ctx = context_for(p)
        theta = _weight(p, rng)
        fs = [GridFunction.random_bounded(p, 2, rng) for _ in range(2)]
        for l in (1, 2):
            xis = tuple(int(c) for c in rng.integers(0, p, size=2 - l))
            G = avg_G(theta, fs[:l], xis, plane_system, ctx)
            F = dual_F(theta, fs[:l], xis, plane_system, ctx)
            pairing = np.mean(F.values * np.conj(fs[l - 1].values))
            assert abs(lp_norm(G) ** 2 - pairing) < 1e-9
            assert lp_norm(G) ** 4 <= lp_norm(F) ** 2 + 1e-9


def test_base_case_bound(plane_system: ConfigurationSystem, rng: np.random.Generator) -> None:
    for p in (5, 7, 11):
        ctx = context_for(p)
        for _ in range(10):
            theta = _weight(p, rng)
            f1 = GridFunction.random_bounded(p, 2, rng)
            xi = (int(rng.integers(0, p)),)
            G = avg_G(theta, [f1], xi, plane_system, ctx)
            assert lp_norm(G) <= u_norm(theta, 3) + 1e-9


@pytest.mark.parametrize("p", [5, 7, 11])
def test_fast_count_matches_oracle(
    p: int,
    line_system: ConfigurationSystem,
    plane_system: ConfigurationSystem,
    rational_system: ConfigurationSystem,
    rng: np.random.Generator,
) -> None:
    ctx = context_for(p)
    cases = [(line_system, False), (plane_system, False), (rational_system, True)]
    for system, exclude_poles in cases:
        theta = _weight(p, rng)
        fs = [GridFunction.random_bounded(p, system.dimension, rng) for _ in range(system.k + 1)]
        fast = counting_lambda(theta, fs, system, ctx, exclude_poles=exclude_poles)
        slow = oracle_lambda(theta, fs, system, ctx, exclude_poles=exclude_poles)
        assert abs(fast - slow) < 1e-9
        assert abs(fast) <= 1.0 + 1e-12


def test_count_is_translation_invariant(
    plane_system: ConfigurationSystem, ctx7: PrimeContext, rng: np.random.Generator
) -> None:
    theta = _weight(7, rng)
    fs = [GridFunction.random_bounded(7, 2, rng) for _ in range(3)]
    moved = [f.shifted((3, 5)) for f in fs]
    base = counting_lambda(theta, fs, plane_system, ctx7)
    assert abs(counting_lambda(theta, moved, plane_system, ctx7) - base) < 1e-9


def test_average_is_linear_in_the_weight(
    plane_system: ConfigurationSystem, ctx7: PrimeContext, rng: np.random.Generator
) -> None:
    theta = _weight(7, rng)
    fs = [GridFunction.random_bounded(7, 2, rng) for _ in range(2)]
    flat = WeightFunction(7, np.full(7, theta.mean()), bounded=False)
    whole = avg_G(theta, fs, (), plane_system, ctx7).values
    split = (
        avg_G(theta.centered(), fs, (), plane_system, ctx7).values
        + avg_G(flat, fs, (), plane_system, ctx7).values
    )
    assert np.max(np.abs(whole - split)) < 1e-9


def test_structured_terms(line_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    point = GridFunction.indicator(5, 1, [(0,)])
    assert np.allclose(line_average(point, (1,), ctx5).values, 0.2)
    theta = WeightFunction.constant(5, 0.5)
    structured = structured_average(theta, [point, point], line_system, ctx5)
    assert np.allclose(structured.values, 0.5 * 0.2 * 0.2)


def test_l2_discrepancy_vanishes_on_constants(
    plane_system: ConfigurationSystem, ctx5: PrimeContext, rng: np.random.Generator
) -> None:
    fs = [GridFunction.constant(5, 2, 0.5), GridFunction.constant(5, 2, 1.0)]
    assert l2_discrepancy(_weight(5, rng), fs, plane_system, ctx5) == pytest.approx(0.0, abs=1e-20)
    noisy = [GridFunction.random_unit(5, 2, rng) for _ in range(2)]
    assert l2_discrepancy(_weight(5, rng), noisy, plane_system, ctx5) >= 0.0


def test_pole_exclusion(rational_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    ones = [GridFunction.constant(5, 1)] * 3
    theta = WeightFunction.constant(5)
    assert counting_lambda(theta, ones, rational_system, ctx5, exclude_poles=True) == pytest.approx(
        1.0
    )
    with pytest.raises(MissingPhi):
        counting_lambda(theta, ones, standard_system(1), ctx5, exclude_poles=True)
    with pytest.raises(MissingPhi):
        oracle_lambda(theta, ones, standard_system(1), ctx5, exclude_poles=True)


def test_input_validation(
    square_system: ConfigurationSystem, plane_system: ConfigurationSystem, ctx5: PrimeContext
) -> None:
    theta = WeightFunction.constant(5)
    with pytest.raises(ArityMismatch):
        counting_lambda(theta, [_pair()], square_system, ctx5)
    with pytest.raises(ArityMismatch):
        avg_G(theta, [_pair()], (1,), square_system, ctx5)
    with pytest.raises(ArityMismatch):
        counting_lambda(WeightFunction.constant(7), [_pair(), _pair()], square_system, ctx5)
    with pytest.raises(ArityMismatch):
        counting_lambda(theta, [_pair(), _pair(), _pair()], plane_system, ctx5)
    ctx2 = context_for(2)
    with pytest.raises(Inadmissible):
        counting_lambda(
            WeightFunction.constant(2),
            [GridFunction.constant(2, 2)] * 3,
            plane_system,
            ctx2,
        )


def test_dual_function_budget(square_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    with pytest.raises(BudgetExceeded):
        dual_F(
            WeightFunction.constant(5),
            [_pair()],
            (),
            square_system,
            ctx5,
            ToolkitSettings(dual_cap=3),
        )


def test_trivial_inputs(plane_system: ConfigurationSystem, ctx5: PrimeContext) -> None:
    ones = [GridFunction.constant(5, 2)] * 3
    zero, one = WeightFunction.constant(5, 0.0), WeightFunction.constant(5)
    assert np.allclose(avg_G(zero, ones[:2], (), plane_system, ctx5).values, 0.0)
    assert np.allclose(dual_F(zero, ones[:1], (0,), plane_system, ctx5).values, 0.0)
    assert np.allclose(avg_G(one, ones[:2], (), plane_system, ctx5).values, 1.0)
    assert np.allclose(dual_F(one, ones[:1], (0,), plane_system, ctx5).values, 1.0)
    assert counting_lambda(one, ones, plane_system, ctx5) == pytest.approx(1.0)
    assert oracle_lambda(one, ones, plane_system, ctx5) == pytest.approx(1.0)
    assert counting_lambda(zero, ones, plane_system, ctx5) == pytest.approx(0.0)
    half = WeightFunction.constant(5, 0.5)
    assert main_term(half, ones, plane_system, ctx5) == pytest.approx(0.5)


def test_l2_discrepancy_matches_a_double_loop(
    square_system: ConfigurationSystem, ctx7: PrimeContext
) -> None:
    f1 = GridFunction.random_unit(7, 1, np.random.default_rng(7))
    expected = 0.0
    for x in range(7):
        averaged = sum(f1((x + y * y,)) for y in range(7)) / 7
        structured = sum(f1((x + n,)) for n in range(7)) / 7
        expected += abs(averaged - structured) ** 2 / 7
    theta = WeightFunction.constant(7)
    assert l2_discrepancy(theta, [f1], square_system, ctx7) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("p", [7, 11, 13])
@pytest.mark.parametrize("dimension", [1, 2])
def test_polynomial_phi_matches_the_expanded_system(p: int, dimension: int) -> None:
    ctx = context_for(p)
    rng = np.random.default_rng([p, dimension])
    base = standard_system(dimension)
    doubling = RationalFunction(IntPolynomial.of(0, 2), IntPolynomial.of(1))
    doubled = ConfigurationSystem(dimension, base.vectors, base.polys, doubling)
    expanded = ConfigurationSystem(
        dimension, base.vectors, (IntPolynomial.of(0, 2), IntPolynomial.of(0, 0, 4))
    )
    for _ in range(5):
        theta = _weight(p, rng)
        fs = [GridFunction.random_bounded(p, dimension, rng) for _ in range(3)]
        rational = counting_lambda(theta, fs, doubled, ctx, exclude_poles=True)
        polynomial = counting_lambda(theta, fs, expanded, ctx)
        assert abs(rational - polynomial) < 1e-12


PRIMES_TO_31 = [5, 7, 11, 13, 17, 19, 23, 29, 31]


@pytest.mark.slow
def test_base_case_bound_over_primes_to_31(plane_system: ConfigurationSystem) -> None:
    rng = np.random.default_rng(31)
    violations = 0
    for trial in range(200):
        p = PRIMES_TO_31[trial % len(PRIMES_TO_31)]
        ctx = context_for(p)
        theta = _weight(p, rng)
        f1 = GridFunction.random_bounded(p, 2, rng)
        xi = (int(rng.integers(0, p)),)
        G = avg_G(theta, [f1], xi, plane_system, ctx)
        if lp_norm(G) > u_norm(theta, 3) + 1e-9:
            violations += 1
    assert violations == 0


@pytest.mark.slow
def test_cauchy_schwarz_step_over_primes_to_31(plane_system: ConfigurationSystem) -> None:
    rng = np.random.default_rng(32)
    violations = 0
    for trial in range(100):
        p = PRIMES_TO_31[trial % len(PRIMES_TO_31)]
        ctx = context_for(p)
        theta = _weight(p, rng)
        fs = [GridFunction.random_bounded(p, 2, rng) for _ in range(2)]
        for l in (1, 2):
            xis = tuple(int(c) for c in rng.integers(0, p, size=2 - l))
            G = avg_G(theta, fs[:l], xis, plane_system, ctx)
            F = dual_F(theta, fs[:l], xis, plane_system, ctx)
            if lp_norm(G) ** 4 > lp_norm(F) ** 2 + 1e-9:
                violations += 1
    assert violations == 0


@pytest.mark.slow
@pytest.mark.parametrize("p", PRIMES_TO_31)
@pytest.mark.parametrize("system_name", ["line_system", "plane_system", "rational_system"])
def test_fast_count_matches_oracle_over_primes_to_31(
    p: int, system_name: str, request: pytest.FixtureRequest
) -> None:
    system: ConfigurationSystem = request.getfixturevalue(system_name)
    exclude_poles = system.phi is not None
    ctx = context_for(p)
    rng = np.random.default_rng([p, system.dimension, int(exclude_poles)])
    for _ in range(50):
        theta = _weight(p, rng)
        fs = [GridFunction.random_bounded(p, system.dimension, rng) for _ in range(system.k + 1)]
        fast = counting_lambda(theta, fs, system, ctx, exclude_poles=exclude_poles)
        slow = oracle_lambda(theta, fs, system, ctx, exclude_poles=exclude_poles)
        assert abs(fast - slow) < 1e-9
