from __future__ import annotations

import itertools

import numpy as np
import pytest

from ffprog.errors import (
    DegenerateDenominator,
    Inadmissible,
    InvalidConfig,
    NonIndependentPolys,
    NotPrime,
    ZeroDirection,
)
from ffprog.ffcore import (
    ConfigurationSystem,
    IntPolynomial,
    PrimeContext,
    RationalFunction,
    all_points,
    check_admissible,
    coset_representatives,
    eval_poly,
    eval_rational,
    linear_independence,
    make_prime_context,
    require_admissible,
    span_decompose,
    translate,
)


def test_character_table_is_unit_modulus_and_exact_at_zero() -> None:
    ctx = make_prime_context(7)
    assert ctx.char_table[0] == 1.0
    assert np.allclose(np.abs(ctx.char_table), 1.0, atol=1e-15)
    assert ctx.e(9) == ctx.e(2)
    assert ctx.e(-1) == ctx.e(6)


def test_character_is_a_homomorphism(ctx7: PrimeContext) -> None:
    for a in range(7):
        for b in range(7):
            assert abs(ctx7.e(a) * ctx7.e(b) - ctx7.e(a + b)) < 1e-12


def test_p_equal_two_uses_exact_signs() -> None:
    ctx = make_prime_context(2)
    assert list(ctx.char_table) == [1.0, -1.0]


@pytest.mark.parametrize("p", [0, 1, 4, 9, 91])
def test_non_primes_are_rejected(p: int) -> None:
    with pytest.raises(NotPrime, match="not prime"):
        make_prime_context(p)


def test_not_prime_message_names_the_modulus() -> None:
    with pytest.raises(NotPrime) as info:
        make_prime_context(4)
    assert str(info.value) == "4 is not prime"
    assert isinstance(info.value, ValueError)


def test_inverse(ctx5: PrimeContext) -> None:
    assert ctx5.inverse(2) == 3
    assert ctx5.inverse(7) == 3
    with pytest.raises(ZeroDivisionError):
        ctx5.inverse(10)


def test_polynomial_normalises_trailing_zeros() -> None:
    poly = IntPolynomial.of(0, 1, 0, 0)
    assert poly.coeffs == (0, 1)
    assert poly.degree == 1
    assert IntPolynomial.of(0, 0).degree == -1
    assert IntPolynomial.of().is_zero


def test_eval_poly_matches_vectorised_values(ctx5: PrimeContext) -> None:
    square = IntPolynomial.of(0, 0, 1)
    assert eval_poly(square, 3, ctx5) == 4
    assert list(square.values(ctx5)) == [0, 1, 4, 4, 1]
    cubic = IntPolynomial.of(0, -3, 0, 2)
    assert [eval_poly(cubic, y, ctx5) for y in range(5)] == list(cubic.values(ctx5))


def test_eval_rational_reports_poles(ctx5: PrimeContext) -> None:
    inverse = RationalFunction(IntPolynomial.of(1), IntPolynomial.of(0, 1))
    assert eval_rational(inverse, 0, ctx5) is None
    assert eval_rational(inverse, 2, ctx5) == 3
    values, poles = inverse.values(ctx5)
    assert list(poles) == [True, False, False, False, False]
    assert list(values[1:]) == [1, 3, 2, 4]


def test_rational_coefficients_are_cleared(ctx5: PrimeContext) -> None:
    phi = RationalFunction.from_coefficients(["1/2"], [0, 1])
    assert phi.numerator.coeffs == (1,)
    assert phi.denominator.coeffs == (0, 2)
    # 1/(2y) at y = 1 is 1/2 = 3 mod 5
    assert eval_rational(phi, 1, ctx5) == 3


def test_degenerate_denominators(ctx5: PrimeContext) -> None:
    with pytest.raises(DegenerateDenominator):
        RationalFunction(IntPolynomial.of(1), IntPolynomial.of())
    vanishing = RationalFunction(IntPolynomial.of(1), IntPolynomial.of(0, 5))
    with pytest.raises(DegenerateDenominator):
        eval_rational(vanishing, 1, ctx5)
    with pytest.raises(DegenerateDenominator):
        vanishing.values(ctx5)


def test_linear_independence() -> None:
    assert linear_independence([IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1)])
    assert not linear_independence([IntPolynomial.of(0, 1), IntPolynomial.of(0, 2)])
    assert linear_independence([IntPolynomial.of(0, 1, 1), IntPolynomial.of(0, 1, -1)])


@pytest.mark.parametrize(
    "polys",
    [
        [IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1), IntPolynomial.of(0, 0, 0, 1)],
        [IntPolynomial.of(0, 1, 1), IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1)],
        [IntPolynomial.of(0, 2), IntPolynomial.of(0, 0, 3), IntPolynomial.of(0, 1, 1)],
    ],
)
def test_linear_independence_ignores_order(polys: list[IntPolynomial]) -> None:
    expected = linear_independence(polys)
    for ordering in itertools.permutations(polys):
        assert linear_independence(list(ordering)) == expected


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_eval_rational_inverts_the_denominator(p: int) -> None:
    ctx = make_prime_context(p)
    functions = [
        RationalFunction(IntPolynomial.of(1), IntPolynomial.of(0, 1)),
        RationalFunction(IntPolynomial.of(1, 0, 1), IntPolynomial.of(-1, 1)),
        RationalFunction(IntPolynomial.of(0, 3, 2), IntPolynomial.of(2, 0, 1)),
    ]
    for phi in functions:
        for y in range(p):
            value = eval_rational(phi, y, ctx)
            den = eval_poly(phi.denominator, y, ctx)
            if den == 0:
                assert value is None
                continue
            assert value is not None
            assert value * den % p == eval_poly(phi.numerator, y, ctx)


def test_system_validation() -> None:
    linear, square = IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1)
    with pytest.raises(NonIndependentPolys):
        ConfigurationSystem(1, ((1,), (1,)), (linear, IntPolynomial.of(0, 2)))
    with pytest.raises(InvalidConfig, match="constant term"):
        ConfigurationSystem(1, ((1,),), (IntPolynomial.of(1, 1),))
    with pytest.raises(InvalidConfig, match="zero vector"):
        ConfigurationSystem(2, ((0, 0),), (linear,))
    with pytest.raises(InvalidConfig):
        ConfigurationSystem(2, ((1, 0),), (linear, square))
    with pytest.raises(InvalidConfig):
        ConfigurationSystem(2, ((1,),), (linear,))


def test_system_document_round_trip() -> None:
    doc = {
        "D": 2,
        "vectors": [[1, 0], [0, 1]],
        "polys": [[0, 1], [0, 0, 1]],
        "phi": {"num": [1], "den": [0, 1]},
    }
    system = ConfigurationSystem.from_dict(doc)
    assert system.k == 2
    assert system.max_degree == 2
    assert system.to_dict() == doc
    assert ConfigurationSystem.from_dict(system.to_dict()) == system


def test_malformed_system_document() -> None:
    with pytest.raises(InvalidConfig):
        ConfigurationSystem.from_dict({"D": 1})
    with pytest.raises(InvalidConfig):
        ConfigurationSystem.from_dict({"D": 1, "vectors": [["a"]], "polys": [[0, 1]]})


def test_admissibility_collects_every_reason(
    plane_system: ConfigurationSystem, ctx5: PrimeContext
) -> None:
    assert check_admissible(plane_system, ctx5).admissible
    report = check_admissible(plane_system, make_prime_context(2))
    assert not report.admissible
    assert any("degree bound" in reason for reason in report.reasons)

    scaled = ConfigurationSystem(
        2, ((5, 0), (0, 1)), (IntPolynomial.of(0, 5), IntPolynomial.of(0, 0, 1))
    )
    reasons = check_admissible(scaled, ctx5).reasons
    assert "vector v_1 vanishes mod p" in reasons
    assert "leading coefficient of P_1 is divisible by p" in reasons
    with pytest.raises(Inadmissible) as info:
        require_admissible(scaled, ctx5)
    assert info.value.report.p == 5


def test_span_decompose(ctx5: PrimeContext) -> None:
    assert span_decompose((1, 2), (3, 4), ctx5) == ((0, 3), 3)
    assert span_decompose((0, 2), (3, 4), ctx5) == ((3, 0), 2)
    for x in all_points(2, 5):
        rep, t = span_decompose((2, 3), x, ctx5)
        assert rep[0] == 0
        assert tuple((r + t * c) % 5 for r, c in zip(rep, (2, 3))) == x


def test_zero_direction(ctx5: PrimeContext) -> None:
    with pytest.raises(ZeroDirection):
        span_decompose((5, 10), (1, 1), ctx5)


def test_coset_representatives(ctx5: PrimeContext) -> None:
    reps = coset_representatives((1, 2), 2, ctx5)
    assert reps.shape == (5, 2)
    assert not reps[:, 0].any()
    assert list(reps[:, 1]) == [0, 1, 2, 3, 4]
    assert coset_representatives((3,), 1, ctx5).shape == (1, 1)


def test_translate_reads_ahead() -> None:
    values = np.arange(5)
    assert list(translate(values, [1], 5)) == [1, 2, 3, 4, 0]
    assert list(translate(values, [-1], 5)) == [4, 0, 1, 2, 3]
    grid = np.arange(9).reshape(3, 3)
    assert translate(grid, [1, 2], 3)[0, 0] == grid[1, 2]


def test_all_points_is_row_major() -> None:
    assert list(all_points(2, 2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(list(all_points(3, 3))) == 27


def test_evaluation_examples(ctx5: PrimeContext, ctx7: PrimeContext) -> None:
    assert eval_poly(IntPolynomial.of(0, 0, 1), 3, ctx7) == 2
    assert eval_poly(IntPolynomial.of(), 4, ctx7) == 0
    assert eval_poly(IntPolynomial.of(0, 2, 0, 1), 4, ctx5) == 2
    shifted = RationalFunction(IntPolynomial.of(1, 0, 1), IntPolynomial.of(-1, 1))
    assert eval_rational(shifted, 1, ctx7) is None


def test_span_decompose_examples(ctx5: PrimeContext, ctx7: PrimeContext) -> None:
    assert span_decompose((1, 0), (3, 4), ctx5) == ((0, 4), 3)
    assert span_decompose((1, 2), (2, 4), ctx5) == ((0, 0), 2)
    assert span_decompose((0, 3), (1, 6), ctx7) == ((1, 0), 2)


def test_phi_vanishing_mod_p_is_inadmissible(ctx5: PrimeContext) -> None:
    system = ConfigurationSystem(
        1,
        ((1,), (1,)),
        (IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1)),
        RationalFunction(IntPolynomial.of(1), IntPolynomial.of(0, 5)),
    )
    assert "denominator of phi is identically zero mod p" in check_admissible(system, ctx5).reasons
