"""Weighted averaging operators, dual functions and progression counts on F_p^D."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .config import DEFAULT_SETTINGS, ToolkitSettings
from .errors import ArityMismatch, BudgetExceeded, MissingPhi
from .ffcore import (
    ConfigurationSystem,
    PrimeContext,
    all_points,
    eval_poly,
    eval_rational,
    reduce_direction,
    require_admissible,
    translate,
)
from .fourier import GridFunction, WeightFunction

logger = logging.getLogger(__name__)

FrequencyVector = tuple[int, ...]


def _check_inputs(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
    expected: int,
) -> None:
    require_admissible(system, ctx)
    if len(fs) != expected:
        raise ArityMismatch(f"expected {expected} functions, got {len(fs)}")
    if theta.p != ctx.p:
        raise ArityMismatch(f"weight lives on F_{theta.p}, context is F_{ctx.p}")
    for f in fs:
        if f.p != ctx.p or f.dimension != system.dimension:
            raise ArityMismatch(
                f"grid on F_{f.p}^{f.dimension} does not match F_{ctx.p}^{system.dimension}"
            )


def shift_table(f: GridFunction, v: Sequence[int], ctx: PrimeContext) -> np.ndarray:
    """T[n] = (x -> f(x + n v)) for every n in F_p; shape (p, *grid)."""

    reduced = reduce_direction(v, ctx)
    return np.stack([
        translate(f.values, [n * c for c in reduced], ctx.p) for n in range(ctx.p)
    ])


def _parameters(
    system: ConfigurationSystem, ctx: PrimeContext, exclude_poles: bool
) -> tuple[np.ndarray, np.ndarray]:
    """(admitted y, a(y)) with a(y) = y, or a(y) = phi(y) over the non-poles."""

    ys = ctx.elements()
    if not exclude_poles:
        return ys, ys
    if system.phi is None:
        raise MissingPhi("pole-excluding mode needs a rational function phi")
    values, poles = system.phi.values(ctx)
    return ys[~poles], values[~poles]


def _line_products(
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
    params: np.ndarray,
) -> np.ndarray:
    """prod_i f_i(x + P_i(a) v_i) for every a in ``params``; shape (len(params), *grid)."""

    shape = (len(params),) + (ctx.p,) * system.dimension
    product = np.ones(shape, dtype=np.complex128)
    for f, v, poly in zip(fs, system.vectors, system.polys):
        table = shift_table(f, v, ctx)
        product *= table[poly.values(ctx)[params]]
    return product


def _phase_factor(
    xis: Sequence[int], system: ConfigurationSystem, ctx: PrimeContext, l: int
) -> np.ndarray:
    """prod_{i > l} e_p(P_i(y) xi_i) for every y."""

    exponent = np.zeros(ctx.p, dtype=np.int64)
    for poly, xi in zip(system.polys[l:], xis):
        exponent = (exponent + poly.values(ctx) * (int(xi) % ctx.p)) % ctx.p
    return ctx.e(exponent)


def _check_frequencies(xis: Sequence[int], system: ConfigurationSystem, l: int) -> FrequencyVector:
    if not 1 <= l <= system.k:
        raise ArityMismatch(f"need 1 <= l <= k={system.k}, got l={l}")
    if len(xis) != system.k - l:
        raise ArityMismatch(f"expected {system.k - l} frequencies, got {len(xis)}")
    return tuple(int(xi) for xi in xis)


def avg_G(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    xis: Sequence[int],
    system: ConfigurationSystem,
    ctx: PrimeContext,
) -> GridFunction:
    """G_{l,k}(x) = E_y theta(y) prod_{i<=l} f_i(x + P_i(y) v_i) prod_{i>l} e_p(P_i(y) xi_i)."""

    l = len(fs)
    xis = _check_frequencies(xis, system, l)
    _check_inputs(theta, fs, system, ctx, l)
    ys = ctx.elements()
    coefficients = theta.values * _phase_factor(xis, system, ctx, l)
    products = _line_products(fs, system, ctx, ys)
    values = np.tensordot(coefficients, products, axes=(0, 0)) / ctx.p
    return GridFunction(ctx.p, values, bounded=False)


def dual_F(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    xis: Sequence[int],
    system: ConfigurationSystem,
    ctx: PrimeContext,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> GridFunction:
    """Dual function F_{l,k}, summed directly over the (y, y') double loop."""

    l = len(fs)
    xis = _check_frequencies(xis, system, l)
    _check_inputs(theta, fs, system, ctx, l)
    p = ctx.p
    terms = p ** (system.dimension + 2)
    if terms > settings.dual_budget:
        raise BudgetExceeded(
            f"dual function needs {terms} terms at p={p}, budget is {settings.dual_budget}"
        )

    tables = [shift_table(f, v, ctx) for f, v in zip(fs, system.vectors)]
    shifts = [poly.values(ctx) for poly in system.polys]
    phases = _phase_factor(xis, system, ctx, l)
    last = l - 1
    last_direction = reduce_direction(system.vectors[last], ctx)
    total = np.zeros((p,) * system.dimension, dtype=np.complex128)
    for y_prime in range(p):
        back = [-shifts[last][y_prime] * c for c in last_direction]
        outer = np.conj(theta.values[y_prime] * phases[y_prime]) * np.ones_like(total)
        for i in range(last):
            outer = outer * np.conj(translate(tables[i][shifts[i][y_prime]], back, p))
        inner = np.zeros_like(total)
        for y in range(p):
            term = theta.values[y] * phases[y] * np.ones_like(total)
            for i in range(l):
                term = term * translate(tables[i][shifts[i][y]], back, p)
            inner += term
        total += outer * inner
    return GridFunction(p, total / p**2, bounded=False)


def counting_lambda(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
    exclude_poles: bool = False,
) -> complex:
    """E_x E_y theta(y) f_0(x) prod_i f_i(x + P_i(a(y)) v_i).

    a(y) = y by default; with ``exclude_poles`` it is phi(y) and y ranges over the non-poles.
    """

    _check_inputs(theta, fs, system, ctx, system.k + 1)
    ys, params = _parameters(system, ctx, exclude_poles)
    if len(ys) == 0:
        return 0.0 + 0.0j
    products = _line_products(fs[1:], system, ctx, params)
    per_y = products.reshape(len(ys), -1) @ fs[0].flat / fs[0].flat.size
    return complex(np.dot(theta.values[ys], per_y) / len(ys))


def oracle_lambda(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
    exclude_poles: bool = False,
) -> complex:
    """Nested-loop reference for ``counting_lambda``: no tables, no vectorisation."""

    _check_inputs(theta, fs, system, ctx, system.k + 1)
    if exclude_poles and system.phi is None:
        raise MissingPhi("pole-excluding mode needs a rational function phi")
    p = ctx.p
    total = 0.0 + 0.0j
    admitted = 0
    for y in range(p):
        a = eval_rational(system.phi, y, ctx) if exclude_poles else y
        if a is None:
            continue
        admitted += 1
        shifts = [eval_poly(poly, a, ctx) for poly in system.polys]
        weight = complex(theta.values[y])
        for x in all_points(system.dimension, p):
            term = weight * fs[0](x)
            for f, v, n in zip(fs[1:], system.vectors, shifts):
                term *= f(tuple((xc + n * vc) % p for xc, vc in zip(x, v)))
            total += term
    if admitted == 0:
        return 0.0 + 0.0j
    return total / (admitted * p**system.dimension)


def line_average(f: GridFunction, v: Sequence[int], ctx: PrimeContext) -> GridFunction:
    """x -> E_n f(x + n v)."""

    return GridFunction(ctx.p, np.mean(shift_table(f, v, ctx), axis=0), f.bounded)


def structured_average(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
) -> GridFunction:
    """x -> E_y theta(y) prod_i E_{n_i} f_i(x + n_i v_i)."""

    _check_inputs(theta, fs, system, ctx, system.k)
    values = np.full((ctx.p,) * system.dimension, theta.mean(), dtype=np.complex128)
    for f, v in zip(fs, system.vectors):
        values = values * line_average(f, v, ctx).values
    return GridFunction(ctx.p, values, bounded=False)


def main_term(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
) -> complex:
    """E_y theta(y) * E_x f_0(x) prod_i E_{n_i} f_i(x + n_i v_i)."""

    _check_inputs(theta, fs, system, ctx, system.k + 1)
    structured = structured_average(theta, fs[1:], system, ctx)
    return complex(np.mean(fs[0].values * structured.values))


def l2_discrepancy(
    theta: WeightFunction,
    fs: Sequence[GridFunction],
    system: ConfigurationSystem,
    ctx: PrimeContext,
) -> float:
    """E_x |G_k(x) - E_y theta(y) prod_i E_{n_i} f_i(x + n_i v_i)|^2."""

    averaged = avg_G(theta, fs, (), system, ctx)
    structured = structured_average(theta, fs, system, ctx)
    return float(np.mean(np.abs(averaged.values - structured.values) ** 2))


__all__ = [
    "FrequencyVector",
    "avg_G",
    "counting_lambda",
    "dual_F",
    "l2_discrepancy",
    "line_average",
    "main_term",
    "oracle_lambda",
    "shift_table",
    "structured_average",
]
