"""Prime-ladder campaigns: exact inequality suites, decay scans and configuration search."""

from __future__ import annotations

import asyncio
import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .config import DEFAULT_SETTINGS, ToolkitSettings
from .context_cache import context_for
from .errors import (
    EmptySuite,
    InsufficientLadder,
    InvalidConfig,
    MissingPhi,
    NonIndependentPolys,
)
from .ffcore import (
    ConfigurationSystem,
    IntPolynomial,
    Point,
    PrimeContext,
    RationalFunction,
    linear_independence,
    reduce_direction,
    require_admissible,
    span_decompose,
    translate,
)
from .fitting import MIN_FIT_ROWS, fit_loglog
from .fourier import (
    GridFunction,
    Subspace,
    WeightFunction,
    box_norm_power,
    box_norm_v_spectral,
    directional_fourier,
    directional_spectrum,
    inverse_bound,
    lp_norm,
    u_norm,
)
from .operators import (
    avg_G,
    counting_lambda,
    dual_F,
    l2_discrepancy,
    main_term,
    oracle_lambda,
)
from .weights import WeightSpec, realize_weight
from .workers import map_in_threads

logger = logging.getLogger(__name__)


class DecayTarget(enum.StrEnum):
    THM1_2 = "Thm1_2"
    THM1_3 = "Thm1_3"
    THM3_1 = "Thm3_1"
    PROP1_4 = "Prop1_4"


@dataclass(frozen=True, slots=True)
class DecayRow:
    p: int
    trials: int
    max_discrepancy: float
    mean_discrepancy: float


@dataclass(frozen=True, slots=True)
class DecayReport:
    """Per-prime discrepancies of one target, with a log-log slope fitted on the max column."""

    target: DecayTarget
    rows: tuple[DecayRow, ...]
    fitted_slope: float | None
    seed: int
    weight_kind: str
    density: float
    trials: int
    informational: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": str(self.target),
            "rows": [
                {
                    "p": row.p,
                    "max": row.max_discrepancy,
                    "mean": row.mean_discrepancy,
                    "trials": row.trials,
                }
                for row in self.rows
            ],
            "slope": self.fitted_slope,
            "seed": self.seed,
            "weight": self.weight_kind,
            "density": self.density,
            "trials": self.trials,
            "informational": self.informational,
        }


@dataclass(frozen=True, slots=True)
class FoundConfiguration:
    base: Point
    parameter: int
    points: tuple[Point, ...]
    nontrivial: bool
    all_distinct: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "found": True,
            "x": list(self.base),
            "y": self.parameter,
            "points": [list(point) for point in self.points],
            "nontrivial": self.nontrivial,
            "all_distinct": self.all_distinct,
        }


@dataclass(frozen=True, slots=True)
class ConfigurationCount:
    total: int
    nontrivial: int

    def to_dict(self) -> dict[str, int]:
        return {"total": self.total, "nontrivial": self.nontrivial}


@dataclass(slots=True)
class CheckResult:
    name: str
    cases: int = 0
    max_violation: float = 0.0

    def record(self, violation: float) -> None:
        self.cases += 1
        self.max_violation = max(self.max_violation, float(violation))


@dataclass(slots=True)
class SuiteReport:
    """Outcome of the exact identity and inequality suite."""

    seed: int
    primes: tuple[int, ...]
    trials_per_prime: int
    tolerance: float
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.max_violation <= self.tolerance for check in self.checks.values())

    @property
    def max_violation(self) -> float:
        return max((check.max_violation for check in self.checks.values()), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "primes": list(self.primes),
            "trials": self.trials_per_prime,
            "max_violation": self.max_violation,
            "rows": [
                {
                    "check": check.name,
                    "cases": check.cases,
                    "max_violation": check.max_violation,
                    "passed": check.max_violation <= self.tolerance,
                }
                for check in self.checks.values()
            ],
        }


def standard_system(dimension: int, rational: bool = False) -> ConfigurationSystem:
    """P = {y, y^2} along the coordinate axes (both along 1 when D = 1), phi = 1/y if asked."""

    if dimension == 1:
        vectors: tuple[tuple[int, ...], ...] = ((1,), (1,))
    else:
        vectors = tuple(tuple(int(i == j) for j in range(dimension)) for i in range(2))
    phi = RationalFunction(IntPolynomial.of(1), IntPolynomial.of(0, 1)) if rational else None
    return ConfigurationSystem(
        dimension=dimension,
        vectors=vectors,
        polys=(IntPolynomial.of(0, 1), IntPolynomial.of(0, 0, 1)),
        phi=phi,
    )


def _random_direction(dimension: int, ctx: PrimeContext, rng: np.random.Generator) -> Point:
    while True:
        v = tuple(int(c) for c in rng.integers(0, ctx.p, size=dimension))
        if any(v):
            return v


def _random_weight(p: int, rng: np.random.Generator) -> WeightFunction:
    radii = rng.random(p)
    return WeightFunction(p, radii * np.exp(2j * np.pi * rng.random(p)))


def _check_fourier(
    ctx: PrimeContext, rng: np.random.Generator, checks: dict[str, CheckResult]
) -> None:
    p = ctx.p
    table = ctx.char_table
    products = np.outer(table, table)
    sums = table[np.add.outer(np.arange(p), np.arange(p)) % p]
    checks["character_homomorphism"].record(np.max(np.abs(products - sums)))

    for dimension in (1, 2):
        f = GridFunction.random_bounded(p, dimension, rng)
        directions = [_random_direction(dimension, ctx, rng)]
        if dimension == 2:
            # (1, 2) is self-orthogonal whenever p = 5
            directions += [(1, 0), (1, 2)]
        for v in directions:
            x = tuple(int(c) for c in rng.integers(0, p, size=dimension))
            rep, t = span_decompose(v, x, ctx)
            recomposed = tuple((r + t * c) % p for r, c in zip(rep, v))
            checks["span_roundtrip"].record(0.0 if recomposed == x else 1.0)

            spectrum = directional_spectrum(f, v)
            step = np.asarray(spectrum.direction)
            energies = np.stack([
                np.abs(f.values[tuple(((spectrum.representatives + n * step) % p).T)]) ** 2
                for n in range(p)
            ])
            checks["parseval"].record(
                np.max(np.abs(spectrum.line_energy() - np.mean(energies, axis=0)))
            )
            checks["fourier_inversion"].record(np.max(np.abs(spectrum.reconstruct() - f.values)))

            m = int(rng.integers(1, p))
            moved = tuple((xc + m * vc) % p for xc, vc in zip(x, v))
            checks["coset_invariance"].record(
                max(
                    abs(
                        abs(directional_fourier(f, x, v, xi))
                        - abs(directional_fourier(f, moved, v, xi))
                    )
                    for xi in range(p)
                )
            )
            if dimension == 2:
                power = box_norm_power(f, _box_subspaces(dimension, v))
                checks["box_inverse_inequality"].record(max(0.0, power - inverse_bound(f, v)))
                checks["box_spectral_identity"].record(abs(power - box_norm_v_spectral(f, v)))

    theta = _random_weight(p, rng)
    direct = float(np.max(np.abs(np.fft.fft(theta.values)))) / p
    checks["u2_fourier_equivalence"].record(abs(u_norm(theta, 2) - direct))
    previous = u_norm(theta, 1)
    for s in (2, 3):
        current = u_norm(theta, s)
        checks["u_monotone"].record(max(0.0, previous - current))
        previous = current


def _box_subspaces(dimension: int, v: Point) -> list[Subspace]:
    return [Subspace.full(dimension), Subspace.line(v)]


def _check_operators(
    ctx: PrimeContext, rng: np.random.Generator, checks: dict[str, CheckResult]
) -> None:
    p = ctx.p
    system = standard_system(2)
    require_admissible(system, ctx)
    theta = _random_weight(p, rng)
    d = system.max_degree

    f1 = GridFunction.random_bounded(p, 2, rng)
    xi = (int(rng.integers(0, p)),)
    base = avg_G(theta, [f1], xi, system, ctx)
    checks["base_case"].record(max(0.0, lp_norm(base) - u_norm(theta, d + 1)))

    fs = [GridFunction.random_bounded(p, 2, rng) for _ in range(system.k)]
    for l in (1, 2):
        xis = tuple(int(c) for c in rng.integers(0, p, size=system.k - l))
        averaged = avg_G(theta, fs[:l], xis, system, ctx)
        dual = dual_F(theta, fs[:l], xis, system, ctx)
        g_sq = lp_norm(averaged) ** 2
        checks["cauchy_schwarz_step"].record(max(0.0, g_sq**2 - lp_norm(dual) ** 2))
        pairing = complex(np.mean(dual.values * np.conj(fs[l - 1].values)))
        checks["dual_pairing"].record(abs(g_sq - pairing))
        bound = theta.sup() * np.prod([f.sup() for f in fs[:l]])
        checks["boundedness"].record(max(0.0, averaged.sup() - bound))
        checks["boundedness"].record(max(0.0, dual.sup() - theta.sup() ** 2))

    centred = theta.centered()
    flat = WeightFunction(p, np.full(p, theta.mean()), bounded=False)
    split = avg_G(centred, fs, (), system, ctx).values + avg_G(flat, fs, (), system, ctx).values
    checks["weight_split"].record(np.max(np.abs(avg_G(theta, fs, (), system, ctx).values - split)))

    for dimension, rational in ((1, False), (2, False), (1, True)):
        counted = standard_system(dimension, rational)
        require_admissible(counted, ctx)
        gs = [GridFunction.random_bounded(p, dimension, rng) for _ in range(counted.k + 1)]
        fast = counting_lambda(theta, gs, counted, ctx, exclude_poles=rational)
        slow = oracle_lambda(theta, gs, counted, ctx, exclude_poles=rational)
        checks["oracle_agreement"].record(abs(fast - slow))
        checks["boundedness"].record(max(0.0, abs(fast) - 1.0))

        slot = int(rng.integers(0, counted.k + 1))
        alpha, beta = np.exp(2j * np.pi * rng.random(2)) * rng.random(2)
        g = GridFunction.random_bounded(p, dimension, rng)
        h = GridFunction.random_bounded(p, dimension, rng)

        def with_slot(replacement: GridFunction) -> list[GridFunction]:
            return [replacement if i == slot else gi for i, gi in enumerate(gs)]

        mixed = GridFunction(p, alpha * g.values + beta * h.values, bounded=False)
        lhs = counting_lambda(theta, with_slot(mixed), counted, ctx, exclude_poles=rational)
        rhs = alpha * counting_lambda(
            theta, with_slot(g), counted, ctx, exclude_poles=rational
        ) + beta * counting_lambda(theta, with_slot(h), counted, ctx, exclude_poles=rational)
        checks["multilinearity"].record(abs(lhs - rhs))

        a = tuple(int(c) for c in rng.integers(0, p, size=dimension))
        moved = [gi.shifted(a) for gi in gs]
        shifted = counting_lambda(theta, moved, counted, ctx, exclude_poles=rational)
        checks["translation_invariance"].record(abs(shifted - fast))


SUITE_CHECKS: tuple[str, ...] = (
    "character_homomorphism",
    "span_roundtrip",
    "parseval",
    "fourier_inversion",
    "coset_invariance",
    "box_inverse_inequality",
    "box_spectral_identity",
    "u2_fourier_equivalence",
    "u_monotone",
    "base_case",
    "cauchy_schwarz_step",
    "dual_pairing",
    "weight_split",
    "boundedness",
    "oracle_agreement",
    "multilinearity",
    "translation_invariance",
)


async def verify_exact_suite(
    seed: int,
    primes: Sequence[int],
    trials_per_prime: int,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> SuiteReport:
    """Run every exact identity and constant-free inequality on seeded random inputs."""

    if trials_per_prime < 1:
        raise EmptySuite("the exact suite needs at least one trial per prime")
    ladder = tuple(sorted(set(int(p) for p in primes)))
    if not ladder:
        raise EmptySuite("the exact suite needs at least one prime")
    contexts = [context_for(p) for p in ladder]
    for ctx in contexts:
        require_admissible(standard_system(2, rational=True), ctx)

    def run(unit: tuple[PrimeContext, int]) -> dict[str, CheckResult]:
        ctx, trial = unit
        rng = np.random.default_rng([seed, ctx.p, trial])
        checks = {name: CheckResult(name) for name in SUITE_CHECKS}
        _check_fourier(ctx, rng, checks)
        _check_operators(ctx, rng, checks)
        logger.debug("suite p=%d trial=%d done", ctx.p, trial)
        return checks

    units = list(itertools.product(contexts, range(trials_per_prime)))
    outcomes = await map_in_threads(run, units, settings.threads)
    report = SuiteReport(
        seed=seed,
        primes=ladder,
        trials_per_prime=trials_per_prime,
        tolerance=settings.tolerance,
        checks={name: CheckResult(name) for name in SUITE_CHECKS},
    )
    for outcome in outcomes:
        for name, partial in outcome.items():
            merged = report.checks[name]
            merged.cases += partial.cases
            merged.max_violation = max(merged.max_violation, partial.max_violation)
    logger.info(
        "exact suite seed=%d primes=%s: %s (max violation %.3g)",
        seed,
        list(ladder),
        "pass" if report.passed else "FAIL",
        report.max_violation,
    )
    return report


def verify_exact_suite_sync(
    seed: int,
    primes: Sequence[int],
    trials_per_prime: int,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> SuiteReport:
    return asyncio.run(verify_exact_suite(seed, primes, trials_per_prime, settings))


def _is_informational(target: DecayTarget, weight: WeightSpec, system: ConfigurationSystem) -> bool:
    """Polynomial phases of degree <= d are matched by the u^{d+1} norm: no decay is expected."""
    return (
        target is DecayTarget.THM1_2
        and weight.kind == "poly_phase"
        and weight.poly is not None
        and weight.poly.degree <= system.max_degree
    )


def _discrepancy(
    target: DecayTarget,
    theta: WeightFunction,
    system: ConfigurationSystem,
    ctx: PrimeContext,
    rng: np.random.Generator,
    density: float,
) -> float:
    p, dimension = ctx.p, system.dimension
    if target is DecayTarget.THM1_2:
        fs = [GridFunction.random_unit(p, dimension, rng) for _ in range(system.k)]
        return l2_discrepancy(theta, fs, system, ctx)
    fs = [GridFunction.bernoulli(p, dimension, density, rng) for _ in range(system.k + 1)]
    counted = counting_lambda(
        theta, fs, system, ctx, exclude_poles=target is DecayTarget.PROP1_4
    )
    return abs(counted - main_term(theta, fs, system, ctx))


async def scan_decay(
    target: DecayTarget | str,
    system: ConfigurationSystem,
    weight: WeightSpec,
    primes: Sequence[int],
    trials: int,
    density: float,
    seed: int,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> DecayReport:
    """Measure |count - main term| (or the L^2 deviation) along a prime ladder and fit its decay."""

    target = DecayTarget(target)
    if not linear_independence(system.polys):
        raise NonIndependentPolys("the polynomials P_i are linearly dependent over Q")
    ladder = sorted(set(int(p) for p in primes))
    if len(ladder) < MIN_FIT_ROWS:
        raise InsufficientLadder(f"a decay scan needs at least {MIN_FIT_ROWS} primes")
    if trials < 1:
        raise EmptySuite("a decay scan needs at least one trial per prime")
    if not 0.0 < density < 1.0:
        raise InvalidConfig("density must lie strictly between 0 and 1")
    if target is DecayTarget.PROP1_4 and system.phi is None:
        raise MissingPhi("the rational-progression target needs a rational function phi")
    if target is DecayTarget.THM3_1 and weight.kind != "constant":
        raise InvalidConfig("the unweighted target needs a constant weight")

    contexts = [context_for(p) for p in ladder]
    for ctx in contexts:
        require_admissible(system, ctx)
    weights = {ctx.p: realize_weight(weight, ctx) for ctx in contexts}
    informational = _is_informational(target, weight, system)
    if informational:
        logger.warning(
            "weight %s is not strongly %d-uniform: rows are informational",
            weight.kind,
            system.max_degree + 1,
        )

    def run(unit: tuple[PrimeContext, int]) -> float:
        ctx, trial = unit
        rng = np.random.default_rng([seed, ctx.p, trial])
        value = _discrepancy(target, weights[ctx.p], system, ctx, rng, density)
        logger.debug("%s p=%d trial=%d discrepancy=%.6g", target, ctx.p, trial, value)
        return value

    units = list(itertools.product(contexts, range(trials)))
    values = await map_in_threads(run, units, settings.threads)
    rows = []
    for index, ctx in enumerate(contexts):
        chunk = np.asarray(values[index * trials : (index + 1) * trials])
        rows.append(
            DecayRow(
                p=ctx.p,
                trials=trials,
                max_discrepancy=float(np.max(chunk)),
                mean_discrepancy=float(np.mean(chunk)),
            )
        )
    fit = fit_loglog([row.p for row in rows], [row.max_discrepancy for row in rows])
    report = DecayReport(
        target=target,
        rows=tuple(rows),
        fitted_slope=None if fit is None else fit.slope,
        seed=seed,
        weight_kind=weight.kind,
        density=density,
        trials=trials,
        informational=informational,
    )
    logger.info("%s scan over %s: slope=%s", target, ladder, report.fitted_slope)
    return report


def scan_decay_sync(
    target: DecayTarget | str,
    system: ConfigurationSystem,
    weight: WeightSpec,
    primes: Sequence[int],
    trials: int,
    density: float,
    seed: int,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> DecayReport:
    return asyncio.run(
        scan_decay(target, system, weight, primes, trials, density, seed, settings)
    )


def _progression_shifts(
    system: ConfigurationSystem, ctx: PrimeContext
) -> tuple[np.ndarray, np.ndarray]:
    """(non-pole y, shift vectors P_i(phi(y)) v_i mod p with shape (m, k, D))."""

    if system.phi is None:
        raise MissingPhi("configuration search needs a rational function phi")
    require_admissible(system, ctx)
    phis, poles = system.phi.values(ctx)
    ys = ctx.elements()[~poles]
    params = phis[~poles]
    vectors = np.asarray([reduce_direction(v, ctx) for v in system.vectors], dtype=np.int64)
    scalars = np.stack([poly.values(ctx)[params] for poly in system.polys], axis=1)
    return ys, (scalars[:, :, None] * vectors[None, :, :]) % ctx.p


def _membership(
    mask: np.ndarray, shifts: np.ndarray, ctx: PrimeContext
) -> np.ndarray:
    """For every admitted y, the set of x with x and every x + shift_i in the set."""

    hits = np.empty((shifts.shape[0],) + mask.shape, dtype=bool)
    for index, row in enumerate(shifts):
        hit = mask.copy()
        for shift in row:
            hit &= translate(mask, shift, ctx.p)
        hits[index] = hit
    return hits


def find_configuration(
    indicator: GridFunction, system: ConfigurationSystem, ctx: PrimeContext
) -> FoundConfiguration | None:
    """First (x, y) in lexicographic order whose nontrivial progression lies in the set."""

    ys, shifts = _progression_shifts(system, ctx)
    nontrivial = np.any(shifts != 0, axis=(1, 2))
    ys, shifts = ys[nontrivial], shifts[nontrivial]
    if len(ys) == 0:
        return None
    mask = indicator.values.real > 0.5
    hits = _membership(mask, shifts, ctx).reshape(len(ys), -1)
    covered = np.any(hits, axis=0)
    if not covered.any():
        return None
    flat = int(np.argmax(covered))
    index = int(np.argmax(hits[:, flat]))
    base = tuple(int(c) for c in np.unravel_index(flat, mask.shape))
    points = (base,) + tuple(
        tuple(int((b + s) % ctx.p) for b, s in zip(base, shift)) for shift in shifts[index]
    )
    return FoundConfiguration(
        base=base,
        parameter=int(ys[index]),
        points=points,
        nontrivial=True,
        all_distinct=len(set(points)) == len(points),
    )


def count_configurations(
    indicator: GridFunction, system: ConfigurationSystem, ctx: PrimeContext
) -> ConfigurationCount:
    """Count the (x, y), y not a pole, whose progression lies in the set."""

    ys, shifts = _progression_shifts(system, ctx)
    if len(ys) == 0:
        return ConfigurationCount(total=0, nontrivial=0)
    mask = indicator.values.real > 0.5
    per_y = _membership(mask, shifts, ctx).reshape(len(ys), -1).sum(axis=1)
    nontrivial = np.any(shifts != 0, axis=(1, 2))
    return ConfigurationCount(total=int(per_y.sum()), nontrivial=int(per_y[nontrivial].sum()))


__all__ = [
    "CheckResult",
    "ConfigurationCount",
    "DecayReport",
    "DecayRow",
    "DecayTarget",
    "FoundConfiguration",
    "SUITE_CHECKS",
    "SuiteReport",
    "count_configurations",
    "find_configuration",
    "scan_decay",
    "scan_decay_sync",
    "standard_system",
    "verify_exact_suite",
    "verify_exact_suite_sync",
]
