"""Prime-field arithmetic, polynomial systems and admissibility checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import sympy

from .errors import (
    DegenerateDenominator,
    Inadmissible,
    InvalidConfig,
    NonIndependentPolys,
    NotPrime,
    ZeroDirection,
)

logger = logging.getLogger(__name__)

Point = tuple[int, ...]


@dataclass(frozen=True, slots=True, eq=False)
class PrimeContext:
    """A prime modulus together with its additive character table e_p(x)."""

    p: int
    char_table: np.ndarray = field(repr=False)

    def e(self, x: int | np.ndarray) -> complex | np.ndarray:
        """Return e_p(x) for an integer or an integer array, reducing mod p first."""
        return self.char_table[np.mod(x, self.p)]

    def inverse(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return pow(a, -1, self.p)

    def elements(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)


def make_prime_context(p: int) -> PrimeContext:
    """Validate ``p`` and fill its character table."""

    if p < 2 or not sympy.isprime(p):
        raise NotPrime(p)
    angles = 2.0 * np.pi * np.arange(p, dtype=np.float64) / p
    table = np.cos(angles) + 1j * np.sin(angles)
    table[0] = 1.0 + 0.0j
    if p == 2:
        table[1] = -1.0 + 0.0j
    table.setflags(write=False)
    return PrimeContext(p=p, char_table=table)


@dataclass(frozen=True, slots=True)
class IntPolynomial:
    """Univariate integer polynomial with ascending-degree coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def of(cls, *coeffs: int) -> "IntPolynomial":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def constant(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def reduce(self, p: int) -> tuple[int, ...]:
        return tuple(c % p for c in self.coeffs)

    def is_zero_mod(self, p: int) -> bool:
        return all(c % p == 0 for c in self.coeffs)

    def values(self, ctx: PrimeContext) -> np.ndarray:
        """P(y) mod p for every y in F_p, as an int64 array."""
        ys = ctx.elements()
        acc = np.zeros(ctx.p, dtype=np.int64)
        for c in reversed(self.reduce(ctx.p)):
            acc = (acc * ys + c) % ctx.p
        return acc

    def to_list(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True, slots=True)
class RationalFunction:
    """Quotient of two integer polynomials; rational coefficients are cleared at construction."""

    numerator: IntPolynomial
    denominator: IntPolynomial

    def __post_init__(self) -> None:
        if self.denominator.is_zero:
            raise DegenerateDenominator("rational function denominator is the zero polynomial")

    @classmethod
    def from_coefficients(
        cls, numerator: Sequence[Any], denominator: Sequence[Any]
    ) -> "RationalFunction":
        """Build from ascending coefficient lists that may hold fractions like ``"1/2"``."""

        num = [Fraction(c) for c in numerator]
        den = [Fraction(c) for c in denominator]
        scale = lcm(1, *(c.denominator for c in num + den))
        return cls(
            IntPolynomial(tuple(int(c * scale) for c in num)),
            IntPolynomial(tuple(int(c * scale) for c in den)),
        )

    def values(self, ctx: PrimeContext) -> tuple[np.ndarray, np.ndarray]:
        """Return (phi(y) mod p, pole mask) over F_p; pole entries hold 0."""
        if self.denominator.is_zero_mod(ctx.p):
            raise DegenerateDenominator(f"denominator vanishes identically mod {ctx.p}")
        num = self.numerator.values(ctx)
        den = self.denominator.values(ctx)
        poles = den == 0
        inverses = np.array(
            [0 if d == 0 else pow(int(d), -1, ctx.p) for d in den], dtype=np.int64
        )
        return (num * inverses) % ctx.p, poles

    def to_dict(self) -> dict[str, list[int]]:
        return {"num": self.numerator.to_list(), "den": self.denominator.to_list()}


def eval_poly(poly: IntPolynomial, y: int, ctx: PrimeContext) -> int:
    """Horner evaluation of ``poly`` at ``y`` in exact modular integers."""

    p = ctx.p
    acc = 0
    for c in reversed(poly.coeffs):
        acc = (acc * y + c) % p
    return acc % p


def eval_rational(phi: RationalFunction, y: int, ctx: PrimeContext) -> int | None:
    """Return phi(y) mod p, or ``None`` when y is a pole."""

    if phi.denominator.is_zero_mod(ctx.p):
        raise DegenerateDenominator(f"denominator vanishes identically mod {ctx.p}")
    den = eval_poly(phi.denominator, y, ctx)
    if den == 0:
        return None
    return eval_poly(phi.numerator, y, ctx) * pow(den, -1, ctx.p) % ctx.p


def linear_independence(polys: Sequence[IntPolynomial]) -> bool:
    """Exact rank test of the coefficient matrix over the rationals."""

    if not polys:
        return True
    width = max(len(poly.coeffs) for poly in polys)
    if width == 0:
        return False
    rows = [list(poly.coeffs) + [0] * (width - len(poly.coeffs)) for poly in polys]
    return sympy.Matrix(rows).rank() == len(polys)


@dataclass(frozen=True, slots=True)
class ConfigurationSystem:
    """The data (V, P, phi): directions v_i in Z^D, polynomials P_i and an optional phi."""

    dimension: int
    vectors: tuple[tuple[int, ...], ...]
    polys: tuple[IntPolynomial, ...]
    phi: RationalFunction | None = None

    def __post_init__(self) -> None:
        vectors = tuple(tuple(int(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "polys", tuple(self.polys))
        if self.dimension < 1:
            raise InvalidConfig("dimension D must be positive")
        if not vectors:
            raise InvalidConfig("a configuration system needs at least one vector")
        if len(vectors) != len(self.polys):
            raise InvalidConfig(
                f"got {len(vectors)} vectors but {len(self.polys)} polynomials"
            )
        for index, v in enumerate(vectors, start=1):
            if len(v) != self.dimension:
                raise InvalidConfig(f"v_{index} has length {len(v)}, expected {self.dimension}")
            if not any(v):
                raise InvalidConfig(f"v_{index} is the zero vector")
        for index, poly in enumerate(self.polys, start=1):
            if poly.constant != 0:
                raise InvalidConfig(f"P_{index} has a nonzero constant term")
        if self.max_degree < 1:
            raise InvalidConfig("the maximal degree d must be at least 1")
        if not linear_independence(self.polys):
            raise NonIndependentPolys("the polynomials P_i are linearly dependent over Q")

    @property
    def k(self) -> int:
        return len(self.polys)

    @property
    def max_degree(self) -> int:
        return max(poly.degree for poly in self.polys)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ConfigurationSystem":
        """Ingest ``{"D", "vectors", "polys", "phi": {"num", "den"}}``."""

        try:
            dimension = int(doc["D"])
            vectors = tuple(tuple(int(c) for c in v) for v in doc["vectors"])
            polys = tuple(IntPolynomial(tuple(int(c) for c in coeffs)) for coeffs in doc["polys"])
            phi_doc = doc.get("phi")
            phi = (
                RationalFunction.from_coefficients(phi_doc["num"], phi_doc["den"])
                if phi_doc
                else None
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, (NonIndependentPolys, InvalidConfig, DegenerateDenominator)):
                raise
            raise InvalidConfig(f"malformed configuration system: {exc}") from exc
        return cls(dimension=dimension, vectors=vectors, polys=polys, phi=phi)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "D": self.dimension,
            "vectors": [list(v) for v in self.vectors],
            "polys": [poly.to_list() for poly in self.polys],
        }
        if self.phi is not None:
            doc["phi"] = self.phi.to_dict()
        return doc


@dataclass(frozen=True, slots=True)
class AdmissibilityReport:
    p: int
    reasons: tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return not self.reasons


def check_admissible(system: ConfigurationSystem, ctx: PrimeContext) -> AdmissibilityReport:
    """Collect every condition that makes ``system`` unusable at p."""

    p = ctx.p
    reasons: list[str] = []
    for index, v in enumerate(system.vectors, start=1):
        if all(c % p == 0 for c in v):
            reasons.append(f"vector v_{index} vanishes mod p")
    if p <= system.max_degree:
        reasons.append(f"p={p} does not exceed the degree bound d={system.max_degree}")
    for index, poly in enumerate(system.polys, start=1):
        if poly.leading % p == 0:
            reasons.append(f"leading coefficient of P_{index} is divisible by p")
    if system.phi is not None:
        for label, poly in (
            ("numerator", system.phi.numerator),
            ("denominator", system.phi.denominator),
        ):
            if poly.is_zero_mod(p):
                reasons.append(f"{label} of phi is identically zero mod p")
            elif poly.leading % p == 0:
                reasons.append(f"leading coefficient of the {label} of phi is divisible by p")
    return AdmissibilityReport(p=p, reasons=tuple(reasons))


def require_admissible(system: ConfigurationSystem, ctx: PrimeContext) -> None:
    report = check_admissible(system, ctx)
    if not report.admissible:
        logger.warning("refusing p=%d: %s", ctx.p, "; ".join(report.reasons))
        raise Inadmissible(report)


def reduce_direction(v: Sequence[int], ctx: PrimeContext) -> Point:
    reduced = tuple(int(c) % ctx.p for c in v)
    if not any(reduced):
        raise ZeroDirection(f"direction {tuple(v)} vanishes mod {ctx.p}")
    return reduced


def pivot_index(v: Sequence[int], ctx: PrimeContext) -> int:
    """First coordinate where ``v`` is nonzero mod p."""
    reduced = reduce_direction(v, ctx)
    return next(i for i, c in enumerate(reduced) if c)


def span_decompose(v: Sequence[int], x: Sequence[int], ctx: PrimeContext) -> tuple[Point, int]:
    """Split x = coset_rep + t*v with coset_rep zero in the pivot coordinate of v."""

    p = ctx.p
    reduced = reduce_direction(v, ctx)
    pivot = next(i for i, c in enumerate(reduced) if c)
    t = int(x[pivot]) * pow(reduced[pivot], -1, p) % p
    rep = tuple((int(xi) - t * vi) % p for xi, vi in zip(x, reduced))
    return rep, t


def coset_representatives(v: Sequence[int], dimension: int, ctx: PrimeContext) -> np.ndarray:
    """All points with 0 in the pivot coordinate of v, shape (p^{D-1}, D), row-major order."""

    pivot = pivot_index(v, ctx)
    free = [axis for axis in range(dimension) if axis != pivot]
    reps = np.zeros((ctx.p ** len(free), dimension), dtype=np.int64)
    if free:
        grid = np.indices((ctx.p,) * len(free)).reshape(len(free), -1).T
        reps[:, free] = grid
    return reps


def translate(values: np.ndarray, shift: Iterable[int], p: int) -> np.ndarray:
    """Return the grid x -> values[x + shift] (indices mod p)."""

    offsets = tuple(-(int(s) % p) for s in shift)
    if not any(offsets):
        return values
    return np.roll(values, offsets, axis=tuple(range(values.ndim)))


def all_points(dimension: int, p: int) -> Iterable[Point]:
    """F_p^D in row-major (lexicographic) order."""
    if dimension == 0:
        yield ()
        return
    for head in range(p):
        for tail in all_points(dimension - 1, p):
            yield (head, *tail)


__all__ = [
    "AdmissibilityReport",
    "ConfigurationSystem",
    "IntPolynomial",
    "Point",
    "PrimeContext",
    "RationalFunction",
    "all_points",
    "check_admissible",
    "coset_representatives",
    "eval_poly",
    "eval_rational",
    "linear_independence",
    "make_prime_context",
    "pivot_index",
    "reduce_direction",
    "require_admissible",
    "span_decompose",
    "translate",
]
