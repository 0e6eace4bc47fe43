"""Weight families on F_p and empirical strong-uniformity profiles."""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import Any, Literal, Mapping, Sequence

import numpy as np

from .config import DEFAULT_SETTINGS, ToolkitSettings
from .context_cache import context_for
from .errors import InsufficientLadder, InvalidConfig
from .ffcore import IntPolynomial, PrimeContext, RationalFunction
from .fitting import MIN_FIT_ROWS, ZERO_FLOOR, fit_loglog
from .fourier import WeightFunction, u_norm
from .workers import map_in_threads

logger = logging.getLogger(__name__)

WeightKind = Literal["constant", "poly_phase", "rational_phase", "balanced_indicator", "random"]
WEIGHT_KINDS: tuple[str, ...] = (
    "constant",
    "poly_phase",
    "rational_phase",
    "balanced_indicator",
    "random",
)


@dataclass(frozen=True, slots=True)
class WeightSpec:
    """Description of a weight family, realised separately at each prime."""

    kind: WeightKind
    value: complex = 1.0
    poly: IntPolynomial | None = None
    phi: RationalFunction | None = None
    support: tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise InvalidConfig(f"unknown weight kind {self.kind!r}")
        if self.kind == "constant" and abs(self.value) > 1.0:
            raise InvalidConfig("constant weights must be 1-bounded")
        if self.kind == "poly_phase" and self.poly is None:
            raise InvalidConfig("poly_phase weights need a polynomial")
        if self.kind == "rational_phase" and self.phi is None:
            raise InvalidConfig("rational_phase weights need a rational function")

    @classmethod
    def constant(cls, value: complex = 1.0) -> "WeightSpec":
        return cls("constant", value=value)

    @classmethod
    def poly_phase(cls, poly: IntPolynomial) -> "WeightSpec":
        return cls("poly_phase", poly=poly)

    @classmethod
    def rational_phase(cls, phi: RationalFunction) -> "WeightSpec":
        return cls("rational_phase", phi=phi)

    @classmethod
    def balanced_indicator(cls, support: Sequence[int]) -> "WeightSpec":
        return cls("balanced_indicator", support=tuple(int(s) for s in support))

    @classmethod
    def random(cls, seed: int) -> "WeightSpec":
        return cls("random", seed=int(seed))

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "WeightSpec":
        try:
            kind = doc["kind"]
            if kind == "constant":
                raw = doc.get("value", 1.0)
                value = complex(*raw) if isinstance(raw, (list, tuple)) else complex(raw)
                return cls.constant(value)
            if kind == "poly_phase":
                return cls.poly_phase(IntPolynomial(tuple(int(c) for c in doc["poly"])))
            if kind == "rational_phase":
                return cls.rational_phase(
                    RationalFunction.from_coefficients(doc["num"], doc["den"])
                )
            if kind == "balanced_indicator":
                return cls.balanced_indicator(doc["support"])
            if kind == "random":
                return cls.random(doc["seed"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(f"malformed weight description: {exc}") from exc
        raise InvalidConfig(f"unknown weight kind {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind}
        if self.kind == "constant":
            doc["value"] = (
                self.value.real if self.value.imag == 0 else [self.value.real, self.value.imag]
            )
        elif self.kind == "poly_phase" and self.poly is not None:
            doc["poly"] = self.poly.to_list()
        elif self.kind == "rational_phase" and self.phi is not None:
            doc.update(self.phi.to_dict())
        elif self.kind == "balanced_indicator":
            doc["support"] = list(self.support)
        elif self.kind == "random":
            doc["seed"] = self.seed
        return doc


def realize_weight(spec: WeightSpec, ctx: PrimeContext) -> WeightFunction:
    """Materialise ``spec`` as a 1-bounded function on F_p."""

    p = ctx.p
    if spec.kind == "constant":
        values = np.full(p, complex(spec.value), dtype=np.complex128)
    elif spec.kind == "poly_phase":
        values = ctx.e(spec.poly.values(ctx))
    elif spec.kind == "rational_phase":
        phases, poles = spec.phi.values(ctx)
        values = np.where(poles, 0.0 + 0.0j, ctx.e(phases))
    elif spec.kind == "balanced_indicator":
        support = sorted({s % p for s in spec.support})
        values = np.zeros(p, dtype=np.complex128)
        values[support] = 1.0
        values -= len(support) / p
    else:
        rng = np.random.default_rng([spec.seed, p])
        values = np.exp(2j * np.pi * rng.random(p))
    return WeightFunction(p, values)


@dataclass(frozen=True, slots=True)
class ProfileRow:
    p: int
    value: float

    @property
    def exact_zero(self) -> bool:
        return self.value < ZERO_FLOOR


@dataclass(frozen=True, slots=True)
class UniformityProfile:
    """||theta_p - E theta_p||_{u^s} along a prime ladder, with a log-log fit.

    ``fitted_slope`` is ``None`` when fewer than three rows are nonzero. ``zero_at_poles`` marks
    rational phases, which are set to 0 where the denominator vanishes.
    """

    s: int
    rows: tuple[ProfileRow, ...]
    fitted_slope: float | None
    fitted_intercept: float | None
    zero_at_poles: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "s": self.s,
            "rows": [
                {"p": row.p, "value": row.value, "exact_zero": row.exact_zero} for row in self.rows
            ],
            "slope": self.fitted_slope,
            "intercept": self.fitted_intercept,
            "zero_at_poles": self.zero_at_poles,
        }


async def uniformity_profile(
    spec: WeightSpec,
    s: int,
    primes: Sequence[int],
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> UniformityProfile:
    """Measure the mean-zero u^s norm of ``spec`` at every prime and fit the decay."""

    ladder = sorted(set(int(p) for p in primes))
    contexts = [context_for(p) for p in ladder]
    if len(contexts) < MIN_FIT_ROWS:
        raise InsufficientLadder(f"a profile needs at least {MIN_FIT_ROWS} primes")

    def measure(ctx: PrimeContext) -> ProfileRow:
        theta = realize_weight(spec, ctx)
        value = u_norm(theta.centered(), s, settings)
        logger.debug("u^%d profile p=%d value=%.6g", s, ctx.p, value)
        return ProfileRow(p=ctx.p, value=value)

    rows = tuple(await map_in_threads(measure, contexts, settings.threads))
    for row in rows:
        if row.exact_zero:
            logger.warning("p=%d: centred weight has zero u^%d norm; row left out of fit", row.p, s)
    fit = fit_loglog([row.p for row in rows], [row.value for row in rows])
    return UniformityProfile(
        s=s,
        rows=rows,
        fitted_slope=None if fit is None else fit.slope,
        fitted_intercept=None if fit is None else fit.intercept,
        zero_at_poles=spec.kind == "rational_phase",
    )


def uniformity_profile_sync(
    spec: WeightSpec,
    s: int,
    primes: Sequence[int],
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> UniformityProfile:
    return asyncio.run(uniformity_profile(spec, s, primes, settings))


__all__ = [
    "ProfileRow",
    "UniformityProfile",
    "WEIGHT_KINDS",
    "WeightSpec",
    "realize_weight",
    "uniformity_profile",
    "uniformity_profile_sync",
]
