"""Command-line entry point: ``ffprog {norms,count,verify,scan,find}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Mapping, Sequence

import numpy as np
import sympy

from .config import ToolkitSettings, settings_from_env
from .context_cache import context_for
from .errors import EmptySuite, FFProgError, InvalidConfig, NotPrime
from .experiments import (
    DecayTarget,
    count_configurations,
    find_configuration,
    scan_decay_sync,
    standard_system,
    verify_exact_suite_sync,
)
from .ffcore import ConfigurationSystem, PrimeContext
from .fourier import (
    GridFunction,
    WeightFunction,
    box_norm_v,
    directional_spectrum,
    gowers_norm,
    inverse_bound,
    lp_norm,
    u_norm,
)
from .operators import counting_lambda, l2_discrepancy, main_term
from .serialization import (
    SERIALIZERS,
    load_grid_csv,
    load_indicator,
    load_weight_csv,
    serializer_for,
)
from .weights import WeightSpec, realize_weight, uniformity_profile_sync

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SUITE_FAILED = 2

DEFAULT_VERIFY_PRIMES = (5, 7, 11)
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

FunctionKind = Literal["indicator", "constant", "bernoulli", "random_unit", "csv", "indices"]
FUNCTION_KINDS: tuple[str, ...] = (
    "indicator",
    "constant",
    "bernoulli",
    "random_unit",
    "csv",
    "indices",
)


class UsageError(InvalidConfig):
    """Raised in place of argparse's own exit on malformed command lines."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _points(raw: Any) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(int(c) for c in point) if isinstance(point, (list, tuple)) else (int(point),)
        for point in raw
    )


def _complex(raw: Any) -> complex:
    return complex(*raw) if isinstance(raw, (list, tuple)) else complex(raw)


def _number(value: complex) -> float | list[float]:
    return value.real if value.imag == 0 else [value.real, value.imag]


@dataclass(frozen=True, slots=True)
class FunctionSpec:
    """Description of one input function on F_p^D, realised once p and D are known."""

    kind: FunctionKind
    points: tuple[tuple[int, ...], ...] = ()
    value: complex = 1.0
    density: float = 0.5
    seed: int = 0
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in FUNCTION_KINDS:
            raise InvalidConfig(f"unknown function kind {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.density <= 1.0:
            raise InvalidConfig("bernoulli density must lie in [0, 1]")
        if self.kind in ("csv", "indices") and not self.path:
            raise InvalidConfig(f"{self.kind} functions need a path")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FunctionSpec":
        try:
            return cls(
                kind=doc["kind"],
                points=_points(doc.get("points", ())),
                value=_complex(doc.get("value", 1.0)),
                density=float(doc.get("density", 0.5)),
                seed=int(doc.get("seed", 0)),
                path=doc.get("path"),
            )
        except InvalidConfig:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"malformed function description: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind}
        if self.kind == "indicator":
            doc["points"] = [list(point) for point in self.points]
        elif self.kind == "constant":
            doc["value"] = _number(self.value)
        elif self.kind == "bernoulli":
            doc["density"] = self.density
            doc["seed"] = self.seed
        elif self.kind == "random_unit":
            doc["seed"] = self.seed
        else:
            doc["path"] = self.path
        return doc

    def realize(self, p: int, dimension: int, slot: int | None = None) -> GridFunction:
        """Materialise on F_p^D; random kinds fold ``slot`` into the seed when one is given."""
        if self.kind == "indicator":
            for point in self.points:
                if len(point) != dimension:
                    raise InvalidConfig(f"point {point} does not lie in F_p^{dimension}")
            return GridFunction.indicator(p, dimension, self.points)
        if self.kind == "constant":
            return GridFunction.constant(p, dimension, self.value)
        if self.kind == "bernoulli":
            return GridFunction.bernoulli(p, dimension, self.density, self._rng(p, slot))
        if self.kind == "random_unit":
            return GridFunction.random_unit(p, dimension, self._rng(p, slot))
        if self.kind == "csv":
            return load_grid_csv(self.path, p, dimension)
        return load_indicator(self.path, p, dimension)

    def _rng(self, p: int, slot: int | None) -> np.random.Generator:
        key = [self.seed, p] if slot is None else [self.seed, p, slot]
        return np.random.default_rng(key)


def _check_prime(p: int) -> int:
    p = int(p)
    if p < 2 or not sympy.isprime(p):
        raise NotPrime(p)
    return p


@dataclass(frozen=True, slots=True)
class CliConfig:
    """Everything a subcommand needs, merged from ``--config`` and the flags."""

    system: ConfigurationSystem | None = None
    weight: WeightSpec = WeightSpec.constant()
    functions: tuple[FunctionSpec, ...] = ()
    indicator_set: FunctionSpec | None = None
    primes: tuple[int, ...] = ()
    p: int | None = None
    trials: int = 20
    seed: int = 0
    density: float = 0.5
    cap: int | None = None
    s: int = 2
    target: str = DecayTarget.THM3_1.value
    exclude_poles: bool = False
    direction: tuple[int, ...] | None = None
    dimension: int | None = None
    grid: str | None = None
    weight_csv: str | None = None
    output_format: str = "json"
    out: str | None = None
    threads: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "primes", tuple(_check_prime(p) for p in self.primes))
        if self.p is not None:
            object.__setattr__(self, "p", _check_prime(self.p))
        if self.trials < 1:
            raise EmptySuite("trials must be at least 1")
        if not 0.0 < self.density < 1.0:
            raise InvalidConfig("density must lie strictly between 0 and 1")
        if self.s < 1:
            raise InvalidConfig("s must be at least 1")
        if self.target not in {target.value for target in DecayTarget}:
            raise InvalidConfig(f"unknown target {self.target!r}")
        if self.output_format not in SERIALIZERS:
            raise InvalidConfig(f"unknown output format {self.output_format!r}")
        if self.cap is not None and self.cap < 1:
            raise InvalidConfig("cap must be positive")
        if self.threads is not None and self.threads < 1:
            raise InvalidConfig("threads must be at least 1")
        if self.dimension is not None and self.dimension < 1:
            raise InvalidConfig("dimension must be at least 1")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CliConfig":
        """Parse a config document; a bare system document ({"D": ...}) is accepted too."""

        if not isinstance(doc, Mapping):
            raise InvalidConfig("a config document must be a JSON object")
        system_doc = doc.get("system")
        if system_doc is None and "D" in doc:
            system_doc = doc
        try:
            return cls(
                system=None if system_doc is None else ConfigurationSystem.from_dict(system_doc),
                weight=WeightSpec.from_dict(doc.get("weight", {"kind": "constant"})),
                functions=tuple(FunctionSpec.from_dict(f) for f in doc.get("functions", ())),
                indicator_set=(
                    None if doc.get("set") is None else FunctionSpec.from_dict(doc["set"])
                ),
                primes=tuple(int(p) for p in doc.get("primes", ())),
                p=None if doc.get("p") is None else int(doc["p"]),
                trials=int(doc.get("trials", 20)),
                seed=int(doc.get("seed", 0)),
                density=float(doc.get("density", 0.5)),
                cap=None if doc.get("cap") is None else int(doc["cap"]),
                s=int(doc.get("s", 2)),
                target=str(doc.get("target", DecayTarget.THM3_1.value)),
                exclude_poles=bool(doc.get("exclude_poles", False)),
                direction=(
                    None
                    if doc.get("direction") is None
                    else tuple(int(c) for c in doc["direction"])
                ),
                dimension=None if doc.get("dimension") is None else int(doc["dimension"]),
                grid=doc.get("grid"),
                weight_csv=doc.get("weight_csv"),
                output_format=str(doc.get("format", "json")),
                out=doc.get("out"),
                threads=None if doc.get("threads") is None else int(doc["threads"]),
            )
        except FFProgError:
            raise
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"malformed config: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.system is not None:
            doc["system"] = self.system.to_dict()
        doc["weight"] = self.weight.to_dict()
        if self.functions:
            doc["functions"] = [f.to_dict() for f in self.functions]
        if self.indicator_set is not None:
            doc["set"] = self.indicator_set.to_dict()
        if self.primes:
            doc["primes"] = list(self.primes)
        optional = {
            "p": self.p,
            "cap": self.cap,
            "direction": None if self.direction is None else list(self.direction),
            "dimension": self.dimension,
            "grid": self.grid,
            "weight_csv": self.weight_csv,
            "out": self.out,
            "threads": self.threads,
        }
        doc.update(
            trials=self.trials,
            seed=self.seed,
            density=self.density,
            s=self.s,
            target=self.target,
            exclude_poles=self.exclude_poles,
            format=self.output_format,
        )
        doc.update({key: value for key, value in optional.items() if value is not None})
        return doc

    def settings(self, env: Mapping[str, str] | None = None) -> ToolkitSettings:
        return settings_from_env(env, enumeration_cap=self.cap, threads=self.threads)


def parse_primes(text: str) -> list[int]:
    """``"5,7,11"`` or ranges like ``"11..61"`` (every prime in the closed interval)."""

    primes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            low, high = (int(bound) for bound in part.split("..", 1))
            primes.extend(int(p) for p in sympy.primerange(low, high + 1))
        else:
            primes.append(int(part))
    if not primes:
        raise argparse.ArgumentTypeError(f"no primes in {text!r}")
    return primes


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config document")
    common.add_argument("--p", type=int, help="prime modulus")
    common.add_argument("--primes", type=parse_primes, help="prime ladder, e.g. 5,7,11 or 11..61")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--density", type=float)
    common.add_argument("--s", type=int, help="order of the u^s / U^s norm")
    common.add_argument("--cap", type=int, help="enumeration cap (overrides FFPROG_CAP)")
    common.add_argument("--threads", type=int)
    common.add_argument("--format", dest="output_format", choices=sorted(SERIALIZERS))
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--target", choices=[target.value for target in DecayTarget])
    common.add_argument("--grid", help="CSV grid (index,re,im) for norms")
    common.add_argument("--weight-csv", help="CSV weight (index,re,im) on F_p")
    common.add_argument("--direction", type=_int_list, help="direction v, e.g. 1,2")
    common.add_argument("--dimension", type=int, help="D for grids loaded without a system")
    common.add_argument(
        "--exclude-poles", action="store_true", default=None, help="average over non-poles"
    )
    common.add_argument(
        "--dump-config", action="store_true", help="print the merged config and exit"
    )
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    parser = _Parser(prog="ffprog", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("norms", parents=[common], help="u^s, Gowers and box norms")
    commands.add_parser("count", parents=[common], help="progression count and main term")
    commands.add_parser("verify", parents=[common], help="exact identity and inequality suite")
    commands.add_parser("scan", parents=[common], help="decay scan along a prime ladder")
    commands.add_parser("find", parents=[common], help="search a set for a configuration")
    return parser


_OVERRIDES = (
    "p",
    "primes",
    "seed",
    "trials",
    "density",
    "s",
    "cap",
    "threads",
    "target",
    "grid",
    "weight_csv",
    "direction",
    "dimension",
    "exclude_poles",
    "out",
)


def load_config(args: argparse.Namespace) -> CliConfig:
    doc: dict[str, Any] = {}
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InvalidConfig(f"{args.config}: expected a JSON object")
        doc.update(loaded)
    for name in _OVERRIDES:
        value = getattr(args, name)
        if value is not None:
            doc[name] = value
    if args.output_format is not None:
        doc["format"] = args.output_format
    return CliConfig.from_dict(doc)


def _require_p(config: CliConfig, command: str) -> PrimeContext:
    if config.p is None:
        raise InvalidConfig(f"{command} needs --p")
    return context_for(config.p)


def _weight(config: CliConfig, ctx: PrimeContext) -> WeightFunction:
    if config.weight_csv:
        return load_weight_csv(config.weight_csv, ctx.p)
    return realize_weight(config.weight, ctx)


def run_norms(config: CliConfig) -> dict[str, Any]:
    settings = config.settings()
    if config.grid:
        ctx = _require_p(config, "norms --grid")
        dimension = config.dimension or (config.system.dimension if config.system else 1)
        f = load_grid_csv(config.grid, ctx.p, dimension)
        report: dict[str, Any] = {
            "p": ctx.p,
            "D": dimension,
            "s": config.s,
            "l2": lp_norm(f),
            "sup": f.sup(),
            "gowers": gowers_norm(f, config.s, settings),
        }
        if config.direction is not None:
            spectrum = directional_spectrum(f, config.direction)
            report["direction"] = list(spectrum.direction)
            report["box_v"] = box_norm_v(f, config.direction, settings)
            report["inverse_bound"] = inverse_bound(f, config.direction)
            report["rows"] = [
                {"coset_index": index, "xi": xi, "re": re, "im": im}
                for index, xi, re, im in spectrum.rows()
            ]
        return report

    if config.primes and config.weight_csv is None:
        profile = uniformity_profile_sync(config.weight, config.s, config.primes, settings)
        return {"weight": config.weight.to_dict(), **profile.to_dict()}

    ctx = _require_p(config, "norms")
    theta = _weight(config, ctx)
    return {
        "p": ctx.p,
        "s": config.s,
        "weight": config.weight.to_dict() if config.weight_csv is None else config.weight_csv,
        "u_norm": u_norm(theta, config.s, settings),
        "u_norm_centered": u_norm(theta.centered(), config.s, settings),
    }


def _functions(
    config: CliConfig, system: ConfigurationSystem, ctx: PrimeContext
) -> list[GridFunction]:
    needed = system.k + 1
    if not config.functions:
        rng = np.random.default_rng([config.seed, ctx.p])
        return [
            GridFunction.bernoulli(ctx.p, system.dimension, config.density, rng)
            for _ in range(needed)
        ]
    if len(config.functions) == 1:
        # one description fills every slot; random kinds draw a fresh grid per slot
        spec = config.functions[0]
        return [spec.realize(ctx.p, system.dimension, slot) for slot in range(needed)]
    if len(config.functions) != needed:
        raise InvalidConfig(
            f"the system needs {needed} functions, config lists {len(config.functions)}"
        )
    return [spec.realize(ctx.p, system.dimension) for spec in config.functions]


def run_count(config: CliConfig) -> dict[str, Any]:
    ctx = _require_p(config, "count")
    system = config.system or standard_system(1)
    theta = _weight(config, ctx)
    fs = _functions(config, system, ctx)
    counted = counting_lambda(theta, fs, system, ctx, exclude_poles=config.exclude_poles)
    main = main_term(theta, fs, system, ctx)
    return {
        "p": ctx.p,
        "exclude_poles": config.exclude_poles,
        "lambda": counted,
        "main_term": main,
        "discrepancy": abs(counted - main),
        "l2_discrepancy": l2_discrepancy(theta, fs[1:], system, ctx),
    }


def run_verify(config: CliConfig) -> tuple[dict[str, Any], bool]:
    primes = config.primes or DEFAULT_VERIFY_PRIMES
    report = verify_exact_suite_sync(config.seed, primes, config.trials, config.settings())
    return report.to_dict(), report.passed


def _default_ladder(dimension: int) -> tuple[int, ...]:
    high = 199 if dimension == 1 else 61
    return tuple(int(p) for p in sympy.primerange(11, high + 1))


def run_scan(config: CliConfig) -> dict[str, Any]:
    target = DecayTarget(config.target)
    system = config.system
    if system is None:
        system = (
            standard_system(1, rational=True)
            if target is DecayTarget.PROP1_4
            else standard_system(2)
        )
    primes = config.primes or _default_ladder(system.dimension)
    report = scan_decay_sync(
        target,
        system,
        config.weight,
        primes,
        config.trials,
        config.density,
        config.seed,
        config.settings(),
    )
    return report.to_dict()


def run_find(config: CliConfig) -> dict[str, Any]:
    ctx = _require_p(config, "find")
    system = config.system or standard_system(2, rational=True)
    if config.indicator_set is not None:
        indicator = config.indicator_set.realize(ctx.p, system.dimension)
    else:
        rng = np.random.default_rng([config.seed, ctx.p])
        indicator = GridFunction.bernoulli(ctx.p, system.dimension, config.density, rng)
    found = find_configuration(indicator, system, ctx)
    report: dict[str, Any] = {"p": ctx.p}
    report.update(found.to_dict() if found is not None else {"found": False})
    report["count"] = count_configurations(indicator, system, ctx).to_dict()
    return report


def _emit(report: Mapping[str, Any], config: CliConfig) -> None:
    text = serializer_for(config.output_format).dumps(report)
    if not text.endswith("\n"):
        text += "\n"
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run_cli(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)
    try:
        config = load_config(args)
        if args.dump_config:
            sys.stdout.write(serializer_for("json").dumps(config.to_dict()) + "\n")
            return EXIT_OK
        if args.command == "verify":
            report, passed = run_verify(config)
            _emit(report, config)
            return EXIT_OK if passed else EXIT_SUITE_FAILED
        runners = {"norms": run_norms, "count": run_count, "scan": run_scan, "find": run_find}
        _emit(runners[args.command](config), config)
    except (FFProgError, ValueError, OSError) as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


__all__ = [
    "CliConfig",
    "FunctionSpec",
    "build_parser",
    "load_config",
    "main",
    "parse_primes",
    "run_cli",
]
