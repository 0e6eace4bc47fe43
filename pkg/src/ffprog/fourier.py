"""Directional Fourier analysis, u^s norms and Gowers box norms with brute-force semantics.

Every quantity here is computed by direct summation in a fixed index order. Averages over
the grid go through ``numpy.mean``, which sums contiguous arrays pairwise, so repeated
runs agree bit for bit.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_SETTINGS, ToolkitSettings
from .context_cache import character_matrix, context_for
from .errors import BudgetExceeded, NumericalError, ZeroDirection
from .ffcore import (
    Point,
    PrimeContext,
    coset_representatives,
    reduce_direction,
    span_decompose,
    translate,
)

logger = logging.getLogger(__name__)

MAX_PHASE_DEGREE = 4


def _freeze(values: np.ndarray, bounded: bool, slack: float, label: str) -> np.ndarray:
    array = np.array(values, dtype=np.complex128)
    if bounded and array.size and float(np.max(np.abs(array))) > 1.0 + slack:
        raise ValueError(f"{label} is flagged 1-bounded but sup|values| exceeds 1")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True, eq=False)
class GridFunction:
    """A dense complex function on F_p^D stored as an array of shape (p,)*D."""

    p: int
    values: np.ndarray = field(repr=False)
    bounded: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim == 0 or any(n != self.p for n in values.shape):
            raise ValueError(f"grid values must have shape (p,)*D with p={self.p}")
        object.__setattr__(
            self, "values", _freeze(values, self.bounded, DEFAULT_SETTINGS.bounded_slack, "grid")
        )

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def flat(self) -> np.ndarray:
        """Values in row-major order."""
        return self.values.reshape(-1)

    def __call__(self, x: Sequence[int]) -> complex:
        return complex(self.values[tuple(int(c) % self.p for c in x)])

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def shifted(self, shift: Iterable[int]) -> "GridFunction":
        """x -> f(x + shift)."""
        return GridFunction(self.p, translate(self.values, shift, self.p), self.bounded)

    @classmethod
    def from_flat(
        cls, p: int, dimension: int, flat: Sequence[complex], bounded: bool = True
    ) -> "GridFunction":
        array = np.asarray(flat, dtype=np.complex128)
        if array.size != p**dimension:
            raise ValueError(f"expected {p**dimension} values, got {array.size}")
        return cls(p, array.reshape((p,) * dimension), bounded)

    @classmethod
    def constant(cls, p: int, dimension: int, c: complex = 1.0) -> "GridFunction":
        return cls(p, np.full((p,) * dimension, c, dtype=np.complex128), abs(c) <= 1.0)

    @classmethod
    def indicator(cls, p: int, dimension: int, points: Iterable[Sequence[int]]) -> "GridFunction":
        values = np.zeros((p,) * dimension, dtype=np.complex128)
        for point in points:
            values[tuple(int(c) % p for c in point)] = 1.0
        return cls(p, values)

    @classmethod
    def random_unit(cls, p: int, dimension: int, rng: np.random.Generator) -> "GridFunction":
        """Unit-modulus values with uniform phases."""
        phases = rng.random((p,) * dimension)
        return cls(p, np.exp(2j * np.pi * phases))

    @classmethod
    def random_bounded(cls, p: int, dimension: int, rng: np.random.Generator) -> "GridFunction":
        """Values uniform in modulus [0, 1] and phase."""
        radii = rng.random((p,) * dimension)
        phases = rng.random((p,) * dimension)
        return cls(p, radii * np.exp(2j * np.pi * phases))

    @classmethod
    def bernoulli(
        cls, p: int, dimension: int, density: float, rng: np.random.Generator
    ) -> "GridFunction":
        """Indicator of a random set containing each point independently with ``density``."""
        mask = rng.random((p,) * dimension) < density
        return cls(p, mask.astype(np.complex128))


@dataclass(frozen=True, slots=True, eq=False)
class WeightFunction:
    """A dense complex function on F_p."""

    p: int
    values: np.ndarray = field(repr=False)
    bounded: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.shape != (self.p,):
            raise ValueError(f"weight values must have shape ({self.p},)")
        object.__setattr__(
            self,
            "values",
            _freeze(values, self.bounded, DEFAULT_SETTINGS.bounded_slack, "weight"),
        )

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def centered(self) -> "WeightFunction":
        """theta - E theta; may leave the unit disc, so the result is not flagged bounded."""
        return WeightFunction(self.p, self.values - np.mean(self.values), bounded=False)

    @classmethod
    def constant(cls, p: int, c: complex = 1.0) -> "WeightFunction":
        return cls(p, np.full(p, c, dtype=np.complex128), abs(c) <= 1.0)


@dataclass(frozen=True, slots=True, eq=False)
class DirectionalSpectrum:
    """Table of f^(x'; v; xi) indexed by (coset representative, frequency)."""

    p: int
    direction: Point
    representatives: np.ndarray = field(repr=False)
    table: np.ndarray = field(repr=False)

    def coefficient(self, x: Sequence[int], xi: int) -> complex:
        ctx = context_for(self.p)
        rep, t = span_decompose(self.direction, x, ctx)
        index = _rep_index(rep, self.direction, ctx)
        return complex(self.table[index, xi % self.p] * ctx.e(t * xi))

    def line_energy(self) -> np.ndarray:
        """Sum over xi of |f^|^2, one entry per coset."""
        return np.sum(np.abs(self.table) ** 2, axis=1)

    def frequency_energy(self) -> np.ndarray:
        """E_x |f^(x; v; xi)|^2 for each xi (constant along cosets)."""
        return np.mean(np.abs(self.table) ** 2, axis=0)

    def reconstruct(self) -> np.ndarray:
        """Fourier inversion: the grid f(x' + n v) = sum_xi f^(x'; v; xi) e_p(n xi)."""
        ctx = context_for(self.p)
        dimension = self.representatives.shape[1]
        lines = self.table @ np.conj(character_matrix(ctx))
        grid = np.zeros((self.p,) * dimension, dtype=np.complex128)
        for n in range(self.p):
            points = (self.representatives + n * np.asarray(self.direction)) % self.p
            grid[tuple(points.T)] = lines[:, n]
        return grid

    def rows(self) -> Iterable[tuple[int, int, float, float]]:
        for index, xi in itertools.product(range(self.table.shape[0]), range(self.p)):
            value = self.table[index, xi]
            yield index, xi, float(value.real), float(value.imag)


def _rep_index(rep: Sequence[int], v: Sequence[int], ctx: PrimeContext) -> int:
    """Row-major position of a pivot-zero representative among coset representatives."""
    reduced = reduce_direction(v, ctx)
    pivot = next(i for i, c in enumerate(reduced) if c)
    index = 0
    for axis, coord in enumerate(rep):
        if axis != pivot:
            index = index * ctx.p + int(coord)
    return index


def _line_values(f: GridFunction, v: Sequence[int], ctx: PrimeContext) -> tuple[np.ndarray, ...]:
    reduced = reduce_direction(v, ctx)
    reps = coset_representatives(reduced, f.dimension, ctx)
    n = ctx.elements()
    points = (reps[:, None, :] + n[None, :, None] * np.asarray(reduced)[None, None, :]) % ctx.p
    lines = f.values[tuple(np.moveaxis(points, -1, 0))]
    return reduced, reps, lines


def directional_fourier(f: GridFunction, x: Sequence[int], v: Sequence[int], xi: int) -> complex:
    """f^(x; v; xi) = E_n f(x + n v) e_p(-n xi)."""

    ctx = context_for(f.p)
    reduced = reduce_direction(v, ctx)
    n = ctx.elements()
    points = (np.asarray(x, dtype=np.int64)[None, :] + n[:, None] * np.asarray(reduced)) % ctx.p
    line = f.values[tuple(points.T)]
    return complex(np.mean(line * ctx.e(-n * xi)))


def directional_spectrum(f: GridFunction, v: Sequence[int]) -> DirectionalSpectrum:
    """All directional Fourier coefficients along v, one row per coset of <v>."""

    ctx = context_for(f.p)
    reduced, reps, lines = _line_values(f, v, ctx)
    table = lines @ character_matrix(ctx) / ctx.p
    reps.setflags(write=False)
    table.setflags(write=False)
    return DirectionalSpectrum(p=f.p, direction=reduced, representatives=reps, table=table)


def u_norm(
    theta: WeightFunction, s: int, settings: ToolkitSettings = DEFAULT_SETTINGS
) -> float:
    """sup over phases P of degree <= s-1 of |E_y theta(y) e_p(-P(y))|.

    The constant coefficient only rotates the correlation, so p^{s-1} phases are enumerated.
    """

    if s < 1:
        raise ValueError("u^s norms need s >= 1")
    if s - 1 > MAX_PHASE_DEGREE:
        raise ValueError(f"u^s enumeration supports s <= {MAX_PHASE_DEGREE + 1}")
    p = theta.p
    if s > 1 and p <= s - 1:
        raise ValueError(f"u^{s} over F_{p} needs p > s - 1")
    if p ** (s - 1) > settings.enumeration_cap:
        raise BudgetExceeded(
            f"u^{s} over F_{p} needs {p ** (s - 1)} phases, cap is {settings.enumeration_cap}"
        )
    if s == 1:
        return abs(theta.mean())

    ctx = context_for(p)
    linear = character_matrix(ctx)
    if s == 2:
        return float(np.max(np.abs(theta.values @ linear)) / p)

    ys = ctx.elements()
    powers = np.stack([np.mod(ys**j, p) for j in range(2, s)])
    best = 0.0
    chunk = max(1, 4096 // p)
    prefixes = itertools.product(range(p), repeat=s - 2)
    while batch := list(itertools.islice(prefixes, chunk)):
        exponents = (np.asarray(batch, dtype=np.int64) @ powers) % p
        twisted = theta.values[None, :] * ctx.e(-exponents)
        best = max(best, float(np.max(np.abs(twisted @ linear))) / p)
    return best


def mult_derivative(f: GridFunction, h: Sequence[int]) -> GridFunction:
    """Delta_h f(x) = f(x) * conj(f(x + h))."""

    values = f.values * np.conj(translate(f.values, h, f.p))
    return GridFunction(f.p, values, f.bounded)


@dataclass(frozen=True, slots=True)
class Subspace:
    """A subspace of F_p^D given by generators; ``full`` and ``line`` are the common cases."""

    dimension: int
    generators: tuple[tuple[int, ...], ...]

    @classmethod
    def full(cls, dimension: int) -> "Subspace":
        rows = tuple(tuple(int(i == j) for j in range(dimension)) for i in range(dimension))
        return cls(dimension, rows)

    @classmethod
    def line(cls, v: Sequence[int]) -> "Subspace":
        return cls(len(v), (tuple(int(c) for c in v),))

    def basis(self, p: int) -> np.ndarray:
        """Row-reduced basis mod p, shape (rank, D)."""
        rows = [[c % p for c in g] for g in self.generators]
        basis: list[list[int]] = []
        col = 0
        while rows and col < self.dimension:
            pivot = next((r for r in rows if r[col]), None)
            if pivot is None:
                col += 1
                continue
            rows.remove(pivot)
            inv = pow(pivot[col], -1, p)
            pivot = [(c * inv) % p for c in pivot]
            rows = [[(a - r[col] * b) % p for a, b in zip(r, pivot)] for r in rows]
            basis = [[(a - r[col] * b) % p for a, b in zip(r, pivot)] for r in basis]
            basis.append(pivot)
            rows = [r for r in rows if any(r)]
            col += 1
        if not basis:
            raise ZeroDirection(f"generators {self.generators} span {{0}} mod {p}")
        return np.asarray(basis, dtype=np.int64)

    def members(self, p: int) -> np.ndarray:
        """Every element of the subspace, enumerating the coordinate cube of the basis."""
        basis = self.basis(p)
        coords = np.indices((p,) * basis.shape[0]).reshape(basis.shape[0], -1).T
        return (coords @ basis) % p


def _coset_average(values: np.ndarray, members: np.ndarray, p: int) -> np.ndarray | complex:
    if members.shape[0] == values.size:
        return np.mean(values)
    total = np.zeros_like(values)
    for h in members:
        total += translate(values, h, p)
    return total / members.shape[0]


def _box_average(values: np.ndarray, member_sets: list[np.ndarray], p: int) -> complex:
    if len(member_sets) == 1:
        return complex(np.mean(values * np.conj(_coset_average(values, member_sets[0], p))))
    *inner, outer = member_sets
    total = 0.0 + 0.0j
    for h in outer:
        total += _box_average(values * np.conj(translate(values, h, p)), inner, p)
    return total / outer.shape[0]


def box_norm_power(
    f: GridFunction, subspaces: Sequence[Subspace], settings: ToolkitSettings = DEFAULT_SETTINGS
) -> float:
    """The 2^s-fold average E_x E_{h_1..h_s} Delta_{h_1..h_s} f(x), checked real and >= 0."""

    if not subspaces:
        raise ValueError("box norms need at least one subspace")
    for subspace in subspaces:
        if subspace.dimension != f.dimension:
            raise ValueError("subspace dimension does not match the grid")
    member_sets = [subspace.members(f.p) for subspace in subspaces]
    # derivatives commute: keep the largest subspace innermost, where it costs one average
    member_sets.sort(key=lambda members: -members.shape[0])
    average = _box_average(f.values, member_sets, f.p)
    tol = settings.tolerance
    if abs(average.imag) > tol or average.real < -tol:
        raise NumericalError(f"box-norm inner average {average!r} is not a non-negative real")
    return max(average.real, 0.0)


def box_norm(
    f: GridFunction, subspaces: Sequence[Subspace], settings: ToolkitSettings = DEFAULT_SETTINGS
) -> float:
    """Gowers box norm of f along the given subspaces."""

    return box_norm_power(f, subspaces, settings) ** (1.0 / 2 ** len(subspaces))


def box_norm_v(
    f: GridFunction, v: Sequence[int], settings: ToolkitSettings = DEFAULT_SETTINGS
) -> float:
    """||f||_{F_p^D, <v>}."""

    reduce_direction(v, context_for(f.p))
    return box_norm(f, [Subspace.full(f.dimension), Subspace.line(v)], settings)


def box_norm_v_spectral(f: GridFunction, v: Sequence[int]) -> float:
    """sum_xi (E_x |f^(x; v; xi)|^2)^2, which equals ||f||^4_{F_p^D, <v>} exactly."""

    energy = directional_spectrum(f, v).frequency_energy()
    return float(np.sum(energy**2))


def inverse_bound(f: GridFunction, v: Sequence[int]) -> float:
    """sup_xi E_x |f^(x; v; xi)|^2, the right-hand side of the box-norm inverse inequality."""

    return float(np.max(directional_spectrum(f, v).frequency_energy()))


def gowers_norm(
    f: GridFunction, s: int, settings: ToolkitSettings = DEFAULT_SETTINGS
) -> float:
    """The usual Gowers U^s norm: every derivative ranges over the whole space."""

    if s < 1:
        raise ValueError("U^s norms need s >= 1")
    shifts = f.p ** (f.dimension * (s - 1))
    if shifts > settings.enumeration_cap:
        raise BudgetExceeded(
            f"U^{s} over F_{f.p}^{f.dimension} needs {shifts} shifts, "
            f"cap is {settings.enumeration_cap}"
        )
    return box_norm(f, [Subspace.full(f.dimension)] * s, settings)


def lp_norm(f: GridFunction | np.ndarray, q: float = 2.0) -> float:
    """(E_x |f(x)|^q)^{1/q}."""

    values = f.values if isinstance(f, GridFunction) else np.asarray(f)
    return float(np.mean(np.abs(values) ** q) ** (1.0 / q))


__all__ = [
    "DirectionalSpectrum",
    "GridFunction",
    "Subspace",
    "WeightFunction",
    "box_norm",
    "box_norm_power",
    "box_norm_v",
    "box_norm_v_spectral",
    "directional_fourier",
    "directional_spectrum",
    "gowers_norm",
    "inverse_bound",
    "lp_norm",
    "mult_derivative",
    "u_norm",
]
