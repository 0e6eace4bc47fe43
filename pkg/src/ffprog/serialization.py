"""Report encoders and the CSV readers for grids, weights and index lists."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Protocol

import numpy as np

from .errors import InvalidConfig
from .fourier import GridFunction, WeightFunction

FLOAT_FORMAT = ".17g"


class Serializer(Protocol):
    """Protocol for encoding/decoding reports."""

    def dumps(self, value: Any) -> str: ...

    def loads(self, text: str) -> Any: ...


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"reports cannot hold the non-finite value {value!r}")
    return format(value, FLOAT_FORMAT)


def _plain(value: Any) -> Any:
    """Map numpy scalars to Python ones and complex numbers to a number or [re, im]."""

    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return value.real if value.imag == 0 else [value.real, value.imag]
    if isinstance(value, tuple):
        return list(value)
    return value


def _encode(value: Any) -> str:
    value = _plain(value)
    if value is None or isinstance(value, (bool, str, int)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, Mapping):
        items = (
            f"{json.dumps(str(key), ensure_ascii=False)}:{_encode(v)}" for key, v in value.items()
        )
        return "{" + ",".join(items) + "}"
    if isinstance(value, (list, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    raise TypeError(f"cannot encode {type(value).__name__} in a report")


class JsonReportSerializer:
    """Compact JSON in which every float carries 17 significant digits."""

    def dumps(self, value: Any) -> str:
        return _encode(value)

    def loads(self, text: str) -> Any:
        return json.loads(text)


def _cell(value: Any) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag != 0:
            sign = "-" if value.imag < 0 else "+"
            return f"{_format_float(value.real)}{sign}{_format_float(abs(value.imag))}j"
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, list):
        return " ".join(_cell(v) for v in value)
    return str(value)


def _flatten(row: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    """Nested mappings become dotted columns: {"count": {"total": 3}} -> {"count.total": 3}."""
    flat: dict[str, Any] = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


class CsvReportSerializer:
    """Header plus one line per entry of ``report["rows"]``, or one line for a flat report."""

    def dumps(self, value: Any) -> str:
        raw: Iterable[Mapping[str, Any]]
        if isinstance(value, Mapping) and isinstance(value.get("rows"), list):
            raw = value["rows"]
        elif isinstance(value, Mapping):
            raw = [value]
        else:
            raw = list(value)
        rows = [_flatten(row) for row in raw]
        columns: list[str] = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(column)) for column in columns])
        return buffer.getvalue()

    def loads(self, text: str) -> list[dict[str, str]]:
        return list(csv.DictReader(io.StringIO(text)))


SERIALIZERS: dict[str, Serializer] = {
    "json": JsonReportSerializer(),
    "csv": CsvReportSerializer(),
}


def serializer_for(fmt: str) -> Serializer:
    try:
        return SERIALIZERS[fmt]
    except KeyError:
        raise InvalidConfig(f"unknown output format {fmt!r}") from None


def _read_complex_rows(path: Path, size: int) -> np.ndarray:
    values = np.zeros(size, dtype=np.complex128)
    with path.open(newline="") as handle:
        for line, row in enumerate(csv.reader(handle), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if line == 1 and row[0].strip().lower() == "index":
                continue
            try:
                index = int(row[0])
                re = float(row[1]) if len(row) > 1 and row[1].strip() else 0.0
                im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            except ValueError as exc:
                raise InvalidConfig(f"{path}:{line}: {exc}") from exc
            if not 0 <= index < size:
                raise InvalidConfig(f"{path}:{line}: index {index} outside 0..{size - 1}")
            if not (math.isfinite(re) and math.isfinite(im)):
                raise InvalidConfig(f"{path}:{line}: non-finite value")
            values[index] = complex(re, im)
    return values


def load_grid_csv(path: str | Path, p: int, dimension: int) -> GridFunction:
    """Read ``index,re,im`` rows; the index is row-major over F_p^D and absent points are 0."""

    flat = _read_complex_rows(Path(path), p**dimension)
    return GridFunction.from_flat(p, dimension, flat, bounded=False)


def load_weight_csv(path: str | Path, p: int) -> WeightFunction:
    flat = _read_complex_rows(Path(path), p)
    return WeightFunction(p, flat, bounded=False)


def load_indicator(path: str | Path, p: int, dimension: int) -> GridFunction:
    """Indicator of the points listed one per line, as a flat index or D coordinates."""

    points: list[tuple[int, ...]] = []
    with Path(path).open(newline="") as handle:
        for line, row in enumerate(csv.reader(handle), start=1):
            cells = [cell.strip() for cell in row if cell.strip()]
            if not cells or cells[0].startswith("#"):
                continue
            try:
                coords = [int(cell) for cell in cells]
            except ValueError as exc:
                raise InvalidConfig(f"{path}:{line}: {exc}") from exc
            if len(coords) == 1 and dimension > 1:
                if not 0 <= coords[0] < p**dimension:
                    raise InvalidConfig(f"{path}:{line}: index {coords[0]} is out of range")
                coords = [int(c) for c in np.unravel_index(coords[0], (p,) * dimension)]
            if len(coords) != dimension:
                raise InvalidConfig(f"{path}:{line}: expected {dimension} coordinates")
            points.append(tuple(coords))
    return GridFunction.indicator(p, dimension, points)


__all__ = [
    "CsvReportSerializer",
    "JsonReportSerializer",
    "SERIALIZERS",
    "Serializer",
    "load_grid_csv",
    "load_indicator",
    "load_weight_csv",
    "serializer_for",
]
