"""Least-squares fits on log-log prime ladders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy import stats

ZERO_FLOOR = 1e-12
MIN_FIT_ROWS = 3


@dataclass(frozen=True, slots=True)
class LogLogFit:
    slope: float
    intercept: float
    rows_used: int


def fit_loglog(ps: Sequence[int], values: Sequence[float]) -> LogLogFit | None:
    """Unweighted fit of log(value) against log(p); rows below ZERO_FLOOR are left out.

    Returns ``None`` when fewer than MIN_FIT_ROWS rows remain.
    """

    pairs = [(math.log(p), math.log(v)) for p, v in zip(ps, values) if v >= ZERO_FLOOR]
    if len(pairs) < MIN_FIT_ROWS:
        return None
    xs, ys = zip(*pairs)
    result = stats.linregress(xs, ys)
    return LogLogFit(
        slope=float(result.slope), intercept=float(result.intercept), rows_used=len(pairs)
    )


__all__ = ["LogLogFit", "MIN_FIT_ROWS", "ZERO_FLOOR", "fit_loglog"]
