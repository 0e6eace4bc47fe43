"""Configuration objects for the toolkit kernels and campaigns."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping

DEFAULT_ENUMERATION_CAP = 10**6
DEFAULT_DUAL_CAP = 61
DEFAULT_THREADS = 1
DEFAULT_TOLERANCE = 1e-9
DEFAULT_BOUNDED_SLACK = 1e-12

CAP_ENV_VAR = "FFPROG_CAP"
THREADS_ENV_VAR = "FFPROG_THREADS"


@dataclass(slots=True, frozen=True)
class ToolkitSettings:
    """Runtime knobs shared by the kernels.

    Attributes:
        enumeration_cap: Largest number of polynomial phases (p^{s-1}) a u^s norm may enumerate.
        dual_cap: Largest prime the O(p^{D+2}) dual-function kernel accepts in dimension 2;
            other dimensions are scaled so that p^{D+2} stays below dual_cap^4.
        threads: Worker threads a campaign may run concurrently.
        tolerance: Slack allowed by exact identities and inequalities.
        bounded_slack: Slack allowed when checking that a function is 1-bounded.
    """

    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    dual_cap: int = DEFAULT_DUAL_CAP
    threads: int = DEFAULT_THREADS
    tolerance: float = DEFAULT_TOLERANCE
    bounded_slack: float = DEFAULT_BOUNDED_SLACK

    def __post_init__(self) -> None:
        if self.enumeration_cap < 1:
            raise ValueError("ToolkitSettings requires a positive 'enumeration_cap'")
        if self.dual_cap < 2:
            raise ValueError("ToolkitSettings requires 'dual_cap' >= 2")
        if self.threads < 1:
            raise ValueError("ToolkitSettings requires 'threads' >= 1")
        if not 0.0 <= self.tolerance < 1.0:
            raise ValueError("'tolerance' must lie in [0, 1)")
        if not 0.0 <= self.bounded_slack < 1.0:
            raise ValueError("'bounded_slack' must lie in [0, 1)")

    @property
    def dual_budget(self) -> int:
        """Largest number of (x, y, y') terms the dual-function kernel may sum."""
        return self.dual_cap**4


def settings_from_env(
    env: Mapping[str, str] | None = None, **overrides: object
) -> ToolkitSettings:
    """Build settings from ``FFPROG_CAP``/``FFPROG_THREADS`` plus explicit overrides."""

    source = os.environ if env is None else env
    values: dict[str, object] = {}
    for var, field in ((CAP_ENV_VAR, "enumeration_cap"), (THREADS_ENV_VAR, "threads")):
        raw = source.get(var)
        if raw is None or raw == "":
            continue
        try:
            values[field] = int(raw)
        except ValueError as exc:
            raise ValueError(f"{var} must be an integer, got {raw!r}") from exc
    values.update({key: value for key, value in overrides.items() if value is not None})
    return ToolkitSettings(**values)  # type: ignore[arg-type]


DEFAULT_SETTINGS = ToolkitSettings()
