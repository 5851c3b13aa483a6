"""Resource limits for searches and enumerations.

Defaults can be overridden by the EXTCALC_LIMITS environment variable, a
comma-separated list like ``carrier=64,nodes=2000000,workers=4``. Command
line flags override the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import LimitExceededError, ParseError

ENV_VAR = "EXTCALC_LIMITS"

_FIELD_FOR_KEY = {"carrier": "max_carrier", "nodes": "max_nodes", "workers": "workers"}


@dataclass(frozen=True)
class Limits:
    max_carrier: int = 64
    max_nodes: int = 2_000_000
    workers: int = 1

    def check_carrier(self, size: int, what: str = "carrier") -> None:
        if size > self.max_carrier:
            raise LimitExceededError(
                f"{what} size {size} exceeds limit {self.max_carrier}"
            )


class NodeBudget:
    """Mutable countdown shared by one search; raises when exhausted."""

    def __init__(self, max_nodes: int):
        self.remaining = max_nodes

    def spend(self, n: int = 1) -> None:
        self.remaining -= n
        if self.remaining < 0:
            raise LimitExceededError("search node budget exhausted")


def parse_limits(text: str, base: Limits | None = None) -> Limits:
    """Parse ``carrier=..,nodes=..,workers=..`` on top of ``base``."""
    limits = base if base is not None else Limits()
    text = text.strip()
    if not text:
        return limits
    for part in text.split(","):
        if "=" not in part:
            raise ParseError(f"bad limits entry {part!r} (want key=value)")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in _FIELD_FOR_KEY:
            raise ParseError(f"unknown limits key {key!r}")
        try:
            number = int(value)
        except ValueError:
            raise ParseError(f"limits value for {key!r} is not an integer: {value!r}")
        if number <= 0:
            raise ParseError(f"limits value for {key!r} must be positive")
        limits = replace(limits, **{_FIELD_FOR_KEY[key]: number})
    return limits


def default_limits() -> Limits:
    """Built-in defaults, overridden by the EXTCALC_LIMITS environment variable."""
    return parse_limits(os.environ.get(ENV_VAR, ""), Limits())
