"""Run-time limits shared by the enumeration-heavy routines."""

from __future__ import annotations

from dataclasses import dataclass

FLOAT_TOL = 1e-9
# outcome probabilities at or below this are treated as zero before renormalising
RENORM_GUARD = 1e-12


@dataclass(frozen=True)
class Limits:
    max_outcomes: int = 10**6
    max_dim: int = 8
    max_steps: int = 4


DEFAULT_LIMITS = Limits()
