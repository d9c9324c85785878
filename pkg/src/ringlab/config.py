"""Size caps and budgets shared by the deciders.

Every cap can be overridden per call; the ring cap can also be set for a
whole process through ``RINGLAB_MAX_ELEMENTS``.
"""

from __future__ import annotations

import os

DEFAULT_RING_CAP = 64
MODULE_CAP = 256
EXHAUSTIVE_PAIR_BUDGET = 1 << 25
ORACLE_BUDGET = 2**16
ENUM_BUDGET = 2**16


def ring_cap() -> int:
    raw = os.environ.get("RINGLAB_MAX_ELEMENTS")
    if raw is None:
        return DEFAULT_RING_CAP
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"RINGLAB_MAX_ELEMENTS must be an integer, got {raw!r}")
    if value < 2:
        raise ValueError("RINGLAB_MAX_ELEMENTS must be at least 2")
    return value


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed its configured budget."""
