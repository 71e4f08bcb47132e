"""Priority-based subcarrier split between comm demand and sensing demand.

Three modes over a budget of N subcarriers per QI:

  cp     comm-priority: comm gets its full demand (capped at N), sensing
         gets the remainder under contention;
  sp     sensing-priority: the mirror image;
  equal  fixed (N//2, N//2) regardless of demand.

Demands above N (including the sensing-infeasible marker N+1) simply lose
under contention; grants never exceed the budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

AllocatorMode = Literal["cp", "sp", "equal"]

MODES = ("cp", "sp", "equal")


@dataclass(frozen=True)
class AllocationDecision:
    n_c: int
    n_s: int
    demand_c: int
    demand_s: int
    mode: str
    feasible_c: bool  # grant covers the comm demand
    feasible_s: bool  # grant covers the sensing demand


def allocate(demand_c: int, demand_s: int, n_total: int, mode: str) -> AllocationDecision:
    if mode not in MODES:
        raise ValueError(f"unknown allocator mode {mode!r}")
    if demand_c < 0 or demand_s < 0:
        raise ValueError("demands must be non-negative")
    if n_total < 2:
        raise ValueError("need a budget of at least 2 subcarriers")
    if mode == "cp":
        if demand_c > n_total:
            n_c, n_s = n_total, 0
        elif demand_c + demand_s > n_total:
            n_c, n_s = demand_c, n_total - demand_c
        else:
            n_c, n_s = demand_c, demand_s
    elif mode == "sp":
        if demand_s > n_total:
            n_s, n_c = n_total, 0
        elif demand_c + demand_s > n_total:
            n_s, n_c = demand_s, n_total - demand_s
        else:
            n_s, n_c = demand_s, demand_c
    else:
        n_c = n_s = n_total // 2
    return AllocationDecision(n_c=n_c, n_s=n_s, demand_c=demand_c, demand_s=demand_s,
                              mode=mode, feasible_c=n_c >= demand_c,
                              feasible_s=n_s >= demand_s)


DEFAULT_P1_WEIGHTS = (0.6, 0.1, 0.3)


def p1_objective(x_var: float, xibar_sq: float, n_s: int, n_c: int,
                 rate: float, rate_target: float,
                 weights: tuple[float, float, float] = DEFAULT_P1_WEIGHTS) -> float:
    """Scalarized accuracy/usage/rate objective, logged per QI as a diagnostic.

    weights = (accuracy-violation, subcarrier-usage, rate-shortfall).
    Mixed units are inherent to the scalarization; the value is never
    optimized over, only reported.
    """
    a1, a2, a3 = weights
    return (a1 * max(x_var - xibar_sq, 0.0)
            + a2 * (n_s + n_c)
            + a3 * max(rate_target - rate, 0.0))
