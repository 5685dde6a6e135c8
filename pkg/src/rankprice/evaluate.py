"""Purchase decisions for a fixed price vector, solved in closed form.

For fixed prices each customer's problem has a unique optimum: buy the most
preferred affordable product, or nothing if none is affordable. ``assign``
exploits this directly and is the hot path of every search; ``assign_oracle``
re-derives the same result by brute enumeration of all purchase options and
exists so tests can cross-check the closed form against a literal reading of
the customer problem.
"""

from __future__ import annotations

from typing import Sequence

from .model import Assignment, BudgetGrid, Instance


def assign_prices(inst: Instance, prices: Sequence[int]) -> Assignment:
    """Evaluate arbitrary (not necessarily on-grid) integer prices."""
    chosen: list[int | None] = []
    push = chosen.append
    revenue = 0
    for budget, ranked in zip(inst.budgets, inst.preference_order):
        for i in ranked:
            if prices[i] <= budget:
                push(i)
                revenue += prices[i]
                break
        else:
            push(None)
    return Assignment(chosen=tuple(chosen), revenue=revenue)


def assign(inst: Instance, grid: BudgetGrid, indices: Sequence[int]) -> Assignment:
    """Unique optimal purchase of every customer under the given grid prices."""
    return assign_prices(inst, grid.prices_of(indices))


def assign_oracle(inst: Instance, grid: BudgetGrid, indices: Sequence[int]) -> Assignment:
    """Same contract as :func:`assign`, by exhaustive per-customer enumeration.

    Considers all I+1 options (each product, or no purchase scoring zero) and
    keeps the option with the highest satisfaction score. Test-only reference
    path; deliberately shares no code with ``assign``.
    """
    prices = grid.prices_of(indices)
    chosen: list[int | None] = []
    revenue = 0
    for k in range(inst.num_customers):
        budget = inst.budgets[k]
        row = inst.preferences[k]
        best: int | None = None
        best_score = 0
        for i in range(inst.num_products):
            score = row[i]
            if score is None or prices[i] > budget:
                continue
            if score > best_score:
                best = i
                best_score = score
        chosen.append(best)
        if best is not None:
            revenue += prices[best]
    return Assignment(chosen=tuple(chosen), revenue=revenue)
