"""Structural price improvements applied to already-evaluated vectors.

Four of the five moves exploit problem structure instead of trying prices
blindly: close the gap between a product's price and its cheapest buyer's
budget (slack), price an unsold product into the pool of unassigned
customers (fill), and push a product's price up to its second-cheapest
buyer's budget, either unconditionally (reassignment) or only when the
displaced buyer has an equally-priced alternative to fall back on
(conditional reassignment). The fifth (opt_based) is the plain benchmark
scan that retries every alternative price of every product.

Moves that can backfire re-evaluate the full instance and revert when
revenue does not strictly improve, so every operator here is revenue
nondecreasing by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import RankPriceError
from .evaluate import assign
from .model import Assignment, BudgetGrid, Instance, PriceIndices

# Pipeline letters: slack, fill, reassignment, conditional reassignment,
# optimization-based. The paper-style default order is "sfrc".
STEP_LETTERS = "sfrco"
DEFAULT_PIPELINE = "sfrc"


@dataclass
class LocalSearchStats:
    """Bookkeeping for one run: extra evaluations and kept/reverted moves."""

    assign_calls: int = 0
    kept: dict[str, int] = field(default_factory=dict)
    reverted: dict[str, int] = field(default_factory=dict)

    def _bump(self, table: dict[str, int], step: str) -> None:
        table[step] = table.get(step, 0) + 1

    def count_kept(self, step: str) -> None:
        self._bump(self.kept, step)

    def count_reverted(self, step: str) -> None:
        self._bump(self.reverted, step)

    @property
    def total_reverted(self) -> int:
        return sum(self.reverted.values())


def parse_pipeline(letters: str) -> tuple[str, ...]:
    """Validate a pipeline spelling such as ``"sfrc"`` into step codes."""
    steps = tuple(letters)
    for step in steps:
        if step not in STEP_LETTERS:
            raise RankPriceError(
                f"unknown local-search step {step!r}; valid letters are '{STEP_LETTERS}'"
            )
    return steps


def _buyer_budgets(inst: Instance, assignment: Assignment) -> list[list[int]]:
    """Budgets of each product's buyers, in customer order."""
    per_product: list[list[int]] = [[] for _ in range(inst.num_products)]
    for k, i in enumerate(assignment.chosen):
        if i is not None:
            per_product[i].append(inst.budgets[k])
    return per_product


def slack(
    inst: Instance, grid: BudgetGrid, indices: PriceIndices, assignment: Assignment
) -> tuple[PriceIndices, Assignment]:
    """Raise each sold product's price to its cheapest buyer's budget.

    Every current buyer can still afford the product and nobody else's
    choice is touched, so the purchase pattern is unchanged and revenue can
    only grow. Idempotent.
    """
    new = list(indices)
    for i, budgets in enumerate(_buyer_budgets(inst, assignment)):
        if budgets:
            new[i] = grid.index_of(min(budgets))
    revenue = sum(grid.values[new[i]] for i in assignment.chosen if i is not None)
    return tuple(new), Assignment(chosen=assignment.chosen, revenue=revenue)


def fill(
    inst: Instance,
    grid: BudgetGrid,
    indices: PriceIndices,
    assignment: Assignment,
    stats: LocalSearchStats | None = None,
) -> tuple[PriceIndices, Assignment]:
    """Drop each unsold product's price to attract unassigned customers.

    The candidate price is the cheapest budget among currently-unassigned
    customers interested in the product. The lowered price may also lure
    customers away from other products, so the move is kept only when the
    re-evaluated revenue strictly improves. Products handled in ascending
    index order, each seeing the effects of earlier kept moves.
    """
    cur = list(indices)
    cur_a = assignment
    sold = {choice for choice in cur_a.chosen if choice is not None}
    unassigned = [k for k, choice in enumerate(cur_a.chosen) if choice is None]
    for i in range(inst.num_products):
        if i in sold:
            continue
        interested = [k for k in unassigned if inst.preferences[k][i] is not None]
        if not interested:
            continue
        price = min(inst.budgets[k] for k in interested)
        m = grid.index_of(price)
        if m == cur[i]:
            continue
        trial = list(cur)
        trial[i] = m
        trial_a = assign(inst, grid, trial)
        if stats is not None:
            stats.assign_calls += 1
        if trial_a.revenue > cur_a.revenue:
            cur, cur_a = trial, trial_a
            sold = {choice for choice in cur_a.chosen if choice is not None}
            unassigned = [k for k, choice in enumerate(cur_a.chosen) if choice is None]
            if stats is not None:
                stats.count_kept("f")
        elif stats is not None:
            stats.count_reverted("f")
    return tuple(cur), cur_a


def _buyers_by_product(inst: Instance, assignment: Assignment) -> list[list[int]]:
    """Customers buying each product, in customer order."""
    buyers: list[list[int]] = [[] for _ in range(inst.num_products)]
    for k, choice in enumerate(assignment.chosen):
        if choice is not None:
            buyers[choice].append(k)
    return buyers


def _second_cheapest_move(
    inst: Instance,
    grid: BudgetGrid,
    cur: list[int],
    cur_a: Assignment,
    product: int,
    buyers: list[int],
    step: str,
    stats: LocalSearchStats | None,
) -> tuple[list[int], Assignment]:
    """Try pricing ``product`` at its second-cheapest buyer budget; keep iff better."""
    second = sorted(inst.budgets[k] for k in buyers)[1]
    m = grid.index_of(second)
    if m == cur[product]:
        return cur, cur_a
    trial = list(cur)
    trial[product] = m
    trial_a = assign(inst, grid, trial)
    if stats is not None:
        stats.assign_calls += 1
    if trial_a.revenue > cur_a.revenue:
        if stats is not None:
            stats.count_kept(step)
        return trial, trial_a
    if stats is not None:
        stats.count_reverted(step)
    return cur, cur_a


def reassignment(
    inst: Instance,
    grid: BudgetGrid,
    indices: PriceIndices,
    assignment: Assignment,
    stats: LocalSearchStats | None = None,
) -> tuple[PriceIndices, Assignment]:
    """Raise a product's price from its cheapest to its second-cheapest buyer budget.

    Sheds the poorest buyer but charges everyone else more; kept only when
    re-evaluated revenue strictly improves. Expects slack-free prices (run
    :func:`slack` first). Products handled in ascending index order.
    """
    cur = list(indices)
    cur_a = assignment
    buyers_table = _buyers_by_product(inst, cur_a)
    for i in range(inst.num_products):
        buyers = buyers_table[i]
        if len(buyers) < 2:
            continue
        cur, moved_a = _second_cheapest_move(inst, grid, cur, cur_a, i, buyers, "r", stats)
        if moved_a is not cur_a:
            cur_a = moved_a
            buyers_table = _buyers_by_product(inst, cur_a)
    return tuple(cur), cur_a


def conditional_reassignment(
    inst: Instance,
    grid: BudgetGrid,
    indices: PriceIndices,
    assignment: Assignment,
    stats: LocalSearchStats | None = None,
) -> tuple[PriceIndices, Assignment]:
    """Reassignment restricted to products whose poorest buyer has a fallback.

    The price of product i moves to the second-cheapest buyer budget only if
    some other product is currently priced exactly at the poorest buyer's
    budget and that buyer wants it, so the displaced customer keeps spending
    the same amount. A displaced buyer may still prefer a cheaper third
    product, so the move is guarded by re-evaluation like reassignment.
    Expects slack-free prices.
    """
    cur = list(indices)
    cur_a = assignment
    buyers_table = _buyers_by_product(inst, cur_a)
    for i in range(inst.num_products):
        buyers = buyers_table[i]
        if len(buyers) < 2:
            continue
        price = grid.values[cur[i]]
        poorest = min(buyers, key=lambda k: (inst.budgets[k], k))
        if inst.budgets[poorest] != price:
            continue
        fallback = any(
            j != i
            and grid.values[cur[j]] == inst.budgets[poorest]
            and inst.preferences[poorest][j] is not None
            for j in range(inst.num_products)
        )
        if not fallback:
            continue
        cur, moved_a = _second_cheapest_move(inst, grid, cur, cur_a, i, buyers, "c", stats)
        if moved_a is not cur_a:
            cur_a = moved_a
            buyers_table = _buyers_by_product(inst, cur_a)
    return tuple(cur), cur_a


def scan_product(
    inst: Instance,
    grid: BudgetGrid,
    indices: PriceIndices,
    assignment: Assignment,
    product: int,
    stats: LocalSearchStats | None = None,
) -> tuple[PriceIndices, Assignment]:
    """Try every alternative grid price for one product, first-improvement.

    Grid values are visited in ascending order, skipping the price currently
    held; a strictly better vector is kept immediately and the scan continues
    from it.
    """
    cur = list(indices)
    cur_a = assignment
    for m in range(grid.size):
        if m == cur[product]:
            continue
        trial = list(cur)
        trial[product] = m
        trial_a = assign(inst, grid, trial)
        if stats is not None:
            stats.assign_calls += 1
        if trial_a.revenue > cur_a.revenue:
            cur, cur_a = trial, trial_a
            if stats is not None:
                stats.count_kept("o")
    return tuple(cur), cur_a


def opt_based(
    inst: Instance,
    grid: BudgetGrid,
    indices: PriceIndices,
    assignment: Assignment,
    rng: random.Random,
    order: Sequence[int] | None = None,
    stats: LocalSearchStats | None = None,
) -> tuple[PriceIndices, Assignment]:
    """Benchmark scan: products in random order, every alternative price tried.

    ``order`` overrides the shuffled product order (used by tests to pin a
    specific walk).
    """
    if order is None:
        order = list(range(inst.num_products))
        rng.shuffle(order)
    cur, cur_a = tuple(indices), assignment
    for i in order:
        cur, cur_a = scan_product(inst, grid, cur, cur_a, i, stats)
    return cur, cur_a


def run_pipeline(
    inst: Instance,
    grid: BudgetGrid,
    pipeline: Sequence[str],
    batch: Sequence[tuple[PriceIndices, Assignment]],
    rng: random.Random,
    stats: LocalSearchStats | None = None,
) -> list[tuple[PriceIndices, Assignment]]:
    """Apply the pipeline steps in order to every batch element.

    Reassignment steps need slack-free prices; when the pipeline itself does
    not contain a slack step, one is applied on the fly before the first of
    them.
    """
    steps = parse_pipeline(pipeline) if isinstance(pipeline, str) else tuple(pipeline)
    needs_slack = "s" not in steps
    out: list[tuple[PriceIndices, Assignment]] = []
    for indices, assignment in batch:
        cur = (tuple(indices), assignment)
        for step in steps:
            if step in ("r", "c") and needs_slack:
                cur = slack(inst, grid, *cur)
            if step == "s":
                cur = slack(inst, grid, *cur)
            elif step == "f":
                cur = fill(inst, grid, *cur, stats=stats)
            elif step == "r":
                cur = reassignment(inst, grid, *cur, stats=stats)
            elif step == "c":
                cur = conditional_reassignment(inst, grid, *cur, stats=stats)
            elif step == "o":
                cur = opt_based(inst, grid, *cur, rng=rng, stats=stats)
        out.append(cur)
    return out
