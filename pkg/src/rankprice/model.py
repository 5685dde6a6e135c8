"""Problem data: pricing instances, the budget grid, and purchase assignments.

Prices are not free-form: an optimal price always coincides with some
customer's budget, so the search space for every solver in this package is
the grid of distinct budget values. Price vectors are therefore represented
as tuples of 0-based indices into that grid (one index per product), which
keeps neighborhood moves and mutations exact integer operations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    EmptyPreferenceRow,
    InstanceReadError,
    NonPositiveBudget,
    TiedPreferences,
)

# One budget-grid index per product.
PriceIndices = tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """One pricing problem: customer budgets plus a ranked preference matrix.

    ``preferences[k][i]`` is customer k's score for product i; higher means
    preferred, ``None`` marks a product the customer will never buy. Scores
    are pairwise distinct within a row, so each customer has a strict ranking
    of the products available to them. All values are immutable after
    construction; instances can be shared freely across worker processes.
    """

    name: str
    num_products: int
    num_customers: int
    budgets: tuple[int, ...]
    preferences: tuple[tuple[int | None, ...], ...]

    @cached_property
    def preference_order(self) -> tuple[tuple[int, ...], ...]:
        """Per customer, the available products from most to least preferred."""
        order = []
        for row in self.preferences:
            ranked = sorted(
                (i for i, score in enumerate(row) if score is not None),
                key=lambda i: -row[i],
            )
            order.append(tuple(ranked))
        return tuple(order)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "num_products": self.num_products,
            "num_customers": self.num_customers,
            "budgets": list(self.budgets),
            "preferences": [list(row) for row in self.preferences],
        }


@dataclass(frozen=True)
class BudgetGrid:
    """The strictly increasing distinct budget values of an instance."""

    values: tuple[int, ...]

    @cached_property
    def _index(self) -> dict[int, int]:
        return {value: m for m, value in enumerate(self.values)}

    @property
    def size(self) -> int:
        return len(self.values)

    def index_of(self, value: int) -> int:
        try:
            return self._index[value]
        except KeyError:
            raise ValueError(f"{value} is not a budget of this instance") from None

    def prices_of(self, indices: Sequence[int]) -> tuple[int, ...]:
        return tuple(map(self.values.__getitem__, indices))

    def indices_of(self, prices: Sequence[int]) -> PriceIndices:
        return tuple(self.index_of(p) for p in prices)


@dataclass(frozen=True)
class Assignment:
    """Per-customer purchase decision plus the resulting total revenue.

    ``chosen[k]`` is the product bought by customer k (0-based) or ``None``.
    """

    chosen: tuple[int | None, ...]
    revenue: int

    def buyers_of(self, product: int) -> tuple[int, ...]:
        return tuple(k for k, i in enumerate(self.chosen) if i == product)


def validate_instance(raw: Mapping) -> Instance:
    """Check raw instance data and build an :class:`Instance`.

    ``raw`` follows the canonical JSON layout: name, num_products,
    num_customers, budgets (length K), preferences (K rows of I entries,
    ``null``/``None`` meaning the customer cannot buy that product).
    """
    try:
        num_products = int(raw["num_products"])
        num_customers = int(raw["num_customers"])
        budgets = list(raw["budgets"])
        preferences = [list(row) for row in raw["preferences"]]
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"instance data is missing or malformed: {exc}") from exc
    name = str(raw.get("name", ""))

    if num_products < 1 or num_customers < 1:
        raise DimensionMismatch(
            f"need at least one product and one customer, got I={num_products}, K={num_customers}"
        )
    if len(budgets) != num_customers:
        raise DimensionMismatch(f"expected {num_customers} budgets, got {len(budgets)}")
    if len(preferences) != num_customers:
        raise DimensionMismatch(
            f"expected {num_customers} preference rows, got {len(preferences)}"
        )

    for k, value in enumerate(budgets):
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise NonPositiveBudget(k, value)

    for k, row in enumerate(preferences):
        if len(row) != num_products:
            raise DimensionMismatch(
                f"preferences[{k}] has {len(row)} entries, expected {num_products}"
            )
        seen = set()
        for i, score in enumerate(row):
            if score is None:
                continue
            if not isinstance(score, int) or isinstance(score, bool) or score <= 0:
                raise DimensionMismatch(
                    f"preferences[{k}][{i}] = {score!r}; scores are positive integers or null"
                )
            if score in seen:
                raise TiedPreferences(k, score)
            seen.add(score)
        if not seen:
            raise EmptyPreferenceRow(k)

    return Instance(
        name=name,
        num_products=num_products,
        num_customers=num_customers,
        budgets=tuple(budgets),
        preferences=tuple(tuple(row) for row in preferences),
    )


def build_grid(inst: Instance) -> BudgetGrid:
    """Distinct budgets of ``inst``, sorted ascending."""
    return BudgetGrid(values=tuple(sorted(set(inst.budgets))))


def load_instance(path) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceReadError(f"cannot read instance {path}: {exc}") from exc
    return validate_instance(raw)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst.to_dict(), fh, indent=1)
        fh.write("\n")
