"""Ground truth at desk scale: full grid enumeration and an LP exporter.

The optimum of an instance always sits on the budget grid, so exhaustive
enumeration of the M^I grid vectors is an exact oracle whenever that count
is affordable. For anything larger, ``export_single_level`` writes the
equivalent single-level binary program (quadratic objective, linear
constraints) in LP format for an external solver; this package never solves
that model itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Mapping, Sequence

from .errors import SearchSpaceTooLarge
from .evaluate import assign
from .model import Assignment, BudgetGrid, Instance, PriceIndices

DEFAULT_ENUMERATION_CAP = 10_000_000


def brute_force(
    inst: Instance, grid: BudgetGrid, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[int, list[PriceIndices]]:
    """Maximum revenue over the whole grid and every vector attaining it.

    The argmax list comes out lexicographically sorted (index order, which
    matches price order). Refuses to enumerate more than ``cap`` vectors.
    """
    total = grid.size**inst.num_products
    if total > cap:
        raise SearchSpaceTooLarge(total, cap)
    best = -1
    argmax: list[PriceIndices] = []
    for indices in iter_product(range(grid.size), repeat=inst.num_products):
        revenue = assign(inst, grid, indices).revenue
        if revenue > best:
            best = revenue
            argmax = [indices]
        elif revenue == best:
            argmax.append(indices)
    return best, argmax


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    terms: tuple[tuple[int, str], ...]
    sense: str  # "<=" or ">="
    rhs: int


@dataclass(frozen=True)
class MilpModel:
    """Single-level reformulation: binary price-choice and purchase variables.

    ``v_{i}_{m}`` = 1 when product i is priced at the m-th grid value,
    ``x_{i}_{k}`` = 1 when customer k buys product i (all names 1-based).
    The objective is the bilinear revenue sum; constraint families are
    one-price-per-product (onep), one-purchase-per-customer (onec),
    buy-only-affordably-priced-products (link) and buy-your-best-affordable
    (pref). In the link and pref rows of customer k, price-choice variables
    are summed only over grid values within k's budget: that restriction is
    what encodes affordability, and without it the model would let customers
    buy products priced beyond their budget.
    """

    v_names: tuple[str, ...]
    x_names: tuple[str, ...]
    objective: tuple[tuple[int, str, str], ...]  # (budget, v name, x name)
    rows: tuple[ConstraintRow, ...]
    fixed_zero: tuple[str, ...]

    def family_counts(self) -> dict[str, int]:
        counts = {"onep": 0, "onec": 0, "link": 0, "pref": 0}
        for row in self.rows:
            counts[row.name.split("_", 1)[0]] += 1
        return counts

    def objective_value(self, values: Mapping[str, int]) -> int:
        return sum(
            b * values.get(v, 0) * values.get(x, 0) for b, v, x in self.objective
        )

    def violated_rows(self, values: Mapping[str, int]) -> list[str]:
        """Names of constraints (and fixed bounds) the 0/1 point violates."""
        bad = []
        for row in self.rows:
            lhs = sum(coef * values.get(name, 0) for coef, name in row.terms)
            ok = lhs <= row.rhs if row.sense == "<=" else lhs >= row.rhs
            if not ok:
                bad.append(row.name)
        bad.extend(name for name in self.fixed_zero if values.get(name, 0) != 0)
        return bad


def build_single_level(inst: Instance, grid: BudgetGrid) -> MilpModel:
    """Assemble the single-level model for an instance.

    Purchases a customer can never make are fixed to zero instead of being
    constrained: their x variable gets a zero bound, their pref row and their
    objective terms are omitted. Everything else is emitted in full, so the
    link family always has K*I rows.
    """
    num_i, num_k, num_m = inst.num_products, inst.num_customers, grid.size
    v_name = lambda i, m: f"v_{i + 1}_{m + 1}"
    x_name = lambda i, k: f"x_{i + 1}_{k + 1}"

    v_names = tuple(v_name(i, m) for i in range(num_i) for m in range(num_m))
    x_names = tuple(x_name(i, k) for i in range(num_i) for k in range(num_k))

    objective = tuple(
        (grid.values[m], v_name(i, m), x_name(i, k))
        for k in range(num_k)
        for i in range(num_i)
        if inst.preferences[k][i] is not None
        for m in range(num_m)
    )

    rows: list[ConstraintRow] = []
    for i in range(num_i):
        rows.append(
            ConstraintRow(
                name=f"onep_{i + 1}",
                terms=tuple((1, v_name(i, m)) for m in range(num_m)),
                sense="<=",
                rhs=1,
            )
        )
    for k in range(num_k):
        rows.append(
            ConstraintRow(
                name=f"onec_{k + 1}",
                terms=tuple((1, x_name(i, k)) for i in range(num_i)),
                sense="<=",
                rhs=1,
            )
        )
    def affordable_levels(k):
        return [m for m in range(num_m) if grid.values[m] <= inst.budgets[k]]

    for k in range(num_k):
        levels = affordable_levels(k)
        for i in range(num_i):
            terms = [(1, x_name(i, k))]
            terms.extend((-1, v_name(i, m)) for m in levels)
            rows.append(
                ConstraintRow(
                    name=f"link_{k + 1}_{i + 1}", terms=tuple(terms), sense="<=", rhs=0
                )
            )
    for k in range(num_k):
        levels = affordable_levels(k)
        for i in range(num_i):
            score_i = inst.preferences[k][i]
            if score_i is None:
                continue
            terms = [
                (inst.preferences[k][j], x_name(j, k))
                for j in range(num_i)
                if inst.preferences[k][j] is not None
            ]
            terms.extend((-score_i, v_name(i, m)) for m in levels)
            rows.append(
                ConstraintRow(
                    name=f"pref_{k + 1}_{i + 1}", terms=tuple(terms), sense=">=", rhs=0
                )
            )

    fixed_zero = tuple(
        x_name(i, k)
        for i in range(num_i)
        for k in range(num_k)
        if inst.preferences[k][i] is None
    )
    return MilpModel(
        v_names=v_names,
        x_names=x_names,
        objective=objective,
        rows=tuple(rows),
        fixed_zero=fixed_zero,
    )


def variable_values(
    inst: Instance, grid: BudgetGrid, indices: Sequence[int], assignment: Assignment
) -> dict[str, int]:
    """0/1 values of every model variable encoding the given prices/purchases."""
    values = {}
    for i, m in enumerate(indices):
        values[f"v_{i + 1}_{m + 1}"] = 1
    for k, i in enumerate(assignment.chosen):
        if i is not None:
            values[f"x_{i + 1}_{k + 1}"] = 1
    return values


def _render_terms(terms: Sequence[tuple[int, str]]) -> str:
    parts = []
    for coef, name in terms:
        if not parts:
            parts.append(f"{coef} {name}" if coef >= 0 else f"- {-coef} {name}")
        elif coef >= 0:
            parts.append(f"+ {coef} {name}")
        else:
            parts.append(f"- {-coef} {name}")
    return " ".join(parts)


def export_single_level(inst: Instance, grid: BudgetGrid) -> str:
    """LP-format text of the single-level model, byte-stable per instance.

    The bilinear objective uses the LP quadratic convention: terms are listed
    inside ``[ ... ] / 2`` with doubled coefficients. Variables are ordered
    by (product, grid index) then (product, customer); rows by family.
    """
    model = build_single_level(inst, grid)
    lines = [
        f"\\ single-level rank pricing model: {inst.name or 'unnamed instance'}",
        f"\\ I={inst.num_products} products, K={inst.num_customers} customers, "
        f"M={grid.size} candidate prices",
        "\\ unavailable (customer, product) pairs: x fixed to 0 in Bounds,",
        "\\ matching pref row and objective terms omitted",
        "\\ link/pref rows sum price choices only over values within the",
        "\\ customer's budget, which encodes affordability",
        "Maximize",
        " obj: [",
    ]
    for budget, v, x in model.objective:
        lines.append(f"   + {2 * budget} {v} * {x}")
    lines.append("   ] / 2")
    lines.append("Subject To")
    for row in model.rows:
        lines.append(f" {row.name}: {_render_terms(row.terms)} {row.sense} {row.rhs}")
    if model.fixed_zero:
        lines.append("Bounds")
        for name in model.fixed_zero:
            lines.append(f" {name} = 0")
    lines.append("Binaries")
    for name in model.v_names + model.x_names:
        lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(inst: Instance, grid: BudgetGrid, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_single_level(inst, grid))
