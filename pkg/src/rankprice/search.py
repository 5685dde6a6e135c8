"""Population searches over the budget grid: random sampling, VNS, genetic.

All three methods share the same skeleton: grow a population of evaluated
price vectors batch by batch until a stopping rule fires, tracking the best
vector seen. They differ only in how a batch is proposed. Random sampling
draws vectors uniformly; the VNS draws them from boxes of growing radius
around the current elite vectors; the genetic method breeds them from elite
parents by uniform crossover and per-component mutation.

A run is driven by a single ``random.Random`` seeded from the parameters, so
identical (instance, params) inputs reproduce identical populations, traces
and results bit for bit. The wall clock only enters through an injectable
``clock`` callable, which lets tests freeze elapsed times.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from heapq import nsmallest
from typing import Callable, Sequence

from .errors import LengthMismatch, RankPriceError
from .evaluate import assign
from .local_search import LocalSearchStats, parse_pipeline, run_pipeline
from .model import Assignment, BudgetGrid, Instance, PriceIndices

RANDOM = "random"
GREEDY = "greedy"

# Safety valve for dedup mode, where a batch may need many draws to produce
# enough unseen vectors: give up on a batch after this many draws per slot.
_DEDUP_DRAWS_PER_SLOT = 1000


@dataclass(frozen=True)
class StopRule:
    """When a search run ends: population size, wall-clock, or iterations."""

    kind: str
    limit: float

    POINTS = "points"
    TIME = "time"
    ITERATIONS = "iterations"

    def __post_init__(self):
        if self.kind == self.POINTS:
            if int(self.limit) < 1:
                raise RankPriceError("point budget must be at least 1")
        elif self.kind == self.TIME:
            if self.limit <= 0:
                raise RankPriceError("time limit must be positive")
        elif self.kind == self.ITERATIONS:
            if int(self.limit) < 0:
                raise RankPriceError("iteration limit must be nonnegative")
        else:
            raise RankPriceError(f"unknown stop rule {self.kind!r}")

    @classmethod
    def point_budget(cls, n: int) -> "StopRule":
        return cls(cls.POINTS, int(n))

    @classmethod
    def time_limit(cls, seconds: float) -> "StopRule":
        return cls(cls.TIME, float(seconds))

    @classmethod
    def iterations(cls, n: int) -> "StopRule":
        return cls(cls.ITERATIONS, int(n))


@dataclass(frozen=True)
class SearchParams:
    """Knobs shared by all searches.

    ``l0`` initial population size, ``q`` elite set size, ``t`` batch size
    per iteration. ``dedup`` makes the population a set: re-drawn vectors are
    discarded and do not count toward a point budget. ``vns_reset_radius``
    restores the classical VNS reset of the radius to 1 on improvement
    (default keeps the radius unchanged on improvement and grows it only on
    failure). ``parents_with_replacement`` lets the genetic method pick the
    same elite twice as both parents.
    """

    l0: int = 1000
    q: int = 100
    t: int = 500
    stop: StopRule = StopRule.point_budget(24000)
    init: str = RANDOM
    seed: int = 0
    dedup: bool = False
    vns_reset_radius: bool = False
    parents_with_replacement: bool = False

    def __post_init__(self):
        if self.l0 < 1:
            raise RankPriceError("l0 must be at least 1")
        if not 1 <= self.q <= self.l0:
            raise RankPriceError("need 1 <= q <= l0")
        if self.t < 1:
            raise RankPriceError("t must be at least 1")
        if self.init not in (RANDOM, GREEDY):
            raise RankPriceError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class TraceEntry:
    """Best-so-far snapshot taken after every evaluation batch."""

    evals: int
    elapsed: float
    best: int


@dataclass
class SearchState:
    """Mutable state of one run; owned by a single run, never shared."""

    population: list[tuple[PriceIndices, int]] = field(default_factory=list)
    best_indices: PriceIndices | None = None
    best_value: int = -1
    radius: int = 1
    evals: int = 0
    trace: list[TraceEntry] = field(default_factory=list)
    elites: list[int] = field(default_factory=list)
    seen: set[PriceIndices] | None = None


@dataclass(frozen=True)
class SearchResult:
    best_indices: PriceIndices
    best_prices: tuple[int, ...]
    best_value: int
    trace: tuple[TraceEntry, ...]
    evaluations: int
    elapsed: float
    iterations: int
    ls_stats: LocalSearchStats
    state: SearchState


def select_elites(population: Sequence[tuple[PriceIndices, int]], q: int) -> list[int]:
    """Slots of the q highest-revenue members; ties go to earlier insertion."""
    q = min(q, len(population))
    return nsmallest(q, range(len(population)), key=lambda slot: (-population[slot][1], slot))


def random_price(grid: BudgetGrid, num_products: int, rng: random.Random) -> PriceIndices:
    """One vector with every component uniform over the grid."""
    size = grid.size
    return tuple(rng.randrange(size) for _ in range(num_products))


def greedy_init(inst: Instance, grid: BudgetGrid) -> PriceIndices:
    """Deterministic starting vector built from the richest customers down.

    Customers are visited by decreasing budget (ties by index); each prices
    their most preferred still-unpriced product at their own budget. Products
    nobody claimed end up at the top of the grid, where they sell to nobody
    but leave room to be priced down later.
    """
    order = sorted(range(inst.num_customers), key=lambda k: (-inst.budgets[k], k))
    prices: list[int | None] = [None] * inst.num_products
    unpriced = set(range(inst.num_products))
    for k in order:
        if not unpriced:
            break
        for i in inst.preference_order[k]:
            if i in unpriced:
                prices[i] = grid.index_of(inst.budgets[k])
                unpriced.remove(i)
                break
    top = grid.size - 1
    return tuple(top if m is None else m for m in prices)


@dataclass(frozen=True)
class Neighborhood:
    """Axis-aligned box of grid indices around a vector, clamped to the grid."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __contains__(self, indices: Sequence[int]) -> bool:
        return len(indices) == len(self.lo) and all(
            lo <= m <= hi for lo, m, hi in zip(self.lo, indices, self.hi)
        )

    def size(self) -> int:
        n = 1
        for lo, hi in zip(self.lo, self.hi):
            n *= hi - lo + 1
        return n

    def sample(self, rng: random.Random) -> PriceIndices:
        return tuple(rng.randint(lo, hi) for lo, hi in zip(self.lo, self.hi))

    def __iter__(self):
        def expand(prefix, dims):
            if not dims:
                yield tuple(prefix)
                return
            lo, hi = dims[0]
            for m in range(lo, hi + 1):
                yield from expand(prefix + [m], dims[1:])

        return expand([], list(zip(self.lo, self.hi)))


def neighborhood(grid: BudgetGrid, indices: Sequence[int], radius: int) -> Neighborhood:
    """All vectors whose components stay within ``radius`` grid steps.

    The box includes the center vector and is clipped at the grid edges.
    """
    if radius < 1:
        raise RankPriceError("radius must be at least 1")
    top = grid.size - 1
    lo = tuple(max(0, m - radius) for m in indices)
    hi = tuple(min(top, m + radius) for m in indices)
    return Neighborhood(lo=lo, hi=hi)


def crossover(p1: PriceIndices, p2: PriceIndices, rng: random.Random) -> PriceIndices:
    """Each component copied from either parent with equal probability."""
    if len(p1) != len(p2):
        raise LengthMismatch(f"parents have lengths {len(p1)} and {len(p2)}")
    return tuple(a if rng.random() < 0.5 else b for a, b in zip(p1, p2))


def mutate(grid: BudgetGrid, indices: PriceIndices, rng: random.Random) -> PriceIndices:
    """Resample each component with probability 1/I among the other grid values."""
    size = grid.size
    n = len(indices)
    if size < 2:
        return tuple(indices)
    rate = 1.0 / n
    out = list(indices)
    for i in range(n):
        if rng.random() < rate:
            draw = rng.randrange(size - 1)
            if draw >= out[i]:
                draw += 1
            out[i] = draw
    return tuple(out)


class _Run:
    """Shared bookkeeping of one search run: population, best, trace, stats."""

    def __init__(self, inst, grid, params, rng, pipeline, clock):
        self.inst = inst
        self.grid = grid
        self.params = params
        self.rng = rng if rng is not None else random.Random(params.seed)
        if pipeline is None:
            self.pipeline: tuple[str, ...] = ()
        elif isinstance(pipeline, str):
            self.pipeline = parse_pipeline(pipeline)
        else:
            self.pipeline = tuple(pipeline)
        self.clock: Callable[[], float] = clock if clock is not None else time.perf_counter
        self.t0 = self.clock()
        self.state = SearchState(seen=set() if params.dedup else None)
        self.stats = LocalSearchStats()
        self.exhausted = False
        self.iterations = 0
        self.grid_points = grid.size**inst.num_products

    def elapsed(self) -> float:
        return self.clock() - self.t0

    def stop_reached(self) -> bool:
        if self.exhausted:
            return True
        stop = self.params.stop
        if stop.kind == StopRule.POINTS:
            return self.state.evals >= int(stop.limit)
        if stop.kind == StopRule.TIME:
            return self.elapsed() >= stop.limit
        return self.iterations >= int(stop.limit)

    def batch_quota(self, size: int) -> int:
        stop = self.params.stop
        if stop.kind == StopRule.POINTS:
            return min(size, int(stop.limit) - self.state.evals)
        return size

    def try_insert(self, indices: PriceIndices):
        """Evaluate and append one vector; returns (slot, assignment) or None.

        In dedup mode an already-seen vector is discarded without evaluation
        and does not count toward the point budget.
        """
        st = self.state
        if st.seen is not None:
            if indices in st.seen:
                return None
            st.seen.add(indices)
        a = assign(self.inst, self.grid, indices)
        st.population.append((indices, a.revenue))
        st.evals += 1
        return len(st.population) - 1, a

    def fill_batch(self, quota: int, make_candidate) -> list[tuple[int, Assignment]]:
        """Insert ``quota`` new vectors produced by ``make_candidate``."""
        batch: list[tuple[int, Assignment]] = []
        draws = 0
        max_draws = quota * _DEDUP_DRAWS_PER_SLOT
        st = self.state
        while len(batch) < quota:
            if st.seen is not None and len(st.seen) >= self.grid_points:
                self.exhausted = True
                break
            if draws >= max_draws and st.seen is not None:
                self.exhausted = True
                break
            draws += 1
            inserted = self.try_insert(make_candidate())
            if inserted is not None:
                batch.append(inserted)
        return batch

    def select_elites(self) -> list[int]:
        elites = select_elites(self.state.population, self.params.q)
        self.state.elites = elites
        return elites

    def finish_batch(self, batch: list[tuple[int, Assignment]]) -> bool:
        """Run the pipeline over the batch, fold results back, update the best.

        Returns True when some (possibly improved) batch member strictly beats
        the incumbent.
        """
        st = self.state
        if self.pipeline and batch:
            pairs = [(st.population[slot][0], a) for slot, a in batch]
            improved = run_pipeline(
                self.inst, self.grid, self.pipeline, pairs, self.rng, self.stats
            )
            for (slot, _), (indices, a) in zip(batch, improved):
                st.population[slot] = (indices, a.revenue)
                if st.seen is not None:
                    st.seen.add(indices)
            batch = [(slot, a) for (slot, _), (_, a) in zip(batch, improved)]
        better = False
        for slot, a in batch:
            if a.revenue > st.best_value:
                st.best_value = a.revenue
                st.best_indices = st.population[slot][0]
                better = True
        return better

    def snapshot(self) -> None:
        st = self.state
        st.trace.append(TraceEntry(evals=st.evals, elapsed=self.elapsed(), best=st.best_value))

    def init_population(self) -> None:
        quota = self.batch_quota(self.params.l0)
        first_greedy = self.params.init == GREEDY
        batch: list[tuple[int, Assignment]] = []
        if first_greedy and quota > 0:
            inserted = self.try_insert(greedy_init(self.inst, self.grid))
            if inserted is not None:
                batch.append(inserted)
            quota -= 1
        batch.extend(
            self.fill_batch(
                quota, lambda: random_price(self.grid, self.inst.num_products, self.rng)
            )
        )
        # Initial members are evaluated as-is: the pipeline only refines the
        # vectors proposed inside the loop.
        for slot, a in batch:
            if a.revenue > self.state.best_value:
                self.state.best_value = a.revenue
                self.state.best_indices = self.state.population[slot][0]
        self.snapshot()

    def result(self) -> SearchResult:
        st = self.state
        if st.best_indices is None:
            raise RankPriceError("search produced no evaluated vector")
        return SearchResult(
            best_indices=st.best_indices,
            best_prices=self.grid.prices_of(st.best_indices),
            best_value=st.best_value,
            trace=tuple(st.trace),
            evaluations=st.evals,
            elapsed=self.elapsed(),
            iterations=self.iterations,
            ls_stats=self.stats,
            state=st,
        )


def naive_search(
    inst: Instance,
    grid: BudgetGrid,
    params: SearchParams,
    rng: random.Random | None = None,
    pipeline=None,
    clock=None,
) -> SearchResult:
    """Pure uniform sampling of the grid, best vector wins.

    There is no seeded population and no use of ``params.init``; vectors are
    drawn in batches of ``params.t`` so traces have the same granularity as
    the other methods.
    """
    run = _Run(inst, grid, params, rng, pipeline, clock)
    while not run.stop_reached():
        quota = run.batch_quota(params.t)
        if quota <= 0:
            break
        batch = run.fill_batch(
            quota, lambda: random_price(grid, inst.num_products, run.rng)
        )
        run.finish_batch(batch)
        run.snapshot()
        run.iterations += 1
        if not batch:
            break
    return run.result()


def vns_search(
    inst: Instance,
    grid: BudgetGrid,
    params: SearchParams,
    rng: random.Random | None = None,
    pipeline=None,
    clock=None,
) -> SearchResult:
    """Variable neighborhood search over the budget grid.

    Each iteration samples ``t`` vectors by picking an elite uniformly and
    then a point uniformly from the box of the current radius around it. When
    no sampled vector beats the incumbent the radius grows by one, capped
    where the box already covers the whole grid; on improvement it stays put
    (or resets to 1 with ``vns_reset_radius``).
    """
    run = _Run(inst, grid, params, rng, pipeline, clock)
    run.init_population()
    radius_cap = max(1, grid.size - 1)
    radius = 1
    while not run.stop_reached():
        quota = run.batch_quota(params.t)
        if quota <= 0:
            break
        elites = run.select_elites()
        pop = run.state.population

        def candidate():
            center = pop[run.rng.choice(elites)][0]
            return neighborhood(grid, center, radius).sample(run.rng)

        batch = run.fill_batch(quota, candidate)
        improved = run.finish_batch(batch)
        if improved:
            if params.vns_reset_radius:
                radius = 1
        else:
            radius = min(radius + 1, radius_cap)
        run.state.radius = radius
        run.snapshot()
        run.iterations += 1
        if not batch:
            break
    return run.result()


def genetic_search(
    inst: Instance,
    grid: BudgetGrid,
    params: SearchParams,
    rng: random.Random | None = None,
    pipeline=None,
    clock=None,
) -> SearchResult:
    """Genetic search: elites breed batches by uniform crossover and mutation.

    Parents default to two distinct elites per child; with
    ``parents_with_replacement`` both may coincide.
    """
    if not params.parents_with_replacement and params.q < 2:
        raise RankPriceError("genetic search needs q >= 2 to pick two distinct parents")
    run = _Run(inst, grid, params, rng, pipeline, clock)
    run.init_population()
    while not run.stop_reached():
        quota = run.batch_quota(params.t)
        if quota <= 0:
            break
        elites = run.select_elites()
        pop = run.state.population

        def candidate():
            if params.parents_with_replacement:
                s1 = run.rng.choice(elites)
                s2 = run.rng.choice(elites)
            else:
                s1, s2 = run.rng.sample(elites, 2)
            child = crossover(pop[s1][0], pop[s2][0], run.rng)
            return mutate(grid, child, run.rng)

        batch = run.fill_batch(quota, candidate)
        run.finish_batch(batch)
        run.snapshot()
        run.iterations += 1
        if not batch:
            break
    return run.result()
