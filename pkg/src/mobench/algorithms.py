"""Optimizers: random search, NSGA-II, SMS-EMOA, and MOEA/D.

All runs are driven through evaluate_instance so every evaluation is logged
with both the algorithm-visible and the original objectives. Selection uses
the algorithm-visible values (f_seen); the archive collects original-space
values. Each run owns a single seeded generator; operator draw order is
documented on the operators, so a run is a pure function of
(instance, AlgoConfig).

Variation defaults follow the usual framework settings: SBX with eta=15 and
crossover probability 0.9, polynomial mutation with eta=20 and per-variable
probability 1/d.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .indicators import ParetoArchive
from .instance import (
    EvaluationRecord,
    ProblemInstance,
    evaluate_instance,
    evaluate_instance_batch,
)

__all__ = [
    "ALGORITHM_NAMES",
    "AlgoConfig",
    "Individual",
    "RunResult",
    "run_algorithm",
    "run_random_search",
    "run_nsga2",
    "run_smsemoa",
    "run_moead",
    "sbx_crossover",
    "polynomial_mutation",
    "fast_nondominated_sort",
    "crowding_distance",
    "nsga2_survival",
    "hv_contributions_2d",
    "tchebycheff",
    "moead_weights",
]

ALGORITHM_NAMES = ("random_search", "nsga2", "smsemoa", "moead")

SBX_ETA = 15.0
SBX_PROB = 0.9
MUTATION_ETA = 20.0

MOEAD_NEIGHBORS = 20
MOEAD_MATE_NEIGHBORHOOD_PROB = 0.9


@dataclass(frozen=True)
class AlgoConfig:
    name: str
    population: int
    budget: int
    seed: int

    def __post_init__(self):
        if self.name not in ALGORITHM_NAMES:
            raise ParameterError(f"unknown algorithm {self.name!r}")
        if self.population < 1:
            raise ParameterError("population must be positive")
        if self.name != "random_search" and self.population < 2:
            raise ParameterError(f"{self.name} needs a population of at least 2")
        if self.budget < self.population:
            raise ParameterError("budget must be at least the population size")
        if self.seed < 0:
            raise ParameterError("seed must be a non-negative integer")


@dataclass(frozen=True, slots=True)
class Individual:
    x: np.ndarray
    f_seen: tuple[float, float]
    f_original: tuple[float, float]
    eval_index: int


@dataclass
class RunResult:
    config: AlgoConfig
    instance_descriptor: str
    log: list[EvaluationRecord]
    final_population: list[Individual]
    archive: ParetoArchive


def _individual(rec: EvaluationRecord) -> Individual:
    return Individual(rec.x_seen, rec.f_seen, rec.f_original, rec.eval_index)


class _RunState:
    """Budget accounting, logging, and archiving shared by all runners."""

    def __init__(self, inst: ProblemInstance, budget: int):
        self.inst = inst
        self.budget = budget
        self.log: list[EvaluationRecord] = []
        self.archive = ParetoArchive()

    @property
    def remaining(self) -> int:
        return self.budget - len(self.log)

    def eval_batch(self, points: np.ndarray) -> list[Individual]:
        records = evaluate_instance_batch(self.inst, points, len(self.log) + 1)
        self.log.extend(records)
        for rec in records:
            self.archive.insert(rec.f_original, rec.eval_index)
        return [_individual(r) for r in records]

    def eval_one(self, x: np.ndarray) -> Individual:
        rec = evaluate_instance(self.inst, x, len(self.log) + 1)
        self.log.append(rec)
        self.archive.insert(rec.f_original, rec.eval_index)
        return _individual(rec)


# --- variation operators --------------------------------------------------


def sbx_crossover(p1, p2, eta_c: float, p_c: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover, clipped to [0,1]^d.

    Draw order: one uniform gate, then one uniform per coordinate (skipped
    entirely when the gate fails, in which case parent copies are returned).
    With u=0.5 the spread factor is exactly 1 and children equal parents.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if rng.random() >= p_c:
        return p1.copy(), p2.copy()
    u = rng.random(p1.shape[0])
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta_c + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta_c + 1.0)),
    )
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return np.clip(c1, 0.0, 1.0), np.clip(c2, 0.0, 1.0)


def polynomial_mutation(p, eta_m: float, p_m: float, rng) -> np.ndarray:
    """Bounded polynomial mutation on [0,1]^d.

    Draw order: one uniform gate vector, then one uniform delta vector (both
    of length d, always consumed). A delta draw of exactly 0.5 leaves the
    coordinate unchanged.
    """
    x = np.asarray(p, dtype=float)
    gate = rng.random(x.shape[0])
    u = rng.random(x.shape[0])
    out = x.copy()
    mut = gate < p_m
    if not mut.any():
        return out
    xm = x[mut]
    um = u[mut]
    mut_pow = 1.0 / (eta_m + 1.0)
    # towards the lower bound for u < 0.5, upper bound otherwise
    low = um < 0.5
    xy = np.where(low, 1.0 - xm, xm)
    val = np.where(
        low,
        2.0 * um + (1.0 - 2.0 * um) * xy ** (eta_m + 1.0),
        2.0 * (1.0 - um) + 2.0 * (um - 0.5) * xy ** (eta_m + 1.0),
    )
    delta = np.where(low, val**mut_pow - 1.0, 1.0 - val**mut_pow)
    out[mut] = np.clip(xm + delta, 0.0, 1.0)
    return out


# --- ranking helpers -------------------------------------------------------


def fast_nondominated_sort(objectives) -> list[list[int]]:
    """Non-dominated sorting (minimization) into index fronts.

    Bi-objective sweep: after lexicographic sorting, a point's front is found
    by binary search over the per-front minimum of the second objective
    (patience-sorting argument), so the whole partition is O(n log n).
    Exact duplicates share the front of their first occurrence.
    """
    f = np.asarray(objectives, dtype=float)
    n = len(f)
    if n == 0:
        return []
    order = np.lexsort((f[:, 1], f[:, 0]))
    tails: list[float] = []  # current min f2 per front; non-decreasing
    fronts: list[list[int]] = []
    seen: dict[tuple[float, float], int] = {}
    for idx in order:
        f1, f2 = float(f[idx, 0]), float(f[idx, 1])
        r = seen.get((f1, f2))
        if r is None:
            r = bisect_right(tails, f2)
            if r == len(tails):
                tails.append(f2)
                fronts.append([])
            else:
                tails[r] = f2
            seen[(f1, f2)] = r
        fronts[r].append(int(idx))
    return fronts


def crowding_distance(front_objectives) -> np.ndarray:
    """Crowding distances of one front; boundary members get +inf."""
    f = np.asarray(front_objectives, dtype=float)
    n = len(f)
    if n == 0:
        raise ParameterError("front must be non-empty")
    dist = np.zeros(n)
    for m in range(f.shape[1]):
        order = np.argsort(f[:, m], kind="stable")
        fm = f[order, m]
        span = fm[-1] - fm[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0.0 and n > 2:
            dist[order[1:-1]] += (fm[2:] - fm[:-2]) / span
    return dist


def _rank_and_crowding(objectives) -> tuple[np.ndarray, np.ndarray]:
    fronts = fast_nondominated_sort(objectives)
    f = np.asarray(objectives, dtype=float)
    rank = np.empty(len(f), dtype=int)
    crowd = np.empty(len(f))
    for r, front in enumerate(fronts):
        rank[front] = r
        crowd[front] = crowding_distance(f[front])
    return rank, crowd


def nsga2_survival(objectives, capacity: int) -> list[int]:
    """Indices surviving (mu+mu) selection by rank, then crowding distance."""
    fronts = fast_nondominated_sort(objectives)
    f = np.asarray(objectives, dtype=float)
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= capacity:
            chosen.extend(front)
            continue
        crowd = crowding_distance(f[front])
        order = np.argsort(-crowd, kind="stable")
        need = capacity - len(chosen)
        chosen.extend(np.asarray(front)[order[:need]].tolist())
        break
    return chosen


def _tournament(rank: np.ndarray, crowd: np.ndarray, rng) -> int:
    i, j = rng.integers(0, len(rank), size=2)
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def hv_contributions_2d(front_objectives, ref) -> np.ndarray:
    """Exclusive hypervolume of each member of a non-dominated 2-D front."""
    f = np.asarray(front_objectives, dtype=float)
    n = len(f)
    order = np.lexsort((f[:, 1], f[:, 0]))
    fs = f[order]
    contrib = np.empty(n)
    for k in range(n):
        right_f1 = fs[k + 1, 0] if k + 1 < n else ref[0]
        upper_f2 = fs[k - 1, 1] if k > 0 else ref[1]
        contrib[order[k]] = max(right_f1 - fs[k, 0], 0.0) * max(upper_f2 - fs[k, 1], 0.0)
    return contrib


def tchebycheff(f, lam, z) -> float:
    """Weighted Tchebycheff aggregation max_i lam_i |f_i - z_i|."""
    return max(lam[0] * abs(f[0] - z[0]), lam[1] * abs(f[1] - z[1]))


def moead_weights(population: int) -> np.ndarray:
    """Uniform bi-objective weight lattice from (1, 0) to (0, 1)."""
    if population < 2:
        raise ParameterError("MOEA/D needs at least 2 weight vectors")
    w = np.linspace(0.0, 1.0, population)
    return np.column_stack([1.0 - w, w])


# --- runners ---------------------------------------------------------------


def run_random_search(inst: ProblemInstance, cfg: AlgoConfig) -> RunResult:
    """Uniform i.i.d. sampling of the whole budget.

    The final population is the non-dominated subset of all evaluations.
    """
    rng = np.random.default_rng(cfg.seed)
    state = _RunState(inst, cfg.budget)
    points = rng.random((cfg.budget, inst.problem.dim))
    individuals = state.eval_batch(points)
    survivors = {idx for _, _, idx in state.archive.entries()}
    final = [ind for ind in individuals if ind.eval_index in survivors]
    return RunResult(cfg, inst.descriptor, state.log, final, state.archive)


def _variation_pair(pop, rank, crowd, rng):
    i = _tournament(rank, crowd, rng)
    j = _tournament(rank, crowd, rng)
    c1, c2 = sbx_crossover(pop[i].x, pop[j].x, SBX_ETA, SBX_PROB, rng)
    d = len(c1)
    return (
        polynomial_mutation(c1, MUTATION_ETA, 1.0 / d, rng),
        polynomial_mutation(c2, MUTATION_ETA, 1.0 / d, rng),
    )


def run_nsga2(inst: ProblemInstance, cfg: AlgoConfig) -> RunResult:
    """Generational NSGA-II with binary tournaments on (rank, crowding).

    A final generation that does not fit into the budget is evaluated and
    logged (truncated) but skips environmental selection, so the final
    population is the last complete survivor set.
    """
    rng = np.random.default_rng(cfg.seed)
    state = _RunState(inst, cfg.budget)
    n = cfg.population
    pop = state.eval_batch(rng.random((n, inst.problem.dim)))
    while state.remaining > 0:
        rank, crowd = _rank_and_crowding([ind.f_seen for ind in pop])
        children: list[np.ndarray] = []
        while len(children) < n:
            c1, c2 = _variation_pair(pop, rank, crowd, rng)
            children.append(c1)
            if len(children) < n:
                children.append(c2)
        full_generation = state.remaining >= n
        offspring = state.eval_batch(np.array(children[: min(n, state.remaining)]))
        if not full_generation:
            break
        union = pop + offspring
        keep = nsga2_survival([ind.f_seen for ind in union], n)
        pop = [union[i] for i in keep]
    return RunResult(cfg, inst.descriptor, state.log, pop, state.archive)


def run_smsemoa(inst: ProblemInstance, cfg: AlgoConfig) -> RunResult:
    """Steady-state SMS-EMOA: drop the smallest hypervolume contributor.

    Contributions are computed on the worst front in f_seen space against
    that front's nadir shifted by (1, 1). One non-dominated sort per
    iteration suffices: the removed member sits in the worst front and
    dominates nobody, so the survivors keep their union ranks and only the
    worst front's crowding needs refreshing for the next tournament.
    """
    rng = np.random.default_rng(cfg.seed)
    state = _RunState(inst, cfg.budget)
    n = cfg.population
    pop = state.eval_batch(rng.random((n, inst.problem.dim)))
    rank, crowd = _rank_and_crowding([ind.f_seen for ind in pop])
    while state.remaining > 0:
        child_x, _ = _variation_pair(pop, rank, crowd, rng)
        pop.append(state.eval_one(child_x))
        objs = np.array([ind.f_seen for ind in pop])
        fronts = fast_nondominated_sort(objs)
        worst = fronts[-1]
        if len(worst) == 1:
            removed = worst[0]
        else:
            front = objs[worst]
            ref = front.max(axis=0) + 1.0
            removed = worst[int(np.argmin(hv_contributions_2d(front, ref)))]
        rank_u = np.empty(n + 1, dtype=int)
        crowd_u = np.empty(n + 1)
        for r, members in enumerate(fronts):
            rank_u[members] = r
            crowd_u[members] = crowding_distance(objs[members])
        pop.pop(removed)
        keep = np.arange(n + 1) != removed
        rank, crowd = rank_u[keep], crowd_u[keep]
        survivors = [i if i < removed else i - 1 for i in worst if i != removed]
        if survivors:
            crowd[survivors] = crowding_distance(objs[keep][survivors])
    return RunResult(cfg, inst.descriptor, state.log, pop, state.archive)


def run_moead(inst: ProblemInstance, cfg: AlgoConfig) -> RunResult:
    """MOEA/D with Tchebycheff aggregation on uniform bi-objective weights.

    Classic neighborhood scheme: size min(20, population); mating draws
    parents from the neighborhood with probability 0.9 (whole population
    otherwise); the offspring replaces every neighborhood member whose
    decomposed fitness it strictly improves.
    """
    rng = np.random.default_rng(cfg.seed)
    state = _RunState(inst, cfg.budget)
    n = cfg.population
    weights = moead_weights(n)
    t_size = min(MOEAD_NEIGHBORS, n)
    dist = np.linalg.norm(weights[:, np.newaxis, :] - weights[np.newaxis, :, :], axis=2)
    neighborhoods = np.argsort(dist, axis=1, kind="stable")[:, :t_size]
    pop = state.eval_batch(rng.random((n, inst.problem.dim)))
    z = np.min([ind.f_seen for ind in pop], axis=0)
    while state.remaining > 0:
        for i in range(n):
            if state.remaining == 0:
                break
            if rng.random() < MOEAD_MATE_NEIGHBORHOOD_PROB:
                pool = neighborhoods[i]
            else:
                pool = np.arange(n)
            p1, p2 = rng.choice(pool, size=2, replace=False)
            c1, _ = sbx_crossover(pop[p1].x, pop[p2].x, SBX_ETA, SBX_PROB, rng)
            child_x = polynomial_mutation(c1, MUTATION_ETA, 1.0 / len(c1), rng)
            child = state.eval_one(child_x)
            z = np.minimum(z, child.f_seen)
            for j in neighborhoods[i]:
                if tchebycheff(child.f_seen, weights[j], z) < tchebycheff(
                    pop[j].f_seen, weights[j], z
                ):
                    pop[j] = child
    return RunResult(cfg, inst.descriptor, state.log, pop, state.archive)


_RUNNERS = {
    "random_search": run_random_search,
    "nsga2": run_nsga2,
    "smsemoa": run_smsemoa,
    "moead": run_moead,
}


def run_algorithm(inst: ProblemInstance, cfg: AlgoConfig) -> RunResult:
    """Dispatch one run; deterministic in (instance, config)."""
    return _RUNNERS[cfg.name](inst, cfg)
