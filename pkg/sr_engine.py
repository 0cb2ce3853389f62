"""
Genetic-programming symbolic regression of one index series against t.

The search keeps tournament selection on MSE alone; the error/complexity
trade-off lives only in the Pareto archive, which model selection reads.
With linear scaling on, a candidate f is scored by the best line b + w*f
through the targets and enters the archive as that folded tree.

RNG streams: initialisation draws from SeedSequence(seed, spawn_key=(0,));
child i of generation g draws from SeedSequence(seed, spawn_key=(g, i)).
All draws happen in the sequential phase, so fitness evaluation may run in
a process pool without changing the result.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from data_ingest import TimeIndexMap
from errors import ConfigError, DomainError, EmptyFront, TooFewPoints, ValidationError
from expr_tree import (
    BINARY_OPS,
    MAX_EXPONENT,
    MIN_EXPONENT,
    UNARY_OPS,
    Binary,
    Const,
    Expr,
    PowInt,
    TimeVar,
    Unary,
    complexity,
    constants,
    depth,
    evaluate_many,
    iter_paths,
    replace_subtree,
    simplify,
    with_constants,
)
from expr_parser import to_text
from fit_metrics import FitMetrics, compute_metrics, mean_squared_error
from monitoring import metrics
from pca_core import ScoreSeries

logger = logging.getLogger(__name__)

REJECTED = math.inf

ALL_OPERATORS: Tuple[str, ...] = UNARY_OPS + BINARY_OPS + ("pow",)
MUTATION_KINDS: Tuple[str, ...] = ("subtree", "point", "jitter")


@dataclass(frozen=True)
class SrConfig:
    seed: int = 42
    population_size: int = 500
    generations: int = 200
    tournament_size: int = 5
    crossover_prob: float = 0.9
    mutation_prob: float = 0.15
    mutation_split: Tuple[float, float, float] = (0.5, 0.3, 0.2)
    init_depth_range: Tuple[int, int] = (2, 6)
    max_depth: int = 10
    constant_range: Tuple[float, float] = (-20.0, 20.0)
    operator_set: Tuple[str, ...] = ALL_OPERATORS
    exponent_range: Tuple[int, int] = (MIN_EXPONENT, MAX_EXPONENT)
    constant_tune_every: int = 10
    constant_tune_budget: int = 100
    grow_leaf_prob: float = 0.3
    const_leaf_prob: float = 0.5
    elite_count: int = 5
    linear_scaling: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("mutation_split", "init_depth_range", "constant_range",
                     "operator_set", "exponent_range"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        for name in ("crossover_prob", "mutation_prob", "grow_leaf_prob", "const_leaf_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if len(self.mutation_split) != 3 or any(p < 0 for p in self.mutation_split) \
                or sum(self.mutation_split) <= 0:
            raise ConfigError("mutation_split needs three non-negative weights (subtree, point, jitter)")
        lo, hi = self.init_depth_range
        if not 1 <= lo <= hi <= self.max_depth:
            raise ConfigError(
                f"depth bounds must satisfy 1 <= {lo} <= {hi} <= max_depth {self.max_depth}"
            )
        c_lo, c_hi = self.constant_range
        if not (math.isfinite(c_lo) and math.isfinite(c_hi) and c_lo <= c_hi):
            raise ConfigError(f"constant_range {self.constant_range} is not an ordered finite interval")
        unknown = [op for op in self.operator_set if op not in ALL_OPERATORS]
        if unknown:
            raise ConfigError(f"unknown operators {unknown}; allowed: {list(ALL_OPERATORS)}")
        e_lo, e_hi = self.exponent_range
        if not MIN_EXPONENT <= e_lo <= e_hi <= MAX_EXPONENT:
            raise ConfigError(f"exponent_range must lie within [{MIN_EXPONENT}, {MAX_EXPONENT}]")
        if self.constant_tune_every < 0 or self.constant_tune_budget < 0:
            raise ConfigError("constant tuning settings must be >= 0")
        if self.elite_count < 0 or self.elite_count >= self.population_size:
            raise ConfigError("elite_count must be in [0, population_size)")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def scales(self) -> bool:
        """Linear scaling applies only when the folded b + w*f stays inside the operator set."""
        return bool(self.linear_scaling) and "add" in self.operator_set and "mul" in self.operator_set

    @classmethod
    def from_mapping(cls, values: Optional[Mapping[str, Any]] = None, **overrides: Any) -> "SrConfig":
        """Build a config from a `search` settings section plus non-None overrides."""
        known = {f.name for f in fields(cls)}
        merged: Dict[str, Any] = {}
        for key, value in dict(values or {}).items():
            if key not in known:
                raise ConfigError(f"unknown search setting '{key}'")
            merged[key] = value
        merged.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**merged)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    def to_dict(self) -> Dict[str, Any]:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class TrainingSet:
    t: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=float).reshape(-1)
        y = np.array(self.y, dtype=float).reshape(-1)
        if t.size != y.size:
            raise ValidationError(f"{t.size} time points but {y.size} targets")
        if t.size < 3:
            raise TooFewPoints(f"training set needs at least 3 points, got {t.size}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
            raise ValidationError("training set contains non-finite values")
        if np.unique(t).size != t.size:
            raise ValidationError("training time points must be distinct")
        t.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.t.size)

    @classmethod
    def from_series(cls, series: ScoreSeries, tmap: TimeIndexMap) -> "TrainingSet":
        return cls(t=[tmap.t(year) for year in series.years], y=list(series.scores))


@dataclass(frozen=True)
class ParetoEntry:
    expr: Expr
    mse: float
    complexity: int

    def dominates(self, other: "ParetoEntry") -> bool:
        return (self.mse <= other.mse and self.complexity <= other.complexity
                and (self.mse < other.mse or self.complexity < other.complexity))


@dataclass(frozen=True)
class ParetoFront:
    """Mutually nondominated entries, ascending complexity, strictly decreasing mse."""

    entries: Tuple[ParetoEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def best(self) -> ParetoEntry:
        if not self.entries:
            raise EmptyFront("Pareto front is empty")
        return self.entries[-1]

    def complexity_bound(self, mse: float) -> Optional[int]:
        """Smallest complexity among entries at least as accurate as mse."""
        bounds = [e.complexity for e in self.entries if e.mse <= mse]
        return min(bounds) if bounds else None

    def to_records(self) -> List[Dict[str, Any]]:
        return [{"expression": to_text(e.expr), "mse": e.mse, "complexity": e.complexity}
                for e in self.entries]


@dataclass(frozen=True)
class SelectionCriterion:
    min_r2: float = 0.99


@dataclass(frozen=True)
class FitReport:
    expr: Expr
    metrics: FitMetrics
    complexity: int

    @property
    def expression(self) -> str:
        return to_text(self.expr)


# ---- fitness ---- #

def evaluate_fitness(e: Expr, data: TrainingSet) -> float:
    """MSE over the training set, or REJECTED if any point fails to evaluate finitely."""
    try:
        predicted = evaluate_many(e, data.t)
    except DomainError:
        return REJECTED
    with np.errstate(all="ignore"):
        mse = mean_squared_error(data.y, predicted)
    return mse if math.isfinite(mse) else REJECTED


Scale = Optional[Tuple[float, float]]


def scaled_fitness(e: Expr, data: TrainingSet) -> Tuple[float, Scale]:
    """
    MSE of the least-squares line b + w*f(t) through the targets.

    Returns (mse, (w, b)), or (mse, None) when the unscaled f(t) already
    fits at least as well. An f(t) that is constant over the training set
    gets w = 0 and b = mean(y).
    """
    try:
        f = evaluate_many(e, data.t)
    except DomainError:
        return REJECTED, None
    with np.errstate(all="ignore"):
        raw = mean_squared_error(data.y, f)
        f_mean = float(np.mean(f))
        y_mean = float(np.mean(data.y))
        centered = f - f_mean
        spread = float(centered @ centered)
        if not math.isfinite(spread) or spread <= 1e-12 * max(1.0, f_mean * f_mean) * data.n:
            w, b = 0.0, y_mean
            predicted = np.full(data.t.shape, b)
        else:
            w = float(centered @ (data.y - y_mean)) / spread
            b = y_mean - w * f_mean
            predicted = b + w * f
        scaled = mean_squared_error(data.y, predicted) if np.all(np.isfinite(predicted)) else REJECTED
    if not (math.isfinite(scaled) and math.isfinite(w) and math.isfinite(b)):
        return (raw, None) if math.isfinite(raw) else (REJECTED, None)
    if math.isfinite(raw) and raw <= scaled * (1.0 + 1e-9):
        return raw, None
    return scaled, (w, b)


def scale_expr(e: Expr, w: float, b: float) -> Expr:
    """The tree b + w*e, or the constant b when w is 0."""
    if w == 0.0:
        return Const(b)
    return Binary("add", Const(b), Binary("mul", Const(w), e))


def _fitness_chunk(args: Tuple[Sequence[Expr], TrainingSet, bool]) -> List[Tuple[float, Scale]]:
    exprs, data, linear = args
    if linear:
        return [scaled_fitness(e, data) for e in exprs]
    return [(evaluate_fitness(e, data), None) for e in exprs]


def _evaluate_population(
    population: Sequence[Expr],
    data: TrainingSet,
    pool: Optional[ProcessPoolExecutor],
    workers: int,
    linear: bool = False,
) -> List[Tuple[float, Scale]]:
    if pool is None:
        scores = _fitness_chunk((population, data, linear))
    else:
        size = max(1, math.ceil(len(population) / workers))
        chunks = [(population[i:i + size], data, linear) for i in range(0, len(population), size)]
        scores = [s for part in pool.map(_fitness_chunk, chunks) for s in part]
    metrics.inc("sr.evaluations", len(scores))
    metrics.inc("sr.rejected", sum(1 for mse, _ in scores if mse == REJECTED))
    return scores


# ---- tree generation and variation ---- #

def _stream(seed: int, key: Tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def _random_leaf(cfg: SrConfig, rng: np.random.Generator) -> Expr:
    if rng.random() < cfg.const_leaf_prob:
        lo, hi = cfg.constant_range
        return Const(float(rng.uniform(lo, hi)))
    return TimeVar()


def _random_tree(cfg: SrConfig, rng: np.random.Generator, max_d: int, full: bool) -> Expr:
    ops = cfg.operator_set
    if max_d <= 1 or not ops or (not full and rng.random() < cfg.grow_leaf_prob):
        return _random_leaf(cfg, rng)
    op = ops[int(rng.integers(len(ops)))]
    if op in UNARY_OPS:
        return Unary(op, _random_tree(cfg, rng, max_d - 1, full))
    if op == "pow":
        lo, hi = cfg.exponent_range
        base = _random_tree(cfg, rng, max_d - 1, full)
        return PowInt(base, int(rng.integers(lo, hi + 1)))
    left = _random_tree(cfg, rng, max_d - 1, full)
    right = _random_tree(cfg, rng, max_d - 1, full)
    return Binary(op, left, right)


def init_population(cfg: SrConfig, rng: np.random.Generator) -> List[Expr]:
    """Ramped half-and-half over init_depth_range."""
    lo, hi = cfg.init_depth_range
    depths = list(range(lo, hi + 1))
    population = []
    for i in range(cfg.population_size):
        d = depths[i % len(depths)]
        full = (i // len(depths)) % 2 == 1
        population.append(_random_tree(cfg, rng, d, full))
    return population


def crossover(a: Expr, b: Expr, rng: np.random.Generator, max_depth: int = 10) -> Tuple[Expr, Expr]:
    """Swap a random subtree of a with a random subtree of b."""
    paths_a = list(iter_paths(a))
    paths_b = list(iter_paths(b))
    path_a, sub_a = paths_a[int(rng.integers(len(paths_a)))]
    path_b, sub_b = paths_b[int(rng.integers(len(paths_b)))]
    c1 = replace_subtree(a, path_a, sub_b)
    c2 = replace_subtree(b, path_b, sub_a)
    if depth(c1) > max_depth:
        c1 = a
    if depth(c2) > max_depth:
        c2 = b
    return c1, c2


def _point_mutation(e: Expr, cfg: SrConfig, rng: np.random.Generator) -> Expr:
    paths = list(iter_paths(e))
    internal = [(p, n) for p, n in paths if isinstance(n, (Unary, Binary, PowInt))]
    path, node = (internal or paths)[int(rng.integers(len(internal or paths)))]

    if isinstance(node, Binary):
        choices = [op for op in BINARY_OPS if op != node.op and op in cfg.operator_set]
        if not choices:
            return e
        new: Expr = Binary(choices[int(rng.integers(len(choices)))], node.left, node.right)
    elif isinstance(node, Unary):
        choices = [op for op in UNARY_OPS if op != node.op and op in cfg.operator_set]
        if not choices:
            return e
        new = Unary(choices[int(rng.integers(len(choices)))], node.child)
    elif isinstance(node, PowInt):
        lo, hi = cfg.exponent_range
        choices = [k for k in range(lo, hi + 1) if k != node.exponent]
        if not choices:
            return e
        new = PowInt(node.base, choices[int(rng.integers(len(choices)))])
    elif isinstance(node, Const):
        new = TimeVar()
    else:
        lo, hi = cfg.constant_range
        new = Const(float(rng.uniform(lo, hi)))
    return replace_subtree(e, path, new)


def _jitter(e: Expr, cfg: SrConfig, rng: np.random.Generator) -> Expr:
    consts = [(p, n) for p, n in iter_paths(e) if isinstance(n, Const)]
    if not consts:
        return _point_mutation(e, cfg, rng)
    path, node = consts[int(rng.integers(len(consts)))]
    g = float(rng.standard_normal())
    value = node.value * (1.0 + 0.1 * g) + 0.01 * g
    if not math.isfinite(value):
        return e
    return replace_subtree(e, path, Const(value))


def _subtree_mutation(e: Expr, cfg: SrConfig, rng: np.random.Generator) -> Expr:
    paths = list(iter_paths(e))
    path, _ = paths[int(rng.integers(len(paths)))]
    room = cfg.max_depth - len(path)
    d = int(rng.integers(1, max(1, min(cfg.init_depth_range[1], room)) + 1))
    return replace_subtree(e, path, _random_tree(cfg, rng, d, full=False))


def mutate(e: Expr, cfg: SrConfig, rng: np.random.Generator, kind: Optional[str] = None) -> Expr:
    """
    Apply one mutation: subtree replacement, point mutation or constant jitter.

    The kind is drawn from cfg.mutation_split unless given. A result deeper
    than cfg.max_depth is discarded in favour of e.
    """
    if kind is None:
        split = np.asarray(cfg.mutation_split, dtype=float)
        kind = MUTATION_KINDS[int(rng.choice(len(MUTATION_KINDS), p=split / split.sum()))]
    if kind == "subtree":
        child = _subtree_mutation(e, cfg, rng)
    elif kind == "point":
        child = _point_mutation(e, cfg, rng)
    elif kind == "jitter":
        child = _jitter(e, cfg, rng)
    else:
        raise ConfigError(f"unknown mutation kind '{kind}'")
    return e if depth(child) > cfg.max_depth else child


def _tournament(fitness: Sequence[float], size: int, rng: np.random.Generator) -> int:
    picks = rng.integers(0, len(fitness), size=size)
    return int(min(picks, key=lambda i: (fitness[i], i)))


# ---- archive ---- #

def pareto_update(front: ParetoFront, candidate: ParetoEntry) -> ParetoFront:
    """Insert candidate unless an entry is at least as good on both objectives."""
    if not math.isfinite(candidate.mse):
        return front
    for entry in front.entries:
        if entry.mse <= candidate.mse and entry.complexity <= candidate.complexity:
            return front
    kept = [e for e in front.entries if not candidate.dominates(e)]
    kept.append(candidate)
    kept.sort(key=lambda e: (e.complexity, e.mse))
    return ParetoFront(tuple(kept))


class _Archive:
    """
    Pareto archive fed with raw candidates; only possible survivors are simplified.

    A candidate scored under linear scaling enters as the folded tree
    b + w*f; the archive remembers f (its shape) so tuning and elitism work
    on the shape rather than on the wrapper.
    """

    def __init__(self, data: TrainingSet) -> None:
        self.data = data
        self.front = ParetoFront()
        self._simplified: Dict[Expr, Tuple[Expr, int, float]] = {}
        self._shapes: Dict[Expr, Expr] = {}
        self._tuned: Set[Expr] = set()

    def offer(self, e: Expr, mse: float, scale: Scale = None) -> None:
        if not math.isfinite(mse):
            return
        bound = self.front.complexity_bound(mse)
        if bound is not None and bound <= 1:
            return
        shape = e
        if scale is not None:
            e = scale_expr(shape, *scale)
        cached = self._simplified.get(e)
        if cached is None:
            s = simplify(e)
            s_mse = mse if s == e else evaluate_fitness(s, self.data)
            cached = (s, complexity(s), s_mse)
            if len(self._simplified) > 50_000:
                self._simplified.clear()
            self._simplified[e] = cached
        s, cx, s_mse = cached
        before = self.front
        self.front = pareto_update(self.front, ParetoEntry(s, s_mse, cx))
        if self.front is not before and scale is not None:
            self._shapes[s] = shape

    def shape_of(self, e: Expr) -> Expr:
        """The unscaled tree behind a front expression (e itself if it was not scaled)."""
        return self._shapes.get(e, e)

    def tune(self, budget: int) -> None:
        for entry in self.front.entries:
            if entry.expr in self._tuned:
                continue
            self._tuned.add(entry.expr)
            shape = self._shapes.get(entry.expr)
            if shape is not None:
                if not constants(shape):
                    continue
                metrics.inc("sr.constant_tuning")
                tuned = optimize_constants(shape, self.data, budget, linear_scaling=True)
                if tuned != shape:
                    self.offer(tuned, *scaled_fitness(tuned, self.data))
                continue
            if not constants(entry.expr):
                continue
            metrics.inc("sr.constant_tuning")
            tuned = optimize_constants(entry.expr, self.data, budget)
            if tuned != entry.expr:
                self.offer(tuned, evaluate_fitness(tuned, self.data))
        live = {entry.expr for entry in self.front.entries}
        self._shapes = {k: v for k, v in self._shapes.items() if k in live}
        self._tuned &= live


def optimize_constants(e: Expr, data: TrainingSet, budget: int = 100, linear_scaling: bool = False) -> Expr:
    """
    Coordinate descent over the Const values of e.

    Each constant starts with step 0.1*|c| + 0.1 (a tenth of |c|, plus 0.1).
    Visiting a constant tries +step then -step; a success keeps doubling
    the step along that direction, a failure in both directions halves it.
    The total budget is `budget` evaluations per constant. The result never
    has a larger mse than e. With linear_scaling the objective is the
    scaled mse, so only the shape of e is tuned.
    """
    values = constants(e)
    if not values or budget <= 0:
        return e
    objective = (lambda x: scaled_fitness(x, data)[0]) if linear_scaling \
        else (lambda x: evaluate_fitness(x, data))
    best_mse = objective(e)
    if not math.isfinite(best_mse):
        return e

    values = list(values)
    steps = [0.1 * abs(c) + 0.1 for c in values]
    remaining = budget * len(values)

    def trial(i: int, value: float) -> float:
        nonlocal remaining
        remaining -= 1
        if not math.isfinite(value):
            return REJECTED
        candidate = list(values)
        candidate[i] = value
        return objective(with_constants(e, candidate))

    while remaining > 0:
        moved = False
        for i in range(len(values)):
            if remaining <= 0:
                break
            improved = False
            for direction in (1.0, -1.0):
                if remaining <= 0:
                    break
                mse = trial(i, values[i] + direction * steps[i])
                if mse < best_mse:
                    best_mse = mse
                    values[i] += direction * steps[i]
                    improved = True
                    while remaining > 0:
                        steps[i] = min(steps[i] * 2.0, 1e6)
                        mse = trial(i, values[i] + direction * steps[i])
                        if mse >= best_mse:
                            steps[i] *= 0.5
                            break
                        best_mse = mse
                        values[i] += direction * steps[i]
                    break
            if improved:
                moved = True
            else:
                steps[i] *= 0.5
        if not moved and all(s <= 1e-15 * (abs(v) + 1.0) for s, v in zip(steps, values)):
            break
    return with_constants(e, values)


# ---- search ---- #

def run_search(data: TrainingSet, cfg: SrConfig = SrConfig()) -> ParetoFront:
    """
    Run the generational GP loop and return the final Pareto archive.

    Args:
        data: training pairs (t, y)
        cfg: search configuration; the seed fixes the whole run

    Returns:
        ParetoFront: nondominated (mse, complexity) models, simplified
    """
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        return _run(data, cfg, pool)
    finally:
        if pool is not None:
            pool.shutdown()


def _run(data: TrainingSet, cfg: SrConfig, pool: Optional[ProcessPoolExecutor]) -> ParetoFront:
    archive = _Archive(data)
    linear = cfg.scales
    population = init_population(cfg, _stream(cfg.seed, (0,)))
    scored = _evaluate_population(population, data, pool, cfg.workers, linear)
    for e, (mse, scale) in zip(population, scored):
        archive.offer(e, mse, scale)

    for g in range(1, cfg.generations + 1):
        fitness = [mse for mse, _ in scored]
        elites = sorted(archive.front.entries, key=lambda en: (en.mse, en.complexity))
        children: List[Expr] = [archive.shape_of(en.expr) for en in elites[:cfg.elite_count]]
        for i in range(len(children), cfg.population_size):
            rng = _stream(cfg.seed, (g, i))
            child = population[_tournament(fitness, cfg.tournament_size, rng)]
            if rng.random() < cfg.crossover_prob:
                mate = population[_tournament(fitness, cfg.tournament_size, rng)]
                child, _ = crossover(child, mate, rng, cfg.max_depth)
            if rng.random() < cfg.mutation_prob:
                child = mutate(child, cfg, rng)
            children.append(child)

        population = children
        scored = _evaluate_population(population, data, pool, cfg.workers, linear)
        for e, (mse, scale) in zip(population, scored):
            archive.offer(e, mse, scale)

        every = cfg.constant_tune_every
        if cfg.constant_tune_budget > 0 and ((every and g % every == 0) or g == cfg.generations):
            archive.tune(cfg.constant_tune_budget)

        if logger.isEnabledFor(logging.DEBUG) and archive.front.entries:
            best = archive.front.best()
            logger.debug("gen %d: front=%d best mse=%.6g cx=%d",
                         g, len(archive.front), best.mse, best.complexity)

    if not archive.front.entries:
        raise EmptyFront("every candidate was rejected; no finite model found")
    logger.info("Search finished: %d front entries, best mse %.6g",
                len(archive.front), archive.front.best().mse)
    return archive.front


def select_model(
    front: ParetoFront,
    data: TrainingSet,
    criterion: SelectionCriterion = SelectionCriterion(),
) -> FitReport:
    """
    Simplest entry reaching criterion.min_r2 on the data, else the best R^2.
    """
    if not front.entries:
        raise EmptyFront("cannot select from an empty front")
    scored = []
    for entry in front.entries:
        predicted = evaluate_many(entry.expr, data.t)
        scored.append((entry, compute_metrics(data.y, predicted)))

    passing = [(en, m) for en, m in scored if m.r2 >= criterion.min_r2]
    if passing:
        entry, fit = min(passing, key=lambda item: (item[0].complexity, item[0].mse))
    else:
        entry, fit = max(scored, key=lambda item: (item[1].r2, -item[0].complexity))
    return FitReport(expr=entry.expr, metrics=fit, complexity=entry.complexity)
