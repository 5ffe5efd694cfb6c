"""Bounded continuous maximizers: artificial bee colony and a grid oracle.

The bee colony follows the classical three-phase scheme (employed,
onlooker, scout) over a fixed box.  A run is fully determined by its
seed: the generator is Python's Mersenne Twister (``random.Random``)
and the draw order is fixed by the loop structure below, so identical
inputs give bitwise-identical results.

The grid maximizer is an independent brute-force oracle used to
validate the colony on one-dimensional problems.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "SearchSpace",
    "AbcConfig",
    "FoodSource",
    "OptimizationResult",
    "abc_maximize",
    "grid_maximize",
]


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box: per-dimension lower and upper bounds."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("lower and upper must be equal-length, non-empty")
        if any(lo >= up for lo, up in zip(self.lower, self.upper)):
            raise ValueError(f"need lower < upper per dimension: {self}")

    @property
    def dims(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class AbcConfig:
    """Colony size, evaluation budget, scout trigger, and PRNG seed."""

    food_count: int = 10
    max_evaluations: int = 4000
    limit: Optional[int] = None  # default food_count * dims
    seed: int = 0

    def __post_init__(self):
        if self.food_count < 2:
            raise ValueError("food_count must be >= 2")
        if self.max_evaluations < self.food_count:
            raise ValueError("max_evaluations must be >= food_count")
        if self.limit is not None and self.limit < 1:
            raise ValueError("limit must be >= 1")

    def effective_limit(self, dims: int) -> int:
        return self.limit if self.limit is not None else self.food_count * dims


@dataclass
class FoodSource:
    """One candidate solution with its objective value and stall counter."""

    position: list
    objective: float
    trials: int = 0


@dataclass(frozen=True)
class OptimizationResult:
    best_position: tuple
    best_objective: float
    evaluations_used: int
    trace: tuple  # best-so-far objective after each cycle


def _clamp(v: float, lo: float, up: float) -> float:
    return lo if v < lo else up if v > up else v


def abc_maximize(
    objective: Callable[[Sequence[float]], float],
    space: SearchSpace,
    config: AbcConfig,
) -> OptimizationResult:
    """Maximize ``objective`` over the box with an artificial bee colony.

    Cycle structure: an employed pass over all sources, an onlooker pass
    of the same size with roulette selection proportional to a shifted
    copy of the objective values, then at most one scout
    re-initialization of the most-stalled source.  Neighborhood moves
    perturb one random coordinate toward a random partner and clamp to
    the bounds; replacement is greedy.  The run stops once the number of
    objective evaluations reaches the budget and returns the best point
    ever evaluated.
    """
    rng = random.Random(config.seed)
    dims = space.dims
    limit = config.effective_limit(dims)
    evals = 0

    def call(position):
        nonlocal evals
        value = float(objective(position))
        evals += 1
        if not math.isfinite(value):
            raise ValueError(
                f"objective returned non-finite value {value!r} at {tuple(position)}"
            )
        return value

    def random_position():
        return [
            lo + rng.random() * (up - lo)
            for lo, up in zip(space.lower, space.upper)
        ]

    sources = []
    best_pos = None
    best_val = -math.inf
    for _ in range(config.food_count):
        pos = random_position()
        val = call(pos)
        sources.append(FoodSource(position=pos, objective=val))
        if val > best_val:
            best_pos, best_val = list(pos), val

    def neighbor_move(i: int) -> bool:
        """Try one neighborhood move on source i; returns False when out of budget."""
        nonlocal best_pos, best_val
        if evals >= config.max_evaluations:
            return False
        m = rng.randrange(config.food_count - 1)
        if m >= i:
            m += 1
        j = rng.randrange(dims)
        phi = rng.uniform(-1.0, 1.0)
        src = sources[i]
        cand = list(src.position)
        cand[j] = _clamp(
            cand[j] + phi * (cand[j] - sources[m].position[j]),
            space.lower[j],
            space.upper[j],
        )
        val = call(cand)
        if val > best_val:
            best_pos, best_val = list(cand), val
        if val > src.objective:
            src.position = cand
            src.objective = val
            src.trials = 0
        else:
            # cap keeps the counter meaningful with one scout per cycle
            src.trials = min(src.trials + 1, limit + 1)
        return True

    trace = [best_val]  # initialization counts as cycle zero
    while evals < config.max_evaluations:
        for i in range(config.food_count):
            if not neighbor_move(i):
                break

        if evals < config.max_evaluations:
            values = [s.objective for s in sources]
            shift = min(values)
            fits = [v - shift for v in values] if shift < 0 else list(values)
            total = sum(fits)
            for _ in range(config.food_count):
                if total > 0:
                    u = rng.random() * total
                    acc = 0.0
                    i = config.food_count - 1
                    for idx, f in enumerate(fits):
                        acc += f
                        if u <= acc:
                            i = idx
                            break
                else:
                    i = rng.randrange(config.food_count)
                if not neighbor_move(i):
                    break

        if evals < config.max_evaluations:
            stalled = max(range(config.food_count), key=lambda i: sources[i].trials)
            if sources[stalled].trials > limit:
                pos = random_position()
                val = call(pos)
                sources[stalled] = FoodSource(position=pos, objective=val)
                if val > best_val:
                    best_pos, best_val = list(pos), val

        trace.append(best_val)

    return OptimizationResult(
        best_position=tuple(best_pos),
        best_objective=best_val,
        evaluations_used=evals,
        trace=tuple(trace),
    )


def grid_maximize(
    objective: Callable,
    space: SearchSpace,
    resolution: int,
    refine: bool = False,
    batch: bool = False,
) -> OptimizationResult:
    """Brute-force 1-D maximizer on a uniform grid including both endpoints.

    With ``refine`` a second pass scans one grid cell on each side of
    the incumbent at 100x density.  With ``batch`` the objective is
    called once with an ndarray of points instead of point by point.
    """
    if space.dims != 1:
        raise ValueError("grid_maximize is one-dimensional only")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    lo, up = space.lower[0], space.upper[0]

    def sweep(xs):
        if batch:
            vals = np.asarray(objective(xs), dtype=float)
        else:
            vals = np.array([float(objective([x])) for x in xs])
        if not np.all(np.isfinite(vals)):
            bad = xs[~np.isfinite(vals)][0]
            raise ValueError(f"objective returned non-finite value at {bad}")
        i = int(np.argmax(vals))
        return float(xs[i]), float(vals[i])

    xs = np.linspace(lo, up, resolution)
    best_x, best_v = sweep(xs)
    evals = resolution
    if refine:
        h = (up - lo) / (resolution - 1)
        fine = np.linspace(max(lo, best_x - h), min(up, best_x + h), 201)
        x2, v2 = sweep(fine)
        evals += len(fine)
        if v2 > best_v:
            best_x, best_v = x2, v2
    return OptimizationResult(
        best_position=(best_x,),
        best_objective=best_v,
        evaluations_used=evals,
        trace=(best_v,),
    )
