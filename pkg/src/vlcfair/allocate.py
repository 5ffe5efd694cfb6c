"""Two-user power allocation: the fitted-curve allocator and its baselines.

The fitted-curve method works in two stages.  Offline, every channel of
the enumerated set is paired with a fixed reference gain, the
fairness-optimal strong-user power is found for each pair, and a
two-term exponential is fitted to the resulting (gain ratio, power)
points.  Online, the fitted curve evaluated at r = h2/h1 and scaled by

    mu = (h_ref / h_new) * sqrt(p_new / p_ref)

gives the strong user's power directly, with no further optimization.

Baselines: gain-ratio allocation (p_strong = P r^2 / (1 + r^2)),
normalized-gain-difference allocation (p_strong/p_weak = 1 - r), and
orthogonal access (full power over a 1/K time share).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelSet
from .expfit import ExpFitCoefficients, eval_two_term_exp
from .optimize import AbcConfig, SearchSpace, abc_maximize
from .rates import AllocationVector

__all__ = [
    "MuMode",
    "EfopaModel",
    "TwoUserInstance",
    "fairness_objective",
    "fairness_profile",
    "optimize_fair_two_user",
    "build_efopa_dataset",
    "efopa_allocate",
    "grpa_allocate",
    "ngdpa_allocate",
    "oma_allocate",
    "channel_stream_seed",
]

_LOG2 = math.log(2.0)
_PI_E = math.pi * math.e


class MuMode(Enum):
    """How the fitted curve is rescaled to a new channel and power budget."""

    EQ22 = "eq22"  # mu = (h_ref/h1) * sqrt(p_new/p_ref)
    PAPER_EXAMPLE = "paper-example"  # no rescaling; curve value used directly


@dataclass(frozen=True)
class EfopaModel:
    """Fitted allocation curve plus the reference point it was derived at."""

    coefficients: ExpFitCoefficients
    h_ref: float
    p_ref: float
    h0: float
    mu_mode: MuMode = MuMode.EQ22
    clamp_floor: float = 0.0

    def __post_init__(self):
        if not self.h_ref > 0:
            raise ValueError(f"h_ref must be > 0, got {self.h_ref}")
        if not self.p_ref > 0:
            raise ValueError(f"p_ref must be > 0, got {self.p_ref}")
        if not self.h0 > 0:
            raise ValueError(f"h0 must be > 0, got {self.h0}")
        if self.clamp_floor < 0:
            raise ValueError(f"clamp_floor must be >= 0, got {self.clamp_floor}")

    def mu(self, h1: float, p_new: float) -> float:
        """Rescaling factor for a new strong-user gain and power budget."""
        return (self.h_ref / h1) * math.sqrt(p_new / self.p_ref)


@dataclass(frozen=True)
class TwoUserInstance:
    """One two-user link pair: ordered gains, power budget, bandwidth, noise."""

    h_strong: float
    h_weak: float
    p_max: float
    bandwidth: float
    noise_variance: float

    def __post_init__(self):
        if not 0 < self.h_weak <= self.h_strong:
            raise ValueError(
                f"need 0 < h_weak <= h_strong, got {self.h_weak}, {self.h_strong}"
            )
        if not self.p_max > 0:
            raise ValueError(f"p_max must be > 0, got {self.p_max}")
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.noise_variance > 0:
            raise ValueError(
                f"noise_variance must be > 0, got {self.noise_variance}"
            )

    @property
    def ratio(self) -> float:
        return self.h_weak / self.h_strong


def fairness_objective(p1: float, inst: TwoUserInstance) -> float:
    """Jain index of the two capacity lower bounds at split (p1, p_max - p1).

    The strong user decodes interference-free; the weak user sees
    residual interference h_weak^2 * p1.  Both rates use the capacity
    lower bound B/2 * log2(1 + 2 h^2 p / (pi e (I + s2))).  Monopoly
    splits (either rate zero) give 1/2.

    Kept in scalar math: this is the hot path of the offline stage.
    """
    if not 0.0 <= p1 <= inst.p_max:
        raise ValueError(f"p1 must lie in [0, p_max], got {p1}")
    p2 = inst.p_max - p1
    s2 = inst.noise_variance
    h1sq = inst.h_strong * inst.h_strong
    h2sq = inst.h_weak * inst.h_weak
    half_b = inst.bandwidth / 2.0
    r1 = half_b * math.log1p(2.0 * h1sq * p1 / (_PI_E * s2)) / _LOG2
    r2 = (
        half_b
        * math.log1p(2.0 * h2sq * p2 / (_PI_E * (h2sq * p1 + s2)))
        / _LOG2
    )
    q = r1 * r1 + r2 * r2
    if q == 0.0:
        return 0.0
    s = r1 + r2
    return s * s / (2.0 * q)


def fairness_profile(p1_values: np.ndarray, inst: TwoUserInstance) -> np.ndarray:
    """Vectorized fairness_objective over an array of p1 splits."""
    p1 = np.asarray(p1_values, dtype=float)
    p2 = inst.p_max - p1
    s2 = inst.noise_variance
    h1sq = inst.h_strong * inst.h_strong
    h2sq = inst.h_weak * inst.h_weak
    half_b = inst.bandwidth / 2.0
    r1 = half_b * np.log1p(2.0 * h1sq * p1 / (_PI_E * s2)) / _LOG2
    r2 = half_b * np.log1p(2.0 * h2sq * p2 / (_PI_E * (h2sq * p1 + s2))) / _LOG2
    q = r1 * r1 + r2 * r2
    s = r1 + r2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(q > 0.0, s * s / (2.0 * q), 0.0)
    return out


def optimize_fair_two_user(inst: TwoUserInstance, abc: AbcConfig) -> float:
    """Fairness-maximal strong-user power over p1 in [0, p_max/2]."""
    space = SearchSpace(lower=(0.0,), upper=(inst.p_max / 2.0,))
    result = abc_maximize(lambda pos: fairness_objective(pos[0], inst), space, abc)
    return float(result.best_position[0])


def channel_stream_seed(master_seed: int, channel_index: int) -> int:
    """Per-channel PRNG stream seed: stable, order-independent."""
    return (master_seed << 32) ^ channel_index


def build_efopa_dataset(
    h1: float,
    channels: ChannelSet,
    p_max: float,
    abc: AbcConfig,
    noise_variance: float,
    bandwidth: float,
    above_ref: str = "skip",
    subsample: int = 1,
) -> list:
    """Per-channel fairness optimization: one (r, p1) point per unique gain.

    Each channel of the set is paired with the reference gain ``h1``.
    Channels above the reference either swap roles with it
    (``above_ref='swap'``, keeping r = weaker/stronger <= 1) or are left
    out (``'skip'``, the default for curve derivation: swapped pairs
    have a different strong-user gain, so their optima do not lie on
    the reference curve).  ``subsample`` keeps every n-th channel.

    Runs are seeded per channel from the master seed and the channel's
    index in the full set, so results do not depend on iteration order
    or subsampling.  Points are returned sorted ascending in r.
    """
    if not h1 > 0:
        raise ValueError(f"h1 must be > 0, got {h1}")
    if above_ref not in ("skip", "swap"):
        raise ValueError(f"above_ref must be 'skip' or 'swap', got {above_ref!r}")
    if subsample < 1:
        raise ValueError(f"subsample must be >= 1, got {subsample}")
    points = []
    for index, gain in enumerate(channels.gains):
        if index % subsample:
            continue
        if gain > h1:
            if above_ref == "skip":
                continue
            strong, weak = gain, h1
        else:
            strong, weak = h1, gain
        inst = TwoUserInstance(
            h_strong=strong,
            h_weak=weak,
            p_max=p_max,
            bandwidth=bandwidth,
            noise_variance=noise_variance,
        )
        cfg = AbcConfig(
            food_count=abc.food_count,
            max_evaluations=abc.max_evaluations,
            limit=abc.limit,
            seed=channel_stream_seed(abc.seed, index),
        )
        points.append((inst.ratio, optimize_fair_two_user(inst, cfg)))
    points.sort(key=lambda p: (p[0], p[1]))
    return points


def _two_user_allocation(p_strong: float, p_max: float) -> AllocationVector:
    return AllocationVector(powers=(p_strong, p_max - p_strong), total=p_max)


def _check_pair(h1: float, h2: float):
    if not 0 < h2 <= h1:
        raise ValueError(f"need 0 < h2 <= h1, got h1={h1}, h2={h2}")


def efopa_allocate(
    model: EfopaModel, h1: float, h2: float, p_new: float
) -> AllocationVector:
    """Strong-user power from the fitted curve, rescaled and clamped.

    r = h2/h1 is evaluated through the curve; in EQ22 mode the value is
    multiplied by mu = (h_ref/h1) sqrt(p_new/p_ref), in paper-example
    mode it is used as-is.  The result is clamped to
    [clamp_floor, p_new/2] (the curve is negative for very small r).
    """
    _check_pair(h1, h2)
    if not p_new > 0:
        raise ValueError(f"p_new must be > 0, got {p_new}")
    raw = eval_two_term_exp(model.coefficients, h2 / h1)
    if model.mu_mode is MuMode.EQ22:
        p1 = model.mu(h1, p_new) * raw
    else:
        p1 = raw
    p1 = min(max(p1, model.clamp_floor), p_new / 2.0)
    return _two_user_allocation(p1, p_new)


def grpa_allocate(h1: float, h2: float, p_max: float) -> AllocationVector:
    """Gain-ratio split: consecutive powers scale with (h1/h_k)^k.

    For two users the weak user gets p_strong / r^2, normalized to the
    budget: p_strong = p_max r^2 / (1 + r^2).
    """
    _check_pair(h1, h2)
    r = h2 / h1
    return _two_user_allocation(p_max * r * r / (1.0 + r * r), p_max)


def ngdpa_allocate(h1: float, h2: float, p_max: float) -> AllocationVector:
    """Normalized-gain-difference split: p_strong/p_weak = (h1 - h2)/h1.

    For two users p_strong = p_max (1 - r) / (2 - r).
    """
    _check_pair(h1, h2)
    r = h2 / h1
    return _two_user_allocation(p_max * (1.0 - r) / (2.0 - r), p_max)


def oma_allocate(p_max: float, user_count: int) -> tuple:
    """Orthogonal access: each user transmits at full power in its slot.

    Returns the per-slot transmit power of every user; the 1/K time
    share lives in the orthogonal rate expression, not here.
    """
    if not p_max > 0:
        raise ValueError(f"p_max must be > 0, got {p_max}")
    if user_count < 1:
        raise ValueError(f"user_count must be >= 1, got {user_count}")
    return (p_max,) * user_count
