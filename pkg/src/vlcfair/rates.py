"""Achievable rates and fairness for power-domain NOMA downlinks.

Users share the band and are separated in power; receivers cancel the
signals of weaker-channel users before decoding their own, so user k
(1 = strongest channel) sees residual interference only from the powers
of stronger-channel users l < k.

Three per-user rate models are supported:

    LOWER_BOUND   R_k = B/2 * log2(1 + 2 h_k^2 p_k / (pi*e*(I_k + s2)))
    SHANNON       R_k = B   * log2(1 + h_k^2 p_k / (I_k + s2))
    SHANNON_INTERFERENCE_DOMINANT
                  as SHANNON but with s2 dropped from the denominator
                  for k > 1 (identical to SHANNON for the strongest user)

with I_k = h_k^2 * sum_{l<k} p_l.  The interference-dominant model is
the convention behind the reference worked rates; with zero residual
interference its denominator vanishes and the rate is +inf (the model's
limit), which downstream fairness handles explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

__all__ = [
    "UserLink",
    "AllocationVector",
    "NoiseModel",
    "RateModel",
    "RateReport",
    "min_dc_offset",
    "superimpose",
    "rate_noma",
    "rate_oma",
    "jain_index",
    "evaluate",
    "paper_repro_models",
]

_SUM_RTOL = 1e-9


class RateModel(Enum):
    LOWER_BOUND = "lower-bound"
    SHANNON = "shannon"
    SHANNON_INTERFERENCE_DOMINANT = "shannon-interference-dominant"


@dataclass(frozen=True)
class UserLink:
    """Channel gain and transceiver bandwidth of one user."""

    gain: float
    bandwidth: float

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError(f"gain must be > 0, got {self.gain}")
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")


@dataclass(frozen=True)
class AllocationVector:
    """Per-user powers in Watts, index 0 = strongest channel, summing to total."""

    powers: tuple
    total: float

    def __post_init__(self):
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))
        if any(p < 0 for p in self.powers):
            raise ValueError(f"powers must be >= 0, got {self.powers}")
        s = sum(self.powers)
        if abs(s - self.total) > _SUM_RTOL * max(abs(self.total), 1.0):
            raise ValueError(
                f"powers sum to {s!r}, expected total {self.total!r}"
            )


@dataclass(frozen=True)
class NoiseModel:
    """Total in-band noise power (variance), Watts."""

    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")


@dataclass(frozen=True)
class RateReport:
    per_user_rates: tuple
    sum_rate: float
    fairness: float


def min_dc_offset(powers: Sequence[float]) -> float:
    """Smallest DC bias keeping the superimposed signal non-negative.

    Symbols are bipolar in [-1, 1], so the worst case is every user at
    -1: the bias must cover sum(sqrt(p_k)).
    """
    if any(p < 0 for p in powers):
        raise ValueError(f"powers must be >= 0, got {tuple(powers)}")
    return sum(math.sqrt(p) for p in powers)


def superimpose(
    symbols: Sequence[float], powers: Sequence[float], dc_offset: float
) -> float:
    """One sample of the superimposed transmit signal, sum(sqrt(p)*s) + A."""
    if len(symbols) != len(powers):
        raise ValueError("symbols and powers must have equal length")
    if any(not -1.0 <= s <= 1.0 for s in symbols):
        raise ValueError(f"symbols must lie in [-1, 1], got {tuple(symbols)}")
    required = min_dc_offset(powers)
    if dc_offset < required:
        raise ValueError(
            f"dc_offset {dc_offset} below minimum {required} for these powers"
        )
    x = sum(math.sqrt(p) * s for p, s in zip(powers, symbols)) + dc_offset
    # non-negative by construction; clip float dust at the exact worst case
    return max(0.0, x)


def _check_descending(links: Sequence[UserLink]):
    for a, b in zip(links, links[1:]):
        if not b.gain < a.gain:
            raise ValueError(
                "links must be strictly descending in gain, got "
                f"{[l.gain for l in links]}"
            )


def rate_noma(
    k: int,
    links: Sequence[UserLink],
    alloc: AllocationVector,
    noise: NoiseModel,
    model: RateModel,
) -> float:
    """Achievable rate in bits/s of user k (1 = strongest channel).

    Residual interference for user k comes from the stronger-channel
    users' powers, I_k = h_k^2 * sum_{l<k} p_l; the strongest user
    decodes interference-free.
    """
    if not 1 <= k <= len(links):
        raise ValueError(f"user index {k} outside 1..{len(links)}")
    if len(alloc.powers) != len(links):
        raise ValueError("allocation and links must have equal length")
    _check_descending(links)
    link = links[k - 1]
    p_k = alloc.powers[k - 1]
    h2 = link.gain * link.gain
    interference = h2 * sum(alloc.powers[: k - 1])

    if model is RateModel.LOWER_BOUND:
        snr = 2.0 * h2 * p_k / (math.pi * math.e * (interference + noise.variance))
        return link.bandwidth / 2.0 * math.log2(1.0 + snr)
    if model is RateModel.SHANNON:
        return link.bandwidth * math.log2(
            1.0 + h2 * p_k / (interference + noise.variance)
        )
    if model is RateModel.SHANNON_INTERFERENCE_DOMINANT:
        denom = interference if k > 1 else interference + noise.variance
        if k > 1 and denom == 0.0:
            return math.inf if p_k > 0 else 0.0
        return link.bandwidth * math.log2(1.0 + h2 * p_k / denom)
    raise ValueError(f"unknown rate model {model!r}")


def rate_oma(
    link: UserLink, power: float, user_count: int, noise: NoiseModel
) -> float:
    """Orthogonal-access rate: full power over a 1/K time share, no interference."""
    if power < 0:
        raise ValueError(f"power must be >= 0, got {power}")
    if user_count < 1:
        raise ValueError(f"user_count must be >= 1, got {user_count}")
    h2 = link.gain * link.gain
    return (
        link.bandwidth
        / user_count
        * math.log2(1.0 + h2 * power / noise.variance)
    )


def jain_index(rates: Sequence[float]) -> float:
    """Fairness (sum R)^2 / (K sum R^2): 1 when equal, 1/K at monopoly.

    Infinite rates are handled by the limit: with m infinite entries the
    index tends to m/K.
    """
    rates = tuple(rates)
    if not rates:
        raise ValueError("need at least one rate")
    if any(r < 0 for r in rates):
        raise ValueError(f"rates must be >= 0, got {rates}")
    n_inf = sum(1 for r in rates if math.isinf(r))
    if n_inf:
        return n_inf / len(rates)
    s = sum(rates)
    if s == 0.0:
        raise ValueError("all rates are zero; fairness undefined")
    q = sum(r * r for r in rates)
    return s * s / (len(rates) * q)


def paper_repro_models(user_count: int) -> tuple:
    """Per-user model preset reproducing the reference worked rates.

    Strongest user: SHANNON; all weaker users: the interference-dominant
    variant (noise dropped next to the residual interference).
    """
    return (RateModel.SHANNON,) + (RateModel.SHANNON_INTERFERENCE_DOMINANT,) * (
        user_count - 1
    )


def evaluate(
    links: Sequence[UserLink],
    alloc: AllocationVector,
    noise: NoiseModel,
    model,
) -> RateReport:
    """Per-user rates, their sum, and the fairness index in one report.

    ``model`` is a single RateModel applied to every user or a per-user
    sequence (see paper_repro_models).
    """
    if isinstance(model, RateModel):
        models = (model,) * len(links)
    else:
        models = tuple(model)
        if len(models) != len(links):
            raise ValueError("need one rate model per user")
    rates = tuple(
        rate_noma(k, links, alloc, noise, models[k - 1])
        for k in range(1, len(links) + 1)
    )
    return RateReport(
        per_user_rates=rates,
        sum_rate=sum(rates),
        fairness=jain_index(rates),
    )
