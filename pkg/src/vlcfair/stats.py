"""Vectorized sweeps and pairwise comparisons over many channel pairs.

These are the batch engines behind the CLI: one row per (ratio, method)
for sweeps, win percentages over all ordered gain pairs for the
pairwise statistics, and the fixed-receiver walk scenario.  The rate
expressions mirror rates.rate_noma / rates.rate_oma in ndarray form
(the scalar module stays the contract; tests pin the two paths to each
other).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .allocate import EfopaModel, MuMode, efopa_allocate
from .channel import Position, VlcParams, channel_gain, geometry_from_positions
from .expfit import eval_two_term_exp

__all__ = [
    "SweepSpec",
    "METHODS",
    "RATE_MODELS",
    "split_for_method",
    "noma_rates_vec",
    "oma_rates_vec",
    "jain_vec",
    "sweep_rows",
    "pair_statistics",
    "walk_rows",
]

METHODS = ("efopa", "grpa", "ngdpa", "oma")
RATE_MODELS = ("lower-bound", "shannon", "paper-repro")


@dataclass(frozen=True)
class SweepSpec:
    """Ratio axis and methods of one sweep."""

    r_min: float = 0.01
    r_max: float = 1.0
    r_step: float = 0.01
    h1: float = 0.0  # resolved strong-user gain, absolute
    methods: tuple = METHODS

    def __post_init__(self):
        if not 0 < self.r_min <= self.r_max <= 1.0:
            raise ValueError(f"need 0 < r_min <= r_max <= 1, got {self}")
        if not self.r_step > 0:
            raise ValueError(f"r_step must be > 0, got {self.r_step}")
        if not self.h1 > 0:
            raise ValueError(f"h1 must be resolved to a gain > 0, got {self.h1}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")

    def ratios(self) -> np.ndarray:
        count = int(math.floor((self.r_max - self.r_min) / self.r_step + 1e-9)) + 1
        return self.r_min + self.r_step * np.arange(count)


def split_for_method(
    method: str,
    model: Optional[EfopaModel],
    h1: np.ndarray,
    r: np.ndarray,
    p_max: float,
) -> np.ndarray:
    """Strong-user power of one allocation method, vectorized over pairs."""
    if method == "efopa":
        if model is None:
            raise ValueError("efopa requires a model")
        raw = eval_two_term_exp(model.coefficients, r)
        if model.mu_mode is MuMode.EQ22:
            raw = (model.h_ref / h1) * math.sqrt(p_max / model.p_ref) * raw
        return np.clip(raw, model.clamp_floor, p_max / 2.0)
    if method == "grpa":
        return p_max * r * r / (1.0 + r * r)
    if method == "ngdpa":
        return p_max * (1.0 - r) / (2.0 - r)
    if method == "oma":
        raise ValueError("orthogonal access has no power split")
    raise ValueError(f"unknown method {method!r}")


def noma_rates_vec(
    h1: np.ndarray,
    h2: np.ndarray,
    p1: np.ndarray,
    p2: np.ndarray,
    bandwidth: float,
    noise_variance: float,
    rate_model: str,
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-user rates of the superposed downlink, ndarray form.

    The strong user decodes interference-free; the weak user sees
    h2^2*p1.  'paper-repro' drops the noise term from the weak user's
    denominator (infinite where the interference is also zero).
    """
    h1sq, h2sq = h1 * h1, h2 * h2
    s2 = noise_variance
    if rate_model == "lower-bound":
        pe = math.pi * math.e
        r1 = bandwidth / 2.0 * np.log2(1.0 + 2.0 * h1sq * p1 / (pe * s2))
        r2 = bandwidth / 2.0 * np.log2(
            1.0 + 2.0 * h2sq * p2 / (pe * (h2sq * p1 + s2))
        )
        return r1, r2
    if rate_model == "shannon":
        r1 = bandwidth * np.log2(1.0 + h1sq * p1 / s2)
        r2 = bandwidth * np.log2(1.0 + h2sq * p2 / (h2sq * p1 + s2))
        return r1, r2
    if rate_model == "paper-repro":
        r1 = bandwidth * np.log2(1.0 + h1sq * p1 / s2)
        interference = h2sq * p1
        with np.errstate(divide="ignore"):
            r2 = np.where(
                interference > 0.0,
                bandwidth * np.log2(1.0 + h2sq * p2 / np.where(
                    interference > 0.0, interference, 1.0
                )),
                np.where(p2 > 0.0, np.inf, 0.0),
            )
        return r1, r2
    raise ValueError(f"unknown rate model {rate_model!r}")


def oma_rates_vec(
    h1: np.ndarray,
    h2: np.ndarray,
    p_max: float,
    bandwidth: float,
    noise_variance: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Two-user orthogonal-access rates: full power over half the time."""
    r1 = bandwidth / 2.0 * np.log2(1.0 + h1 * h1 * p_max / noise_variance)
    r2 = bandwidth / 2.0 * np.log2(1.0 + h2 * h2 * p_max / noise_variance)
    return r1, r2


def jain_vec(r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """Two-user fairness index; infinite rates handled by their limit."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    inf1, inf2 = np.isinf(r1), np.isinf(r2)
    s = r1 + r2
    q = r1 * r1 + r2 * r2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(q > 0.0, s * s / (2.0 * q), 0.0)
    out = np.where(inf1 & inf2, 1.0, out)
    out = np.where(inf1 ^ inf2, 0.5, out)
    return out


def _method_rates(
    method: str,
    model: Optional[EfopaModel],
    h1: np.ndarray,
    h2: np.ndarray,
    p_max: float,
    bandwidth: float,
    noise_variance: float,
    rate_model: str,
):
    """(p1, p2, rate1, rate2) for one method over pair arrays."""
    if method == "oma":
        r1, r2 = oma_rates_vec(h1, h2, p_max, bandwidth, noise_variance)
        full = np.full_like(h1, p_max)
        return full, full, r1, r2
    p1 = split_for_method(method, model, h1, h2 / h1, p_max)
    p2 = p_max - p1
    r1, r2 = noma_rates_vec(h1, h2, p1, p2, bandwidth, noise_variance, rate_model)
    return p1, p2, r1, r2


def sweep_rows(
    spec: SweepSpec,
    model: Optional[EfopaModel],
    p_max: float,
    bandwidth: float,
    noise_variance: float,
    rate_model: str,
) -> list:
    """Rows (r, method, p1, p2, rate1, rate2, sum, fairness), ascending r
    then method name."""
    ratios = spec.ratios()
    columns = {}
    for method in spec.methods:
        h1 = np.full_like(ratios, spec.h1)
        h2 = ratios * spec.h1
        p1, p2, r1, r2 = _method_rates(
            method, model, h1, h2, p_max, bandwidth, noise_variance, rate_model
        )
        columns[method] = (p1, p2, r1, r2, r1 + r2, jain_vec(r1, r2))
    rows = []
    for i, r in enumerate(ratios):
        for method in sorted(spec.methods):
            p1, p2, r1, r2, s, f = (col[i] for col in columns[method])
            rows.append((float(r), method, p1, p2, r1, r2, s, f))
    return rows


def pair_statistics(
    gains: Sequence[float],
    model: EfopaModel,
    p_max: float,
    bandwidth: float,
    noise_variance: float,
    rate_model: str = "paper-repro",
    subsample: Optional[int] = None,
    seed: int = 0,
) -> Dict:
    """Win percentages of the fitted-curve method over every baseline.

    All ordered pairs (h1, h2) with h2 <= h1 are drawn from the gain
    set; ``subsample`` optionally keeps a seeded random subset of the
    gains first.  Returns percentages of pairs where the fitted-curve
    sum rate strictly exceeds each baseline's, and the same for the
    fairness index.
    """
    gains = np.asarray(sorted(gains), dtype=float)
    if subsample is not None and subsample < len(gains):
        if subsample < 2:
            raise ValueError("subsample must keep at least 2 gains")
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(gains), size=subsample, replace=False))
        gains = gains[keep]
    n = len(gains)
    h1 = np.repeat(gains, n)
    h2 = np.tile(gains, n)
    mask = h2 <= h1
    h1, h2 = h1[mask], h2[mask]

    results = {}
    for method in METHODS:
        p1, p2, r1, r2 = _method_rates(
            method, model if method == "efopa" else None,
            h1, h2, p_max, bandwidth, noise_variance, rate_model,
        )
        results[method] = (r1 + r2, jain_vec(r1, r2))

    ref_sum, ref_fair = results["efopa"]
    report = {
        "pairs_total": int(len(h1)),
        "gains_used": int(n),
        "rate_model": rate_model,
    }
    for method in ("grpa", "ngdpa", "oma"):
        s, f = results[method]
        report[f"efopa_vs_{method}_sum_wins_pct"] = 100.0 * float(
            np.mean(ref_sum > s)
        )
        report[f"efopa_vs_{method}_sum_ties_pct"] = 100.0 * float(
            np.mean(ref_sum == s)
        )
        report[f"efopa_vs_{method}_fairness_wins_pct"] = 100.0 * float(
            np.mean(ref_fair > f)
        )
    return report


def walk_rows(
    model: EfopaModel,
    h1: float,
    tx: Position,
    points: Sequence,
    params: VlcParams,
    p_max: float,
    bandwidth: float,
    noise_variance: float,
    rate_model: str,
) -> list:
    """Fixed strong user at gain h1; one row per labeled waypoint.

    Waypoints outside the field of view yield a zero gain and a cleared
    in_fov flag instead of aborting the run.
    """
    rows = []
    for label, pos in points:
        geom = geometry_from_positions(tx, pos)
        h2 = channel_gain(geom, params)
        if h2 <= 0.0:
            rows.append((label, pos, 0.0, False, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
            continue
        hs, hw = (h1, h2) if h2 <= h1 else (h2, h1)
        alloc = efopa_allocate(model, hs, hw, p_max)
        # the scale factor is reported for every mode, applied only in EQ22
        mu = model.mu(hs, p_max)
        p1, p2 = alloc.powers
        r1, r2 = noma_rates_vec(
            np.array([hs]), np.array([hw]), np.array([p1]), np.array([p2]),
            bandwidth, noise_variance, rate_model,
        )
        fair = float(jain_vec(r1, r2)[0])
        rows.append(
            (label, pos, h2, True, hw / hs, mu, p1, p2, float(r1[0]), float(r2[0]), fair)
        )
    return rows
