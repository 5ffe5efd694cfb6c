"""Lambertian line-of-sight channel model for indoor optical wireless links.

The gain between an LED transmitter and a photo-detector is

    h = A * R(phi) / d^2 * T_s * g(psi) * cos(psi),   0 <= psi <= FoV

where ``A`` is the detector area, ``d`` the link distance, ``phi`` the
irradiance angle at the emitter, ``psi`` the incidence angle at the
detector, ``T_s`` the optical filter gain, and

    R(phi) = (k_l + 1) / (2*pi) * cos(phi)**k_l     (radiant intensity)
    g(psi) = n^2 / sin^2(FoV)                       (concentrator gain)
    k_l    = -ln(2) / ln(cos(semi_angle))           (Lambertian order)

Beyond the field of view the concentrator gain is zero, so h = 0.

All angles are radians internally; configuration files use degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VlcParams",
    "LinkGeometry",
    "Position",
    "ChannelGrid",
    "ChannelSet",
    "lambertian_order",
    "concentrator_gain",
    "radiant_intensity",
    "channel_gain",
    "geometry_from_positions",
    "enumerate_channels",
]

# Uniqueness is decided on a fixed quantization grid of the gain axis:
# two gains are the same channel when they round to the same multiple of
# the resolution.  The default reproduces the reference enumeration
# statistics for the standard office grid (see README).
DEFAULT_DEDUP_RESOLUTION = 1.5e-9


@dataclass(frozen=True)
class VlcParams:
    """Optical front-end constants of one emitter/detector pair.

    pd_area          detector area in m^2
    refractive_index concentrator refractive index (>= 1)
    filter_gain      optical filter gain T_s
    fov              detector field-of-view half-angle, radians
    semi_angle       LED half-power semi-angle, radians
    """

    pd_area: float
    refractive_index: float
    filter_gain: float
    fov: float
    semi_angle: float

    def __post_init__(self):
        if not self.pd_area > 0:
            raise ValueError(f"pd_area must be > 0, got {self.pd_area}")
        if not self.refractive_index >= 1:
            raise ValueError(
                f"refractive_index must be >= 1, got {self.refractive_index}"
            )
        if not self.filter_gain > 0:
            raise ValueError(f"filter_gain must be > 0, got {self.filter_gain}")
        if not 0 < self.fov <= math.pi / 2:
            raise ValueError(f"fov must lie in (0, pi/2], got {self.fov}")
        if not 0 < self.semi_angle < math.pi / 2:
            raise ValueError(
                f"semi_angle must lie in (0, pi/2), got {self.semi_angle}"
            )

    @property
    def lambertian_order(self) -> float:
        """Emission order implied by the semi-angle (recomputed, not stored)."""
        return lambertian_order(self.semi_angle)


@dataclass(frozen=True)
class LinkGeometry:
    """One transmitter/receiver placement: distance and the two link angles."""

    distance: float
    irradiance_angle: float
    incidence_angle: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        for name in ("irradiance_angle", "incidence_angle"):
            a = getattr(self, name)
            if not 0 <= a <= math.pi / 2:
                raise ValueError(f"{name} must lie in [0, pi/2], got {a}")


@dataclass(frozen=True)
class Position:
    """Cartesian point in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"position components must be finite: {self}")


@dataclass(frozen=True)
class ChannelGrid:
    """Enumeration grid: distances plus one shared angle axis for phi and psi.

    dedup_resolution is the absolute gain quantization step used for
    uniqueness (0 means exact floating-point uniqueness).
    """

    distances: tuple
    angles: tuple
    dedup_resolution: float = DEFAULT_DEDUP_RESOLUTION

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.distances or not self.angles:
            raise ValueError("grid needs at least one distance and one angle")
        if any(d <= 0 for d in self.distances):
            raise ValueError("all grid distances must be > 0")
        if any(not 0 < a <= math.pi / 2 for a in self.angles):
            raise ValueError("all grid angles must lie in (0, pi/2]")
        if self.dedup_resolution < 0:
            raise ValueError("dedup_resolution must be >= 0")

    @property
    def combo_count(self) -> int:
        return len(self.distances) * len(self.angles) ** 2


@dataclass(frozen=True)
class ChannelSet:
    """Deduplicated gains of an enumeration, ascending, with their mean."""

    gains: tuple
    combo_count: int
    mean_gain: float
    dedup_resolution: float = 0.0

    def __post_init__(self):
        if any(g <= 0 for g in self.gains):
            raise ValueError("channel gains must be > 0")
        if any(b <= a for a, b in zip(self.gains, self.gains[1:])):
            raise ValueError("channel gains must be strictly ascending")

    def __len__(self) -> int:
        return len(self.gains)


def lambertian_order(semi_angle: float) -> float:
    """Order of Lambertian emission, -ln(2)/ln(cos(semi_angle)).

    Equals 1 for a 60 degree half-power semi-angle and grows without
    bound as the semi-angle approaches 90 degrees.
    """
    if not 0 < semi_angle < math.pi / 2:
        raise ValueError(
            f"semi_angle must lie strictly inside (0, pi/2), got {semi_angle}"
        )
    return -math.log(2.0) / math.log(math.cos(semi_angle))


def concentrator_gain(incidence_angle: float, params: VlcParams) -> float:
    """Optical concentrator gain: n^2/sin^2(FoV) inside the FoV, else 0."""
    if incidence_angle < 0:
        raise ValueError(f"incidence_angle must be >= 0, got {incidence_angle}")
    if incidence_angle > params.fov:
        return 0.0
    return params.refractive_index**2 / math.sin(params.fov) ** 2


def radiant_intensity(irradiance_angle: float, k_l: float) -> float:
    """Lambertian radiant intensity (k_l+1)/(2*pi) * cos(angle)**k_l."""
    if not 0 <= irradiance_angle <= math.pi / 2:
        raise ValueError(
            f"irradiance_angle must lie in [0, pi/2], got {irradiance_angle}"
        )
    if not k_l > 0:
        raise ValueError(f"k_l must be > 0, got {k_l}")
    return (k_l + 1.0) / (2.0 * math.pi) * math.cos(irradiance_angle) ** k_l


def channel_gain(geom: LinkGeometry, params: VlcParams) -> float:
    """Line-of-sight gain for one geometry; zero outside the field of view."""
    if geom.incidence_angle > params.fov:
        return 0.0
    k_l = params.lambertian_order
    return (
        params.pd_area
        * radiant_intensity(geom.irradiance_angle, k_l)
        / geom.distance**2
        * params.filter_gain
        * concentrator_gain(geom.incidence_angle, params)
        * math.cos(geom.incidence_angle)
    )


def geometry_from_positions(tx: Position, rx: Position) -> LinkGeometry:
    """Link geometry for a ceiling emitter facing down and a receiver facing up.

    Both normals are vertical, so the irradiance and incidence angles
    coincide: arccos((tx.z - rx.z) / distance).
    """
    dx, dy, dz = tx.x - rx.x, tx.y - rx.y, tx.z - rx.z
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    if d == 0.0:
        raise ValueError("transmitter and receiver coincide")
    if dz <= 0:
        raise ValueError("transmitter must be above the receiver")
    angle = math.acos(min(1.0, dz / d))
    return LinkGeometry(distance=d, irradiance_angle=angle, incidence_angle=angle)


def enumerate_channels(grid: ChannelGrid, params: VlcParams) -> ChannelSet:
    """Evaluate the gain on every (d, phi, psi) triple and deduplicate.

    Every angle pair is applied to every distance; zero gains (outside
    the field of view) are excluded from the unique set.  Uniqueness is
    decided by quantizing the gain axis at ``grid.dedup_resolution``;
    the smallest member of each occupied bin is kept, so the returned
    values are true gains of the model, strictly ascending.  The mean
    is taken over the deduplicated set.
    """
    if any(a > params.fov for a in grid.angles):
        raise ValueError("grid angles must not exceed the receiver FoV")
    gains = []
    for d in grid.distances:
        for phi in grid.angles:
            for psi in grid.angles:
                h = channel_gain(
                    LinkGeometry(distance=d, irradiance_angle=phi, incidence_angle=psi),
                    params,
                )
                if h > 0.0:
                    gains.append(h)
    values = np.sort(np.asarray(gains, dtype=float))
    if grid.dedup_resolution > 0.0:
        keys = np.round(values / grid.dedup_resolution).astype(np.int64)
        keep = np.ones(len(values), dtype=bool)
        keep[1:] = keys[1:] != keys[:-1]
        values = values[keep]
    else:
        values = np.unique(values)
    return ChannelSet(
        gains=tuple(float(v) for v in values),
        combo_count=grid.combo_count,
        mean_gain=float(values.mean()),
        dedup_resolution=grid.dedup_resolution,
    )
