"""Serving-disk geometry for a user that moves between two time slots.

Coordinates: the user's second position is the origin and the first
position sits at (-v, 0), so the displacement points along +x.  The slot-1
serving point lies at distance r1 from (-v, 0), at angle theta in [0, pi]
from the displacement direction (folded by symmetry), hence at distance
r12 = sqrt(r1^2 + v^2 + 2 r1 v cos(theta)) from the origin.  The serving
rule empties the slot-1 exclusion disk B((-v, 0), r1) of other points, and
every question below (can the origin see a strictly closer point, where,
with what law) reduces to areas of regions B(origin, a) minus that disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .quadrature import (QuadratureSpec, expect, mapped_gauss_nodes,
                         rayleigh_serving, uniform_angle)

__all__ = [
    "OverlapCase",
    "DisplacementGeometry",
    "lens_area",
    "crescent_area",
    "crescent_area_derivative",
    "crescent_area_from_bearing",
    "classify_overlap",
    "handoff_region_area",
    "handoff_probability",
    "handoff_probability_marginal",
    "r2_conditional_cdf",
    "r2_conditional_pdf",
    "conditional_serving_nodes",
    "r2_sample_given_handoff",
    "x2_admissible_arc",
    "x2_admissible_arc_measure",
    "circle_in_disk_half_angle",
]

_TWO_PI = 2.0 * math.pi


def _clip_unit(x: float) -> float:
    return -1.0 if x < -1.0 else (1.0 if x > 1.0 else x)


def _check_radii(r_a: float, r_b: float, d: float) -> None:
    if r_a < 0 or r_b < 0 or d < 0:
        raise ValueError("radii and separation must be non-negative")


def lens_area(r_a: float, r_b: float, d: float) -> float:
    """Intersection area of two disks with radii r_a, r_b and center distance d."""
    _check_radii(r_a, r_b, d)
    if d >= r_a + r_b:
        return 0.0
    if d <= abs(r_a - r_b):
        rm = min(r_a, r_b)
        return math.pi * rm * rm
    ca = (d * d + r_a * r_a - r_b * r_b) / (2.0 * d * r_a)
    cb = (d * d + r_b * r_b - r_a * r_a) / (2.0 * d * r_b)
    s = (-d + r_a + r_b) * (d + r_a - r_b) * (d - r_a + r_b) * (d + r_a + r_b)
    tri = 0.5 * math.sqrt(max(0.0, s))
    return (r_a * r_a * math.acos(_clip_unit(ca))
            + r_b * r_b * math.acos(_clip_unit(cb)) - tri)


def crescent_area(r_a: float, r_b: float, d: float) -> float:
    """Area of B(p, r_a) minus B(q, r_b) for centers p, q at distance d.

    Piecewise: the full disk when the two are disjoint, zero when B(p, r_a)
    is swallowed, the plain ring difference when B(q, r_b) sits inside, and
    the disk minus the lens otherwise.
    """
    _check_radii(r_a, r_b, d)
    if r_a == 0.0:
        return 0.0
    if d >= r_a + r_b:
        return math.pi * r_a * r_a
    if d <= r_b - r_a:
        return 0.0
    if d <= r_a - r_b:
        return math.pi * (r_a * r_a - r_b * r_b)
    delta = d + r_a - r_b
    if (r_b > r_a and delta * (d + r_a + r_b) < 0.4 * d * r_a
            and delta * (r_a + r_b - d) < 0.4 * d * r_b):
        return _thin_cap_area(r_a, r_b, d, delta)
    gap = d + r_b - r_a
    if (r_a > r_b and gap * (d + r_a + r_b) < 0.4 * d * r_b
            and gap * (r_a + r_b - d) < 0.4 * d * r_a):
        # second disk barely protrudes: the lens route squeezes acos against
        # its endpoint, so build the area as ring plus the protruding cap
        return (math.pi * (r_a * r_a - r_b * r_b)
                + _thin_cap_area(r_b, r_a, d, gap))
    return max(0.0, math.pi * r_a * r_a - lens_area(r_a, r_b, d))


def _thin_cap_area(r_a: float, r_b: float, d: float, delta: float) -> float:
    # cap of B(p, r_a) outside B(q, r_b) just past internal tangency,
    # delta = d + r_a - r_b small; every factor below is cancellation-free
    sa = math.sqrt(delta * (d + r_a + r_b) / (4.0 * d * r_a))
    sb = math.sqrt(delta * (r_a + r_b - d) / (4.0 * d * r_b))
    tri = 0.5 * math.sqrt(delta * (r_a + r_b - d) * (d + r_b - r_a)
                          * (d + r_a + r_b))
    return max(0.0, 2.0 * r_a * r_a * math.asin(sa)
               - 2.0 * r_b * r_b * math.asin(sb) + tri)


def crescent_area_derivative(r_a: float, r_b: float, d: float) -> float:
    """Partial derivative of crescent_area in its first radius.

    Equals r_a times the angular measure of the circle of radius r_a about p
    that lies outside B(q, r_b), which is how the conditional serving-distance
    density picks it up.
    """
    _check_radii(r_a, r_b, d)
    if r_a == 0.0:
        return 0.0
    if d >= r_a + r_b:
        return _TWO_PI * r_a
    if d <= r_b - r_a:
        return 0.0
    if d <= r_a - r_b:
        return _TWO_PI * r_a
    ca = (d * d + r_a * r_a - r_b * r_b) / (2.0 * d * r_a)
    return 2.0 * r_a * (math.pi - math.acos(_clip_unit(ca)))


def crescent_area_from_bearing(r1: float, theta: float, v: float) -> float:
    """Area of B(origin, r12) minus the slot-1 exclusion disk, in closed form
    driven by the bearing theta rather than by the center distance.

    Must agree with crescent_area(r12, r1, v).  The inscribed-angle term
    needs the reflex branch of asin exactly when the slot-1 point subtends
    an obtuse angle at the origin, i.e. when r1^2 + r12^2 < v^2; the
    principal branch alone undercounts there (for instance theta = pi with
    v > r1 must give the full disk pi*(v - r1)^2, not zero).
    """
    if not r1 > 0:
        raise ValueError("r1 must be positive")
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if v < 0:
        raise ValueError("v must be non-negative")
    if v == 0.0:
        return 0.0
    st = math.sin(theta)
    ct = math.cos(theta)
    r12sq = r1 * r1 + v * v + 2.0 * r1 * v * ct
    if r12sq <= 0.0:
        return 0.0
    r12 = math.sqrt(r12sq)
    half = math.asin(_clip_unit(v * st / r12))
    if r1 * r1 + r12sq < v * v:
        half = math.pi - half
    # grouping (r12^2 - r1^2) as v*(v + 2 r1 cos theta) keeps the near-
    # concentric corner (small v, small theta) from cancelling in the large
    area = (r12sq * half + (math.pi - theta) * v * (v + 2.0 * r1 * ct)
            + r1 * v * st)
    return max(0.0, area)


class OverlapCase(Enum):
    """How the slot-2 candidate disk B(origin, r2) meets the slot-1 disk."""

    DISJOINT = "disjoint"
    ENGULFED = "engulfed"
    INTERSECTING = "intersecting"


def classify_overlap(r1: float, r2: float, v: float) -> OverlapCase:
    """Relation between B((-v, 0), r1) and B(origin, r2).

    ENGULFED means the slot-1 disk lies inside the slot-2 disk.  Tangency
    counts toward the degenerate cases on both boundaries.
    """
    if not r1 > 0 or r2 < 0 or v < 0:
        raise ValueError("need r1 > 0, r2 >= 0, v >= 0")
    if v >= r1 + r2:
        return OverlapCase.DISJOINT
    if v <= r2 - r1:
        return OverlapCase.ENGULFED
    return OverlapCase.INTERSECTING


@dataclass(frozen=True)
class DisplacementGeometry:
    """Displacement v, slot-1 bearing theta in [0, pi], serving distance r1."""

    v: float
    theta: float
    r1: float

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("v must be non-negative")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not self.r1 > 0:
            raise ValueError("r1 must be positive")

    @cached_property
    def r12(self) -> float:
        """Distance from the slot-2 position to the slot-1 serving point."""
        return math.sqrt(self.r1 * self.r1 + self.v * self.v
                         + 2.0 * self.r1 * self.v * math.cos(self.theta))

    @cached_property
    def z1(self) -> float:
        """Radius of the largest disk about the slot-2 position that fits
        inside the slot-1 exclusion disk; the conditional serving distance
        cannot fall below it."""
        return max(0.0, self.r1 - self.v)


def handoff_region_area(geom: DisplacementGeometry) -> float:
    """Area where a point would beat the slot-1 server from the new position:
    B(origin, r12) minus the slot-1 exclusion disk."""
    return crescent_area(geom.r12, geom.r1, geom.v)


def handoff_probability(geom: DisplacementGeometry, intensity: float) -> float:
    """Probability the serving point changes after the move, given geom."""
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    return -math.expm1(-intensity * handoff_region_area(geom))


def handoff_probability_marginal(v: float, intensity: float,
                                 quad: Optional[QuadratureSpec] = None) -> float:
    """Handoff probability with serving distance and bearing integrated out."""
    if v < 0:
        raise ValueError("v must be non-negative")
    if v == 0.0:
        return 0.0
    spec = quad if quad is not None else QuadratureSpec()

    def prob(r1, theta):
        return handoff_probability(DisplacementGeometry(v, theta, r1), intensity)

    return expect(prob, (rayleigh_serving(intensity), uniform_angle()), spec).value


def _conditioning_scale(geom: DisplacementGeometry, intensity: float) -> float:
    if geom.v == 0.0:
        raise ValueError("v = 0 leaves no serving change to condition on")
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    den = -math.expm1(-intensity * handoff_region_area(geom))
    if den == 0.0:
        raise ValueError("degenerate geometry: the handoff region has zero area")
    return den


def r2_conditional_cdf(r2: float, geom: DisplacementGeometry,
                       intensity: float) -> float:
    """CDF of the slot-2 serving distance given the serving point changed.

    Defined on [geom.z1, geom.r12]; requires v > 0 and a handoff region of
    positive area.
    """
    den = _conditioning_scale(geom, intensity)
    slack = 1e-9 * max(geom.r12, 1.0)
    if not (geom.z1 - slack <= r2 <= geom.r12 + slack):
        raise ValueError("r2 outside the admissible interval [z1, r12]")
    r2c = min(max(r2, geom.z1), geom.r12)
    num = -math.expm1(-intensity * crescent_area(r2c, geom.r1, geom.v))
    return min(1.0, num / den)


def r2_conditional_pdf(r2: float, geom: DisplacementGeometry,
                       intensity: float) -> float:
    """Density of the slot-2 serving distance given a serving change; zero
    outside [geom.z1, geom.r12]."""
    den = _conditioning_scale(geom, intensity)
    if r2 < geom.z1 or r2 > geom.r12:
        return 0.0
    area = crescent_area(r2, geom.r1, geom.v)
    darea = crescent_area_derivative(r2, geom.r1, geom.v)
    return intensity * darea * math.exp(-intensity * area) / den


def conditional_serving_nodes(geom: DisplacementGeometry, intensity: float,
                              n: int = 48):
    """Fixed quadrature nodes and probability weights for the conditional
    slot-2 serving distance on [z1, r12]; the weights sum to ~1.

    When v > r1 the exclusion disks separate below r2 = v - r1 and the
    density (along with every integrand built on it) loses smoothness
    there, so the node set is split at that radius.  Panels much wider
    than the serving-distance scale 1/sqrt(intensity pi) gain one extra
    break there, or the density's bump starves for nodes at large v.
    Vectorized companion to r2_conditional_pdf for the moment and
    coverage assemblies.
    """
    den = _conditioning_scale(geom, intensity)
    r1, v = geom.r1, geom.v
    split = v - r1
    brk = [geom.z1, geom.r12]
    if geom.z1 == 0.0 and 0.0 < split < geom.r12:
        brk.insert(1, split)
    sigma = 3.0 / math.sqrt(intensity * math.pi)
    refined = []
    for lo, hi in zip(brk[:-1], brk[1:]):
        refined.append(lo)
        if hi - lo > 2.0 * sigma:
            refined.append(lo + sigma)
    refined.append(brk[-1])
    parts = [mapped_gauss_nodes(lo, hi, n)
             for lo, hi in zip(refined[:-1], refined[1:])]
    r2 = np.concatenate([p[0] for p in parts])
    w = np.concatenate([p[1] for p in parts])
    ca = (v * v + r2 * r2 - r1 * r1) / (2.0 * v * r2)
    cb = (v * v + r1 * r1 - r2 * r2) / (2.0 * v * r1)
    s = (-v + r2 + r1) * (v + r2 - r1) * (v - r2 + r1) * (v + r2 + r1)
    tri = 0.5 * np.sqrt(np.maximum(0.0, s))
    lens = r2 * r2 * np.arccos(np.clip(ca, -1.0, 1.0)) \
        + r1 * r1 * np.arccos(np.clip(cb, -1.0, 1.0)) - tri
    area = np.pi * r2 * r2 - lens
    darea = 2.0 * r2 * (math.pi - np.arccos(np.clip(ca, -1.0, 1.0)))
    pdf = intensity * darea * np.exp(-intensity * area) / den
    return r2, w * pdf


def r2_sample_given_handoff(u: float, geom: DisplacementGeometry,
                            intensity: float) -> float:
    """Inverse-CDF draw of the conditional slot-2 serving distance.

    u is a uniform variate in [0, 1]; the root is bracketed on [z1, r12] and
    solved to an absolute tolerance of 1e-10 * r12.
    """
    _conditioning_scale(geom, intensity)
    if not 0.0 <= u <= 1.0:
        raise ValueError("u must lie in [0, 1]")
    if u == 0.0:
        return geom.z1
    if u == 1.0:
        return geom.r12

    def shifted(x):
        return r2_conditional_cdf(x, geom, intensity) - u

    return brentq(shifted, geom.z1, geom.r12, xtol=1e-10 * geom.r12)


def x2_admissible_arc(r2: float, geom: DisplacementGeometry):
    """Bearings (at the origin, from the +x axis; the slot-1 position is at
    (-v, 0)) where a point at distance r2 clears the slot-1 exclusion disk.

    Returns a tuple of (lo, hi) intervals inside [0, 2*pi).  Given the
    slot-1 disk is empty, the changed serving point's bearing is uniform on
    this set.
    """
    slack = 1e-9 * max(geom.r12, 1.0)
    if not (geom.z1 - slack <= r2 <= geom.r12 + slack):
        raise ValueError("r2 outside the admissible interval [z1, r12]")
    if r2 == 0.0:
        return ((0.0, _TWO_PI),) if geom.v >= geom.r1 else ()
    if geom.v == 0.0:
        return ((0.0, _TWO_PI),) if r2 >= geom.r1 else ()
    c = (geom.r1 * geom.r1 - r2 * r2 - geom.v * geom.v) / (2.0 * r2 * geom.v)
    if c <= -1.0:
        return ((0.0, _TWO_PI),)
    if c >= 1.0:
        return ()
    phi = math.acos(c)
    return ((0.0, phi), (_TWO_PI - phi, _TWO_PI))


def x2_admissible_arc_measure(r2: float, geom: DisplacementGeometry) -> float:
    """Total length of the admissible bearing set at distance r2."""
    return sum(hi - lo for lo, hi in x2_admissible_arc(r2, geom))


def circle_in_disk_half_angle(r: float, center_dist: float,
                              disk_radius: float) -> float:
    """Half-width, in [0, pi], of the bearing arc of the circle of radius r
    about the origin that lies inside B(c, disk_radius) with |c| =
    center_dist, measured from the bearing of c."""
    if r < 0 or center_dist < 0 or disk_radius < 0:
        raise ValueError("arguments must be non-negative")
    if r == 0.0:
        return math.pi if center_dist <= disk_radius else 0.0
    if center_dist == 0.0:
        return math.pi if r <= disk_radius else 0.0
    c = (r * r + center_dist * center_dist - disk_radius * disk_radius) \
        / (2.0 * r * center_dist)
    if c >= 1.0:
        return 0.0
    if c <= -1.0:
        return math.pi
    return math.acos(c)
