"""Interference moments and correlation coefficients for the moving user.

Two interference sums are in play at the two time slots: the total field
(every point contributes, the ad-hoc picture) and the cellular field (the
serving point is excluded, with the serving rule switching points when the
move triggers a handoff).  The cross moment of the cellular field couples
the two exclusion disks through the handoff geometry; everything else
reduces to radial integrals of the bounded path-loss law, most of which
have closed forms in incomplete beta functions.

All plane integrals are taken in polar coordinates about the slot-2
position; the slot-1 position sits at (-v, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core_model import NetworkParams
from .geometry import (DisplacementGeometry, conditional_serving_nodes,
                       handoff_region_area)
from .quadrature import (IntegralResult, PolarRegion, QuadratureSpec, expect,
                         integrate_1d, integrate_polar_region,
                         mapped_gauss_nodes, rayleigh_serving, uniform_angle)

__all__ = [
    "MomentSet",
    "CorrelationResult",
    "pathloss_plane_integral",
    "pathloss_plane_integral_sq",
    "pathloss_disk_integral",
    "pathloss_disk_integral_sq",
    "total_field_moments",
    "cellular_moments",
    "corr_coefficient",
    "temporal_corr_coefficient",
    "adhoc_corr_coefficient",
]

# fixed Gauss-Legendre orders for the inner (vectorized) layers; the outer
# two levels stay adaptive.  Sized so the inner error sits well below the
# default rel_tol of the outer quadrature; see the accuracy tests.
_N_R2 = 48
_N_ARC = 64
_N_BEARING = 64


def pathloss_plane_integral(params: NetworkParams) -> float:
    """Integral of g over the plane: (2 pi / alpha) eps^(2/alpha - 1) pi / sin(2 pi / alpha)."""
    params.require_bounded_pathloss("the plane integral of g")
    a, e = params.alpha, params.epsilon
    return (2.0 * math.pi / a) * e ** (2.0 / a - 1.0) * math.pi / math.sin(2.0 * math.pi / a)


def pathloss_plane_integral_sq(params: NetworkParams) -> float:
    """Integral of g^2 over the plane."""
    params.require_bounded_pathloss("the plane integral of g^2")
    a, e = params.alpha, params.epsilon
    return (2.0 * math.pi / a) * e ** (2.0 / a - 2.0) * special.gamma(2.0 / a) \
        * special.gamma(2.0 - 2.0 / a)


def pathloss_disk_integral(r, params: NetworkParams):
    """Integral of g over the centered disk of radius r (vector-safe in r).

    In u = s^alpha / eps the integrand becomes an incomplete beta kernel,
    so the whole family of disk integrals is closed-form.
    """
    params.require_bounded_pathloss("the disk integral of g")
    a, e = params.alpha, params.epsilon
    r = np.asarray(r, dtype=float)
    x = r ** a / e
    z = x / (1.0 + x)
    out = (2.0 * math.pi / a) * e ** (2.0 / a - 1.0) \
        * special.beta(2.0 / a, 1.0 - 2.0 / a) \
        * special.betainc(2.0 / a, 1.0 - 2.0 / a, z)
    return float(out) if out.ndim == 0 else out


def pathloss_disk_integral_sq(r, params: NetworkParams):
    """Integral of g^2 over the centered disk of radius r (vector-safe in r)."""
    params.require_bounded_pathloss("the disk integral of g^2")
    a, e = params.alpha, params.epsilon
    r = np.asarray(r, dtype=float)
    x = r ** a / e
    z = x / (1.0 + x)
    out = (2.0 * math.pi / a) * e ** (2.0 / a - 2.0) \
        * special.beta(2.0 / a, 2.0 - 2.0 / a) \
        * special.betainc(2.0 / a, 2.0 - 2.0 / a, z)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MomentSet:
    """First and second order interference moments at the two slots.

    mean/second/cross describe the cellular (serving-point-excluded) field
    at the slot-2 position; the total_* entries keep every point and serve
    as reference values.
    """

    mean: float
    mean_sq: float
    second: float
    cross: float
    total_mean: float
    total_second: float
    total_cross: float


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    moments: MomentSet
    v: float
    params: NetworkParams
    err_est: float


class _LawIntegrals:
    """Bundles the path-loss law with its closed radial integrals."""

    def __init__(self, params: NetworkParams):
        self.params = params
        self.alpha = params.alpha
        self.epsilon = params.epsilon
        self.plane = pathloss_plane_integral(params)
        self.plane_sq = pathloss_plane_integral_sq(params)

    def g(self, r):
        return 1.0 / (self.epsilon + np.asarray(r, dtype=float) ** self.alpha)

    def disk(self, r):
        return pathloss_disk_integral(r, self.params)

    def disk_sq(self, r):
        return pathloss_disk_integral_sq(r, self.params)

    @property
    def knee_radius(self) -> float:
        return self.epsilon ** (1.0 / self.alpha)


def _psi_inside(r, center_dist, disk_radius):
    """Vector half-angle of the circle of radius r inside the off-center disk."""
    c = (r * r + center_dist * center_dist - disk_radius * disk_radius) \
        / (2.0 * r * center_dist)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _excess_outside_center_disk(c, v, r1, law: _LawIntegrals):
    """Integral of g(|x|) over the part of the slot-1 disk beyond radius c.

    c is an array of exclusion radii; requires v > 0.  Subtracting this from
    plane - disk(c) yields the field integral outside both disks.
    """
    c = np.asarray(c, dtype=float)
    lo = np.maximum(c, abs(v - r1))
    hi = v + r1
    r, w = mapped_gauss_nodes(lo, np.full_like(lo, hi), _N_ARC)
    vals = 2.0 * _psi_inside(r, v, r1) * law.g(r) * r
    out = np.einsum("...i,...i->...", w, vals)
    return np.where(lo < hi, out, 0.0)


def _field_outside_both_at_origin(c, v, r1, law: _LawIntegrals):
    """Integral of g(|x|) over the plane minus B(0, c) minus the slot-1 disk."""
    c = np.asarray(c, dtype=float)
    return law.plane - law.disk(c) - _excess_outside_center_disk(c, v, r1, law)


def _field_outside_both_at_slot1(c, v, r1, law: _LawIntegrals):
    """Integral of g(|x - l1|) over the same excluded-plane region, computed
    in polar coordinates about the slot-1 position."""
    c = np.asarray(c, dtype=float)
    hi = v + c
    # rings of radius s < v - c miss B(0, c) entirely; rings with s < c - v
    # would lie inside it, but c <= v + r1 keeps that below the r1 cut
    lo = np.maximum(r1, np.abs(v - c))
    s, w = mapped_gauss_nodes(lo, hi, _N_ARC)
    arg = (s * s + v * v - (c * c)[..., None]) / (2.0 * s * v)
    psi = np.arccos(np.clip(arg, -1.0, 1.0))
    vals = 2.0 * psi * law.g(s) * s
    inner = np.einsum("...i,...i->...", w, vals)
    inner = np.where(lo < hi, inner, 0.0)
    return law.plane - law.disk(r1) - inner


def _mean_over_admissible_bearing(r2, v, r1, law: _LawIntegrals):
    """Average of g(distance to the slot-1 position) over the bearing arc
    admissible for the post-handoff serving point at radius r2."""
    r2 = np.asarray(r2, dtype=float)
    lo = _psi_inside(r2, v, r1)
    hi = np.full_like(lo, math.pi)
    span = hi - lo
    phi, w = mapped_gauss_nodes(lo, hi, _N_BEARING)
    dist = np.sqrt(np.maximum(
        r2[..., None] ** 2 + v * v - 2.0 * r2[..., None] * v * np.cos(phi), 0.0))
    vals = law.g(dist)
    out = np.einsum("...i,...i->...", w, vals)
    return np.where(span > 1e-12, out / np.where(span > 1e-12, span, 1.0), 0.0)


def total_field_moments(params: NetworkParams, v: float,
                        spec: QuadratureSpec = QuadratureSpec()):
    """Reference moments with no serving-point exclusion.

    Returns (total_mean, total_second, total_cross); the cross moment pairs
    the field seen from the slot-1 and slot-2 positions.
    """
    params.require_bounded_pathloss("total field moments")
    if v < 0:
        raise ValueError("v must be non-negative")
    law = _LawIntegrals(params)
    lam = params.intensity
    eh2 = params.fading.second_moment

    g1 = integrate_polar_region(lambda r, t: law.g(r),
                                PolarRegion(r_lo=0.0, r_hi=math.inf,
                                            gamma_lo=0.0, gamma_hi=2.0 * math.pi),
                                spec).value
    g2 = integrate_polar_region(lambda r, t: law.g(r) ** 2,
                                PolarRegion(r_lo=0.0, r_hi=math.inf,
                                            gamma_lo=0.0, gamma_hi=2.0 * math.pi),
                                spec).value

    def paired(r, t):
        d2 = r * r + v * v + 2.0 * r * v * math.cos(t)
        return law.g(r) * law.g(math.sqrt(max(d2, 0.0)))

    pair = 2.0 * integrate_polar_region(
        paired, PolarRegion(r_lo=0.0, r_hi=math.inf,
                            gamma_lo=0.0, gamma_hi=math.pi), spec).value

    total_mean = lam * g1
    total_second = eh2 * lam * g2 + (lam * g1) ** 2
    total_cross = lam * pair + (lam * g1) ** 2
    return total_mean, total_second, total_cross


def _pathloss_pair_integral(v: float, law: _LawIntegrals,
                            spec: QuadratureSpec) -> IntegralResult:
    """Plane integral of g(|x|) g(|x - l1|), with breakpoints at the path
    loss knee and at the displacement scale where the second factor peaks."""
    if v == 0.0:
        return IntegralResult(value=law.plane_sq, err_est=0.0,
                              converged=True, n_evals=0)
    inner_spec = spec.tightened()

    def ring(r):
        def fn(t):
            d2 = r * r + v * v + 2.0 * r * v * math.cos(t)
            return law.g(math.sqrt(max(d2, 0.0)))
        return 2.0 * r * law.g(r) * integrate_1d(fn, 0.0, math.pi, inner_spec).value

    pts = [law.knee_radius, v, v + law.knee_radius, max(v - law.knee_radius, 0.0)]
    return integrate_1d(ring, 0.0, math.inf, spec,
                        points=[p for p in pts if p > 0])


def _serving_law_moments(law: _LawIntegrals, intensity: float,
                         spec: QuadratureSpec):
    """E[g(R)], E[g(R)^2], E[g(R) disk(R)] under the nearest-point law."""
    dens = rayleigh_serving(intensity, feature_radii=(law.knee_radius,))
    a1 = expect(lambda r: float(law.g(r)), dens, spec)
    a2 = expect(lambda r: float(law.g(r)) ** 2, dens, spec)
    agf = expect(lambda r: float(law.g(r)) * float(law.disk(r)), dens, spec)
    return a1, a2, agf


def temporal_corr_coefficient(params: NetworkParams,
                              spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Correlation of the cellular interference across two slots for a
    static user: same serving point, fresh fading.

    Closed assembly: with A1 = E[g(R)], A2 = E[g(R)^2], Q = 2 lam E[g(R) F(R)]
    (F the disk integral of g) the coefficient is
    (lam G2 - A2 - A1^2 + Q) / (E[h^2] (lam G2 - A2) - A1^2 + Q).
    """
    params.require_bounded_pathloss("the temporal correlation coefficient")
    law = _LawIntegrals(params)
    lam = params.intensity
    eh2 = params.fading.second_moment
    a1, a2, agf = _serving_law_moments(law, lam, spec)
    q = 2.0 * lam * agf.value
    num = lam * law.plane_sq - (a2.value + a1.value ** 2) + q
    den = eh2 * lam * law.plane_sq - (eh2 * a2.value + a1.value ** 2) + q
    return num / den


def adhoc_corr_coefficient(params: NetworkParams, v: float,
                           spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Correlation across the move when every point interferes (no serving
    exclusion, slotted-transmitter picture): pair integral over E[h^2] G2.
    The point density cancels in the ratio."""
    params.require_bounded_pathloss("the ad-hoc correlation coefficient")
    if v < 0:
        raise ValueError("v must be non-negative")
    law = _LawIntegrals(params)
    pair = _pathloss_pair_integral(v, law, spec)
    return pair.value / (params.fading.second_moment * law.plane_sq)


def _cross_leaf(r1: float, theta: float, v: float, intensity: float,
                law: _LawIntegrals) -> float:
    """Integrand of the serving-coupled part of E[I(1) I(2)] at one
    (serving distance, bearing) node: the three exclusion-coupled terms
    X + T1 + T2, each split over the handoff and no-handoff branches."""
    geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
    r12 = geom.r12
    g_r1 = float(law.g(r1))
    g_r12 = float(law.g(r12))
    area = handoff_region_area(geom)
    p_h = -math.expm1(-intensity * area)
    p_stay = 1.0 - p_h

    jg_stay = float(_field_outside_both_at_origin(r12, v, r1, law)) if v > 0 \
        else law.plane - law.disk(r12)
    jgv_stay = float(_field_outside_both_at_slot1(r12, v, r1, law)) if v > 0 \
        else jg_stay

    x_term = p_stay * g_r1 * g_r12
    t1 = intensity * g_r1 * p_stay * jg_stay + p_h * g_r1 * g_r12
    t2 = intensity * p_stay * g_r12 * jgv_stay

    if p_h > 1e-13 and geom.r12 > geom.z1 * (1.0 + 1e-13):
        r2, wts = conditional_serving_nodes(geom, intensity, n=_N_R2)
        g_r2 = law.g(r2)
        jg_move = _field_outside_both_at_origin(r2, v, r1, law)
        jgv_move = _field_outside_both_at_slot1(r2, v, r1, law)
        bearing_avg = _mean_over_admissible_bearing(r2, v, r1, law)
        x_term += p_h * g_r1 * float((wts * g_r2).sum())
        t1 += intensity * g_r1 * p_h * float((wts * jg_move).sum())
        t2 += intensity * p_h * float((wts * g_r2 * jgv_move).sum()) \
            + p_h * float((wts * g_r2 * bearing_avg).sum())
    return x_term + t1 + t2


def _moments_with_cross_err(params: NetworkParams, v: float,
                            spec: QuadratureSpec):
    params.require_bounded_pathloss("cellular interference moments")
    if v < 0:
        raise ValueError("v must be non-negative")
    law = _LawIntegrals(params)
    lam = params.intensity
    eh2 = params.fading.second_moment

    a1, a2, agf = _serving_law_moments(law, lam, spec)
    mean = lam * law.plane - a1.value
    q = 2.0 * lam * agf.value
    # E[h^2] lam G2 + lam^2 G1^2 - E[h^2] A2 - 2 lam (A1 G1 - E[g F]),
    # regrouped around mean^2 so the variance parts stay well conditioned
    second = eh2 * (lam * law.plane_sq - a2.value) + mean * mean \
        - a1.value ** 2 + q

    pair = _pathloss_pair_integral(v, law, spec)
    coupled = expect(
        lambda r1, th: _cross_leaf(r1, th, v, lam, law),
        (rayleigh_serving(lam, feature_radii=(law.knee_radius, v)),
         uniform_angle()),
        spec)
    cross = lam * pair.value + (lam * law.plane) ** 2 - coupled.value
    cross_err = lam * pair.err_est + coupled.err_est

    total_mean, total_second, total_cross = total_field_moments(params, v, spec)
    moments = MomentSet(mean=mean, mean_sq=mean * mean, second=second,
                        cross=cross, total_mean=total_mean,
                        total_second=total_second, total_cross=total_cross)
    return moments, cross_err


def cellular_moments(params: NetworkParams, v: float,
                     spec: QuadratureSpec = QuadratureSpec()) -> MomentSet:
    """Moments of the serving-point-excluded interference for displacement v."""
    moments, _ = _moments_with_cross_err(params, v, spec)
    return moments


def corr_coefficient(params: NetworkParams, v: float,
                     spec: QuadratureSpec = QuadratureSpec()) -> CorrelationResult:
    """Correlation of the cellular interference between the slot-1 and
    slot-2 positions, displacement v apart."""
    moments, cross_err = _moments_with_cross_err(params, v, spec)
    var = moments.second - moments.mean_sq
    coef = (moments.cross - moments.mean_sq) / var
    # the coupled cross integral dominates the quadrature error; fold its
    # estimate through the same normalization as the coefficient
    err = abs(cross_err / var)
    return CorrelationResult(coefficient=coef, moments=moments, v=v,
                             params=params, err_est=err)
