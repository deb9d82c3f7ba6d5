"""Joint coverage probability across the move, for the singular path-loss
law (epsilon = 0, SIR-only).

The joint event asks for the SIR at both slots to clear a threshold T.
Conditioning on the slot-1 serving geometry (and, under a handoff, on the
new serving distance and bearing), the fading expectations close into a
product: one explicit factor per conditioned point, and an exponential
whose exponent is an exact two-dimensional integral of

    F(r, gamma) = 1 - 1/((1 + T r1^a d1(r,gamma)^-a)(1 + T rs^a r^-a))

over the plane minus the union of the two exclusion disks, where d1 is
the distance from the integration point to the slot-1 position and rs is
the serving distance whose SIR the second factor tracks.  The angular
average is kept inside the exponent (the exact form); restricting the
gamma integration to the in-disk arc replaces the free-angle shortcut in
the B1 bookkeeping.

Everything decomposes into a radially symmetric tail with a closed
incomplete-beta form plus low-dimensional tensors on panel-split
Gauss-Legendre nodes; the sharp scale is s* = T^(1/a) r1, the distance at
which the slot-1 point's interference matches the signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import special

from .core_model import NetworkParams, SirThreshold
from .geometry import (DisplacementGeometry, classify_overlap,
                       conditional_serving_nodes, handoff_region_area,
                       OverlapCase)
from .quadrature import (QuadratureSpec, expect, integrate_1d,
                         mapped_gauss_nodes, rayleigh_serving, uniform_angle)

__all__ = [
    "Strategy",
    "CoverageQuery",
    "CoverageComponents",
    "CoverageResult",
    "integrand_f1",
    "integrand_f2",
    "b1_arc_integral",
    "jcp_skip",
    "jcp_no_handoff",
    "jcp_handoff",
    "jcp_total",
    "jcp_static",
    "jcp_mobile_limit",
    "interference_penalty",
]

# node-count profiles (radial panels, angular panels, arc, tail) for the
# exclusion exponent; the compact one serves the handoff path, where the
# exponent is evaluated on a whole vector of conditional serving distances
# inside a 2-D adaptive expectation
_FINE = (32, 24, 64, 24)
_COMPACT = (24, 16, 32, 16)
_N_BEARING = 32
_N_R2 = 16


class Strategy(Enum):
    SKIP = "skip"
    CONVENTIONAL = "conventional"
    STATIC_CLOSED_FORM = "static-closed-form"
    MOBILE_LIMIT = "mobile-limit"


@dataclass(frozen=True)
class CoverageQuery:
    params: NetworkParams
    v: float
    threshold: SirThreshold
    strategy: Strategy
    spec: QuadratureSpec = QuadratureSpec()

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("v must be non-negative")
        if self.params.epsilon != 0.0:
            raise ValueError(
                "coverage is derived for the singular path loss; set epsilon = 0")
        if self.strategy is Strategy.STATIC_CLOSED_FORM and self.v != 0.0:
            raise ValueError("the static closed form requires v = 0")


@dataclass(frozen=True)
class CoverageComponents:
    no_handoff: float
    handoff: float


@dataclass(frozen=True)
class CoverageResult:
    joint: float
    components: Optional[CoverageComponents]
    err_est: float


def integrand_f1(r1: float, r: float, gamma: float, theta: float, v: float,
                 T: float, alpha: float) -> float:
    """Fading-closed failure weight of an interferer at polar (r, gamma)
    about the slot-2 position, when the slot-1 point keeps serving (serving
    distances r1 and r12)."""
    geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
    return integrand_f2(r1, geom.r12, r, gamma, v, T, alpha)


def integrand_f2(r1: float, r2: float, r: float, gamma: float, v: float,
                 T: float, alpha: float) -> float:
    """Same failure weight with slot-2 serving distance r2; gamma is
    measured from the bearing of the slot-1 position."""
    if r == 0.0:
        return 1.0
    d1_sq = r * r + v * v - 2.0 * r * v * math.cos(gamma)
    d1a = d1_sq ** (0.5 * alpha)
    p1 = d1a / (d1a + T * r1 ** alpha)
    ra = r ** alpha
    p2 = ra / (ra + T * r2 ** alpha)
    return 1.0 - p1 * p2


def _tail_quantile(x0, T: float, alpha: float):
    """Integral of T t / (t^alpha + T) from x0 to infinity, closed in the
    regularized incomplete beta function; vector-safe in x0."""
    x0 = np.asarray(x0, dtype=float)
    a = 2.0 / alpha
    w0 = x0 ** alpha / T
    out = (T ** a / alpha) * special.beta(a, 1.0 - a) \
        * special.betainc(1.0 - a, a, 1.0 / (1.0 + w0))
    return float(out) if out.ndim == 0 else out


def interference_penalty(T: float, alpha: float) -> float:
    """Single-location interference-to-signal integral: coverage of one
    slot with nearest-point serving is 1/(1 + penalty)."""
    if not T > 0 or not alpha > 2:
        raise ValueError("need T > 0 and alpha > 2")
    return 2.0 * float(_tail_quantile(1.0, T, alpha))


def jcp_mobile_limit(T: float, alpha: float) -> float:
    """Joint coverage in the fully decorrelated limit: the single-slot
    coverage squared."""
    rho = interference_penalty(T, alpha)
    return (1.0 / (1.0 + rho)) ** 2


def jcp_static(T: float, alpha: float) -> float:
    """Joint coverage of a static user over two slots with fresh fading.

    Evaluated from the proof-side integral: with
    kappa = int_1^inf (1 - 1/(1 + T t^-alpha)^2) t dt the serving-distance
    expectation of exp(-2 pi lam r1^2 kappa) collapses to 1/(1 + 2 kappa)
    under u = lam pi r1^2, so the density cancels exactly.
    """
    if not T > 0 or not alpha > 2:
        raise ValueError("need T > 0 and alpha > 2")

    def band(t):
        p = t ** alpha / (t ** alpha + T)
        return (1.0 - p * p) * t

    kappa = integrate_1d(band, 1.0, math.inf).value
    return 1.0 / (1.0 + 2.0 * kappa)


def _exclusion_exponent(c, rs, r1: float, v: float, T: float, alpha: float,
                        nodes=_FINE, with_arc: bool = True):
    """Exact plane integral of the failure weight outside both exclusion
    disks:  E = integral over R^2 \\ (C1 u B(l2, c)) of F(r, gamma; rs).

    c and rs are matching-shape arrays (or scalars); returns that shape.
    Decomposition: radial tail of (1-P2) in closed form, a panel-split
    tensor for the P2 (1-P1) remainder, minus the part of both inside C1.
    with_arc=False omits that last part; the caller supplies it (only
    valid when the bound c and the serving distance rs coincide, where it
    equals b1_arc_integral).
    """
    n_radial, n_angle, n_arc, n_tail = nodes
    c_in = np.asarray(c, dtype=float)
    rows = np.atleast_1d(c_in).astype(float).ravel()
    rs_v = np.broadcast_to(np.asarray(rs, dtype=float),
                           np.shape(c_in)).reshape(rows.shape).astype(float)
    r1a = T * r1 ** alpha
    s_star = T ** (1.0 / alpha) * r1
    # knee of the serving-signal factor P2
    s_knee = T ** (1.0 / alpha) * rs_v

    # radially symmetric part over r > c
    term_a = 2.0 * math.pi * rs_v ** 2 * _tail_quantile(
        np.where(rs_v > 0, rows / np.where(rs_v > 0, rs_v, 1.0), np.inf), T, alpha)

    # gamma nodes on [0, pi]: the slot-1 factor varies on the angular scale
    # s*/v near the bearing, so refine there
    g_ref = max(v, s_star, 1e-300)
    g1 = min(max(2.0 * s_star / g_ref, 1e-3), 1.2)
    g2 = min(max(10.0 * s_star / g_ref, 2.0 * g1), 2.2)
    g_parts = []
    for glo, ghi in ((0.0, g1), (g1, g2), (g2, math.pi)):
        g_parts.append(mapped_gauss_nodes(glo, ghi, n_angle))
    gam = np.concatenate([p[0] for p in g_parts])
    gw = np.concatenate([p[1] for p in g_parts])
    cos_g = np.cos(gam)

    def p2_of(r):
        ra = r ** alpha
        return ra / (ra + T * rs_v[:, None, None] ** alpha)

    def one_minus_p1(r):
        d1sq = r * r + v * v - 2.0 * r * v * cos_g
        d1a = d1sq ** (0.5 * alpha)
        return r1a / (d1a + r1a)

    # radial panels over r > c: breaks at the slot-1 interference peak
    # (radial scale s* around v) and at the P2 knee, clipped to start at c
    k = rows.shape[0]
    cand = np.empty((k, 5))
    cand[:, 0] = v - 6.0 * s_star
    cand[:, 1] = v - s_star
    cand[:, 2] = v + s_star
    cand[:, 3] = v + 6.0 * s_star
    cand[:, 4] = s_knee
    cand.sort(axis=1)
    brk = np.maximum.accumulate(
        np.concatenate([rows[:, None], cand], axis=1), axis=1)
    b_end = brk[:, -1] + 3.0 * (max(v, 1.0) + s_star) + 3.0 * rs_v
    term_b = np.zeros_like(rows)
    for j in range(brk.shape[1]):
        lo = brk[:, j]
        hi = brk[:, j + 1] if j + 1 < brk.shape[1] else b_end
        r, wr = mapped_gauss_nodes(lo, hi, n_radial)
        rr = r[..., :, None]
        vals = rr * p2_of(rr) * one_minus_p1(rr)
        term_b += 2.0 * np.einsum("...i,...ij,j->...", wr, vals, gw)
    # power-mapped tail beyond b_end: r = b_end u^(-1/(alpha-2)) flattens
    # the r^(1-alpha) decay to an O(1) integrand
    u, wu = mapped_gauss_nodes(0.0, 1.0, n_tail)
    expo = -1.0 / (alpha - 2.0)
    r_t = b_end[:, None] * u ** expo
    jac = (b_end[:, None] / (alpha - 2.0)) * u ** (expo - 1.0)
    rr = r_t[..., :, None]
    vals = rr * p2_of(rr) * one_minus_p1(rr)
    term_b += 2.0 * np.einsum("...i,...i,...ij,j->...", wu, jac, vals, gw)

    # the C1 \ B(l2, c) correction
    term_c = np.zeros_like(rows)
    if not with_arc:
        pass
    elif v == 0.0 and np.any(rows < r1):
        # concentric case: gamma-free integrand over the annulus c < r < r1
        lo = np.minimum(rows, r1)
        mid = np.clip(s_knee, lo, r1)
        rc, wc = (np.concatenate(z, axis=-1) for z in zip(
            mapped_gauss_nodes(lo, mid, n_arc // 2),
            mapped_gauss_nodes(mid, np.full_like(rows, r1), n_arc // 2)))
        rca = rc ** alpha
        p1 = rca / (rca + r1a)
        p2 = rca / (rca + T * rs_v[:, None] ** alpha)
        term_c = 2.0 * math.pi * np.einsum(
            "...i,...i->...", wc, rc * (1.0 - p1 * p2))
    elif v > 0.0:
        # below |v - r1| the circle of radius r either misses C1 entirely
        # (v > r1) or lies inside it (v < r1, psi saturates at pi); the
        # saturation point is a sqrt kink, so it gets its own break
        lo = np.maximum(rows, v - r1) if v >= r1 else rows
        hi = np.full_like(rows, v + r1)
        live = lo < hi
        kink = np.clip(abs(v - r1), lo, hi)
        knee = np.clip(s_knee, lo, hi)
        m1 = np.minimum(kink, knee)
        m2 = np.maximum(kink, knee)
        rc, wc = (np.concatenate(z, axis=-1) for z in zip(
            mapped_gauss_nodes(lo, m1, n_arc // 2),
            mapped_gauss_nodes(m1, m2, n_arc // 2),
            mapped_gauss_nodes(m2, hi, n_arc // 2)))
        psi = np.arccos(np.clip(
            (rc * rc + v * v - r1 * r1) / (2.0 * rc * v), -1.0, 1.0))
        rca = rc ** alpha
        one_m_p2 = T * rs_v[:, None] ** alpha / (rca + T * rs_v[:, None] ** alpha)
        radial = np.einsum("...i,...i->...", wc, 2.0 * psi * rc * one_m_p2)

        # in-arc tensor of P2 (1-P1), gamma in [0, psi(r)] with the same
        # near-bearing refinement
        ga = np.minimum(psi, g1)
        gb = np.minimum(psi, g2)
        tens = np.zeros_like(rows)
        for glo, ghi in ((np.zeros_like(psi), ga), (ga, gb), (gb, psi)):
            gam_c, gw_c = mapped_gauss_nodes(glo, ghi, n_angle)
            d1sq = rc[..., :, None] ** 2 + v * v \
                - 2.0 * rc[..., :, None] * v * np.cos(gam_c)
            d1a = d1sq ** (0.5 * alpha)
            omp1 = r1a / (d1a + r1a)
            p2 = rca[..., :, None] / (rca[..., :, None]
                                      + T * rs_v[:, None, None] ** alpha)
            tens += 2.0 * np.einsum("...i,...ij,...ij->...",
                                    wc * rc, gw_c, p2 * omp1)
        term_c = np.where(live, radial + tens, 0.0)

    out = term_a + term_b - term_c
    return float(out[0]) if np.ndim(c_in) == 0 else out.reshape(np.shape(c_in))


def b1_arc_integral(r1: float, r2: float, v: float, T: float,
                    alpha: float) -> float:
    """Integral of the failure weight over C1 \\ B(l2, r2), the slot-1 disk
    beyond the slot-2 exclusion, with the exact in-arc gamma integration.

    Piecewise radial limits keyed by the overlap case: disjoint disks
    integrate over all of C1 (r in [v-r1, v+r1]), intersecting ones from
    r2 up, and a slot-1 disk engulfed by the exclusion contributes nothing.
    """
    case = classify_overlap(r1, r2, v)
    if case is OverlapCase.ENGULFED:
        return 0.0
    if case is OverlapCase.DISJOINT:
        lo = v - r1
    else:
        lo = r2
    hi = v + r1
    if not lo < hi:
        return 0.0
    if v == 0.0:
        # concentric case: gamma-free integrand over the annulus
        rc, wc = mapped_gauss_nodes(lo, hi, _FINE[2])
        rca = rc ** alpha
        p1 = rca / (rca + T * r1 ** alpha)
        p2 = rca / (rca + T * r2 ** alpha)
        return 2.0 * math.pi * float(np.einsum("i,i->", wc, rc * (1.0 - p1 * p2)))

    r1a = T * r1 ** alpha
    s_star = T ** (1.0 / alpha) * r1
    g_ref = max(v, s_star, 1e-300)
    g1 = min(max(2.0 * s_star / g_ref, 1e-3), 1.2)
    g2 = min(max(10.0 * s_star / g_ref, 2.0 * g1), 2.2)

    # breaks at the P2 knee and at the psi saturation kink |r1 - v|
    kink = min(max(abs(r1 - v), lo), hi)
    knee = min(max(T ** (1.0 / alpha) * r2, lo), hi)
    m1, m2 = sorted((kink, knee))
    rc, wc = (np.concatenate(z) for z in zip(
        mapped_gauss_nodes(lo, m1, _FINE[2] // 2),
        mapped_gauss_nodes(m1, m2, _FINE[2] // 2),
        mapped_gauss_nodes(m2, hi, _FINE[2] // 2)))
    psi = np.arccos(np.clip((rc * rc + v * v - r1 * r1) / (2.0 * rc * v), -1.0, 1.0))
    rca = rc ** alpha
    r2a = T * r2 ** alpha
    one_m_p2 = r2a / (rca + r2a)
    total = float(np.einsum("i,i->", wc, 2.0 * psi * rc * one_m_p2))

    ga = np.minimum(psi, g1)
    gb = np.minimum(psi, g2)
    for glo, ghi in ((np.zeros_like(psi), ga), (ga, gb), (gb, psi)):
        gam_c, gw_c = mapped_gauss_nodes(glo, ghi, _FINE[1])
        d1sq = rc[:, None] ** 2 + v * v - 2.0 * rc[:, None] * v * np.cos(gam_c)
        d1a = d1sq ** (0.5 * alpha)
        omp1 = r1a / (d1a + r1a)
        p2 = rca[:, None] / (rca[:, None] + r2a)
        total += 2.0 * float(np.einsum("i,ij,ij->", wc * rc, gw_c, p2 * omp1))
    return total


def _require(query: CoverageQuery, strategy: Strategy, op: str) -> None:
    if query.strategy is not strategy:
        raise ValueError(f"{op} requires strategy {strategy.value!r}")


def jcp_skip(query: CoverageQuery) -> CoverageResult:
    """Joint coverage when the user keeps the slot-1 serving point after
    the move (handoff skipping): only C1 is known empty."""
    _require(query, Strategy.SKIP, "jcp_skip")
    lam = query.params.intensity
    alpha = query.params.alpha
    T = query.threshold.linear
    v = query.v

    def leaf(r1, theta):
        geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
        e = _exclusion_exponent(geom.z1, geom.r12, r1, v, T, alpha)
        return math.exp(-lam * e)

    res = expect(leaf, (rayleigh_serving(lam, feature_radii=(v,)),
                        uniform_angle()), query.spec)
    joint = min(max(res.value, 0.0), 1.0)
    return CoverageResult(joint=joint, components=None, err_est=res.err_est)


def _no_handoff_result(query: CoverageQuery):
    lam = query.params.intensity
    alpha = query.params.alpha
    T = query.threshold.linear
    v = query.v

    def leaf(r1, theta):
        geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
        p_stay = math.exp(-lam * handoff_region_area(geom))
        if p_stay == 0.0:
            return 0.0
        # radial exponent minus the slot-1 arc, shared with the public op
        e = _exclusion_exponent(geom.r12, geom.r12, r1, v, T, alpha,
                                with_arc=False) \
            - b1_arc_integral(r1, geom.r12, v, T, alpha)
        return p_stay * math.exp(-lam * e)

    return expect(leaf, (rayleigh_serving(lam, feature_radii=(v,)),
                         uniform_angle()), query.spec)


def _handoff_result(query: CoverageQuery):
    lam = query.params.intensity
    alpha = query.params.alpha
    T = query.threshold.linear
    v = query.v
    r1a_of = lambda r1: T * r1 ** alpha

    def leaf(r1, theta):
        geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
        area = handoff_region_area(geom)
        p_h = -math.expm1(-lam * area)
        if p_h < 1e-14 or not geom.r12 > geom.z1 * (1.0 + 1e-13):
            return 0.0
        r2, w_cond = conditional_serving_nodes(geom, lam, n=_N_R2)

        # fading factor of the old point interfering at the new position
        r12a = geom.r12 ** alpha
        old_point = r12a / (r12a + T * r2 ** alpha)

        # fading factor of the new point interfering at the old position,
        # averaged over its admissible bearing
        psi = np.arccos(np.clip(
            (r2 * r2 + v * v - r1 * r1) / (2.0 * r2 * v), -1.0, 1.0))
        span = math.pi - psi
        phi, wphi = mapped_gauss_nodes(psi, np.full_like(psi, math.pi), _N_BEARING)
        dsq = r2[:, None] ** 2 + v * v - 2.0 * r2[:, None] * v * np.cos(phi)
        da = dsq ** (0.5 * alpha)
        p1 = da / (da + r1a_of(r1))
        new_point = np.where(span > 1e-12,
                             np.einsum("ij,ij->i", wphi, p1)
                             / np.where(span > 1e-12, span, 1.0), 0.0)

        e = _exclusion_exponent(r2, r2, r1, v, T, alpha, nodes=_COMPACT)
        payload = float(np.sum(w_cond * old_point * new_point
                               * np.exp(-lam * e)))
        return p_h * payload

    return expect(leaf, (rayleigh_serving(lam, feature_radii=(v,)),
                         uniform_angle()), query.spec)


def jcp_no_handoff(query: CoverageQuery) -> float:
    """Probability both slots are covered and the serving point is kept."""
    _require(query, Strategy.CONVENTIONAL, "jcp_no_handoff")
    return min(max(_no_handoff_result(query).value, 0.0), 1.0)


def jcp_handoff(query: CoverageQuery) -> float:
    """Probability both slots are covered and the move changes the serving
    point."""
    _require(query, Strategy.CONVENTIONAL, "jcp_handoff")
    return min(max(_handoff_result(query).value, 0.0), 1.0)


def jcp_total(query: CoverageQuery) -> CoverageResult:
    """Joint coverage under conventional handoffs: the no-handoff and
    handoff contributions, summed by total probability."""
    _require(query, Strategy.CONVENTIONAL, "jcp_total")
    stay = _no_handoff_result(query)
    move = _handoff_result(query)
    no_handoff = min(max(stay.value, 0.0), 1.0)
    handoff = min(max(move.value, 0.0), 1.0)
    return CoverageResult(joint=no_handoff + handoff,
                          components=CoverageComponents(no_handoff=no_handoff,
                                                        handoff=handoff),
                          err_est=stay.err_est + move.err_est)
