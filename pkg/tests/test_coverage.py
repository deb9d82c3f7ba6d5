"""Joint coverage operations for the singular path loss.

Exclusion-exponent anchors marked "piecewise-quad reference" come from an
independent adaptive-quadrature build of the same plane integral (closed
incomplete-beta tail term, break points at the interference scales, explicit
power-mapped tail) that shares no code with the panel-tensor implementation.
The b1 anchors are plain nested scipy.quad over the intersection arcs.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from cellcorr.core_model import NetworkParams, SirThreshold
from cellcorr.geometry import DisplacementGeometry, handoff_probability_marginal
from cellcorr.quadrature import PolarRegion, QuadratureSpec, integrate_polar_region
from cellcorr import analytic_coverage as cov

# piecewise-quad references: (c, rs, r1, v, T, alpha) -> exponent
_EXPONENT_ANCHORS = [
    (0.9, 1.3, 0.7, 0.6, 1.0, 4.0, 6.2077294533799),
    (0.25, 0.25, 0.8, 1.6, 3.2, 3.5, 5.732303835800907),
    (1.1, 1.1, 1.1, 0.0, 0.5, 2.8, 8.335943953385943),
]

# nested-quad references: (r1, r2, v, T, alpha) -> arc integral
_B1_ANCHORS = [
    (0.9, 0.5, 1.1, 1.0, 4.0, 1.9235177209966265),
    (0.7, 0.4, 0.2, 2.0, 3.4, 0.9063847376132543),
]

_STATIC_UNIT_REF = 0.41184511949121405   # adaptive-quad reference, T=1 alpha=4
_MOBILE_UNIT_REF = 0.3137110617643631    # (1/(1 + pi/4))^2

_LOOSE = QuadratureSpec(rel_tol=1e-4, abs_tol=1e-7)


def _params(lam=1.0, alpha=4.0):
    return NetworkParams(intensity=lam, alpha=alpha, epsilon=0.0)


def _query(v, db=0.0, lam=1.0, alpha=4.0,
           strategy=cov.Strategy.CONVENTIONAL, spec=None):
    return cov.CoverageQuery(params=_params(lam, alpha), v=v,
                             threshold=SirThreshold.from_db(db),
                             strategy=strategy,
                             spec=spec if spec is not None else QuadratureSpec())


# ---------------------------------------------------------------- integrands

def test_failure_weight_range_and_decay():
    rng = np.random.default_rng(31)
    for _ in range(40):
        r1 = 10 ** rng.uniform(-1, 0.7)
        r2 = 10 ** rng.uniform(-1, 0.7)
        v = rng.uniform(0.0, 3.0)
        r = 10 ** rng.uniform(-1.5, 1.5)
        gam = rng.uniform(0.0, math.pi)
        T = 10 ** rng.uniform(-1, 1)
        a = rng.uniform(2.2, 6.0)
        f = cov.integrand_f2(r1, r2, r, gam, v, T, a)
        assert 0.0 <= f < 1.0
        # symmetric about gamma = pi
        assert cov.integrand_f2(r1, r2, r, 2.0 * math.pi - gam, v, T, a) \
            == pytest.approx(f, rel=1e-13)
        # far interferers cannot break either slot
        assert cov.integrand_f2(r1, r2, 1e7, gam, v, T, a) < 1e-8
    assert cov.integrand_f2(0.9, 0.4, 0.0, 1.0, 0.5, 1.0, 4.0) == 1.0


def test_failure_weight_interferer_on_old_position():
    # an interferer collocated with the slot-1 location kills slot 1 a.s.
    assert cov.integrand_f2(0.8, 0.5, 1.3, 0.0, 1.3, 1.0, 4.0) == 1.0


def test_failure_weight_static_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(20):
        r1 = 10 ** rng.uniform(-1, 0.5)
        r = 10 ** rng.uniform(-1, 1)
        gam = rng.uniform(0, 2 * math.pi)
        theta = rng.uniform(0, math.pi)
        T = 10 ** rng.uniform(-1, 1)
        a = rng.uniform(2.2, 6.0)
        ref = 1.0 - 1.0 / (1.0 + T * (r1 / r) ** a) ** 2
        assert cov.integrand_f1(r1, r, gam, theta, 0.0, T, a) \
            == pytest.approx(ref, rel=1e-12)


def test_failure_weight_slot1_serving_consistent():
    rng = np.random.default_rng(17)
    for _ in range(20):
        r1 = 10 ** rng.uniform(-1, 0.5)
        v = rng.uniform(0.1, 2.5)
        theta = rng.uniform(0, math.pi)
        r = 10 ** rng.uniform(-1, 1)
        gam = rng.uniform(0, math.pi)
        geom = DisplacementGeometry(v=v, theta=theta, r1=r1)
        assert cov.integrand_f1(r1, r, gam, theta, v, 1.7, 3.6) \
            == cov.integrand_f2(r1, geom.r12, r, gam, v, 1.7, 3.6)


# ----------------------------------------------------- tail quantile, limits

def test_tail_quantile_quartic_arctan_form():
    rng = np.random.default_rng(23)
    for _ in range(20):
        T = 10 ** rng.uniform(-2, 2)
        x0 = rng.uniform(0.0, 4.0)
        got = cov._tail_quantile(x0, T, 4.0)
        ref = 0.5 * math.sqrt(T) * (math.pi / 2 - math.atan(x0 * x0 / math.sqrt(T)))
        assert got == pytest.approx(ref, rel=1e-12)


def test_tail_quantile_hypergeometric_form():
    rng = np.random.default_rng(29)
    for _ in range(20):
        T = 10 ** rng.uniform(-2, 2)
        x0 = rng.uniform(0.0, 4.0)
        a = 2.0 / rng.uniform(2.1, 6.5)
        alpha = 2.0 / a
        s0 = 1.0 / (1.0 + x0 ** alpha / T)
        incomplete = s0 ** (1.0 - a) / (1.0 - a) \
            * special.hyp2f1(1.0 - a, 1.0 - a, 2.0 - a, s0)
        ref = (T ** a / alpha) * incomplete
        assert cov._tail_quantile(x0, T, alpha) == pytest.approx(ref, rel=1e-10)


def test_interference_penalty_quartic_anchor():
    assert cov.interference_penalty(1.0, 4.0) == pytest.approx(math.pi / 4, rel=1e-12)
    with pytest.raises(ValueError):
        cov.interference_penalty(0.0, 4.0)
    with pytest.raises(ValueError):
        cov.interference_penalty(1.0, 2.0)


def test_mobile_limit_anchor_and_threshold_limit():
    assert cov.jcp_mobile_limit(1.0, 4.0) == pytest.approx(_MOBILE_UNIT_REF, rel=1e-12)
    assert cov.jcp_mobile_limit(1e-9, 4.0) > 1.0 - 1e-8
    assert cov.jcp_mobile_limit(1e9, 4.0) < 1e-8


# ----------------------------------------------------------------- static jcp

def test_static_anchor_bracketing_threshold_limit():
    s = cov.jcp_static(1.0, 4.0)
    assert s == pytest.approx(_STATIC_UNIT_REF, rel=1e-9)
    single_slot = 1.0 / (1.0 + math.pi / 4)
    assert cov.jcp_mobile_limit(1.0, 4.0) < s < single_slot
    assert cov.jcp_static(1e-9, 4.0) > 1.0 - 1e-7


def test_static_hypergeometric_identity():
    # 1/jcp_static should match 2F1(2, -2/a; 1 - 2/a; -T); summed through the
    # z/(z-1) transform the series is geometric for any T < 1
    def inverse_series(T, alpha):
        x = T / (1.0 + T)
        c = 1.0 - 2.0 / alpha
        term = 1.0
        acc = 1.0
        for k in range(1, 500):
            term *= (k + 1.0) * x / (c + k - 1.0)
            acc += term
            if abs(term) < 1e-17 * abs(acc):
                break
        return acc / (1.0 + T) ** 2

    for T, alpha in ((0.5, 4.0), (0.9, 3.2), (0.2, 2.6), (0.05, 5.5)):
        assert cov.jcp_static(T, alpha) \
            == pytest.approx(1.0 / inverse_series(T, alpha), rel=1e-6)


# ------------------------------------------------------- exclusion exponent

def test_exclusion_exponent_anchors():
    for c, rs, r1, v, T, alpha, ref in _EXPONENT_ANCHORS:
        assert cov._exclusion_exponent(c, rs, r1, v, T, alpha) \
            == pytest.approx(ref, rel=1e-5)


def test_exclusion_exponent_static_reduction():
    # at v = 0 with r1 = c = rs = s both exclusions coincide and the plane
    # integral collapses to 2 pi s^2 kappa with the same kappa as jcp_static
    rng = np.random.default_rng(7)
    for _ in range(4):
        s = 10 ** rng.uniform(-0.7, 0.7)
        T = 10 ** rng.uniform(-0.8, 0.8)
        alpha = rng.uniform(3.0, 6.0)

        def band(t, T=T, alpha=alpha):
            p = t ** alpha / (t ** alpha + T)
            return (1.0 - p * p) * t

        cutoff = max(10.0, (1e14 * T) ** (1.0 / alpha))
        kappa = integrate.quad(band, 1.0, cutoff, epsabs=1e-12, epsrel=1e-10,
                               limit=300)[0]
        kappa += 2.0 * T * cutoff ** (2.0 - alpha) / (alpha - 2.0)
        got = cov._exclusion_exponent(s, s, s, 0.0, T, alpha)
        assert got == pytest.approx(2.0 * math.pi * s * s * kappa, rel=1e-7)


def test_exclusion_exponent_full_plane_limit():
    # no exclusion disk and a vanishing slot-1 serving distance leave the
    # closed full-plane integral of the slot-2 failure factor
    for rs, v, T, alpha in ((1.3, 0.7, 1.0, 4.0), (0.4, 2.0, 3.0, 3.1)):
        a = 2.0 / alpha
        ref = 2.0 * math.pi * rs * rs * (T ** a / alpha) * special.beta(a, 1.0 - a)
        got = cov._exclusion_exponent(0.0, rs, 1e-12, v, T, alpha)
        assert got == pytest.approx(ref, rel=1e-9)


def test_exclusion_exponent_swallowed_disk_is_free():
    # for c <= r1 - v the slot-2 disk sits inside C1, so E cannot depend on c
    ref = cov._exclusion_exponent(0.5, 1.1, 1.3, 0.8, 1.7, 4.2)
    for c in (0.0, 0.1, 0.3, 0.499):
        assert cov._exclusion_exponent(c, 1.1, 1.3, 0.8, 1.7, 4.2) \
            == pytest.approx(ref, rel=1e-9)


def test_exclusion_exponent_concentric_annulus():
    # v = 0 with c < r1: everything is radial
    T, alpha, rs, r1, c = 1.5, 4.0, 0.7, 1.0, 0.3

    def band(r):
        p1 = r ** alpha / (r ** alpha + T * r1 ** alpha)
        p2 = r ** alpha / (r ** alpha + T * rs ** alpha)
        return (1.0 - p1 * p2) * r

    ref = 2.0 * math.pi * integrate.quad(band, r1, np.inf, epsabs=1e-12,
                                         epsrel=1e-10, limit=400)[0]
    assert cov._exclusion_exponent(c, rs, r1, 0.0, T, alpha) \
        == pytest.approx(ref, rel=1e-9)


def test_exclusion_exponent_vector_consistent():
    c = np.array([[0.3, 0.9, 1.4], [0.05, 0.6, 2.0]])
    rs = c + 0.1
    out = cov._exclusion_exponent(c, rs, 0.8, 1.1, 1.5, 4.2)
    assert out.shape == c.shape
    for i in range(c.shape[0]):
        for j in range(c.shape[1]):
            scalar = cov._exclusion_exponent(float(c[i, j]), float(rs[i, j]),
                                             0.8, 1.1, 1.5, 4.2)
            assert out[i, j] == pytest.approx(scalar, rel=1e-13)


# ------------------------------------------------------------- arc integral

def test_b1_arc_integral_anchors():
    for r1, r2, v, T, alpha, ref in _B1_ANCHORS:
        assert cov.b1_arc_integral(r1, r2, v, T, alpha) \
            == pytest.approx(ref, rel=1e-6)


def test_b1_arc_integral_degenerate_cases():
    # slot-1 disk engulfed by the exclusion
    assert cov.b1_arc_integral(0.3, 1.0, 0.2, 1.0, 4.0) == 0.0
    # vanishing slot-1 disk
    assert cov.b1_arc_integral(1e-7, 0.5, 1.0, 1.0, 4.0) < 1e-12


def test_b1_arc_integral_membership_oracle():
    # same region integrated with a scanned membership predicate
    cases = [
        (0.9, 0.5, 1.1, 1.0, 4.0),   # proper intersection
        (0.6, 0.3, 1.2, 0.7, 3.5),   # disjoint disks
    ]
    for r1, r2, v, T, alpha in cases:
        def member(r, g, r1=r1, v=v):
            return r * r + v * v - 2.0 * r * v * math.cos(g) <= r1 * r1

        def f(r, g, r1=r1, r2=r2, v=v, T=T, alpha=alpha):
            return cov.integrand_f2(r1, r2, r, g, v, T, alpha)

        region = PolarRegion(r_lo=max(r2, v - r1), r_hi=v + r1,
                             gamma_lo=0.0, gamma_hi=math.pi, member=member)
        ref = 2.0 * integrate_polar_region(f, region).value
        assert cov.b1_arc_integral(r1, r2, v, T, alpha) \
            == pytest.approx(ref, rel=1e-4)


# --------------------------------------------------------- query validation

def test_query_validation():
    with pytest.raises(ValueError):
        _query(-0.5)
    with pytest.raises(ValueError):
        cov.CoverageQuery(params=NetworkParams(intensity=1.0, epsilon=1.0),
                          v=1.0, threshold=SirThreshold(1.0),
                          strategy=cov.Strategy.CONVENTIONAL)
    with pytest.raises(ValueError):
        _query(1.0, strategy=cov.Strategy.STATIC_CLOSED_FORM)
    with pytest.raises(ValueError):
        cov.jcp_skip(_query(1.0, strategy=cov.Strategy.CONVENTIONAL))
    with pytest.raises(ValueError):
        cov.jcp_total(_query(1.0, strategy=cov.Strategy.SKIP))
    with pytest.raises(ValueError):
        cov.jcp_handoff(_query(1.0, strategy=cov.Strategy.SKIP))


# ------------------------------------------------------------- fixed points

def test_zero_displacement_collapses_to_static():
    static = cov.jcp_static(1.0, 4.0)
    skip = cov.jcp_skip(_query(0.0, strategy=cov.Strategy.SKIP))
    assert skip.joint == pytest.approx(static, rel=1e-7)
    assert skip.components is None

    total = cov.jcp_total(_query(0.0))
    assert total.joint == pytest.approx(static, rel=1e-7)
    assert total.components.handoff == 0.0
    assert total.components.no_handoff == total.joint


def test_zero_displacement_intensity_free():
    # the static value survives the full v = 0 machinery at any intensity
    static = cov.jcp_static(1.0, 4.0)
    for lam in (0.5, 2.0):
        got = cov.jcp_total(_query(0.0, lam=lam)).joint
        assert got == pytest.approx(static, rel=1e-6)


def test_components_sum_exactly():
    q = _query(0.7, spec=_LOOSE)
    res = cov.jcp_total(q)
    assert res.joint == res.components.no_handoff + res.components.handoff
    assert 0.0 <= res.components.no_handoff <= 1.0
    assert 0.0 <= res.components.handoff <= 1.0
    assert 0.0 <= res.joint <= 1.0
    assert res.err_est >= 0.0
    assert cov.jcp_no_handoff(q) == res.components.no_handoff
    assert cov.jcp_handoff(q) == res.components.handoff


def test_large_displacement_approaches_mobile_limit():
    got = cov.jcp_total(_query(20.0, spec=_LOOSE)).joint
    assert got == pytest.approx(cov.jcp_mobile_limit(1.0, 4.0), abs=1e-2)


def test_threshold_to_zero_limits():
    # at T -> 0 both slots are always covered, so the components converge on
    # the handoff split and the totals on 1
    res = cov.jcp_total(_query(1.0, db=-60.0, spec=_LOOSE))
    marginal = handoff_probability_marginal(1.0, 1.0)
    assert res.joint > 0.99
    assert res.components.handoff == pytest.approx(marginal, abs=5e-3)

    skip = cov.jcp_skip(_query(1.0, db=-60.0, strategy=cov.Strategy.SKIP,
                               spec=_LOOSE))
    assert skip.joint > 0.99


def test_threshold_monotone():
    dbs = (-10.0, -5.0, 0.0, 5.0, 10.0)
    skips = [cov.jcp_skip(_query(0.8, db=db, strategy=cov.Strategy.SKIP,
                                 spec=_LOOSE)).joint for db in dbs]
    totals = [cov.jcp_total(_query(0.8, db=db, spec=_LOOSE)) for db in dbs]
    for seq in (skips,
                [t.joint for t in totals],
                [t.components.no_handoff for t in totals],
                [t.components.handoff for t in totals]):
        for lo, hi in zip(seq[1:], seq[:-1]):
            assert lo <= hi + 1e-3


def test_displacement_scale_invariance():
    # jcp(lam, v) = jcp(k lam, v / sqrt(k)): the geometry carries no scale
    ref = cov.jcp_total(_query(1.0)).joint
    for k in (4.0, 9.0):
        got = cov.jcp_total(_query(1.0 / math.sqrt(k), lam=k)).joint
        assert got == pytest.approx(ref, rel=1e-4)


def test_skip_never_beats_conventional():
    for v in (0.5, 1.5):
        skip = cov.jcp_skip(_query(v, strategy=cov.Strategy.SKIP, spec=_LOOSE))
        total = cov.jcp_total(_query(v, spec=_LOOSE))
        slack = 2.0 * (skip.err_est + total.err_est) + 2e-4
        assert skip.joint <= total.joint + slack
