"""Adaptive quadrature shared by the analytic modules.

Thin wrappers around scipy.integrate.quad that add a uniform result record
with convergence flags, semi-infinite handling, polar-region integration
with a membership predicate, and nested expectations against the serving
distance and bearing laws.  Everything here is deterministic for a fixed
QuadratureSpec; the Monte Carlo engine never routes through this module so
the two stay independent checks on each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache as _lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as _integrate

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "DensitySpec",
    "PolarRegion",
    "integrate_1d",
    "integrate_polar_region",
    "expect",
    "rayleigh_serving",
    "uniform_angle",
    "conditional_r2",
    "gauss_legendre_nodes",
    "mapped_gauss_nodes",
]

_TWO_PI = 2.0 * math.pi

# exp(-40) ~ 4e-18: past this the serving-law mass is below double precision
_RAYLEIGH_UCUT = 40.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget knobs for the analytic integrals.

    truncation_policy selects how infinite upper limits are handled:
    "map-to-finite" substitutes r = a + t/(1-t) and integrates over the unit
    interval, "adaptive-tail-cutoff" extends the window geometrically until
    the last segment contributes less than 1e-2 * rel_tol of the running
    total.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_evals: int = 1_000_000
    truncation_policy: str = "map-to-finite"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evals < 100:
            raise ValueError("max_evals must be at least 100")
        if self.truncation_policy not in ("map-to-finite", "adaptive-tail-cutoff"):
            raise ValueError(f"unknown truncation policy {self.truncation_policy!r}")

    def tightened(self, factor: float = 20.0) -> "QuadratureSpec":
        """Spec for one nesting level further in; keeps the outer estimate honest."""
        return QuadratureSpec(self.rel_tol / factor, self.abs_tol / factor,
                              self.max_evals, self.truncation_policy)

    @property
    def subinterval_limit(self) -> int:
        # 21-point Gauss-Kronrod per subinterval
        return max(10, min(500, self.max_evals // 21))


@dataclass(frozen=True)
class IntegralResult:
    """Value plus the bookkeeping needed to trust (or distrust) it.

    err_est is the outermost-level error estimate; converged covers every
    nesting level.  Unconverged results are flagged, never raised.
    """

    value: float
    err_est: float
    converged: bool
    n_evals: int

    def __float__(self) -> float:
        return self.value


def _quad_finite(f, a, b, spec, points=None) -> IntegralResult:
    if points is not None:
        interior = sorted(p for p in points if a < p < b)
        points = interior or None
    out = _integrate.quad(f, a, b, full_output=1, epsabs=spec.abs_tol,
                          epsrel=spec.rel_tol, limit=spec.subinterval_limit,
                          points=points)
    value, err = out[0], out[1]
    info = out[2] if len(out) > 2 else {}
    return IntegralResult(value, err, len(out) <= 3, int(info.get("neval", 0)))


def _tail_cutoff(f, a, spec, points) -> IntegralResult:
    width = max(1.0, abs(a))
    lo = a
    total = err = 0.0
    nev = 0
    ok = True
    calm = 0
    for _ in range(64):
        seg = _quad_finite(f, lo, lo + width, spec, points=points)
        points = None
        total += seg.value
        err += seg.err_est
        nev += seg.n_evals
        ok = ok and seg.converged
        if abs(seg.value) <= 1e-2 * spec.rel_tol * abs(total) + spec.abs_tol:
            calm += 1
            if calm >= 2:
                return IntegralResult(total, err, ok, nev)
        else:
            calm = 0
        lo += width
        width *= 2.0
    return IntegralResult(total, err, False, nev)


def integrate_1d(f: Callable[[float], float], a: float, b: float,
                 spec: QuadratureSpec = QuadratureSpec(),
                 points: Optional[Sequence[float]] = None) -> IntegralResult:
    """Integral of f over (a, b); b may be math.inf.

    points lists interior abscissae where the integrand has sharp structure
    (kinks, near-singular knees); they are forwarded to the adaptive rule.
    """
    if math.isinf(b):
        if spec.truncation_policy == "map-to-finite":
            def mapped(t):
                w = 1.0 - t
                return f(a + t / w) / (w * w)
            mpts = None
            if points:
                mpts = [(p - a) / (1.0 + p - a) for p in points if p > a]
            return _quad_finite(mapped, 0.0, 1.0, spec, points=mpts)
        return _tail_cutoff(f, a, spec, points)
    return _quad_finite(f, a, b, spec, points=points)


@dataclass(frozen=True)
class PolarRegion:
    """Radial annulus crossed with a bearing window, optionally cut down by a
    membership predicate member(r, gamma) -> bool.

    The predicate is scanned on scan_points bearings per radius and each
    membership flip is refined by bisection, so angular features narrower
    than the scan spacing are invisible.
    """

    r_lo: float
    r_hi: float
    gamma_lo: float = 0.0
    gamma_hi: float = _TWO_PI
    member: Optional[Callable[[float, float], bool]] = None
    scan_points: int = 129

    def __post_init__(self):
        if self.r_lo < 0 or self.r_hi <= self.r_lo:
            raise ValueError("need 0 <= r_lo < r_hi")
        if self.gamma_hi <= self.gamma_lo:
            raise ValueError("empty bearing window")
        if self.scan_points < 9:
            raise ValueError("scan_points too coarse to locate boundaries")


def _member_intervals(region: PolarRegion, r: float):
    if region.member is None:
        return [(region.gamma_lo, region.gamma_hi)]
    grid = np.linspace(region.gamma_lo, region.gamma_hi, region.scan_points)
    inside = [bool(region.member(r, g)) for g in grid]
    if not any(inside):
        return []
    edges = []
    for i in range(len(grid) - 1):
        if inside[i] != inside[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            lo_in = inside[i]
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if bool(region.member(r, mid)) == lo_in:
                    lo = mid
                else:
                    hi = mid
            edges.append(0.5 * (lo + hi))
    bounds = [region.gamma_lo, *edges, region.gamma_hi]
    segments = []
    flag = inside[0]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if flag and hi > lo:
            segments.append((lo, hi))
        flag = not flag
    return segments


def integrate_polar_region(f: Callable[[float, float], float],
                           region: PolarRegion,
                           spec: QuadratureSpec = QuadratureSpec()) -> IntegralResult:
    """Area integral of f(r, gamma) * r over the region."""
    inner_spec = spec.tightened()
    tally = {"nev": 0, "ok": True}

    def ring(r):
        acc = 0.0
        for glo, ghi in _member_intervals(region, r):
            res = _quad_finite(lambda g: f(r, g), glo, ghi, inner_spec)
            acc += res.value
            tally["nev"] += res.n_evals
            tally["ok"] = tally["ok"] and res.converged
        return acc * r

    outer = integrate_1d(ring, region.r_lo, region.r_hi, spec)
    return IntegralResult(outer.value, outer.err_est,
                          outer.converged and tally["ok"],
                          outer.n_evals + tally["nev"])


@dataclass(frozen=True)
class DensitySpec:
    """Normalized weight for expect().

    pdf is the density in its native coordinate on [lo, hi].  mapped, when
    set, holds (push, weight, u_lo, u_hi, u_points): the expectation is then
    evaluated as the integral of f(push(u)) * weight(u) over the finite
    window, which burns off an exponential tail analytically.
    """

    kind: str
    lo: float
    hi: float
    pdf: Callable[[float], float]
    mapped: Optional[tuple] = None

    def integrate(self, f: Callable[[float], float],
                  spec: QuadratureSpec) -> IntegralResult:
        if self.mapped is not None:
            push, weight, ulo, uhi, upts = self.mapped
            return _quad_finite(lambda u: f(push(u)) * weight(u),
                                ulo, uhi, spec, points=upts)
        return integrate_1d(lambda x: f(x) * self.pdf(x), self.lo, self.hi, spec)


def rayleigh_serving(intensity: float, feature_radii: Sequence[float] = ()) -> DensitySpec:
    """Nearest-point distance law of a planar Poisson field of the given
    intensity: pdf 2*pi*intensity*r*exp(-pi*intensity*r^2) on r >= 0.

    feature_radii lists radii where integrands against this law have sharp
    structure (for instance the path-loss knee near epsilon**(1/alpha));
    they become interior breakpoints of the transformed integral.
    """
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    lam_pi = math.pi * intensity

    def pdf(r):
        return 2.0 * lam_pi * r * math.exp(-lam_pi * r * r)

    def push(u):
        return math.sqrt(u / lam_pi)

    def weight(u):
        return math.exp(-u)

    upts = tuple(sorted(lam_pi * r * r for r in feature_radii if r > 0)) or None
    return DensitySpec("rayleigh-serving", 0.0, math.inf, pdf,
                       mapped=(push, weight, 0.0, _RAYLEIGH_UCUT, upts))


def uniform_angle(lo: float = 0.0, hi: float = math.pi) -> DensitySpec:
    """Uniform bearing on [lo, hi]; the default window is the folded half turn."""
    if hi <= lo:
        raise ValueError("empty angle window")
    span = hi - lo
    return DensitySpec("uniform-angle", lo, hi, lambda x: 1.0 / span)


@_lru_cache(maxsize=32)
def gauss_legendre_nodes(n: int):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def mapped_gauss_nodes(lo, hi, n: int):
    """Gauss-Legendre nodes pushed through r = m + h sin(pi s / 2).

    The cosine weight vanishes at both interval ends, which soaks up the
    square-root behavior that disk-overlap angles and conditional serving
    densities have at tangency radii.  lo and hi may be arrays; nodes
    broadcast along a new trailing axis.
    """
    s, w = gauss_legendre_nodes(n)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m = 0.5 * (hi + lo)[..., None]
    h = 0.5 * (hi - lo)[..., None]
    r = m + h * np.sin(0.5 * math.pi * s)
    wr = h * (0.5 * math.pi) * np.cos(0.5 * math.pi * s) * w
    return r, wr


def conditional_r2(geom, intensity: float) -> DensitySpec:
    """Law of the post-move serving distance given a serving-point change,
    for the displacement geometry geom.  Supported on [geom.z1, geom.r12].
    """
    from . import geometry as _geometry

    def pdf(r2):
        return _geometry.r2_conditional_pdf(r2, geom, intensity)

    return DensitySpec("conditional-r2", geom.z1, geom.r12, pdf)


def expect(f: Callable[..., float], density, spec: QuadratureSpec = QuadratureSpec()) -> IntegralResult:
    """Nested expectation of f against a product of densities.

    density is one DensitySpec or a sequence ordered outermost first; an
    entry may also be a callable taking the outer coordinates and returning
    the conditional DensitySpec for its level.  f takes the coordinates in
    the same outermost-first order.  Each level inward runs at 20x tighter
    tolerance so the outer adaptive rule sees a smooth integrand.
    """
    chain = (density,) if isinstance(density, DensitySpec) else tuple(density)
    if not chain:
        raise ValueError("need at least one density")
    specs = [spec]
    for _ in chain[1:]:
        specs.append(specs[-1].tightened())
    tally = {"nev": 0, "ok": True, "err": 0.0}
    last = len(chain) - 1

    def level(k, args):
        d = chain[k]
        if not isinstance(d, DensitySpec):
            d = d(*args)
        if k == last:
            def g(x):
                return f(*args, x)
        else:
            def g(x):
                return level(k + 1, args + (x,))
        res = d.integrate(g, specs[k])
        tally["nev"] += res.n_evals
        tally["ok"] = tally["ok"] and res.converged
        if k == 0:
            tally["err"] = res.err_est
        return res.value

    value = level(0, ())
    return IntegralResult(value, tally["err"], tally["ok"], tally["nev"])
