"""Monte Carlo oracle for the two-location experiment.

Replays the scenario literally: drop a Poisson field in a disk window around
the second location, associate each location with its closest point, draw
fresh unit-mean exponential fading per link and per slot, and read off the
interference sums and SIRs for both handoff strategies.  Nothing here shares
numerical machinery with the analytic modules, so agreement is evidence.

Determinism contract: every estimate is built from a fixed number of
statistical batches, each driven by its own counter-derived substream
(SeedSequence spawn keys off the user seed).  Workers only parallelize over
batches and results are reduced in batch order, so a fixed seed gives
bit-identical output at any worker count.

Positions and fading are drawn in float32 and reduced with float64
accumulators; the serving term is subtracted as the exact float32 product
that entered the sum, so interference stays non-negative.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic_coverage import Strategy
from .core_model import NetworkParams, SirThreshold

__all__ = [
    "SimWindow",
    "TrialRecord",
    "TrialArrays",
    "EstimateWithCI",
    "sample_ppp",
    "run_trial",
    "trial_statistics",
    "estimate_jcp",
    "estimate_jcp_pair",
    "estimate_corr",
    "jcp_truncation_shift",
    "corr_truncation_shift",
]

_LOG = logging.getLogger(__name__)

_Z95 = 1.959963984540054
_N_BATCHES = 32
# target elements per rectangular (trials, points) chunk
_CHUNK_ELEMS = 2_500_000.0


@dataclass(frozen=True)
class SimWindow:
    """Disk of BS candidates around the second location.

    The plane is infinite; the window is not.  The default radius keeps the
    expected point count at or above 500 and leaves a wide interference
    margin around both locations, which bounds the truncated-tail bias well
    below the Monte Carlo noise at the intended trial counts.
    """

    radius: float
    guard_factor: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("window radius must be positive")

    @classmethod
    def for_scenario(cls, intensity: float, v: float,
                     guard_factor: float = 1.0) -> "SimWindow":
        # the 30/sqrt(lambda) margin keeps the truncated-tail bias on
        # coverage estimates an order of magnitude under the CI at 1e6 trials
        base = max(10.0 * (v + 0.5 / math.sqrt(intensity)),
                   math.sqrt(500.0 / (intensity * math.pi)),
                   v + 30.0 / math.sqrt(intensity))
        return cls(radius=guard_factor * base, guard_factor=guard_factor)

    def check(self, intensity: float, v: float) -> None:
        if not self.radius > v + 3.0 / math.sqrt(intensity):
            raise ValueError("window too small: the first location needs a "
                             "3/sqrt(lambda) margin")
        if intensity * math.pi * self.radius ** 2 < 100.0:
            raise ValueError("window too small: expected point count < 100")


@dataclass(frozen=True)
class TrialRecord:
    """One replay of the experiment.  SIRs are threshold-free ratios."""

    r1: float
    r2: float
    r12: float
    handoff: bool
    i1: float
    i2: float
    sir1: float
    sir2_conventional: float
    sir2_skip: float


@dataclass(frozen=True)
class TrialArrays:
    """Column view of many trials (the bulk analogue of TrialRecord)."""

    r1: np.ndarray
    r2: np.ndarray
    r12: np.ndarray
    handoff: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    sir1: np.ndarray
    sir2_conventional: np.ndarray
    sir2_skip: np.ndarray


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    half_width_95: float
    n_trials: int
    seed: int


def sample_ppp(intensity: float, window: SimWindow,
               rng: np.random.Generator) -> np.ndarray:
    """One realization: (n, 2) positions i.i.d. uniform on the disk with
    n ~ Poisson(intensity * area)."""
    n = rng.poisson(intensity * math.pi * window.radius ** 2)
    radii = window.radius * np.sqrt(rng.random(n))
    ang = 2.0 * math.pi * rng.random(n)
    return np.column_stack([radii * np.cos(ang), radii * np.sin(ang)])


def _batch_seed(seed: int, idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(idx,))
    return np.random.Generator(np.random.PCG64(ss))


def _batch_sizes(n_trials: int, n_batches: int):
    base, extra = divmod(n_trials, n_batches)
    return [base + 1] * extra + [base] * (n_batches - extra)


def _chunk_len(intensity: float, radius: float) -> int:
    expected = intensity * math.pi * radius ** 2
    return max(1, int(_CHUNK_ELEMS / (expected + 5.0 * math.sqrt(expected))))


def _run_batches(fn, n_batches: int, workers: int):
    if workers <= 1:
        return [fn(i) for i in range(n_batches)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_batches)))


def _draw_field(rng, n, m, counts, radius):
    live = np.arange(m)[None, :] < counts[:, None]
    u = rng.random((n, m), dtype=np.float32)
    # 1 - u keeps the radius strictly positive
    radii = np.float32(radius) * np.sqrt(np.float32(1.0) - u)
    ang = np.float32(2.0 * math.pi) * rng.random((n, m), dtype=np.float32)
    x = radii * np.cos(ang)
    y = radii * np.sin(ang)
    dead = ~live
    x[dead] = np.float32(np.inf)
    y[dead] = np.float32(0.0)
    return x, y


def _counts(rng, n, intensity, radius):
    mean = intensity * math.pi * radius ** 2
    counts = rng.poisson(mean, size=n)
    while np.any(counts == 0):
        # probability e^(-mean) <= e^(-100); kept for the contract
        zero = counts == 0
        _LOG.warning("resampled %d empty windows", int(zero.sum()))
        counts[zero] = rng.poisson(mean, size=int(zero.sum()))
    return counts


def _reduce_two_slots(x, y, h1, h2, v, eps, half_alpha) -> TrialArrays:
    """Shared-field reduction: both slots see the same points, each with
    its own fading draw."""
    rows = np.arange(x.shape[0])
    d1sq = (x + np.float32(v)) ** 2 + y * y
    d2sq = x * x + y * y
    i1_idx = np.argmin(d1sq, axis=1)
    i2_idx = np.argmin(d2sq, axis=1)
    g1 = 1.0 / (eps + d1sq ** half_alpha)
    g2 = 1.0 / (eps + d2sq ** half_alpha)

    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = h1 * g1
        tot1 = p1.sum(axis=1, dtype=np.float64)
        s1 = p1[rows, i1_idx].astype(np.float64)
        sir1 = s1 / (tot1 - s1)

        p2 = h2 * g2
        tot2 = p2.sum(axis=1, dtype=np.float64)
        s2 = p2[rows, i2_idx].astype(np.float64)
        sir2_conv = s2 / (tot2 - s2)
        s2s = p2[rows, i1_idx].astype(np.float64)
        sir2_skip = s2s / (tot2 - s2s)

    r2 = np.sqrt(d2sq[rows, i2_idx].astype(np.float64))
    r12 = np.sqrt(d2sq[rows, i1_idx].astype(np.float64))
    return TrialArrays(
        r1=np.sqrt(d1sq[rows, i1_idx].astype(np.float64)),
        r2=r2, r12=r12,
        handoff=r2 < r12,
        i1=tot1 - s1,
        i2=tot2 - s2,
        sir1=sir1,
        sir2_conventional=sir2_conv,
        sir2_skip=sir2_skip,
    )


def _simulate_chunk(rng, n: int, params: NetworkParams, v: float,
                    radius: float, independent_fields: bool = False):
    """Vectorized replay of n trials; returns per-trial columns."""
    lam = params.intensity
    eps = np.float32(params.epsilon)
    half_alpha = np.float32(0.5 * params.alpha)

    counts = _counts(rng, n, lam, radius)
    m = int(counts.max())
    x, y = _draw_field(rng, n, m, counts, radius)
    h1 = rng.standard_exponential((n, m), dtype=np.float32)
    h2 = rng.standard_exponential((n, m), dtype=np.float32)
    first = _reduce_two_slots(x, y, h1, h2, v, eps, half_alpha)
    if not independent_fields:
        return first

    # diagnostic mode: the slot-2 realization is redrawn, so the true
    # correlation is zero; the skip columns fall back to the new field's
    # closest-to-l1 point
    counts_b = _counts(rng, n, lam, radius)
    m_b = int(counts_b.max())
    xb, yb = _draw_field(rng, n, m_b, counts_b, radius)
    h2b = rng.standard_exponential((n, m_b), dtype=np.float32)
    second = _reduce_two_slots(xb, yb, h2b, h2b, v, eps, half_alpha)
    return TrialArrays(
        r1=first.r1, r2=second.r2, r12=second.r12,
        handoff=second.handoff,
        i1=first.i1, i2=second.i2,
        sir1=first.sir1,
        sir2_conventional=second.sir2_conventional,
        sir2_skip=second.sir2_skip,
    )


def _nested_chunk(rng, n: int, params: NetworkParams, v: float,
                  r_inner: float, r_outer: float):
    """One set of draws on the wide window reduced twice: full, and with
    every point beyond r_inner removed.  Common randomness isolates the
    truncation effect from the Monte Carlo noise."""
    eps = np.float32(params.epsilon)
    half_alpha = np.float32(0.5 * params.alpha)
    counts = _counts(rng, n, params.intensity, r_outer)
    m = int(counts.max())
    x, y = _draw_field(rng, n, m, counts, r_outer)
    h1 = rng.standard_exponential((n, m), dtype=np.float32)
    h2 = rng.standard_exponential((n, m), dtype=np.float32)
    full = _reduce_two_slots(x, y, h1, h2, v, eps, half_alpha)
    far = x * x + y * y > np.float32(r_inner * r_inner)
    xi = np.where(far, np.float32(np.inf), x)
    yi = np.where(far, np.float32(0.0), y)
    inner = _reduce_two_slots(xi, yi, h1, h2, v, eps, half_alpha)
    return full, inner


def run_trial(params: NetworkParams, v: float,
              threshold: Optional[SirThreshold],
              rng: np.random.Generator,
              window: Optional[SimWindow] = None) -> TrialRecord:
    """Single-trial reference in plain float64.

    The record stores threshold-free SIR ratios, so the threshold argument
    only documents the experiment being replayed.
    """
    if v < 0:
        raise ValueError("v must be non-negative")
    window = window or SimWindow.for_scenario(params.intensity, v)
    window.check(params.intensity, v)

    pts = sample_ppp(params.intensity, window, rng)
    rejected = 0
    while pts.shape[0] == 0:
        rejected += 1
        pts = sample_ppp(params.intensity, window, rng)
    if rejected:
        _LOG.warning("rejected %d empty realizations", rejected)

    d1 = np.hypot(pts[:, 0] + v, pts[:, 1])
    d2 = np.hypot(pts[:, 0], pts[:, 1])
    i1 = int(np.argmin(d1))
    i2 = int(np.argmin(d2))
    g1 = 1.0 / (params.epsilon + d1 ** params.alpha)
    g2 = 1.0 / (params.epsilon + d2 ** params.alpha)
    h1 = rng.standard_exponential(pts.shape[0])
    h2 = rng.standard_exponential(pts.shape[0])

    p1 = h1 * g1
    p2 = h2 * g2
    interf1 = float(p1.sum() - p1[i1])
    interf2 = float(p2.sum() - p2[i2])
    interf2_skip = float(p2.sum() - p2[i1])
    with np.errstate(divide="ignore", invalid="ignore"):
        sir1 = p1[i1] / interf1
        sir2_conv = p2[i2] / interf2
        sir2_skip = p2[i1] / interf2_skip

    r2 = float(d2[i2])
    r12 = float(d2[i1])
    return TrialRecord(r1=float(d1[i1]), r2=r2, r12=r12,
                       handoff=bool(r2 < r12),
                       i1=interf1, i2=interf2,
                       sir1=float(sir1),
                       sir2_conventional=float(sir2_conv),
                       sir2_skip=float(sir2_skip))


def _validated_window(params, v, window):
    if v < 0:
        raise ValueError("v must be non-negative")
    window = window or SimWindow.for_scenario(params.intensity, v)
    window.check(params.intensity, v)
    return window


def trial_statistics(params: NetworkParams, v: float, n_trials: int,
                     seed: int, window: Optional[SimWindow] = None,
                     workers: int = 1) -> TrialArrays:
    """Bulk trial columns with the same batching and substreams as the
    estimators; rows come out in batch order, so a fixed seed is stable."""
    window = _validated_window(params, v, window)
    chunk = _chunk_len(params.intensity, window.radius)
    sizes = _batch_sizes(n_trials, _N_BATCHES)

    def one(idx):
        rng = _batch_seed(seed, idx)
        parts = []
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            parts.append(_simulate_chunk(rng, take, params, v, window.radius))
            left -= take
        return parts

    batches = _run_batches(one, _N_BATCHES, workers)
    cols = {}
    for name in TrialArrays.__dataclass_fields__:
        cols[name] = np.concatenate(
            [getattr(part, name) for parts in batches for part in parts])
    return TrialArrays(**cols)


def _pearson(mom):
    """Correlation from a (n, sx, sy, sxx, syy, sxy) tally; None when a
    margin is degenerate."""
    n, sx, sy, sxx, syy, sxy = mom
    vx = sxx - sx * sx / n
    vy = syy - sy * sy / n
    if vx <= 0.0 or vy <= 0.0:
        return None
    return (sxy - sx * sy / n) / math.sqrt(vx * vy)


def _binomial_half_width(k: int, n: int) -> float:
    p = k / n
    if min(p, 1.0 - p) < 5.0 / n:
        # Wilson score near the boundary
        z2 = _Z95 * _Z95
        denom = 1.0 + z2 / n
        return _Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return _Z95 * math.sqrt(p * (1.0 - p) / n)


def estimate_jcp(params: NetworkParams, v: float, threshold: SirThreshold,
                 strategy: Strategy, n_trials: int, seed: int,
                 window: Optional[SimWindow] = None,
                 workers: int = 1) -> EstimateWithCI:
    """Fraction of trials with both slots above the threshold under the
    given handoff strategy.

    Strategies share each trial's realization and fading (common random
    numbers), so skip-vs-conventional differences are paired.
    """
    if n_trials < 1000:
        raise ValueError("need at least 1000 trials")
    if strategy not in (Strategy.SKIP, Strategy.CONVENTIONAL):
        raise ValueError("simulation knows the skip and conventional "
                         "strategies only")
    window = _validated_window(params, v, window)
    T = threshold.linear
    chunk = _chunk_len(params.intensity, window.radius)
    sizes = _batch_sizes(n_trials, _N_BATCHES)
    use_skip = strategy is Strategy.SKIP

    def one(idx):
        rng = _batch_seed(seed, idx)
        hits = 0
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            out = _simulate_chunk(rng, take, params, v, window.radius)
            sir2 = out.sir2_skip if use_skip else out.sir2_conventional
            hits += int(np.count_nonzero((out.sir1 > T) & (sir2 > T)))
            left -= take
        return hits

    hits = sum(_run_batches(one, _N_BATCHES, workers))
    return EstimateWithCI(mean=hits / n_trials,
                          half_width_95=_binomial_half_width(hits, n_trials),
                          n_trials=n_trials, seed=seed)


def estimate_jcp_pair(params: NetworkParams, v: float,
                      threshold: SirThreshold, n_trials: int, seed: int,
                      window: Optional[SimWindow] = None,
                      workers: int = 1):
    """Both strategies from one simulation pass.

    The field and fading draws do not depend on the strategy, so this
    returns exactly what two estimate_jcp calls with the same seed would,
    at half the cost.  Keyed by Strategy.
    """
    if n_trials < 1000:
        raise ValueError("need at least 1000 trials")
    window = _validated_window(params, v, window)
    T = threshold.linear
    chunk = _chunk_len(params.intensity, window.radius)
    sizes = _batch_sizes(n_trials, _N_BATCHES)

    def one(idx):
        rng = _batch_seed(seed, idx)
        hits_skip = 0
        hits_conv = 0
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            out = _simulate_chunk(rng, take, params, v, window.radius)
            first = out.sir1 > T
            hits_skip += int(np.count_nonzero(first & (out.sir2_skip > T)))
            hits_conv += int(np.count_nonzero(first
                                              & (out.sir2_conventional > T)))
            left -= take
        return hits_skip, hits_conv

    parts = _run_batches(one, _N_BATCHES, workers)
    out = {}
    for strategy, hits in ((Strategy.SKIP, sum(p[0] for p in parts)),
                           (Strategy.CONVENTIONAL, sum(p[1] for p in parts))):
        out[strategy] = EstimateWithCI(
            mean=hits / n_trials,
            half_width_95=_binomial_half_width(hits, n_trials),
            n_trials=n_trials, seed=seed)
    return out


def jcp_truncation_shift(params: NetworkParams, v: float,
                         threshold: SirThreshold, strategy: Strategy,
                         n_trials: int, seed: int, guard_factor: float = 2.0,
                         window: Optional[SimWindow] = None,
                         workers: int = 1):
    """Window-sufficiency diagnostic for the coverage estimate.

    Simulates on a guard_factor-times-wider window and reduces every trial
    twice, with and without the points beyond the default radius.  Returns
    (absolute estimate shift, wide-window estimate); the shift is the
    truncation bias of the default window measured with common randomness,
    so it carries almost no Monte Carlo noise of its own.
    """
    if n_trials < 1000:
        raise ValueError("need at least 1000 trials")
    if strategy not in (Strategy.SKIP, Strategy.CONVENTIONAL):
        raise ValueError("simulation knows the skip and conventional "
                         "strategies only")
    inner_w = _validated_window(params, v, window)
    outer_r = guard_factor * inner_w.radius
    if not guard_factor > 1.0:
        raise ValueError("guard_factor must exceed 1")
    T = threshold.linear
    chunk = _chunk_len(params.intensity, outer_r)
    sizes = _batch_sizes(n_trials, _N_BATCHES)
    use_skip = strategy is Strategy.SKIP

    def one(idx):
        rng = _batch_seed(seed, idx)
        hits = np.zeros(2, dtype=np.int64)
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            pair = _nested_chunk(rng, take, params, v, inner_w.radius, outer_r)
            for k, out in enumerate(pair):
                sir2 = out.sir2_skip if use_skip else out.sir2_conventional
                hits[k] += np.count_nonzero((out.sir1 > T) & (sir2 > T))
            left -= take
        return hits

    hits = np.sum(_run_batches(one, _N_BATCHES, workers), axis=0)
    est = EstimateWithCI(mean=int(hits[0]) / n_trials,
                         half_width_95=_binomial_half_width(int(hits[0]),
                                                            n_trials),
                         n_trials=n_trials, seed=seed)
    return abs(int(hits[0]) - int(hits[1])) / n_trials, est


def corr_truncation_shift(params: NetworkParams, v: float, n_trials: int,
                          seed: int, guard_factor: float = 2.0,
                          window: Optional[SimWindow] = None,
                          workers: int = 1):
    """Window-sufficiency diagnostic for the correlation estimate; same
    construction as jcp_truncation_shift."""
    if not params.epsilon > 0:
        raise ValueError("the interference moments need epsilon > 0")
    if n_trials < 10_000:
        raise ValueError("need at least 10000 trials")
    inner_w = _validated_window(params, v, window)
    if not guard_factor > 1.0:
        raise ValueError("guard_factor must exceed 1")
    outer_r = guard_factor * inner_w.radius
    chunk = _chunk_len(params.intensity, outer_r)
    sizes = _batch_sizes(n_trials, _N_BATCHES)

    def one(idx):
        rng = _batch_seed(seed, idx)
        moments = np.zeros((2, 6))
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            pair = _nested_chunk(rng, take, params, v, inner_w.radius, outer_r)
            for k, out in enumerate(pair):
                x, y = out.i1, out.i2
                moments[k] += (take, x.sum(), y.sum(), x @ x, y @ y, x @ y)
            left -= take
        return moments

    batches = _run_batches(one, _N_BATCHES, workers)
    totals = np.sum(batches, axis=0)
    full = _pearson(totals[0])
    inner = _pearson(totals[1])
    if full is None or inner is None:
        raise ValueError("degenerate sample: zero interference variance")
    per_batch = [_pearson(mom[0]) for mom in batches]
    good = [r for r in per_batch if r is not None]
    spread = float(np.std(good, ddof=1)) if len(good) > 1 else float("inf")
    est = EstimateWithCI(mean=float(full),
                         half_width_95=_Z95 * spread / math.sqrt(len(good)),
                         n_trials=n_trials, seed=seed)
    return abs(full - inner), est


def estimate_corr(params: NetworkParams, v: float, n_trials: int, seed: int,
                  window: Optional[SimWindow] = None, workers: int = 1,
                  independent_fields: bool = False) -> EstimateWithCI:
    """Pearson correlation of the two cellular interference sums.

    The mean is the pooled coefficient over all trials; the confidence
    interval comes from batch means.  independent_fields redraws the slot-2
    realization, a diagnostic whose true coefficient is zero.
    """
    if not params.epsilon > 0:
        raise ValueError("the interference moments need epsilon > 0")
    if n_trials < 10_000:
        raise ValueError("need at least 10000 trials")
    window = _validated_window(params, v, window)
    chunk = _chunk_len(params.intensity, window.radius)
    sizes = _batch_sizes(n_trials, _N_BATCHES)

    def one(idx):
        rng = _batch_seed(seed, idx)
        moments = np.zeros(6)  # n, sx, sy, sxx, syy, sxy
        left = sizes[idx]
        while left > 0:
            take = min(chunk, left)
            out = _simulate_chunk(rng, take, params, v, window.radius,
                                  independent_fields=independent_fields)
            x, y = out.i1, out.i2
            moments += (take, x.sum(), y.sum(), x @ x, y @ y, x @ y)
            left -= take
        return moments

    batches = _run_batches(one, _N_BATCHES, workers)
    pooled = _pearson(np.sum(batches, axis=0))
    if pooled is None:
        raise ValueError("degenerate sample: zero interference variance")
    per_batch = [_pearson(mom) for mom in batches]
    good = [r for r in per_batch if r is not None]
    if len(good) < len(per_batch):
        _LOG.warning("flagged %d zero-variance batches",
                     len(per_batch) - len(good))
    spread = float(np.std(good, ddof=1)) if len(good) > 1 else float("inf")
    return EstimateWithCI(mean=float(pooled),
                          half_width_95=_Z95 * spread / math.sqrt(len(good)),
                          n_trials=n_trials, seed=seed)
