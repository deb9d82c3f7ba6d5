"""Command-line front end: parameter sweeps to CSV, figure presets, and a
self-check report.

Sweeps write one RFC-4180 CSV row per grid point per method, in a fixed
grid order, with floats rendered by shortest round-trip formatting so the
artifacts diff cleanly.  A small matplotlib companion script is emitted
next to every CSV; plotting never happens in-process.  Monte Carlo points
get per-point seeds derived from the master seed and the point index, so
the output is bit-identical for any worker count.
"""

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .analytic_correlation import corr_coefficient, temporal_corr_coefficient
from .analytic_coverage import (CoverageQuery, Strategy, interference_penalty,
                                jcp_mobile_limit, jcp_skip, jcp_static,
                                jcp_total)
from .core_model import NetworkParams, SirThreshold
from .geometry import handoff_probability_marginal
from .quadrature import QuadratureSpec
from . import mc_engine as mc

DEFAULT_SEED = 1729

_QUANTITIES = ("corr", "temporal-corr", "jcp", "handoff")
_METHODS = ("analytic", "mc", "both")
_STRATEGIES = ("conventional", "skip", "both")

_COLUMNS = ("quantity", "method", "v", "lambda", "epsilon", "alpha",
            "threshold_db", "value", "ci_half_width", "err_est",
            "n_trials", "seed", "warning")


@dataclass(frozen=True)
class SweepConfig:
    quantity: str
    method: str = "analytic"
    v_grid: Tuple[float, ...] = (0.0,)
    lambda_grid: Tuple[float, ...] = (1.0,)
    epsilon_grid: Tuple[float, ...] = ()
    alpha_grid: Tuple[float, ...] = (4.0,)
    threshold_db_grid: Tuple[float, ...] = (0.0,)
    strategy: str = "conventional"
    trials: Optional[int] = None
    seed: int = DEFAULT_SEED
    out: str = "sweep.csv"
    rel_tol: float = 1e-4
    abs_tol: float = 1e-7
    workers: int = 1


def validate_config(config: SweepConfig) -> None:
    """Raise ValueError naming the offending field on any bad combination."""
    if config.quantity not in _QUANTITIES:
        raise ValueError(f"quantity: must be one of {', '.join(_QUANTITIES)}")
    if config.method not in _METHODS:
        raise ValueError(f"method: must be one of {', '.join(_METHODS)}")
    if config.strategy not in _STRATEGIES:
        raise ValueError(f"strategy: must be one of {', '.join(_STRATEGIES)}")
    if config.strategy != "conventional" and config.quantity != "jcp":
        raise ValueError("strategy: only the jcp quantity has strategies")
    for name, grid in (("v", config.v_grid), ("lambda", config.lambda_grid),
                       ("epsilon", config.epsilon_grid),
                       ("alpha", config.alpha_grid),
                       ("threshold-db", config.threshold_db_grid)):
        if not grid:
            raise ValueError(f"{name}: grid is empty")
    if config.method in ("mc", "both") and config.trials is None:
        raise ValueError("trials: required when the method includes mc")
    if config.quantity == "jcp" and any(e != 0.0 for e in config.epsilon_grid):
        raise ValueError("epsilon: joint coverage requires epsilon = 0")
    if config.quantity in ("corr", "temporal-corr") \
            and any(e <= 0.0 for e in config.epsilon_grid):
        raise ValueError("epsilon: correlation requires epsilon > 0")
    if config.quantity == "temporal-corr" and any(v != 0.0
                                                  for v in config.v_grid):
        raise ValueError("v: temporal-corr is defined at v = 0")
    if any(v < 0 for v in config.v_grid):
        raise ValueError("v: displacements must be non-negative")
    if any(l <= 0 for l in config.lambda_grid):
        raise ValueError("lambda: intensities must be positive")
    if any(a <= 2 for a in config.alpha_grid):
        raise ValueError("alpha: path-loss exponent must exceed 2")
    if config.workers < 1:
        raise ValueError("workers: must be at least 1")


def parse_grid(text: str, field: str) -> Tuple[float, ...]:
    """A single value, a comma list, or start:stop:step (both ends in)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + k * step, 12) for k in range(n))
        if "," in text:
            vals = tuple(float(p) for p in text.split(",") if p.strip())
            if not vals:
                raise ValueError
            return vals
        return (float(text),)
    except ValueError:
        raise ValueError(f"{field}: cannot parse grid {text!r} "
                         "(use a number, a comma list, or start:stop:step)")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _point_seed(master: int, idx: int) -> int:
    return int(np.random.SeedSequence((master, idx)).generate_state(1)[0])


def _binom_half(p: float, n: int) -> float:
    return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _row(pt, quantity, method, value, ci=None, err=None,
         n_trials=None, seed=None, warning="") -> Tuple[str, ...]:
    lam, eps, alpha, tdb, v = pt
    return (quantity, method, _fmt(v), _fmt(lam), _fmt(eps), _fmt(alpha),
            _fmt(tdb), _fmt(value), _fmt(ci), _fmt(err),
            "" if n_trials is None else str(n_trials),
            "" if seed is None else str(seed), warning)


def _tolerance_warning(value: float, err: float, spec: QuadratureSpec) -> str:
    if err > 2.0 * (spec.rel_tol * abs(value) + spec.abs_tol):
        return "unconverged"
    return ""


def _point_rows(config: SweepConfig, idx: int, pt) -> list:
    lam, eps, alpha, tdb, v = pt
    spec = QuadratureSpec(rel_tol=config.rel_tol, abs_tol=config.abs_tol)
    params = NetworkParams(intensity=lam, alpha=alpha, epsilon=eps)
    threshold = SirThreshold.from_db(tdb)
    seed_pt = _point_seed(config.seed, idx)
    methods = ("analytic", "mc") if config.method == "both" \
        else (config.method,)
    if config.quantity == "jcp":
        strategies = {"conventional": (Strategy.CONVENTIONAL,),
                      "skip": (Strategy.SKIP,),
                      "both": (Strategy.CONVENTIONAL, Strategy.SKIP)
                      }[config.strategy]
    rows = []
    for method in methods:
        if config.quantity == "corr":
            if method == "analytic":
                res = corr_coefficient(params, v, spec)
                rows.append(_row(pt, "corr", method, res.coefficient,
                                 err=res.err_est,
                                 warning=_tolerance_warning(
                                     res.coefficient, res.err_est, spec)))
            else:
                est = mc.estimate_corr(params, v, config.trials, seed=seed_pt)
                rows.append(_row(pt, "corr", method, est.mean,
                                 ci=est.half_width_95,
                                 n_trials=est.n_trials, seed=seed_pt))
        elif config.quantity == "temporal-corr":
            if method == "analytic":
                value = temporal_corr_coefficient(params, spec)
                rows.append(_row(pt, "temporal-corr", method, value,
                                 err=0.0))
            else:
                est = mc.estimate_corr(params, 0.0, config.trials,
                                       seed=seed_pt)
                rows.append(_row(pt, "temporal-corr", method,
                                 est.mean, ci=est.half_width_95,
                                 n_trials=est.n_trials, seed=seed_pt))
        elif config.quantity == "handoff":
            if method == "analytic":
                value = handoff_probability_marginal(v, lam, spec)
                rows.append(_row(pt, "handoff", method, value,
                                 err=0.0))
            else:
                stats = mc.trial_statistics(params, v, config.trials,
                                            seed=seed_pt)
                freq = float(np.mean(stats.handoff))
                rows.append(_row(pt, "handoff", method, freq,
                                 ci=_binom_half(freq, config.trials),
                                 n_trials=config.trials, seed=seed_pt))
        elif config.quantity == "jcp":
            labels = {Strategy.CONVENTIONAL: "jcp", Strategy.SKIP: "jcp-skip"}
            if method == "analytic":
                for strat in strategies:
                    query = CoverageQuery(params, v, threshold, strat, spec)
                    res = jcp_total(query) if strat is Strategy.CONVENTIONAL \
                        else jcp_skip(query)
                    rows.append(_row(pt, labels[strat], method,
                                     res.joint, err=res.err_est,
                                     warning=_tolerance_warning(
                                         res.joint, res.err_est, spec)))
            else:
                if len(strategies) == 2:
                    pair = mc.estimate_jcp_pair(params, v, threshold,
                                                config.trials, seed=seed_pt)
                    ests = [pair[s] for s in strategies]
                else:
                    ests = [mc.estimate_jcp(params, v, threshold,
                                            strategies[0], config.trials,
                                            seed=seed_pt)]
                for strat, est in zip(strategies, ests):
                    rows.append(_row(pt, labels[strat], method,
                                     est.mean, ci=est.half_width_95,
                                     n_trials=est.n_trials, seed=seed_pt))
    return rows


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Plot companion for __CSV__ (emitted by the sweep that wrote it)."""
import collections
import csv
import sys

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required to plot __CSV__")

with open("__CSV__", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))
if not rows:
    sys.exit("__CSV__ has no data rows")

xkey = "lambda" if rows[0]["quantity"] == "temporal-corr" else "v"
groups = collections.defaultdict(list)
for row in rows:
    groups[(row["quantity"], row["method"], row["epsilon"])].append(row)

fig, ax = plt.subplots(figsize=(7, 5))
many_eps = len({k[2] for k in groups}) > 1
for (quantity, method, eps), grp in sorted(groups.items()):
    xs = [float(r[xkey]) for r in grp]
    ys = [float(r["value"]) for r in grp]
    label = f"{quantity} ({method})"
    if many_eps:
        label += f", eps={eps}"
    if method == "mc":
        errs = [float(r["ci_half_width"] or 0.0) for r in grp]
        ax.errorbar(xs, ys, yerr=errs, fmt="o", capsize=3, label=label)
    else:
        ax.plot(xs, ys, label=label)
if xkey == "lambda":
    ax.set_xscale("log")
ax.set_xlabel(xkey)
ax.set_ylabel("value")
ax.grid(True, alpha=0.3)
ax.legend()
out = "__CSV__".rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)
'''


def run_sweep(config: SweepConfig) -> Path:
    """Evaluate the grid and write the CSV plus its plot companion.

    Rows appear in a fixed order: grid points nested as lambda, epsilon,
    alpha, threshold_db with v varying fastest, then analytic before mc,
    then conventional before skip.  Worker count never changes output.
    """
    validate_config(config)
    points = [(lam, eps, alpha, tdb, v)
              for lam in config.lambda_grid
              for eps in config.epsilon_grid
              for alpha in config.alpha_grid
              for tdb in config.threshold_db_grid
              for v in config.v_grid]
    if config.workers == 1:
        blocks = [_point_rows(config, i, pt) for i, pt in enumerate(points)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            blocks = list(pool.map(lambda a: _point_rows(config, *a),
                                   enumerate(points)))
    out = Path(config.out)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for block in blocks:
            writer.writerows(block)
    plot_path = out.with_name(out.stem + "_plot.py")
    plot_path.write_text(_PLOT_TEMPLATE.replace("__CSV__", out.name),
                         encoding="utf-8")
    return out


# figure presets: v in cells of 0.25 up to 3, the caption parameter sets
_PRESETS = {
    "fig3": SweepConfig(quantity="corr", method="analytic",
                        v_grid=parse_grid("0:3:0.25", "v"),
                        epsilon_grid=(0.5, 1.0, 2.0), out="fig3.csv"),
    "fig4": SweepConfig(quantity="temporal-corr", method="analytic",
                        lambda_grid=tuple(
                            float(x) for x in np.geomspace(1e-3, 1e3, 13)),
                        epsilon_grid=(1.0,), out="fig4.csv"),
    "fig5": SweepConfig(quantity="jcp", method="both",
                        v_grid=parse_grid("0:3:0.25", "v"),
                        epsilon_grid=(0.0,), trials=100_000, out="fig5.csv"),
    "fig6": SweepConfig(quantity="jcp", method="both", strategy="both",
                        v_grid=parse_grid("0:3:0.25", "v"),
                        epsilon_grid=(0.0,), trials=100_000, out="fig6.csv"),
}


class _Check:
    """One self-check line: name, the relation tested, what was observed."""

    def __init__(self):
        self.lines = []
        self.failures = 0

    def add(self, name: str, ok: bool, relation: str, observed: str):
        status = "PASS" if ok else "FAIL"
        if not ok:
            self.failures += 1
        self.lines.append(f"[{status}] {name:<28} {relation:<42} {observed}")


def run_validate(seed: int = DEFAULT_SEED, stream=None) -> int:
    """Reduced-scale invariant suite across all modules.

    Returns the number of failed checks (0 on a healthy build).  With a
    pinned seed the report is byte-identical across runs.
    """
    out = stream if stream is not None else sys.stdout
    spec = QuadratureSpec(rel_tol=1e-4, abs_tol=1e-7)
    rep = _Check()

    penalty = interference_penalty(1.0, 4.0)
    rep.add("penalty-quartic", abs(penalty - math.pi / 4) < 1e-10 * math.pi,
            "penalty(1,4) == pi/4", f"observed={penalty!r}")

    mobile = jcp_mobile_limit(1.0, 4.0)
    target = (1.0 / (1.0 + math.pi / 4)) ** 2
    rep.add("mobile-limit", abs(mobile - target) < 1e-9,
            "limit == (1/(1+pi/4))^2", f"observed={mobile!r}")

    static = jcp_static(1.0, 4.0)
    single = 1.0 / (1.0 + math.pi / 4)
    rep.add("static-bracket", mobile < static < single,
            "mobile < static < single-slot",
            f"observed={mobile:.6f} < {static:.6f} < {single:.6f}")

    params0 = NetworkParams(intensity=1.0, alpha=4.0, epsilon=0.0)
    t0 = SirThreshold.from_db(0.0)
    total0 = jcp_total(CoverageQuery(params0, 0.0, t0,
                                     Strategy.CONVENTIONAL, spec)).joint
    rep.add("static-consistency", abs(total0 - static) < 1e-3 * static,
            "jcp_total(v=0) == jcp_static", f"observed={total0:.6f}")

    params_small = NetworkParams(intensity=1.0, alpha=4.0, epsilon=1e-6)
    zeta_small = temporal_corr_coefficient(params_small, spec)
    rep.add("temporal-small-path", abs(zeta_small - 0.5) < 0.02,
            "|zeta(eps->0) - 0.5| < 0.02", f"observed={zeta_small:.6f}")

    params1 = NetworkParams(intensity=1.0, alpha=4.0, epsilon=1.0)
    zeta_mid = temporal_corr_coefficient(
        replace(params1, intensity=0.1), spec)
    zeta_lo = temporal_corr_coefficient(
        replace(params1, intensity=1e-3), spec)
    zeta_hi = temporal_corr_coefficient(
        replace(params1, intensity=1e3), spec)
    rep.add("temporal-bell", zeta_mid > zeta_lo + 0.05
            and zeta_mid > zeta_hi + 0.05,
            "interior density beats both extremes",
            f"observed={zeta_lo:.4f}|{zeta_mid:.4f}|{zeta_hi:.4f}")

    coef0 = corr_coefficient(params1, 0.0, spec).coefficient
    zeta1 = temporal_corr_coefficient(params1, spec)
    rep.add("corr-temporal-consistency", abs(coef0 - zeta1) < 1e-3,
            "corr(v=0) == temporal curve",
            f"observed={coef0:.6f} vs {zeta1:.6f}")

    coef_near = corr_coefficient(params1, 0.25, spec).coefficient
    coef_far = corr_coefficient(params1, 1.5, spec).coefficient
    rep.add("corr-decreasing", coef_near > coef_far + 0.05,
            "corr(0.25) > corr(1.5)",
            f"observed={coef_near:.4f} > {coef_far:.4f}")

    h_lo = handoff_probability_marginal(0.1, 1.0, spec)
    h_mid = handoff_probability_marginal(0.5, 1.0, spec)
    h_hi = handoff_probability_marginal(2.0, 1.0, spec)
    rep.add("handoff-monotone", 0.0 < h_lo < h_mid < h_hi < 1.0,
            "P(handoff) grows with v inside (0,1)",
            f"observed={h_lo:.4f}|{h_mid:.4f}|{h_hi:.4f}")

    stats = mc.trial_statistics(params0, 0.5, 20_000, seed=seed)
    r = np.sort(stats.r1)
    emp = np.arange(1, r.size + 1) / r.size
    sup = float(np.max(np.abs(emp - (1.0 - np.exp(-np.pi * r * r)))))
    rep.add("serving-law", sup < 0.02,
            "sup|empirical - Rayleigh law| < 0.02", f"observed={sup:.5f}")

    freq = float(np.mean(stats.handoff))
    half = _binom_half(freq, stats.handoff.size)
    rep.add("handoff-frequency", abs(freq - h_mid) < 2.0 * half,
            "simulated frequency matches marginal",
            f"observed={freq:.5f} vs {h_mid:.5f}")

    pair = mc.estimate_jcp_pair(params0, 0.8, t0, 20_000, seed=seed)
    conv_a = jcp_total(CoverageQuery(params0, 0.8, t0,
                                     Strategy.CONVENTIONAL, spec)).joint
    skip_a = jcp_skip(CoverageQuery(params0, 0.8, t0,
                                    Strategy.SKIP, spec)).joint
    conv_m = pair[Strategy.CONVENTIONAL].mean
    skip_m = pair[Strategy.SKIP].mean
    rep.add("mc-vs-analytic-conventional", abs(conv_m - conv_a) < 0.02,
            "|simulated - analytic| < 0.02",
            f"observed={conv_m:.5f} vs {conv_a:.5f}")
    rep.add("mc-vs-analytic-skip", abs(skip_m - skip_a) < 0.015,
            "|simulated - analytic| < 0.015",
            f"observed={skip_m:.5f} vs {skip_a:.5f}")

    once = mc.estimate_jcp(params0, 0.8, t0, Strategy.CONVENTIONAL,
                           5_000, seed=seed, workers=1)
    again = mc.estimate_jcp(params0, 0.8, t0, Strategy.CONVENTIONAL,
                            5_000, seed=seed, workers=4)
    rep.add("determinism", once == again,
            "same seed, any workers -> same result",
            f"observed={once.mean!r} vs {again.mean!r}")

    shift, est = mc.jcp_truncation_shift(params0, 0.5, t0,
                                         Strategy.CONVENTIONAL,
                                         5_000, seed=seed)
    rep.add("window-truncation", shift < est.half_width_95 / 2,
            "doubling the window moves < CI/2",
            f"observed={shift:.2e} vs {est.half_width_95 / 2:.2e}")

    print(f"self-check report (seed {seed})", file=out)
    for line in rep.lines:
        print(line, file=out)
    n = len(rep.lines)
    print(f"{n} checks, {rep.failures} failure(s)", file=out)
    return rep.failures


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"config: cannot read {path!r} ({exc})")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config: line {lineno} is not key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_GRID_KEYS = ("v", "lambda", "epsilon", "alpha", "threshold-db")


def _assemble_config(args, file_values: dict) -> SweepConfig:
    def pick(key, flag_value):
        return flag_value if flag_value is not None \
            else file_values.get(key)

    unknown = set(file_values) - {"quantity", "method", "strategy", "trials",
                                  "seed", "out", "rel-tol", "abs-tol",
                                  "workers", *_GRID_KEYS}
    if unknown:
        raise ValueError(f"config: unknown key {sorted(unknown)[0]!r}")

    quantity = pick("quantity", args.quantity)
    if quantity is None:
        raise ValueError("quantity: required (flag or config file)")

    grids = {}
    for key, attr in (("v", "v"), ("lambda", "lam"), ("epsilon", "epsilon"),
                      ("alpha", "alpha"), ("threshold-db", "threshold_db")):
        raw = pick(key, getattr(args, attr))
        grids[key] = parse_grid(raw, key) if raw is not None else None
    if grids["epsilon"] is None:
        grids["epsilon"] = (1.0,) if quantity in ("corr", "temporal-corr") \
            else (0.0,)

    trials = pick("trials", args.trials)
    seed = pick("seed", args.seed)
    workers = pick("workers", args.workers)
    rel_tol = pick("rel-tol", args.rel_tol)
    abs_tol = pick("abs-tol", args.abs_tol)
    try:
        return SweepConfig(
            quantity=quantity,
            method=pick("method", args.method) or "analytic",
            v_grid=grids["v"] or (0.0,),
            lambda_grid=grids["lambda"] or (1.0,),
            epsilon_grid=grids["epsilon"],
            alpha_grid=grids["alpha"] or (4.0,),
            threshold_db_grid=grids["threshold-db"] or (0.0,),
            strategy=pick("strategy", args.strategy) or "conventional",
            trials=None if trials is None else int(trials),
            seed=DEFAULT_SEED if seed is None else int(seed),
            out=pick("out", args.out) or "sweep.csv",
            rel_tol=1e-4 if rel_tol is None else float(rel_tol),
            abs_tol=1e-7 if abs_tol is None else float(abs_tol),
            workers=1 if workers is None else int(workers))
    except (TypeError, ValueError) as exc:
        raise ValueError(str(exc))


def _add_sweep_flags(sub):
    sub.add_argument("--quantity", choices=_QUANTITIES)
    sub.add_argument("--method", choices=_METHODS)
    sub.add_argument("--strategy", choices=_STRATEGIES)
    sub.add_argument("--v", help="single value, comma list, or "
                                 "start:stop:step")
    sub.add_argument("--lambda", dest="lam", help="intensity grid")
    sub.add_argument("--epsilon", help="path-loss smoothing grid")
    sub.add_argument("--alpha", help="path-loss exponent grid")
    sub.add_argument("--threshold-db", help="SIR threshold grid in dB")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--workers", type=int)
    sub.add_argument("--rel-tol", type=float)
    sub.add_argument("--abs-tol", type=float)
    sub.add_argument("--out")
    sub.add_argument("--config", help="flat key=value file; flags win")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellcorr",
        description="Interference correlation and joint coverage curves "
                    "for Poisson cellular networks.")
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("sweep", help="evaluate a parameter grid to CSV")
    _add_sweep_flags(sweep)

    val = subs.add_parser("validate", help="run the reduced-scale "
                                           "invariant suite")
    val.add_argument("--seed", type=int, default=DEFAULT_SEED)

    pre = subs.add_parser("preset", help="reproduce a figure's sweep")
    pre.add_argument("name", choices=sorted(_PRESETS))
    pre.add_argument("--trials", type=int)
    pre.add_argument("--seed", type=int)
    pre.add_argument("--workers", type=int)
    pre.add_argument("--rel-tol", type=float)
    pre.add_argument("--method", choices=_METHODS)
    pre.add_argument("--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            file_values = _read_config_file(args.config) if args.config \
                else {}
            config = _assemble_config(args, file_values)
            path = run_sweep(config)
            print(f"wrote {path}")
            return 0
        if args.command == "validate":
            return 1 if run_validate(seed=args.seed) else 0
        config = _PRESETS[args.name]
        for field in ("trials", "seed", "workers", "rel_tol", "method",
                      "out"):
            value = getattr(args, field)
            if value is not None:
                config = replace(config, **{field: value})
        path = run_sweep(config)
        print(f"wrote {path}")
        return 0
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
