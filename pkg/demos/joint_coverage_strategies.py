"""Joint coverage across a move: keep the old server or switch?

For a user observed at two positions a distance v apart, the joint
probability that both SIRs clear the threshold depends on the handoff
strategy.  Conventional operation switches to the closest point after
the move; skipping keeps the slot-1 server.  The script prints both
curves with their handoff split, plus the two closed-form anchors the
curve must respect: the static two-slot value at v = 0 and the
independent-slots limit as v grows.

The conventional curve is close to monotone but not exactly; it dips
slightly below its own large-v limit around v of one serving distance
before settling.  The skip curve collapses quickly since an unchanged
server becomes badly placed after a long move.
"""

import argparse

from cellcorr import (CoverageQuery, NetworkParams, QuadratureSpec,
                      SirThreshold, Strategy, jcp_mobile_limit, jcp_skip,
                      jcp_static, jcp_total)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threshold-db", type=float, default=0.0)
    ap.add_argument("--alpha", type=float, default=4.0)
    args = ap.parse_args()

    params = NetworkParams(intensity=1.0, alpha=args.alpha, epsilon=0.0)
    thr = SirThreshold.from_db(args.threshold_db)
    spec = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-8)

    static = jcp_static(thr.linear, args.alpha)
    mobile = jcp_mobile_limit(thr.linear, args.alpha)
    print(f"static anchor (v=0):      {static:.6f}")
    print(f"independent-slots limit:  {mobile:.6f}\n")

    print("    v   conventional   (stay + switch)      skip")
    for v in [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0]:
        conv = jcp_total(CoverageQuery(params, v, thr,
                                       Strategy.CONVENTIONAL, spec))
        skip = jcp_skip(CoverageQuery(params, v, thr, Strategy.SKIP, spec))
        c = conv.components
        print(f"{v:5.2f}   {conv.joint:.6f}   ({c.no_handoff:.6f} + "
              f"{c.handoff:.6f})   {skip.joint:.6f}")


if __name__ == "__main__":
    main()
