"""The geometry that drives handoffs, in numbers.

Walks one displacement scenario end to end: the overlap classification
of the two exclusion disks, the handoff region's area, the handoff
probability (conditional and marginal), and quantiles of the new
serving distance when a handoff does occur.  Then sweeps v to show the
marginal handoff probability climbing from 0 to 1.
"""

import math

from scipy.optimize import brentq

from cellcorr import (DisplacementGeometry, classify_overlap,
                      handoff_probability, handoff_probability_marginal,
                      handoff_region_area, r2_conditional_cdf)


def main():
    lam = 1.0
    geom = DisplacementGeometry(v=0.8, theta=math.pi / 3, r1=0.6)
    print(f"scenario: r1={geom.r1}, v={geom.v}, theta=pi/3")
    print(f"  slot-2 to old server:  r12 = {geom.r12:.6f}")
    print(f"  inner clearance:       z1  = {geom.z1:.6f}")
    print(f"  disk overlap case:     "
          f"{classify_overlap(geom.r1, geom.r12, geom.v).name}")
    print(f"  handoff region area:   {handoff_region_area(geom):.6f}")
    print(f"  P(handoff | scenario): "
          f"{handoff_probability(geom, lam):.6f}")

    print("\n  new-server distance quantiles given a handoff:")
    for q in (0.1, 0.5, 0.9):
        r = brentq(lambda x: r2_conditional_cdf(x, geom, lam) - q,
                   geom.z1 + 1e-12, geom.r12)
        print(f"    {int(q * 100):2d}%: {r:.6f}")

    print("\nmarginal over serving distance and direction:")
    print("    v   P(handoff)")
    for v in (0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
        print(f"{v:5.2f}   {handoff_probability_marginal(v, lam):.6f}")


if __name__ == "__main__":
    main()
