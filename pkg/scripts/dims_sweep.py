"""Sweep pole orders and tabulate local dimensions, Stokes components and kernel dims.

    python3 scripts/dims_sweep.py --max-order 4 > dims.csv
"""

import argparse
import csv
import math
import sys

from rdperiods import laurent_ops as lo
from rdperiods import local_model as lm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=4)
    ap.add_argument("--samples", type=int, default=256, help="torus grid for the Stokes count")
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["m1", "m2", "gcd", "rd_2", "rd_3", "dr_0", "dr_1", "stokes_components", "ker_D", "ker_E_on_P", "coker_E_on_P"])
    for m1 in range(1, args.max_order + 1):
        for m2 in range(1, args.max_order + 1):
            model = lm.make_model(m1, m2)
            rd = lm.table_json(lm.rd_dimensions(model, "crossing"))
            dr = lm.table_json(lm.dr_dimensions(model, "crossing"))
            comps = lm.stokes_component_count(model, args.samples)
            kd = lo.stabilized_kernel_dim(lo.D_crossing(m1, m2))
            ep = lo.E_on_P(m1, m2)
            w.writerow([m1, m2, math.gcd(m1, m2), rd["2"], rd["3"], dr["0"], dr["1"], comps,
                        kd, lo.stabilized_kernel_dim(ep), lo.stabilized_cokernel_dim(ep)])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
