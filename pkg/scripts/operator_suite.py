"""Stabilization traces for every truncated operator: window sizes and projected dims."""

import argparse
import json

from rdperiods import laurent_ops as lo


def trace(op):
    k = lo.kernel_stabilization(op)
    out = {"op": op.name, "m1": op.m1, "m2": op.m2, "kernel": k.value, "windows": k.windows, "values": k.values}
    try:
        c = lo.cokernel_stabilization(op)
        out.update(cokernel=c.value, cokernel_values=c.values)
    except lo.NotStabilized:
        out["cokernel"] = None  # infinite dimensional, e.g. coker D
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=3)
    args = ap.parse_args()
    ops = [lo.A_op()]
    for m1 in range(1, args.max_order + 1):
        ops += [lo.rho_onevar(m1), lo.phi_smooth(m1)]
        for m2 in range(1, args.max_order + 1):
            ops += [lo.D_crossing(m1, m2), lo.E_crossing(m1, m2), lo.E_on_P(m1, m2)]
    for op in ops:
        print(json.dumps(trace(op)))
    for m1 in range(1, args.max_order + 1):
        for m2 in range(1, args.max_order + 1):
            tally = lo.pfred_case_tally(m1, m2)
            print(json.dumps({"case_tally": [m1, m2], **tally.contributions,
                              "formula_agrees": tally.contributions == lo.pfred_case_formula(m1, m2).contributions}))


if __name__ == "__main__":
    main()
