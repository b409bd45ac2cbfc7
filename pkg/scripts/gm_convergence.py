"""Finite-difference residual of the connection matrices against step size.

Prints one line per (point, step): plain central difference residual,
Richardson residual, observed order. Expect order ~2 until quadrature noise.
"""

import argparse
from fractions import Fraction

from rdperiods import chg_symbolic as cs
from rdperiods import periods_numeric as pn


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=float, nargs="+", default=[4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3])
    ap.add_argument("--precision", type=int, default=25)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()

    params = cs.CHGParams(Fraction(-1, 2), Fraction(-1, 2), -2, 1, allow_integral=True)
    spec = pn.QuadratureSpec(rel_tol=args.tol, precision=args.precision)
    print(f"{'x':>6} {'y':>6} {'step':>9} {'plain':>10} {'richardson':>10} {'order':>6}")
    for x, y in [(-1.0, -2.0), (-1.5, -0.7), (-1 - 0.5j, -2 + 0.25j)]:
        pt = pn.EvaluationPoint.make(params, x, y)
        for h in args.steps:
            try:
                r = pn.gm_residual(params, pt, h, spec)
            except pn.StepTooLarge as exc:
                print(f"{x!s:>6} {y!s:>6} {h:9.2e} skipped: {exc}")
                continue
            print(f"{x!s:>6} {y!s:>6} {h:9.2e} {r.plain[0]:10.2e} {r.residual:10.2e} {r.order:6.2f}")


if __name__ == "__main__":
    main()
