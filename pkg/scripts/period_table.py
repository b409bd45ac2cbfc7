"""Periods of du, u1 du, u2 du on a grid of chamber points, with oracle differences.

Writes CSV to stdout. Points are x, y in [-3, -0.5] off the diagonal.
"""

import argparse
import sys
from fractions import Fraction

import numpy as np

from rdperiods import chg_symbolic as cs
from rdperiods import periods_numeric as pn


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=Fraction, default=Fraction(-1, 2))
    ap.add_argument("--b", type=Fraction, default=Fraction(-1, 2))
    ap.add_argument("--alpha", type=Fraction, default=Fraction(1))
    ap.add_argument("--n", type=int, default=4, help="grid points per axis")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--oracle", action="store_true")
    args = ap.parse_args()

    params = cs.CHGParams.from_abalpha(args.a, args.b, args.alpha, allow_integral=True)
    spec = pn.QuadratureSpec(rel_tol=args.tol)
    grid = np.linspace(-3.0, -0.5, args.n)
    vectors, diffs = [], []
    for x in grid:
        for y in grid:
            if abs(x - y) < 1e-9:
                continue
            pt = pn.EvaluationPoint.make(params, x / float(args.alpha), y / float(args.alpha))
            pv = pn.period_vector(params, pt, spec)
            vectors.append(pv)
            if args.oracle:
                ov, _ = pn.oracle_period_vector(params, pt)
                diffs.append(max(abs(v - o) / abs(o) for v, o in zip(pv.as_array(), ov)))
    sys.stdout.write(pn.period_table_csv(vectors))
    if diffs:
        print(f"# max relative oracle difference {max(diffs):.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
