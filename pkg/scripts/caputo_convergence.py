"""Convergence tables for the L1 Caputo scheme and the linear Mittag-Leffler mode."""

import argparse
import math

import numpy as np

from fracphase import ZERO, ModelParams, PeriodicGrid, TimeGrid, caputo_derivative_series, mittag_leffler, run


def orders(errs):
    return [float("nan")] + [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]


def table(title, Ns, errs):
    print(title)
    for N, e, p in zip(Ns, errs, orders(errs)):
        print(f"  N={N:>5}  err={e:.3e}  order={p:.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--Ns", type=int, nargs="+", default=[64, 128, 256, 512, 1024])
    args = ap.parse_args()
    a = args.alpha

    errs = []
    for N in args.Ns:
        g = TimeGrid(1.0, N)
        exact = 2 * g.nodes ** (2 - a) / math.gamma(3 - a)
        errs.append(np.max(np.abs(caputo_derivative_series(g.nodes**2, a, g) - exact)))
    table(f"L1 on u = t^2, alpha = {a}, uniform grid", args.Ns, errs)

    grid = PeriodicGrid(1, 32, 2 * math.pi)
    (x,) = grid.coordinates()
    params = ModelParams(a, epsilon=1.0, potential=ZERO, stabilizer=0.0)
    target = mittag_leffler(a, -1.0) * np.cos(x)
    for graded in (False, True):
        errs = []
        for N in args.Ns:
            tg = TimeGrid.graded(1.0, N, a) if graded else TimeGrid(1.0, N)
            errs.append(np.max(np.abs(run(np.cos(x), params, tg, grid).fields[-1] - target)))
        table(f"linear mode vs E_alpha(-t^alpha), {'graded' if graded else 'uniform'} grid", args.Ns, errs)


if __name__ == "__main__":
    main()
