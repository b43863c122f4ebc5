"""Run every figure preset and write CSV + gnuplot scripts.

    python3 scripts/reproduce_figures.py --out results --trials 2000
"""

import argparse
import time

from steersim.harness import FIGURES, run_figure


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=None, help="default: each preset's 10^4")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("figures", nargs="*", default=sorted(FIGURES, key=lambda n: int(n[3:])))
    args = ap.parse_args()

    for name in args.figures:
        t0 = time.perf_counter()
        res = run_figure(name, seed=args.seed, trials=args.trials, out=args.out, workers=args.workers)
        print(f"{name}: {FIGURES[name].description} ({time.perf_counter() - t0:.1f}s)")
        for m in res.methods:
            series = "  ".join(f"{r.mean_se:7.3f}" for r in res.series(m))
            print(f"  {m:<12} {series}")


if __name__ == "__main__":
    main()
