"""Least primes per class over a discriminant range, summarised by |D| bucket."""
import argparse
import math
import time

from siegel_sieve import exceptional as ex


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dmin", type=int, default=-4000)
    p.add_argument("--dmax", type=int, default=-3)
    p.add_argument("--buckets", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args(argv)
    t = time.perf_counter()
    table = ex.scan(a.dmin, a.dmax, workers=a.workers)
    dt = time.perf_counter() - t
    lo, hi = math.log(-a.dmax), math.log(-a.dmin)
    width = (hi - lo) / a.buckets or 1.0
    best = {}
    for r in table.rows:
        b = min(int((math.log(-r.D) - lo) / width), a.buckets - 1)
        key = (b, r.char_kind)
        best[key] = max(best.get(key, 0.0), r.ratio_all)
    print("bucket_low\tbucket_high\tkind\tmax_log_p_over_log_D")
    for (b, kind), v in sorted(best.items()):
        print(f"{math.exp(lo + b * width):.0f}\t{math.exp(lo + (b + 1) * width):.0f}\t{kind}\t{v:.4f}")
    print(f"# rows\t{len(table.rows)}\tunverified\t{sum(not r.verified for r in table.rows)}"
          f"\tfailures\t{len(table.failures)}\tseconds\t{dt:.1f}")
    for name, v in ex.REFERENCE_LINES:
        print(f"# reference_{name}\t{v}")


if __name__ == "__main__":
    main()
