"""Relative remainders |r_d| / (g(d) X) for the smallest sieve primes as x grows."""
import argparse

from siegel_sieve import exceptional as ex
from siegel_sieve.characters import real_characters
from siegel_sieve.ideals import IdealFactorization
from siegel_sieve.qfield import class_group


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--disc", type=int, default=-20)
    p.add_argument("--x", type=float, nargs="+", default=[1e3, 1e4, 1e5, 1e6])
    p.add_argument("--primes", type=int, default=10)
    a = p.parse_args(argv)
    G = class_group(a.disc)
    print("\t".join(["kind", "prime", "g"] + [f"x={x:g}" for x in a.x]))
    for psi in real_characters(G):
        base = ex.ExceptionalSetup(a.disc, psi, 0, a.x[0])
        for P in ex.sieve_primes(base, 10_000)[:a.primes]:
            d = IdealFactorization.from_factors([(P, 1)], G)
            g = ex.local_g(P, psi)
            vals = []
            for x in a.x:
                s = base.with_(x=x)
                vals.append(abs(ex.remainder_empirical(s, d)) / (g * ex.X_value(s, True)))
            print("\t".join([psi.kind, repr(P), f"{g:.6g}"] + [f"{v:.3e}" for v in vals]))


if __name__ == "__main__":
    main()
