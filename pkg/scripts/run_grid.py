"""Sieve checks over a grid of (D, character, class, x, y, z, level, ordering); one TSV row per case."""
import argparse
import itertools
import sys

from siegel_sieve import exceptional as ex
from siegel_sieve.characters import real_characters
from siegel_sieve.ideals import IdealOrdering
from siegel_sieve.qfield import class_group
from siegel_sieve.sieve import SieveParams, buchstab_check

COLUMNS = ("D", "char", "kind", "class", "x", "y", "z", "level", "tie_break", "size",
           "S", "S_minus", "S_plus", "tau", "E0", "E1", "mobius_ok", "sandwich_ok", "buchstab_ok",
           "vanishing_ok", "fl_ok")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--disc", type=int, nargs="+", default=[-20, -84])
    p.add_argument("--x", type=float, nargs="+", default=[1e3, 1e4])
    p.add_argument("--y", type=float, nargs="+", default=[1.0, 3.0, 10.0])
    p.add_argument("--z", type=float, nargs="+", default=[10, 30, 100])
    p.add_argument("--level", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    a = p.parse_args(argv)
    print("\t".join(COLUMNS))
    failures = 0
    for D in a.disc:
        G = class_group(D)
        for psi in real_characters(G):
            for C in (c for c in range(G.h) if psi(c) == 1):
                for x, y in itertools.product(a.x, a.y):
                    s = ex.ExceptionalSetup(D, psi, C, x, y=y)
                    A = ex.build_sequence(s)
                    for z in a.z:
                        P = ex.sieve_primes(s, z)
                        model = ex.density_model(s, z)
                        for level, tb in itertools.product(a.level, ("by_p_then_root", "by_root_then_p")):
                            r = buchstab_check(A, P, SieveParams(z, level, IdealOrdering(tb)), model)
                            flags = (r.mobius_ok, r.sandwich_ok, r.buchstab_ok, r.vanishing_ok, r.fl_ok)
                            failures += not all(flags)
                            row = (D, psi.index, psi.kind, C, x, y, z, level, tb, len(A),
                                   r.S_direct, r.S_minus, r.S_plus, r.tau, r.E0, r.E1, *flags)
                            print("\t".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    print(f"# failing cases\t{failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
