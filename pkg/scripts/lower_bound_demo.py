"""Lower-bound pipeline for prime ideals in a class: counts against c_psi Delta_psi kappa_K x / h."""
import argparse

from siegel_sieve import exceptional as ex
from siegel_sieve.characters import real_characters
from siegel_sieve.qfield import class_group

COLUMNS = ("kind", "class", "x", "z", "tau_y", "lhs", "rhs", "upper", "S1/X", "c_at_tau_y", "c_limit",
           "identities_ok", "windows_holding")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--disc", type=int, default=-20)
    p.add_argument("--x", type=float, nargs="+", default=[1e3, 1e4, 1e5])
    p.add_argument("--oracle", action="store_true")
    a = p.parse_args(argv)
    G = class_group(a.disc)
    print("\t".join(COLUMNS))
    for psi in real_characters(G):
        for C in (c for c in range(G.h) if psi(c) == 1):
            for x in a.x:
                r = ex.theorem1_report(ex.ExceptionalSetup(a.disc, psi, C, x, y=ex.DEFAULT_Y[psi.kind]),
                                       with_oracle=a.oracle)
                ok = r.buchstab_identity_ok and r.cutoff_split_ok and r.S2_ok
                if a.oracle:
                    ok = ok and r.lhs_count == r.lhs_count_oracle
                held = sum(c.holds for c in r.hypothesis.checks.values())
                row = (psi.kind, C, f"{x:g}", f"{r.z:.4g}", f"{r.tau_y:.3f}", r.lhs_count, f"{r.rhs_bound:.4g}",
                       f"{r.upper_experimental:.4g}", f"{r.S1_prime_sum / r.X:.4g}", f"{r.c_psi_at_tau_y:.4g}",
                       f"{r.c_psi_limit:.6g}", ok, f"{held}/{len(r.hypothesis.checks)}")
                print("\t".join(map(str, row)))


if __name__ == "__main__":
    main()
