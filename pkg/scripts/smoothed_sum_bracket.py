"""Smoothed sums of lambda at a hypothetical real zero against kappa_psi Gamma(1 - beta)."""
import argparse
import math

from siegel_sieve.characters import beta_from_eta, kappa_psi, real_characters, smoothed_lambda_sum
from siegel_sieve.qfield import class_group


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--disc", type=int, nargs="+", default=[-20, -84])
    p.add_argument("--eta", type=float, nargs="+", default=[20, 1e2, 1e4])
    p.add_argument("--y", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    a = p.parse_args(argv)
    print("D\tchar\tkind\teta\ty\tsum\tkappa_Gamma\tratio\t(1-beta)log y")
    for D in a.disc:
        G = class_group(D)
        for psi in real_characters(G):
            k = kappa_psi(psi, G)
            for eta in a.eta:
                beta = beta_from_eta(D, eta).beta
                for y in a.y:
                    s = smoothed_lambda_sum(psi, beta, y).value
                    main_term = k * math.gamma(1 - beta)
                    print(f"{D}\t{psi.index}\t{psi.kind}\t{eta:g}\t{y:g}\t{s:.6g}\t{main_term:.6g}"
                          f"\t{s / main_term:.3e}\t{(1 - beta) * math.log(y):.3e}")


if __name__ == "__main__":
    main()
