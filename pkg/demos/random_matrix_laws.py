"""Shadows of random density matrices and random unitaries are Beta laws.

    python3 demos/random_matrix_laws.py [--samples N]
"""
import argparse

from shadowlab.randshadow import check_law


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=200_000)
    args = p.parse_args()
    for n in (2, 3, 5):
        for k in (1, n):
            r = check_law("density", n, k, args.samples, rng=10 * n + k)
            print(f"rho_11, N={n} K={k}: {r['law']:<12} KS {r['ks_statistic']:.4f} "
                  f"({'pass' if r['pass'] else 'FAIL'})")
        r = check_law("unitary", n, samples=args.samples, rng=n)
        print(f"|U_11|^2, N={n}:     {r['law']:<12} KS {r['ks_statistic']:.4f} "
              f"({'pass' if r['pass'] else 'FAIL'})")


if __name__ == "__main__":
    main()
