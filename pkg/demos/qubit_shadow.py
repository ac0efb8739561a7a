"""The shadow of a 2x2 matrix: a filled ellipse with an arcsine cross-section.

Samples the shadow of the built-in ``A2_0``, compares the strip along the
real axis with the arcsine law and prints an ASCII profile of both.

    python3 demos/qubit_shadow.py [--samples N]
"""
import argparse
import math

import numpy as np

from shadowlab.numrange import ellipse_2x2
from shadowlab.randshadow import ks_test
from shadowlab.registry import get_builtin
from shadowlab.sampling import RngStream
from shadowlab.shadow import arcsine_cdf, cross_section, pure_samples


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=4_000_000)
    args = p.parse_args()
    a = get_builtin("A2_0")
    e = ellipse_2x2(a)
    print(f"range: ellipse, foci {e.focus1:.4f} and {e.focus2:.4f}, "
          f"semi-axes {e.semi_major:.6f} and {e.semi_minor:.6f}")
    z = pure_samples(a, args.samples, RngStream(1), threads=4)
    r = math.sqrt(0.5)
    cs = cross_section(z, "real", half_width=0.01, bins=24, extent=(-r, r))
    d = ks_test(cs.positions, arcsine_cdf(r)).statistic
    print(f"{cs.positions.size} samples in the strip, KS distance to arcsine {d:.4f}")
    centers = 0.5 * (cs.bin_edges[1:] + cs.bin_edges[:-1])
    profile = cs.density / cs.mass
    law = np.diff(arcsine_cdf(r)(cs.bin_edges)) / np.diff(cs.bin_edges)  # bin averages
    scale = 50 / profile.max()
    print("   x     shadow arcsine")
    for x, got, want in zip(centers, profile, law):
        bar = "#" * int(got * scale)
        print(f"{x:+.3f} {got:6.3f} {want:6.3f} {bar}")


if __name__ == "__main__":
    main()
