"""Numerical ranges and shadows of the built-in order-3 and order-4 matrices.

Prints the flat-part count and numerical radius of each range and writes a
PGM image of every shadow (log scale) into the output directory.

    python3 demos/range_gallery.py [outdir] [--samples N]
"""
import argparse
from pathlib import Path

import numpy as np

from shadowlab.cli import histogram_pgm
from shadowlab.numrange import boundary
from shadowlab.registry import get_builtin
from shadowlab.sampling import RngStream
from shadowlab.shadow import pure_shadow


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("outdir", nargs="?", default="demo_out/gallery")
    p.add_argument("--samples", type=int, default=400_000)
    args = p.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    names = [f"A3_{i}" for i in range(4)] + [f"A4_{i}" for i in range(9)]
    for name, sub in zip(names, RngStream(2024).split(len(names))):
        a = get_builtin(name)
        bnd = boundary(a, 2048)
        hist = pure_shadow(a, args.samples, (200, 200), sub, threads=4)
        (out / f"{name}.pgm").write_bytes(histogram_pgm(hist, log=True))
        radius = np.abs(bnd.points).max()
        print(f"{name}: flat parts {bnd.count_flat_parts():d}, numerical radius {radius:.4f}, "
              f"peak density {hist.density.max():.2f}")
    print(f"images in {out}/")


if __name__ == "__main__":
    main()
