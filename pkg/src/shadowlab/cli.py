"""
Command-line front end.

Every subcommand reads a matrix (``--matrix FILE`` or ``--builtin NAME``),
runs one computation and writes either to stdout or, with ``--out PREFIX``,
to ``PREFIX.csv`` / ``PREFIX.pgm`` / ``PREFIX.json``.  The JSON file carries
a run manifest (subcommand, flags, seed, threads, matrix hash, version) that
is enough to repeat the run bit for bit.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical contract
violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import mixed_trajectory, period, trajectory, trajectory_spaces
from .errors import ContractViolation, DimensionError, DomainError, ShadowlabError
from .normalize import normalization_constants
from .numrange import boundary
from .randshadow import check_law
from .registry import builtin_names, dumps_matrix, matrix_hash, parse_hamiltonian, parse_matrix
from .sampling import RngStream
from .shadow import SegmentHistogram, mixed_shadow, pure_shadow

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONTRACT = 0, 1, 2, 3
FORMATS = ("csv", "pgm", "json")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- formatting -------------------------------------------------------------

def _num(x) -> str:
    # shortest round-trip repr keeps the text output deterministic and exact
    return repr(float(x))


def _complex_json(z):
    return [float(np.real(z)), float(np.imag(z))]


def histogram_csv(hist) -> str:
    lines = ["re_center,im_center,density"]
    pts = hist.center_points()
    dens = hist.density
    for z, d in zip(pts.reshape(-1), dens.reshape(-1)):
        lines.append(f"{_num(z.real)},{_num(z.imag)},{_num(d)}")
    return "\n".join(lines) + "\n"


def histogram_pgm(hist, log=False) -> bytes:
    """Binary 16-bit PGM, max-normalised; imaginary axis points up."""
    counts = hist.counts.astype(float)
    img = counts[None, :] if isinstance(hist, SegmentHistogram) else counts.T[::-1]
    if log:
        img = np.log1p(img)
    top = img.max()
    scaled = np.zeros(img.shape) if top == 0 else img / top
    pix = np.rint(scaled * 65535).astype(">u2")
    h, w = pix.shape
    return f"P5\n{w} {h}\n65535\n".encode() + pix.tobytes()


def section_csv(cs) -> str:
    lines = ["s_center,density"]
    mid = 0.5 * (cs.bin_edges[:-1] + cs.bin_edges[1:])
    for s, d in zip(mid, cs.density):
        lines.append(f"{_num(s)},{_num(d)}")
    return "\n".join(lines) + "\n"


def histogram_meta(hist) -> dict:
    if isinstance(hist, SegmentHistogram):
        geom = {"kind": "segment", "start": _complex_json(hist.start), "end": _complex_json(hist.end),
                "bins": hist.bins}
    else:
        geom = {"kind": "grid", "box": [hist.re_min, hist.re_max, hist.im_min, hist.im_max],
                "bins": [hist.bins_re, hist.bins_im]}
    meta = {"histogram": geom, "samples": hist.samples, "outside": hist.outside,
            "moments": hist.moments.to_dict()}
    if hist.section is not None:
        cs = hist.section
        meta["section"] = {"point": _complex_json(cs.point), "direction": _complex_json(cs.direction),
                           "half_width": cs.half_width, "mass": cs.mass, "bins": len(cs.density)}
    return meta


def _write(path, data):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- argument helpers -------------------------------------------------------

def _threads(value):
    if value is not None:
        return value
    env = os.environ.get("SHADOWLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"SHADOWLAB_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError("SHADOWLAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _bins(text):
    parts = text.lower().split("x")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bins must look like 256x256, got {text!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"bins must look like 256x256, got {text!r}")
    return tuple(vals)


def _section(text):
    try:
        x0, y0, dx, dy, hw = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"section must be 'x0,y0,dx,dy,halfwidth', got {text!r}") from None
    if dx == 0 and dy == 0:
        raise argparse.ArgumentTypeError("section direction must be nonzero")
    if hw <= 0:
        raise argparse.ArgumentTypeError("section half-width must be positive")
    return {"line": (complex(x0, y0), complex(dx, dy)), "half_width": hw}


def _formats(text):
    out = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in out if f not in FORMATS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"formats must be among {','.join(FORMATS)}, got {text!r}")
    return out


def _state(text):
    try:
        amps = np.array([complex(p.strip().replace(" ", "")) for p in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"state must be comma separated complex numbers, got {text!r}") from None
    return amps


def _matrix_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", metavar="FILE", help="JSON matrix file")
    g.add_argument("--builtin", metavar="NAME", help="builtin matrix: " + ", ".join(builtin_names()))


def _load_matrix(args):
    return parse_matrix(args.matrix if args.matrix is not None else args.builtin)


def _sampling_args(p):
    p.add_argument("--samples", type=_positive_int, default=1_000_000, help="number of random states")
    p.add_argument("--bins", type=_bins, default=(256, 256), metavar="RxI",
                   help="histogram bins along the real and imaginary axes, or one number for both")
    p.add_argument("--seed", type=int, default=0, help="seed of the root random stream")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker streams (default: $SHADOWLAB_THREADS or CPU count); part of the reproducibility key")
    p.add_argument("--out", metavar="PREFIX", help="write PREFIX.csv, PREFIX.pgm and PREFIX.json")
    p.add_argument("--format", type=_formats, default=FORMATS, metavar="LIST",
                   help="comma separated subset of csv,pgm,json")
    p.add_argument("--section", type=_section, metavar="x0,y0,dx,dy,hw",
                   help="cross-section through (x0, y0) along (dx, dy) with strip half-width hw")
    p.add_argument("--section-bins", type=_positive_int, default=64, help="bins of the cross-section")
    p.add_argument("--log", action="store_true", help="log-scale the PGM image")
    p.add_argument("--check-support", action="store_true",
                   help="fail with exit code 3 if a sample leaves W(A)")


def manifest(args, matrix=None, **extra) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("func",)}
    for k, v in list(flags.items()):
        if isinstance(v, tuple):
            flags[k] = list(v)
        elif isinstance(v, dict):
            flags[k] = {kk: (_complex_json(vv[0]) + _complex_json(vv[1]) if kk == "line" else vv)
                        for kk, vv in v.items()}
        elif isinstance(v, np.ndarray):
            flags[k] = [_complex_json(z) for z in v]
    out = {"tool": "shadowlab", "version": __version__, "subcommand": args.command, "flags": flags}
    if matrix is not None:
        out["matrix_sha256"] = matrix_hash(matrix)
    out.update(extra)
    return out


# -- subcommands ------------------------------------------------------------

def cmd_range(args, out):
    a = _load_matrix(args)
    bnd = boundary(a, args.resolution)
    lines = ["theta,h,re,im"]
    for t, h, z in zip(bnd.angles, bnd.support_values, bnd.points):
        lines.append(f"{_num(t)},{_num(h)},{_num(z.real)},{_num(z.imag)}")
    csv = "\n".join(lines) + "\n"
    summary = {
        "flat_parts": bnd.count_flat_parts(),
        "barycenter": _complex_json(bnd.barycenter),
        "numerical_radius": float(np.max(np.abs(bnd.points))),
        "radius_bound": float(np.max(np.abs(bnd.points - bnd.barycenter))),
        "box": list(bnd.box()),
    }
    if args.out:
        _write(args.out + ".csv", csv)
        _write(args.out + ".json", _dump_json({**summary, "manifest": manifest(args, a)}))
    else:
        out.write(csv)
    return EXIT_OK


def _shadow_common(args, out, run):
    a = _load_matrix(args)
    threads = _threads(args.threads)
    section = None
    if args.section is not None:
        section = dict(args.section, bins=args.section_bins)
    t0 = time.perf_counter()
    hist = run(a, threads, section)
    elapsed = time.perf_counter() - t0
    meta = histogram_meta(hist)
    meta["manifest"] = manifest(args, a, seed=args.seed, threads=threads)
    if args.out:
        if "csv" in args.format:
            _write(args.out + ".csv", histogram_csv(hist))
            if hist.section is not None:
                _write(args.out + "_section.csv", section_csv(hist.section))
        if "pgm" in args.format:
            _write(args.out + ".pgm", histogram_pgm(hist, args.log))
        if "json" in args.format:
            _write(args.out + ".json", _dump_json(meta))
    else:
        out.write(_dump_json(meta))
    print(f"{hist.samples} samples in {elapsed:.2f} s on {threads} worker stream(s)", file=sys.stderr)
    return EXIT_OK


def cmd_shadow(args, out):
    def run(a, threads, section):
        return pure_shadow(a, args.samples, args.bins, RngStream(args.seed), threads,
                           check_support=args.check_support, section=section)
    return _shadow_common(args, out, run)


def cmd_mixed_shadow(args, out):
    def run(a, threads, section):
        return mixed_shadow(a, args.ancilla, args.samples, args.bins, RngStream(args.seed), threads,
                            check_support=args.check_support, section=section)
    return _shadow_common(args, out, run)


def cmd_normalize(args, out):
    a = _load_matrix(args)
    form = normalization_constants(a)
    summary = {k: float(getattr(form, k)) for k in ("d", "alpha", "c1", "c2", "gamma1", "gamma2")}
    summary["trace_shift"] = _complex_json(np.trace(a) / a.shape[0])
    if args.out:
        _write(args.out + "_v1.json", dumps_matrix(form.v1) + "\n")
        _write(args.out + "_v2.json", dumps_matrix(form.v2) + "\n")
        _write(args.out + ".json", _dump_json({**summary, "manifest": manifest(args, a)}))
    out.write(_dump_json(summary))
    return EXIT_OK


def cmd_dynamics(args, out):
    a = _load_matrix(args)
    h = parse_hamiltonian(args.hamiltonian)
    n = a.shape[0]
    if args.state is None:
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = args.state
        if psi.size != n:
            raise DimensionError(f"state has {psi.size} amplitudes, matrix has order {n}")
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise DomainError("state is the zero vector")
        psi = psi / norm
    times = np.linspace(0.0, args.tmax, args.steps)
    if args.mixed:
        rho = np.outer(psi, np.conj(psi))
        traj = mixed_trajectory(a, h, rho, times, args.time_sign)
    else:
        traj = trajectory(a, h, psi, times, args.time_sign)
    lines = ["t,re,im"]
    for t, z in zip(traj.times, traj.points):
        lines.append(f"{_num(t)},{_num(z.real)},{_num(z.imag)}")
    csv = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out + ".csv", csv)
        t_per = period(h)
        _write(args.out + ".json", _dump_json({
            "period": t_per, "points": len(times),
            "manifest": manifest(args, a, hamiltonian_sha256=matrix_hash(h)),
        }))
    else:
        out.write(csv)
    return EXIT_OK


def cmd_spaces(args, out):
    a = _load_matrix(args)
    sp = trajectory_spaces(a)
    summary = {"dim_xa": sp.dim_xa, "dim_ha": sp.dim_ha, "d_a": sp.d_a}
    if args.bases:
        summary["xa_basis"] = [json.loads(dumps_matrix(x)) for x in sp.xa_basis]
        summary["ha_basis"] = [json.loads(dumps_matrix(x)) for x in sp.ha_basis]
    if args.out:
        _write(args.out + ".json", _dump_json({**summary, "manifest": manifest(args, a)}))
    out.write(_dump_json({k: summary[k] for k in ("dim_xa", "dim_ha", "d_a")} if args.out else summary))
    return EXIT_OK


def cmd_rand_law(args, out):
    res = check_law(args.which, args.n, args.k, args.samples, RngStream(args.seed))
    out.write(_dump_json(res))
    return EXIT_OK if res["pass"] else EXIT_CONTRACT


def cmd_selftest(args, out):
    from .selftest import run_selftest
    ok = run_selftest(out)
    return EXIT_OK if ok else EXIT_CONTRACT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shadowlab", description="Numerical ranges and numerical shadows of complex matrices.")
    p.add_argument("--version", action="version", version=f"shadowlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("range", help="boundary of the numerical range")
    _matrix_args(r)
    r.add_argument("--resolution", type=_positive_int, default=720)
    r.add_argument("--out", metavar="PREFIX")
    r.set_defaults(func=cmd_range)

    s = sub.add_parser("shadow", help="pure-state numerical shadow histogram")
    _matrix_args(s)
    _sampling_args(s)
    s.set_defaults(func=cmd_shadow)

    m = sub.add_parser("mixed-shadow", help="mixed-state shadow under the induced measure")
    _matrix_args(m)
    m.add_argument("--ancilla", "-K", type=_positive_int, required=True, help="ancilla dimension K")
    _sampling_args(m)
    m.set_defaults(func=cmd_mixed_shadow)

    nz = sub.add_parser("normalize", help="normalisation constants and the V1, V2 frame")
    _matrix_args(nz)
    nz.add_argument("--out", metavar="PREFIX")
    nz.set_defaults(func=cmd_normalize)

    d = sub.add_parser("dynamics", help="trajectory z(t) of an evolving state")
    _matrix_args(d)
    d.add_argument("--hamiltonian", required=True, metavar="FILE|NAME")
    d.add_argument("--state", type=_state, metavar="c1,c2,...", help="amplitudes, e.g. '1,0,0' or '0.6,0.8j'")
    d.add_argument("--tmax", type=float, default=10.0)
    d.add_argument("--steps", type=_positive_int, default=200)
    d.add_argument("--time-sign", type=int, choices=(-1, 1), default=-1,
                   help="-1: psi(t) = exp(-iHt) psi0 (default); +1 reverses time")
    d.add_argument("--mixed", action="store_true", help="evaluate through the density-matrix formula")
    d.add_argument("--out", metavar="PREFIX")
    d.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("spaces", help="dimensions of the trajectory spaces X_A and H_A")
    _matrix_args(sp)
    sp.add_argument("--bases", action="store_true", help="include basis matrices")
    sp.add_argument("--out", metavar="PREFIX")
    sp.set_defaults(func=cmd_spaces)

    rl = sub.add_parser("rand-law", help="Monte Carlo check of a random-matrix Beta law")
    rl.add_argument("--which", choices=("density", "unitary"), required=True)
    rl.add_argument("--n", type=_positive_int, required=True)
    rl.add_argument("--k", type=_positive_int, default=1)
    rl.add_argument("--samples", type=_positive_int, default=1_000_000)
    rl.add_argument("--seed", type=int, default=0)
    rl.set_defaults(func=cmd_rand_law)

    st = sub.add_parser("selftest", help="fast invariant checks")
    st.set_defaults(func=cmd_selftest)
    return p


def run(argv=None, out=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ShadowlabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main(argv=None):
    sys.exit(run(argv))
