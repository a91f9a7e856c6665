"""Command-line interface.

Subcommands: run, loops, flip-sensitivity, dressed-potentials, timescales,
dump-couplings.  All outputs are CSV or flat key = value text; exit code 0
on success, 2 with a machine-readable ``error: ...`` line on validation
failure.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys

import numpy as np

from . import dressed as dressedmod
from .coupling import Enantiomer
from .looptopology import (
    SignPattern,
    flip_sensitivity,
    random_loop_hamiltonian,
)
from .rotbasis import TruncationError
from .scenarios import (
    ConfigError,
    builtin_config,
    builtin_names,
    couplings_csv,
    load_config,
    loops_csv,
    run_scenario,
    loop_census,
    timescale_report,
    write_outputs,
    _assemble,
)


def _add_config_args(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", metavar="PATH", help="scenario config file")
    group.add_argument("--scenario", metavar="NAME",
                       help=f"builtin scenario, one of {builtin_names()}")
    p.add_argument("--jmax", type=int, default=None, help="override basis truncation")


def _load(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = builtin_config(args.scenario)
    if args.jmax is not None:
        from dataclasses import replace

        from .rotbasis import BasisTruncation

        cfg = replace(cfg, trunc=BasisTruncation(args.jmax))
    return cfg


def _cmd_run(args):
    cfg = _load(args)
    tags = ("L", "R") if args.enantiomer == "both" else (args.enantiomer,)
    result = run_scenario(cfg, enantiomers=tags)
    paths = write_outputs(result, args.out)
    for p in paths:
        print(p)


def _cmd_loops(args):
    cfg = _load(args)
    h = _assemble(cfg, Enantiomer.L)
    text = loops_csv(loop_census(h, max_len=args.max_len))
    _emit(text, args.out, "loops.csv")


def _cmd_flip_sensitivity(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    lines = ["n,draw,flips,classification"]
    for n in sizes:
        rng = np.random.default_rng(args.seed + n)
        for draw in range(args.draws):
            h = random_loop_hamiltonian(n, rng)
            edges = h.edges()
            for r in range(1, len(edges) + 1):
                for pat in itertools.combinations(edges, r):
                    cls = flip_sensitivity(h, SignPattern.of(*pat))
                    flips = ";".join(f"{a}-{b}" for a, b in pat)
                    lines.append(f"{n},{draw},{flips},{cls}")
    _emit("\n".join(lines) + "\n", args.out, "flip_sensitivity.csv")


def _cmd_dressed_potentials(args):
    cfg = _load(args)
    grid = np.linspace(-args.span, args.span, args.points)
    try:
        offsets = [float(s) for s in args.offsets.split(",")]
        if len(offsets) != 3:
            raise ValueError
    except ValueError:
        raise ConfigError("--offsets expects three comma-separated numbers") from None
    from dataclasses import replace
    from .coupling import GaussianBeam

    lasers = [
        replace(l, beam=GaussianBeam(waist=l.beam.waist, center=off))
        for l, off in zip(cfg.lasers, offsets)
    ]
    for tag in ("L", "R"):
        fieldcfg = dressedmod.FieldConfiguration.from_lasers(
            lasers, grid, who=Enantiomer(tag))
        frame = dressedmod.dress_field(fieldcfg)
        omega12 = cfg.omega12_max
        rows = ["x,V_1,V_2,V_3,A_1,A_2,A_3"]
        vs = [dressedmod.scalar_potential(frame, n) / omega12 for n in range(3)]
        avs = [dressedmod.vector_potential(frame, n) for n in range(3)]
        for k, x in enumerate(grid):
            row = [repr(float(x))]
            row += [repr(float(v[k])) for v in vs]
            row += [repr(float(a[k])) for a in avs]
            rows.append(",".join(row))
        _emit("\n".join(rows) + "\n", args.out, f"dressed_{tag}.csv")


def _cmd_timescales(args):
    from .scenarios import _fmt

    cfg = _load(args)
    for key, val in timescale_report(cfg).items():
        print(f"{key} = {_fmt(val)}")


def _cmd_dump_couplings(args):
    cfg = _load(args)
    h = _assemble(cfg, Enantiomer(args.enantiomer))
    _emit(couplings_csv(h), args.out, f"couplings_{args.enantiomer}.csv")


def _emit(text, out_dir, name):
    if out_dir is None:
        sys.stdout.write(text)
    else:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(path)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chiralsep",
        description="Rotational effects on laser-based enantioseparation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="propagate a scenario and write traces")
    _add_config_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--enantiomer", choices=("L", "R", "both"), default="both")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; runs are deterministic")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("loops", help="enumerate closed loops of the coupling graph")
    _add_config_args(p)
    p.add_argument("--out", default=None)
    p.add_argument("--max-len", type=int, default=3)
    p.set_defaults(func=_cmd_loops)

    p = sub.add_parser("flip-sensitivity",
                       help="spectral sensitivity of n-loops to Rabi sign flips")
    p.add_argument("--sizes", default="3,4,5,6", help="comma-separated loop sizes")
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_flip_sensitivity)

    p = sub.add_parser("dressed-potentials",
                       help="rotationless dressed potentials on a transverse grid")
    _add_config_args(p)
    p.add_argument("--out", default=None)
    p.add_argument("--span", type=float, default=2.0, help="half-width of the x grid")
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--offsets", default="-0.5,0.5,0.0",
                   help="beam centers for the 1-2, 2-3, 1-3 lasers")
    p.set_defaults(func=_cmd_dressed_potentials)

    p = sub.add_parser("timescales", help="characteristic timescale table")
    _add_config_args(p)
    p.set_defaults(func=_cmd_timescales)

    p = sub.add_parser("dump-couplings", help="coupling table (A, B, Omega, Delta)")
    _add_config_args(p)
    p.add_argument("--out", default=None)
    p.add_argument("--enantiomer", choices=("L", "R"), default="L")
    p.set_defaults(func=_cmd_dump_couplings)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, TruncationError, OSError, ValueError,
            dressedmod.DiscontinuousFrameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
