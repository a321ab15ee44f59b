"""Command-line entry point: ``vemd <command> [options]``.

Commands
--------
synth          write the three-channel test signal and its two components
decompose      decompose a signal CSV into IMFs plus residual
table1         decomposition PRDs of all three operators on the test signal
sweep          local-mean PRD versus direction count or prime base
envelope-demo  envelopes of the test signal along one direction
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .backprojection import vemd_envelopes
from .envelope import envelopes_1d, envelopes_memd
from .errors import ShapeError, SignalFileError, VemdError
from .io import build_manifest, read_signal_csv, synth_fixture, write_manifest, write_signal_csv
from .metrics import OPERATORS, operator_config, prd, prd_per_channel, primes_between, sweep_base, sweep_directions
from .signals import find_extrema, project
from .sifting import SiftConfig, decompose

log = logging.getLogger("vemd")

EXIT_INPUT = 2
EXIT_NUMERIC = 3
DEFAULT_DIRECTION = (0.5, 0.5, np.sqrt(2.0) / 2.0)
DEFAULT_M_GRID = (5, 8, 16, 32, 64, 128, 256, 512, 1000)


def _add_sift_flags(p: argparse.ArgumentParser, method: bool = True) -> None:
    if method:
        p.add_argument("--method", choices=["memd", "vemd"], default="memd")
        p.add_argument("--order", type=int, choices=[2, 3], default=2,
                       help="derivative order of the smoothness objective (vemd)")
    p.add_argument("-M", "--directions", type=int, default=512, help="number of projections")
    p.add_argument("-b", "--base", type=int, default=2, help="prime base of the Hammersley set")
    p.add_argument("--max-imfs", type=int, default=None,
                   help="stop once the IMF index reaches J (at most J-1 IMFs)")
    p.add_argument("--theta1", type=float, default=0.05)
    p.add_argument("--theta2", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--max-sift", type=int, default=100)
    p.add_argument("--boundary", choices=["odd", "even"], default="odd")
    p.add_argument("--solver", choices=["reduced", "kkt"], default="reduced")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="accepted for compatibility; unused")


def _config(args, **overrides) -> SiftConfig:
    cfg = SiftConfig(
        method=getattr(args, "method", "memd"),
        order=getattr(args, "order", 2),
        directions=args.directions,
        base=args.base,
        max_imfs=args.max_imfs,
        theta1=args.theta1,
        theta2=args.theta2,
        alpha=args.alpha,
        max_sift=args.max_sift,
        boundary=args.boundary,
        solver=args.solver,
        workers=args.workers,
    )
    return replace(cfg, **overrides) if overrides else cfg


def cmd_synth(args) -> int:
    fx = synth_fixture(args.samples)
    out = Path(args.out)
    write_signal_csv(out / "fixture.csv", fx.signal)
    write_signal_csv(out / "fixture_imf.csv", fx.imf)
    write_signal_csv(out / "fixture_trend.csv", fx.trend)
    print(f"wrote fixture ({args.samples} samples) to {out}")
    return 0


def cmd_decompose(args) -> int:
    F = read_signal_csv(args.input)
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dec = decompose(F, cfg)

    imf_paths = [write_signal_csv(out / f"imf_{j + 1:02d}.csv", imf) for j, imf in enumerate(dec.imfs)]
    residual_path = write_signal_csv(out / "residual.csv", dec.residual)

    metrics = {
        "reconstruction_error": float(np.max(np.abs(dec.reconstruct() - F.data))),
    }
    if args.reference_imf and dec.imfs:
        ref = read_signal_csv(args.reference_imf)
        metrics["prd_imf1"] = prd(dec.imfs[0], ref)
        metrics["prd_imf1_per_channel"] = prd_per_channel(dec.imfs[0], ref)
    if args.reference_residual:
        ref = read_signal_csv(args.reference_residual)
        metrics["prd_residual"] = prd(dec.residual, ref)
        metrics["prd_residual_per_channel"] = prd_per_channel(dec.residual, ref)

    manifest = build_manifest(
        config=cfg.to_dict(), signal=F, input_path=args.input, imf_paths=imf_paths,
        residual_path=residual_path, diagnostics=dec.diagnostics, metrics=metrics, root=out,
    )
    write_manifest(out / "manifest.json", manifest)
    print(f"{dec.n_imfs} IMF(s) + residual written to {out}")
    for key in ("prd_imf1", "prd_residual"):
        if key in metrics:
            print(f"  {key}: {metrics[key]:.3f}%")
    return 0


def table1(T: int, cfg: SiftConfig) -> list[tuple[str, float, float]]:
    """(operator, PRD of first IMF vs imf, PRD of residual vs trend) per operator."""
    fx = synth_fixture(T)
    rows = []
    for name in OPERATORS:
        op = OPERATORS[name]
        c = replace(cfg, method=op.method, order=op.order)
        dec = decompose(fx.signal, c)
        if not dec.imfs:
            raise VemdError(f"{name}: no IMF extracted")
        rows.append((name, prd(dec.imfs[0], fx.imf), prd(dec.residual, fx.trend)))
        log.info("%s: %s", name, rows[-1][1:])
    return rows


def cmd_table1(args) -> int:
    cfg = _config(args, max_imfs=args.max_imfs or 2)
    rows = table1(args.samples, cfg)
    print(f"{'PRD(%)':<10}" + "".join(f"{name:>10}" for name, *_ in rows))
    print(f"{'F1':<10}" + "".join(f"{r[1]:>10.2f}" for r in rows))
    print(f"{'R2':<10}" + "".join(f"{r[2]:>10.2f}" for r in rows))
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "prd_imf1", "prd_residual"])
            for name, a, b in rows:
                w.writerow([name, f"{a:.6f}", f"{b:.6f}"])
    return 0


def cmd_sweep(args) -> int:
    fx = synth_fixture(args.samples)
    overrides = dict(boundary=args.boundary, solver=args.solver, workers=args.workers)
    if args.kind == "directions":
        grid = DEFAULT_M_GRID if args.grid is None else args.grid
        res = sweep_directions(fx.signal, fx.trend, grid, args.base, args.methods, **overrides)
    else:
        grid = primes_between(2, 80) if args.grid is None else args.grid
        res = sweep_base(fx.signal, fx.trend, args.directions, grid, args.methods, **overrides)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["param", "method", "prd", "seconds"])
        for value, method, err, secs in res.rows():
            w.writerow([value, method, f"{err:.6f}", f"{secs:.4f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def envelope_demo(T: int, p, boundary: str = "odd", solver: str = "reduced") -> dict[str, np.ndarray]:
    """Named columns of the single-direction envelope comparison."""
    fx = synth_fixture(T)
    F = fx.signal.data
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ShapeError("direction must have 3 components")
    p = p / np.linalg.norm(p)
    h = project(F, p)
    ex = find_extrema(h)
    env1 = envelopes_1d(h, ex, boundary)
    envs = {"M": envelopes_memd(F, ex, boundary)}
    for n in (2, 3):
        envs[f"V{n}"] = vemd_envelopes(F, p, ex, n, boundary, solver)

    cols = {"t": fx.signal.times, "projected": h, "u": env1.upper, "v": env1.lower}
    for c in range(3):
        cols[f"f{c + 1}"] = F[c]
    for name, env in envs.items():
        for c in range(3):
            cols[f"U_{name}_{c + 1}"] = env.upper[c]
            cols[f"V_{name}_{c + 1}"] = env.lower[c]
        cols[f"Du_{name}"] = np.abs(p @ env.upper - env1.upper)
        cols[f"Dv_{name}"] = np.abs(p @ env.lower - env1.lower)
    for name in ("V2", "V3"):
        for c in range(3):
            cols[f"DU_M{name}_{c + 1}"] = np.abs(envs["M"].upper[c] - envs[name].upper[c])
            cols[f"DV_M{name}_{c + 1}"] = np.abs(envs["M"].lower[c] - envs[name].lower[c])
    return cols


def cmd_envelope_demo(args) -> int:
    cols = envelope_demo(args.samples, args.direction, args.boundary, args.solver)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = list(cols)
    table = np.vstack([cols[k] for k in names]).T
    with (out / "envelopes.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in table:
            w.writerow([f"{v:.17g}" for v in row])
    for name in ("M", "V2", "V3"):
        print(f"sup |P[U_{name}] - u| = {cols[f'Du_{name}'].max():.3e}   "
              f"sup |P[V_{name}] - v| = {cols[f'Dv_{name}'].max():.3e}")
    for name in ("V2", "V3"):
        mean_diff = np.mean([cols[f"DU_M{name}_{c}"].mean() for c in (1, 2, 3)])
        print(f"mean |U_M - U_{name}| = {mean_diff:.4e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vemd", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write the test signal")
    p.add_argument("--samples", "-T", type=int, default=1000)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decompose", help="decompose a signal CSV")
    p.add_argument("input")
    _add_sift_flags(p)
    p.add_argument("--reference-imf", help="CSV of the expected first IMF (adds PRD metrics)")
    p.add_argument("--reference-residual", help="CSV of the expected residual")
    p.add_argument("--out", default="vemd_out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("table1", help="decomposition PRDs on the test signal")
    p.add_argument("--samples", "-T", type=int, default=1000)
    _add_sift_flags(p, method=False)
    p.add_argument("--out", help="optional CSV output path")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="local-mean PRD over M or b")
    p.add_argument("kind", choices=["directions", "base"])
    p.add_argument("--grid", type=int, nargs="*", default=None,
                   help="grid values (default: log-spaced M in [5,1000] or primes in [2,80])")
    p.add_argument("--samples", "-T", type=int, default=1000)
    p.add_argument("-M", "--directions", type=int, default=512)
    p.add_argument("-b", "--base", type=int, default=2)
    p.add_argument("--methods", nargs="+", choices=list(OPERATORS), default=list(OPERATORS))
    p.add_argument("--boundary", choices=["odd", "even"], default="odd")
    p.add_argument("--solver", choices=["reduced", "kkt"], default="reduced")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("envelope-demo", help="single-direction envelope comparison")
    p.add_argument("--direction", type=float, nargs=3, default=list(DEFAULT_DIRECTION))
    p.add_argument("--samples", "-T", type=int, default=1000)
    p.add_argument("--boundary", choices=["odd", "even"], default="odd")
    p.add_argument("--solver", choices=["reduced", "kkt"], default="reduced")
    p.add_argument("--out", default="envelope_demo")
    p.set_defaults(func=cmd_envelope_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SignalFileError, ShapeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VemdError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
