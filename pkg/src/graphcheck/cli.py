"""Command-line entry point: ``graphcheck <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic
from .calibration import emit_report, fit_power_law, worst_case_sweep
from .graph import (
    Graph,
    GraphError,
    MarkedSet,
    complete_graph,
    format_edge_list,
    load_graph,
    mark_nodes,
    optimal_marked_count,
    path_graph,
    remove_edges,
    star_graph,
    transition_matrix,
)
from .qpe import default_precision, phase_match, qpe_distribution, qpe_sample, reference_outcome
from .seeding import MAX_SEED, stream
from .spectral import SpectrumError, reference_theta2, theta2_eigenvector, walk_spectrum
from .tester import QPE_MARKED_NODE, analyze, pick_marked, test_completeness
from .walk import build_walk, evolve, initial_state, marked_probability, sample_positions

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

SEED_ENV = "GRAPHCHECK_SEED"

EPILOG = f"""\
seeding: every random draw derives from one 64-bit seed (--seed, else ${SEED_ENV},
else 0). Each stage uses its own stream keyed by (seed, crc32(stage name), index),
with stages "mark", "walk" and "qpe", so runs are reproducible per seed.

exit codes: 0 ok, 1 verdict false (test), 2 usage error, 3 input error.
"""


class UsageError(Exception):
    pass


def _seed_default() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return _seed_type(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}") from exc


def _seed_type(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed {v} is not a non-negative 64-bit integer")
    return v


def _bits_type(text: str):
    if text == "auto":
        return None
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {text!r}") from None
    if not 1 <= v <= 24:
        raise argparse.ArgumentTypeError(f"precision bits must be in [1, 24], got {v}")
    return v


def _edge_type(text: str) -> tuple[int, int]:
    try:
        u, v = (int(x) for x in text.replace(",", "-").split("-"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an edge like 1-2, got {text!r}") from None
    return u, v


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="graphcheck",
        description="Quantum-walk completeness test for undirected graphs (exact simulation).",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def with_seed(p):
        p.add_argument("--seed", type=_seed_type, default=None, help=f"master seed (default ${SEED_ENV} or 0)")

    p = sub.add_parser("test", help="run the completeness test on a graph")
    p.add_argument("--input", required=True, help="edge list or adjacency .csv")
    with_seed(p)
    p.add_argument("--mode", choices=["sampled", "deterministic"], default="deterministic")
    p.add_argument("--precision-bits", type=_bits_type, default=None, metavar="auto|INT")
    p.add_argument("--tolerant", action="store_true", help="accept outcomes one gridpoint off")
    p.add_argument("--report", help="write the report as JSON to this path")

    p = sub.add_parser("analyze", help="deterministic test plus diagnostics")
    p.add_argument("--input", required=True)
    with_seed(p)
    p.add_argument("--precision-bits", type=_bits_type, default=None, metavar="auto|INT")

    p = sub.add_parser("walk", help="evolve the walk and sample positions")
    p.add_argument("--input", required=True)
    p.add_argument("--mark", default="auto", help="comma-separated node ids, or 'auto' for m* random nodes")
    p.add_argument("--steps", type=int, default=None, help="number of steps (default t* = 3)")
    p.add_argument("--shots", type=int, default=1000)
    with_seed(p)

    p = sub.add_parser("spectrum", help="eigenphases of the walk operator")
    p.add_argument("--input", required=True)
    p.add_argument("--mark", default="", help="comma-separated node ids")
    p.add_argument("--dense", action="store_true", help="diagonalize the full operator (n <= 40)")

    p = sub.add_parser("qpe", help="phase-estimation outcome histogram")
    p.add_argument("--input", required=True)
    p.add_argument("--precision-bits", type=_bits_type, default=None, metavar="auto|INT")
    p.add_argument("--shots", type=int, default=1000)
    with_seed(p)

    p = sub.add_parser("calibrate", help="worst-case gap sweep and power-law fit")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=128)
    p.add_argument("--edge-policy", choices=["unmarked", "marked"], default="unmarked")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=["csv", "svg-data"], default="csv")

    sub.add_parser("constants", help="print the optimality constants")

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--complete", type=int, metavar="N")
    kind.add_argument("--star", type=int, metavar="N")
    kind.add_argument("--path", type=int, metavar="N")
    p.add_argument("--remove", type=_edge_type, action="append", default=[], metavar="U-V")
    p.add_argument("--output", help="output file (default stdout)")
    return ap


def _load(path: str) -> Graph:
    return load_graph(path)


def _parse_ids(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"invalid node id list {text!r}") from None


def _emit(out, text: str) -> None:
    out.write(text)


def _cmd_test(args, out) -> int:
    g = _load(args.input)
    rep = test_completeness(g, args.seed, args.mode, args.precision_bits, args.tolerant)
    _emit(out, rep.to_text())
    if args.report:
        Path(args.report).write_text(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK if rep.verdict else EXIT_FALSE


def _cmd_analyze(args, out) -> int:
    g = _load(args.input)
    a = analyze(g, args.seed, args.precision_bits)
    _emit(out, a.report.to_text())
    lines = [
        f"classical_complete={str(a.classical_complete).lower()}",
        f"theta_j={a.theta_j!r}",
        f"gap={a.gap!r}",
        "marked_curve=" + ",".join(repr(v) for v in a.marked_curve),
    ]
    lines += [f"note={s}" for s in a.notes]
    lines.append("outcome,probability")
    lines += [f"{k},{v!r}" for k, v in sorted(a.histogram.items())]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_walk(args, out) -> int:
    g = _load(args.input)
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    steps = analytic.default_constants().t_star if args.steps is None else args.steps
    if steps < 0:
        raise UsageError("--steps must be >= 0")
    if args.mark == "auto":
        marked = pick_marked(g.n, optimal_marked_count(g.n, analytic.default_constants().a), args.seed)
    else:
        marked = MarkedSet(_parse_ids(args.mark))
    p = transition_matrix(g)
    w = build_walk(mark_nodes(p, marked))
    state = evolve(w, initial_state(p), steps)
    shots = sample_positions(state, stream(args.seed, "walk"), args.shots)
    counts = np.bincount(shots, minlength=g.n + 1)[1:]
    probs = state.position_distribution()
    lines = [
        f"# seed={args.seed} steps={steps} marked={','.join(map(str, marked.members))}",
        f"# marked_probability={marked_probability(state, marked)!r}",
        "node,marked,probability,count",
    ]
    lines += [f"{x + 1},{int(x + 1 in marked)},{float(probs[x])!r},{counts[x]}" for x in range(g.n)]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_spectrum(args, out) -> int:
    g = _load(args.input)
    p = mark_nodes(transition_matrix(g), _parse_ids(args.mark))
    spec = walk_spectrum(p, method="dense" if args.dense else "structured")
    lines = ["phase,weight"] + [f"{e.phase!r},{e.weight!r}" for e in sorted(spec.entries, key=lambda e: e.phase)]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_qpe(args, out) -> int:
    g = _load(args.input)
    if g.n < 4:
        raise GraphError(f"need n >= 4, got n={g.n}")
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    bits = default_precision(g.n) if args.precision_bits is None else args.precision_bits
    spec = walk_spectrum(mark_nodes(transition_matrix(g), [QPE_MARKED_NODE]))
    dist = qpe_distribution(spec, theta2_eigenvector(g.n, 1, marked=(QPE_MARKED_NODE,)), bits)
    draws = qpe_sample(dist, stream(args.seed, "qpe"), args.shots)
    ks, counts = np.unique(draws, return_counts=True)
    theta2 = reference_theta2(g.n, 1)
    modal = dist.modal_outcome()
    lines = [
        f"# seed={args.seed} p_bits={bits} reference={reference_outcome(bits, theta2)} modal={modal}",
        f"# matched={str(phase_match(modal, bits, theta2)).lower()}",
        "outcome,probability,count",
    ]
    lines += [f"{k},{dist.mass(int(k))!r},{c}" for k, c in zip(ks, counts)]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_calibrate(args, out) -> int:
    if not 4 <= args.n_min <= args.n_max:
        raise UsageError("need 4 <= --n-min <= --n-max")
    rows = worst_case_sweep(args.n_min, args.n_max, args.edge_policy)
    try:
        fit = fit_power_law(rows)
    except ValueError as exc:
        fit = None
        print(f"graphcheck: no power-law fit: {exc}", file=sys.stderr)
    paths = emit_report(rows, fit, args.out_dir, args.format)
    lines = []
    if fit is not None:
        lines += [f"c={fit.c!r}", f"k={fit.k!r}", f"adjusted_c={fit.adjusted_c!r}"]
    lines += [f"wrote={p}" for p in paths]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_constants(args, out) -> int:
    c = analytic.default_constants()
    lines = [
        f"a={c.a!r}",
        f"residual={analytic.optimality_residual(c.a)!r}",
        f"t_star_max={c.t_star_max!r}",
        f"t_star_second={c.t_star_second!r}",
        f"t_star={c.t_star}",
        f"p_low={c.p_low!r}",
        f"p_high={c.p_high!r}",
    ]
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_gen(args, out) -> int:
    if args.complete is not None:
        g = complete_graph(args.complete)
    elif args.star is not None:
        g = star_graph(args.star)
    else:
        g = path_graph(args.path)
    if args.remove:
        g = remove_edges(g, args.remove)
    text = format_edge_list(g)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        _emit(out, text)
    return EXIT_OK


COMMANDS = {
    "test": _cmd_test,
    "analyze": _cmd_analyze,
    "walk": _cmd_walk,
    "spectrum": _cmd_spectrum,
    "qpe": _cmd_qpe,
    "calibrate": _cmd_calibrate,
    "constants": _cmd_constants,
    "gen": _cmd_gen,
}


def run(argv=None, out=None) -> int:
    """Parse ``argv`` and execute; returns the exit code."""
    out = sys.stdout if out is None else out
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _seed_default()
        return COMMANDS[args.subcommand](args, out)
    except BrokenPipeError:
        return EXIT_OK
    except UsageError as exc:
        print(f"graphcheck: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphError, SpectrumError, ValueError) as exc:
        print(f"graphcheck: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
