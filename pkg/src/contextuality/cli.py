"""Command-line interface.

Usage:
    contextuality analyze snow-queen
    contextuality analyze system.json --format json
    contextuality matrix --rank 4 --kind reduced
    contextuality consistify snow-queen --out sq2.json
    contextuality vectors snow-queen --which reduced --format csv
    contextuality verify-theorem --rank-min 2 --rank-max 6 --trials 500 --seed 0
    contextuality polytope-svg figure-1 --out fig.svg

Exit codes: 0 success, 1 invalid input, 2 solver failure or a theorem
residual above tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import lp
from .coupling import consistify
from .incidence import MAX_DENSE_RANK, MemoryModeError, build_full, build_reduced
from .measures import IDENTITY_TOL, analyze, verify_identity
from .svg import polytope_svg
from .system import (InvalidSystemError, dump_system, is_consistently_connected,
                     load_system, validate)
from .vectorize import (expectation_transform, full_description, reduced_description,
                        vector_labels)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(source: str):
    system = load_system(source)
    report = validate(system)
    if not report.ok:
        raise InvalidSystemError("; ".join(report.violations))
    return system


def cmd_analyze(args) -> int:
    system = _load(args.source)
    rep = analyze(system, tol=args.tol, backend=args.backend)
    if args.format == "json":
        d = rep.to_dict(witnesses=args.witnesses)
        d["rank"] = system.rank
        d["consistently_connected"] = is_consistently_connected(system)
        _emit(json.dumps(d, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"system: {args.source} (rank {system.rank})",
        "validation: ok",
        f"consistently connected: {is_consistently_connected(system)}",
        f"verdict: {'contextual' if rep.contextual else 'noncontextual'}",
        f"cnt2={rep.cnt2:.6g}",
        f"cntf={rep.cntf:.6g}",
        f"residual |cntf - 2*cnt2| = {rep.residual:.6g}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_matrix(args) -> int:
    build = build_reduced if args.kind == "reduced" else build_full
    m = build(args.rank, max_rank=args.max_rank)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["event"] + [f"s{v}" for v in range(m.shape[1])])
        for lab, row in zip(m.row_labels, m.bits.astype(int)):
            w.writerow([lab, *row])
        _emit(buf.getvalue(), args.out)
    else:
        _emit("\n".join(m.render()) + "\n", args.out)
    return EXIT_OK


def cmd_consistify(args) -> int:
    system = _load(args.source)
    text = dump_system(consistify(system)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_vectors(args) -> int:
    system = _load(args.source)
    labels = vector_labels(system.rank)
    if args.which == "full":
        f = full_description(system)
        vecs = {"l_full": f.l_full, "b_full": f.b_full, "c_full": f.c_full}
    elif args.which == "reduced":
        r = reduced_description(system)
        vecs = {"l": r.l, "b": r.b, "c": r.c}
    else:
        e = expectation_transform(reduced_description(system))
        vecs = {"l": e.phi_l, "b": e.phi_b, "c": e.phi_c}
    rows = [(name, lab, float(v)) for name, vec in vecs.items()
            for lab, v in zip(labels[name], vec)]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vector", "label", "value"])
        w.writerows(rows)
        _emit(buf.getvalue(), args.out)
    else:
        d = {name: {"labels": labels[name], "values": [float(v) for v in vec]}
             for name, vec in vecs.items()}
        _emit(json.dumps(d, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify_theorem(args) -> int:
    if not 2 <= args.rank_min <= args.rank_max <= args.max_rank:
        raise ValueError(f"ranks must satisfy 2 <= min <= max <= {args.max_rank}")
    ranks = range(args.rank_min, args.rank_max + 1)
    rep = verify_identity(ranks, args.trials, seed=args.seed, tol=args.tol,
                          backend=args.backend)
    if args.format == "json":
        _emit(json.dumps(rep.to_dict(), indent=2) + "\n", args.out)
    else:
        lines = [f"seed={args.seed} trials/rank={args.trials} tol={args.tol:g}"]
        for rank, r in rep.per_rank().items():
            lines.append(
                f"rank {rank}: max residual {r['max_residual']:.6g}, "
                f"contextual {r['contextual']}/{r['trials']}, "
                f"failures {r['failures'] or 'none'}")
        lines.append(f"verdict disagreements: {len(rep.verdict_disagreements)}")
        lines.append(f"max residual: {rep.max_residual:.6g}")
        lines.append(f"runtime: {rep.seconds:.2f} s")
        _emit("\n".join(lines) + "\n", args.out)
    bad = rep.failures or rep.verdict_disagreements
    return EXIT_SOLVER if bad else EXIT_OK


def cmd_polytope_svg(args) -> int:
    system = _load(args.source)
    if system.rank != 2 or not is_consistently_connected(system, 1e-9):
        raise InvalidSystemError("polytope-svg needs a consistently connected rank-2 system")
    _emit(polytope_svg(system), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contextuality",
                                description="Contextuality analysis of cyclic systems")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--out", help="write output to this file")

    def solver(sp):
        sp.add_argument("--tol", type=float, default=lp.DEFAULT_TOL)
        sp.add_argument("--backend", choices=["simplex", "highs"], default="simplex")

    sp = sub.add_parser("analyze", help="verdict, CNT2, CNTF for one system")
    sp.add_argument("source", help="JSON file or fixture: snow-queen, uniform, prbox, figure-1")
    sp.add_argument("--witnesses", action="store_true", help="include LP witnesses (json)")
    common(sp, ["text", "json"])
    solver(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("matrix", help="dump an incidence matrix")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--kind", choices=["reduced", "full"], default="reduced")
    sp.add_argument("--max-rank", type=int, default=MAX_DENSE_RANK,
                    help="override the dense-matrix rank cap")
    common(sp, ["text", "csv"])
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("consistify", help="write the consistified system as JSON")
    sp.add_argument("source")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_consistify)

    sp = sub.add_parser("vectors", help="dump description vectors")
    sp.add_argument("source")
    sp.add_argument("--which", choices=["full", "reduced", "expectation"], default="reduced")
    common(sp, ["json", "csv"])
    sp.set_defaults(func=cmd_vectors)

    sp = sub.add_parser("verify-theorem", help="check CNTF = 2 CNT2 on random systems")
    sp.add_argument("--rank-min", type=int, default=2)
    sp.add_argument("--rank-max", type=int, default=6)
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-rank", type=int, default=MAX_DENSE_RANK)
    sp.add_argument("--tol", type=float, default=IDENTITY_TOL)
    sp.add_argument("--backend", choices=["simplex", "highs"], default="simplex")
    common(sp, ["text", "json"])
    sp.set_defaults(func=cmd_verify_theorem)

    sp = sub.add_parser("polytope-svg", help="SVG of the rank-2 expectation square")
    sp.add_argument("source")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_polytope_svg)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except lp.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidSystemError, MemoryModeError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
