"""Command line interface: ``labopt <command> [options]``.

Exit codes: 0 success, 2 usage error (bad flags, unknown problem,
unreadable input), 3 infeasible or degenerate data.
"""

import argparse
import csv
import sys

import numpy as np

from . import __version__
from .benchmarks import get_problem, problem_names, registry
from .cssr import SearchSpaceReducer, load_clusters, save_clusters
from .exceptions import (
    AllNoise,
    EmptyFeasible,
    GridTooLarge,
    InfeasibleRegion,
    LabOptError,
)
from .harness import (
    Campaign,
    audit_records,
    default_jobs,
    format_summary,
    run_campaign,
    summarize,
    write_csv,
    write_trace,
)
from .population import ConstrainedConfig, LabConfig
from .problem import resolve_problem
from .stats import friedman, wilcoxon_signed_rank

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3


class UsageError(Exception):
    pass


def _add_run_flags(sp, n, groups, max_iter):
    sp.add_argument("--problem", required=True, help="registry name or problem file")
    sp.add_argument("--n", type=int, default=n, help="individuals per group")
    sp.add_argument("--groups", type=int, default=groups, help="number of groups")
    sp.add_argument("--max-iter", type=int, default=max_iter)
    sp.add_argument("--runs", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0, help="master seed")
    sp.add_argument("--out", help="per-run CSV output")
    sp.add_argument("--trace", help="JSONL convergence trace output")
    sp.add_argument("--jobs", type=int, default=None,
                    help="parallel worker processes (default: $LAB_OPT_JOBS or 1)")


def build_parser():
    ap = argparse.ArgumentParser(prog="labopt", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="seeded runs of the unconstrained optimizer")
    _add_run_flags(sp, 5, 4, 2000)
    sp.add_argument("--theta", type=float, default=0.15, help="sampling-box reduction factor")

    sp = sub.add_parser("cssr", help="reduce a constrained problem's search space to boxes")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--points-per-dim", type=int, default=101)
    sp.add_argument("--max-dist", type=float, default=None)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--min-pts", type=int, default=None)
    sp.add_argument("--out", default="clusters.json")

    sp = sub.add_parser("solve-constrained", help="seeded runs of the constrained optimizer")
    _add_run_flags(sp, 3, 71, 1000)
    sp.add_argument("--clusters", help="clusters.json from the cssr command (default: whole bounds)")
    sp.add_argument("--omega", type=float, default=0.8)
    sp.add_argument("--beta", type=float, default=100.0)

    sp = sub.add_parser("stats", help="comparison tests")
    ssub = sp.add_subparsers(dest="test", required=True)
    w = ssub.add_parser("wilcoxon", help="two-sided Wilcoxon signed-rank test")
    w.add_argument("--a", required=True, help="CSV with one column of run results")
    w.add_argument("--b", required=True)
    w.add_argument("--alpha", type=float, default=0.05)
    f = ssub.add_parser("friedman", help="Friedman mean ranks")
    f.add_argument("--matrix", required=True,
                   help="CSV: header of algorithm names, one row per problem")

    sub.add_parser("list-problems", help="show built-in problems")
    return ap


# ------------------------------------------------------------------ helpers


def _jobs(args):
    return args.jobs if args.jobs is not None else default_jobs()


def _emit(records, args, problem):
    if args.out:
        write_csv(records, args.out)
    if args.trace:
        write_trace(records, args.trace)
    print(format_summary(problem.name, summarize(records)))
    issues = audit_records(problem, records)
    for msg in issues:
        print(f"audit: {msg}", file=sys.stderr)


def _read_column(path):
    """Numbers from a one-column CSV (header optional) or a results file."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise UsageError(f"{path} is empty")
    col = 0
    if "best_f" in rows[0]:
        col = rows[0].index("best_f")
    try:
        float(rows[0][col])
    except ValueError:
        rows = rows[1:]
    try:
        return np.array([float(r[col]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: cannot read numbers ({exc})") from None


def _read_matrix(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise UsageError(f"{path} needs a header row and at least one problem row")
    header, body = rows[0], rows[1:]
    labelled = False
    try:
        float(body[0][0])
    except ValueError:
        labelled = True
    names = header[1:] if labelled and len(header) == len(body[0]) else header
    try:
        M = np.array([[float(v) for v in (r[1:] if labelled else r)] for r in body])
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if M.shape[1] != len(names):
        raise UsageError(f"{path}: header has {len(names)} names but rows have {M.shape[1]} values")
    return names, M


# ----------------------------------------------------------------- commands


def cmd_run(args):
    p = resolve_problem(args.problem)
    if p.n_constraints:
        raise UsageError(f"{p.name} has constraints; use solve-constrained")
    cfg = LabConfig(n=args.n, G=args.groups, theta=args.theta, max_iter=args.max_iter, seed=args.seed)
    records = run_campaign(Campaign(p, "unconstrained", args.runs, cfg), jobs=_jobs(args))
    _emit(records, args, p)
    return EXIT_OK


def cmd_cssr(args):
    p = resolve_problem(args.problem)
    if not p.n_constraints:
        raise UsageError(f"{p.name} has no constraints")
    red = SearchSpaceReducer(points_per_dim=args.points_per_dim, max_dist=args.max_dist,
                             eps=args.eps, min_pts=args.min_pts).fit(p)
    save_clusters(args.out, p.name, red.config_dict(), red.boxes_)
    print(f"{p.name}: {len(red.boxes_)} cluster(s) from {len(red.combined_points_)} retained points")
    for b in red.boxes_:
        lo = ", ".join("%.6g" % v for v in b.min)
        hi = ", ".join("%.6g" % v for v in b.max)
        print(f"  cluster {b.id}: min [{lo}]  max [{hi}]  points {b.point_count}")
    print(f"volume ratio (boxes / original bounds): {red.volume_ratio_:.6g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_solve_constrained(args):
    p = resolve_problem(args.problem)
    boxes = None
    if args.clusters:
        try:
            doc, boxes = load_clusters(args.clusters)
        except FileNotFoundError:
            raise UsageError(f"clusters file {args.clusters} not found; run `labopt cssr` first") from None
        except (ValueError, OSError) as exc:
            raise UsageError(str(exc)) from None
        if doc.get("problem") not in (None, p.name):
            print(f"warning: clusters were computed for {doc.get('problem')!r}, not {p.name!r}",
                  file=sys.stderr)
    base = LabConfig(n=args.n, G=args.groups, max_iter=args.max_iter, seed=args.seed)
    cfg = ConstrainedConfig(base=base, omega=args.omega, beta=args.beta)
    records = run_campaign(Campaign(p, "constrained", args.runs, cfg, boxes), jobs=_jobs(args))
    _emit(records, args, p)
    return EXIT_OK


def cmd_stats(args):
    if args.test == "wilcoxon":
        a, b = _read_column(args.a), _read_column(args.b)
        r = wilcoxon_signed_rank(a, b)
        print(f"p-value {r.p_value:.4E}  T+ {r.t_plus:g}  T- {r.t_minus:g}  "
              f"n {r.n_effective}  method {r.method}  winner {r.winner(args.alpha)}")
        return EXIT_OK
    names, M = _read_matrix(args.matrix)
    r = friedman(M)
    width = max(len(n) for n in names)
    print(f"{'algorithm':<{width}}  mean rank  rank")
    for name, mr, o in zip(names, r.mean_ranks, r.ordering):
        print(f"{name:<{width}}  {mr:9.4f}  {o:4d}")
    print(f"chi-square {r.statistic:.6g}  p-value {r.p_value:.4E}")
    return EXIT_OK


def cmd_list_problems(args):
    for e in registry():
        print(f"{e.name:<20} dim {e.dim:<3} [{e.lower:g}, {e.upper:g}]  best {e.known_best:.10g}")
    for name in problem_names()[len(registry()):]:
        p = get_problem(name)
        print(f"{name:<20} dim {p.dim:<3} constraints {p.n_constraints}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "cssr": cmd_cssr,
    "solve-constrained": cmd_solve_constrained,
    "stats": cmd_stats,
    "list-problems": cmd_list_problems,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InfeasibleRegion, EmptyFeasible, AllNoise) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GridTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, LabOptError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
