"""Seeded multi-run campaigns, result files and summary statistics."""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import derive_seed
from .constrained import optimize_constrained
from .lab import optimize
from .population import ConstrainedConfig, LabConfig
from .problem import evaluate, resolve_problem

__all__ = [
    "CSV_FIELDS",
    "Campaign",
    "run_seed",
    "run_campaign",
    "records_to_csv",
    "write_csv",
    "read_csv",
    "write_trace",
    "summarize",
    "format_summary",
    "audit_records",
    "default_jobs",
]

CSV_FIELDS = ["run_id", "seed", "problem", "best_f", "best_x", "evaluations", "iterations", "wall_ms"]


@dataclass
class Campaign:
    """A batch of seeded runs of one problem.

    ``variant`` is ``"unconstrained"`` or ``"constrained"``; ``config`` is
    a :class:`LabConfig` or :class:`ConstrainedConfig` whose seed is the
    master seed of the campaign.
    """

    problem: object
    variant: str = "unconstrained"
    runs: int = 30
    config: object = field(default_factory=LabConfig)
    boxes: Optional[list] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.variant not in ("unconstrained", "constrained"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def master_seed(self):
        base = self.config.base if isinstance(self.config, ConstrainedConfig) else self.config
        return base.seed


def run_seed(master, run_index):
    return derive_seed(master, run_index)


def default_jobs():
    env = os.environ.get("LAB_OPT_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _one_run(args):
    problem, variant, config, boxes, run_index = args
    p = resolve_problem(problem)
    if variant == "unconstrained":
        cfg = LabConfig(**{**config.__dict__, "seed": run_seed(config.seed, run_index)})
        rec = optimize(p, cfg)
    else:
        base = LabConfig(**{**config.base.__dict__, "seed": run_seed(config.base.seed, run_index)})
        cfg = ConstrainedConfig(base=base, omega=config.omega, beta=config.beta,
                                init_rejection_cap=config.init_rejection_cap)
        rec = optimize_constrained(p, boxes, cfg)
    rec.seed = cfg.seed if variant == "unconstrained" else cfg.base.seed
    return rec


def run_campaign(c: Campaign, jobs=1):
    """Execute every run; results come back in run order regardless of ``jobs``."""
    tasks = [(c.problem, c.variant, c.config, c.boxes, i) for i in range(c.runs)]
    if jobs <= 1 or c.runs == 1:
        return [_one_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one_run, tasks))


def _fmt(v):
    return "%.17g" % v


def records_to_csv(records, include_wall=True):
    """CSV text for a list of run records (one row per run)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    fields = CSV_FIELDS if include_wall else CSV_FIELDS[:-1]
    w.writerow(fields)
    for i, r in enumerate(records):
        row = [i, r.seed, r.problem, _fmt(r.best_value),
               ";".join(_fmt(v) for v in r.best_position), r.evaluations, r.iterations]
        if include_wall:
            row.append("%.3f" % r.wall_ms)
        w.writerow(row)
    return buf.getvalue()


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


def read_csv(path):
    """Rows of a results file as dicts with ``best_f``/``best_x`` parsed."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["best_f"] = float(r["best_f"])
        r["best_x"] = np.array([float(v) for v in r["best_x"].split(";")])
    return rows


def write_trace(records, path):
    """Append-free JSONL trace: one ``{run, iter, best_f}`` object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, r in enumerate(records):
            lines = [json.dumps({"run": i, "iter": k, "best_f": float(v)})
                     for k, v in enumerate(r.trace)]
            fh.write("\n".join(lines) + "\n")


def summarize(records):
    """Mean, sample standard deviation, best, worst and mean runtime (s)."""
    vals = np.array([r.best_value for r in records], dtype=float)
    return {
        "runs": int(vals.size),
        "mean": float(vals.mean()),
        "std": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
        "best": float(vals.min()),
        "worst": float(vals.max()),
        "runtime": float(np.mean([r.wall_ms for r in records]) / 1e3),
    }


def format_summary(name, s):
    rows = [("Mean", s["mean"]), ("Std. Dev.", s["std"]), ("Best", s["best"]), ("Worst", s["worst"])]
    out = [f"{name} ({s['runs']} runs)"]
    out += [f"  {label:<10} {value:.6E}" for label, value in rows]
    out.append(f"  {'Runtime':<10} {s['runtime']:.3f} s")
    return "\n".join(out)


def audit_records(p, records, rel_tol=1e-9):
    """Re-evaluate every reported best point; returns a list of problems found."""
    p = resolve_problem(p)
    issues = []
    for i, r in enumerate(records):
        f, g = evaluate(p, r.best_position)
        if abs(f - r.best_value) > rel_tol * max(1.0, abs(f)):
            issues.append(f"run {i}: reported {r.best_value!r}, re-evaluated {f!r}")
        if g.size and g.max() > p.feas_tol:
            issues.append(f"run {i}: best point violates a constraint by {g.max():.3g}")
    return issues
