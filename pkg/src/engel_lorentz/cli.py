"""Command line: trace, classify, maxwell, validate, lightlike.

Exit codes: 0 success, 1 argument error, 2 domain error (e.g. t_end at or
past t_supr), 3 failed validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .engel import Causal
from .expmap import exp, exp_lightlike, t_supr
from .maxwell import maxwell_times
from .validate import SUITES, ValidateConfig, run, summary
from .vertical import Covector, classify, energy, energy_of_state, hamiltonian_of_state, vertical_flow

COLUMNS = ("t", "x1", "x2", "y", "z", "theta", "c", "H", "E")

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_FAILED = 0, 1, 2, 3


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    causal: str = "timelike"
    theta: float = 0.0
    c: float = 0.0
    alpha: float = 0.0
    branch_sign: int = 1
    t_end: float = 1.0
    samples: int = 101
    format: str = "csv"
    seed: int = 0
    out: str | None = None

    def covector(self) -> Covector:
        return Covector(Causal(self.causal), self.theta, self.c, self.alpha, self.branch_sign)


def _branch(s: str) -> int:
    v = int(s)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("branch must be +1 or -1")
    return v


def _samples(s: str) -> int:
    v = int(s)
    if v < 2:
        raise argparse.ArgumentTypeError("samples must be at least 2")
    return v


def _covector_flags(p: argparse.ArgumentParser, causal_choices):
    p.add_argument("--causal", choices=causal_choices, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--branch", type=_branch, default=1)


def _output_flags(p: argparse.ArgumentParser):
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--samples", type=_samples, default=101)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="engel-lorentz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tr = sub.add_parser("trace", help="sample an extremal")
    _covector_flags(tr, ("timelike", "spacelike", "lightlike"))
    _output_flags(tr)

    cl = sub.add_parser("classify", help="stratum of a covector")
    _covector_flags(cl, ("timelike", "spacelike"))

    mx = sub.add_parser("maxwell", help="Maxwell times and cut-time bound")
    _covector_flags(mx, ("timelike", "spacelike"))

    va = sub.add_parser("validate", help="run the invariant suites")
    va.add_argument("--only", choices=SUITES, default=None)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--tol", type=float, default=None, help="override every tolerance")

    ll = sub.add_parser("lightlike", help="sample a lightlike extremal")
    ll.add_argument("--branch", type=_branch, required=True)
    _output_flags(ll)
    return p


# ------------------------------------------------------------ tables

def trace_table(cfg: RunConfig) -> np.ndarray:
    """Rows (t, x1, x2, y, z, theta, c, H, E) on a uniform grid of [0, t_end]."""
    if not cfg.t_end > 0:
        raise ValueError(f"t_end must be positive, got {cfg.t_end}")
    t = np.linspace(0.0, cfg.t_end, cfg.samples)
    if cfg.causal == "lightlike":
        pts = exp_lightlike(t, cfg.branch_sign)
        nan = np.full_like(t, np.nan)
        return np.column_stack([t, pts, nan, nan, np.zeros_like(t), nan])
    lam = cfg.covector()
    ts = t_supr(lam)
    if not cfg.t_end < ts:
        raise ValueError(f"t_end={cfg.t_end} must be below t_supr={ts}")
    pts = exp(lam, t)
    th, c = vertical_flow(lam, t)
    states = np.column_stack([pts, th, c, np.full_like(t, lam.alpha)])
    H = hamiltonian_of_state(states, lam.causal, lam.branch_sign)
    E = energy_of_state(states, lam.causal, lam.branch_sign)
    return np.column_stack([t, pts, th, c, H, E])


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def to_csv(table: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in table:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_num(v: float):
    v = float(v)
    return v if np.isfinite(v) else None


def to_json(table: np.ndarray, meta: dict) -> str:
    rows = [[_json_num(v) for v in row] for row in table]
    return json.dumps({**meta, "columns": list(COLUMNS), "rows": rows}, indent=1) + "\n"


def read_table(text: str, fmt: str) -> np.ndarray:
    """Parse a trace back into an array; the inverse of to_csv / to_json."""
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if tuple(rows[0]) != COLUMNS:
            raise ValueError(f"unexpected header {rows[0]}")
        return np.array([[float(v) for v in r] for r in rows[1:]])
    doc = json.loads(text)
    return np.array([[np.nan if v is None else v for v in r] for r in doc["rows"]], dtype=float)


def _meta(cfg: RunConfig) -> dict:
    meta = {"causal": cfg.causal, "branch": cfg.branch_sign, "t_end": cfg.t_end, "samples": cfg.samples}
    if cfg.causal != "lightlike":
        lam = cfg.covector()
        ts = t_supr(lam)
        meta.update(theta=cfg.theta, c=cfg.c, alpha=cfg.alpha, stratum=classify(lam).value,
                    t_supr=ts if np.isfinite(ts) else None)
    return meta


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ------------------------------------------------------------ commands

def cmd_trace(cfg: RunConfig) -> int:
    table = trace_table(cfg)
    text = to_csv(table) if cfg.format == "csv" else to_json(table, _meta(cfg))
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    lam = cfg.covector()
    ts = t_supr(lam)
    doc = {"stratum": classify(lam).value, "energy": energy(lam.reduced()[0]),
           "t_supr": ts if np.isfinite(ts) else None}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_maxwell(cfg: RunConfig) -> int:
    sys.stdout.write(maxwell_times(cfg.covector()).to_json() + "\n")
    return EXIT_OK


def cmd_validate(seed: int, only: str | None, tol: float | None) -> int:
    vcfg = ValidateConfig(seed=seed, only=only, tol=tol)
    results = run(vcfg)
    doc = summary(results, vcfg)
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    if not doc["passed"]:
        for name in doc["failed"]:
            sys.stderr.write(f"FAILED {name}\n")
        return EXIT_FAILED
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ArgumentError as err:
        sys.stderr.write(f"{err}\n")
        return EXIT_PARSE
    try:
        if args.command == "validate":
            return cmd_validate(args.seed, args.only, args.tol)
        if args.command == "lightlike":
            cfg = RunConfig("lightlike", causal="lightlike", branch_sign=args.branch, t_end=args.t_end,
                            samples=args.samples, format=args.format, out=args.out)
            return cmd_trace(cfg)
        cfg = RunConfig(args.command, causal=args.causal, theta=args.theta, c=args.c,
                        alpha=args.alpha, branch_sign=args.branch)
        if args.command == "trace":
            cfg.t_end, cfg.samples, cfg.format, cfg.out = args.t_end, args.samples, args.format, args.out
            return cmd_trace(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        return cmd_maxwell(cfg)
    except (ValueError, ArithmeticError) as err:
        sys.stderr.write(f"domain error: {err}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
