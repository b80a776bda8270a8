"""Write one trace per stratum (plus both lightlike branches) for plotting.

    python3 scripts/export_traces.py --out traces/ --format csv
"""

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from engel_lorentz.cli import RunConfig, to_csv, to_json, trace_table
from engel_lorentz.expmap import t_supr
from engel_lorentz.vertical import SPACELIKE_STRATA, TIMELIKE_STRATA, sample_covector


@dataclass
class ExportConfig:
    out: Path
    fmt: str = "csv"
    seed: int = 0
    samples: int = 400
    t_cap: float = 5.0
    fraction: float = 0.9


def export(cfg: ExportConfig) -> list[dict]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    index = []
    jobs = []
    for st in TIMELIKE_STRATA + SPACELIKE_STRATA:
        lam = sample_covector(st, rng)
        t_end = min(cfg.t_cap, cfg.fraction * t_supr(lam))
        jobs.append((st.value, RunConfig("trace", lam.causal.value, lam.theta, lam.c, lam.alpha,
                                         lam.branch_sign, t_end, cfg.samples, cfg.fmt)))
    for b, name in ((1, "LIGHT_plus"), (-1, "LIGHT_minus")):
        jobs.append((name, RunConfig("trace", "lightlike", branch_sign=b, t_end=cfg.t_cap,
                                     samples=cfg.samples, format=cfg.fmt)))
    for name, rc in jobs:
        table = trace_table(rc)
        meta = {"stratum": name, "theta": rc.theta, "c": rc.c, "alpha": rc.alpha, "t_end": rc.t_end}
        text = to_csv(table) if cfg.fmt == "csv" else to_json(table, meta)
        path = cfg.out / f"{name}.{cfg.fmt}"
        path.write_text(text, encoding="utf-8")
        index.append({**meta, "file": path.name})
    (cfg.out / "index.json").write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")
    return index


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("traces"))
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=400)
    a = ap.parse_args()
    for row in export(ExportConfig(a.out, a.format, a.seed, a.samples)):
        print(f"{row['stratum']:12s} t_end={row['t_end']:.4g}  -> {row['file']}")


if __name__ == "__main__":
    main()
