"""Scan the periodic spacelike stratum for the order of its two Maxwell times.

t_MAX1 comes from the first root of f1, t_MAX2 = 4K/ae from the zero of sn p
at p = 2K.  Prints one row per modulus and the smallest relative gap; any
row with t_MAX1 <= t_MAX2 is flagged.
"""

import argparse

import numpy as np

from engel_lorentz.maxwell import c1_maxwell_times, params_from_modulus
from engel_lorentz.vertical import Stratum


def scan(k2_values, ae: float = 1.0):
    rows = []
    for k2 in k2_values:
        par = params_from_modulus(Stratum.SL_C1, float(k2), ae)
        t1, t2, _ = c1_maxwell_times(par)
        rows.append((float(k2), t1, t2, None if t1 is None else (t1 - t2) / t2))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=40, help="number of moduli in (0, 1)")
    ap.add_argument("--kmax", type=float, default=0.999)
    a = ap.parse_args()
    k2 = np.linspace(a.kmax / a.n, a.kmax, a.n)
    rows = scan(k2)
    print(f"{'k2':>8} {'t_MAX1':>12} {'t_MAX2':>12} {'gap':>8}")
    for k, t1, t2, gap in rows:
        flag = "" if gap is not None and gap > 0 else "  <-- counterexample"
        print(f"{k:8.4f} {t1 if t1 is not None else float('nan'):12.6f} {t2:12.6f} "
              f"{gap if gap is not None else float('nan'):8.4f}{flag}")
    gaps = [g for *_, g in rows if g is not None]
    print(f"min relative gap {min(gaps):.4f}; {len(rows) - len(gaps)} moduli without an f1 root")


if __name__ == "__main__":
    main()
