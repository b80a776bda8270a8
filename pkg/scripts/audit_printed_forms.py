"""Run the transcribed (uncorrected) closed forms against RK4 and list the
coordinates that disagree, next to the corrected forms for comparison."""

import argparse
import json

from engel_lorentz.expmap import SampleSpec, summarize, validate_closed_forms


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-stratum", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="dump the full summaries")
    a = ap.parse_args()
    base = dict(per_stratum=a.per_stratum, seed=a.seed)
    printed = summarize(validate_closed_forms(SampleSpec(verbatim=True, **base)))
    fixed = summarize(validate_closed_forms(SampleSpec(**base)))
    if a.json:
        print(json.dumps({"printed": printed, "corrected": fixed}, indent=2))
        return
    print(f"{'stratum':10s} {'printed':28s} {'corrected':10s} worst corrected error")
    for st in printed:
        sus = ",".join(printed[st]["suspect"]) or "-"
        worst = max(fixed[st]["max_err"].values())
        print(f"{st:10s} {printed[st]['verdict'] + ' ' + sus:28s} {fixed[st]['verdict']:10s} {worst:.1e}")


if __name__ == "__main__":
    main()
