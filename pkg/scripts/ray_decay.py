"""Trace u(r e^{2pi i alpha}) along the dyadic radial ladder.

For Diophantine rotation numbers the trace flattens onto a plateau near
rho(alpha); for rationals it runs off to -infinity at a slope close to
ln(2)/q per depth step.  Useful for eyeballing where the plateau starts
before trusting a radial estimate at some depth.

    python3 scripts/ray_decay.py --family quadratic --alpha golden --alpha rat:1/2
"""

import argparse
import csv
import sys

from siegelnum import get_family, parse_rotation, rho_radial
from siegelnum.errors import SiegelnumError


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="quadratic")
    ap.add_argument("--alpha", action="append", default=None,
                    help="rotation spec (repeatable); default golden + silver + rat:1/2")
    ap.add_argument("--depth", type=int, default=14)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--csv", default=None, help="optional CSV output path")
    args = ap.parse_args()

    fam = get_family(args.family)
    specs = args.alpha or ["golden", "silver", "rat:1/2"]
    rows = []
    for spec in specs:
        rot = parse_rotation(spec)
        try:
            est = rho_radial(fam, rot, depth=args.depth, n=args.n)
        except SiegelnumError as exc:
            print(f"{spec}: no estimate ({exc})", file=sys.stderr)
            continue
        tag = "-> -inf" if est.diverging_to_minus_infinity else f"rho_hat {est.rho_hat:+.4f}"
        print(f"\n{spec}  (alpha = {rot.value:.12f})  {tag}")
        print(f"  {'r':>12}  {'u':>10}")
        for r, u in est.samples:
            print(f"  {r:12.8f}  {u:10.4f}")
            rows.append({"alpha": spec, "r": r, "u": u})
        if est.failures:
            print(f"  ({len(est.failures)} depths failed: {est.failures[0]} ...)")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["alpha", "r", "u"])
            w.writeheader()
            w.writerows(rows)
        print(f"\nwrote {len(rows)} rows to {args.csv}")


if __name__ == "__main__":
    main()
