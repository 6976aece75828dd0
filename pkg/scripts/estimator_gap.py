# Compare the radial-limit and coefficient-decay estimates of rho across
# a handful of rotation numbers.  The two probe different things (boundary
# behaviour of u vs decay of the conjugacy coefficients) so the gap is a
# cheap sanity check on both; anything past ~0.05 at these depths usually
# means the radial trace has not reached its plateau yet.

import numpy as np

from siegelnum import (
    cf_expand,
    get_family,
    golden_rotation,
    parse_rotation,
    rho_coefficient,
    rho_radial,
    silver_rotation,
)
from siegelnum.errors import SiegelnumError

FAMILIES = ["quadratic", "exp", "sin"]
ROTATIONS = [
    ("golden", golden_rotation()),
    ("silver", silver_rotation()),
    ("(sqrt3-1)/2", parse_rotation(f"float:{(np.sqrt(3) - 1) / 2}")),
    ("float:0.2548...", parse_rotation("float:0.254812")),
    ("float:0.7071...", parse_rotation(f"float:{np.sqrt(0.5)}")),
]
DEPTH = 14
N = 128

if __name__ == "__main__":
    print(f"{'family':<10} {'alpha':<16} {'radial':>9} {'coeff':>9} {'gap':>7}")
    worst = 0.0
    for fam_id in FAMILIES:
        fam = get_family(fam_id)
        for label, rot in ROTATIONS:
            try:
                rad = rho_radial(fam, rot, depth=DEPTH, n=N).rho_hat
                cof = rho_coefficient(fam, rot, N).rho_hat
            except SiegelnumError as exc:
                print(f"{fam_id:<10} {label:<16} failed: {exc}")
                continue
            gap = abs(rad - cof)
            worst = max(worst, gap)
            print(f"{fam_id:<10} {label:<16} {rad:9.4f} {cof:9.4f} {gap:7.3f}")
    print(f"\nworst gap {worst:.3f}")
    # cf digits of the float alphas, to see how Diophantine they look
    for label, rot in ROTATIONS[3:]:
        print(f"{label}: cf digits {cf_expand(rot.value, 10)}")
