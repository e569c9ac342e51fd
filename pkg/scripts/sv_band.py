"""How close random erasure sources come to the edge of the SV band.

For each delta, simulate SV bits from random members of the class and
report the extreme conditional probabilities of 0 next to alpha.

    python3 scripts/sv_band.py --n 3 --trials 50
"""

import argparse
import random
from fractions import Fraction

from erasure_sources.sv_bridge import SvSimulation, simulate_sv, sv_band, sv_channel_family
from erasure_sources.source_model import random_delta_source


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print(f"{'delta':>6} {'alpha':>6} {'min P(0)':>10} {'max P(0)':>10}")
    for delta in (Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(1, 2), Fraction(1)):
        fam = sv_channel_family(args.n, delta)
        vals = []
        for _ in range(args.trials):
            y = simulate_sv(random_delta_source(fam, delta, rng), delta)
            vals.extend(sv_band(y).values())
        alpha = SvSimulation.for_delta(delta).alpha
        print(f"{str(delta):>6} {str(alpha):>6} {float(min(vals)):10.4f} {float(max(vals)):10.4f}")


if __name__ == "__main__":
    main()
