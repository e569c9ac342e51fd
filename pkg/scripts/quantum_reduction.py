"""Random measurement strategies under random erasure schedules.

Checks that every noisy run is a member of the source class of its own
induced channel family, then synthesises schedules back from random members
and reports the worst mismatch.

    python3 scripts/quantum_reduction.py --trials 200 --max-dim 4 --max-n 3
"""

import argparse
import random

import numpy as np

from erasure_sources.quantum import (
    induced_channel_family,
    random_schedule,
    random_strategy,
    run_noisy_strategy,
    schedule_from_source,
    verify_reduction,
)
from erasure_sources.source_model import ErasureAlphabet, random_delta_source


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--max-dim", type=int, default=4)
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pyrng = random.Random(args.seed)
    ok = 0
    worst = 0.0
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_n + 1))
        dim = int(rng.integers(1, args.max_dim + 1))
        s = random_strategy(rng, n, dim, ErasureAlphabet(("0", "1")))
        ok += verify_reduction(s, random_schedule(s, args.delta, rng))

        target = random_delta_source(induced_channel_family(s), args.delta, pyrng)
        rerun = run_noisy_strategy(s, schedule_from_source(target, s, args.delta))
        for h, d in target.items():
            worst = max(worst, max(abs(a - b) for a, b in zip(d.probs, rerun.conditional(h).probs)))

    print(f"reduction verified: {ok}/{args.trials}")
    print(f"schedule synthesis: worst conditional mismatch {worst:.3e}")


if __name__ == "__main__":
    main()
