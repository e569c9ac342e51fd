"""Run the attack on every binary extractor table and summarise the biases.

    python3 scripts/exhaustive_attack.py --n 2 --delta 1/5 1/10
"""

import argparse
import time
from collections import Counter
from fractions import Fraction
from itertools import product

from erasure_sources.adversary import ExtractorSpec, attack_extractor
from erasure_sources.prob_core import sequences
from erasure_sources.source_model import ChannelFamily, ErasureAlphabet


def all_tables(n, alphabet):
    seqs = list(sequences(alphabet.full, n))
    for bits in product((0, 1), repeat=len(seqs)):
        yield ExtractorSpec(n, alphabet, (0, 1), dict(zip(seqs, bits)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2, choices=(1, 2))
    ap.add_argument("--delta", nargs="+", default=["1/10", "1/5", "1/2"])
    args = ap.parse_args()

    alphabet = ErasureAlphabet(("0", "1"))
    fam = ChannelFamily.uniform(args.n, alphabet)
    print(f"{'delta':>6} {'tables':>7} {'min bias':>12} {'bound':>7} {'ratio':>7}  witnesses")
    for raw in args.delta:
        delta = Fraction(raw)
        start = time.perf_counter()
        biases, witnesses = [], Counter()
        for f in all_tables(args.n, alphabet):
            r = attack_extractor(f, fam, delta)
            biases.append(r.bias)
            witnesses[r.witness] += 1
        lo = min(biases)
        print(f"{str(delta):>6} {len(biases):>7} {str(lo):>12} {str(delta / 10):>7} {float(lo / (delta / 10)):7.3f}"
              f"  {dict(witnesses)}  ({time.perf_counter() - start:.2f}s)")


if __name__ == "__main__":
    main()
