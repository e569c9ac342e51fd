"""Random instance generators shared by the test modules."""

from fractions import Fraction

from erasure_sources.adversary import ExtractorSpec, RandomizedSpec
from erasure_sources.prob_core import Channel, FiniteDistribution, sequences
from erasure_sources.source_model import ChannelFamily


def random_family(rng, n, alphabet, backend="exact"):
    chans = []
    for k in range(n):
        table = {}
        for h in sequences(alphabet.full, k):
            w = [rng.randint(0, 9) for _ in alphabet.base]
            if sum(w) == 0:
                w[0] = 1
            probs = tuple(Fraction(x, sum(w)) for x in w)
            table[h] = FiniteDistribution(alphabet.base, probs if backend == "exact" else tuple(map(float, probs)))
        chans.append(Channel(k, alphabet.full, alphabet.base, table))
    return ChannelFamily(alphabet, tuple(chans))


def random_extractor(rng, alphabet, n, outputs=(0, 1)):
    return ExtractorSpec.from_function(n, alphabet, lambda s: rng.choice(outputs), outputs)


def random_pair(rng, alphabet, n, outputs, near: bool):
    """A random (f, g); with ``near`` g copies f except on one rare auxiliary symbol."""
    f = random_extractor(rng, alphabet, n, outputs)
    aux = ("a", "b", "c")
    table, chan = {}, {}
    for s in sequences(alphabet.full, n):
        if near:
            rare = Fraction(rng.randint(0, 3), 400)
            w = (1 - rare, Fraction(0), rare) if rng.random() < 0.5 else (1 - rare - Fraction(1, 400), Fraction(1, 400), rare)
        else:
            raw = [rng.randint(0, 5) for _ in aux]
            raw[0] += 1
            w = tuple(Fraction(x, sum(raw)) for x in raw)
        chan[s] = FiniteDistribution(aux, w)
        for y in aux:
            if near and y != "c":
                table[(s, y)] = f(s)
            else:
                table[(s, y)] = rng.choice(outputs)
    g = RandomizedSpec(n, alphabet, outputs, aux, table, Channel(n, alphabet.full, aux, chan))
    return f, g
