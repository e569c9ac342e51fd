"""Turning an erasure source into a Santha-Vazirani source.

With ideal channels ``P_delta = ((1 + delta)/2, (1 - delta)/2)`` on ``{0, 1}``
and the deterministic post-processing ``gamma`` that reads an erasure as
``1``, every member of the source class yields an ``alpha``-SV source for
``alpha = (1 - delta)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import FLOAT_TOL
from .prob_core import EXACT, FiniteDistribution, min_entropy, sequences, shannon_entropy, zero
from .source_model import (
    BOTTOM,
    AdaptiveSource,
    ChannelFamily,
    ErasureAlphabet,
    check_delta,
    enumerate_joint,
    find_delta_violation,
    prefix_marginals,
)

SV_BASE = ("0", "1")
SV_ALPHABET = ErasureAlphabet(SV_BASE, BOTTOM)


def gamma(x, erased=BOTTOM) -> str:
    if x in SV_BASE:
        return x
    if x == erased:
        return "1"
    raise ValueError(f"gamma is defined on {{0, 1, {erased}}} only, got {x!r}")


@dataclass(frozen=True)
class SvSimulation:
    delta: Fraction
    alpha: Fraction
    channel: FiniteDistribution

    @classmethod
    def for_delta(cls, delta, backend: str = EXACT) -> "SvSimulation":
        d = check_delta(delta, backend)
        return cls(d, (1 - d) / 2, FiniteDistribution(SV_BASE, ((1 + d) / 2, (1 - d) / 2)))


def sv_channel_family(n: int, delta, backend: str = EXACT) -> ChannelFamily:
    return ChannelFamily.constant(n, SV_ALPHABET, SvSimulation.for_delta(delta, backend).channel)


def simulate_sv(source: AdaptiveSource, delta) -> AdaptiveSource:
    """Law of ``(gamma(X_1), ..., gamma(X_n))`` as a binary adaptive source.

    Conditionals of ``Y`` given a binary history are the probability-weighted
    mixture over all erasure-augmented histories mapping onto it.  A binary
    history of probability zero takes the unweighted mixture of its
    preimages' pushed-forward conditionals, which stays inside the SV band.
    """
    if source.symbols != SV_ALPHABET.full or source.erased != SV_ALPHABET.erased:
        raise ValueError("source must be over {0, 1, _}")
    family = sv_channel_family(source.n, delta, source.backend)
    bad = find_delta_violation(source, family, delta)
    if bad is not None:
        h, x = bad
        raise ValueError(f"source is not a delta-source for P_delta channels: history {h!r}, symbol {x!r}")
    be = source.backend
    n = source.n
    joint = enumerate_joint(source)
    yjoint = joint.pushforward(lambda s: tuple(gamma(x) for x in s), tuple(sequences(SV_BASE, n)))
    marg = prefix_marginals(yjoint, n)
    conds = []
    for k in range(n):
        table = {}
        for yh in sequences(SV_BASE, k):
            ph = marg[k].get(yh, zero(be))
            if ph > 0:
                table[yh] = FiniteDistribution(SV_BASE, tuple(marg[k + 1].get(yh + (y,), zero(be)) / ph for y in SV_BASE))
            else:
                pre = [xh for xh in sequences(SV_ALPHABET.full, k) if tuple(gamma(x) for x in xh) == yh]
                p0 = sum((source.conditional(xh).pushforward(gamma, SV_BASE)["0"] for xh in pre), zero(be)) / len(pre)
                table[yh] = FiniteDistribution(SV_BASE, (p0, 1 - p0))
        conds.append(table)
    return AdaptiveSource(n, SV_BASE, tuple(conds))


def sv_band(source: AdaptiveSource) -> dict:
    """Per-history probability of ``"0"`` for a binary source, keyed by history."""
    return {h: d["0"] for h, d in source.items()}


def check_entropy_inequality(source: AdaptiveSource, family: ChannelFamily, delta) -> bool:
    """Every conditional has Shannon and min-entropy at least those of its ideal channel entry."""
    d = check_delta(delta, family.backend)
    if d > Fraction(1, len(family.alphabet.base)):
        raise ValueError("hypothesis of the entropy inequality violated: delta > 1/|alphabet|")
    if find_delta_violation(source, family, d) is not None:
        raise ValueError("source is not a delta-source for the given channels")
    for h, p in source.items():
        q = family.entry(h)
        if shannon_entropy(p) < shannon_entropy(q) - FLOAT_TOL:
            return False
        if min_entropy(p) < min_entropy(q) - FLOAT_TOL:
            return False
    return True
