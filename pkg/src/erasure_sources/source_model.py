"""Adaptive sources with detectable erasures.

A source emits ``n`` symbols; the distribution of step ``i`` may depend on
every earlier output, including erasure symbols.  Conditionals are stored
densely for every history so that membership checks never have to guess at
unreachable branches.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .config import DEFAULT_LIMITS, FLOAT_TOL
from .prob_core import (
    EXACT,
    FLOAT,
    BackendError,
    Channel,
    FiniteDistribution,
    Scalar,
    coerce,
    sequences,
    zero,
)

BOTTOM = "_"


class OutcomeCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ErasureAlphabet:
    base: tuple
    erased: object = BOTTOM

    def __post_init__(self):
        base = tuple(self.base)
        object.__setattr__(self, "base", base)
        if self.erased in base:
            raise ValueError(f"erasure symbol {self.erased!r} collides with a base symbol")
        if len(set(base)) != len(base) or not base:
            raise ValueError("base alphabet must be non-empty with distinct symbols")

    @property
    def full(self) -> tuple:
        return self.base + (self.erased,)


def check_delta(delta, backend: str = EXACT) -> Scalar:
    """Coerce ``delta`` to ``backend`` and reject values outside ``[0, 1]``."""
    d = coerce(delta, backend)
    if d < 0 or d > 1:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return d


@dataclass(frozen=True)
class ChannelFamily:
    """Ideal channels ``Q_i`` from erasure-augmented histories to base symbols.

    ``channels[k]`` has arity ``k`` over ``alphabet.full`` and never puts mass
    on the erasure symbol (its output alphabet is ``alphabet.base``).
    """

    alphabet: ErasureAlphabet
    channels: tuple

    def __post_init__(self):
        channels = tuple(self.channels)
        object.__setattr__(self, "channels", channels)
        backends = set()
        for k, ch in enumerate(channels):
            if ch.arity != k:
                raise ValueError(f"channel {k + 1} has arity {ch.arity}, expected {k}")
            if ch.input_symbols != self.alphabet.full:
                raise ValueError(f"channel {k + 1} is not defined on the erasure-augmented alphabet")
            if ch.output_alphabet != self.alphabet.base:
                raise ValueError(f"channel {k + 1} outputs must be the base alphabet")
            backends.update(d.backend for d in ch.table.values())
        if len(backends) > 1:
            raise BackendError("channel family mixes backends")
        object.__setattr__(self, "backend", backends.pop() if backends else EXACT)

    @property
    def n(self) -> int:
        return len(self.channels)

    def entry(self, history: Sequence) -> FiniteDistribution:
        history = tuple(history)
        return self.channels[len(history)][history]

    @classmethod
    def constant(cls, n: int, alphabet: ErasureAlphabet, dist: FiniteDistribution) -> "ChannelFamily":
        return cls(alphabet, tuple(Channel.constant(k, alphabet.full, dist) for k in range(n)))

    @classmethod
    def uniform(cls, n: int, alphabet: ErasureAlphabet, backend: str = EXACT) -> "ChannelFamily":
        return cls.constant(n, alphabet, FiniteDistribution.uniform(alphabet.base, backend))


@dataclass(frozen=True)
class AdaptiveSource:
    """Joint law on ``symbols ** n`` given by per-history conditionals.

    ``conditionals[k]`` maps each history of length ``k`` to a distribution
    over ``symbols``.  ``erased`` names the erasure symbol when ``symbols``
    contains one (sources built against an :class:`ErasureAlphabet`).
    """

    n: int
    symbols: tuple
    conditionals: tuple
    erased: object = None

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        conds = tuple(dict(c) for c in self.conditionals)
        object.__setattr__(self, "conditionals", conds)
        if len(conds) != self.n:
            raise ValueError(f"expected {self.n} conditional tables, got {len(conds)}")
        if self.erased is not None and self.erased not in symbols:
            raise ValueError("erasure symbol missing from source alphabet")
        backends = set()
        for k, table in enumerate(conds):
            if len(table) != len(symbols) ** k:
                raise ValueError(f"step {k + 1}: expected {len(symbols) ** k} histories, got {len(table)}")
            for h in sequences(symbols, k):
                d = table.get(h)
                if d is None:
                    raise ValueError(f"step {k + 1}: no conditional for history {h!r}")
                if d.alphabet != symbols:
                    raise ValueError(f"step {k + 1}, history {h!r}: wrong alphabet {d.alphabet!r}")
                backends.add(d.backend)
        if len(backends) > 1:
            raise BackendError("source mixes backends")
        object.__setattr__(self, "backend", backends.pop() if backends else EXACT)

    def conditional(self, history: Sequence) -> FiniteDistribution:
        history = tuple(history)
        return self.conditionals[len(history)][history]

    def histories(self, step: int):
        """Histories preceding 1-based ``step``."""
        return sequences(self.symbols, step - 1)

    def items(self):
        """Yield ``(history, conditional)`` over all steps in order."""
        for table in self.conditionals:
            yield from table.items()

    @property
    def alphabet(self) -> ErasureAlphabet:
        if self.erased is None:
            raise ValueError("source has no erasure symbol")
        return ErasureAlphabet(tuple(s for s in self.symbols if s != self.erased), self.erased)

    def to_float(self) -> "AdaptiveSource":
        return AdaptiveSource(
            self.n, self.symbols,
            tuple({h: d.to_float() for h, d in t.items()} for t in self.conditionals),
            self.erased,
        )


def zero_erasure_source(family: ChannelFamily) -> AdaptiveSource:
    """The source that follows ``family`` exactly and never erases."""
    a = family.alphabet
    be = family.backend
    conds = []
    for ch in family.channels:
        conds.append({
            h: FiniteDistribution(a.full, q.probs + (zero(be),)) for h, q in ch.table.items()
        })
    return AdaptiveSource(family.n, a.full, tuple(conds), a.erased)


@dataclass(frozen=True)
class PerturbationBounds:
    """The interval ``[(1 - delta) P(x), P(x)]`` for each base symbol of ``P``."""

    delta: Scalar
    ideal: FiniteDistribution

    def lower(self, x) -> Scalar:
        return (1 - self.delta) * self.ideal[x]

    def upper(self, x) -> Scalar:
        return self.ideal[x]

    def violation(self, pbar: FiniteDistribution):
        """First base symbol whose probability under ``pbar`` leaves its interval, else None."""
        tol = 0 if self.ideal.backend == EXACT else FLOAT_TOL
        for x in self.ideal.alphabet:
            p = pbar[x]
            if p < self.lower(x) - tol or p > self.upper(x) + tol:
                return x
        return None


def _bounds(pbar: FiniteDistribution, p: FiniteDistribution, delta) -> PerturbationBounds:
    if pbar.backend != p.backend:
        raise BackendError("incompatible distributions: backends differ")
    missing = [x for x in p.alphabet if x not in pbar.alphabet]
    extra = [x for x in pbar.alphabet if x not in p.alphabet]
    if missing or len(extra) != 1:
        raise ValueError("alphabet mismatch: expected the ideal alphabet plus one erasure symbol")
    return PerturbationBounds(check_delta(delta, p.backend), p)


def in_perturbation_set(pbar: FiniteDistribution, p: FiniteDistribution, delta) -> bool:
    return _bounds(pbar, p, delta).violation(pbar) is None


def _check_structure(source: AdaptiveSource, family: ChannelFamily):
    if source.n != family.n:
        raise ValueError(f"source has {source.n} steps, channel family has {family.n}")
    if source.symbols != family.alphabet.full or source.erased != family.alphabet.erased:
        raise ValueError("source alphabet does not match the channel family's augmented alphabet")


def find_delta_violation(source: AdaptiveSource, family: ChannelFamily, delta):
    """First ``(history, symbol)`` whose conditional leaves the perturbation set, else None."""
    _check_structure(source, family)
    if source.backend != family.backend:
        raise BackendError("source and channel family use different backends")
    d = check_delta(delta, family.backend)
    for history, pbar in source.items():
        x = PerturbationBounds(d, family.entry(history)).violation(pbar)
        if x is not None:
            return history, x
    return None


def is_delta_source(source: AdaptiveSource, family: ChannelFamily, delta) -> bool:
    return find_delta_violation(source, family, delta) is None


def is_sv_source(source: AdaptiveSource, alpha) -> bool:
    """Check every bit's conditional probability of the first symbol lies in ``[alpha, 1 - alpha]``.

    Accepts binary sources, or sources over ``{0, 1, erased}`` that never
    erase; only erasure-free histories are inspected in the latter case.
    """
    base = tuple(s for s in source.symbols if s != source.erased)
    if len(base) != 2:
        raise ValueError("SV sources must have a binary base alphabet")
    if source.erased is not None:
        for history, d in source.items():
            if d[source.erased] != 0:
                raise ValueError(f"source places mass on the erasure symbol after {history!r}")
    a = coerce(alpha, source.backend)
    tol = 0 if source.backend == EXACT else FLOAT_TOL
    for k in range(source.n):
        for h in sequences(base, k):
            p0 = source.conditional(h)[base[0]]
            if p0 < a - tol or p0 > 1 - a + tol:
                return False
    return True


def enumerate_joint(source: AdaptiveSource, max_outcomes: int = DEFAULT_LIMITS.max_outcomes) -> FiniteDistribution:
    """Exact joint law over ``symbols ** n`` via the chain rule."""
    required = len(source.symbols) ** source.n
    if required > max_outcomes:
        raise OutcomeCapExceeded(f"joint has {required} outcomes, cap is {max_outcomes}")
    layer = [((), Fraction(1) if source.backend == EXACT else 1.0)]
    for _ in range(source.n):
        nxt = []
        for h, p in layer:
            for x, q in source.conditional(h).items():
                nxt.append((h + (x,), p * q))
        layer = nxt
    return FiniteDistribution(tuple(h for h, _ in layer), tuple(p for _, p in layer))


def prefix_marginals(joint: FiniteDistribution, n: int) -> list:
    """``out[k][h]`` is the probability of the length-``k`` prefix ``h``."""
    be = joint.backend
    out = [dict() for _ in range(n + 1)]
    for seq, p in joint.items():
        for k in range(n + 1):
            h = seq[:k]
            out[k][h] = out[k].get(h, zero(be)) + p
    return out


def source_from_joint(
    joint: FiniteDistribution,
    symbols: Sequence,
    n: int,
    erased=None,
    fallback: Callable | None = None,
) -> AdaptiveSource:
    """Recover per-history conditionals from a joint law on ``symbols ** n``.

    Histories of probability zero have no defined conditional; ``fallback``
    (called with the history) supplies one, uniform by default.
    """
    symbols = tuple(symbols)
    be = joint.backend
    marg = prefix_marginals(joint, n)
    conds = []
    for k in range(n):
        table = {}
        for h in sequences(symbols, k):
            ph = marg[k].get(h, zero(be))
            if ph > 0:
                table[h] = FiniteDistribution(symbols, tuple(marg[k + 1].get(h + (x,), zero(be)) / ph for x in symbols))
            elif fallback is not None:
                table[h] = fallback(h)
            else:
                table[h] = FiniteDistribution.uniform(symbols, be)
        conds.append(table)
    return AdaptiveSource(n, symbols, tuple(conds), erased)


def sample(source: AdaptiveSource, seed: int) -> tuple:
    """Draw one sequence; identical seeds give identical output."""
    rng = random.Random(seed)
    out = ()
    for _ in range(source.n):
        d = source.conditional(out)
        u = rng.random()
        acc = 0.0
        pick = None
        for x, p in d.items():
            if p <= 0:
                continue
            pick = x
            acc += float(p)
            if u < acc:
                break
        out += (pick,)
    return out


def random_member(ideal: FiniteDistribution, delta, rng: random.Random, erased=BOTTOM,
                  resolution: int = 97) -> FiniteDistribution:
    """A random element of the perturbation set of ``ideal``.

    Each base symbol keeps a fraction ``1 - delta * u`` of its ideal mass with
    ``u`` drawn from ``{0, 1/resolution, ..., 1}``; the remainder goes to
    ``erased``.
    """
    be = ideal.backend
    d = check_delta(delta, be)
    probs = []
    for q in ideal.probs:
        u = Fraction(rng.randint(0, resolution), resolution)
        probs.append((1 - d * u) * q if be == EXACT else (1 - d * float(u)) * q)
    bottom = 1 - sum(probs, zero(be))
    if be == FLOAT:
        bottom = max(bottom, 0.0)
    return FiniteDistribution(ideal.alphabet + (erased,), tuple(probs) + (bottom,))


def random_delta_source(family: ChannelFamily, delta, rng: random.Random, resolution: int = 97) -> AdaptiveSource:
    a = family.alphabet
    conds = []
    for ch in family.channels:
        conds.append({h: random_member(q, delta, rng, a.erased, resolution) for h, q in ch.table.items()})
    return AdaptiveSource(family.n, a.full, tuple(conds), a.erased)


def source_from_mapping(n: int, alphabet: ErasureAlphabet, table: Mapping) -> AdaptiveSource:
    """Build a source over ``alphabet.full`` from ``{history: {symbol: p}}``."""
    conds = [dict() for _ in range(n)]
    for h, row in table.items():
        h = tuple(h)
        conds[len(h)][h] = FiniteDistribution.from_mapping(row, alphabet.full)
    return AdaptiveSource(n, alphabet.full, tuple(conds), alphabet.erased)
