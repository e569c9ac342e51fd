"""Finite distributions and channels over ordered alphabets.

Two numeric backends are supported.  ``"exact"`` stores every probability as a
:class:`fractions.Fraction` (ints are promoted), ``"float"`` stores Python
floats.  A single object never mixes the two, and binary operations refuse
arguments from different backends: ``Fraction + float`` silently degrades to
float in Python, which would hide rounding inside an exact computation.
"""

from __future__ import annotations

import math
from itertools import product
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .config import FLOAT_TOL

Scalar = Union[Fraction, float]
Symbol = Hashable

EXACT = "exact"
FLOAT = "float"


class BackendError(TypeError):
    """Raised when exact and float values meet in one computation."""


def backend_of(values: Iterable) -> str:
    kinds = set()
    for v in values:
        if isinstance(v, bool):
            raise TypeError("booleans are not probabilities")
        if isinstance(v, (Fraction, int)):
            kinds.add(EXACT)
        elif isinstance(v, float):
            kinds.add(FLOAT)
        else:
            raise TypeError(f"unsupported scalar type {type(v).__name__}")
    if len(kinds) > 1:
        raise BackendError("mixed exact/float values")
    return kinds.pop() if kinds else EXACT


def coerce(value, backend: str) -> Scalar:
    """Convert ``value`` (int, Fraction, float or a ``"p/q"``/decimal string) to ``backend``."""
    if backend == EXACT:
        if isinstance(value, float):
            raise BackendError("refusing to convert a float into the exact backend")
        return Fraction(value)
    if backend == FLOAT:
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    raise ValueError(f"unknown backend {backend!r}")


def zero(backend: str) -> Scalar:
    return Fraction(0) if backend == EXACT else 0.0


def one(backend: str) -> Scalar:
    return Fraction(1) if backend == EXACT else 1.0


def _tol(backend: str) -> Scalar:
    return 0 if backend == EXACT else FLOAT_TOL


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability vector over an ordered alphabet.

    ``probs[k]`` is the probability of ``alphabet[k]``.  Validity (non-negative,
    normalised) is checked on construction: exactly for the exact backend and
    within ``FLOAT_TOL`` for floats.
    """

    alphabet: tuple
    probs: tuple

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if len(alphabet) == 0:
            raise ValueError("empty alphabet")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("duplicate symbols in alphabet")
        if len(self.probs) != len(alphabet):
            raise ValueError("alphabet and probability vector differ in length")
        backend = backend_of(self.probs)
        probs = tuple(coerce(p, backend) for p in self.probs)
        tol = _tol(backend)
        for s, p in zip(alphabet, probs):
            if p < -tol:
                raise ValueError(f"negative probability {p} for symbol {s!r}")
        total = sum(probs, zero(backend))
        if abs(total - 1) > tol:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_index", {s: k for k, s in enumerate(alphabet)})
        object.__setattr__(self, "_backend", backend)

    @classmethod
    def from_mapping(cls, probs: Mapping, alphabet: Sequence | None = None) -> "FiniteDistribution":
        """Build from ``{symbol: p}``; symbols of ``alphabet`` missing from the map get 0."""
        if alphabet is None:
            alphabet = tuple(probs)
        extra = set(probs) - set(alphabet)
        if extra:
            raise ValueError(f"symbols {sorted(map(repr, extra))} not in alphabet")
        backend = backend_of(probs.values())
        return cls(tuple(alphabet), tuple(probs.get(s, zero(backend)) for s in alphabet))

    @classmethod
    def uniform(cls, alphabet: Sequence, backend: str = EXACT) -> "FiniteDistribution":
        k = len(alphabet)
        p = Fraction(1, k) if backend == EXACT else 1.0 / k
        return cls(tuple(alphabet), (p,) * k)

    @classmethod
    def point_mass(cls, alphabet: Sequence, symbol, backend: str = EXACT) -> "FiniteDistribution":
        return cls(tuple(alphabet), tuple(one(backend) if s == symbol else zero(backend) for s in alphabet))

    @property
    def backend(self) -> str:
        return self._backend

    def __getitem__(self, symbol) -> Scalar:
        try:
            return self.probs[self._index[symbol]]
        except KeyError:
            raise KeyError(f"symbol {symbol!r} not in alphabet") from None

    def get(self, symbol, default=None):
        k = self._index.get(symbol)
        return default if k is None else self.probs[k]

    def __iter__(self) -> Iterator:
        return iter(self.alphabet)

    def __len__(self) -> int:
        return len(self.alphabet)

    def items(self):
        return zip(self.alphabet, self.probs)

    def support(self) -> tuple:
        return tuple(s for s, p in self.items() if p > 0)

    def to_float(self) -> "FiniteDistribution":
        return FiniteDistribution(self.alphabet, tuple(float(p) for p in self.probs))

    def pushforward(self, func: Callable, alphabet: Sequence) -> "FiniteDistribution":
        """Distribution of ``func(X)``; ``alphabet`` fixes the output order."""
        out = {s: zero(self.backend) for s in alphabet}
        for s, p in self.items():
            y = func(s)
            if y not in out:
                raise ValueError(f"image {y!r} of {s!r} not in output alphabet")
            out[y] += p
        return FiniteDistribution(tuple(alphabet), tuple(out[s] for s in alphabet))


def _check_compatible(p: FiniteDistribution, q: FiniteDistribution) -> str:
    if p.alphabet != q.alphabet:
        raise ValueError("incompatible distributions: alphabets differ")
    if p.backend != q.backend:
        raise BackendError("incompatible distributions: backends differ")
    return p.backend


def l1_distance(p: FiniteDistribution, q: FiniteDistribution) -> Scalar:
    """Sum over symbols of ``|p(x) - q(x)|``, in ``[0, 2]``."""
    backend = _check_compatible(p, q)
    return sum((abs(a - b) for a, b in zip(p.probs, q.probs)), zero(backend))


def shannon_entropy(p: FiniteDistribution) -> float:
    h = 0.0
    for x in p.probs:
        x = float(x)
        if x > 0:
            h -= x * math.log2(x)
    # -0.0 for point masses reads oddly in reports
    return h + 0.0


def min_entropy(p: FiniteDistribution) -> float:
    return -math.log2(float(max(p.probs))) + 0.0


@dataclass(frozen=True)
class Channel:
    """Conditional distribution table from histories of a fixed length.

    ``table`` maps every tuple in ``input_symbols ** arity`` to a distribution
    over ``output_alphabet``.
    """

    arity: int
    input_symbols: tuple
    output_alphabet: tuple
    table: Mapping

    def __post_init__(self):
        object.__setattr__(self, "input_symbols", tuple(self.input_symbols))
        object.__setattr__(self, "output_alphabet", tuple(self.output_alphabet))
        object.__setattr__(self, "table", dict(self.table))
        for h in sequences(self.input_symbols, self.arity):
            if h not in self.table:
                raise ValueError(f"channel has no entry for input {h!r}")
            d = self.table[h]
            if not isinstance(d, FiniteDistribution):
                raise TypeError(f"entry for {h!r} is not a FiniteDistribution")
            if d.alphabet != self.output_alphabet:
                raise ValueError(f"entry for {h!r} has alphabet {d.alphabet!r}")
        if len(self.table) != len(self.input_symbols) ** self.arity:
            raise ValueError("channel table has entries outside the declared input set")

    def __getitem__(self, history) -> FiniteDistribution:
        return self.table[tuple(history)]

    @classmethod
    def constant(cls, arity: int, input_symbols: Sequence, dist: FiniteDistribution) -> "Channel":
        return cls(arity, tuple(input_symbols), dist.alphabet,
                   {h: dist for h in sequences(input_symbols, arity)})


def sequences(symbols: Sequence, length: int) -> Iterator[tuple]:
    """All tuples of ``length`` over ``symbols`` in lexicographic declared order."""
    return product(tuple(symbols), repeat=length)
