"""Density-matrix simulation of adaptive measurement strategies with erasures.

A strategy applies, at step ``i``, a Kraus family chosen from the observed
history.  Each family has operators ``E[(x, u)]``: ``x`` is shown to the user,
``u`` is discarded.  In the noisy model an adversary replaces outcome ``x``
by the erasure symbol with probability ``lambda[(history, x)] <= delta``,
and an erased measurement leaves the state untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .config import DEFAULT_LIMITS, FLOAT_TOL, RENORM_GUARD, Limits
from .prob_core import Channel, FiniteDistribution, sequences
from .source_model import (
    AdaptiveSource,
    ChannelFamily,
    ErasureAlphabet,
    OutcomeCapExceeded,
    check_delta,
    find_delta_violation,
)


def _dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density operator must be a square matrix")
        if np.abs(m - _dagger(m)).max() > FLOAT_TOL:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(m) - 1) > FLOAT_TOL:
            raise ValueError(f"density operator has trace {np.trace(m).real:.12g}")
        if np.linalg.eigvalsh((m + _dagger(m)) / 2).min() < -FLOAT_TOL:
            raise ValueError("density operator is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket) -> "DensityOperator":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True, eq=False)
class KrausFamily:
    """Operators keyed by ``(observed, hidden)`` labels, complete up to ``FLOAT_TOL``."""

    operators: Mapping

    def __post_init__(self):
        ops = {}
        for key, e in dict(self.operators).items():
            if not (isinstance(key, tuple) and len(key) == 2):
                raise ValueError(f"Kraus label {key!r} must be an (observed, hidden) pair")
            e = np.array(e, dtype=complex)
            e.setflags(write=False)
            ops[key] = e
        if not ops:
            raise ValueError("empty Kraus family")
        shapes = {e.shape for e in ops.values()}
        if len(shapes) != 1 or len(next(iter(shapes))) != 2 or len(set(next(iter(shapes)))) != 1:
            raise ValueError("Kraus operators must be square matrices of one dimension")
        object.__setattr__(self, "operators", ops)
        dev = np.abs(self.completeness() - np.eye(self.dim)).max()
        if dev > FLOAT_TOL:
            raise ValueError(f"Kraus family is not complete (max deviation {dev:.3g})")

    @property
    def dim(self) -> int:
        return next(iter(self.operators.values())).shape[0]

    @property
    def outcomes(self) -> tuple:
        return tuple(dict.fromkeys(x for x, _ in self.operators))

    def completeness(self) -> np.ndarray:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for e in self.operators.values():
            acc = acc + _dagger(e) @ e
        return acc

    @classmethod
    def from_outcomes(cls, ops: Mapping) -> "KrausFamily":
        """``{x: [E_0, E_1, ...]}`` with hidden labels numbered in list order."""
        return cls({(x, u): e for x, es in ops.items() for u, e in enumerate(es)})

    @classmethod
    def measurement(cls, basis: np.ndarray, outcomes: Sequence) -> "KrausFamily":
        """Projective measurement onto the columns of ``basis``, labelled by ``outcomes``."""
        b = np.asarray(basis, dtype=complex)
        return cls({(x, 0): np.outer(b[:, k], b[:, k].conj()) for k, x in enumerate(outcomes)})


def compose(first: KrausFamily, then: KrausFamily) -> KrausFamily:
    """Apply ``first``, forget its observed outcome, then apply ``then``."""
    return KrausFamily({
        (x2, (x1, u1, u2)): e2 @ e1
        for (x1, u1), e1 in first.operators.items()
        for (x2, u2), e2 in then.operators.items()
    })


def _apply(rho: np.ndarray, op: KrausFamily, outcomes: Sequence):
    probs, states = [], {}
    for x in outcomes:
        acc = np.zeros_like(rho)
        for (xx, _), e in op.operators.items():
            if xx == x:
                acc = acc + e @ rho @ _dagger(e)
        p = max(float(np.trace(acc).real), 0.0)
        probs.append(p)
        # zero-probability outcomes keep the input state
        states[x] = acc / p if p > RENORM_GUARD else rho
    return probs, states


def apply_operation(rho: DensityOperator, op: KrausFamily, alphabet: Sequence | None = None):
    """Outcome distribution and renormalised post-measurement states.

    ``alphabet`` lists the observed labels to report (defaults to the
    family's own); labels without operators get probability 0.  Post-states
    are returned as arrays; an outcome of probability at most ``RENORM_GUARD``
    maps to the unchanged input state.
    """
    if rho.dim != op.dim:
        raise ValueError(f"state has dimension {rho.dim}, operation acts on {op.dim}")
    outcomes = tuple(alphabet) if alphabet is not None else op.outcomes
    missing = set(op.outcomes) - set(outcomes)
    if missing:
        raise ValueError(f"operation outcomes {sorted(map(repr, missing))} outside the alphabet")
    probs, states = _apply(rho.matrix, op, outcomes)
    return FiniteDistribution(outcomes, tuple(probs)), states


def prepare_state_operation(ensemble: Sequence, basis: np.ndarray | None = None, outcome="0") -> KrausFamily:
    """Operation mapping every state to ``sum_z p_z |psi_z><psi_z|``.

    ``ensemble`` is a list of ``(p_z, psi_z)``; operators are
    ``sqrt(p_z) |psi_z><i|`` over the orthonormal ``basis`` columns, all
    reporting the single observed label ``outcome``.
    """
    ps = [float(p) for p, _ in ensemble]
    if min(ps) < -FLOAT_TOL or abs(sum(ps) - 1) > FLOAT_TOL:
        raise ValueError("ensemble weights do not form a probability distribution")
    kets = [np.asarray(k, dtype=complex).reshape(-1) for _, k in ensemble]
    dim = kets[0].shape[0]
    for k in kets:
        if k.shape[0] != dim:
            raise ValueError("ensemble vectors have different dimensions")
        if abs(np.linalg.norm(k) - 1) > FLOAT_TOL:
            raise ValueError("ensemble vectors must be normalised")
    b = np.eye(dim, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if np.abs(_dagger(b) @ b - np.eye(dim)).max() > FLOAT_TOL:
        raise ValueError("basis is not orthonormal")
    return KrausFamily({
        (outcome, (z, i)): np.sqrt(max(p, 0.0)) * np.outer(kets[z], b[:, i].conj())
        for z, p in enumerate(ps)
        for i in range(dim)
    })


@dataclass(frozen=True, eq=False)
class AdaptiveStrategy:
    """Per-step Kraus families selected by the observed history.

    ``steps[k]`` maps histories of length ``k`` over ``alphabet.full`` to a
    family; ``defaults[k]``, when set, covers histories missing from it.
    """

    n: int
    alphabet: ErasureAlphabet
    initial: DensityOperator
    steps: tuple
    defaults: tuple = ()
    limits: Limits = DEFAULT_LIMITS

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(dict(s) for s in self.steps))
        defaults = tuple(self.defaults) or (None,) * self.n
        object.__setattr__(self, "defaults", defaults)
        if len(self.steps) != self.n or len(defaults) != self.n:
            raise ValueError(f"strategy declares {self.n} steps but defines {len(self.steps)}")
        if self.n > self.limits.max_steps:
            raise OutcomeCapExceeded(f"{self.n} steps exceeds the step cap {self.limits.max_steps}")
        if self.dim > self.limits.max_dim:
            raise OutcomeCapExceeded(f"dimension {self.dim} exceeds the cap {self.limits.max_dim}")
        base = set(self.alphabet.base)
        for k, table in enumerate(self.steps):
            for op in list(table.values()) + ([defaults[k]] if defaults[k] is not None else []):
                if op.dim != self.dim:
                    raise ValueError(f"step {k + 1} operation has dimension {op.dim}, state has {self.dim}")
                if not set(op.outcomes) <= base:
                    raise ValueError(f"step {k + 1} operation reports labels outside the base alphabet")

    @property
    def dim(self) -> int:
        return self.initial.dim

    def operation(self, history: Sequence) -> KrausFamily:
        history = tuple(history)
        k = len(history)
        op = self.steps[k].get(history, self.defaults[k])
        if op is None:
            raise KeyError(f"strategy defines no operation after history {history!r}")
        return op

    @classmethod
    def memoryless(cls, n: int, alphabet: ErasureAlphabet, initial: DensityOperator, op: KrausFamily,
                   limits: Limits = DEFAULT_LIMITS) -> "AdaptiveStrategy":
        return cls(n, alphabet, initial, ({},) * n, (op,) * n, limits)


@dataclass(frozen=True)
class ErasureSchedule:
    """Adversarial erasure weights ``lambda[(history, x)]``; absent pairs mean 0."""

    delta: float
    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        d = float(check_delta(self.delta, "float"))
        object.__setattr__(self, "delta", d)
        w = {}
        for (h, x), lam in dict(self.weights).items():
            lam = float(lam)
            if lam < -FLOAT_TOL or lam > d + FLOAT_TOL:
                raise ValueError(f"weight {lam} for ({h!r}, {x!r}) outside [0, delta={d}]")
            w[(tuple(h), x)] = lam
        object.__setattr__(self, "weights", w)

    def weight(self, history: Sequence, x) -> float:
        return self.weights.get((tuple(history), x), 0.0)


def _evolve(strategy: AdaptiveStrategy, with_erasures: bool):
    """Yield ``(history, Q(.|history))`` in step order, tracking post-states."""
    a = strategy.alphabet
    symbols = a.full if with_erasures else a.base
    states = {(): strategy.initial.matrix}
    for k in range(strategy.n):
        nxt = {}
        for h in sequences(symbols, k):
            rho = states[h]
            probs, post = _apply(rho, strategy.operation(h), a.base)
            yield h, probs
            if k + 1 < strategy.n:
                for x in a.base:
                    nxt[h + (x,)] = post[x]
                if with_erasures:
                    nxt[h + (a.erased,)] = rho
        states = nxt


def induced_channel_family(strategy: AdaptiveStrategy) -> ChannelFamily:
    """Ideal channels ``Q(x | history)`` for every erasure-augmented history."""
    a = strategy.alphabet
    tables = [dict() for _ in range(strategy.n)]
    for h, probs in _evolve(strategy, True):
        tables[len(h)][h] = FiniteDistribution(a.base, tuple(probs))
    return ChannelFamily(a, tuple(Channel(k, a.full, a.base, t) for k, t in enumerate(tables)))


def run_perfect_strategy(strategy: AdaptiveStrategy) -> FiniteDistribution:
    """Joint law of the outcomes when no measurement is erased."""
    a = strategy.alphabet
    total = len(a.base) ** strategy.n
    if total > strategy.limits.max_outcomes:
        raise OutcomeCapExceeded(f"outcome tree has {total} leaves, cap is {strategy.limits.max_outcomes}")
    mass = {(): 1.0}
    for h, probs in _evolve(strategy, False):
        for x, p in zip(a.base, probs):
            mass[h + (x,)] = mass[h] * p
    leaves = tuple(sequences(a.base, strategy.n))
    return FiniteDistribution(leaves, tuple(mass[s] for s in leaves))


def run_noisy_strategy(strategy: AdaptiveStrategy, schedule: ErasureSchedule) -> AdaptiveSource:
    """Observed-output source under ``schedule``: ``(1 - lambda) Q`` per symbol, rest erased."""
    a = strategy.alphabet
    tables = [dict() for _ in range(strategy.n)]
    for h, probs in _evolve(strategy, True):
        kept = tuple((1.0 - schedule.weight(h, x)) * q for x, q in zip(a.base, probs))
        tables[len(h)][h] = FiniteDistribution(a.full, kept + (max(1.0 - sum(kept), 0.0),))
    return AdaptiveSource(strategy.n, a.full, tuple(tables), a.erased)


def verify_reduction(strategy: AdaptiveStrategy, schedule: ErasureSchedule) -> bool:
    source = run_noisy_strategy(strategy, schedule)
    return find_delta_violation(source, induced_channel_family(strategy), schedule.delta) is None


def schedule_from_source(target: AdaptiveSource, strategy: AdaptiveStrategy, delta) -> ErasureSchedule:
    """Erasure weights under which ``strategy`` produces exactly ``target``.

    ``lambda = 1 - P(x|h) / Q(x|h)``, taken as 0 where ``Q(x|h)`` vanishes and
    clipped into ``[0, delta]`` to absorb float tolerance.
    """
    family = induced_channel_family(strategy)
    target = target.to_float() if target.backend != "float" else target
    d = float(check_delta(delta, "float"))
    bad = find_delta_violation(target, family, d)
    if bad is not None:
        h, x = bad
        raise ValueError(f"target is not a delta-source for this strategy: history {h!r}, symbol {x!r}")
    weights = {}
    for h, p in target.items():
        q = family.entry(h)
        for x in family.alphabet.base:
            lam = 1.0 - p[x] / q[x] if q[x] > RENORM_GUARD else 0.0
            weights[(h, x)] = min(max(lam, 0.0), d)
    return ErasureSchedule(d, weights)


# -- constructors used by examples, tests and scripts -------------------------

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def hadamard_measure(outcomes=("0", "1")) -> KrausFamily:
    """Hadamard followed by a computational-basis measurement: ``E_x = |x><x| H``."""
    return KrausFamily({(x, 0): np.outer(np.eye(2)[k], np.eye(2)[k]) @ HADAMARD for k, x in enumerate(outcomes)})


def hadamard_strategy(n: int, alphabet: ErasureAlphabet | None = None) -> AdaptiveStrategy:
    alphabet = alphabet or ErasureAlphabet(("0", "1"))
    return AdaptiveStrategy.memoryless(n, alphabet, DensityOperator.from_ket([1, 0]), hadamard_measure(alphabet.base))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    m = g @ _dagger(g)
    return DensityOperator(m / np.trace(m).real)


def random_kraus_family(dim: int, outcomes: Sequence, n_hidden: int, rng: np.random.Generator) -> KrausFamily:
    """Random complete family: draw Gaussian ``A``s and right-multiply by ``S^{-1/2}``."""
    raw = {(x, u): rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
           for x in outcomes for u in range(n_hidden)}
    s = sum((_dagger(a) @ a for a in raw.values()), np.zeros((dim, dim), dtype=complex))
    w, v = np.linalg.eigh(s)
    s_inv_half = v @ np.diag(w ** -0.5) @ _dagger(v)
    return KrausFamily({k: a @ s_inv_half for k, a in raw.items()})


def random_strategy(rng: np.random.Generator, n: int, dim: int, alphabet: ErasureAlphabet,
                    max_hidden: int = 2) -> AdaptiveStrategy:
    """A fully adaptive random strategy with a distinct family for every history."""
    steps = []
    for k in range(n):
        steps.append({
            h: random_kraus_family(dim, alphabet.base, int(rng.integers(1, max_hidden + 1)), rng)
            for h in sequences(alphabet.full, k)
        })
    return AdaptiveStrategy(n, alphabet, random_density(dim, rng), tuple(steps))


def random_schedule(strategy: AdaptiveStrategy, delta: float, rng: np.random.Generator) -> ErasureSchedule:
    a = strategy.alphabet
    w = {}
    for k in range(strategy.n):
        for h in sequences(a.full, k):
            for x in a.base:
                w[(h, x)] = float(rng.uniform(0.0, delta))
    return ErasureSchedule(delta, w)
