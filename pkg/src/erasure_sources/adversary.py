"""Adversarial sources that defeat a given extractor.

Given an extractor ``f`` and ideal channels ``Q``, the intermediate source
erases with probability exactly ``delta/2`` at every step.  Tilting its joint
law towards one preimage of ``f`` and away from the other yields two further
members of the source class whose ``f``-output laws differ by a constant
fraction of ``delta``.  Everything here is computed with exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Sequence

from .config import DEFAULT_LIMITS
from .prob_core import EXACT, BackendError, Channel, FiniteDistribution, l1_distance, sequences
from .source_model import (
    AdaptiveSource,
    ChannelFamily,
    ErasureAlphabet,
    check_delta,
    enumerate_joint,
    source_from_joint,
)

XTILDE, V_NAME, W_NAME = "X~", "V", "W"


@dataclass(frozen=True)
class ExtractorSpec:
    """A total function ``f`` on ``alphabet.full ** n`` given as a truth table."""

    n: int
    alphabet: ErasureAlphabet
    outputs: tuple
    table: Mapping

    def __post_init__(self):
        outputs = tuple(self.outputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "table", dict(self.table))
        if len(outputs) < 2 or len(set(outputs)) != len(outputs):
            raise ValueError("an extractor needs at least two distinct output symbols")
        for seq in sequences(self.alphabet.full, self.n):
            z = self.table.get(seq, _MISSING)
            if z is _MISSING:
                raise ValueError(f"extractor table has no entry for {seq!r}")
            if z not in outputs:
                raise ValueError(f"output {z!r} for {seq!r} not in the declared output set")

    def __call__(self, seq) -> Hashable:
        return self.table[tuple(seq)]

    @property
    def m(self) -> int:
        return math.ceil(math.log2(len(self.outputs)))

    @classmethod
    def from_function(cls, n: int, alphabet: ErasureAlphabet, func: Callable, outputs=(0, 1)) -> "ExtractorSpec":
        return cls(n, alphabet, tuple(outputs), {s: func(s) for s in sequences(alphabet.full, n)})

    def compose(self, code: Mapping) -> "ExtractorSpec":
        """``code o f`` for a coordinate map ``code: outputs -> {0, 1}``."""
        return ExtractorSpec(self.n, self.alphabet, (0, 1), {s: code[z] for s, z in self.table.items()})


_MISSING = object()


@dataclass(frozen=True)
class RandomizedSpec:
    """``g(x, y)`` with auxiliary input ``y`` drawn from ``aux_channel`` given ``x``."""

    n: int
    alphabet: ErasureAlphabet
    outputs: tuple
    aux_alphabet: tuple
    table: Mapping
    aux_channel: Channel

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "aux_alphabet", tuple(self.aux_alphabet))
        object.__setattr__(self, "table", dict(self.table))
        ch = self.aux_channel
        if ch.arity != self.n or ch.input_symbols != self.alphabet.full or ch.output_alphabet != self.aux_alphabet:
            raise ValueError("auxiliary channel must map full input sequences to the auxiliary alphabet")
        for seq in sequences(self.alphabet.full, self.n):
            for y in self.aux_alphabet:
                z = self.table.get((seq, y), _MISSING)
                if z is _MISSING:
                    raise ValueError(f"randomized table has no entry for {(seq, y)!r}")
                if z not in self.outputs:
                    raise ValueError(f"output {z!r} for {(seq, y)!r} not in the declared output set")

    def __call__(self, seq, y) -> Hashable:
        return self.table[(tuple(seq), y)]

    def compose(self, code: Mapping) -> "RandomizedSpec":
        return RandomizedSpec(self.n, self.alphabet, (0, 1), self.aux_alphabet,
                              {k: code[z] for k, z in self.table.items()}, self.aux_channel)

    @classmethod
    def from_function(cls, n, alphabet, func, aux_dist: FiniteDistribution, outputs=(0, 1)) -> "RandomizedSpec":
        """Randomized spec whose auxiliary input is independent of ``x`` with law ``aux_dist``."""
        aux = Channel.constant(n, alphabet.full, aux_dist)
        table = {(s, y): func(s, y) for s in sequences(alphabet.full, n) for y in aux_dist.alphabet}
        return cls(n, alphabet, tuple(outputs), aux_dist.alphabet, table, aux)

    @classmethod
    def deterministic(cls, f: ExtractorSpec) -> "RandomizedSpec":
        """``g(x, y) = f(x)`` with a trivial auxiliary input."""
        return cls.from_function(f.n, f.alphabet, lambda s, y: f(s),
                                 FiniteDistribution(("*",), (Fraction(1),)), f.outputs)


def uniform_guess(f: ExtractorSpec) -> RandomizedSpec:
    """The comparison task that ignores ``x`` and outputs a uniform symbol."""
    u = FiniteDistribution.uniform(f.outputs)
    return RandomizedSpec.from_function(f.n, f.alphabet, lambda s, y: y, u, f.outputs)


@dataclass(frozen=True)
class TiltParameters:
    tau: Fraction
    ratio_alpha: Fraction
    swapped: bool
    # output labels playing the roles of 0 and 1 in the tilt
    role0: Hashable = 0
    role1: Hashable = 1


@dataclass
class AttackReport:
    witness: str
    winning_source: AdaptiveSource
    bias: Fraction
    bound: Fraction
    certified: bool
    tilt: TiltParameters | None
    candidate_biases: dict
    agreement_weights: dict
    outcome_matrix: dict
    vacuous: bool = False
    notes: list = field(default_factory=list)


def _require_exact(family: ChannelFamily):
    if family.backend != EXACT:
        raise BackendError("adversarial constructions require the exact backend")


def _require_binary(f: ExtractorSpec):
    if len(f.outputs) != 2:
        raise ValueError("this construction needs a binary-output extractor")


def intermediate_source(family: ChannelFamily, delta) -> AdaptiveSource:
    """Source erasing with probability ``delta/2`` at every step, otherwise following ``Q``."""
    a = family.alphabet
    d = check_delta(delta, family.backend)
    keep = 1 - d / 2
    conds = []
    for ch in family.channels:
        conds.append({
            h: FiniteDistribution(a.full, tuple(keep * p for p in q.probs) + (d / 2,))
            for h, q in ch.table.items()
        })
    return AdaptiveSource(family.n, a.full, tuple(conds), a.erased)


def output_law(f, joint: FiniteDistribution) -> FiniteDistribution:
    return joint.pushforward(f, f.outputs)


def tilt_parameters(f: ExtractorSpec, xtilde_joint: FiniteDistribution, delta: Fraction) -> TiltParameters:
    pf = output_law(f, xtilde_joint)
    z0, z1 = f.outputs
    # ties keep the declared order
    swapped = pf[z0] > Fraction(1, 2)
    role0, role1 = (z1, z0) if swapped else (z0, z1)
    return TiltParameters(delta / 4, pf[role0] / pf[role1], swapped, role0, role1)


def _tilt_joint(f, xj: FiniteDistribution, tilt: TiltParameters, towards_role0: bool) -> FiniteDistribution:
    t, a = tilt.tau, tilt.ratio_alpha
    up0, down1 = (1 + t, 1 - a * t) if towards_role0 else (1 - t, 1 + a * t)
    probs = tuple(p * (up0 if f(s) == tilt.role0 else down1) for s, p in xj.items())
    return FiniteDistribution(xj.alphabet, probs)


def tilted_joints(f: ExtractorSpec, family: ChannelFamily, delta):
    """Joint laws of the intermediate and both tilted sources, plus the tilt parameters."""
    _require_exact(family)
    _require_binary(f)
    d = check_delta(delta)
    if d == 0:
        raise ValueError("tilt undefined at delta=0")
    xt = intermediate_source(family, d)
    xj = enumerate_joint(xt, DEFAULT_LIMITS.max_outcomes)
    tilt = tilt_parameters(f, xj, d)
    return xt, xj, _tilt_joint(f, xj, tilt, True), _tilt_joint(f, xj, tilt, False), tilt


def tilt_sources(f: ExtractorSpec, family: ChannelFamily, delta):
    """Return ``(V, W, tilt)``.

    ``V`` raises the mass of the preimage of ``tilt.role0`` by ``1 + tau`` and
    lowers the rest by ``1 - alpha*tau``; ``W`` does the opposite.  Histories
    of probability zero inherit the intermediate source's conditional.
    """
    xt, xj, vj, wj, tilt = tilted_joints(f, family, delta)
    a = family.alphabet
    v = source_from_joint(vj, a.full, f.n, a.erased, fallback=xt.conditional)
    w = source_from_joint(wj, a.full, f.n, a.erased, fallback=xt.conditional)
    return v, w, tilt


def agreement_weights(g: RandomizedSpec, label) -> dict:
    """``q[x] = Pr_y[g(x, y) == label]`` for every input sequence ``x``."""
    out = {}
    for seq in sequences(g.alphabet.full, g.n):
        aux = g.aux_channel[seq]
        out[seq] = sum((p for y, p in aux.items() if g(seq, y) == label), Fraction(0))
    return out


def g_output_law(g: RandomizedSpec, joint: FiniteDistribution) -> FiniteDistribution:
    acc = {z: Fraction(0) for z in g.outputs}
    for seq, p in joint.items():
        if p == 0:
            continue
        for y, q in g.aux_channel[seq].items():
            acc[g(seq, y)] += p * q
    return FiniteDistribution(g.outputs, tuple(acc[z] for z in g.outputs))


def outcome_matrix(f: ExtractorSpec, g: RandomizedSpec, joint: FiniteDistribution) -> dict:
    """``p[(z, w)] = Pr[f(X) = z, g(X, Y) = w]``."""
    p = {(z, w): Fraction(0) for z in f.outputs for w in g.outputs}
    for seq, px in joint.items():
        if px == 0:
            continue
        for y, q in g.aux_channel[seq].items():
            p[(f(seq), g(seq, y))] += px * q
    return p


def _check_pair(f: ExtractorSpec, g: RandomizedSpec):
    if f.n != g.n or f.alphabet != g.alphabet:
        raise ValueError("f and g are defined on different input spaces")
    if f.outputs != g.outputs:
        raise ValueError("f and g have different output sets")


def agreement_probability(f: ExtractorSpec, g: RandomizedSpec, source: AdaptiveSource) -> Fraction:
    """Probability that ``f(x) != g(x, y)`` for ``x`` from ``source`` and ``y`` from ``g``'s channel.

    (The name follows the public interface; the value is the disagreement mass.)
    """
    _check_pair(f, g)
    if source.n != f.n or source.symbols != f.alphabet.full:
        raise ValueError("source does not match the extractor's input space")
    joint = enumerate_joint(source)
    p = outcome_matrix(f, g, joint)
    return sum((v for (z, w), v in p.items() if z != w), Fraction(0))


def _bias(f: ExtractorSpec, joint: FiniteDistribution) -> Fraction:
    return l1_distance(output_law(f, joint), FiniteDistribution.uniform(f.outputs))


def attack_extractor(f: ExtractorSpec, family: ChannelFamily, delta) -> AttackReport:
    """Find a member of the source class on which ``f`` is at least ``delta/10`` biased.

    Candidates are the intermediate source and both tilted sources; the most
    biased one (first in that order on ties) is reported.
    """
    _require_exact(family)
    _require_binary(f)
    d = check_delta(delta)
    bound = d / 10
    g = uniform_guess(f)
    a = family.alphabet
    if d == 0:
        xt = intermediate_source(family, d)
        xj = enumerate_joint(xt)
        b = _bias(f, xj)
        return AttackReport(XTILDE, xt, b, bound, b >= bound, None, {XTILDE: b},
                            agreement_weights(g, f.outputs[0]), outcome_matrix(f, g, xj),
                            vacuous=True, notes=["bound vacuous at delta=0"])
    xt, xj, vj, wj, tilt = tilted_joints(f, family, d)
    joints = {XTILDE: xj, V_NAME: vj, W_NAME: wj}
    biases = {name: _bias(f, j) for name, j in joints.items()}
    witness = max(biases, key=lambda k: biases[k])
    if witness == XTILDE:
        src = xt
    else:
        src = source_from_joint(joints[witness], a.full, f.n, a.erased, fallback=xt.conditional)
    return AttackReport(
        witness, src, biases[witness], bound, biases[witness] >= bound, tilt, biases,
        agreement_weights(g, tilt.role0), outcome_matrix(f, g, xj),
    )


def binary_encoding(z_set: Sequence) -> list:
    """Coordinate maps ``c_k: z -> {0, 1}`` of the big-endian index code, ``k = 1..m``."""
    z_set = tuple(z_set)
    if not z_set:
        raise ValueError("cannot encode an empty set")
    m = math.ceil(math.log2(len(z_set)))
    return [{z: (j >> (m - 1 - k)) & 1 for j, z in enumerate(z_set)} for k in range(m)]


@dataclass
class CoordinateCheck:
    index: int
    gaps: dict
    tilt: TiltParameters
    disagreement: Fraction


@dataclass
class LemmaReport:
    epsilon: Fraction
    delta: Fraction
    m: int
    max_gap: Fraction
    witness: tuple
    hypothesis_holds: bool
    disagreement: Fraction
    bound: Fraction
    conclusion_holds: bool | None
    coordinates: list

    @property
    def consistent(self) -> bool:
        """False only if the hypothesis held and the conclusion failed."""
        return self.conclusion_holds is not False


def verify_main_lemma(f: ExtractorSpec, g: RandomizedSpec, family: ChannelFamily, delta, epsilon) -> LemmaReport:
    """Check the f-versus-g implication on the three constructed sources.

    The L1 gap between the laws of ``c_k(f(X))`` and ``c_k(g(X, Y))`` is
    computed for each coordinate ``k`` of the binary encoding of the output
    set and for ``X`` ranging over the intermediate source and the two sources
    tilted along ``c_k o f``.  If every gap is below ``epsilon``, the
    disagreement of ``f`` and ``g`` on the intermediate source must be below
    ``5 * epsilon * m / delta``.
    """
    _require_exact(family)
    _check_pair(f, g)
    d = check_delta(delta)
    if d == 0:
        raise ValueError("the implication is undefined at delta=0")
    eps = Fraction(epsilon)
    coords = []
    max_gap, witness = Fraction(-1), None
    xt = xj = None
    for k, code in enumerate(binary_encoding(f.outputs)):
        fk, gk = f.compose(code), g.compose(code)
        xt, xj, vj, wj, tilt = tilted_joints(fk, family, d)
        gaps = {}
        for name, j in ((XTILDE, xj), (V_NAME, vj), (W_NAME, wj)):
            gaps[name] = l1_distance(output_law(fk, j), g_output_law(gk, j))
            if gaps[name] > max_gap:
                max_gap, witness = gaps[name], (k, name)
        p = outcome_matrix(fk, gk, xj)
        coords.append(CoordinateCheck(k, gaps, tilt, p[(0, 1)] + p[(1, 0)]))
    p = outcome_matrix(f, g, xj)
    disagreement = sum((v for (z, w), v in p.items() if z != w), Fraction(0))
    m = len(coords)
    bound = 5 * eps * m / d
    hyp = max_gap < eps
    return LemmaReport(eps, d, m, max_gap, witness, hyp, disagreement, bound,
                       (disagreement < bound) if hyp else None, coords)


def sumbound_sides(f: ExtractorSpec, g: RandomizedSpec, family: ChannelFamily, delta):
    """Both sides of the tilt identity for a binary pair.

    Left: ``sum_{F0} P(x) 2 tau (1 - q_x) + sum_{F1} P(x) 2 alpha tau q_x``.
    Right: ``(Pf_V(r0) - Pg_V(r0)) - (Pf_W(r0) - Pg_W(r0))``, with ``r0`` the
    role-0 label and ``P`` the intermediate joint.
    """
    _check_pair(f, g)
    xt, xj, vj, wj, tilt = tilted_joints(f, family, delta)
    r0 = tilt.role0
    q = agreement_weights(g, r0)
    t, a = tilt.tau, tilt.ratio_alpha
    lhs = Fraction(0)
    for seq, p in xj.items():
        lhs += p * 2 * t * (1 - q[seq]) if f(seq) == r0 else p * 2 * a * t * q[seq]
    rhs = ((output_law(f, vj)[r0] - g_output_law(g, vj)[r0])
           - (output_law(f, wj)[r0] - g_output_law(g, wj)[r0]))
    return lhs, rhs
