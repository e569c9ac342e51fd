"""JSON file formats for channel families, sources, extractors, strategies and schedules.

Symbols must be single characters so that sequences can be written as
strings (``"0_1"``); the erasure symbol is ``_``.  Probabilities are strings,
either ``"p/q"`` or decimals.  Under the exact backend decimals are read
exactly (``"0.45"`` is 9/20).  The history key ``"*"`` may stand for every
history of a step that is not listed explicitly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .adversary import ExtractorSpec
from .prob_core import EXACT, Channel, FiniteDistribution, coerce, sequences
from .quantum import AdaptiveStrategy, DensityOperator, ErasureSchedule, KrausFamily
from .source_model import BOTTOM, AdaptiveSource, ChannelFamily, ErasureAlphabet

WILDCARD = "*"


class FormatError(ValueError):
    pass


def loads(text: str) -> Any:
    # numbers stay strings so exact parsing never sees a binary float
    try:
        return json.loads(text, parse_float=str, parse_int=str)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def fmt_scalar(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return repr(float(x))


def rational_report(x) -> dict:
    """Exact ``num/den`` plus a decimal rendering."""
    return {"exact": fmt_scalar(x), "decimal": f"{float(x):.12g}"}


def seq_str(seq) -> str:
    return "".join(str(s) for s in seq)


def parse_seq(text: str, symbols, length: int, where: str) -> tuple:
    seq = tuple(text)
    if len(seq) != length or any(s not in symbols for s in seq):
        raise FormatError(f"{where}: {text!r} is not a length-{length} sequence over {''.join(symbols)}")
    return seq


def _alphabet(doc: dict, where: str) -> ErasureAlphabet:
    base = doc.get("base_alphabet")
    if not isinstance(base, list) or not base:
        raise FormatError(f"{where}: missing base_alphabet")
    base = tuple(str(s) for s in base)
    if any(len(s) != 1 for s in base) or BOTTOM in base or WILDCARD in base:
        raise FormatError(f"{where}: symbols must be single characters other than '_' and '*'")
    return ErasureAlphabet(base, BOTTOM)


def _int(doc: dict, key: str, where: str) -> int:
    try:
        return int(doc[key])
    except (KeyError, ValueError, TypeError):
        raise FormatError(f"{where}: missing or invalid integer field {key!r}") from None


def _row(row, alphabet: tuple, backend: str, where: str) -> FiniteDistribution:
    if not isinstance(row, dict):
        raise FormatError(f"{where}: probability row must be an object")
    try:
        probs = {str(k): coerce(str(v), backend) for k, v in row.items()}
        return FiniteDistribution.from_mapping(probs, alphabet)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise FormatError(f"{where}: {e}") from None


def _expand_tables(raw_steps, n: int, symbols, where: str, build):
    if not isinstance(raw_steps, list) or len(raw_steps) != n:
        raise FormatError(f"{where}: expected a list of {n} step tables")
    tables = []
    for k, raw in enumerate(raw_steps):
        if not isinstance(raw, dict):
            raise FormatError(f"{where}[{k}]: step table must be an object")
        explicit = {}
        for key, row in raw.items():
            if key == WILDCARD:
                continue
            explicit[parse_seq(key, symbols, k, f"{where}[{k}]")] = build(row, f"{where}[{k}][{key!r}]")
        default = build(raw[WILDCARD], f"{where}[{k}]['*']") if WILDCARD in raw else None
        table = {}
        for h in sequences(symbols, k):
            if h in explicit:
                table[h] = explicit[h]
            elif default is not None:
                table[h] = default
            else:
                raise FormatError(f"{where}[{k}]: no entry for history {seq_str(h)!r}")
        tables.append(table)
    return tables


def parse_channel_family(text: str, backend: str = EXACT) -> ChannelFamily:
    doc = loads(text)
    a = _alphabet(doc, "channels file")
    n = _int(doc, "n", "channels file")
    tables = _expand_tables(doc.get("channels"), n, a.full, "channels",
                            lambda row, where: _row(row, a.base, backend, where))
    return ChannelFamily(a, tuple(Channel(k, a.full, a.base, t) for k, t in enumerate(tables)))


def dump_channel_family(family: ChannelFamily) -> str:
    return dumps({
        "n": family.n,
        "base_alphabet": list(family.alphabet.base),
        "channels": [
            {seq_str(h): {str(x): fmt_scalar(p) for x, p in d.items()} for h, d in ch.table.items()}
            for ch in family.channels
        ],
    })


def parse_source(text: str, backend: str = EXACT) -> AdaptiveSource:
    doc = loads(text)
    a = _alphabet(doc, "source file")
    n = _int(doc, "n", "source file")
    tables = _expand_tables(doc.get("conditionals"), n, a.full, "conditionals",
                            lambda row, where: _row(row, a.full, backend, where))
    return AdaptiveSource(n, a.full, tuple(tables), a.erased)


def source_doc(source: AdaptiveSource) -> dict:
    base = [str(s) for s in source.symbols if s != source.erased]
    return {
        "n": source.n,
        "base_alphabet": base,
        "conditionals": [
            {seq_str(h): {str(x): fmt_scalar(p) for x, p in d.items()} for h, d in table.items()}
            for table in source.conditionals
        ],
    }


def dump_source(source: AdaptiveSource) -> str:
    return dumps(source_doc(source))


def _output(value):
    # JSON ints arrive as strings; keep integer-looking outputs as ints
    s = str(value)
    try:
        return int(s)
    except ValueError:
        return s


def parse_extractor(text: str) -> ExtractorSpec:
    doc = loads(text)
    a = _alphabet(doc, "extractor file")
    n = _int(doc, "n", "extractor file")
    outputs = tuple(_output(z) for z in doc.get("outputs", [0, 1]))
    raw = doc.get("table")
    if not isinstance(raw, dict):
        raise FormatError("extractor file: missing table")
    given = {parse_seq(k, a.full, n, "table"): _output(v) for k, v in raw.items()}
    fill = doc.get("bottom_default")
    if fill is not None and str(fill) not in a.base:
        raise FormatError(f"extractor file: bottom_default {fill!r} is not a base symbol")
    table = {}
    for seq in sequences(a.full, n):
        if seq in given:
            table[seq] = given[seq]
        elif fill is not None:
            proxy = tuple(str(fill) if s == a.erased else s for s in seq)
            if proxy not in given:
                raise FormatError(f"table: no entry for {seq_str(proxy)!r} (needed for {seq_str(seq)!r})")
            table[seq] = given[proxy]
        else:
            raise FormatError(f"table: no entry for {seq_str(seq)!r}")
    try:
        return ExtractorSpec(n, a, outputs, table)
    except ValueError as e:
        raise FormatError(f"extractor file: {e}") from None


def dump_extractor(f: ExtractorSpec) -> str:
    return dumps({
        "n": f.n,
        "base_alphabet": list(f.alphabet.base),
        "outputs": list(f.outputs),
        "table": {seq_str(s): z for s, z in f.table.items()},
    })


def _complex_matrix(raw, where: str) -> np.ndarray:
    try:
        return np.array([[complex(float(e[0]), float(e[1])) for e in row] for row in raw], dtype=complex)
    except (TypeError, ValueError, IndexError):
        raise FormatError(f"{where}: matrices are lists of rows of [re, im] pairs") from None


def _complex_rows(m: np.ndarray) -> list:
    return [[[repr(float(z.real)), repr(float(z.imag))] for z in row] for row in m]


def parse_strategy(text: str) -> AdaptiveStrategy:
    doc = loads(text)
    a = _alphabet(doc, "strategy file")
    dim = _int(doc, "dim", "strategy file")
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        raise FormatError("strategy file: missing steps")
    n = len(raw_steps)

    def build(row, where):
        if not isinstance(row, dict):
            raise FormatError(f"{where}: operation must map outcomes to operator lists")
        for x in row:
            if x not in a.base:
                raise FormatError(f"{where}: outcome {x!r} not in base alphabet")
        try:
            return KrausFamily.from_outcomes({x: [_complex_matrix(m, where) for m in ms] for x, ms in row.items()})
        except ValueError as e:
            raise FormatError(f"{where}: {e}") from None

    tables = _expand_tables(raw_steps, n, a.full, "steps", build)
    try:
        initial = DensityOperator(_complex_matrix(doc.get("initial"), "initial"))
        if initial.dim != dim:
            raise FormatError(f"initial state has dimension {initial.dim}, file declares {dim}")
        return AdaptiveStrategy(n, a, initial, tuple(tables))
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(f"strategy file: {e}") from None


def dump_strategy(strategy: AdaptiveStrategy) -> str:
    steps = []
    for k in range(strategy.n):
        step = {}
        for h in sequences(strategy.alphabet.full, k):
            op = strategy.operation(h)
            rows = {}
            for (x, _), e in op.operators.items():
                rows.setdefault(str(x), []).append(_complex_rows(e))
            step[seq_str(h)] = rows
        steps.append(step)
    return dumps({
        "dim": strategy.dim,
        "base_alphabet": list(strategy.alphabet.base),
        "initial": _complex_rows(strategy.initial.matrix),
        "steps": steps,
    })


def parse_schedule(text: str, alphabet: ErasureAlphabet, delta) -> ErasureSchedule:
    doc = loads(text)
    raw = doc.get("weights")
    if not isinstance(raw, list):
        raise FormatError("schedule file: missing weights list")
    weights = {}
    for k, step in enumerate(raw):
        if not isinstance(step, dict):
            raise FormatError(f"weights[{k}]: must be an object")
        for key, row in step.items():
            h = parse_seq(key, alphabet.full, k, f"weights[{k}]")
            for x, lam in row.items():
                if x not in alphabet.base:
                    raise FormatError(f"weights[{k}][{key!r}]: outcome {x!r} not in base alphabet")
                weights[(h, x)] = float(Fraction(str(lam)))
    try:
        return ErasureSchedule(float(Fraction(str(delta))), weights)
    except ValueError as e:
        raise FormatError(f"schedule file: {e}") from None


def dump_schedule(schedule: ErasureSchedule, n: int) -> str:
    steps = [dict() for _ in range(n)]
    for (h, x), lam in schedule.weights.items():
        steps[len(h)].setdefault(seq_str(h), {})[str(x)] = repr(lam)
    return dumps({"weights": steps})
