"""Command-line front end.

Exit status: 0 when the verdict holds, 1 when it does not, 2 on bad input.
Reports are JSON, written to ``--out`` or standard output.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import formats
from .adversary import attack_extractor
from .config import DEFAULT_LIMITS
from .prob_core import EXACT, FLOAT, BackendError, coerce
from .quantum import (
    AdaptiveStrategy,
    ErasureSchedule,
    induced_channel_family,
    run_noisy_strategy,
)
from .source_model import OutcomeCapExceeded, enumerate_joint, find_delta_violation, is_sv_source, sample
from .sv_bridge import SvSimulation, simulate_sv, sv_channel_family

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str, digests: dict) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    digests[path] = hashlib.sha256(data).hexdigest()
    return data.decode("utf-8")


def _delta(args, backend: str):
    try:
        return coerce(str(args.delta), backend)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"invalid --delta {args.delta!r}") from None


def _source_table(source) -> list:
    return formats.source_doc(source)["conditionals"]


def cmd_attack(args, digests):
    if args.backend != EXACT:
        raise InputError("attack requires --backend exact")
    f = formats.parse_extractor(_read(args.extractor, digests))
    family = formats.parse_channel_family(_read(args.channels, digests), EXACT)
    d = _delta(args, EXACT)
    if not 0 < d <= 1:
        raise InputError("attack needs 0 < delta <= 1")
    if f.n != family.n or f.alphabet != family.alphabet:
        raise InputError("extractor and channel family disagree on n or alphabet")
    if len(f.alphabet.full) ** f.n > args.max_outcomes:
        raise OutcomeCapExceeded(f"{len(f.alphabet.full) ** f.n} outcomes exceed --max-outcomes")
    r = attack_extractor(f, family, d)
    results = {
        "witness": r.witness,
        "bias": formats.rational_report(r.bias),
        "bound": formats.rational_report(r.bound),
        "certified": r.certified,
        "candidate_biases": {k: formats.rational_report(v) for k, v in r.candidate_biases.items()},
        "winning_source": _source_table(r.winning_source),
    }
    if r.tilt is not None:
        results["tilt"] = {
            "tau": formats.rational_report(r.tilt.tau),
            "ratio_alpha": formats.rational_report(r.tilt.ratio_alpha),
            "swapped": r.tilt.swapped,
        }
    results["notes"] = r.notes
    return results, r.certified


def cmd_verify_source(args, digests):
    source = formats.parse_source(_read(args.source, digests), args.backend)
    family = formats.parse_channel_family(_read(args.channels, digests), args.backend)
    d = _delta(args, args.backend)
    try:
        bad = find_delta_violation(source, family, d)
    except ValueError as e:
        raise InputError(str(e)) from None
    results = {"member": bad is None}
    if bad is not None:
        results["violation"] = {"history": formats.seq_str(bad[0]), "symbol": str(bad[1])}
    return results, bad is None


def cmd_quantum(args, digests):
    strategy: AdaptiveStrategy = formats.parse_strategy(_read(args.strategy, digests))
    d = float(Fraction(str(args.delta)))
    if args.schedule:
        schedule = formats.parse_schedule(_read(args.schedule, digests), strategy.alphabet, d)
    else:
        schedule = ErasureSchedule(d)
    source = run_noisy_strategy(strategy, schedule)
    family = induced_channel_family(strategy)
    bad = find_delta_violation(source, family, schedule.delta)
    results = {
        "source": _source_table(source),
        "channels": formats.loads(formats.dump_channel_family(family))["channels"],
        "reduction_verified": bad is None,
    }
    return results, bad is None


def cmd_sv(args, digests):
    source = formats.parse_source(_read(args.source, digests), args.backend)
    d = _delta(args, args.backend)
    sim = SvSimulation.for_delta(d, args.backend)
    bad = find_delta_violation(source, sv_channel_family(source.n, d, args.backend), d)
    if bad is not None:
        return {"valid_source": False,
                "violation": {"history": formats.seq_str(bad[0]), "symbol": str(bad[1])}}, False
    y = simulate_sv(source, d)
    band = [d_["0"] for _, d_ in y.items()]
    ok = is_sv_source(y, sim.alpha)
    results = {
        "valid_source": True,
        "alpha": formats.rational_report(sim.alpha) if args.backend == EXACT else sim.alpha,
        "sv_certified": ok,
        "min_p0": formats.rational_report(min(band)) if args.backend == EXACT else min(band),
        "max_p0": formats.rational_report(max(band)) if args.backend == EXACT else max(band),
        "sv_source": _source_table(y),
    }
    return results, ok


def cmd_sample(args, digests):
    source = formats.parse_source(_read(args.source, digests), args.backend)
    enumerate_joint(source, args.max_outcomes)
    draws = [formats.seq_str(sample(source, args.seed + k)) for k in range(args.count)]
    return {"seed": args.seed, "samples": draws}, True


COMMANDS = {
    "attack": cmd_attack,
    "verify-source": cmd_verify_source,
    "quantum": cmd_quantum,
    "sv": cmd_sv,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="erasure-sources", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        if delta:
            sp.add_argument("--delta", required=True, help="erasure bound, e.g. 1/5 or 0.2")
        sp.add_argument("--backend", choices=[EXACT, FLOAT], default=EXACT)
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--max-outcomes", type=int, default=DEFAULT_LIMITS.max_outcomes)

    sp = sub.add_parser("attack", help="find a source biasing a binary extractor by delta/10")
    sp.add_argument("extractor")
    sp.add_argument("channels")
    common(sp)

    sp = sub.add_parser("verify-source", help="check membership in the delta-source class")
    sp.add_argument("source")
    sp.add_argument("channels")
    common(sp)

    sp = sub.add_parser("quantum", help="run a measurement strategy under an erasure schedule")
    sp.add_argument("strategy")
    sp.add_argument("schedule", nargs="?")
    common(sp)

    sp = sub.add_parser("sv", help="simulate an SV source from a delta-source over {0,1,_}")
    sp.add_argument("source")
    common(sp)

    sp = sub.add_parser("sample", help="draw sequences from a source")
    sp.add_argument("source")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    common(sp, delta=False)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    digests: dict = {}
    start = time.perf_counter()
    try:
        results, verdict = COMMANDS[args.command](args, digests)
    except (InputError, ValueError, KeyError, BackendError, OutcomeCapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "command": ["erasure-sources"] + argv,
        "inputs": digests,
        "backend": FLOAT if args.command == "quantum" else args.backend,
        "results": results,
        "duration_seconds": round(time.perf_counter() - start, 6),
    }
    text = formats.dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if verdict else EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
