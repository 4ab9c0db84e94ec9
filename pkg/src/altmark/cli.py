"""Command-line interface: ``altmark <subcommand> ...``.

JSON output is one object per line and carries ``"schema"``; CSV output starts
with a ``# schema:`` comment.  Exit codes: 0 success, 2 input error, 3 guard
violation (raise the limit with ``ALT_MARK_GUARD_N``).
"""
import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import channel, codec, combinatorics, estimators, recovery, redundancy
from ._accel import backend
from .combinatorics import GuardError
from .prob import IidDistribution

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3


class InputError(ValueError):
    pass


def _emit(obj, out):
    out.write(codec.json_line(obj) + "\n")


def _pattern_arg(text):
    try:
        labels = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"cannot parse pattern {text!r}") from None
    return labels


def _read_sequence(args):
    if args.input is not None:
        return codec.read_tokens(args.input, args.mode)
    if args.text is not None:
        return codec.split_tokens(args.text, args.mode)
    raise InputError("give --input FILE or --text STRING")


def load_distribution(text, exact=True):
    """``uniform:m``, comma-separated probabilities, or a JSON file ``{"probs": [...]}``."""
    if text.startswith("uniform:"):
        return IidDistribution.uniform(int(text.split(":", 1)[1]), exact)
    path = Path(text)
    if path.exists():
        obj = json.loads(path.read_text())
        dist = IidDistribution.from_json(obj)
    else:
        dist = IidDistribution(tuple(Fraction(x.strip()) for x in text.split(",")), True)
    if dist.exact and not exact:
        dist = IidDistribution(tuple(float(p) for p in dist.probs), False)
    return dist


def _num(x):
    return str(x) if isinstance(x, Fraction) else x


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_pattern(args, out):
    seq = _read_sequence(args)
    if not seq:
        raise InputError("empty input")
    _emit(
        {
            "n": len(seq),
            "pattern": list(combinatorics.pattern_of(seq)),
            "alternating_pattern": list(combinatorics.pattern_of(combinatorics.alternating_of(seq))),
            "runs": [n for _, n in combinatorics.runs(seq)],
        },
        out,
    )


def cmd_profile(args, out):
    if args.pattern is not None:
        pattern = combinatorics.validate_pattern(_pattern_arg(args.pattern))
    else:
        pattern = combinatorics.pattern_of(_read_sequence(args))
    profile, k = combinatorics.pattern_class(pattern)
    alternating = combinatorics.is_alternating(pattern)
    obj = {
        "pattern": list(pattern),
        "profile": list(profile.phi),
        "parts": list(profile.parts),
        "last_multiplicity": k,
        "alternating": alternating,
        "alternating_profile": combinatorics.is_alternating_profile(profile),
    }
    if alternating:
        combinatorics.check_guard(len(pattern))
        obj["L"] = str(combinatorics.class_size_L(pattern))
    _emit(obj, out)


def cmd_partitions(args, out):
    if args.n < 0:
        raise InputError("n must be non-negative")
    if args.max_part is None:
        count = combinatorics.partition_count(args.n)
    else:
        count = combinatorics.partition_count_bounded(args.n, args.max_part)
    _emit({"n": args.n, "max_part": args.max_part, "count": str(count)}, out)


def cmd_enumerate(args, out):
    if args.profiles:
        profiles = sorted(combinatorics.enumerate_alternating_profiles(args.n), reverse=True)
        for prof in profiles:
            _emit({"profile": list(prof.phi), "parts": list(prof.parts)}, out)
        return
    combinatorics.check_guard(args.n)
    table = combinatorics.class_table(args.n)
    for psi in combinatorics.enumerate_alternating_patterns(args.n):
        profile, k = combinatorics.pattern_class(psi)
        _emit({"pattern": list(psi), "profile": list(profile.phi), "L": str(table[(profile.parts, k)])}, out)


def cmd_estimate_block(args, out):
    combinatorics.check_guard(args.n)
    table = combinatorics.class_table(args.n)
    Z = len(table)
    for psi in combinatorics.enumerate_alternating_patterns(args.n):
        profile, k = combinatorics.pattern_class(psi)
        L = table[(profile.parts, k)]
        _emit({"pattern": list(psi), "L": str(L), "Z": str(Z), "q": str(Fraction(1, L * Z))}, out)


def cmd_estimate_seq(args, out):
    pattern = _pattern_arg(args.pattern)
    pattern = combinatorics.validate_pattern(pattern)
    if not combinatorics.is_alternating(pattern):
        raise InputError("pattern is not alternating")
    horizon = None if args.horizon is None else args.horizon
    if horizon is not None and horizon < len(pattern):
        raise InputError(f"horizon {horizon} is shorter than the pattern")
    combinatorics.check_guard(horizon or estimators.doubling_horizon(len(pattern)))
    state = estimators.SequentialState(horizon=horizon)
    steps = []
    prob = Fraction(1)
    for i, lab in enumerate(pattern, start=1):
        c = state.update(lab)
        prob *= c
        h = horizon or estimators.doubling_horizon(i)
        steps.append({"i": i, "label": lab, "horizon": h, "conditional": str(c)})
    _emit(
        {
            "pattern": list(pattern),
            "mode": "doubling" if horizon is None else "fixed",
            "horizon": horizon,
            "steps": steps,
            "prob": str(prob),
            "log2_prob": math.log2(prob),
        },
        out,
    )


def cmd_simulate(args, out):
    dist = load_distribution(args.dist, exact=not args.float)
    model = channel.RepetitionModel.parse(args.channel)
    seed = channel.resolve_seed(args.seed)
    x = channel.sample_source(dist, args.N, seed)
    y = channel.apply_channel(x, model, seed)
    if args.output:
        codec.write_tokens(args.output, y)
    _emit(
        {
            "N": args.N,
            "seed": seed,
            "channel": args.channel,
            "output_length": int(y.size),
            "run_count": channel.run_count(x.tolist()) if args.N else 0,
            "expected_runs": float(channel.expected_runs(dist, args.N)) if args.N else 0.0,
            "output": args.output,
        },
        out,
    )


def cmd_recover(args, out):
    tokens = codec.read_tokens(args.input, args.mode)
    if not tokens:
        raise InputError("empty input")
    codes = codec.integer_codes(tokens)
    symbols = None
    if codes is None:
        cdc = codec.Codec()
        codes = cdc.encode(tokens)
        symbols = cdc.symbols
    anchor = None
    if args.anchor is not None:
        parts = args.anchor.split(",")
        if len(parts) != 2:
            raise InputError("--anchor takes two symbols a,b")
        if symbols is None:
            anchor = tuple(int(a) for a in parts)
        else:
            missing = [a for a in parts if a not in symbols]
            if missing:
                raise InputError(f"anchor symbols not observed: {missing}")
            anchor = tuple(symbols.index(a) for a in parts)
    rec = recovery.end_to_end_estimate(codes, args.alpha, anchor, args.alphabet_size)
    obj = rec.to_json()
    if symbols is not None:
        obj["symbols"] = symbols
        obj["anchor"] = [symbols[a] for a in rec.anchor]
    obj["alpha"] = args.alpha
    _emit(obj, out)


def cmd_redundancy(args, out):
    sup_options = {"extra_symbols": args.sup_extra, "restarts": args.restarts, "seed": args.sup_seed}
    rows, meta = redundancy.sandwich_table(args.n_max, sup_options, jobs=args.jobs, n_min=args.n_min)
    if args.format == "csv":
        text = codec.csv_text(rows, redundancy.COLUMNS)
        head, body = text.split("\n", 1)
        caveats = "".join(f"# caveat {k}: {v}\n" for k, v in meta["caveats"].items())
        out.write(head + "\n" + caveats + body)
    else:
        _emit({"kind": "meta", **meta}, out)
        for row in rows:
            _emit({"kind": "row", **row}, out)


def cmd_concentration(args, out):
    dist = load_distribution(args.dist, exact=not args.float)
    res = channel.run_count_tail(dist, args.N, args.trials, args.seed, args.chunk, args.jobs)
    _emit({**res.to_json(), "backend": backend()}, out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _add_sequence_input(p):
    p.add_argument("--input", help="token file")
    p.add_argument("--text", help="inline input instead of a file")
    p.add_argument("--mode", choices=codec.TOKEN_MODES, default="auto",
                   help="tokenisation: whitespace tokens, characters, bytes, or auto (default)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="altmark",
        description="Patterns, estimators and recovery for alternating Markov chains.",
    )
    parser.add_argument("--jobs", type=_positive, default=1, help="worker count for harness commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="pattern of a sequence and of its alternating sequence")
    _add_sequence_input(p)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("profile", help="profile, last multiplicity and class size L")
    p.add_argument("--pattern", help="comma-separated labels, e.g. 1,2,3,2")
    _add_sequence_input(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("partitions", help="partition counts p(n) or p(n, max part)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-part", type=_non_negative, help="largest allowed part (default: unbounded)")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("enumerate", help="alternating patterns (or profiles) of length n, JSON lines")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--profiles", action="store_true", help="list profiles instead of patterns")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("estimate-block", help="block estimate q = 1/(L Z) for every pattern of length n")
    p.add_argument("--n", type=_positive, required=True)
    p.set_defaults(func=cmd_estimate_block)

    p = sub.add_parser("estimate-seq", help="per-step conditionals of the sequential estimator")
    p.add_argument("--pattern", required=True, help="comma-separated labels")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--horizon", type=_positive, help="fixed horizon")
    mode.add_argument("--doubling", action="store_true", help="doubling-trick horizons (default)")
    p.set_defaults(func=cmd_estimate_seq)

    p = sub.add_parser("simulate", help="sample a source, pass it through a repetition channel")
    p.add_argument("--dist", required=True, help="JSON file, uniform:m, or comma-separated probabilities")
    p.add_argument("--N", type=_non_negative, required=True)
    p.add_argument("--channel", default="geometric:0.5", help="identity, geometric:rho or pmf:p1,p2,...")
    p.add_argument("--seed", type=_non_negative, help="RNG seed (chosen and reported when omitted)")
    p.add_argument("--output", help="write the channel output here as integer tokens")
    p.add_argument("--float", action="store_true", help="read the distribution in float mode")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("recover", help="estimate source probabilities from a channel output")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=codec.TOKEN_MODES, default="tokens")
    p.add_argument("--alpha", type=float, default=0.5, help="additive smoothing of bigram counts")
    p.add_argument("--anchor", help="anchor symbols a,b (default: two most frequent)")
    p.add_argument("--alphabet-size", type=_positive, help="alphabet size when codes are integers")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("redundancy", help="sandwich table of redundancies and bounds")
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--n-min", type=_positive, default=1)
    p.add_argument("--sup-extra", type=_non_negative, default=2, help="extra symbols beyond the label count")
    p.add_argument("--restarts", type=_positive, default=64)
    p.add_argument("--sup-seed", type=_non_negative, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_redundancy)

    p = sub.add_parser("concentration", help="run-count tail frequency over Monte Carlo trials")
    p.add_argument("--dist", default="uniform:4", help="JSON file, uniform:m, or comma-separated probabilities")
    p.add_argument("--N", type=_positive, default=10_000, help="source length per trial")
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--seed", type=_non_negative, help="RNG seed (chosen and reported when omitted)")
    p.add_argument("--chunk", type=_positive, default=256, help="trials generated per batch")
    p.add_argument("--float", action="store_true", help="read the distribution in float mode")
    p.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_concentration)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        args.func(args, out)
    except GuardError as exc:
        err.write(f"altmark: guard: {exc}\n")
        return EXIT_GUARD
    except (ValueError, OSError, KeyError, ZeroDivisionError, json.JSONDecodeError) as exc:
        err.write(f"altmark: error: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
