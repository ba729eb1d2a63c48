"""Command-line interface.

Every subcommand is a thin adapter: parse arguments, call module
operations, serialize the report.  Reports are JSON first (stable key
order, versioned schema field); ``--format text`` derives a short human
summary from the same data.  ``--plots DIR`` renders figures next to
the report where a subcommand has something to draw.

Exit codes: 0 success, 2 usage, 3 file problems, 4 budget exceeded,
5 contract/domain errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import bits, capture, codes, game, kthin, xorset
from .errors import BudgetExceededError, ThinlabError

SCHEMA = "thinlab/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_BUDGET = 4
EXIT_CONTRACT = 5


class _CliFailure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(report: dict, args) -> None:
    report = {"schema": SCHEMA, **report}
    if getattr(args, "format", "json") == "text":
        text = "\n".join(_text_lines(report)) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _text_lines(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            value = obj[key]
            if isinstance(value, (dict, list)):
                lines.append(f"{prefix}{key}:")
                lines.extend(_text_lines(value, prefix + "  "))
            else:
                lines.append(f"{prefix}{key}: {value}")
    elif isinstance(obj, list):
        for value in obj:
            if isinstance(value, (dict, list)):
                lines.append(f"{prefix}-")
                lines.extend(_text_lines(value, prefix + "  "))
            else:
                lines.append(f"{prefix}- {value}")
    else:
        lines.append(f"{prefix}{obj}")
    return lines


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliFailure(f"cannot read {path}: {exc}", EXIT_FILE) from exc


def _load_word_code(path: str) -> codes.Code:
    try:
        return codes.loads_code(_read_text(path))
    except ThinlabError as exc:
        raise _CliFailure(f"bad code file {path}: {exc}", EXIT_CONTRACT) from exc
    except ValueError as exc:
        raise _CliFailure(f"bad code file {path}: {exc}", EXIT_CONTRACT) from exc


def _load_stream_code(path: str) -> codes.Code:
    try:
        obj = json.loads(_read_text(path))
        streams = [bits.stream_from_json(s) for s in obj["streams"]]
        return codes.Code.of_streams(streams)
    except (KeyError, ValueError, TypeError) as exc:
        raise _CliFailure(f"bad stream file {path}: {exc}", EXIT_CONTRACT) from exc


def _code_from_args(args) -> codes.Code:
    sources = [s for s in (args.code, args.words, args.streams) if s]
    if len(sources) != 1:
        raise _CliFailure(
            "give exactly one of --code FILE, --words LIST, --streams FILE",
            EXIT_USAGE,
        )
    if args.words:
        try:
            return codes.Code.from_strings(args.words.split(","))
        except (ThinlabError, ValueError) as exc:
            raise _CliFailure(f"bad --words: {exc}", EXIT_CONTRACT) from exc
    if args.code:
        return _load_word_code(args.code)
    return _load_stream_code(args.streams)


def _code_to_json(code: codes.Code) -> dict:
    if code.is_finite_kind:
        return {
            "kind": "finite",
            "length": code.word_length,
            "size": len(code),
            "words": [str(w) for w in code.sorted_words()],
        }
    return {
        "kind": "streams",
        "size": len(code),
        "members": sorted(
            (bits.stream_to_json(s) for s in code.members),
            key=lambda d: sorted(d.items()),
        ),
    }


def _strategies_from_args(args, side: game.Side) -> list[game.Strategy]:
    if args.strategy:
        try:
            loaded = game.load_corpus(args.strategy)
        except (OSError, ValueError, KeyError) as exc:
            raise _CliFailure(
                f"cannot load corpus {args.strategy}: {exc}", EXIT_FILE
            ) from exc
        picked = [s for s in loaded if s.side is side]
        if not picked:
            raise _CliFailure(
                f"corpus {args.strategy} holds no {side.value} strategies",
                EXIT_CONTRACT,
            )
        return picked
    return game.random_corpus(side, args.count, args.seed)


def _parse_strategy_spec(spec: str, side: game.Side) -> game.Strategy:
    if spec.startswith("const:"):
        return game.Strategy.constant(side, bits.Word.from_string(spec[6:]))
    if spec == "copycat":
        if side is not game.Side.ALTER:
            raise _CliFailure("copycat is an alter strategy", EXIT_USAGE)
        return game.Strategy.copycat()
    if spec.startswith("seeded:"):
        try:
            seed, index = (int(x) for x in spec[7:].split(":"))
        except ValueError as exc:
            raise _CliFailure(f"bad seeded spec {spec!r}", EXIT_USAGE) from exc
        return game.random_strategy(side, seed, index)
    if "#" in spec:
        path, name = spec.split("#", 1)
        for s in game.load_corpus(path):
            if s.name == name:
                if s.side is not side:
                    raise _CliFailure(
                        f"strategy {name} in {path} plays {s.side.value}",
                        EXIT_CONTRACT,
                    )
                return s
        raise _CliFailure(f"no strategy named {name!r} in {path}", EXIT_CONTRACT)
    raise _CliFailure(
        f"unknown strategy spec {spec!r} (const:BITS, copycat, "
        "seeded:SEED:INDEX, or FILE#NAME)", EXIT_USAGE,
    )


def _parse_target(spec: str) -> game.TargetSet:
    if spec.startswith("cylinder:"):
        return game.cylinder(bits.Word.from_string(spec[9:]))
    if spec == "no11":
        return game.no_consecutive_ones()
    raise _CliFailure(f"unknown target spec {spec!r}", EXIT_USAGE)


def _plots_dir(args) -> Path | None:
    if getattr(args, "plots", None):
        d = Path(args.plots)
        d.mkdir(parents=True, exist_ok=True)
        return d
    return None


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_code_analyze(args) -> None:
    code = _code_from_args(args)
    if len(code) < 2:
        raise _CliFailure("analysis needs a code with at least two words",
                          EXIT_CONTRACT)
    md = codes.min_distance(code)
    report: dict = {
        "command": "code-analyze",
        "code": _code_to_json(code),
        "min_distance": md.to_json(),
        "thin": codes.is_thin(code),
    }
    if md.is_finite:
        report["detects_up_to"] = md.n - 1
        report["corrects_up_to"] = (md.n - 1) // 2
    else:
        report["detects_up_to"] = "omega"
        report["corrects_up_to"] = "omega"
    if code.is_finite_kind:
        counts: dict[int, int] = {}
        closest = None
        for a, b in itertools.combinations(code.sorted_words(), 2):
            d = (a.value ^ b.value).bit_count()
            counts[d] = counts.get(d, 0) + 1
            if closest is None or d < closest[0]:
                closest = (d, str(a), str(b))
        report["distance_counts"] = {str(d): c for d, c in sorted(counts.items())}
        report["closest_pair"] = list(closest[1:])
        report["k_thin_up_to"] = md.n
    else:
        rep = codes.thin_equivalence_report(code)
        report["thin_equivalence"] = {
            "projection_injective": rep.projection_injective,
            "classes_all_thin": rep.classes_all_thin,
            "min_distance_ge_2": rep.min_distance_ge_2,
            "class_count": len(rep.classes),
        }
    plots = _plots_dir(args)
    if plots and code.is_finite_kind:
        from . import figures

        figures.save_distance_histogram(code, plots / "distance_histogram.png")
        report["figures"] = ["distance_histogram.png"]
    _emit(report, args)


def _cmd_code_decode(args) -> None:
    code = _code_from_args(args)
    if not code.is_finite_kind:
        raise _CliFailure("decoding needs a finite code", EXIT_CONTRACT)
    results = []
    for text in args.received:
        word = bits.Word.from_string(text)
        results.append({
            "received": text,
            "result": codes.decode_nearest(code, word).to_json(),
        })
    _emit({
        "command": "code-decode",
        "code": _code_to_json(code),
        "decodes": results,
    }, args)


def _cmd_code_maximalize(args) -> None:
    code = _code_from_args(args)
    if not code.is_finite_kind:
        raise _CliFailure("maximalisation needs a finite code", EXIT_CONTRACT)
    grown = codes.extend_to_maximal_thin(code, k=args.k)
    added = sorted(set(grown.members) - set(code.members), key=str)
    report = {
        "command": "code-maximalize",
        "k": args.k,
        "input": _code_to_json(code),
        "output": _code_to_json(grown),
        "added": [str(w) for w in added],
    }
    if args.save:
        Path(args.save).write_text(codes.dumps_code(grown), encoding="ascii")
        report["saved_to"] = args.save
    _emit(report, args)


def _cmd_game_play(args) -> None:
    ego = _parse_strategy_spec(args.ego, game.Side.EGO)
    alter = _parse_strategy_spec(args.alter, game.Side.ALTER)
    transcript = game.play(ego, alter, args.rounds)
    report = {
        "command": "game-play",
        "ego": ego.name or args.ego,
        "alter": alter.name or args.alter,
        "rounds": args.rounds,
        "transcript": transcript.to_json(),
    }
    if args.target:
        target = _parse_target(args.target)
        verdict = game.evaluate(target, transcript)
        report["target"] = {
            "description": target.description,
            "verdict": verdict.value,
        }
    _emit(report, args)


def _cmd_capture_ego(args) -> None:
    strategies = _strategies_from_args(args, game.Side.EGO)
    rows = []
    for s in strategies:
        res = capture.capture_ego(s, rounds=args.rounds)
        a_out = res.initial.outcome_prefix
        b_out = res.mirror.outcome_prefix
        rows.append({
            "name": s.name,
            "divergence_index": res.divergence_index,
            "prefix_hd": bits.hd(a_out, b_out).to_json(),
            "initial_outcome": str(a_out),
            "mirror_outcome": str(b_out),
        })
    report = {
        "command": "capture-ego",
        "rounds": args.rounds,
        "strategies": rows,
        "all_pass": all(r["prefix_hd"] == 1 for r in rows),
    }
    plots = _plots_dir(args)
    if plots and strategies:
        from . import figures

        res = capture.capture_ego(strategies[0], rounds=args.rounds)
        figures.save_mirror_capture_raster(res, plots / "capture_ego.png")
        report["figures"] = ["capture_ego.png"]
    _emit(report, args)


def _cmd_capture_alter(args) -> None:
    strategies = _strategies_from_args(args, game.Side.ALTER)
    rows = []
    traces = {}
    for s in strategies:
        res = capture.capture_alter(s, m=args.plays, sweeps=args.sweeps)
        check = capture.verify_theta_relation(res, args.check_theta)
        rows.append({
            "name": s.name,
            "replies": len(res.reply_log),
            "theta_check": check.to_json(),
        })
        traces[s.name] = [t.to_json() for t in res.trace]
    report = {
        "command": "capture-alter",
        "plays": args.plays,
        "sweeps": args.sweeps,
        "check_theta_length": args.check_theta,
        "strategies": rows,
        "all_pass": all(r["theta_check"]["ok"] for r in rows),
    }
    if args.trace_out:
        Path(args.trace_out).write_text(
            json.dumps({"schema": SCHEMA, "traces": traces},
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        report["trace_file"] = args.trace_out
    plots = _plots_dir(args)
    if plots and strategies:
        from . import figures

        res = capture.capture_alter(strategies[0], m=args.plays,
                                    sweeps=args.sweeps)
        figures.save_diagonal_capture_raster(
            res, plots / "capture_alter.png", length=args.check_theta)
        report["figures"] = ["capture_alter.png"]
    _emit(report, args)


def _cmd_xor_partition(args) -> None:
    t0, t1 = xorset.parity_partition(args.n)
    rep = xorset.verify_partition_implies_xor(t0, t1)
    report = {
        "command": "xor-partition",
        "n": args.n,
        "sizes": [len(t0), len(t1)],
        "checks": rep.to_json(),
    }
    if args.n <= 6:
        report["t0"] = [str(w) for w in t0.sorted_words()]
        report["t1"] = [str(w) for w in t1.sorted_words()]
    plots = _plots_dir(args)
    if plots:
        from . import figures

        figures.save_partition_weights([t0, t1], plots / "partition_weights.png")
        report["figures"] = ["partition_weights.png"]
    _emit(report, args)


def _cmd_xor_verify(args) -> None:
    t0 = _load_word_code(args.t0)
    t1 = _load_word_code(args.t1)
    try:
        rep = xorset.verify_partition_implies_xor(t0, t1)
    except ThinlabError as exc:
        raise _CliFailure(str(exc), EXIT_CONTRACT) from exc
    _emit({
        "command": "xor-verify",
        "t0": _code_to_json(t0),
        "t1": _code_to_json(t1),
        "checks": rep.to_json(),
    }, args)


def _cmd_qtable(args) -> None:
    budget = kthin.Budget(
        max_n_k2=args.budget_n_k2,
        max_n_k_ge3=args.budget_n_k3,
        search_nodes=args.search_nodes,
    )
    rows = kthin.q_table(args.n_max, args.k_max, budget=budget)
    json_rows = []
    for r in rows:
        row = r.to_json()
        if args.witnesses and r.witness is not None:
            row["witness"] = r.witness.to_json()
        json_rows.append(row)
    report = {"command": "qtable", "rows": json_rows}
    if args.csv:
        lines = ["n,k,lower_bound_ball,lower_bound_binomial,exact_or_interval"]
        for r in rows:
            cell = str(r.value) if r.exact else f"{r.lower}..{r.upper}"
            lines.append(
                f"{r.n},{r.k},{r.lower_bound.ball},{r.lower_bound.binomial},{cell}"
            )
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="ascii")
        report["csv_file"] = args.csv
    plots = _plots_dir(args)
    if plots:
        from . import figures

        figures.save_qtable_chart(rows, plots / "qtable.png")
        report["figures"] = ["qtable.png"]
    _emit(report, args)


# ---------------------------------------------------------------------------
# parser


def _add_output_flags(p: argparse.ArgumentParser, plots: bool = False) -> None:
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    if plots:
        p.add_argument("--plots", metavar="DIR",
                       help="render figures into this directory")


def _add_code_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", help="file of newline-separated 0/1 words")
    p.add_argument("--words", help="comma-separated 0/1 words")
    p.add_argument("--streams", help="JSON file of closed-form streams")


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", help="corpus JSON file of table strategies")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for a generated corpus (default 0)")
    p.add_argument("--count", type=int, default=10,
                   help="size of the generated corpus (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thinlab",
        description="error-detecting codes, thin sets, word games and "
                    "parity partitions at desk scale",
    )
    top = parser.add_subparsers(dest="group", required=True)

    code = top.add_parser("code", help="finite and stream code analysis")
    code_sub = code.add_subparsers(dest="action", required=True)

    p = code_sub.add_parser("analyze", help="distance, detection, thinness")
    _add_code_source_flags(p)
    _add_output_flags(p, plots=True)
    p.set_defaults(func=_cmd_code_analyze)

    p = code_sub.add_parser("decode", help="nearest-codeword decoding")
    _add_code_source_flags(p)
    p.add_argument("--received", action="append", required=True,
                   help="received 0/1 word (repeatable)")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_code_decode)

    p = code_sub.add_parser("maximalize", help="grow to a maximal k-thin code")
    _add_code_source_flags(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--save", help="also write the grown code as 0/1 lines")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_code_maximalize)

    game_p = top.add_parser("game", help="play the word-extension game")
    game_sub = game_p.add_subparsers(dest="action", required=True)
    p = game_sub.add_parser("play", help="run one finite-horizon play")
    p.add_argument("--ego", required=True,
                   help="const:BITS | seeded:SEED:INDEX | FILE#NAME")
    p.add_argument("--alter", required=True,
                   help="const:BITS | copycat | seeded:SEED:INDEX | FILE#NAME")
    p.add_argument("--rounds", type=int, default=5)
    p.add_argument("--target", help="cylinder:BITS | no11")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_game_play)

    cap = top.add_parser("capture", help="strategy-capture procedures")
    cap_sub = cap.add_subparsers(dest="action", required=True)

    p = cap_sub.add_parser("ego", help="mirror-play capture of Ego strategies")
    _add_corpus_flags(p)
    p.add_argument("--rounds", type=int, default=20)
    _add_output_flags(p, plots=True)
    p.set_defaults(func=_cmd_capture_ego)

    p = cap_sub.add_parser("alter", help="diagonal capture of Alter strategies")
    _add_corpus_flags(p)
    p.add_argument("--plays", type=int, default=4,
                   help="return plays 0..PLAYS (default 4)")
    p.add_argument("--sweeps", type=int, default=8)
    p.add_argument("--check-theta", type=int, default=16, dest="check_theta",
                   help="verify the xor-shift relation at this prefix length")
    p.add_argument("--trace-out", dest="trace_out",
                   help="write the full move trace to this JSON file")
    _add_output_flags(p, plots=True)
    p.set_defaults(func=_cmd_capture_alter)

    xor = top.add_parser("xor", help="parity partitions and xor-set checks")
    xor_sub = xor.add_subparsers(dest="action", required=True)

    p = xor_sub.add_parser("partition", help="weight-parity split of the cube")
    p.add_argument("--n", type=int, required=True)
    _add_output_flags(p, plots=True)
    p.set_defaults(func=_cmd_xor_partition)

    p = xor_sub.add_parser("verify", help="two-part cover implies xor-sets")
    p.add_argument("--t0", required=True, help="0/1-line file, first part")
    p.add_argument("--t1", required=True, help="0/1-line file, second part")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_xor_verify)

    p = top.add_parser("qtable", help="minimal k-thin partition numbers")
    p.add_argument("--n-max", type=int, default=4, dest="n_max")
    p.add_argument("--k-max", type=int, default=3, dest="k_max")
    p.add_argument("--budget-n-k2", type=int, default=10, dest="budget_n_k2")
    p.add_argument("--budget-n-k3", type=int, default=5, dest="budget_n_k3")
    p.add_argument("--search-nodes", type=int, default=2_000_000,
                   dest="search_nodes")
    p.add_argument("--witnesses", action="store_true",
                   help="include witness partitions in the report")
    p.add_argument("--csv", help="also write the table as CSV")
    _add_output_flags(p, plots=True)
    p.set_defaults(func=_cmd_qtable)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _CliFailure as exc:
        _error_report(str(exc), exc.code)
        return exc.code
    except BudgetExceededError as exc:
        _error_report(str(exc), EXIT_BUDGET)
        return EXIT_BUDGET
    except ThinlabError as exc:
        _error_report(str(exc), EXIT_CONTRACT)
        return EXIT_CONTRACT
    except OSError as exc:
        _error_report(str(exc), EXIT_FILE)
        return EXIT_FILE
    return EXIT_OK


def _error_report(message: str, code: int) -> None:
    sys.stderr.write(json.dumps(
        {"schema": SCHEMA, "error": {"message": message, "exit_code": code}},
        indent=2, sort_keys=True,
    ) + "\n")


if __name__ == "__main__":
    raise SystemExit(main())
