"""The word-extension game on the binary tree.

Two players, Ego and Alter, alternately append nonempty finite words to
a growing bit sequence; Ego begins.  A strategy is a pure function from
the full alternating move history to the next word.  Target sets are
three-valued prefix oracles: a finite prefix can certify membership
(In), certify non-membership (Out), or leave the question open
(Undecided), and a settled verdict must never change on extensions.

The engine plays finite-horizon transcripts and evaluates them against
target oracles; it never claims to decide who wins an infinite play
beyond what a prefix certifies.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .bits import Stream, Word
from .errors import OracleContractError, StrategyContractError

__all__ = [
    "Side",
    "Verdict",
    "Strategy",
    "PlayTranscript",
    "TargetSet",
    "play",
    "evaluate",
    "cylinder",
    "no_consecutive_ones",
    "stream_code_target",
    "random_strategy",
    "random_corpus",
    "save_corpus",
    "load_corpus",
    "corpus_to_json",
    "corpus_from_json",
]

History = tuple[Word, ...]


class Side(enum.Enum):
    EGO = "ego"
    ALTER = "alter"

    @property
    def parity(self) -> int:
        """Length parity of the histories this side replies to."""
        return 0 if self is Side.EGO else 1


class Verdict(enum.Enum):
    IN = "in"
    OUT = "out"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Strategy:
    """A deterministic reply function from move histories to move words.

    The history passed to ``reply`` is the full alternating move list
    of the play so far, so Ego replies to even-length histories (the
    empty one included) and Alter to odd-length ones.
    """

    side: Side
    reply_fn: Callable[[History], Word]
    name: str = ""
    table: Optional[dict] = field(default=None, compare=False, repr=False)
    fallback: Optional[Word] = field(default=None, compare=False, repr=False)

    def reply(self, history: History) -> Word:
        if len(history) % 2 != self.side.parity:
            raise StrategyContractError(
                f"{self.side.value} strategy asked on a history of length "
                f"{len(history)}", history=history,
            )
        move = self.reply_fn(history)
        if not isinstance(move, Word) or move.n < 1:
            raise StrategyContractError(
                f"strategy {self.name or '?'} returned {move!r} instead of a "
                f"nonempty word", history=history,
            )
        return move

    @classmethod
    def constant(cls, side: Side, word: Word, name: str = "") -> "Strategy":
        if word.n < 1:
            raise StrategyContractError("constant strategies need a nonempty word")
        return cls(side, lambda _h: word, name or f"const:{word}")

    @classmethod
    def copycat(cls, name: str = "copycat") -> "Strategy":
        """Alter strategy that repeats the opponent's previous move."""
        return cls(Side.ALTER, lambda h: h[-1], name)

    @classmethod
    def from_table(cls, side: Side, table: dict[History, Word], fallback: Word,
                   name: str = "") -> "Strategy":
        if fallback.n < 1:
            raise StrategyContractError("table fallback must be a nonempty word")
        return cls(side, lambda h: table.get(h, fallback), name,
                   table=dict(table), fallback=fallback)


@dataclass(frozen=True)
class PlayTranscript:
    """The alternating move record of one play.

    Move 2i belongs to Ego, move 2i+1 to Alter; the outcome prefix is
    the concatenation of all moves, i.e. the finite part of the
    eventual infinite sequence the play builds.
    """

    moves: tuple[Word, ...]
    rounds: int

    @property
    def outcome_prefix(self) -> Word:
        return Word.concat(self.moves)

    def side_of(self, index: int) -> Side:
        return Side.EGO if index % 2 == 0 else Side.ALTER

    def ego_moves(self) -> list[Word]:
        return list(self.moves[0::2])

    def alter_moves(self) -> list[Word]:
        return list(self.moves[1::2])

    def replay_check(self, ego: Optional[Strategy] = None,
                     alter: Optional[Strategy] = None) -> bool:
        """Verify every recorded move is the strategy's reply to the
        exact preceding history (catches stateful or impure strategies)."""
        for i, move in enumerate(self.moves):
            strat = ego if i % 2 == 0 else alter
            if strat is None:
                continue
            if strat.reply(self.moves[:i]) != move:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "moves": [
                {"side": self.side_of(i).value, "word": str(m)}
                for i, m in enumerate(self.moves)
            ],
            "rounds": self.rounds,
            "outcome": str(self.outcome_prefix),
        }


def play(ego: Strategy, alter: Strategy, rounds: int) -> PlayTranscript:
    """Run `rounds` Ego moves with the interleaved Alter replies.

    A round is one Ego move plus the following Alter move; the final
    Alter move is absent at the horizon, so the transcript holds
    ``rounds`` Ego moves and ``rounds - 1`` Alter moves and extending
    the horizon only appends.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    if ego.side is not Side.EGO or alter.side is not Side.ALTER:
        raise StrategyContractError("play() needs an Ego and an Alter strategy")
    moves: list[Word] = []
    for _ in range(rounds - 1):
        moves.append(ego.reply(tuple(moves)))
        moves.append(alter.reply(tuple(moves)))
    moves.append(ego.reply(tuple(moves)))
    return PlayTranscript(tuple(moves), rounds)


# ---------------------------------------------------------------------------
# Target sets


@dataclass(frozen=True)
class TargetSet:
    """Three-valued membership oracle over finite prefixes.

    ``membership`` must be monotone: once a prefix settles In or Out,
    every extension has to return the same verdict.  ``evaluate``
    checks this along the way and raises OracleContractError on a
    regression.
    """

    membership: Callable[[Word], Verdict]
    description: str = ""


def evaluate(target: TargetSet, transcript: PlayTranscript) -> Verdict:
    """Oracle verdict on the transcript's outcome prefix.

    In: Ego has won on every infinite extension.  Out: Alter has.
    Undecided: the horizon was insufficient to settle membership.
    """
    outcome = transcript.outcome_prefix
    settled: Optional[Verdict] = None
    verdict = Verdict.UNDECIDED
    for L in range(outcome.n + 1):
        verdict = target.membership(outcome[0:L])
        if settled is not None and verdict is not settled:
            raise OracleContractError(
                f"oracle {target.description or '?'} settled {settled.value} at "
                f"a shorter prefix but returned {verdict.value} at length {L}"
            )
        if settled is None and verdict in (Verdict.IN, Verdict.OUT):
            settled = verdict
    return verdict


def cylinder(word: Word) -> TargetSet:
    """The clopen set of all sequences that start with `word`."""

    def membership(prefix: Word) -> Verdict:
        common = min(prefix.n, word.n)
        if prefix[0:common] != word[0:common]:
            return Verdict.OUT
        return Verdict.IN if prefix.n >= word.n else Verdict.UNDECIDED

    return TargetSet(membership, description=f"cylinder:{word}")


def no_consecutive_ones() -> TargetSet:
    """Sequences avoiding the factor 11 (a closed set: membership can
    be refuted at finite depth but never certified)."""

    def membership(prefix: Word) -> Verdict:
        s = str(prefix)
        return Verdict.OUT if "11" in s else Verdict.UNDECIDED

    return TargetSet(membership, description="no-consecutive-ones")


def stream_code_target(streams: Sequence[Stream], description: str = "") -> TargetSet:
    """Membership in a finite set of streams, certified prefix-wise.

    A finite prefix can rule every member out, but can never certify
    membership (infinitely many bits stay unchecked), so the verdict is
    Out or Undecided.
    """
    members = list(streams)

    def membership(prefix: Word) -> Verdict:
        for s in members:
            if all(s.bit(k) == prefix[k] for k in range(prefix.n)):
                return Verdict.UNDECIDED
        return Verdict.OUT

    return TargetSet(membership, description=description or "stream-code")


# ---------------------------------------------------------------------------
# Strategy corpora


def _digest_word(salt: str, history: History, max_len: int) -> Word:
    key = salt + "|" + "/".join(str(w) for w in history)
    digest = hashlib.sha256(key.encode("ascii")).digest()
    length = 1 + digest[0] % max_len
    bits = ((digest[1 + i // 8] >> (i % 8)) & 1 for i in range(length))
    return Word.from_bits(bits)


def random_strategy(side: Side, seed: int, index: int, max_len: int = 3) -> Strategy:
    """A reproducible pseudo-random pure strategy.

    Replies are derived by hashing (seed, index, history), so the
    strategy is total, deterministic across runs and platforms, and
    needs no stored table.
    """
    salt = f"{seed}:{side.value}:{index}"
    return Strategy(
        side,
        lambda h: _digest_word(salt, h, max_len),
        name=f"seeded:{seed}:{side.value}:{index}",
    )


def random_corpus(side: Side, count: int, seed: int, max_len: int = 3) -> list[Strategy]:
    return [random_strategy(side, seed, i, max_len) for i in range(count)]


# Corpus files hold table-based strategies: explicit entries up to some
# depth plus a constant fallback word.

def corpus_to_json(strategies: Iterable[Strategy]) -> dict:
    out = []
    for s in strategies:
        if s.table is None or s.fallback is None:
            raise ValueError(
                f"strategy {s.name or '?'} is not table-backed; only "
                "table+fallback strategies serialize"
            )
        out.append({
            "name": s.name,
            "side": s.side.value,
            "fallback": str(s.fallback),
            "table": [
                {"history": [str(w) for w in h], "move": str(m)}
                for h, m in sorted(s.table.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        })
    return {"schema": "thinlab/1", "strategies": out}


def corpus_from_json(obj: dict) -> list[Strategy]:
    strategies = []
    for entry in obj["strategies"]:
        table = {
            tuple(Word.from_string(w) for w in row["history"]):
                Word.from_string(row["move"])
            for row in entry.get("table", [])
        }
        strategies.append(Strategy.from_table(
            Side(entry["side"]),
            table,
            Word.from_string(entry["fallback"]),
            name=entry.get("name", ""),
        ))
    return strategies


def save_corpus(strategies: Iterable[Strategy], path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(corpus_to_json(strategies), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(path) -> list[Strategy]:
    with open(path, "r", encoding="ascii") as fh:
        return corpus_from_json(json.load(fh))
