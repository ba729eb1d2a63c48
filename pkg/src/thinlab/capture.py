"""Strategy-capture procedures: executable forms of the two
constructive arguments behind the game analysis.

``capture_ego`` runs two entangled plays against one Ego strategy and
produces a pair of outcome prefixes at Hamming distance exactly 1 (so a
thin target set can contain at most one of them).

``capture_alter`` runs a whole schedule of plays against one Alter
strategy, spreading the globally-enumerated replies v_1, v_2, ... so
that every play's outcome is the play-0 outcome with its leading bits
xored by the play index: r_i = theta(r_0, i).  The reply enumeration is
checked step by step (the scheduling loop invariant); a failure means a
thinlab bug, not bad input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bits import Word, hd, theta
from .errors import CaptureInvariantError
from .game import PlayTranscript, Side, Strategy

__all__ = [
    "MirrorCaptureResult",
    "DiagonalCaptureResult",
    "TraceMove",
    "ThetaCheck",
    "capture_ego",
    "capture_alter",
    "verify_theta_relation",
]


@dataclass(frozen=True)
class MirrorCaptureResult:
    """Two plays against one Ego strategy whose outcomes differ in
    exactly one bit, located right after the fixed opening move."""

    initial: PlayTranscript
    mirror: PlayTranscript
    divergence_index: int

    def to_json(self) -> dict:
        return {
            "initial": self.initial.to_json(),
            "mirror": self.mirror.to_json(),
            "divergence_index": self.divergence_index,
        }


def capture_ego(ego: Strategy, rounds: int) -> MirrorCaptureResult:
    """Play the initial and mirror games against `ego` simultaneously.

    Alter's first reply is the single bit 0 in the initial play and
    (1 concatenated with ego's second initial-play move) in the mirror
    play; from then on each play's Alter move copies the Ego move the
    other play just produced.  Both transcripts end with `rounds` Ego
    moves and equal outcome-prefix lengths.
    """
    if rounds < 2:
        raise ValueError(f"capture_ego needs rounds >= 2, got {rounds}")
    if ego.side is not Side.EGO:
        raise CaptureInvariantError("capture_ego expects an Ego strategy")

    first = ego.reply(())
    initial: list[Word] = [first, Word(0, 1)]
    second = ego.reply(tuple(initial))
    initial.append(second)
    mirror: list[Word] = [first, Word(1, 1) + second]

    for k in range(1, rounds):
        beta = ego.reply(tuple(mirror))
        mirror.append(beta)
        initial.append(beta)
        if k < rounds - 1:
            alpha = ego.reply(tuple(initial))
            initial.append(alpha)
            mirror.append(alpha)

    result = MirrorCaptureResult(
        initial=PlayTranscript(tuple(initial), rounds),
        mirror=PlayTranscript(tuple(mirror), rounds),
        divergence_index=first.n,
    )

    if not result.initial.replay_check(ego=ego) or not result.mirror.replay_check(ego=ego):
        raise CaptureInvariantError(
            "transcripts do not replay against the given strategy "
            "(is it stateful or randomized?)"
        )
    a_out = result.initial.outcome_prefix
    b_out = result.mirror.outcome_prefix
    if a_out.n != b_out.n or hd(a_out, b_out) != 1 or a_out[first.n] == b_out[first.n]:
        raise CaptureInvariantError(
            "mirror outcomes do not differ in exactly the expected bit"
        )
    return result


@dataclass(frozen=True)
class TraceMove:
    """One scheduled move; Alter moves carry their global reply id."""

    play: int
    side: Side
    word: Word
    reply_id: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "play": self.play,
            "side": self.side.value,
            "word": str(self.word),
            "reply_id": self.reply_id,
        }


@dataclass(frozen=True)
class DiagonalCaptureResult:
    plays: tuple[PlayTranscript, ...]
    reply_log: tuple[Word, ...]
    sweeps: int
    trace: tuple[TraceMove, ...]

    def outcome(self, i: int) -> Word:
        return self.plays[i].outcome_prefix

    def min_outcome_length(self) -> int:
        return min(p.outcome_prefix.n for p in self.plays)

    def to_json(self) -> dict:
        return {
            "sweeps": self.sweeps,
            "plays": [p.to_json() for p in self.plays],
            "reply_log": [str(v) for v in self.reply_log],
            "trace": [t.to_json() for t in self.trace],
        }


def capture_alter(alter: Strategy, m: int, sweeps: int) -> DiagonalCaptureResult:
    """Run the diagonal schedule against `alter` and return the
    transcripts of plays 0..m.

    Play 0 opens with the single bit 0.  Sweep i starts play i with the
    opening word theta(0 v_1 ... v_{i(i+3)/2-1}, i) and then feeds play
    j (for j = 0..i) the reply block v_{i(i+1)/2+1+j} .. v_{i(i+1)/2+i+j}
    as its next move.  `sweeps` truncates the infinite schedule; plays
    with index above `sweeps` never start, so m <= sweeps is required.
    """
    if m < 0:
        raise ValueError(f"m must be a natural, got {m}")
    if sweeps < m:
        raise ValueError(f"need sweeps >= m so plays 0..{m} all start")
    if alter.side is not Side.ALTER:
        raise CaptureInvariantError("capture_alter expects an Alter strategy")

    reply_log: list[Word] = []
    histories: dict[int, list[Word]] = {}
    trace: list[TraceMove] = []

    def ego_move(play_id: int, word: Word) -> None:
        histories[play_id].append(word)
        trace.append(TraceMove(play_id, Side.EGO, word))

    def alter_reply(play_id: int, expected_id: int) -> None:
        # loop invariant: this reply's scheduling number matches the
        # subscript the pseudo-schedule assigns to it
        if len(reply_log) + 1 != expected_id:
            raise CaptureInvariantError(
                f"reply enumeration out of step: issuing reply "
                f"{len(reply_log) + 1} where v_{expected_id} was scheduled"
            )
        v = alter.reply(tuple(histories[play_id]))
        histories[play_id].append(v)
        reply_log.append(v)
        trace.append(TraceMove(play_id, Side.ALTER, v, expected_id))

    def v_block(lo: int, hi: int) -> Word:
        # consumes v_lo..v_hi inclusive (1-based); the schedule always
        # consumes exactly up to the newest reply
        if lo < 1 or hi != len(reply_log):
            raise CaptureInvariantError(
                f"block v_{lo}..v_{hi} inconsistent with {len(reply_log)} "
                "replies issued"
            )
        return Word.concat(reply_log[lo - 1: hi])

    histories[0] = []
    ego_move(0, Word(0, 1))
    alter_reply(0, 1)

    for i in range(1, sweeps + 1):
        start_id = i * (i + 3) // 2
        opening = theta(Word(0, 1) + v_block(1, start_id - 1), i)
        histories[i] = []
        ego_move(i, opening)
        alter_reply(i, start_id)
        base = i * (i + 1) // 2
        for j in range(i + 1):
            ego_move(j, v_block(base + 1 + j, base + i + j))
            alter_reply(j, start_id + j + 1)

    plays = []
    for i in range(m + 1):
        moves = tuple(histories[i])
        transcript = PlayTranscript(moves, (len(moves) + 1) // 2)
        if not transcript.replay_check(alter=alter):
            raise CaptureInvariantError(
                f"play {i} does not replay against the given strategy"
            )
        plays.append(transcript)

    return DiagonalCaptureResult(
        plays=tuple(plays),
        reply_log=tuple(reply_log),
        sweeps=sweeps,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class ThetaCheck:
    """Outcome of the xor-shift verification; falsy when any play's
    prefix deviates from theta(play-0 prefix, play index)."""

    ok: bool
    length: int
    failures: tuple[tuple[int, int], ...] = ()  # (play index, first bad bit)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "length": self.length,
            "failures": [list(f) for f in self.failures],
        }


def verify_theta_relation(result: DiagonalCaptureResult, length: int) -> ThetaCheck:
    """Check prefix_L(r_i) == prefix_L(theta(r_0, i)) for every returned
    play i, at L = `length`."""
    available = result.min_outcome_length()
    if length > available:
        raise ValueError(
            f"length {length} exceeds the common outcome prefix ({available})"
        )
    base = result.outcome(0)[0:length]
    failures = []
    for i, play in enumerate(result.plays):
        expected = theta(base, i)
        got = play.outcome_prefix[0:length]
        if got != expected:
            bad = next(k for k in range(length) if got[k] != expected[k])
            failures.append((i, bad))
    return ThetaCheck(ok=not failures, length=length, failures=tuple(failures))
