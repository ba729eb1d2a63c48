"""Codes as admissible-message sets: distance, detection/correction,
thin and k-thin verification, likelihood decoding and transmission
simulation, plus greedy extension to a maximal thin superset.

A Code is either finite (a set of equal-length words, the admissible
messages of a fixed-width protocol) or infinite (a finite set of
closed-form streams).  Both kinds share the same distance-based
predicates; only the finite kind supports enumeration-style operations
(balls, decoding, maximalisation).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .bits import (
    OMEGA,
    ExtendedNat,
    Stream,
    Word,
    all_words,
    hd,
    _stream_disagreements,
)
from .errors import CodeError, InternalCheckError, LengthMismatchError

__all__ = [
    "Code",
    "DecodeStatus",
    "DecodeResult",
    "TransmissionResult",
    "ThinEquivalenceReport",
    "min_distance",
    "detects",
    "corrects",
    "is_thin",
    "is_k_thin",
    "thin_equivalence_report",
    "ball",
    "decode_nearest",
    "simulate_transmission",
    "extend_to_maximal_thin",
    "load_code",
    "loads_code",
    "dumps_code",
]


class Code:
    """An admissible-message set with set semantics.

    Finite kind: ``Code(words)`` where all words share one length n
    (pass ``length=`` explicitly to allow the empty code).  Infinite
    kind: ``Code.of_streams(streams)`` over closed-form streams;
    members are deduplicated semantically, so two presentations of the
    same stream count once.
    """

    __slots__ = ("members", "_length", "_min_cache")

    def __init__(self, words: Iterable[Word] = (), length: Optional[int] = None):
        members = frozenset(words)
        for w in members:
            if not isinstance(w, Word):
                raise CodeError(f"finite codes hold Words, got {type(w).__name__}")
            if length is None:
                length = w.n
            elif w.n != length:
                raise LengthMismatchError(
                    f"code members must share a length: {w.n} vs {length}"
                )
        if length is None:
            raise CodeError("empty code needs an explicit length")
        self.members = members
        self._length = length
        self._min_cache: Optional[ExtendedNat] = None

    @classmethod
    def of_streams(cls, streams: Iterable[Stream]) -> "Code":
        self = cls.__new__(cls)
        members = frozenset(streams)
        for s in members:
            if not isinstance(s, Stream):
                raise CodeError(f"stream codes hold Streams, got {type(s).__name__}")
            if not s.closed_form:
                raise CodeError("stream codes require closed-form members")
        self.members = members
        self._length = None
        self._min_cache = None
        return self

    @classmethod
    def from_strings(cls, lines: Iterable[str], length: Optional[int] = None) -> "Code":
        return cls((Word.from_string(s) for s in lines if s.strip()), length=length)

    @property
    def is_finite_kind(self) -> bool:
        return self._length is not None

    @property
    def universe_length(self) -> ExtendedNat:
        return ExtendedNat(self._length) if self._length is not None else OMEGA

    @property
    def word_length(self) -> int:
        if self._length is None:
            raise CodeError("stream codes have no finite word length")
        return self._length

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item) -> bool:
        return item in self.members

    def __eq__(self, other) -> bool:
        if not isinstance(other, Code):
            return NotImplemented
        return self.members == other.members and self._length == other._length

    def __hash__(self) -> int:
        return hash((self.members, self._length))

    def __repr__(self) -> str:
        kind = f"n={self._length}" if self.is_finite_kind else "streams"
        return f"Code({kind}, size={len(self.members)})"

    def sorted_words(self) -> list[Word]:
        if not self.is_finite_kind:
            raise CodeError("sorted_words applies to finite codes")
        return sorted(self.members, key=str)


def _pairwise_min(code: Code) -> ExtendedNat:
    if len(code) < 2:
        raise CodeError("minimum distance needs at least two code members")
    if code.is_finite_kind:
        values = [w.value for w in code.members]
        best = code.word_length + 1
        for i, a in enumerate(values):
            for b in values[i + 1:]:
                d = (a ^ b).bit_count()
                if d < best:
                    best = d
                    if best == 1:
                        return ExtendedNat(1)
        return ExtendedNat(best)
    best: ExtendedNat = OMEGA
    for x, y in itertools.combinations(code.members, 2):
        d = hd(x, y)
        if d < best:
            best = d
            if best == 1:
                break
    return best


def min_distance(code: Code) -> ExtendedNat:
    """Least Hamming distance over distinct member pairs.

    OMEGA is possible only for stream codes (two members whose aligned
    periodic parts disagree forever).
    """
    if code._min_cache is None:
        code._min_cache = _pairwise_min(code)
    return code._min_cache


def detects(code: Code, k: int) -> bool:
    """True iff every corruption of 1..k bits of a member leaves the code."""
    if k < 0:
        raise CodeError(f"error count must be a natural, got {k}")
    return min_distance(code) >= k + 1


def corrects(code: Code, k: int) -> bool:
    """True iff every corruption of at most k bits decodes back uniquely."""
    if k < 0:
        raise CodeError(f"error count must be a natural, got {k}")
    return min_distance(code) >= 2 * k + 1


def _projection_injective(code: Code) -> tuple[bool, Optional[tuple]]:
    """Delete-one-coordinate injectivity, checked directly.

    Finite codes: every coordinate projection must keep members
    distinct.  Stream codes: a projection can only collide for a pair
    whose complete disagreement set is a single coordinate, so scan the
    finite disagreement sets of member pairs.
    Returns (injective, witness pair or None).
    """
    if code.is_finite_kind:
        words = list(code.members)
        for i in range(code.word_length):
            seen: dict[Word, Word] = {}
            for w in words:
                p = w.delete(i)
                if p in seen:
                    return False, (seen[p], w)
                seen[p] = w
        return True, None
    for x, y in itertools.combinations(code.members, 2):
        positions, infinite = _stream_disagreements(x, y)
        if not infinite and len(positions) == 1:
            return False, (x, y)
    return True, None


def is_thin(code: Code) -> bool:
    """True iff deleting any single coordinate keeps members distinct.

    Computed by the projection route and cross-checked against the
    distance route (minimum distance >= 2); a disagreement between the
    two would be a thinlab bug.  The empty code and singletons are thin.
    """
    injective, _ = _projection_injective(code)
    if len(code) >= 2:
        by_distance = min_distance(code) >= 2
        if by_distance != injective:
            raise InternalCheckError(
                "projection and distance routes disagree on thinness"
            )
    return injective


def is_k_thin(code: Code, k: int) -> bool:
    """True iff the minimum distance is at least k (2-thin == thin)."""
    if k < 2:
        raise CodeError(f"k-thin needs k >= 2, got {k}")
    if len(code) < 2:
        return True
    return min_distance(code) >= k


@dataclass(frozen=True)
class ThinEquivalenceReport:
    """The three equivalent thinness conditions, evaluated separately."""

    projection_injective: bool
    classes_all_thin: bool
    min_distance_ge_2: bool
    classes: tuple[Code, ...]
    witness: Optional[tuple] = None

    @property
    def consistent(self) -> bool:
        return self.projection_injective == self.classes_all_thin == self.min_distance_ge_2

    @property
    def thin(self) -> bool:
        return self.projection_injective


def _finite_distance_classes(code: Code) -> list[Code]:
    """Partition a stream code by the finite-distance relation."""
    classes: list[list[Stream]] = []
    for s in code.members:
        for cls_members in classes:
            if hd(s, cls_members[0]).is_finite:
                cls_members.append(s)
                break
        else:
            classes.append([s])
    return [Code.of_streams(c) for c in classes]


def thin_equivalence_report(code: Code) -> ThinEquivalenceReport:
    """Evaluate all three thinness characterisations on a stream code:
    projection injectivity, every finite-distance class thin, and
    minimum distance >= 2.  They must agree; the report exposes each
    verdict plus the class decomposition and a witness pair if any
    route failed.
    """
    if code.is_finite_kind:
        raise CodeError("thin_equivalence_report applies to stream codes")
    injective, witness = _projection_injective(code)
    classes = tuple(_finite_distance_classes(code))
    classes_thin = all(
        len(c) < 2 or min_distance(c) >= 2 for c in classes
    )
    distance_ok = len(code) < 2 or min_distance(code) >= 2
    report = ThinEquivalenceReport(
        projection_injective=injective,
        classes_all_thin=classes_thin,
        min_distance_ge_2=distance_ok,
        classes=classes,
        witness=witness,
    )
    if not report.consistent:
        raise InternalCheckError("thinness characterisations disagree")
    return report


def ball(x: Word, d: int, within: Optional[Code] = None) -> frozenset[Word]:
    """Words at distance at most d from x.

    With ``within`` the ball is taken relative to that code (the
    membership-filtered neighbourhood); without it the whole ambient
    Hamming ball is enumerated.
    """
    if d < 0:
        raise CodeError(f"radius must be a natural, got {d}")
    if within is not None:
        if not within.is_finite_kind:
            raise CodeError("relative balls need a finite code")
        if within.word_length != x.n:
            raise LengthMismatchError(
                f"ball centre length {x.n} != code length {within.word_length}"
            )
        return frozenset(w for w in within if hd(w, x) <= d)
    out = set()
    for j in range(min(d, x.n) + 1):
        for positions in itertools.combinations(range(x.n), j):
            v = x.value
            for i in positions:
                v ^= 1 << i
            out.add(Word(v, x.n))
    return frozenset(out)


class DecodeStatus(enum.Enum):
    ACCEPTED = "accepted"
    CORRECTED = "corrected"
    AMBIGUOUS = "ambiguous"
    # Reserved for adapters that detect without attempting recovery.
    DETECTED_ONLY = "detected-only"


@dataclass(frozen=True)
class DecodeResult:
    status: DecodeStatus
    word: Optional[Word] = None
    error_count: Optional[int] = None
    candidates: frozenset[Word] = field(default_factory=frozenset)

    def to_json(self) -> dict:
        out: dict = {"status": self.status.value}
        if self.word is not None:
            out["word"] = str(self.word)
        if self.error_count is not None:
            out["errors"] = self.error_count
        if self.candidates:
            out["candidates"] = sorted(str(w) for w in self.candidates)
        return out


def decode_nearest(code: Code, received: Word) -> DecodeResult:
    """Likelihood decoding: map to the nearest codeword, never breaking
    ties (an ambiguous nearest set means recovery failed)."""
    if not code.is_finite_kind:
        raise CodeError("decoding needs a finite code")
    if len(code) == 0:
        raise CodeError("cannot decode against an empty code")
    if received.n != code.word_length:
        raise LengthMismatchError(
            f"received length {received.n} != code length {code.word_length}"
        )
    if received in code:
        return DecodeResult(DecodeStatus.ACCEPTED, word=received, error_count=0)
    best = received.n + 1
    nearest: list[Word] = []
    for w in code.members:
        d = (w.value ^ received.value).bit_count()
        if d < best:
            best, nearest = d, [w]
        elif d == best:
            nearest.append(w)
    if len(nearest) == 1:
        return DecodeResult(DecodeStatus.CORRECTED, word=nearest[0], error_count=best)
    return DecodeResult(DecodeStatus.AMBIGUOUS, candidates=frozenset(nearest),
                        error_count=best)


@dataclass(frozen=True)
class TransmissionResult:
    received: Word
    detected: bool
    decode: DecodeResult

    def to_json(self) -> dict:
        return {
            "received": str(self.received),
            "detected": self.detected,
            "decode": self.decode.to_json(),
        }


def simulate_transmission(code: Code, sent: Word,
                          error_positions: Iterable[int]) -> TransmissionResult:
    """Flip the listed bit positions of a sent codeword and run the
    receiver side: detection is membership failure, recovery is nearest
    decoding.  This is the operational route the distance thresholds
    are checked against."""
    if not code.is_finite_kind:
        raise CodeError("transmission simulation needs a finite code")
    if sent not in code:
        raise CodeError(f"sent word {sent} is not an admissible message")
    v = sent.value
    for i in set(error_positions):
        if not 0 <= i < sent.n:
            raise CodeError(f"error position {i} out of range for length {sent.n}")
        v ^= 1 << i
    received = Word(v, sent.n)
    detected = received not in code
    return TransmissionResult(received, detected, decode_nearest(code, received))


def extend_to_maximal_thin(code: Code, k: int = 2) -> Code:
    """Grow a k-thin finite code greedily (lexicographic candidate scan)
    until no word of the universe can be added without dropping the
    minimum distance below k."""
    if not code.is_finite_kind:
        raise CodeError("maximalisation runs on finite codes")
    if not is_k_thin(code, k):
        raise CodeError(f"seed code is not {k}-thin")
    members = set(code.members)
    for w in all_words(code.word_length):
        if w in members:
            continue
        if all((w.value ^ t.value).bit_count() >= k for t in members):
            members.add(w)
    return Code(members, length=code.word_length)


# ---------------------------------------------------------------------------
# 0/1-line file format


def loads_code(text: str, length: Optional[int] = None) -> Code:
    return Code.from_strings(text.splitlines(), length=length)


def load_code(path) -> Code:
    with open(path, "r", encoding="ascii") as fh:
        return loads_code(fh.read())


def dumps_code(code: Code) -> str:
    return "\n".join(str(w) for w in code.sorted_words()) + "\n"
