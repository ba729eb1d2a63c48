"""Xor-sets and the parity partition.

A xor-set flips membership under every single-bit flip.  On the cube of
infinite streams such a set selects one parity half of each
finite-distance class; thinlab exposes that selection one anchored
class at a time (a base stream plus a label bit) because a global
selector cannot be materialised.  On finite words the same idea is the
weight-parity split: even-weight words versus odd-weight words, the
classical parity bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bits import Stream, Word, all_words, flip, hd
from .codes import Code, is_thin
from .errors import CodeError, ThinlabError

__all__ = [
    "AnchoredClass",
    "FiniteXorCandidate",
    "PartitionXorReport",
    "parity_class",
    "xorset_membership",
    "parity_partition",
    "is_xorset_finite",
    "verify_partition_implies_xor",
]


class NotRelatedError(ThinlabError):
    """The probed stream is not at finite distance from the class base."""


def parity_class(x: Stream, base: Stream) -> int:
    """Which parity half of base's finite-distance class x sits in:
    the distance to base reduced mod 2.

    Constant on even-flip orbits; flips whenever a single bit flips.
    """
    d = hd(x, base)
    if not d.is_finite:
        raise NotRelatedError("stream is infinitely far from the class base")
    return d.n % 2


@dataclass(frozen=True)
class AnchoredClass:
    """One finite-distance class, anchored at a base stream, with the
    label saying which parity half the xor-set keeps."""

    base: Stream
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be a bit, got {self.label!r}")
        if not self.base.closed_form:
            raise ValueError("anchored classes need a closed-form base")


def xorset_membership(x: Stream, anchored: AnchoredClass) -> bool:
    """True iff x lies in the selected parity half of the anchored class.

    Satisfies the defining exchange: membership flips under flip(x, n)
    for every index n.
    """
    return parity_class(x, anchored.base) == anchored.label


def parity_partition(n: int) -> tuple[Code, Code]:
    """Split the length-n words by weight parity.

    Both halves have minimum distance 2 (flipping one bit changes the
    parity), cover everything and are disjoint: the parity-bit picture
    of a two-part thin cover.
    """
    if n < 2:
        raise ValueError(f"parity partition needs n >= 2, got {n}")
    words = all_words(n)
    even = Code((w for w in words if w.weight % 2 == 0), length=n)
    odd = Code((w for w in words if w.weight % 2 == 1), length=n)
    return even, odd


@dataclass(frozen=True)
class FiniteXorCandidate:
    n: int
    members: frozenset[Word]

    def __post_init__(self):
        for w in self.members:
            if w.n != self.n:
                raise CodeError(f"member {w} does not live in length {self.n}")

    @classmethod
    def of(cls, code: Code) -> "FiniteXorCandidate":
        return cls(code.word_length, frozenset(code.members))


def is_xorset_finite(candidate: FiniteXorCandidate) -> bool:
    """True iff membership flips under every single-bit flip:
    for all words x and coordinates j, x in S iff flip(x, j) not in S."""
    members = candidate.members
    for x in all_words(candidate.n):
        inside = x in members
        for j in range(candidate.n):
            if (flip(x, j) in members) == inside:
                return False
    return True


@dataclass(frozen=True)
class PartitionXorReport:
    """Checked form of the cover-implies-xor statement: when two thin
    sets cover all length-n words, they are disjoint xor-sets.  When a
    part fails to be thin the conclusion is not asserted (skipped)."""

    n: int
    t0_thin: bool
    t1_thin: bool
    applicable: bool
    disjoint: Optional[bool] = None
    t0_xor: Optional[bool] = None
    t1_xor: Optional[bool] = None
    witness: Optional[str] = None

    @property
    def holds(self) -> Optional[bool]:
        if not self.applicable:
            return None
        return bool(self.disjoint and self.t0_xor and self.t1_xor)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "t0_thin": self.t0_thin,
            "t1_thin": self.t1_thin,
            "applicable": self.applicable,
            "disjoint": self.disjoint,
            "t0_xor": self.t0_xor,
            "t1_xor": self.t1_xor,
            "holds": self.holds,
            "witness": self.witness,
        }


def verify_partition_implies_xor(t0: Code, t1: Code) -> PartitionXorReport:
    """Check the finite cover-implies-xor statement on a concrete pair.

    Precondition: t0 and t1 jointly cover all words of their length.
    If both parts are thin, asserts disjointness and the xor property
    of each part and reports the conjunction; otherwise the premise
    fails and the check is skipped (reported as not applicable).
    """
    if not (t0.is_finite_kind and t1.is_finite_kind):
        raise CodeError("the finite cover check needs finite codes")
    if t0.word_length != t1.word_length:
        raise CodeError("both parts must live in the same word length")
    n = t0.word_length
    union = set(t0.members) | set(t1.members)
    if len(union) != 1 << n:
        raise CodeError(
            f"parts cover {len(union)} of {1 << n} words; not a cover"
        )
    t0_thin, t1_thin = is_thin(t0), is_thin(t1)
    if not (t0_thin and t1_thin):
        bad = "t0" if not t0_thin else "t1"
        return PartitionXorReport(
            n=n, t0_thin=t0_thin, t1_thin=t1_thin, applicable=False,
            witness=f"premise fails: {bad} is not thin",
        )
    overlap = set(t0.members) & set(t1.members)
    disjoint = not overlap
    x0 = is_xorset_finite(FiniteXorCandidate.of(t0))
    x1 = is_xorset_finite(FiniteXorCandidate.of(t1))
    witness = None
    if overlap:
        witness = f"shared word {sorted(map(str, overlap))[0]}"
    return PartitionXorReport(
        n=n, t0_thin=t0_thin, t1_thin=t1_thin, applicable=True,
        disjoint=disjoint, t0_xor=x0, t1_xor=x1, witness=witness,
    )
