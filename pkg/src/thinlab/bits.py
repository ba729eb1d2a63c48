"""Bit words, finitely-presented infinite bitstreams and the Hamming metric.

Conventions used throughout thinlab:

* A ``Word`` is a finite bit vector.  Index 0 is the leftmost (first
  transmitted) bit, so ``str(Word.from_string("0101"))== "0101"`` and
  ``w[0] == 0``.  Internally the bits live in a Python int with word
  index k stored at integer bit k; this makes the masked-xor operator
  ``theta`` a single integer xor.

* A ``Stream`` is an infinite bit sequence given in one of three finite
  presentations: eventually constant, eventually periodic, or generated
  by an oracle function up to a declared horizon.  Exact distance and
  the relations ``sim_related`` / ``approx_related`` are only decidable
  on the closed forms (constant/periodic); generated streams must be
  probed through ``hd_prefix``.

* Distances take values in ``ExtendedNat``: a natural number or OMEGA,
  ordered with every natural below OMEGA and with addition saturating
  at OMEGA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Union

from .errors import (
    HorizonExceededError,
    IndexRangeError,
    LengthMismatchError,
    NotClosedFormError,
)

__all__ = [
    "ExtendedNat",
    "OMEGA",
    "Word",
    "Stream",
    "EventuallyConstant",
    "EventuallyPeriodic",
    "Generated",
    "all_words",
    "bit_k",
    "popcount",
    "hd",
    "hd_prefix",
    "sim_related",
    "approx_related",
    "theta",
    "flip",
    "stream_to_json",
    "stream_from_json",
]


# ---------------------------------------------------------------------------
# Extended naturals


class ExtendedNat:
    """A natural number or OMEGA (the value of infinite distances).

    Comparisons and equality also accept plain ints, so
    ``hd(x, y) == 3`` and ``hd(x, y) >= 2`` read naturally in client
    code.  Addition saturates: anything plus OMEGA is OMEGA.
    """

    __slots__ = ("_v",)

    def __init__(self, value: int | None):
        if value is not None:
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"ExtendedNat needs a natural number, got {value!r}")
        self._v = value

    @property
    def is_finite(self) -> bool:
        return self._v is not None

    @property
    def is_omega(self) -> bool:
        return self._v is None

    @property
    def n(self) -> int:
        """The finite value; raises on OMEGA."""
        if self._v is None:
            raise ValueError("OMEGA has no finite value")
        return self._v

    def __int__(self) -> int:
        return self.n

    @staticmethod
    def _coerce(other) -> "ExtendedNat":
        if isinstance(other, ExtendedNat):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return ExtendedNat(other)
        return NotImplemented  # type: ignore[return-value]

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._v == o._v

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._v is None:
            return False
        if o._v is None:
            return True
        return self._v < o._v

    def __le__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self == o or self < o

    def __gt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o < self

    def __ge__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o <= self

    def __add__(self, other) -> "ExtendedNat":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._v is None or o._v is None:
            return OMEGA
        return ExtendedNat(self._v + o._v)

    __radd__ = __add__

    def __hash__(self) -> int:
        # Finite values hash like the underlying int so that
        # ExtendedNat(3) == 3 stays consistent with hashing.
        return hash(self._v) if self._v is not None else hash("thinlab.omega")

    def __repr__(self) -> str:
        return "Omega" if self._v is None else f"Finite({self._v})"

    def to_json(self):
        return "omega" if self._v is None else self._v


OMEGA = ExtendedNat(None)


# ---------------------------------------------------------------------------
# Words


def popcount(m: int) -> int:
    """Number of ones in the binary expansion of m."""
    return m.bit_count()


def bit_k(k: int, n: int) -> int:
    """The k-th binary digit of n, counting from the least significant.

    Agrees with the case split on ``n mod 2**(k+1)``: digit 0 on the
    lower half of each block of length 2**(k+1), digit 1 on the upper.
    """
    if k < 0 or n < 0:
        raise IndexRangeError(f"bit_k needs naturals, got k={k}, n={n}")
    return (n >> k) & 1


class Word:
    """An immutable finite bit vector.

    ``Word(value, length)`` interprets ``value`` little-endian: word
    index k is integer bit k.  Use ``Word.from_string`` for the usual
    left-to-right textual form.
    """

    __slots__ = ("value", "n")

    def __init__(self, value: int, length: int):
        if length < 0:
            raise IndexRangeError(f"negative word length {length}")
        if value < 0 or value >> length:
            raise IndexRangeError(f"value {value} does not fit in {length} bits")
        self.value = value
        self.n = length

    @classmethod
    def from_string(cls, bits: str) -> "Word":
        bits = bits.strip()
        value = 0
        for i, ch in enumerate(bits):
            if ch == "1":
                value |= 1 << i
            elif ch != "0":
                raise ValueError(f"word strings may only contain 0/1, got {bits!r}")
        return cls(value, len(bits))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Word":
        value = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {b!r}")
            value |= b << n
            n += 1
        return cls(value, n)

    @classmethod
    def zeros(cls, n: int) -> "Word":
        return cls(0, n)

    @classmethod
    def concat(cls, parts: Iterable["Word"]) -> "Word":
        value = 0
        n = 0
        for p in parts:
            value |= p.value << n
            n += p.n
        return cls(value, n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i):
        if isinstance(i, slice):
            start, stop, step = i.indices(self.n)
            if step != 1:
                raise IndexRangeError("word slices must be contiguous")
            length = max(0, stop - start)
            return Word((self.value >> start) & ((1 << length) - 1), length)
        if not 0 <= i < self.n:
            raise IndexRangeError(f"bit index {i} out of range for length {self.n}")
        return (self.value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        v = self.value
        for _ in range(self.n):
            yield v & 1
            v >>= 1

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.value | (other.value << self.n), self.n + other.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.value == other.value and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.value, self.n))

    def __str__(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.n))

    def __repr__(self) -> str:
        return f"Word('{self}')"

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def delete(self, i: int) -> "Word":
        """The word with coordinate i removed (length drops by one)."""
        if not 0 <= i < self.n:
            raise IndexRangeError(f"coordinate {i} out of range for length {self.n}")
        low = self.value & ((1 << i) - 1)
        high = self.value >> (i + 1)
        return Word(low | (high << i), self.n - 1)


def all_words(n: int) -> list[Word]:
    """All words of length n in lexicographic (textual) order."""
    if n < 0:
        raise IndexRangeError(f"negative length {n}")
    out = []
    for i in range(1 << n):
        # The textual lex order reads index 0 first, so reverse the
        # counter bits into the little-endian storage.
        value = 0
        for k in range(n):
            if (i >> (n - 1 - k)) & 1:
                value |= 1 << k
        out.append(Word(value, n))
    return out


# ---------------------------------------------------------------------------
# Streams


class Stream:
    """Common interface of the three finitely-presented infinite streams."""

    def bit(self, k: int) -> int:
        raise NotImplementedError

    def take(self, length: int) -> Word:
        """The word made of the first `length` bits."""
        return Word.from_bits(self.bit(k) for k in range(length))

    @property
    def closed_form(self) -> bool:
        """True when exact distances are decidable on this stream."""
        return False

    def _canonical(self) -> tuple[str, str]:
        raise NotClosedFormError(f"{type(self).__name__} has no closed form")

    def __eq__(self, other) -> bool:
        if isinstance(other, Stream):
            if self.closed_form and other.closed_form:
                return self._canonical() == other._canonical()
            return self is other
        return NotImplemented

    def __hash__(self) -> int:
        if self.closed_form:
            return hash(self._canonical())
        return object.__hash__(self)


def _shrink(prefix: str, period: str) -> tuple[str, str]:
    """Canonicalise a prefix+repeating-period presentation.

    Reduces the period to its primitive root, then pulls the boundary
    left while the last prefix bit agrees with what the (rotated)
    period would produce there.  Two presentations denote the same
    stream iff they shrink to the same pair.
    """
    plen = len(period)
    for d in range(1, plen + 1):
        if plen % d == 0 and all(period[i] == period[i % d] for i in range(plen)):
            period = period[:d]
            break
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    return prefix, period


@dataclass(frozen=True, eq=False)
class EventuallyConstant(Stream):
    """prefix followed by a constant tail bit."""

    prefix: Word
    tail: int

    def __post_init__(self):
        if self.tail not in (0, 1):
            raise ValueError(f"tail bit must be 0 or 1, got {self.tail!r}")

    def bit(self, k: int) -> int:
        if k < 0:
            raise IndexRangeError(f"negative stream index {k}")
        return self.prefix[k] if k < self.prefix.n else self.tail

    @property
    def closed_form(self) -> bool:
        return True

    def _canonical(self) -> tuple[str, str]:
        return _shrink(str(self.prefix), str(self.tail))

    def __repr__(self) -> str:
        return f"EventuallyConstant('{self.prefix}', {self.tail})"


@dataclass(frozen=True, eq=False)
class EventuallyPeriodic(Stream):
    """prefix followed by a repeating nonempty period."""

    prefix: Word
    period: Word

    def __post_init__(self):
        if self.period.n < 1:
            raise ValueError("period must be nonempty")

    def bit(self, k: int) -> int:
        if k < 0:
            raise IndexRangeError(f"negative stream index {k}")
        if k < self.prefix.n:
            return self.prefix[k]
        return self.period[(k - self.prefix.n) % self.period.n]

    @property
    def closed_form(self) -> bool:
        return True

    def _canonical(self) -> tuple[str, str]:
        return _shrink(str(self.prefix), str(self.period))

    def __repr__(self) -> str:
        return f"EventuallyPeriodic('{self.prefix}', '{self.period}')"


class Generated(Stream):
    """Oracle-backed stream, total only up to a declared horizon.

    The horizon keeps every operation on these streams finite and
    reproducible; probing past it raises HorizonExceededError.
    """

    __slots__ = ("fn", "horizon", "description")

    def __init__(self, fn: Callable[[int], int], horizon: int, description: str = ""):
        if horizon < 0:
            raise ValueError(f"horizon must be a natural, got {horizon}")
        self.fn = fn
        self.horizon = horizon
        self.description = description

    def bit(self, k: int) -> int:
        if k < 0:
            raise IndexRangeError(f"negative stream index {k}")
        if k >= self.horizon:
            raise HorizonExceededError(
                f"index {k} beyond declared horizon {self.horizon}"
            )
        b = self.fn(k)
        if b not in (0, 1):
            raise ValueError(f"stream oracle returned non-bit {b!r} at index {k}")
        return b

    def __repr__(self) -> str:
        tag = self.description or "?"
        return f"Generated({tag!r}, horizon={self.horizon})"


BitVector = Union[Word, Stream]


def _canon_parts(x: Stream) -> tuple[Word, Word]:
    """(prefix, period) view of a closed-form stream, constants embedded
    as unit periods."""
    if isinstance(x, EventuallyConstant):
        return x.prefix, Word(x.tail, 1)
    if isinstance(x, EventuallyPeriodic):
        return x.prefix, x.period
    raise NotClosedFormError(
        f"exact arithmetic needs a closed-form stream, got {type(x).__name__};"
        " use hd_prefix for finite-horizon probing"
    )


def _unroll(prefix: Word, period: Word, upto: int) -> tuple[Word, Word]:
    """Extend the prefix to length `upto`, rotating the period to match."""
    if prefix.n >= upto:
        return prefix, period
    extra = upto - prefix.n
    bits = [period[i % period.n] for i in range(extra)]
    rotated_start = extra % period.n
    rotated = Word.from_bits(
        period[(rotated_start + i) % period.n] for i in range(period.n)
    )
    return prefix + Word.from_bits(bits), rotated


def _stream_disagreements(x: Stream, y: Stream) -> tuple[list[int], bool]:
    """(positions where x and y differ, infinitely-many-more flag).

    When the flag is False the list is the complete disagreement set.
    When True the list holds the disagreements below the point where
    the aligned periods start disagreeing forever (enough for parity
    and witness reporting, not a complete enumeration).
    """
    px, qx = _canon_parts(x)
    py, qy = _canon_parts(y)
    upto = max(px.n, py.n)
    px, qx = _unroll(px, qx, upto)
    py, qy = _unroll(py, qy, upto)
    positions = [k for k in range(upto) if px[k] != py[k]]
    span = math.lcm(qx.n, qy.n)
    infinite = any(qx[i % qx.n] != qy[i % qy.n] for i in range(span))
    return positions, infinite


def hd(x: BitVector, y: BitVector) -> ExtendedNat:
    """Hamming distance: how many positions hold different bits.

    Words must have equal lengths and always yield a finite value.
    Streams must both be closed-form; the count is exact, with OMEGA
    returned when the aligned periodic parts disagree.
    """
    if isinstance(x, Word) and isinstance(y, Word):
        if x.n != y.n:
            raise LengthMismatchError(f"word lengths differ: {x.n} vs {y.n}")
        return ExtendedNat((x.value ^ y.value).bit_count())
    if isinstance(x, Stream) and isinstance(y, Stream):
        positions, infinite = _stream_disagreements(x, y)
        return OMEGA if infinite else ExtendedNat(len(positions))
    raise TypeError("hd compares two Words or two Streams")


def hd_prefix(x: Stream, y: Stream, length: int) -> int:
    """Disagreement count among stream indices 0..length-1.

    Works on any stream kind; generated streams must declare a horizon
    of at least `length`.
    """
    if length < 0:
        raise IndexRangeError(f"negative prefix length {length}")
    return sum(1 for k in range(length) if x.bit(k) != y.bit(k))


def sim_related(x: Stream, y: Stream) -> bool:
    """True iff the streams differ in finitely many positions."""
    return hd(x, y).is_finite


def approx_related(x: Stream, y: Stream) -> bool:
    """True iff the streams differ in finitely many and evenly many positions."""
    d = hd(x, y)
    return d.is_finite and d.n % 2 == 0


# ---------------------------------------------------------------------------
# Bit manipulation operators


def theta(x: BitVector, m: int):
    """Xor the leading bits of x with the binary expansion of m.

    Bit k of m lands on index k of x, so ``theta(x, 0) == x``,
    ``theta(theta(x, m), m) == x`` and the distance to x is exactly
    ``popcount(m)``.  For words m must fit the word: 0 <= m < 2**len(x).
    """
    if m < 0:
        raise IndexRangeError(f"xor mask must be a natural, got {m}")
    if isinstance(x, Word):
        if m >> x.n:
            raise IndexRangeError(f"mask {m} out of range for word length {x.n}")
        return Word(x.value ^ m, x.n)
    if isinstance(x, EventuallyConstant):
        upto = max(x.prefix.n, m.bit_length())
        prefix = x.prefix + Word(0 if x.tail == 0 else (1 << (upto - x.prefix.n)) - 1,
                                 upto - x.prefix.n)
        return EventuallyConstant(Word(prefix.value ^ m, upto), x.tail)
    if isinstance(x, EventuallyPeriodic):
        upto = max(x.prefix.n, m.bit_length())
        prefix, period = _unroll(x.prefix, x.period, upto)
        return EventuallyPeriodic(Word(prefix.value ^ m, upto), period)
    if isinstance(x, Generated):
        if m.bit_length() > x.horizon:
            raise HorizonExceededError(
                f"mask {m} reaches past horizon {x.horizon}"
            )
        inner = x.fn
        return Generated(lambda k: inner(k) ^ ((m >> k) & 1), x.horizon,
                         description=f"theta({x.description or '?'}, {m})")
    raise TypeError(f"theta does not apply to {type(x).__name__}")


def flip(x: BitVector, n: int):
    """Invert exactly the bit at index n; an involution."""
    if n < 0:
        raise IndexRangeError(f"negative flip index {n}")
    if isinstance(x, Word):
        if n >= x.n:
            raise IndexRangeError(f"flip index {n} out of range for length {x.n}")
        return Word(x.value ^ (1 << n), x.n)
    if isinstance(x, (EventuallyConstant, EventuallyPeriodic, Generated)):
        return theta(x, 1 << n)
    raise TypeError(f"flip does not apply to {type(x).__name__}")


# ---------------------------------------------------------------------------
# Serialization (closed forms only)


def stream_to_json(x: Stream) -> dict:
    if isinstance(x, EventuallyConstant):
        return {"kind": "constant", "prefix": str(x.prefix), "tail": str(x.tail)}
    if isinstance(x, EventuallyPeriodic):
        return {"kind": "periodic", "prefix": str(x.prefix), "period": str(x.period)}
    raise NotClosedFormError("only closed-form streams serialize")


def stream_from_json(obj: dict) -> Stream:
    kind = obj.get("kind")
    if kind == "constant":
        return EventuallyConstant(Word.from_string(obj["prefix"]), int(obj["tail"]))
    if kind == "periodic":
        return EventuallyPeriodic(Word.from_string(obj["prefix"]),
                                  Word.from_string(obj["period"]))
    raise ValueError(f"unknown stream kind {kind!r}")
