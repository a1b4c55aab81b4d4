"""String combinatorics, sample sets and the plain-text string format.

Strings are tuples of atomic symbols. A symbol is any hashable token: usually
a ``str``, but pair symbols of a two-track tape and grouped stack symbols are
tuples of symbols, so they stay first-class without any special casing.
"""

from __future__ import annotations

import os
from collections.abc import Hashable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from swaplab.errors import (
    BudgetExceeded,
    FormatError,
    IndexOutOfRange,
    InvalidLength,
    InvalidParameter,
    InvalidRange,
    UnknownSymbol,
)

Symbol = Hashable
Str = tuple
EMPTY: Str = ()

BUDGET_ENV = "SWAPLAB_BUDGET"
EPS_TOKEN = "EPS"


def budget(default: int) -> int:
    """Return the search budget, honouring the ``SWAPLAB_BUDGET`` override."""
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidParameter(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidParameter(f"{BUDGET_ENV} must be positive, got {value}")
    return value


class Counter:
    """Node counter that raises :class:`BudgetExceeded` past its limit."""

    def __init__(self, limit: int, what: str = "nodes"):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(f"more than {self.limit} {self.what} visited")


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of symbols; the order drives every lexicographic comparison."""

    symbols: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise InvalidParameter("an alphabet must be nonempty")
        index = {}
        for pos, sym in enumerate(symbols):
            if sym in index:
                raise InvalidParameter(f"duplicate symbol {sym!r} in alphabet")
            index[sym] = pos
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", index)

    def __contains__(self, sym) -> bool:
        return sym in self._index

    def __iter__(self) -> Iterator:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, sym) -> int:
        try:
            return self._index[sym]
        except KeyError:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet") from None

    def key(self, w: Str) -> tuple:
        """Sort key giving the lexicographic order induced by the symbol order."""
        return tuple(self.index(s) for s in w)

    def check(self, w: Str) -> Str:
        for s in w:
            if s not in self._index:
                raise UnknownSymbol(f"symbol {s!r} not in alphabet {format_string(self.symbols)}")
        return tuple(w)

    def words(self, length: int) -> Iterator[Str]:
        """All strings of exactly ``length`` symbols, in lexicographic order."""
        if length == 0:
            yield EMPTY
            return
        for head in self.words(length - 1):
            for s in self.symbols:
                yield head + (s,)


@dataclass(frozen=True)
class Interval:
    """Closed range of intercell boundaries ``[lo, hi]``; boundaries start at -1."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidRange(f"interval [{self.lo}, {self.hi}] has lo > hi")

    @property
    def width(self) -> int:
        return self.hi - self.lo

    def __contains__(self, b: int) -> bool:
        return self.lo <= b <= self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def word(text: str) -> Str:
    """Build a string from text: whitespace-separated tokens, else one symbol per character."""
    text = text.strip()
    if not text or text == EPS_TOKEN:
        return EMPTY
    if any(c.isspace() for c in text):
        return tuple(parse_symbol(tok) for tok in text.split())
    return tuple(text)


def prefix(w: Str, i: int) -> Str:
    if not 0 <= i <= len(w):
        raise IndexOutOfRange(f"prefix length {i} outside [0, {len(w)}]")
    return tuple(w[:i])


def suffix(w: Str, i: int) -> Str:
    if not 0 <= i <= len(w):
        raise IndexOutOfRange(f"suffix length {i} outside [0, {len(w)}]")
    return tuple(w[len(w) - i:])


def middle(w: Str, i: int, j: int) -> Str:
    """Drop the first ``i`` and the last ``|w| - j`` symbols; the result has ``j - i`` symbols.

    ``middle(w, i, i)`` is the empty string. The i-th symbol itself is
    :func:`symbol_at`.
    """
    if i > j:
        raise InvalidRange(f"middle range ({i}, {j}) has i > j")
    if i < 0 or j > len(w):
        raise IndexOutOfRange(f"middle range ({i}, {j}) outside [0, {len(w)}]")
    return tuple(w[i:j])


def symbol_at(w: Str, i: int):
    """The i-th symbol of ``w``, counting from 1."""
    if not 1 <= i <= len(w):
        raise IndexOutOfRange(f"position {i} outside [1, {len(w)}]")
    return w[i - 1]


def count_symbol(w: Str, a, alphabet: Alphabet | None = None) -> int:
    if alphabet is not None and a not in alphabet:
        raise UnknownSymbol(f"symbol {a!r} not in alphabet")
    return sum(1 for s in w if s == a)


def splice(x: Str, y: Str, i: int, j: int) -> Str:
    """``x`` with its cells ``i+1 .. j`` replaced by those of ``y``."""
    if len(x) != len(y):
        raise InvalidLength("splice needs equal-length strings")
    return prefix(x, i) + middle(y, i, j) + suffix(x, len(x) - j)


@dataclass(frozen=True)
class SampleSet:
    """A finite set of same-length strings, kept in lexicographic order."""

    alphabet: Alphabet
    n: int
    strings: tuple

    def __post_init__(self):
        members = [self.alphabet.check(w) for w in self.strings]
        for w in members:
            if len(w) != self.n:
                raise InvalidLength(f"sample {format_string(w)!r} has length {len(w)}, expected {self.n}")
        if len(set(members)) != len(members):
            raise InvalidParameter("sample set contains duplicate strings")
        members.sort(key=self.alphabet.key)
        object.__setattr__(self, "strings", tuple(members))

    @classmethod
    def of(cls, alphabet: Alphabet, strings: Iterable[Str], n: int | None = None) -> "SampleSet":
        members = list(dict.fromkeys(tuple(w) for w in strings))
        if n is None:
            if not members:
                raise InvalidParameter("cannot infer n from an empty sample set")
            n = len(members[0])
        return cls(alphabet, n, tuple(members))

    def __len__(self) -> int:
        return len(self.strings)

    def __iter__(self) -> Iterator[Str]:
        return iter(self.strings)

    def __contains__(self, w) -> bool:
        return tuple(w) in set(self.strings)

    def map(self, fn) -> "SampleSet":
        return SampleSet.of(self.alphabet, (fn(w) for w in self.strings), self.n)


def sample_partition(S: SampleSet, i: int, j: int) -> dict[Str, SampleSet]:
    """Group ``S`` by the length-``j`` window starting after cell ``i``."""
    if i < 0 or j < 1 or i + j > S.n:
        raise InvalidRange(f"window (i={i}, j={j}) does not fit length {S.n}")
    groups: dict[Str, list] = {}
    for w in S:
        groups.setdefault(middle(w, i, i + j), []).append(w)
    return {
        u: SampleSet(S.alphabet, S.n, tuple(ws))
        for u, ws in sorted(groups.items(), key=lambda kv: S.alphabet.key(kv[0]))
    }


# --- plain-text serialization -------------------------------------------------

def format_symbol(sym) -> str:
    if isinstance(sym, tuple):
        return "(" + ",".join(format_symbol(s) for s in sym) + ")"
    return str(sym)


def parse_symbol(tok: str):
    if not tok.startswith("("):
        return tok
    pos = 0

    def parse():
        nonlocal pos
        if tok[pos] != "(":
            start = pos
            while pos < len(tok) and tok[pos] not in ",()":
                pos += 1
            if start == pos:
                raise FormatError(f"empty symbol inside {tok!r}")
            return tok[start:pos]
        pos += 1
        parts = []
        if tok[pos] == ")":
            pos += 1
            return ()
        while True:
            parts.append(parse())
            if pos >= len(tok):
                raise FormatError(f"unbalanced symbol {tok!r}")
            if tok[pos] == ",":
                pos += 1
            elif tok[pos] == ")":
                pos += 1
                return tuple(parts)
            else:
                raise FormatError(f"bad symbol {tok!r}")

    try:
        sym = parse()
    except IndexError:
        raise FormatError(f"unbalanced symbol {tok!r}") from None
    if pos != len(tok):
        raise FormatError(f"trailing characters in symbol {tok!r}")
    return sym


def format_string(w: Sequence) -> str:
    if len(w) == 0:
        return EPS_TOKEN
    return " ".join(format_symbol(s) for s in w)


def parse_string(line: str) -> Str:
    toks = line.split()
    if toks == [EPS_TOKEN]:
        return EMPTY
    return tuple(parse_symbol(t) for t in toks)


def format_samples(S: SampleSet) -> str:
    lines = ["alphabet: " + format_string(S.alphabet.symbols)]
    lines += [format_string(w) for w in S]
    return "\n".join(lines) + "\n"


def parse_samples(text: str) -> SampleSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("alphabet:"):
        raise FormatError("sample file must start with an 'alphabet:' header")
    alphabet = Alphabet(parse_string(lines[0].split(":", 1)[1]))
    strings = [parse_string(ln) for ln in lines[1:]]
    if not strings:
        raise FormatError("sample file lists no strings")
    return SampleSet.of(alphabet, strings)
