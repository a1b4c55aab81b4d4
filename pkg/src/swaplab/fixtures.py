"""Two-track tapes, advice functions, example languages and their sample sets."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import NamedTuple

from swaplab.automata import Dfa, Npda, dfa_product
from swaplab.core import Alphabet, SampleSet, Str, count_symbol
from swaplab.errors import InvalidLength, InvalidParameter, LengthMismatch, UnknownFixture
from swaplab.grammar import Cfg, bound_stack_growth, cfg_to_npda, grammar_from_text, to_greibach

BINARY = Alphabet(("0", "1"))
ABC = Alphabet(("a", "b", "c"))
PAL_HASH = Alphabet(("0", "1", "#"))
EQUAL6 = Alphabet(("a1", "a2", "a3", "a4", "a5", "a6", "#"))


# --- tracks -------------------------------------------------------------------

@dataclass(frozen=True)
class TrackString:
    upper: Str
    lower: Str
    pairs: Str

    def __post_init__(self):
        if not len(self.upper) == len(self.lower) == len(self.pairs):
            raise LengthMismatch("track lengths differ")
        if any(p != (u, w) for p, u, w in zip(self.pairs, self.upper, self.lower)):
            raise LengthMismatch("pair symbols disagree with the tracks")


def compose_track(x: Str, w: Str) -> TrackString:
    if len(x) != len(w):
        raise LengthMismatch(f"upper track has {len(x)} cells, lower track {len(w)}")
    return TrackString(tuple(x), tuple(w), tuple(zip(x, w)))


def split_track(pairs: Str) -> TrackString:
    return TrackString(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), tuple(pairs))


def track_alphabet(upper: Alphabet, lower: Alphabet) -> Alphabet:
    return Alphabet(tuple(product(upper, lower)))


# --- advice -------------------------------------------------------------------

@dataclass(frozen=True)
class AdviceFunction:
    name: str
    alphabet: Alphabet
    generator: Callable[[int], Str]

    def __call__(self, n: int) -> Str:
        if n < 0:
            raise InvalidLength("advice is defined for n >= 0")
        h = self.generator(n)
        assert len(h) == n, f"advice {self.name}({n}) has length {len(h)}"
        return h


def advice_l3eq(n: int) -> Str:
    if n % 3 == 0:
        third = n // 3
        return ("a",) * third + ("b",) * third + ("c",) * third
    return ("0",) * n


def advice_pal(n: int) -> Str:
    if n == 0:
        return ()
    if n % 2 == 0:
        half = n // 2 - 1
        return ("0",) * half + ("1", "0") + ("1",) * half
    return ("1",) * n


ADVICE = {
    "l3eq": AdviceFunction("l3eq", Alphabet(("a", "b", "c", "0")), advice_l3eq),
    "pal": AdviceFunction("pal", BINARY, advice_pal),
}


def advice(name: str) -> AdviceFunction:
    try:
        return ADVICE[name]
    except KeyError:
        raise UnknownFixture(f"unknown advice function {name!r}; known: {', '.join(ADVICE)}") from None


# --- example languages --------------------------------------------------------

@dataclass(frozen=True)
class LanguagePredicate:
    name: str
    alphabet: Alphabet
    membership: Callable[[Str], bool]

    def __call__(self, w: Str) -> bool:
        return self.membership(self.alphabet.check(w))


def _is_pal(w):
    return len(w) % 2 == 0 and tuple(w) == tuple(reversed(w))


def _is_dup(w):
    half = len(w) // 2
    return len(w) % 2 == 0 and tuple(w[:half]) == tuple(w[half:])


def _is_equal6(w):
    counts = {count_symbol(w, a) for a in EQUAL6.symbols if a != "#"}
    return len(counts) == 1


def _is_l3eq(w):
    n = len(w)
    if n % 3:
        return False
    return tuple(w) == advice_l3eq(n)


def _is_pal_hash(w):
    if count_symbol(w, "#") != 1 or len(w) % 2 == 0:
        return False
    half = len(w) // 2
    return w[half] == "#" and tuple(w[:half]) == tuple(reversed(w[half + 1:]))


PREDICATES = {
    "pal": LanguagePredicate("pal", BINARY, _is_pal),
    "equal": LanguagePredicate("equal", BINARY, lambda w: count_symbol(w, "0") == count_symbol(w, "1")),
    "gt": LanguagePredicate("gt", BINARY, lambda w: count_symbol(w, "0") > count_symbol(w, "1")),
    "dup": LanguagePredicate("dup", BINARY, _is_dup),
    "equal6": LanguagePredicate("equal6", EQUAL6, _is_equal6),
    "l3eq": LanguagePredicate("l3eq", ABC, _is_l3eq),
    "pal-hash": LanguagePredicate("pal-hash", PAL_HASH, _is_pal_hash),
}


def fixture_predicate(name: str) -> LanguagePredicate:
    try:
        return PREDICATES[name]
    except KeyError:
        raise UnknownFixture(f"unknown language {name!r}; known: {', '.join(PREDICATES)}") from None


# --- sample sets --------------------------------------------------------------

def _bits(text: str) -> Str:
    return tuple(text)


def equal_samples(n: int) -> SampleSet:
    """``w_k = 0^k 1^(n/2-k) 0^(n/2-k) 1^k`` for ``k = 0 .. n/2``."""
    if n < 2 or n % 2:
        raise InvalidLength("equal_samples needs an even n >= 2")
    h = n // 2
    return SampleSet.of(BINARY, (equal_member(n, k) for k in range(h + 1)), n)


def equal_member(n: int, k: int) -> Str:
    h = n // 2
    return _bits("0" * k + "1" * (h - k) + "0" * (h - k) + "1" * k)


def gt_member(m: int, j: int) -> Str:
    """``m`` blocks of length ``m``: block ``j`` is ``0 1^(m-1)``, the rest ``0^(m'+1) 1^m'``."""
    half = m // 2
    blocks = ["0" + "1" * (m - 1) if b == j else "0" * (half + 1) + "1" * half for b in range(1, m + 1)]
    return _bits("".join(blocks))


def gt_samples(m: int) -> SampleSet:
    if m < 3 or m % 2 == 0:
        raise InvalidParameter("gt_samples needs an odd m >= 3")
    return SampleSet.of(BINARY, (gt_member(m, j) for j in range(1, m + 1)), m * m)


def equal6_member(n: int, exponents: tuple) -> Str:
    block = n // 12

    def half(es):
        out: list = []
        for i, e in enumerate(es, 1):
            out += [f"a{i}"] * e + ["#"] * (block - e)
        return out

    return tuple(half(exponents) + half(tuple(block - e for e in exponents)))


def equal6_samples(n: int) -> SampleSet:
    if n < 12 or n % 12:
        raise InvalidLength("equal6_samples needs n divisible by 12")
    block = n // 12
    members = (equal6_member(n, es) for es in product(range(block + 1), repeat=6))
    return SampleSet.of(EQUAL6, members, n)


def pal_samples(n: int) -> SampleSet:
    if n < 0 or n % 2:
        raise InvalidLength("pal_samples needs an even n")
    half = n // 2
    return SampleSet.of(BINARY, (w + tuple(reversed(w)) for w in BINARY.words(half)), n)


def pal_hash_samples(n: int) -> SampleSet:
    if n < 1 or n % 2 == 0:
        raise InvalidLength("pal_hash_samples needs an odd n")
    half = n // 2
    return SampleSet.of(PAL_HASH, (w + ("#",) + tuple(reversed(w)) for w in BINARY.words(half)), n)


def dup_samples(n: int) -> SampleSet:
    if n < 0 or n % 2:
        raise InvalidLength("dup_samples needs an even n")
    return SampleSet.of(BINARY, (w + w for w in BINARY.words(n // 2)), n)


def language_samples(name: str, n: int) -> SampleSet:
    """Every member of a fixture language with length exactly ``n``."""
    pred = fixture_predicate(name)
    members = [w for w in pred.alphabet.words(n) if pred(w)]
    if not members:
        raise InvalidLength(f"{name} has no member of length {n}")
    return SampleSet.of(pred.alphabet, members, n)


SAMPLE_BUILDERS = {
    "equal": equal_samples,
    "gt": gt_samples,
    "equal6": equal6_samples,
    "pal": pal_samples,
    "pal-hash": pal_hash_samples,
    "dup": dup_samples,
}


def fixture_samples(name: str, n: int) -> SampleSet:
    try:
        builder = SAMPLE_BUILDERS[name]
    except KeyError:
        raise UnknownFixture(f"unknown sample fixture {name!r}; known: {', '.join(SAMPLE_BUILDERS)}") from None
    return builder(n)


# --- Dup parameter arithmetic -------------------------------------------------

class DupParams(NamedTuple):
    n: int
    j0: int
    k: int


def _ceil_log2(value: int) -> int:
    return (value - 1).bit_length()


def dup_params_for(m: int, n: int) -> DupParams:
    return DupParams(n, _ceil_log2(m * n * n) + 1, n // 2)


def dup_params(m: int) -> DupParams:
    """Least even ``n`` with ``2^(n/2) > 2 m n^2``, with ``j0 = ceil(log2(m n^2)) + 1`` and ``k = n/2``."""
    if m < 1:
        raise InvalidParameter("the swapping constant m must be positive")
    n = 2
    while 2 ** (n // 2) <= 2 * m * n * n:
        n += 2
    return dup_params_for(m, n)


def dup_params_lemma_ready(m: int) -> DupParams:
    """Least even ``n`` that additionally satisfies ``2 j0 <= k``."""
    p = dup_params(m)
    while 2 * p.j0 > p.k:
        p = dup_params_for(m, p.n + 2)
    return p


def dup_thresholds(m: int, params: DupParams) -> dict:
    """The two cardinality ceilings on ``|S_{i,u}|`` for the Dup sample set, as exact fractions."""
    n, j0, k = params
    size = 2 ** (n // 2)
    return {
        "S": size,
        "S_iu": 2 ** (n // 2 - j0),
        "over_kmn": Fraction(size, k * m * n),
        "over_m_widths": Fraction(size, m * (k - j0 + 1) * (n - j0 + 1)),
    }


# --- fixture grammars and machines -------------------------------------------

GRAMMARS = {
    "anbn": "S -> a S b | a b",
    "left-rec": "S -> S a | a",
    "pal-hash": "S -> 0 S 0 | 1 S 1 | #",
    "anb2n": "S -> a S b b | a b b",
    "pal": "S -> 0 S 0 | 1 S 1 | 0 0 | 1 1",
    "equal": "S -> 0 S 1 | 1 S 0 | S S | 0 1 | 1 0",
    "ambiguous": "S -> a S | a S S | a",
}


def fixture_grammar(name: str) -> Cfg:
    try:
        return grammar_from_text(GRAMMARS[name])
    except KeyError:
        raise UnknownFixture(f"unknown grammar {name!r}; known: {', '.join(GRAMMARS)}") from None


def fixture_machine(name: str, bounded: bool = True) -> Npda:
    m = cfg_to_npda(to_greibach(fixture_grammar(name)), name=name)
    return bound_stack_growth(m) if bounded else m


# --- advised finite automata --------------------------------------------------

def l3eq_advised_dfa() -> Dfa:
    """Product DFA over pair symbols: advice starts with ``a`` (or is empty) and both tracks agree."""
    pairs = track_alphabet(ABC, ADVICE["l3eq"].alphabet)
    lead = {}
    for p in pairs:
        lead[("start", p)] = "ok" if p[1] == "a" else "dead"
        lead[("ok", p)] = "ok"
        lead[("dead", p)] = "dead"
    starts_with_a = Dfa(("start", "ok", "dead"), pairs, lead, "start", {"start", "ok"})
    agree = {}
    for p in pairs:
        agree[("eq", p)] = "eq" if p[0] == p[1] else "dead"
        agree[("dead", p)] = "dead"
    tracks_agree = Dfa(("eq", "dead"), pairs, agree, "eq", {"eq"})
    return dfa_product(starts_with_a, tracks_agree)


def balance_mod_dfa(modulus: int, lower: Alphabet) -> Dfa:
    """Track DFA accepting when ``#0 - #1`` of the upper track is divisible by ``modulus``.

    It accepts every tracked member of Equal, and with ``modulus`` states it is
    too small to reject everything else.
    """
    pairs = track_alphabet(BINARY, lower)
    delta = {}
    for q in range(modulus):
        for p in pairs:
            delta[(q, p)] = (q + (1 if p[0] == "0" else -1)) % modulus
    return Dfa(tuple(range(modulus)), pairs, delta, 0, {0})


def equal_exact_track_dfa(n: int, lower: Str) -> Dfa:
    """Track DFA accepting exactly ``compose_track(w, lower)`` for ``w`` in Equal of length ``n``."""
    if len(lower) != n:
        raise LengthMismatch("advice string must have length n")
    lower_alpha = Alphabet(tuple(dict.fromkeys(lower)) or ("0",))
    pairs = track_alphabet(BINARY, lower_alpha)
    dead = "dead"
    states = [dead]
    delta = {}
    for pos in range(n + 1):
        for bal in range(-pos, pos + 1):
            states.append((pos, bal))
    for q in states:
        for p in pairs:
            if q == dead or q[0] == n or p[1] != lower[q[0]]:
                delta[(q, p)] = dead
            else:
                delta[(q, p)] = (q[0] + 1, q[1] + (1 if p[0] == "0" else -1))
    return Dfa(tuple(states), pairs, delta, (0, 0), {(n, 0)})
