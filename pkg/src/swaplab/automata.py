"""DFA and NPDA models, runs, accepting-path search and the machine file format."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Union

from swaplab.core import (
    Alphabet,
    Counter,
    Str,
    budget,
    format_string,
    format_symbol,
    parse_string,
    parse_symbol,
)
from swaplab.errors import FormatError, InvalidParameter, UnknownSymbol

CENT = "CENT"
DOLLAR = "DOLLAR"
ENDMARKERS = (CENT, DOLLAR)

DEFAULT_PATH_LIMIT = 10_000
DEFAULT_LANGUAGE_BUDGET = 1_000_000


@dataclass(frozen=True)
class Dfa:
    states: tuple
    alphabet: Alphabet
    transition: dict
    start: object
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if len(set(self.states)) != len(self.states):
            raise InvalidParameter("duplicate DFA state")
        if self.start not in self.states:
            raise InvalidParameter(f"start state {self.start!r} not in Q")
        if not self.finals <= set(self.states):
            raise InvalidParameter("final states must be a subset of Q")
        for q in self.states:
            for a in self.alphabet:
                target = self.transition.get((q, a))
                if target is None:
                    raise InvalidParameter(f"transition missing for ({q!r}, {a!r})")
                if target not in self.states:
                    raise InvalidParameter(f"transition ({q!r}, {a!r}) leaves Q")

    def __hash__(self):
        return hash((self.states, self.alphabet, self.start, self.finals))

    def step(self, q, a):
        try:
            return self.transition[(q, a)]
        except KeyError:
            raise UnknownSymbol(f"symbol {a!r} not in DFA alphabet") from None

    def accepts(self, w: Str) -> bool:
        return dfa_run(self, w).accepted


class DfaRun(NamedTuple):
    accepted: bool
    trace: tuple


def dfa_run(d: Dfa, w: Str) -> DfaRun:
    """Run ``d`` on ``w``; ``trace[i]`` is the state after reading the first ``i`` symbols."""
    q = d.start
    trace = [q]
    for a in w:
        q = d.step(q, a)
        trace.append(q)
    return DfaRun(q in d.finals, tuple(trace))


def dfa_product(d1: Dfa, d2: Dfa, mode: str = "and") -> Dfa:
    """Product automaton over a shared alphabet, accepting by intersection or union."""
    if d1.alphabet != d2.alphabet:
        raise InvalidParameter("product needs identical alphabets")
    start = (d1.start, d2.start)
    states, todo, delta = [start], [start], {}
    seen = {start}
    while todo:
        p, q = todo.pop(0)
        for a in d1.alphabet:
            t = (d1.step(p, a), d2.step(q, a))
            delta[((p, q), a)] = t
            if t not in seen:
                seen.add(t)
                states.append(t)
                todo.append(t)
    if mode == "and":
        finals = {s for s in states if s[0] in d1.finals and s[1] in d2.finals}
    elif mode == "or":
        finals = {s for s in states if s[0] in d1.finals or s[1] in d2.finals}
    else:
        raise InvalidParameter(f"unknown product mode {mode!r}")
    return Dfa(tuple(states), d1.alphabet, delta, start, frozenset(finals))


# --- pushdown automata --------------------------------------------------------

@dataclass(frozen=True, order=True)
class Transition:
    """One move: in ``state`` reading ``symbol`` with ``top`` on the stack, go to ``target`` pushing ``push``."""

    state: object
    symbol: object
    top: object
    target: object
    push: tuple

    def serialize(self) -> str:
        push = " ".join(format_symbol(s) for s in self.push) if self.push else "-"
        return (f"{format_symbol(self.state)} {format_symbol(self.symbol)} {format_symbol(self.top)}"
                f" -> {format_symbol(self.target)} push:{push}")


@dataclass(frozen=True)
class Configuration:
    boundary: int
    state: object
    stack: tuple

    @property
    def height(self) -> int:
        return len(self.stack)


@dataclass(frozen=True)
class AcceptingPath:
    """Configurations at boundaries -1 .. n+1 and the moves connecting them."""

    input: Str
    configurations: tuple
    transitions: tuple

    @property
    def steps(self) -> tuple:
        return tuple(zip(self.configurations[:-1], self.transitions))

    @property
    def stacks(self) -> tuple:
        return tuple(c.stack for c in self.configurations)

    def stack_at(self, b: int) -> tuple:
        return self.configurations[b + 1].stack


@dataclass(frozen=True)
class Npda:
    """Nondeterministic pushdown acceptor reading ``CENT x DOLLAR``; every move consumes one cell.

    ``transitions`` maps ``(state, symbol, top)`` to the tuple of possible
    :class:`Transition` values, kept in serialized order. The ``gnf_normal``
    and ``bounded`` flags are derived from the transition table.
    """

    states: tuple
    input_alphabet: Alphabet
    stack_alphabet: tuple
    transitions: dict
    start: object
    stack_start: object
    finals: frozenset
    name: str = ""
    gnf_normal: bool = field(init=False)
    bounded: bool = field(init=False)
    working_state: object = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "stack_alphabet", tuple(self.stack_alphabet))
        object.__setattr__(self, "finals", frozenset(self.finals))
        for e in ENDMARKERS:
            if e in self.input_alphabet:
                raise InvalidParameter(f"endmarker {e} may not be an input symbol")
        if self.start not in self.states or not self.finals <= set(self.states):
            raise InvalidParameter("start and final states must lie in Q")
        if self.stack_start not in self.stack_alphabet:
            raise InvalidParameter("stack start symbol must lie in the stack alphabet")
        gamma = set(self.stack_alphabet)
        table = {}
        for key, moves in self.transitions.items():
            q, a, top = key
            if a not in self.input_alphabet and a not in ENDMARKERS:
                raise InvalidParameter(f"move on {a!r}: only input symbols and endmarkers are read"
                                       " (no lambda-moves)")
            if q not in self.states or top not in gamma:
                raise InvalidParameter(f"bad transition key {key!r}")
            normalized = []
            for t in moves:
                if not isinstance(t, Transition):
                    target, push = t
                    t = Transition(q, a, top, target, tuple(push))
                if (t.state, t.symbol, t.top) != key:
                    raise InvalidParameter(f"transition {t.serialize()} filed under {key!r}")
                if t.target not in self.states or not set(t.push) <= gamma:
                    raise InvalidParameter(f"transition {t.serialize()} leaves Q or Gamma")
                normalized.append(t)
            if normalized:
                table[key] = tuple(sorted(set(normalized), key=Transition.serialize))
        object.__setattr__(self, "transitions", table)
        working = self._gnf_working_state()
        object.__setattr__(self, "gnf_normal", working is not None)
        object.__setattr__(self, "working_state", working)
        object.__setattr__(self, "bounded", working is not None and all(
            len(t.push) <= 2 for t in self.all_transitions() if t.symbol not in ENDMARKERS))

    def __hash__(self):
        return hash((self.states, self.input_alphabet, self.stack_alphabet, self.start,
                     self.stack_start, self.finals))

    def all_transitions(self) -> list[Transition]:
        moves = [t for ts in self.transitions.values() for t in ts]
        return sorted(moves, key=Transition.serialize)

    def moves(self, state, symbol, top) -> tuple:
        return self.transitions.get((state, symbol, top), ())

    def _gnf_working_state(self):
        z = self.stack_start
        moves = self.all_transitions()
        cent = [t for t in moves if t.symbol == CENT]
        if len(cent) != 1:
            return None
        (init,) = cent
        if (init.state != self.start or init.top != z or len(init.push) != 2
                or init.push[1] != z or init.push[0] == z or init.target == self.start):
            return None
        q1 = init.target
        for t in moves:
            if t.symbol == DOLLAR:
                if not (t.state == q1 and t.top == z and t.push == (z,) and t.target in self.finals):
                    return None
            elif t.symbol != CENT:
                if t.state != q1 or t.target != q1 or t.top == z or z in t.push:
                    return None
        if self.start in self.finals or q1 in self.finals:
            return None
        return q1


NpdaOrDfa = Union[Dfa, Npda]


def _search(m: Npda, x: Str) -> Iterator[tuple]:
    """Depth-first search over computations on ``CENT x DOLLAR``, yielding transition sequences.

    Failed configurations ``(boundary, state, stack)`` are memoized. For
    gnf_normal machines a configuration is entered only if its stack above
    the bottom can still consume exactly the unread cells, decided by a
    memoized table over (symbol, span); dead branches are never explored.
    """
    x = m.input_alphabet.check(x)
    tape = (CENT,) + x + (DOLLAR,)
    n = len(x)
    dead: set = set()
    gnf = m.gnf_normal
    q1 = m.working_state

    @lru_cache(maxsize=None)
    def consumes(v, i, j):
        # v can be popped by reading exactly x[i:j]
        return i < j and any(fits(t.push, i + 1, j) for t in m.moves(q1, x[i], v))

    @lru_cache(maxsize=None)
    def fits(word, i, j):
        if not word:
            return i == j
        return any(consumes(word[0], i, k) and fits(word[1:], k, j) for k in range(i + 1, j - len(word) + 2))

    def dfs(b, state, stack):
        if b == n + 1:
            if state in m.finals:
                yield ()
            return
        key = (b, state, stack)
        if key in dead or not stack:
            return
        if gnf and 0 <= b <= n and not fits(stack[:-1], b, n):
            dead.add(key)
            return
        found = False
        for t in m.moves(state, tape[b + 1], stack[0]):
            for rest in dfs(b + 1, t.target, t.push + stack[1:]):
                found = True
                yield (t,) + rest
        if not found:
            dead.add(key)

    yield from dfs(-1, m.start, (m.stack_start,))


def _as_path(m: Npda, x: Str, moves: tuple) -> AcceptingPath:
    b, state, stack = -1, m.start, (m.stack_start,)
    configs = [Configuration(b, state, stack)]
    for t in moves:
        b, state, stack = b + 1, t.target, t.push + stack[1:]
        configs.append(Configuration(b, state, stack))
    return AcceptingPath(tuple(x), tuple(configs), tuple(moves))


def is_accepting_path(m: Npda, p: AcceptingPath) -> bool:
    """Replay ``p`` against the transition table of ``m``."""
    tape = (CENT,) + tuple(p.input) + (DOLLAR,)
    if len(p.configurations) != len(tape) + 1 or len(p.transitions) != len(tape):
        return False
    first = p.configurations[0]
    if (first.boundary, first.state, first.stack) != (-1, m.start, (m.stack_start,)):
        return False
    for b, (c, t) in enumerate(zip(p.configurations, p.transitions)):
        nxt = p.configurations[b + 1]
        if not c.stack or t not in m.moves(c.state, tape[b], c.stack[0]):
            return False
        if (nxt.boundary, nxt.state, nxt.stack) != (c.boundary + 1, t.target, t.push + c.stack[1:]):
            return False
    return p.configurations[-1].state in m.finals


def npda_accepts(m: Npda, x: Str) -> AcceptingPath | None:
    """First accepting path in serialized transition order, or ``None``."""
    for moves in _search(m, x):
        return _as_path(m, x, moves)
    return None


def enumerate_accepting_paths(m: Npda, x: Str, limit: int = DEFAULT_PATH_LIMIT) -> list[AcceptingPath]:
    if limit < 1:
        raise InvalidParameter("path limit must be at least 1")
    paths = []
    for moves in _search(m, x):
        paths.append(_as_path(m, x, moves))
        if len(paths) >= limit:
            break
    return paths


def accepts(acceptor: NpdaOrDfa, w: Str) -> bool:
    if isinstance(acceptor, Dfa):
        return acceptor.accepts(w)
    return npda_accepts(acceptor, w) is not None


def language_upto(acceptor: NpdaOrDfa, max_len: int = 12, node_budget: int | None = None) -> set:
    """Every accepted string of length at most ``max_len``, by exhaustive enumeration."""
    if max_len < 0:
        raise InvalidParameter("max_len must be nonnegative")
    alphabet = acceptor.alphabet if isinstance(acceptor, Dfa) else acceptor.input_alphabet
    counter = Counter(node_budget or budget(DEFAULT_LANGUAGE_BUDGET), "strings")
    found = set()
    for length in range(max_len + 1):
        for w in alphabet.words(length):
            counter.tick()
            if accepts(acceptor, w):
                found.add(w)
    return found


# --- machine file format ------------------------------------------------------

def format_machine(m: NpdaOrDfa) -> str:
    fs = format_string
    if isinstance(m, Dfa):
        lines = [
            "type: dfa",
            "states: " + fs(m.states),
            "alphabet: " + fs(m.alphabet.symbols),
            "start: " + format_symbol(m.start),
            "finals: " + " ".join(format_symbol(q) for q in m.states if q in m.finals),
        ]
        for q in m.states:
            for a in m.alphabet:
                lines.append(f"{format_symbol(q)} {format_symbol(a)} -> {format_symbol(m.transition[(q, a)])}")
        return "\n".join(lines) + "\n"
    lines = [
        "type: npda",
        "states: " + fs(m.states),
        "alphabet: " + fs(m.input_alphabet.symbols),
        "stack_alphabet: " + fs(m.stack_alphabet),
        "start: " + format_symbol(m.start),
        "stack_start: " + format_symbol(m.stack_start),
        "finals: " + " ".join(format_symbol(q) for q in m.states if q in m.finals),
    ]
    lines += [t.serialize() for t in m.all_transitions()]
    return "\n".join(lines) + "\n"


def _tokens(value: str) -> tuple:
    return tuple(parse_symbol(t) for t in value.split())


def parse_machine(text: str, name: str = "") -> NpdaOrDfa:
    header: dict[str, str] = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if "->" in line:
            rules.append((lineno, line))
        elif ":" in line:
            key, value = line.split(":", 1)
            header[key.strip()] = value.strip()
        else:
            raise FormatError(f"line {lineno}: expected 'key: value' or a transition")
    kind = header.get("type")
    try:
        states = _tokens(header["states"])
        alphabet = Alphabet(parse_string(header["alphabet"]))
        start = parse_symbol(header["start"])
        finals = frozenset(_tokens(header.get("finals", "")))
    except KeyError as exc:
        raise FormatError(f"missing header field {exc.args[0]!r}") from None
    except InvalidParameter as exc:
        raise FormatError(str(exc)) from None
    try:
        if kind == "dfa":
            delta = {}
            for lineno, line in rules:
                left, right = (part.split() for part in line.split("->", 1))
                if len(left) != 2 or len(right) != 1:
                    raise FormatError(f"line {lineno}: DFA rules read 'q a -> q2'")
                delta[(parse_symbol(left[0]), parse_symbol(left[1]))] = parse_symbol(right[0])
            return Dfa(states, alphabet, delta, start, finals)
        if kind == "npda":
            try:
                gamma = _tokens(header["stack_alphabet"])
                z = parse_symbol(header["stack_start"])
            except KeyError as exc:
                raise FormatError(f"missing header field {exc.args[0]!r}") from None
            table: dict = {}
            for lineno, line in rules:
                left, right = line.split("->", 1)
                left_toks, right_toks = left.split(), right.split()
                if len(left_toks) != 3 or len(right_toks) < 2 or not right_toks[1].startswith("push:"):
                    raise FormatError(f"line {lineno}: NPDA rules read 'q a v -> q2 push:w1 w2'")
                push_toks = [right_toks[1][len("push:"):]] + right_toks[2:]
                push_toks = [t for t in push_toks if t]
                push = () if push_toks == ["-"] else tuple(parse_symbol(t) for t in push_toks)
                q, a, v = (parse_symbol(t) for t in left_toks)
                t = Transition(q, a, v, parse_symbol(right_toks[0]), push)
                table.setdefault((q, a, v), []).append(t)
            return Npda(states, alphabet, gamma, table, start, z, finals, name=name)
    except InvalidParameter as exc:
        raise FormatError(str(exc)) from None
    raise FormatError(f"unknown machine type {kind!r}; expected dfa or npda")
