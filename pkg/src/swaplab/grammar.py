"""Context-free grammars, the Greibach normal form pipeline and grammar-to-NPDA compilation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import product

from swaplab.automata import CENT, DOLLAR, Npda, Transition
from swaplab.core import Alphabet, Counter, budget, format_symbol, parse_symbol
from swaplab.errors import (
    EmptyLanguage,
    EmptyStringInLanguage,
    FormatError,
    InvalidParameter,
    NotGnf,
    NotGnfNormal,
)

EPS = "EPS"
DEFAULT_DERIVATION_BUDGET = 2_000_000


@dataclass(frozen=True)
class Cfg:
    """Grammar ``(V, T, S, P)``; ``productions`` is an ordered tuple of ``(head, body)`` pairs."""

    variables: tuple
    terminals: Alphabet
    start: object
    productions: tuple

    def __post_init__(self):
        variables = tuple(self.variables)
        prods = tuple(dict.fromkeys((h, tuple(b)) for h, b in self.productions))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "productions", prods)
        vs = set(variables)
        if len(vs) != len(variables):
            raise InvalidParameter("duplicate variable")
        if vs & set(self.terminals):
            raise InvalidParameter("variables and terminals must be disjoint")
        if self.start not in vs:
            raise InvalidParameter(f"start symbol {self.start!r} is not a variable")
        for head, body in prods:
            if head not in vs:
                raise InvalidParameter(f"production head {head!r} is not a variable")
            for s in body:
                if s not in vs and s not in self.terminals:
                    raise InvalidParameter(f"body symbol {s!r} is neither variable nor terminal")

    def bodies(self, head) -> list[tuple]:
        return [b for h, b in self.productions if h == head]

    def is_variable(self, s) -> bool:
        return s in self.variables

    def is_gnf(self) -> bool:
        return all(
            body and body[0] in self.terminals and all(s in self.variables for s in body[1:])
            for _, body in self.productions
        )


class GnfGrammar(Cfg):
    """A :class:`Cfg` whose every production reads ``A -> a B1 ... Bk``."""

    def __post_init__(self):
        super().__post_init__()
        for head, body in self.productions:
            if not body or body[0] not in self.terminals or any(s not in self.variables for s in body[1:]):
                raise NotGnf(f"production {format_symbol(head)} -> {' '.join(map(format_symbol, body)) or EPS}"
                             " is not terminal-first")

    @classmethod
    def from_cfg(cls, g: Cfg) -> "GnfGrammar":
        return cls(g.variables, g.terminals, g.start, g.productions)


# --- bounded language enumeration ---------------------------------------------

def min_yields(g: Cfg) -> dict:
    """Length of the shortest terminal string each variable derives (``inf`` if none)."""
    best = {v: math.inf for v in g.variables}
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            total = sum(1 if s in g.terminals else best[s] for s in body)
            if total < best[head]:
                best[head] = total
                changed = True
    return best


def generate_upto(g: Cfg, max_len: int, node_budget: int | None = None) -> set:
    """``L(g)`` restricted to strings of length at most ``max_len``.

    Breadth-first over leftmost derivations; a sentential form is dropped once
    the shortest terminal string it can still yield is longer than ``max_len``.
    """
    if max_len < 0:
        raise InvalidParameter("max_len must be nonnegative")
    shortest = min_yields(g)

    def bound(form):
        return sum(1 if s in g.terminals else shortest[s] for s in form)

    counter = Counter(node_budget or budget(DEFAULT_DERIVATION_BUDGET), "sentential forms")
    start = (g.start,)
    if bound(start) > max_len:
        return set()
    rules = {v: g.bodies(v) for v in g.variables}
    seen = {start}
    queue = deque([start])
    found = set()
    while queue:
        form = queue.popleft()
        counter.tick()
        pos = next((i for i, s in enumerate(form) if s not in g.terminals), None)
        if pos is None:
            found.add(form)
            continue
        for body in rules[form[pos]]:
            nxt = form[:pos] + body + form[pos + 1:]
            if nxt not in seen and bound(nxt) <= max_len:
                seen.add(nxt)
                queue.append(nxt)
    return found


# --- normal form pipeline -----------------------------------------------------

def _fresh(base: str, used: set) -> str:
    name, k = base, 0
    while name in used:
        k += 1
        name = f"{base}{k}"
    used.add(name)
    return name


def _generating(terminals, prods) -> set:
    gen: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in prods:
            if head not in gen and all(s in terminals or s in gen for s in body):
                gen.add(head)
                changed = True
    return gen


def _nullable(prods) -> set:
    null: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in prods:
            if head not in null and all(s in null for s in body):
                null.add(head)
                changed = True
    return null


def remove_useless(g: Cfg) -> Cfg:
    """Drop non-generating, then unreachable, variables."""
    gen = _generating(g.terminals, g.productions)
    if g.start not in gen:
        raise EmptyLanguage("the grammar generates no string")
    prods = [(h, b) for h, b in g.productions if h in gen and all(s in g.terminals or s in gen for s in b)]
    reach = {g.start}
    todo = [g.start]
    while todo:
        v = todo.pop()
        for h, b in prods:
            if h == v:
                for s in b:
                    if s not in g.terminals and s not in reach:
                        reach.add(s)
                        todo.append(s)
    prods = [(h, b) for h, b in prods if h in reach]
    variables = tuple(v for v in g.variables if v in reach)
    return Cfg(variables, g.terminals, g.start, tuple(prods))


def eliminate_epsilon(g: Cfg) -> Cfg:
    null = _nullable(g.productions)
    prods = []
    for head, body in g.productions:
        options = [((s,), ()) if s in null else ((s,),) for s in body]
        for choice in product(*options):
            new = tuple(s for part in choice for s in part)
            if new:
                prods.append((head, new))
    return Cfg(g.variables, g.terminals, g.start, tuple(prods))


def eliminate_units(g: Cfg) -> Cfg:
    def is_unit(body):
        return len(body) == 1 and body[0] in g.variables

    prods = []
    for a in g.variables:
        closure, todo = [a], [a]
        while todo:
            v = todo.pop(0)
            for body in g.bodies(v):
                if is_unit(body) and body[0] not in closure:
                    closure.append(body[0])
                    todo.append(body[0])
        for v in closure:
            prods += [(a, body) for body in g.bodies(v) if not is_unit(body)]
    return Cfg(g.variables, g.terminals, g.start, tuple(prods))


def to_greibach(g: Cfg) -> GnfGrammar:
    """Equivalent grammar in Greibach normal form.

    Steps: useless symbols, lambda-productions, unit productions, then terminal
    lifting, forward substitution with left-recursion removal in the fixed
    variable order, and back substitution.
    """
    g = remove_useless(g)
    if g.start in _nullable(g.productions):
        raise EmptyStringInLanguage("the empty string is in the language; GNF cannot express it")
    g = remove_useless(eliminate_units(eliminate_epsilon(g)))
    used = {v for v in g.variables if isinstance(v, str)} | {s for s in g.terminals if isinstance(s, str)}
    order = list(g.variables)
    rules: dict = {v: [] for v in order}
    lifted: dict = {}

    def lift(a):
        if a not in lifted:
            lifted[a] = _fresh(f"T_{format_symbol(a)}", used)
            order.append(lifted[a])
            rules[lifted[a]] = [(a,)]
        return lifted[a]

    for head, body in g.productions:
        body = body[:1] + tuple(lift(s) if s in g.terminals else s for s in body[1:])
        rules[head].append(body)

    def dedupe(bodies):
        return list(dict.fromkeys(bodies))

    tails: list = []
    for idx, ai in enumerate(order):
        for aj in order[:idx]:
            expanded = []
            for body in rules[ai]:
                if body[0] == aj:
                    expanded += [d + body[1:] for d in rules[aj]]
                else:
                    expanded.append(body)
            rules[ai] = dedupe(expanded)
        recursive = [b[1:] for b in rules[ai] if b[0] == ai]
        if recursive:
            rest = [b for b in rules[ai] if b[0] != ai]
            tail = _fresh(f"{format_symbol(ai)}_R", used)
            rules[ai] = dedupe(rest + [b + (tail,) for b in rest])
            rules[tail] = dedupe(recursive + [a + (tail,) for a in recursive])
            tails.append(tail)

    def substitute(var):
        expanded = []
        for body in rules[var]:
            if body[0] in g.terminals:
                expanded.append(body)
            else:
                expanded += [d + body[1:] for d in rules[body[0]]]
        rules[var] = dedupe(expanded)

    for ai in reversed(order):
        substitute(ai)
    for tail in tails:
        substitute(tail)

    variables = tuple(order + tails)
    prods = tuple((v, b) for v in variables for b in rules[v])
    cleaned = remove_useless(Cfg(variables, g.terminals, g.start, prods))
    return GnfGrammar.from_cfg(cleaned)


# --- compilation to a pushdown acceptor ----------------------------------------

def cfg_to_npda(g: Cfg, name: str = "") -> Npda:
    """Three-state acceptor simulating leftmost derivations of a GNF grammar."""
    if not isinstance(g, GnfGrammar):
        if not g.is_gnf():
            raise NotGnf("cfg_to_npda needs a grammar in Greibach normal form")
        g = GnfGrammar.from_cfg(g)
    names = set(g.variables)
    z = "z"
    while z in names:
        z += "'"
    q0, q1, qf = "q0", "q1", "qf"
    table: dict = {(q0, CENT, z): [Transition(q0, CENT, z, q1, (g.start, z))]}
    for head, body in g.productions:
        a, rest = body[0], body[1:]
        table.setdefault((q1, a, head), []).append(Transition(q1, a, head, q1, rest))
    table[(q1, DOLLAR, z)] = [Transition(q1, DOLLAR, z, qf, (z,))]
    return Npda((q0, q1, qf), g.terminals, g.variables + (z,), table, q0, z, {qf}, name=name)


def _pack(symbols: tuple, size: int) -> tuple:
    if not symbols:
        return ()
    if len(symbols) <= size:
        return (symbols,)
    cut = len(symbols) - size
    return (symbols[:cut], symbols[cut:])


DEFAULT_GROUP_BUDGET = 200_000


def bound_stack_growth(m: Npda, group_budget: int | None = None) -> Npda:
    """Regroup stack symbols so that no move pushes more than two symbols.

    New stack symbols are tuples of up to ``g`` original symbols, ``g`` being
    the longest push of ``m``; the bottom symbol ``z`` becomes ``(z)`` and is
    never merged. A move pushing ``w1 w2 w3`` over the group ``(v1 v2 v3)``
    becomes a push of ``(w1 w2)(w3 v2 v3)``. The number of reachable groups
    can grow exponentially in ``g``; ``group_budget`` caps the work.
    """
    if not m.gnf_normal:
        raise NotGnfNormal("bound_stack_growth needs a gnf_normal machine")
    if m.bounded:
        return m
    q1, z = m.working_state, m.stack_start
    size = max(len(t.push) for t in m.all_transitions() if t.symbol not in (CENT, DOLLAR))
    (init,) = [t for t in m.all_transitions() if t.symbol == CENT]
    zg = (z,)
    first = (init.push[0],)
    table: dict = {(m.start, CENT, zg): [Transition(m.start, CENT, zg, q1, (first, zg))]}
    groups = [first]
    seen = {first}
    todo = deque([first])
    counter = Counter(group_budget or budget(DEFAULT_GROUP_BUDGET), "stack-group moves")
    while todo:
        group = todo.popleft()
        for a in m.input_alphabet:
            for t in m.moves(q1, a, group[0]):
                counter.tick()
                push = _pack(t.push + group[1:], size)
                table.setdefault((q1, a, group), []).append(Transition(q1, a, group, q1, push))
                for new in push:
                    if new not in seen:
                        seen.add(new)
                        groups.append(new)
                        todo.append(new)
    for t in m.all_transitions():
        if t.symbol == DOLLAR:
            table.setdefault((q1, DOLLAR, zg), []).append(Transition(q1, DOLLAR, zg, t.target, (zg,)))
    return Npda(m.states, m.input_alphabet, tuple(groups) + (zg,), table, m.start, zg, m.finals,
                name=m.name)


# --- grammar file format ------------------------------------------------------

def parse_grammar(text: str) -> Cfg:
    start = None
    declared_terminals = None
    rules: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if "->" in line:
            head, rhs = line.split("->", 1)
            head_toks = head.split()
            if len(head_toks) != 1:
                raise FormatError(f"line {lineno}: a production has exactly one head symbol")
            for alt in rhs.split("|"):
                toks = alt.split()
                if not toks:
                    raise FormatError(f"line {lineno}: empty alternative; write {EPS} for the empty body")
                body = () if toks == [EPS] else tuple(parse_symbol(t) for t in toks)
                if EPS in body:
                    raise FormatError(f"line {lineno}: {EPS} must stand alone")
                rules.append((parse_symbol(head_toks[0]), body))
        elif line.startswith("start:"):
            start = parse_symbol(line.split(":", 1)[1].strip())
        elif line.startswith("terminals:"):
            declared_terminals = tuple(parse_symbol(t) for t in line.split(":", 1)[1].split())
        else:
            raise FormatError(f"line {lineno}: expected 'start:', 'terminals:' or a production")
    if start is None:
        raise FormatError("grammar file needs a 'start:' line")
    if not rules:
        raise FormatError("grammar file lists no productions")
    variables = list(dict.fromkeys([start] + [h for h, _ in rules]))
    if declared_terminals is None:
        declared_terminals = tuple(dict.fromkeys(s for _, b in rules for s in b if s not in variables))
    try:
        return Cfg(tuple(variables), Alphabet(declared_terminals), start, tuple(rules))
    except InvalidParameter as exc:
        raise FormatError(str(exc)) from None


def format_grammar(g: Cfg) -> str:
    lines = [f"start: {format_symbol(g.start)}",
             "terminals: " + " ".join(format_symbol(a) for a in g.terminals)]
    for v in g.variables:
        bodies = g.bodies(v)
        if bodies:
            alts = [" ".join(format_symbol(s) for s in b) if b else EPS for b in bodies]
            lines.append(f"{format_symbol(v)} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


def grammar_from_text(text: str) -> Cfg:
    """Shorthand used by fixtures: ``'S -> a S b | a b'`` style lines, start is the first head."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split("->", 1)[0].strip()
    return parse_grammar(f"start: {head}\n" + "\n".join(lines))
