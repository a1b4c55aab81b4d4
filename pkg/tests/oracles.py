"""Independent reference implementations used to cross-check the library."""

from functools import lru_cache
from itertools import product


def cfg_members(g, max_len):
    """L(g) up to max_len by a least-fixpoint membership table over every candidate string."""
    terminals = tuple(g.terminals)
    out = set()
    for n in range(max_len + 1):
        for w in product(terminals, repeat=n):
            if derives(g, w):
                out.add(w)
    return out


def derives(g, w):
    n = len(w)
    known = set()  # (variable, i, j)
    terms = set(g.terminals)

    def matches(body, i, j):
        # can body derive w[i:j] using facts in `known`
        reach = {i}
        for s in body:
            nxt = set()
            for p in reach:
                if s in terms:
                    if p < j and w[p] == s:
                        nxt.add(p + 1)
                else:
                    nxt.update(q for q in range(p, j + 1) if (s, p, q) in known)
            reach = nxt
        return j in reach

    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            for i in range(n + 1):
                for j in range(i, n + 1):
                    if (head, i, j) not in known and matches(body, i, j):
                        known.add((head, i, j))
                        changed = True
    return (g.start, 0, n) in known


def gnf_derivation_count(g, w):
    """Number of leftmost derivations of w in a grammar whose bodies are terminal-first."""
    w = tuple(w)
    rules = {}
    for head, body in g.productions:
        rules.setdefault(head, []).append(body)

    @lru_cache(maxsize=None)
    def count(var, s):
        total = 0
        for body in rules.get(var, []):
            if s and body[0] == s[0]:
                total += ways(tuple(body[1:]), s[1:])
        return total

    @lru_cache(maxsize=None)
    def ways(seq, s):
        if not seq:
            return 1 if not s else 0
        return sum(count(seq[0], s[:t]) * ways(seq[1:], s[t:]) for t in range(1, len(s) - len(seq) + 2))

    return count(g.start, w)


def realizer_widths(heights, first, lo, hi, level):
    """All widths b - a over lo <= a < b <= hi with both ends at level and nothing lower between."""
    h = lambda b: heights[b - first]  # noqa: E731
    return [
        b - a
        for a in range(lo, hi + 1)
        for b in range(a + 1, hi + 1)
        if h(a) == h(b) == level and min(h(c) for c in range(a, b + 1)) >= level
    ]
