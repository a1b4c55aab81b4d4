"""Stack-transition analysis and swap witnesses for context-free languages.

Everything here works on gnf_normal acceptors (see :mod:`swaplab.grammar`):
the head moves one cell per step, so an accepting path fixes one stack
content per intercell boundary ``-1 .. n+1``. Heights of those contents form a
profile; equal-height stretches whose interior never dips lower are the
"ideal" intervals across which two inputs can trade their middles.
"""

from __future__ import annotations

import concurrent.futures
from collections import Counter as Multiset
from dataclasses import dataclass, field
from typing import NamedTuple

from swaplab.automata import AcceptingPath, Configuration, Npda, enumerate_accepting_paths, npda_accepts
from swaplab.core import Interval, SampleSet, Str, budget, middle, splice
from swaplab.errors import (
    InvalidInterval,
    InvalidRange,
    NoAssignment,
    NotInLanguage,
    PathBudgetExceeded,
    PathMismatch,
    PreconditionViolated,
    VerificationFailed,
)

DEFAULT_PATH_BUDGET = 10_000


# --- profiles and stack transitions -------------------------------------------

@dataclass(frozen=True)
class HeightProfile:
    """Heights at consecutive boundaries ``first, first+1, ...``."""

    heights: tuple
    first: int = -1

    @property
    def last(self) -> int:
        return self.first + len(self.heights) - 1

    @property
    def span(self) -> Interval:
        return Interval(self.first, self.last)

    def height(self, b: int) -> int:
        return self.heights[b - self.first]


@dataclass(frozen=True)
class StackTransition:
    input: Str
    path: AcceptingPath
    contents: tuple
    heights: tuple

    @property
    def n(self) -> int:
        return len(self.input)

    @property
    def profile(self) -> HeightProfile:
        return HeightProfile(self.heights, -1)

    def stack_at(self, b: int) -> tuple:
        return self.contents[b + 1]

    def height(self, b: int) -> int:
        return self.heights[b + 1]


def _check_path(x: Str, p: AcceptingPath) -> None:
    if tuple(p.input) != tuple(x):
        raise PathMismatch("the path was computed for a different input")
    if len(p.configurations) != len(x) + 3:
        raise PathMismatch(f"expected {len(x) + 3} configurations, got {len(p.configurations)}")
    for b, c in enumerate(p.configurations, -1):
        if c.boundary != b:
            raise PathMismatch(f"configuration {b + 1} sits at boundary {c.boundary}")


def stack_transition(m: Npda, x: Str, p: AcceptingPath) -> StackTransition:
    if not m.gnf_normal:
        raise PreconditionViolated("stack transitions are defined for gnf_normal machines")
    _check_path(x, p)
    contents = p.stacks
    return StackTransition(tuple(x), p, contents, tuple(len(s) for s in contents))


def _profile(t) -> HeightProfile:
    return t.profile if isinstance(t, StackTransition) else t


def _check_interval(prof: HeightProfile, I: Interval) -> None:
    if not prof.span.contains(I):
        raise InvalidInterval(f"[{I.lo}, {I.hi}] is not inside [{prof.first}, {prof.last}]")


# --- features -----------------------------------------------------------------

class Feature(NamedTuple):
    kind: str  # peak | flat_peak | base | flat_base
    start: int
    end: int
    height: int

    @property
    def location(self):
        return self.start if self.start == self.end else (self.start, self.end)


def _runs(prof: HeightProfile, I: Interval) -> list[tuple[int, int, int]]:
    runs = []
    b = I.lo
    while b <= I.hi:
        h = prof.height(b)
        e = b
        while e + 1 <= I.hi and prof.height(e + 1) == h:
            e += 1
        runs.append((b, e, h))
        b = e + 1
    return runs


def features(t, I: Interval) -> list[Feature]:
    """Peaks, flat peaks, bases and flat bases strictly inside ``I``, left to right.

    A constant run touching an endpoint of ``I`` is not a feature, since the
    neighbour on that side lies outside the interval.
    """
    prof = _profile(t)
    _check_interval(prof, I)
    found = []
    for start, end, h in _runs(prof, I):
        if start == I.lo or end == I.hi:
            continue
        left, right = prof.height(start - 1), prof.height(end + 1)
        flat = start != end
        if left < h and right < h:
            found.append(Feature("flat_peak" if flat else "peak", start, end, h))
        elif left > h and right > h:
            found.append(Feature("flat_base" if flat else "base", start, end, h))
    return found


# --- widths -------------------------------------------------------------------

def _widths(prof: HeightProfile, I: Interval, level: int) -> list[int]:
    """Widths of all ``[a, b]`` in ``I`` with height ``level`` at both ends and none lower inside.

    Pairs with ``a < b`` are counted. When none exists but the level is met
    at an isolated boundary (a sharp peak top), that boundary yields width 0.
    """
    widths: list[int] = []
    isolated = False
    hits: list[int] = []
    for b in range(I.lo, I.hi + 2):
        h = prof.height(b) if b <= I.hi else None
        if h is None or h < level:
            if len(hits) >= 2:
                widths.append(min(q - p for p, q in zip(hits, hits[1:])))
                widths.append(hits[-1] - hits[0])
            elif hits:
                isolated = True
            hits = []
        elif h == level:
            hits.append(b)
    if not widths and isolated:
        return [0]
    return widths


def minwid(t, I: Interval, level: int) -> int | None:
    prof = _profile(t)
    _check_interval(prof, I)
    widths = _widths(prof, I, level)
    return min(widths) if widths else None


def maxwid(t, I: Interval, level: int) -> int | None:
    prof = _profile(t)
    _check_interval(prof, I)
    widths = _widths(prof, I, level)
    return max(widths) if widths else None


# --- the ideal-subinterval finder ---------------------------------------------

@dataclass(frozen=True)
class IdealInterval:
    interval: Interval
    height: int
    rule: str = field(default="", compare=False)


def is_ideal(t, I: Interval) -> bool:
    prof = _profile(t)
    ends = prof.height(I.lo)
    return prof.height(I.hi) == ends and all(prof.height(b) >= ends for b in range(I.lo, I.hi + 1))


class _Finder:
    def __init__(self, prof: HeightProfile, j0: int, k: int):
        self.h = prof.height
        self.j0 = j0
        self.k = k

    def solve(self, lo: int, hi: int, floor: int) -> IdealInterval:
        feats = features(HeightProfile(tuple(self.h(b) for b in range(lo, hi + 1)), lo), Interval(lo, hi))
        tops = [f for f in feats if f.kind in ("peak", "flat_peak")]
        if not tops:
            # an ideal stretch without a peak is flat at its endpoint height
            return IdealInterval(Interval(lo, lo + self.j0), floor, "flat")
        if len(tops) == 1:
            (top,) = tops
            if top.kind == "flat_peak" and top.end - top.start >= self.j0:
                return IdealInterval(Interval(top.start, top.start + self.j0), top.height, "flat-peak")
            return self.ladder(lo, hi, top.start, top.end, top.height, floor, "peak")

        lows = [f for f in feats if f.kind in ("base", "flat_base")]
        base = min(lows, key=lambda f: (f.height, f.start))
        level = base.height
        left, right = base.start, base.end
        while left - 1 >= lo and self.h(left - 1) >= level:
            left -= 1
        while right + 1 <= hi and self.h(right + 1) >= level:
            right += 1
        width = right - left
        if self.j0 <= width <= self.k:
            return IdealInterval(Interval(left, right), level, "lowest-base")
        if width < self.j0:
            return self.ladder(lo, hi, left, right, level, floor, "lowest-base-ladder")
        split = base.start if base.kind == "base" else base.end
        parts = [(left, split), (split, right)]
        part = next(p for p in parts if p[1] - p[0] > self.j0)
        if part[1] - part[0] <= self.k:
            return IdealInterval(Interval(*part), level, "split")
        return self.solve(part[0], part[1], level)

    def ladder(self, lo, hi, c0, c1, top, floor, rule) -> IdealInterval:
        """Walk down from the core ``[c0, c1]`` one height at a time.

        The flanks outside the core never rise again, so at each height the
        admissible endpoints form one run per side and the achievable widths
        form a contiguous range; consecutive ranges are two apart.
        """
        j0 = self.j0
        left_run, right_run = (c0, c0), (c1, c1)
        a, b = c0, c1
        for level in range(top, floor - 1, -1):
            if level < top:
                while a - 1 >= lo and self.h(a - 1) > level:
                    a -= 1
                while b + 1 <= hi and self.h(b + 1) > level:
                    b += 1
                la = a
                while la - 1 >= lo and self.h(la - 1) == level:
                    la -= 1
                rb = b
                while rb + 1 <= hi and self.h(rb + 1) == level:
                    rb += 1
                if la == a or rb == b:
                    continue
                left_run, right_run = (la, a - 1), (b + 1, rb)
                a, b = la, rb
            narrow = right_run[0] - left_run[1]
            wide = right_run[1] - left_run[0]
            if narrow <= j0 <= wide:
                start = max(left_run[0], left_run[1] - (j0 - narrow))
                return IdealInterval(Interval(start, start + j0), level, rule + ":width-j0")
            if j0 < narrow:
                if narrow > self.k:
                    break
                return IdealInterval(Interval(left_run[1], right_run[0]), level, rule + ":next-lower")
        raise PreconditionViolated("no ideal subinterval found; is the profile ideal with steps of at most one?")


def find_ideal_subinterval(t, I: Interval, j0: int, k: int) -> IdealInterval:
    """An ideal subinterval of ``I`` whose width lies in ``[j0, k]``.

    Follows the induction on peaks: a single (flat) peak is handled by walking
    down its slopes, otherwise the interval is cut at the lowest base,
    leftmost on ties. The result has equal endpoint heights ``ell``, no lower
    height inside, and ``minwid(I, ell) <= width <= maxwid(I, ell)``.
    """
    prof = _profile(t)
    _check_interval(prof, I)
    if j0 < 2 or 2 * j0 > k:
        raise PreconditionViolated(f"need j0 >= 2 and 2*j0 <= k, got j0={j0}, k={k}")
    if isinstance(t, StackTransition) and k > t.n:
        raise PreconditionViolated(f"need k <= n = {t.n}")
    if I.width <= k:
        raise PreconditionViolated(f"interval width {I.width} must exceed k={k}")
    if not is_ideal(prof, I):
        raise PreconditionViolated(f"[{I.lo}, {I.hi}] is not ideal")
    if any(abs(prof.height(b + 1) - prof.height(b)) > 1 for b in range(I.lo, I.hi)):
        raise PreconditionViolated("heights change by more than one between boundaries; bound the stack growth first")
    return _Finder(prof, j0, k).solve(I.lo, I.hi, prof.height(I.lo))


# --- G extraction and the index set -------------------------------------------

def extract_G(m: Npda, x: Str, p: AcceptingPath, i: int, j: int, v) -> tuple | None:
    """The stack segment that replaces ``v`` while cells ``i+1 .. i+j`` are read, if the tail below ``v`` is never read."""
    n = len(x)
    if i < 0 or j < 1 or i + j > n:
        raise InvalidRange(f"(i={i}, j={j}) does not fit n={n}")
    _check_path(x, p)
    before = p.stack_at(i)
    if not before or before[0] != v:
        return None
    tail = before[1:]
    after = p.stack_at(i + j)
    keep = len(after) - len(tail)
    if keep < 0 or after[keep:] != tail:
        return None
    # the move reading cell b sees the top at boundary b-1
    if any(len(p.stack_at(b)) < len(tail) + 1 for b in range(i, i + j)):
        return None
    return after[:keep]


class DeltaIndex(NamedTuple):
    i: int
    j: int
    v: object
    w: object


class DeltaSize(NamedTuple):
    exact: int
    paper_bound: int


def _check_lemma_params(n: int, j0: int, k: int) -> None:
    if n < 2:
        raise PreconditionViolated("inputs must have length at least 2")
    if j0 < 2 or 2 * j0 > k or k > n:
        raise PreconditionViolated(f"need j0 >= 2 and 2*j0 <= k <= n, got j0={j0}, k={k}, n={n}")


def delta_size(m: Npda | int, n: int, j0: int, k: int) -> DeltaSize:
    """Exact size of ``{(i, j, v, w)}`` and the product bound ``|Gamma|^2 (k-j0+1)(n-j0+1)``."""
    gamma = m if isinstance(m, int) else len(m.stack_alphabet)
    exact = sum(max(n - j, 0) for j in range(j0, k + 1)) * gamma * gamma
    return DeltaSize(exact, gamma * gamma * (k - j0 + 1) * (n - j0 + 1))


@dataclass(frozen=True)
class Assignment:
    index: DeltaIndex
    path: AcceptingPath
    paths_examined: int
    truncated: bool


def _delta_key(m: Npda):
    order = {s: pos for pos, s in enumerate(m.stack_alphabet)}
    return lambda d: (d.i, d.j, order[d.v], order[d.w])


def _first_index(x: Str, p: AcceptingPath, j0: int, k: int):
    n = len(x)
    for i in range(1, n - j0 + 1):
        for j in range(j0, min(k, n - i) + 1):
            top = p.stack_at(i)
            if not top:
                continue
            t = extract_G(None, x, p, i, j, top[0])
            if t is not None and len(t) == 1:
                return DeltaIndex(i, j, top[0], t[0])
    return None


def assign_delta(m: Npda, x: Str, j0: int, k: int, path_budget: int | None = None,
                 strict: bool = False) -> Assignment:
    """The least index ``(i, j, v, w)`` realized by some accepting path of ``x``.

    Paths are enumerated up to ``path_budget``; with ``strict`` a full budget
    raises :class:`PathBudgetExceeded` instead of settling for the minimum
    over the paths seen.
    """
    x = tuple(x)
    _check_lemma_params(len(x), j0, k)
    limit = path_budget or budget(DEFAULT_PATH_BUDGET)
    paths = enumerate_accepting_paths(m, x, limit)
    if not paths:
        raise NotInLanguage(f"{' '.join(map(str, x))} is not accepted")
    truncated = len(paths) >= limit
    if truncated and strict:
        raise PathBudgetExceeded(f"more than {limit - 1} accepting paths")
    key = _delta_key(m)
    best = None
    for p in paths:
        idx = _first_index(x, p, j0, k)
        if idx is not None and (best is None or key(idx) < key(best[0])):
            best = (idx, p)
    if best is None:
        raise NoAssignment(f"no (i, j, v, w) with j in [{j0}, {k}] is realized by {len(paths)} path(s)")
    return Assignment(best[0], best[1], len(paths), truncated)


# --- the closing search -------------------------------------------------------

@dataclass(frozen=True)
class CflSwapWitness:
    x: Str
    y: Str
    index: DeltaIndex
    x_mid: Str
    y_mid: Str
    swapped_x: Str
    swapped_y: Str
    paths: tuple
    middle_counts_differ: bool
    stats: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CflNoCollision:
    reason: str
    stats: dict = field(default_factory=dict, compare=False)


def distinct_middle_pair(members, i: int, j: int, order=None) -> tuple | None:
    """Least pair ``x < y`` in ``members`` whose windows ``(i, i+j]`` differ."""
    ordered = sorted(members, key=order) if order else list(members)
    if not ordered:
        return None
    x = ordered[0]
    mx = middle(x, i, i + j)
    for y in ordered[1:]:
        if middle(y, i, i + j) != mx:
            return x, y
    return None


def bucket_collision(buckets: dict, label_key=None, order=None) -> tuple | None:
    """Scan buckets largest first and return ``(label, x, y)`` for the first distinct-middle pair."""
    labels = sorted(buckets, key=lambda lab: (-len(buckets[lab]), label_key(lab) if label_key else lab))
    for lab in labels:
        pair = distinct_middle_pair(buckets[lab], lab[0], lab[1], order)
        if pair is not None:
            return (lab,) + pair
    return None


def _assign_job(args):
    m, x, j0, k, path_budget = args
    try:
        return x, assign_delta(m, x, j0, k, path_budget)
    except NoAssignment:
        return x, None


def assign_all(m: Npda, S: SampleSet, j0: int, k: int, path_budget: int | None = None,
               parallel: int = 1) -> dict:
    """``x -> Assignment`` (``None`` when unassignable) for every member, in sample order."""
    jobs = [(m, x, j0, k, path_budget) for x in S]
    if parallel > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_assign_job, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    else:
        results = [_assign_job(job) for job in jobs]
    return dict(results)


def find_cfl_swap(m: Npda, S: SampleSet, j0: int, k: int, path_budget: int | None = None,
                  parallel: int = 1) -> CflSwapWitness | CflNoCollision:
    """Bucket samples by their least realized index and trade middles inside a bucket.

    Members sharing ``(i, j, v, w)`` rewrite the same top symbol ``v`` into the
    same ``w`` across cells ``i+1 .. i+j`` without touching the stack below,
    so their middles are interchangeable. Both swapped strings are re-simulated
    before the witness is returned.
    """
    _check_lemma_params(S.n, j0, k)
    assignments = assign_all(m, S, j0, k, path_budget, parallel)
    buckets: dict = {}
    for x, a in assignments.items():
        if a is not None:
            buckets.setdefault(a.index, []).append(x)
    stats = {
        "samples": len(S),
        "assigned": sum(1 for a in assignments.values() if a is not None),
        "buckets": len(buckets),
        "largest_bucket": max((len(v) for v in buckets.values()), default=0),
        "truncated_paths": sum(1 for a in assignments.values() if a is not None and a.truncated),
    }
    hit = bucket_collision(buckets, _delta_key(m), S.alphabet.key)
    if hit is None:
        reason = ("no bucket holds two samples with different middles" if buckets
                  else "no sample could be assigned an index")
        return CflNoCollision(reason, stats)
    idx, x, y = hit
    lo, hi = idx.i, idx.i + idx.j
    sx, sy = splice(x, y, lo, hi), splice(y, x, lo, hi)
    px, py = npda_accepts(m, sx), npda_accepts(m, sy)
    if px is None or py is None:
        raise VerificationFailed(f"swapping cells {lo + 1}..{hi} of two samples in bucket {idx} was rejected")
    xm, ym = middle(x, lo, hi), middle(y, lo, hi)
    return CflSwapWitness(x, y, idx, xm, ym, sx, sy, (px, py), Multiset(xm) != Multiset(ym), stats)


def splice_paths(m: Npda, x: Str, px: AcceptingPath, y: Str, py: AcceptingPath, i: int, j: int) -> AcceptingPath:
    """Accepting path for ``x`` with cells ``i+1 .. i+j`` taken from ``y``.

    Uses ``px`` outside the window and ``py`` inside it, with ``py``'s
    untouched stack tail swapped for ``px``'s. Both paths must agree on the
    top symbol at boundary ``i`` and on the rewritten segment at ``i+j``.
    """
    v = px.stack_at(i)[0]
    tx, ty = extract_G(m, x, px, i, j, v), extract_G(m, y, py, i, j, v)
    if tx is None or ty is None or tx != ty:
        raise PathMismatch("the two paths do not share G at this window")
    tail_x, tail_y = px.stack_at(i)[1:], py.stack_at(i)[1:]
    configs = list(px.configurations[: i + 2])
    for b in range(i + 1, i + j + 1):
        c = py.configurations[b + 1]
        configs.append(Configuration(b, c.state, c.stack[: len(c.stack) - len(tail_y)] + tail_x))
    configs += px.configurations[i + j + 2:]
    moves = px.transitions[: i + 1] + py.transitions[i + 1: i + j + 1] + px.transitions[i + j + 1:]
    return AcceptingPath(splice(x, y, i, i + j), tuple(configs), tuple(moves))
