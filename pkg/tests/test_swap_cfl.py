from collections import Counter
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import realizer_widths
from swaplab.automata import enumerate_accepting_paths, is_accepting_path, npda_accepts
from swaplab.core import Interval, SampleSet, middle, word
from swaplab.errors import (
    InvalidInterval,
    InvalidRange,
    NoAssignment,
    PathBudgetExceeded,
    PathMismatch,
    PreconditionViolated,
)
from swaplab.fixtures import equal6_samples, fixture_machine, pal_hash_samples, pal_samples
from swaplab.grammar import GnfGrammar, cfg_to_npda, grammar_from_text
from swaplab.swap_cfl import (
    CflNoCollision,
    CflSwapWitness,
    DeltaIndex,
    HeightProfile,
    assign_delta,
    bucket_collision,
    delta_size,
    distinct_middle_pair,
    extract_G,
    features,
    find_cfl_swap,
    find_ideal_subinterval,
    maxwid,
    minwid,
    splice_paths,
    stack_transition,
)


def transition(name, text):
    m = fixture_machine(name)
    x = word(text)
    return m, x, stack_transition(m, x, npda_accepts(m, x))


def test_stack_transition_examples():
    m, x, t = transition("anbn", "aabb")
    assert t.heights == (1, 2, 3, 3, 2, 1, 1)
    assert t.stack_at(-1) == ("z",) and t.stack_at(0) == ("S", "z")
    assert transition("anbn", "ab")[2].heights == (1, 2, 2, 1, 1)


def test_stack_transition_errors():
    m, x, t = transition("anbn", "aabb")
    with pytest.raises(PathMismatch):
        stack_transition(m, word("ab"), t.path)
    from swaplab.automata import CENT, DOLLAR, Npda
    from swaplab.core import Alphabet

    loose = Npda(("q",), Alphabet(("a",)), ("z",), {("q", CENT, "z"): [("q", ("z",))],
                                                    ("q", DOLLAR, "z"): [("q", ("z",))]}, "q", "z", {"q"})
    with pytest.raises(PreconditionViolated):
        stack_transition(loose, (), npda_accepts(loose, ()))


def test_features_examples():
    t = transition("anbn", "aabb")[2]
    (f,) = features(t, Interval(-1, 5))
    assert (f.kind, f.location, f.height) == ("flat_peak", (1, 2), 3)
    assert features(HeightProfile((1, 2, 3, 4), 0), Interval(0, 3)) == []
    fs = features(HeightProfile((1, 2, 1, 2, 1), -1), Interval(-1, 3))
    assert [(f.kind, f.location, f.height) for f in fs] == [("peak", 0, 2), ("base", 1, 1), ("peak", 2, 2)]
    fb = features(HeightProfile((3, 2, 2, 3), 0), Interval(0, 3))
    assert [(f.kind, f.location) for f in fb] == [("flat_base", (1, 2))]
    with pytest.raises(InvalidInterval):
        features(t, Interval(-2, 3))


def test_minwid_maxwid_examples():
    t = transition("anbn", "aabb")[2]
    I = Interval(-1, 5)
    assert minwid(t, I, 3) == maxwid(t, I, 3) == 1
    assert minwid(t, I, 2) == maxwid(t, I, 2) == 3
    assert minwid(t, I, 2) == maxwid(t, I, 3) + 2
    assert minwid(t, I, 7) is None
    peak = HeightProfile((1, 2, 3, 2, 1), 0)
    assert minwid(peak, Interval(0, 4), 3) == 0


profiles = st.lists(st.integers(-1, 1), min_size=1, max_size=14).map(
    lambda steps: tuple(1 + sum(steps[:i]) for i in range(len(steps) + 1))
)


@settings(max_examples=300, deadline=None)
@given(profiles, st.integers(0, 6))
def test_minwid_maxwid_against_brute_force(heights, level):
    base = min(heights)
    heights = tuple(h - base + 1 for h in heights)
    prof = HeightProfile(heights, -1)
    I = prof.span
    widths = realizer_widths(heights, -1, I.lo, I.hi, level)
    if widths:
        assert (minwid(prof, I, level), maxwid(prof, I, level)) == (min(widths), max(widths))
    elif level in heights:
        assert minwid(prof, I, level) == maxwid(prof, I, level) == 0
    else:
        assert minwid(prof, I, level) is None and maxwid(prof, I, level) is None


def unimodal(left, top, flat, right):
    up = list(range(top - left, top))
    down = list(range(top - 1, top - right - 1, -1))
    return tuple(up + [top] * (flat + 1) + down)


def test_single_peak_law_strict_slopes():
    for left, right, flat in product(range(1, 7), range(1, 7), range(4)):
        h = unimodal(left, 8, flat, right)
        prof = HeightProfile(h, 0)
        for level in range(max(h[0], h[-1]), 8):
            assert minwid(prof, prof.span, level) == maxwid(prof, prof.span, level + 1) + 2


def test_single_peak_law_breaks_on_slope_plateau():
    # a repeated height on a slope gives a width-1 pair at that level
    prof = HeightProfile((1, 2, 2, 3, 2, 1), 0)
    assert minwid(prof, prof.span, 2) == 1 != maxwid(prof, prof.span, 3) + 2


def check_ideal(heights, first, I, res, j0, k):
    a, b, level = res.interval.lo, res.interval.hi, res.height
    h = lambda i: heights[i - first]  # noqa: E731
    widths = realizer_widths(heights, first, I.lo, I.hi, level)
    assert I.lo <= a < b <= I.hi
    assert h(a) == h(b) == level and all(h(c) >= level for c in range(a, b + 1))
    assert j0 <= b - a <= k
    assert min(widths) <= b - a <= max(widths)


def test_tall_peak_example():
    heights = (1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1)
    prof = HeightProfile(heights, 0)
    res = find_ideal_subinterval(prof, prof.span, 2, 4)
    assert (res.interval, res.height) == (Interval(4, 6), 5)
    check_ideal(heights, 0, prof.span, res, 2, 4)


def test_flat_peak_example():
    heights = (1, 2, 3, 3, 3, 3, 2, 1)
    prof = HeightProfile(heights, 0)
    res = find_ideal_subinterval(prof, prof.span, 2, 4)
    assert (res.interval, res.height) == (Interval(2, 4), 3)


def test_two_peaks_recurse_into_wider_side():
    heights = (1, 2, 3, 4, 5, 4, 3, 2, 3, 2, 1)
    prof = HeightProfile(heights, 0)
    res = find_ideal_subinterval(prof, prof.span, 2, 4)
    check_ideal(heights, 0, prof.span, res, 2, 4)


def ideal_walks(length):
    for steps in product((-1, 0, 1), repeat=length):
        h, out = 1, [1]
        for s in steps:
            h += s
            if h < 1:
                break
            out.append(h)
        else:
            if out[-1] == 1:
                yield tuple(out)


def test_ideal_subinterval_exhaustive_small_profiles():
    checked = 0
    for length in range(5, 11):
        for heights in ideal_walks(length):
            prof = HeightProfile(heights, -1)
            I = prof.span
            for j0 in range(2, length):
                for k in range(2 * j0, length):
                    check_ideal(heights, -1, I, find_ideal_subinterval(prof, I, j0, k), j0, k)
                    checked += 1
    assert checked > 10_000


@pytest.mark.parametrize(
    "heights, j0, k",
    [
        ((1, 2, 1, 2, 1, 2, 1), 2, 3),  # 2*j0 > k
        ((1, 2, 2, 1), 2, 4),  # width not above k
        ((1, 2, 3, 2, 1, 2, 3, 4), 2, 4),  # not ideal
        ((1, 3, 3, 3, 3, 3, 1), 2, 4),  # step of two
    ],
)
def test_ideal_subinterval_preconditions(heights, j0, k):
    prof = HeightProfile(heights, 0)
    with pytest.raises(PreconditionViolated):
        find_ideal_subinterval(prof, prof.span, j0, k)


def test_extract_G_examples():
    m, x, t = transition("anbn", "aabb")
    p = t.path
    assert extract_G(m, x, p, 0, 3, "S") == ("T_b",)
    assert extract_G(m, x, p, 1, 2, "S") == ()
    assert extract_G(m, x, p, 2, 1, "S") is None
    with pytest.raises(InvalidRange):
        extract_G(m, x, p, 2, 3, "S")
    with pytest.raises(InvalidRange):
        extract_G(m, x, p, 0, 0, "S")


def scan_delta(m, x, j0, k):
    """Reference e(x): walk Delta in order, testing every accepting path."""
    order = {v: i for i, v in enumerate(m.stack_alphabet)}
    paths = enumerate_accepting_paths(m, x, 10_000)
    n = len(x)
    for i in range(1, n + 1):
        for j in range(j0, k + 1):
            if i > n - j:
                continue
            for v in sorted(m.stack_alphabet, key=order.get):
                for w in sorted(m.stack_alphabet, key=order.get):
                    if any(extract_G(m, x, p, i, j, v) == (w,) for p in paths):
                        return DeltaIndex(i, j, v, w)
    return None


@pytest.mark.parametrize("name, n", [("pal-hash", 9), ("pal", 8), ("anb2n", 9), ("equal", 8), ("ambiguous", 7)])
def test_assign_delta_matches_exhaustive_scan(name, n):
    m = fixture_machine(name)
    from swaplab.automata import language_upto

    xs = [x for x in language_upto(m, n) if len(x) == n][:40]
    assert xs
    for x in xs:
        expected = scan_delta(m, x, 2, 4)
        if expected is None:
            with pytest.raises(NoAssignment):
                assign_delta(m, x, 2, 4)
            continue
        got = assign_delta(m, x, 2, 4)
        assert got.index == expected
        assert 2 <= got.index.j <= 4 and 1 <= got.index.i <= n - got.index.j
        assert extract_G(m, x, got.path, got.index.i, got.index.j, got.index.v) == (got.index.w,)


def test_assign_delta_aabb_has_no_index():
    # the only ideal window of width 2..4 starts at boundary 0, outside Delta
    m = fixture_machine("anbn")
    with pytest.raises(NoAssignment):
        assign_delta(m, word("aabb"), 2, 4)


def test_assign_delta_budget_independent_when_unambiguous():
    m = fixture_machine("pal-hash")
    x = word("0110#0110")
    small, large = assign_delta(m, x, 2, 4, path_budget=1), assign_delta(m, x, 2, 4, path_budget=100)
    assert (small.index, small.path) == (large.index, large.path)
    assert large.paths_examined == 1 and not large.truncated


def test_assign_delta_strict_budget():
    m = fixture_machine("ambiguous")
    x = ("a",) * 8
    loose = assign_delta(m, x, 2, 4, path_budget=3)
    assert loose.truncated and loose.paths_examined == 3
    with pytest.raises(PathBudgetExceeded):
        assign_delta(m, x, 2, 4, path_budget=3, strict=True)


def test_assign_delta_preconditions():
    m = fixture_machine("anbn")
    with pytest.raises(PreconditionViolated):
        assign_delta(m, word("aabb"), 2, 3)
    with pytest.raises(PreconditionViolated):
        assign_delta(m, word("aabb"), 3, 6)


def test_delta_size():
    assert delta_size(3, 10, 2, 4) == (189, 243)
    assert delta_size(3, 10, 4, 4).exact == 6 * 9
    for gamma, n, j0 in product(range(1, 5), range(2, 16), range(2, 8)):
        for k in range(j0, n + 1):
            d = delta_size(gamma, n, j0, k)
            assert d.exact <= d.paper_bound
    assert delta_size(fixture_machine("anbn"), 10, 2, 4).exact == 21 * len(fixture_machine("anbn").stack_alphabet) ** 2


def test_find_cfl_swap_pal_hash():
    m = fixture_machine("pal-hash")
    r = find_cfl_swap(m, pal_hash_samples(9), 2, 4)
    assert isinstance(r, CflSwapWitness)
    assert r.x_mid != r.y_mid and len(r.swapped_x) == len(r.x) == 9
    assert all(is_accepting_path(m, p) for p in r.paths)
    assert r.x_mid == middle(r.x, r.index.i, r.index.i + r.index.j)


def test_find_cfl_swap_singleton():
    m = fixture_machine("pal")
    S = SampleSet.of(pal_samples(8).alphabet, [word("01100110")])
    r = find_cfl_swap(m, S, 2, 4)
    assert isinstance(r, CflNoCollision)


def test_find_cfl_swap_parallel_matches_serial():
    m = fixture_machine("pal")
    S = pal_samples(10)
    assert find_cfl_swap(m, S, 2, 4) == find_cfl_swap(m, S, 2, 4, parallel=2)


@pytest.mark.parametrize("name, S", [("pal", pal_samples(10)), ("pal-hash", pal_hash_samples(11))])
def test_splices_inside_every_bucket_accept(name, S):
    m = fixture_machine(name)
    buckets = {}
    for x in S:
        a = assign_delta(m, x, 2, 5)
        buckets.setdefault(a.index, []).append((x, a.path))
    spliced = 0
    for idx, group in buckets.items():
        for (x, px), (y, py) in product(group, repeat=2):
            p = splice_paths(m, x, px, y, py, idx.i, idx.j)
            assert is_accepting_path(m, p)
            assert p.input == x[: idx.i] + y[idx.i: idx.i + idx.j] + x[idx.i + idx.j:]
            spliced += 1
    assert spliced > len(S)


def test_distinct_middle_pair():
    xs = [word("0000"), word("0011"), word("0110")]
    assert distinct_middle_pair(xs, 0, 1) is None
    assert distinct_middle_pair(xs, 0, 2) == (word("0000"), word("0110"))
    assert distinct_middle_pair(xs, 2, 2, order=lambda w: w[::-1]) == (word("0000"), word("0110"))


def test_bucket_collision_prefers_larger_bucket():
    buckets = {
        (1, 2, "A", "A"): [word("0000"), word("0110")],
        (2, 2, "A", "A"): [word("0000"), word("0001"), word("0011")],
    }
    assert bucket_collision(buckets) == ((2, 2, "A", "A"), word("0000"), word("0001"))


def test_pigeonhole_small(rng):
    for _ in range(50):
        n, j0, k = 6, 3, 6
        alphabet = "abcd"
        S = ["".join(w) for w in product(alphabet, repeat=n) if rng.random() < 0.5]
        bound = delta_size(1, n, j0, k).paper_bound
        labels = [(i, j, "v", "v") for j in range(j0, k + 1) for i in range(1, n - j + 1)]
        assert all(c * bound < len(S) for j in range(j0, k + 1) for i in range(n - j + 1)
                   for c in Counter(s[i:i + j] for s in S).values())
        buckets = {}
        for s in S:
            buckets.setdefault(rng.choice(labels), []).append(tuple(s))
        assert bucket_collision(buckets) is not None


def test_equal6_anagram_middles_need_both_halves():
    n = 24
    block = n // 12
    S = list(equal6_samples(n))
    seen = 0
    for j in range(2, n):
        for i in range(n - j + 1):
            groups = {}
            for x in S:
                mid = middle(x, i, i + j)
                groups.setdefault(tuple(sorted(Counter(mid).items())), set()).add(mid)
            if all(len(g) == 1 for g in groups.values()):
                continue
            seen += 1
            # window (i, i+j] meets block b when it overlaps positions (b*block, (b+1)*block]
            meets = {b for b in range(12) if i < (b + 1) * block and b * block < i + j}
            assert any(b in meets and b + 6 in meets for b in range(6))
    assert seen > 0


def test_gnf_normal_required_for_unbounded_profile():
    g = GnfGrammar.from_cfg(grammar_from_text("S -> a S B B | a B B\nB -> b"))
    m = cfg_to_npda(g)
    x = word("aabbbb")
    t = stack_transition(m, x, npda_accepts(m, x))
    with pytest.raises(PreconditionViolated):
        find_ideal_subinterval(t, Interval(-1, 7), 2, 4)
