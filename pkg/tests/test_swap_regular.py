import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swaplab.automata import Dfa, dfa_run
from swaplab.core import Alphabet, SampleSet, word
from swaplab.errors import InvalidBlocks, InvalidParameter, NotInLanguage
from swaplab.fixtures import (
    balance_mod_dfa,
    compose_track,
    equal_exact_track_dfa,
    equal_member,
    equal_samples,
    fixture_predicate,
    split_track,
)
from swaplab.swap_regular import (
    MultiCutWitness,
    NoCollision,
    RegularSwapWitness,
    find_swap,
    find_swap_multi,
    swapping_constant,
)

BIN = Alphabet(("0", "1"))


def parity():
    delta = {("even", "0"): "even", ("even", "1"): "odd", ("odd", "0"): "odd", ("odd", "1"): "even"}
    return Dfa(("even", "odd"), BIN, delta, "even", {"even"})


def random_dfa(rng, size):
    states = tuple(range(size))
    delta = {(q, a): rng.randrange(size) for q in states for a in BIN}
    finals = {q for q in states if rng.random() < 0.5} or {0}
    return Dfa(states, BIN, delta, 0, finals)


def members(d, n):
    return [w for w in BIN.words(n) if d.accepts(w)]


def test_swapping_constant():
    assert swapping_constant(parity()) == 2
    three = Dfa((0, 1, 2), BIN, {(q, a): (q + 1) % 3 for q in range(3) for a in BIN}, 0, {0})
    assert swapping_constant(three, 2) == 9
    with pytest.raises(InvalidParameter):
        swapping_constant(parity(), 0)


def test_parity_example():
    S = SampleSet.of(BIN, map(word, ["110", "101", "011"]))
    r = find_swap(parity(), S, 1)
    assert isinstance(r, RegularSwapWitness)
    assert {r.x, r.y} == {word("110"), word("101")} and r.collision_state == "odd"
    assert {r.swapped_xy, r.swapped_yx} == {word("101"), word("110")}
    assert r.verified


def test_degenerate_cuts():
    S = SampleSet.of(BIN, map(word, ["110", "101", "011"]))
    for cut in (0, 3):
        r = find_swap(parity(), S, cut)
        assert (r.x, r.y) == (word("011"), word("101"))
        assert {r.swapped_xy, r.swapped_yx} == {r.x, r.y}


def test_no_collision_when_states_distinct():
    d = parity()
    S = SampleSet.of(BIN, map(word, ["0110", "1010"]))
    r = find_swap(d, S, 1)
    assert isinstance(r, NoCollision) and r.size == 2 and r.constant == 2


def test_errors():
    S = SampleSet.of(BIN, map(word, ["10", "11"]))
    with pytest.raises(NotInLanguage):
        find_swap(parity(), S, 1)
    good = SampleSet.of(BIN, map(word, ["00", "11"]))
    with pytest.raises(InvalidParameter):
        find_swap(parity(), good, 3)
    with pytest.raises(InvalidBlocks):
        find_swap_multi(parity(), good, (2, 1))
    with pytest.raises(InvalidBlocks):
        find_swap_multi(parity(), good, ())


def test_multi_reduces_to_single():
    rng = random.Random(3)
    for _ in range(50):
        d = random_dfa(rng, 3)
        L = members(d, 6)
        if len(L) < 4:
            continue
        S = SampleSet.of(BIN, rng.sample(L, 4))
        for cut in range(1, 6):
            one, multi = find_swap(d, S, cut), find_swap_multi(d, S, (cut,))
            assert isinstance(one, RegularSwapWitness) and isinstance(multi, MultiCutWitness)
            assert (one.x, one.y) == (multi.x, multi.y)
            assert set(multi.all_swapped()) == {one.swapped_yx, one.swapped_xy}


def test_random_three_state_two_blocks(rng):
    found = 0
    while found < 20:
        d = random_dfa(rng, 3)
        L = members(d, 8)
        if len(L) < 10:
            continue
        S = SampleSet.of(BIN, rng.sample(L, 10))
        r = find_swap_multi(d, S, (3, 2))
        assert isinstance(r, MultiCutWitness)
        assert all(d.accepts(w) for w in r.all_swapped()) and r.x != r.y
        found += 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(2, 8))
def test_pigeonhole_guarantee(seed, size, n):
    rng = random.Random(seed)
    d = random_dfa(rng, size)
    L = members(d, n)
    if len(L) <= size:
        return
    S = SampleSet.of(BIN, rng.sample(L, size + 1))
    for cut in range(n + 1):
        r = find_swap(d, S, cut)
        assert isinstance(r, RegularSwapWitness)
        assert dfa_run(d, r.swapped_xy).accepted and dfa_run(d, r.swapped_yx).accepted


def test_determinism():
    rng = random.Random(11)
    d = random_dfa(rng, 4)
    S = SampleSet.of(BIN, members(d, 7)[:6])
    assert find_swap(d, S, 3) == find_swap(d, S, 3)


def tracked(n, advice):
    return SampleSet.of(
        balance_mod_dfa(3, Alphabet(("0",))).alphabet,
        (compose_track(w, advice).pairs for w in equal_samples(n)),
        n,
    )


@pytest.mark.parametrize("n", [8, 10, 12])
def test_equal_negative_example(n):
    advice = ("0",) * n
    S = tracked(n, advice)
    small = balance_mod_dfa(3, Alphabet(("0",)))
    r = find_swap(small, S, n // 2)
    assert isinstance(r, RegularSwapWitness)
    eq = fixture_predicate("equal")
    ks = [k for k in range(n // 2 + 1) if equal_member(n, k) == split_track(r.x).upper]
    js = [k for k in range(n // 2 + 1) if equal_member(n, k) == split_track(r.y).upper]
    assert ks != js
    for w in (r.swapped_xy, r.swapped_yx):
        assert not eq(split_track(w).upper)
    exact = equal_exact_track_dfa(n, advice)
    assert isinstance(find_swap(exact, S, n // 2), NoCollision)
    assert len(exact.states) > len(S)
