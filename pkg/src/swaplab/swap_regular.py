"""Swap witnesses for regular languages, found by colliding DFA states.

For a DFA with state set Q, any sample set larger than ``|Q|^k`` has two
members whose runs agree at ``k`` chosen boundaries. Exchanging a block that
lies between two agreeing boundaries cannot change acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate

from swaplab.automata import Dfa, dfa_run
from swaplab.core import SampleSet, Str, prefix, suffix
from swaplab.errors import InvalidBlocks, InvalidParameter, NotInLanguage, VerificationFailed


@dataclass(frozen=True)
class NoCollision:
    """The pigeonhole premise is unmet: no two members share the inspected states."""

    size: int
    constant: int
    reason: str


@dataclass(frozen=True)
class RegularSwapWitness:
    x: Str
    y: Str
    cut: int
    collision_state: object
    swapped_xy: Str
    swapped_yx: Str
    verified: bool


@dataclass(frozen=True)
class MultiCutWitness:
    x: Str
    y: Str
    block_lengths: tuple
    state_tuple: tuple
    swapped: tuple
    verified: bool

    def all_swapped(self) -> list[Str]:
        return [s for pair in self.swapped for s in pair]


def swapping_constant(d: Dfa, k: int = 1) -> int:
    if k < 1:
        raise InvalidParameter("block count k must be at least 1")
    return len(d.states) ** k


def _traces(d: Dfa, S: SampleSet) -> dict:
    traces = {}
    for w in S:
        run = dfa_run(d, w)
        if not run.accepted:
            raise NotInLanguage(f"sample {' '.join(map(str, w))} is rejected by the DFA")
        traces[w] = run.trace
    return traces


def _first_collision(S: SampleSet, signature) -> tuple | None:
    """Lexicographically least pair ``x < y`` of members with equal signatures."""
    first_seen: dict = {}
    best = None
    for w in S:  # already in lexicographic order
        sig = signature(w)
        if sig in first_seen:
            pair = (first_seen[sig], w)
            if best is None or S.alphabet.key(pair[0]) < S.alphabet.key(best[0]):
                best = pair
        else:
            first_seen[sig] = w
    return best


def find_swap(d: Dfa, S: SampleSet, i: int) -> RegularSwapWitness | NoCollision:
    """Two members of ``S`` that can exchange their suffixes after cell ``i``."""
    n = S.n
    if not 0 <= i <= n:
        raise InvalidParameter(f"cut {i} outside [0, {n}]")
    traces = _traces(d, S)
    if len(S) < 2:
        return NoCollision(len(S), swapping_constant(d), "fewer than two samples")
    if i in (0, n):
        x, y = S.strings[0], S.strings[1]
        state = traces[x][0] if i == 0 else None
    else:
        pair = _first_collision(S, lambda w: traces[w][i])
        if pair is None:
            return NoCollision(len(S), swapping_constant(d),
                               f"all {len(S)} samples reach distinct states after cell {i}")
        x, y = pair
        state = traces[x][i]
    xy = prefix(x, i) + suffix(y, n - i)
    yx = prefix(y, i) + suffix(x, n - i)
    if not (dfa_run(d, xy).accepted and dfa_run(d, yx).accepted):
        raise VerificationFailed(f"swap at cut {i} rejected; the state collision must preserve acceptance")
    return RegularSwapWitness(x, y, i, state, xy, yx, True)


def find_swap_multi(d: Dfa, S: SampleSet, block_lengths) -> MultiCutWitness | NoCollision:
    """Two members whose runs agree at every block boundary, with all single-block exchanges."""
    blocks = tuple(block_lengths)
    n = S.n
    if not blocks:
        raise InvalidBlocks("at least one block is required")
    if any(b < 1 or b > n for b in blocks) or sum(blocks) > n:
        raise InvalidBlocks(f"block lengths {blocks} must lie in [1, {n}] and sum to at most {n}")
    traces = _traces(d, S)
    k = len(blocks)
    ends = list(accumulate(blocks))
    if len(S) < 2:
        return NoCollision(len(S), swapping_constant(d, k), "fewer than two samples")
    pair = _first_collision(S, lambda w: tuple(traces[w][c] for c in ends))
    if pair is None:
        return NoCollision(len(S), swapping_constant(d, k),
                           f"all {len(S)} samples have distinct state tuples at boundaries {ends}")
    x, y = pair
    starts = [0] + ends[:-1]
    swapped = []
    for lo, hi in zip(starts, ends):
        xs = x[:lo] + y[lo:hi] + x[hi:]
        ys = y[:lo] + x[lo:hi] + y[hi:]
        if not (dfa_run(d, xs).accepted and dfa_run(d, ys).accepted):
            raise VerificationFailed(f"block ({lo}, {hi}] exchange rejected")
        swapped.append((xs, ys))
    return MultiCutWitness(x, y, blocks, tuple(traces[x][c] for c in ends), tuple(swapped), True)
