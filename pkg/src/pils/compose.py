"""Frequency-array machinery and the blow-up step.

An outline array is a k x k array of symbol multisets whose cell sizes, row
symbol counts and column symbol counts all agree with a single k x k
frequency array F: |O(i,j)| = F(i,j), symbol l occurs F(i,l) times in row i
and F(l,j) times in column j.  An outline square associated to a partition
(h1..hk) is exactly an outline array for F(i,j) = hi*hj.

The operations here are the ones the induction needs: cellwise sums,
amalgamation along a set partition of the classes, the add-on array built
from small one-big-block realizations, and the blow-up that grows the three
leading classes of an outline square from h1 to g.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    FrequencyArray,
    GridError,
    InternalError,
    Multiset,
    OutlineRectangle,
    Partition,
    PreconditionError,
    multiset,
    validate_outline,
)


@dataclass(frozen=True)
class OutlineArray:
    """A k x k array of multisets over symbols [k]."""

    k: int
    cells: tuple[tuple[Multiset, ...], ...]

    def __init__(self, cells: Sequence[Sequence[Iterable[int]]]):
        k = len(cells)
        if any(len(row) != k for row in cells):
            raise GridError("outline array must be square")
        frozen = tuple(tuple(multiset(c) for c in row) for row in cells)
        for row in frozen:
            for c in row:
                if c and (c[0] < 1 or c[-1] > k):
                    raise GridError(f"cell symbol outside [{k}]: {c}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "cells", frozen)

    def cell(self, i: int, j: int) -> Multiset:
        return self.cells[i - 1][j - 1]

    def frequency(self) -> FrequencyArray:
        """The frequency array given by the cell sizes."""
        return FrequencyArray([[len(c) for c in row] for row in self.cells])


def validate_outline_array(array: OutlineArray) -> list[str]:
    """Check the row and column count conditions against the cell sizes.

    Returns human-readable violations; empty means the array is an outline
    array for its own frequency array.
    """
    k = array.k
    problems = []
    for i in range(1, k + 1):
        counts: Counter = Counter()
        for j in range(1, k + 1):
            counts.update(array.cell(i, j))
        for l in range(1, k + 1):
            want = len(array.cell(i, l))
            if counts[l] != want:
                problems.append(
                    f"row {i}: symbol {l} occurs {counts[l]}, F({i},{l})={want}")
    for j in range(1, k + 1):
        counts = Counter()
        for i in range(1, k + 1):
            counts.update(array.cell(i, j))
        for l in range(1, k + 1):
            want = len(array.cell(l, j))
            if counts[l] != want:
                problems.append(
                    f"column {j}: symbol {l} occurs {counts[l]}, F({l},{j})={want}")
    return problems


def array_from_outline_square(outline: OutlineRectangle,
                              drop_diagonal: bool = False) -> OutlineArray:
    """View an outline square as an outline array, optionally emptying the
    diagonal cells (each holds exactly the h_i^2 copies of its own symbol,
    so removal keeps the count conditions consistent)."""
    if not outline.is_square_form():
        raise PreconditionError("outline is not an outline square")
    cells = [list(row) for row in outline.cells]
    if drop_diagonal:
        for i in range(len(cells)):
            cells[i][i] = ()
    return OutlineArray(cells)


def square_from_array(array: OutlineArray, partition: Partition,
                      ) -> OutlineRectangle:
    """Restore diagonal cells h_i^2 {i} and reinterpret as an outline square."""
    if partition.k != array.k:
        raise PreconditionError("partition order does not match the array")
    cells = [list(row) for row in array.cells]
    for i in range(1, array.k + 1):
        if cells[i - 1][i - 1]:
            raise PreconditionError(f"diagonal cell ({i},{i}) is not empty")
        h = partition.part(i)
        cells[i - 1][i - 1] = (i,) * (h * h)
    outline = OutlineRectangle(partition, partition, partition, cells)
    bad = validate_outline(outline)
    if bad:
        raise InternalError(
            f"array plus diagonal is not an outline square: {bad[0]}")
    return outline


def sum_outline_arrays(first: OutlineArray, second: OutlineArray,
                       ) -> OutlineArray:
    """Cellwise multiset union; realizes the sum of the frequency arrays."""
    if first.k != second.k:
        raise PreconditionError(
            f"order mismatch: {first.k} vs {second.k}")
    cells = [
        [first.cells[i][j] + second.cells[i][j] for j in range(first.k)]
        for i in range(first.k)
    ]
    return OutlineArray(cells)


def scale_outline_array(array: OutlineArray, copies: int) -> OutlineArray:
    """The cellwise sum of ``copies`` copies of ``array``."""
    if copies < 0:
        raise PreconditionError("copies must be non-negative")
    cells = [[c * copies for c in row] for row in array.cells]
    return OutlineArray(cells)


def amalgamate_outline_array(array: OutlineArray,
                             groups: Sequence[Iterable[int]]) -> OutlineArray:
    """Merge classes along a set partition of [k]; groups are ordered by
    their smallest element and symbols relabelled by group index."""
    k = array.k
    group_sets = [sorted(set(g)) for g in groups]
    flat = sorted(x for g in group_sets for x in g)
    if flat != list(range(1, k + 1)):
        raise PreconditionError(f"groups do not partition [{k}]")
    group_sets.sort(key=lambda g: g[0])
    relabel = {}
    for gi, members in enumerate(group_sets, start=1):
        for x in members:
            relabel[x] = gi
    kk = len(group_sets)
    cells = [[[] for _ in range(kk)] for _ in range(kk)]
    for gi, rows in enumerate(group_sets):
        for gj, cols in enumerate(group_sets):
            merged: list[int] = []
            for x in rows:
                for y in cols:
                    merged.extend(relabel[s] for s in array.cells[x - 1][y - 1])
            cells[gi][gj] = merged
    return OutlineArray(cells)


# ---------------------------------------------------------------------------
# Add-on arrays


def _deal_round_robin(items: Sequence[int], groups: int) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(groups)]
    for idx, item in enumerate(items):
        out[idx % groups].append(item)
    return out


def add_on_outline(m: int, tail: Sequence[int], h_m: int) -> OutlineArray:
    """The add-on outline array of order k = m + len(tail).

    Its frequency array is h_m + h_{m+1} on off-diagonal cells of the leading
    m x m corner, h_j on cells (i <= m, j > m) and transposed, and zero
    elsewhere.  Built as the sum of h_m + h_{m+1} arrays, each obtained from
    a realization with m singleton blocks and one block holding a share of
    the tail symbol multiset.
    """
    if m < 3:
        raise PreconditionError("add-on arrays need m >= 3")
    if not tail:
        raise PreconditionError("tail must contain at least h_{m+1}")
    tail = [int(h) for h in tail]
    h_m1 = tail[0]
    if h_m < h_m1 or any(a < b for a, b in zip(tail, tail[1:])):
        raise PreconditionError("tail must be non-increasing and at most h_m")
    if sum(tail[1:]) > (m - 1) * h_m + (m - 2) * h_m1:
        raise PreconditionError(
            "tail too heavy: sum of parts beyond m+1 exceeds "
            "(m-1)h_m + (m-2)h_{m+1}")
    k = m + len(tail)
    group_count = h_m + h_m1
    symbols: list[int] = []
    for offset, h in enumerate(tail):
        symbols.extend([m + 1 + offset] * h)
    shares = _deal_round_robin(symbols, group_count)

    total = OutlineArray([[() for _ in range(k)] for _ in range(k)])
    for share in shares:
        if len(share) > m - 1:
            raise InternalError("round-robin share exceeded m - 1 symbols")
        total = sum_outline_arrays(total, _one_share_array(m, k, share))
    return total


def _one_share_array(m: int, k: int, share: Sequence[int]) -> OutlineArray:
    """Outline array of one share: a realization with an order-s block and m
    singletons, amalgamated so the singletons land on classes 1..m and the
    block rows split among the share's tail classes, with the diagonal and
    the block-on-block corner emptied."""
    from .base import ls_one_big

    s = len(share)
    counts = Counter(share)
    square, _ = ls_one_big(s, m)
    # The realization has the order-s block first: rows/cols/symbols [s],
    # then m singletons.  Class map: square index -> array class.
    owner: list[int] = []
    for sym in sorted(counts):
        owner.extend([sym] * counts[sym])
    assert len(owner) == s
    klass = owner + [i for i in range(1, m + 1)]

    cells: list[list[list[int]]] = [[[] for _ in range(k)] for _ in range(k)]
    n = s + m
    for r in range(1, n + 1):
        ci = klass[r - 1]
        for c in range(1, n + 1):
            cj = klass[c - 1]
            if ci == cj:
                continue
            if ci > m and cj > m:
                continue
            cells[ci - 1][cj - 1].append(klass[square.cell(r, c) - 1])
    array = OutlineArray(cells)
    bad = validate_outline_array(array)
    if bad:
        raise InternalError(f"share array invalid: {bad[0]}")
    return array


# ---------------------------------------------------------------------------
# Blow-up


@dataclass(frozen=True)
class BlowupPlan:
    """Division of the new off-diagonal volume between the two cyclic
    orientations of the leading 3 x 3 corner."""

    g: int
    h1: int
    r: int
    p: int
    q: int
    p_parts: tuple[int, ...]
    q_parts: tuple[int, ...]
    beta1: int
    beta2: int


def plan_blow_up(seed: Partition, g: int, beta1: int, beta2: int) -> BlowupPlan:
    h1 = seed.part(1)
    tail = seed.parts[3:]
    r = sum(tail)
    if g < h1:
        raise PreconditionError(f"g = {g} below the seed block size {h1}")
    if beta1 < 0 or beta2 < 0:
        raise PreconditionError("beta values must be non-negative")
    volume = r * (g - h1)
    room = 2 * (g * g - h1 * h1) + beta1 + beta2
    if volume > room:
        raise PreconditionError(
            f"blow-up infeasible: r(g-h1) = {volume} exceeds "
            f"2(g^2-h1^2)+beta1+beta2 = {room}")
    p = min(volume, g * g - h1 * h1 + beta1)
    q = volume - p
    if q > g * g - h1 * h1 + beta2:
        raise InternalError("blow-up split out of range despite feasibility")
    p_parts = []
    left = p
    for h in tail:
        take = min(h * (g - h1), left)
        p_parts.append(take)
        left -= take
    if left:
        raise InternalError("could not distribute p over the tail")
    q_parts = tuple(h * (g - h1) - pp for h, pp in zip(tail, p_parts))
    return BlowupPlan(g, h1, r, p, q, tuple(p_parts), q_parts, beta1, beta2)


def _adjust(cell: Multiset, sym: int, delta: int) -> list[int]:
    """Add (delta > 0) or remove (delta < 0) copies of one symbol."""
    out = list(cell)
    if delta >= 0:
        out.extend([sym] * delta)
        return out
    for _ in range(-delta):
        try:
            out.remove(sym)
        except ValueError:
            raise InternalError(
                f"blow-up needs to remove symbol {sym} from a cell that has "
                "no copy left; beta guarantee misreported") from None
    return out


def blow_up(outline: OutlineRectangle, g: int, beta1: int, beta2: int,
            ) -> OutlineRectangle:
    """Grow the three leading classes of an outline square from h1 to g.

    The input must be an outline square for (h1,h1,h1,h4..hk) with diagonal
    cells h_i^2 {i}, at least beta1 copies of 1, 2, 3 in cells (2,3), (3,1),
    (1,2) and beta2 copies of 1, 2, 3 in (3,2), (1,3), (2,1).  Output is an
    outline square for (g,g,g,h4..hk) with the diagonal condition restored.
    """
    if not outline.is_square_form():
        raise PreconditionError("blow-up expects an outline square")
    seed = outline.row_partition
    if seed.k < 4 or not (seed.part(1) == seed.part(2) == seed.part(3)):
        raise PreconditionError(
            "blow-up expects three equal leading classes and a tail")
    h1 = seed.part(1)
    k = seed.k
    for i in range(1, k + 1):
        h = seed.part(i)
        if outline.cell(i, i) != (i,) * (h * h):
            raise PreconditionError(
                f"diagonal cell ({i},{i}) must be {h}^2 copies of {i}")
    for sym, (i, j) in ((1, (2, 3)), (2, (3, 1)), (3, (1, 2))):
        if outline.cell(i, j).count(sym) < beta1:
            raise PreconditionError(
                f"cell ({i},{j}) lacks beta1 = {beta1} copies of {sym}")
    for sym, (i, j) in ((1, (3, 2)), (2, (1, 3)), (3, (2, 1))):
        if outline.cell(i, j).count(sym) < beta2:
            raise PreconditionError(
                f"cell ({i},{j}) lacks beta2 = {beta2} copies of {sym}")

    plan = plan_blow_up(seed, g, beta1, beta2)
    tail = seed.parts[3:]
    d1 = plan.p - (g * g - h1 * h1)
    d2 = plan.q - (g * g - h1 * h1)
    s1 = {m + 4: c for m, c in enumerate(plan.p_parts)}
    s2 = {m + 4: c for m, c in enumerate(plan.q_parts)}

    cells = [[list(c) for c in row] for row in outline.cells]

    def put(i: int, j: int, value: Iterable[int]) -> None:
        cells[i - 1][j - 1] = list(value)

    def extend(i: int, j: int, adds: dict[int, int]) -> None:
        for sym, cnt in adds.items():
            cells[i - 1][j - 1].extend([sym] * cnt)

    for i in range(1, 4):
        put(i, i, [i] * (g * g))
    extend(1, 2, s1)
    put(1, 2, _adjust(multiset(cells[0][1]), 3, -d1))
    extend(2, 3, s1)
    put(2, 3, _adjust(multiset(cells[1][2]), 1, -d1))
    extend(3, 1, s1)
    put(3, 1, _adjust(multiset(cells[2][0]), 2, -d1))
    extend(2, 1, s2)
    put(2, 1, _adjust(multiset(cells[1][0]), 3, -d2))
    extend(3, 2, s2)
    put(3, 2, _adjust(multiset(cells[2][1]), 1, -d2))
    extend(1, 3, s2)
    put(1, 3, _adjust(multiset(cells[0][2]), 2, -d2))
    for j in range(4, k + 1):
        pj, qj = plan.p_parts[j - 4], plan.q_parts[j - 4]
        extend(1, j, {3: pj, 2: qj})
        extend(2, j, {1: pj, 3: qj})
        extend(3, j, {2: pj, 1: qj})
        extend(j, 1, {2: pj, 3: qj})
        extend(j, 2, {3: pj, 1: qj})
        extend(j, 3, {1: pj, 2: qj})

    new_partition = Partition((g, g, g) + tail)
    result = OutlineRectangle(new_partition, new_partition, new_partition,
                              cells)
    bad = validate_outline(result)
    if bad:
        raise InternalError(f"blow-up produced an invalid outline: {bad[0]}")
    return result
