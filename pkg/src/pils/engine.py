"""Top-level constructions: the combined circulant pipeline, the induction
over partitions with three or more equal largest parts, and incomplete latin
squares inside the 2*h1 order gap.

Every construction returns the square, its certificate, and a replayable
trace of the branches taken; every output is re-verified before return.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .base import ls_uniform, two_size_fallback
from .circulant import even_r_outline, odd_r_outline
from .compose import (
    add_on_outline,
    array_from_outline_square,
    blow_up,
    scale_outline_array,
    square_from_array,
    sum_outline_arrays,
)
from .core import (
    InternalError,
    LatinSquare,
    Partition,
    PreconditionError,
    SubsquareCertificate,
    reduce as reduce_square,
    verify_subsquares,
)
from .lift import lift_to_realization


@dataclass
class ConstructionTrace:
    """Ordered record of construction steps; replaying the same input
    reproduces the identical square, so the trace doubles as a receipt."""

    partition: tuple[int, ...]
    steps: list[dict] = field(default_factory=list)

    def add(self, op: str, **params) -> None:
        self.steps.append({"op": op, **params})

    def to_json(self) -> str:
        return json.dumps({"partition": list(self.partition),
                           "steps": self.steps}, sort_keys=True)


def select_t(h1: int, h4: int, hk: int, r: int,
             parity: str | None = None) -> int:
    """The seed block size for the circulant-plus-blow-up route.

    Chooses h1 itself when the interval allows, otherwise the largest
    integer satisfying every inequality of the relevant parity: the seed
    window 2*h4 <= 3t <= r+1-2*h4 (shifted by one for even r), the blow-up
    budget r(h1-t) bounded by the available surplus, and for even r the
    trade budget t(t-1) >= 2(hk-1).
    """
    if not (h1 >= h4 >= hk >= 1):
        raise PreconditionError("need h1 >= h4 >= hk >= 1")
    if r < 1:
        raise PreconditionError("tail sum must be positive")
    want = "odd" if r % 2 else "even"
    if parity is not None and parity != want:
        raise PreconditionError(f"r = {r} is {want}, not {parity}")

    if r % 2:
        def ok(t: int) -> bool:
            return (2 * h4 <= 3 * t <= r + 1 - 2 * h4
                    and 0 <= r * (h1 - t) <= 2 * h1 * h1
                    and 1 <= t <= h1)

        if ok(h1):
            return h1
        hi = (r + 1 - 2 * h4) // 3
        for t in range(min(hi, h1), 0, -1):
            if ok(t):
                return t
        raise PreconditionError(
            f"no odd-parity seed size for h1={h1}, h4={h4}, r={r}")

    def ok_even(t: int) -> bool:
        return (2 * h4 + 2 <= 3 * t + 1 <= r + 1 - 2 * h4
                and 0 <= r * (h1 - t) <= 2 * h1 * h1 - t - 2 * (hk - 1)
                and t * (t - 1) >= 2 * (hk - 1)
                and 2 <= t <= h1)

    def constructible(t: int) -> bool:
        # strictly inside the window (the boundary starves the difference
        # pool) and large enough to absorb the final block's trade
        return 3 * t + 1 <= r - 2 * h4 and t >= hk - 1

    candidates = []
    if 3 * h1 <= r - 2 * h4:
        candidates.append(h1)
    hi = (r - 2 * h4) // 3
    candidates.extend(range(min(hi, h1), 1, -1))
    for t in candidates:
        if ok_even(t) and constructible(t):
            return t
    for t in candidates:
        if ok_even(t):
            return t
    raise PreconditionError(
        f"no even-parity seed size for h1={h1}, h4={h4}, hk={hk}, r={r}")


def attempt_pipeline(partition: Partition,
                     ) -> tuple[LatinSquare, SubsquareCertificate, dict]:
    """Circulant seed, blow-up to h1, lift; raises PreconditionError when
    the partition's parameters fall outside the seed constructions."""
    parts = partition.parts
    if len(parts) < 4:
        raise PreconditionError("pipeline needs a tail beyond three classes")
    if not (parts[0] == parts[1] == parts[2]):
        raise PreconditionError("pipeline needs three equal leading parts")
    h1 = parts[0]
    tail = parts[3:]
    r = sum(tail)
    t = select_t(h1, tail[0], parts[-1], r)
    seed = Partition((t, t, t) + tail)
    if r % 2:
        outline = odd_r_outline(seed)
        beta1 = beta2 = t * t
        parity = "odd"
    else:
        outline, beta1, beta2 = even_r_outline(seed)
        parity = "even"
    blown = blow_up(outline, h1, beta1, beta2)
    square, certificate = lift_to_realization(blown, partition)
    info = {"t": t, "parity": parity, "beta1": beta1, "beta2": beta2,
            "g": h1}
    return square, certificate, info


def construct_m_equal(partition: Partition, m: int | None = None,
                      ) -> tuple[LatinSquare, SubsquareCertificate,
                                 ConstructionTrace]:
    """Realize (h1^m h_{m+1} .. h_k) under (m-1)(h1+h_{m+1}) < sum of tail.

    With m unspecified the smallest m in [3, run of equal leading parts]
    whose hypothesis holds is used.  Partitions with at most two distinct
    sizes fall back to the search-based constructor when the circulant
    parameters are out of range.
    """
    parts = partition.parts
    if not partition.is_non_increasing():
        raise PreconditionError("partition must be sorted non-increasing")
    k = partition.k
    run = 1
    while run < k and parts[run] == parts[0]:
        run += 1
    if run < 3:
        raise PreconditionError("needs at least three equal largest parts")

    def hypothesis(mm: int) -> bool:
        if mm >= k:
            return False
        return (mm - 1) * (parts[0] + parts[mm]) < sum(parts[mm:])

    if m is not None:
        if not 3 <= m <= run:
            raise PreconditionError(
                f"m = {m} outside [3, {run}] for {partition}")
        if not hypothesis(m):
            raise PreconditionError(
                f"hypothesis fails at m = {m}: ({m}-1)(h1+h_m+1) >= tail sum")
        chosen = m
    else:
        chosen = next((mm for mm in range(3, run + 1) if hypothesis(mm)), None)
        if chosen is None:
            raise PreconditionError(
                f"hypothesis fails for every m in [3, {run}] on {partition}")

    trace = ConstructionTrace(parts)
    distinct = len(set(parts))
    if distinct == 1:
        square, certificate = ls_uniform(parts[0], k)
        trace.add("uniform", a=parts[0], k=k)
        return square, certificate, trace
    try:
        square, certificate, info = attempt_pipeline(partition)
        trace.add("circulant-pipeline", m=chosen, **info)
        return square, certificate, trace
    except PreconditionError as exc:
        if distinct <= 2:
            square, certificate = two_size_fallback(partition)
            trace.add("two-size-fallback", m=chosen, reason=str(exc))
            return square, certificate, trace
        raise InternalError(
            f"pipeline rejected a three-size partition {partition}: {exc}"
        ) from exc


def construct_main(partition: Partition,
                   ) -> tuple[LatinSquare, SubsquareCertificate,
                              ConstructionTrace]:
    """Realize any (h_m^m h_{m+1} .. h_k) with m >= 3 equal largest parts.

    Downward induction from the uniform base (h_k^k): at each step either
    rebuild outright through the circulant pipeline (when its hypothesis
    holds) or add (h_l - h_{l+1}) add-on arrays to the reduction of the
    previous realization and lift.  Steps whose source and target partitions
    coincide are skipped, as are steps that a later rebuild discards.
    """
    parts = partition.parts
    if not partition.is_non_increasing():
        raise PreconditionError("partition must be sorted non-increasing")
    k = partition.k
    m = 1
    while m < k and parts[m] == parts[0]:
        m += 1
    if m < 3:
        raise PreconditionError(
            f"{partition} lacks three equal largest parts")

    trace = ConstructionTrace(parts)
    if m == k:
        square, certificate = ls_uniform(parts[0], k)
        trace.add("uniform", a=parts[0], k=k)
        return square, certificate, trace

    def level_partition(level: int) -> Partition:
        return Partition((parts[level - 1],) * level + parts[level:])

    def jl_holds(level: int) -> bool:
        return ((level - 1) * (parts[level - 1] + parts[level])
                < sum(parts[level:]))

    def addon_bound_holds(level: int) -> bool:
        return (sum(parts[level + 1:])
                <= (level - 1) * parts[level - 1] + (level - 2) * parts[level])

    rebuilds = [level for level in range(k - 1, m - 1, -1)
                if parts[level - 1] > parts[level] and jl_holds(level)]
    start = min(rebuilds) if rebuilds else None

    square = certificate = None
    current_level = k
    if start is not None:
        # everything above the last rebuild is discarded by it, so try to
        # begin there outright
        try:
            square, certificate, inner = construct_m_equal(
                level_partition(start), m=start)
            trace.add("rebuild", level=start, inner=inner.steps)
            current_level = start
        except (PreconditionError, InternalError):
            # a gap instance of the even construction; walk the full chain
            square = None
    if square is None:
        square, certificate = ls_uniform(parts[k - 1], k)
        trace.add("uniform-base", a=parts[k - 1], k=k)
        current_level = k

    for level in range(current_level - 1, m - 1, -1):
        if parts[level - 1] == parts[level]:
            # same multiset of parts: the previous realization already works
            trace.add("skip-equal", level=level)
            continue
        prev = level_partition(level + 1)
        target = level_partition(level)
        if jl_holds(level) and not addon_bound_holds(level):
            # the proof's branch for this level; no add-on fallback exists
            square, certificate, inner = construct_m_equal(target, m=level)
            trace.add("rebuild", level=level, inner=inner.steps)
            continue
        square, certificate = _add_on_step(square, prev, target, level, trace)
    return square, certificate, trace


def _add_on_step(square: LatinSquare, prev: Partition, target: Partition,
                 level: int, trace: ConstructionTrace,
                 ) -> tuple[LatinSquare, SubsquareCertificate]:
    parts = target.parts
    copies = parts[level - 1] - parts[level]
    reduced = reduce_square(square, prev, prev, prev)
    body = array_from_outline_square(reduced, drop_diagonal=True)
    addon = add_on_outline(level, parts[level:], parts[level - 1])
    combined = sum_outline_arrays(body, scale_outline_array(addon, copies))
    freq = combined.frequency()
    for i in range(1, target.k + 1):
        for j in range(1, target.k + 1):
            want = 0 if i == j else target.part(i) * target.part(j)
            if freq.at(i, j) != want:
                raise InternalError(
                    f"combined array has F({i},{j}) = {freq.at(i, j)}, "
                    f"wanted {want}")
    outline = square_from_array(combined, target)
    out, certificate = lift_to_realization(outline, target)
    trace.add("add-on", level=level, copies=copies)
    return out, certificate


def construct_ils(n: int, orders: Sequence[int],
                  ) -> tuple[LatinSquare, SubsquareCertificate]:
    """An order-n latin square with disjoint subsquares of the given orders,
    for any n at least 2*h1 plus the orders' sum."""
    wanted = sorted((int(h) for h in orders), reverse=True)
    if not wanted or any(h < 1 for h in wanted):
        raise PreconditionError("orders must be positive")
    h1, hk = wanted[0], wanted[-1]
    total = sum(wanted)
    if n < 2 * h1 + total:
        raise PreconditionError(
            f"n = {n} below the bound 2*h1 + sum = {2 * h1 + total}")
    gap = n - 2 * h1 - total
    q, leftover = divmod(gap, hk)
    padded = [h1, h1] + wanted + [hk] * q
    if leftover:
        padded.append(leftover)
    partition = Partition.sorted(padded)
    square, certificate, _ = construct_main(partition)

    remaining = list(certificate.blocks)
    chosen = []
    for h in wanted:
        idx = next(i for i, blk in enumerate(remaining)
                   if len(blk.rows) == h)
        chosen.append(remaining.pop(idx))
    restricted = SubsquareCertificate(tuple(chosen))
    verify_subsquares(square, restricted)
    return square, restricted
