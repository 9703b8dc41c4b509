"""Prolonged back-circulant outline rectangles and the derived outline squares.

The primary construction prolongs an odd-order back-circulant square along a
chosen set of constant-difference transversals, amalgamates selected symbol
groups, then repairs the would-be subsquare cells with four-cell intercalate
trades.  On top of it sit the two outline-square constructors used by the
engine: one for odd tail sum r (a direct amalgamation) and one for even r
(a longer route through a substitution corner and two larger trades).

All ring arithmetic lives on the representatives [t] = {1..t} of Z_t.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

from .core import (
    InternalError,
    OutlineRectangle,
    Partition,
    PreconditionError,
    is_latin,
    validate_outline,
)
from .lift import _perfect_matching


def mod_rep(x: int, t: int) -> int:
    """Representative of x in {1..t}."""
    return (x - 1) % t + 1


def mod_add(x: int, y: int, t: int) -> int:
    return (x + y - 1) % t + 1


def mod_sub(x: int, y: int, t: int) -> int:
    return (x - y - 1) % t + 1


def mod_mul(x: int, y: int, t: int) -> int:
    return (x * y - 1) % t + 1


def back_circulant_cell(i: int, j: int, t: int) -> int:
    """Cell (i, j) of the order-t back-circulant square, t odd.

    The value is (i + j) * (t+1)/2 in Z_t, so every constant-difference
    diagonal is a transversal.
    """
    if t % 2 == 0 or t < 1:
        raise PreconditionError(f"order {t} must be odd and positive")
    if not (1 <= i <= t and 1 <= j <= t):
        raise PreconditionError(f"({i},{j}) outside [{t}]^2")
    return mod_mul(mod_add(i, j, t), (t + 1) // 2, t)


@dataclass(frozen=True)
class CirculantParams:
    """Validated difference structure for the prolongation.

    ``d`` lists the h1 chosen differences: the first h1 - 2*h2 are free (in
    neither difference class), the rest enumerate the odd class D2.  D1 holds
    the even offsets around 0 plus t itself; cells on those diagonals stay
    inside their own symbol block and need no trade.
    """

    partition: Partition
    t: int
    d1: frozenset[int]
    d2: frozenset[int]
    d: tuple[int, ...]

    @property
    def free_count(self) -> int:
        return self.partition.part(1) - 2 * self.partition.part(2)

    def v_multiset(self) -> Counter:
        h1 = self.partition.part(1)
        out: Counter = Counter()
        for i in range(2, self.partition.k + 1):
            out[h1 + i - 1] += self.partition.part(i)
        return out


def circulant_params(partition: Partition) -> CirculantParams:
    parts = partition.parts
    if len(parts) < 2:
        raise PreconditionError("prolongation needs at least two parts")
    h1, h2 = parts[0], parts[1]
    tail = parts[1:]
    if any(a < b for a, b in zip(tail, tail[1:])):
        raise PreconditionError("parts after the first must be non-increasing")
    t = partition.n - h1
    if t % 2 == 0:
        raise PreconditionError(f"t = n - h1 = {t} must be odd")
    if 4 * h2 > t + 1:
        raise PreconditionError(f"h2 = {h2} exceeds (t+1)/4 with t = {t}")
    if not 2 * h2 <= h1 <= t + 1 - 2 * h2:
        raise PreconditionError(
            f"h1 = {h1} outside [2*h2, t+1-2*h2] = [{2 * h2}, {t + 1 - 2 * h2}]")
    d1 = frozenset({t}
                   | {t - e for e in range(2, 2 * h2 - 1, 2)}
                   | set(range(2, 2 * h2 - 1, 2)))
    d2 = frozenset({t - e for e in range(1, 2 * h2, 2)}
                   | set(range(1, 2 * h2, 2)))
    if len(d1) != 2 * h2 - 1 or len(d2) != 2 * h2 or (d1 & d2):
        raise InternalError("difference classes malformed")
    pool = sorted(set(range(1, t + 1)) - d1 - d2)
    free = pool[: h1 - 2 * h2]
    if len(free) < h1 - 2 * h2:
        raise InternalError("not enough free differences despite preconditions")
    d = tuple(free) + tuple(sorted(d2))
    return CirculantParams(partition, t, d1, d2, d)


@dataclass(frozen=True)
class TripleSet:
    """Triples (row, column, symbol) attached to one free difference.

    Row and column coordinates each exhaust the non-subsquare indices, the
    symbol multiset equals V, cell (row, column) holds the set's index, and
    row/column against the index line give the symbol.
    """

    index: int
    triples: tuple[tuple[int, int, int], ...]


def build_circulant_outline(partition: Partition,
                            ) -> tuple[OutlineRectangle, list[TripleSet]]:
    """The prolonged, amalgamated and traded outline rectangle.

    Output is associated to ((1^n), (1^n), (1^h1, h2, ..., hk)) and lifts to
    a realization in normal form: the leading h1 x h1 corner is a subsquare
    on [h1] and every later block is constant on its own group symbol.
    """
    params = circulant_params(partition)
    parts = partition.parts
    h1, t = parts[0], params.t
    k = partition.k
    n = partition.n
    inv2 = (t + 1) // 2

    grid = [[0] * n for _ in range(n)]
    for x in range(h1):
        row = grid[x]
        for y in range(h1):
            row[y] = (x + y) % h1 + 1
    dmap = {dv: idx for idx, dv in enumerate(params.d, start=1)}
    for i in range(1, t + 1):
        gi = grid[h1 + i - 1]
        for j in range(1, t + 1):
            b = mod_mul(mod_add(i, j, t), inv2, t) + h1
            idx = dmap.get(mod_sub(j, i, t))
            if idx is None:
                gi[h1 + j - 1] = b
            else:
                gi[h1 + j - 1] = idx
                grid[idx - 1][h1 + j - 1] = b
                gi[idx - 1] = b
    if not is_latin(grid):
        raise InternalError("prolonged square is not latin")

    # Symbol amalgamation: singles stay, the last 2*h2 subsquare symbols
    # collapse to a working label 0, each tail block to h1 + i - 1.
    singles = h1 - 2 * parts[1]
    label_of = [0] * (n + 1)
    for v in range(1, singles + 1):
        label_of[v] = v
    for v in range(singles + 1, h1 + 1):
        label_of[v] = 0
    pos = h1
    for i in range(2, k + 1):
        for _ in range(parts[i - 1]):
            pos += 1
            label_of[pos] = h1 + i - 1
    labels = [[label_of[v] for v in row] for row in grid]

    # Four-cell trades put each block's own group symbol onto the odd
    # difference cells inside the block (and their transposes).
    touched: set[tuple[int, int]] = set()

    def swap(rr: int, cc: int, old: int, new: int) -> None:
        cell = (rr + h1 - 1, cc + h1 - 1)
        if cell in touched:
            raise InternalError(f"trade cell {cell} touched twice")
        touched.add(cell)
        if labels[cell[0]][cell[1]] != old:
            raise InternalError(
                f"trade expected label {old} at {cell}, found "
                f"{labels[cell[0]][cell[1]]}")
        labels[cell[0]][cell[1]] = new

    prefix = 0
    for i in range(2, k + 1):
        hi = parts[i - 1]
        sym = h1 + i - 1
        for a in range(1, hi + 1):
            for b in range(a + 1, hi + 1):
                if (b - a) % 2 == 0:
                    continue
                x1 = prefix + a
                y1 = prefix + b
                x2 = mod_sub(prefix + 1, a, t)
                y2 = mod_sub(prefix + 2 * hi + 1, b, t)
                for rr, cc in ((y1, x1), (y2, x2), (x1, y1), (x2, y2)):
                    swap(rr, cc, 0, sym)
                for rr, cc in ((y2, x1), (y1, x2), (x1, y2), (x2, y1)):
                    swap(rr, cc, sym, 0)
        prefix += hi

    # Resolve the 0 class back into singletons h1-2*h2+1 .. h1 through
    # repeated transversal extraction (the only lifting step the outline
    # still owes its symbol partition).
    width = 2 * parts[1]
    adj = [[j for j in range(n) if labels[i][j] == 0] for i in range(n)]
    for sub in range(1, width):
        match = _perfect_matching(adj, n)
        new_sym = singles + sub
        for i in range(n):
            j = match[i]
            labels[i][j] = new_sym
            adj[i].remove(j)
    for i in range(n):
        if len(adj[i]) != 1:
            raise InternalError("0-class did not resolve to a transversal")
        labels[i][adj[i][0]] = singles + width

    ones = Partition([1] * n)
    sym_partition = Partition([1] * h1 + list(parts[1:]))
    outline = OutlineRectangle(
        ones, ones, sym_partition,
        [[(labels[i][j],) for j in range(n)] for i in range(n)])
    bad = validate_outline(outline)
    if bad:
        raise InternalError(f"circulant outline invalid: {bad[0]}")

    triple_sets = []
    for idx in range(1, params.free_count + 1):
        dv = params.d[idx - 1]
        triples = []
        for a in range(1, t + 1):
            b = mod_add(a, dv, t)
            z = label_of[mod_mul(mod_add(a, b, t), inv2, t) + h1]
            triples.append((h1 + a, h1 + b, z))
        triple_sets.append(TripleSet(idx, tuple(triples)))
    return outline, triple_sets


def check_circulant_properties(outline: OutlineRectangle,
                               triple_sets: Sequence[TripleSet],
                               partition: Partition) -> list[str]:
    """Literal re-check of the two construction guarantees; [] when clean."""
    problems = []
    h1 = partition.part(1)
    n = partition.n
    for x in range(1, h1 + 1):
        for y in range(1, h1 + 1):
            s = outline.cell(x, y)[0]
            if not 1 <= s <= h1:
                problems.append(f"corner cell ({x},{y}) leaves [h1]: {s}")
    prefix = h1
    for i in range(2, partition.k + 1):
        hi = partition.part(i)
        sym = h1 + i - 1
        for x in range(prefix + 1, prefix + hi + 1):
            for y in range(prefix + 1, prefix + hi + 1):
                if outline.cell(x, y) != (sym,):
                    problems.append(
                        f"block {i} cell ({x},{y}) holds "
                        f"{outline.cell(x, y)}, wanted ({sym},)")
        prefix += hi

    params = circulant_params(partition)
    want_v = params.v_multiset()
    seen_pairs: set[tuple[int, int]] = set()
    for ts in triple_sets:
        xs = {x for x, _, _ in ts.triples}
        ys = {y for _, y, _ in ts.triples}
        outer = set(range(h1 + 1, n + 1))
        if xs != outer or ys != outer:
            problems.append(f"triple set {ts.index} misses rows or columns")
        if Counter(z for _, _, z in ts.triples) != want_v:
            problems.append(f"triple set {ts.index} has wrong symbol multiset")
        for x, y, z in ts.triples:
            if (x, y) in seen_pairs:
                problems.append(f"pair ({x},{y}) repeated across triple sets")
            seen_pairs.add((x, y))
            if outline.cell(x, y) != (ts.index,):
                problems.append(
                    f"cell ({x},{y}) holds {outline.cell(x, y)}, wanted "
                    f"({ts.index},)")
            if outline.cell(x, ts.index) != (z,):
                problems.append(f"cell ({x},{ts.index}) not ({z},)")
            if outline.cell(ts.index, y) != (z,):
                problems.append(f"cell ({ts.index},{y}) not ({z},)")
    return problems


# ---------------------------------------------------------------------------
# Outline squares with three equal leading classes


def _amalgamate_singleton_outline(outline: OutlineRectangle,
                                  row_map: Sequence[int],
                                  col_map: Sequence[int],
                                  sym_map: Sequence[int],
                                  shape: int) -> list[list[list[int]]]:
    """Merge an all-singleton outline along 1-based index maps."""
    cells: list[list[list[int]]] = [[[] for _ in range(shape)]
                                    for _ in range(shape)]
    raw = outline.cells
    n = len(raw)
    for i in range(n):
        ri = row_map[i + 1] - 1
        row = raw[i]
        for j in range(n):
            cells[ri][col_map[j + 1] - 1].append(sym_map[row[j][0]])
    return cells


def odd_r_outline(partition: Partition) -> OutlineRectangle:
    """Outline square for (h,h,h,h4..hk) with odd tail sum.

    Diagonal cells carry h_i^2 copies of their own symbol, and the leading
    3 x 3 corner is the symmetric pattern with h^2 copies of 3, 2, 1 on the
    cells (1,2)/(2,1), (1,3)/(3,1), (2,3)/(3,2) respectively, so both
    orientations offer beta = h^2 to a later blow-up.
    """
    parts = partition.parts
    if len(parts) < 4:
        raise PreconditionError("need three equal leading parts and a tail")
    h = parts[0]
    if not (parts[0] == parts[1] == parts[2]):
        raise PreconditionError("first three parts must be equal")
    tail = parts[3:]
    if any(a < b for a, b in zip(tail, tail[1:])):
        raise PreconditionError("tail must be non-increasing")
    r = sum(tail)
    h4 = tail[0]
    if r % 2 == 0:
        raise PreconditionError(f"tail sum r = {r} must be odd")
    if 4 * h4 > r + 1:
        raise PreconditionError(f"h4 = {h4} exceeds (r+1)/4")
    if not 2 * h4 <= 3 * h <= r + 1 - 2 * h4:
        raise PreconditionError(
            f"3*h1 = {3 * h} outside [2*h4, r+1-2*h4] = "
            f"[{2 * h4}, {r + 1 - 2 * h4}]")

    circ, _ = build_circulant_outline(Partition((3 * h,) + tail))
    n = partition.n
    k = partition.k
    # Index maps: contiguous h-groups over [3h], tail blocks unchanged.
    row_map = [0] * (n + 1)
    for x in range(1, 3 * h + 1):
        row_map[x] = (x - 1) // h + 1
    pos = 3 * h
    for i in range(4, k + 1):
        for _ in range(parts[i - 1]):
            pos += 1
            row_map[pos] = i
    sym_map = [0] * (3 * h + k - 2 + 1)
    for v in range(1, 3 * h + 1):
        sym_map[v] = (v - 1) // h + 1
    for i in range(2, k - 1):
        sym_map[3 * h + i - 1] = i + 2
    cells = _amalgamate_singleton_outline(circ, row_map, row_map, sym_map, k)

    hh = h * h
    corner = {(1, 1): 1, (2, 2): 2, (3, 3): 3,
              (1, 2): 3, (2, 1): 3, (1, 3): 2, (3, 1): 2, (2, 3): 1,
              (3, 2): 1}
    for (i, j), sym in corner.items():
        cells[i - 1][j - 1] = [sym] * hh

    outline = OutlineRectangle(partition, partition, partition, cells)
    bad = validate_outline(outline)
    if bad:
        raise InternalError(f"odd-r outline invalid: {bad[0]}")
    for i in range(1, k + 1):
        hi = partition.part(i)
        if outline.cell(i, i) != (i,) * (hi * hi):
            raise InternalError(f"odd-r diagonal cell ({i},{i}) wrong")
    return outline


def even_r_outline(partition: Partition, debug: bool = False,
                   ) -> tuple[OutlineRectangle, int, int]:
    """Outline square for (h,h,h,h4..hk) with even tail sum, plus betas.

    One cyclic orientation of the corner carries exactly h^2 spare copies
    (beta1); the other offers at least h(h-1) - 2(hk - 1) after two trades
    route the final block's stray symbols through it (actual count returned
    as beta2).  With ``debug`` the intermediate array is re-validated before
    and after the trade batch.
    """
    parts = partition.parts
    if len(parts) < 4:
        raise PreconditionError("need three equal leading parts and a tail")
    h = parts[0]
    k = len(parts)
    tail = parts[3:]
    hk = parts[-1]
    r = sum(tail)
    h4 = tail[0]
    if not (parts[0] == parts[1] == parts[2]):
        raise PreconditionError("first three parts must be equal")
    if h < 2:
        raise PreconditionError("leading part must be at least 2")
    if any(a < b for a, b in zip(tail, tail[1:])):
        raise PreconditionError("tail must be non-increasing")
    if r % 2 == 1:
        raise PreconditionError(f"tail sum r = {r} must be even")
    if 4 * h4 > r - 2:
        raise PreconditionError(f"h4 = {h4} exceeds (r-2)/4")
    if not 2 * h4 + 2 <= 3 * h + 1 <= r + 1 - 2 * h4:
        raise PreconditionError(
            f"3*h1+1 = {3 * h + 1} outside [2*h4+2, r+1-2*h4]")
    if h * (h - 1) < 2 * (hk - 1):
        raise PreconditionError(
            f"h1(h1-1) = {h * (h - 1)} below 2(hk-1) = {2 * (hk - 1)}")

    circ_tail = list(tail[:-1])
    if hk >= 2:
        circ_tail.append(hk - 1)
    if not circ_tail:
        raise PreconditionError("tail too short for the even construction")
    circ, triple_sets = build_circulant_outline(
        Partition([3 * h + 1] + circ_tail))
    if len(triple_sets) < 2:
        raise InternalError("even construction needs two free differences")
    n = partition.n
    R = r + 3  # the extra row/column carrying the widowed subsquare line
    shift = 3 * h - 2

    # Row groups over [3h]: 1 and 2 anchor the first two groups (their lines
    # carry the triple structure), then the 2<->3 row, 1<->3 column and
    # 1<->2 symbol swaps.
    s_sets = ([1] + list(range(4, h + 3)),
              [2] + list(range(h + 3, 2 * h + 2)),
              [3] + list(range(2 * h + 2, 3 * h + 1)))
    row_group = {}
    for g, members in zip((1, 3, 2), s_sets):
        for x in members:
            row_group[x] = g
    col_group = {}
    for g, members in zip((3, 2, 1), s_sets):
        for x in members:
            col_group[x] = g
    sym_group = {}
    for g, members in zip((2, 1, 3), s_sets):
        for x in members:
            sym_group[x] = g

    def row_final(x: int) -> int:
        if x <= 3 * h:
            return row_group[x]
        return R if x == 3 * h + 1 else x - shift

    def col_final(x: int) -> int:
        if x <= 3 * h:
            return col_group[x]
        return R if x == 3 * h + 1 else x - shift

    def sym_final(v: int) -> int:
        if v <= 3 * h:
            return sym_group[v]
        return k if v == 3 * h + 1 else v - shift

    cells: list[list[list[int]]] = [[[] for _ in range(R)] for _ in range(R)]
    raw = circ.cells
    for i in range(1, n + 1):
        ri = row_final(i) - 1
        row = raw[i - 1]
        for j in range(1, n + 1):
            cells[ri][col_final(j) - 1].append(sym_final(row[j - 1][0]))

    corner_idx = (1, 2, 3, R)
    for i in corner_idx:
        for j in corner_idx:
            if any(s not in (1, 2, 3, k) for s in cells[i - 1][j - 1]):
                raise InternalError(
                    f"corner cell ({i},{j}) holds a non-corner symbol")
    hh1 = h * (h - 1)
    substitution = {
        (1, 1): [1] * (h * h), (1, 2): [3] * (h * h),
        (1, 3): [2] * hh1 + [k] * h, (1, R): [2] * h,
        (2, 1): [3] * hh1 + [k] * h, (2, 2): [2] * (h * h),
        (2, 3): [1] * (h * h), (2, R): [3] * h,
        (3, 1): [2] * (h * h), (3, 2): [1] * hh1 + [k] * h,
        (3, 3): [3] * (h * h), (3, R): [1] * h,
        (R, 1): [3] * h, (R, 2): [1] * h, (R, 3): [2] * h, (R, R): [k],
    }
    for (i, j), content in substitution.items():
        cells[i - 1][j - 1] = list(content)

    t1 = [(x - shift, y - shift, sym_final(z))
          for x, y, z in triple_sets[0].triples]
    t2 = [(x - shift, y - shift, sym_final(z))
          for x, y, z in triple_sets[1].triples]
    for x, y, z in t1:
        if cells[x - 1][y - 1] != [2]:
            raise InternalError(f"first triple cell ({x},{y}) is not {{2}}")
        if z not in cells[0][y - 1] or z not in cells[x - 1][2]:
            raise InternalError("first triple lines lost their symbol")
    for x, y, z in t2:
        if cells[x - 1][y - 1] != [1]:
            raise InternalError(f"second triple cell ({x},{y}) is not {{1}}")
        if z not in cells[x - 1][1] or z not in cells[2][y - 1]:
            raise InternalError("second triple lines lost their symbol")

    delta: dict[tuple[int, int], Counter] = defaultdict(Counter)

    def move(rr: int, cc: int, remove: int, add: int) -> None:
        delta[(rr, cc)][remove] -= 1
        delta[(rr, cc)][add] += 1

    block_k_lines = set(range(r - hk + 4, r + 3))  # proper lines of the block

    def trade(triples: list[tuple[int, int, int]], transposed: bool) -> int:
        """One repair trade; returns the size of the cover used."""

        def cell_at(rr: int, cc: int) -> list[int]:
            return cells[cc - 1][rr - 1] if transposed else cells[rr - 1][cc - 1]

        def mv(rr: int, cc: int, remove: int, add: int) -> None:
            if transposed:
                move(cc, rr, remove, add)
            else:
                move(rr, cc, remove, add)

        # First trade: row 1, column 3, symbol 2.  Mirrored trade: row 3,
        # column 2, symbol 1, with every cell transposed; mv() undoes the
        # transposition, so home/start are given in working coordinates.
        filler = 1 if transposed else 2
        home_line = 3
        start_line = 2 if transposed else 1
        if transposed:
            trips = [(y, x, z) for x, y, z in triples]
        else:
            trips = list(triples)
        a_cols = [R - i for i in range(1, hk)]
        b_cols = [c for c in range(4, r + 3)
                  if cell_at(R, c) == [k]]
        if len(b_cols) != hk - 1:
            raise InternalError(
                f"expected {hk - 1} stray block symbols on the widowed line, "
                f"found {len(b_cols)}")
        c_rows = []
        d_syms = []
        for a in a_cols:
            inner = [x for x in range(4, r + 3)
                     if x not in block_k_lines and cell_at(x, a) == [k]]
            if len(inner) != 1 or inner[0] > r + 3 - hk:
                raise InternalError("stray block symbol not unique in line")
            c_rows.append(inner[0])
            dcell = cell_at(R, a)
            if len(dcell) != 1 or dcell[0] < 4 or dcell[0] == k:
                raise InternalError(f"unexpected widowed-line cell at {a}")
            d_syms.append(dcell[0])

        by_col = {y: (x, y, z) for x, y, z in trips}
        by_row = {x: (x, y, z) for x, y, z in trips}
        if len(by_col) != len(trips) or len(by_row) != len(trips):
            raise InternalError("triple coordinates are not transversal")
        cover: list[tuple[int, int, int]] = []
        in_cover: set[tuple[int, int, int]] = set()

        def take(tr: tuple[int, int, int]) -> None:
            if tr not in in_cover:
                in_cover.add(tr)
                cover.append(tr)

        for col in a_cols + b_cols:
            take(by_col[col])
        for row in c_rows:
            take(by_row[row])
        need = Counter(d_syms)
        need.subtract(Counter(z for _, _, z in cover))
        for tr in trips:
            if all(cnt <= 0 for cnt in need.values()):
                break
            if need[tr[2]] > 0 and tr not in in_cover:
                take(tr)
                need[tr[2]] -= 1
        if any(cnt > 0 for cnt in need.values()):
            raise InternalError("cover cannot supply the displaced symbols")
        u = len(cover)
        if u > 4 * (hk - 1):
            raise InternalError(f"cover size {u} exceeds 4(hk-1)")

        for x, y, z in cover:
            mv(x, y, filler, z)
            mv(x, home_line, z, filler)
            mv(start_line, y, z, filler)
        for a, c, d in zip(a_cols, c_rows, d_syms):
            mv(R, a, d, k)
            mv(c, home_line, filler, k)
            mv(c, a, k, filler)
            mv(start_line, a, filler, d)
        for b in b_cols:
            mv(R, b, k, filler)
            mv(start_line, b, filler, k)
        key = (home_line, R) if transposed else (R, home_line)
        delta[key][filler] -= hk - 1
        for d in d_syms:
            delta[key][d] += 1
        key = (home_line, start_line) if transposed else (start_line, home_line)
        delta[key][filler] += -u + 2 * (hk - 1)
        for _, _, z in cover:
            delta[key][z] += 1
        for d in d_syms:
            delta[key][d] -= 1
        delta[key][k] -= hk - 1
        return u

    def probe_intermediate(stage: str) -> None:
        mid = Partition((h, h, h) + (1,) * r)
        bad_mid = validate_outline(
            OutlineRectangle(mid, mid, partition, cells))
        if bad_mid:
            raise InternalError(f"even-r {stage} state invalid: {bad_mid[0]}")

    if debug:
        probe_intermediate("pre-trade")
    if hk >= 2:
        trade(t1, transposed=False)
        trade(t2, transposed=True)

    for (rr, cc), change in delta.items():
        if sum(change.values()) != 0:
            raise InternalError(f"trade changes cell ({rr},{cc}) size")
        bag = Counter(cells[rr - 1][cc - 1])
        bag.update(change)
        if any(cnt < 0 for cnt in bag.values()):
            missing = min(s for s, cnt in bag.items() if cnt < 0)
            raise InternalError(
                f"trade removes symbol {missing} from cell ({rr},{cc}) more "
                "often than it occurs")
        cells[rr - 1][cc - 1] = sorted(bag.elements())
    if debug:
        probe_intermediate("post-trade")

    # Final row and column amalgamation to the target partition.
    line_map = [0] * (R + 1)
    for x in (1, 2, 3):
        line_map[x] = x
    pos = 3
    for i in range(4, k + 1):
        width = parts[i - 1] - (1 if i == k else 0)
        for _ in range(width):
            pos += 1
            line_map[pos] = i
    line_map[R] = k
    final: list[list[list[int]]] = [[[] for _ in range(k)] for _ in range(k)]
    for i in range(1, R + 1):
        fi = line_map[i] - 1
        for j in range(1, R + 1):
            final[fi][line_map[j] - 1].extend(cells[i - 1][j - 1])

    outline = OutlineRectangle(partition, partition, partition, final)
    bad = validate_outline(outline)
    if bad:
        raise InternalError(f"even-r outline invalid: {bad[0]}")
    for i in range(1, k + 1):
        hi = partition.part(i)
        if outline.cell(i, i) != (i,) * (hi * hi):
            raise InternalError(f"even-r diagonal cell ({i},{i}) wrong")
    for sym, (i, j) in ((1, (2, 3)), (2, (3, 1)), (3, (1, 2))):
        if outline.cell(i, j) != (sym,) * (h * h):
            raise InternalError(f"even-r corner cell ({i},{j}) wrong")
    beta1 = h * h
    beta2 = min(outline.cell(1, 3).count(2), outline.cell(2, 1).count(3),
                outline.cell(3, 2).count(1))
    if beta2 < h * (h - 1) - 2 * (hk - 1):
        raise InternalError("even-r beta2 fell below its guarantee")
    return outline, beta1, beta2
