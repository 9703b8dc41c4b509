"""Lifting outline rectangles back into latin squares.

A reduction of a latin square modulo (P, Q, R) is an outline rectangle, and
every outline rectangle arises this way.  The classical existence statement
gives no algorithm, so this module supplies one: repeatedly split one row
(then one column, then one symbol) off an amalgamated class, where each split
is an exact-degree subgraph extraction on a bipartite multigraph, solved as a
feasible-flow problem.  On a valid outline rectangle no extraction can fail;
any infeasibility is an internal invariant violation.

Splits are performed in a fixed order (rows, then columns, then symbols,
lowest index first, one unit at a time) with a deterministic flow solver, so
lifting is a pure function of its input.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Sequence

from .core import (
    InternalError,
    LatinSquare,
    OutlineRectangle,
    Partition,
    PreconditionError,
    SubsquareCertificate,
    RealizationError,
    multiset,
    reduce as core_reduce,
    validate_outline,
    verify_realization,
)


class ExtractionInfeasible(InternalError):
    """No sub-multigraph meets the degree targets.

    ``left_set`` is a set of left vertices (1-based) whose demand exceeds the
    capacity of the edges leaving it, witnessing a violated cut.
    """

    def __init__(self, message: str, left_set: frozenset[int],
                 right_set: frozenset[int]):
        super().__init__(message)
        self.left_set = left_set
        self.right_set = right_set


@dataclass(frozen=True)
class BipartiteMultigraph:
    """Edge multiplicities between two vertex classes (1-based indices)."""

    left_count: int
    right_count: int
    multiplicities: tuple[tuple[int, ...], ...]

    def __init__(self, multiplicities: Sequence[Sequence[int]],
                 right_count: int | None = None):
        left = len(multiplicities)
        right = right_count if right_count is not None else (
            len(multiplicities[0]) if left else 0)
        if any(len(row) != right for row in multiplicities):
            raise PreconditionError("ragged multiplicity matrix")
        if any(m < 0 for row in multiplicities for m in row):
            raise PreconditionError("multiplicities must be non-negative")
        object.__setattr__(self, "left_count", left)
        object.__setattr__(self, "right_count", right)
        object.__setattr__(self, "multiplicities",
                           tuple(tuple(int(m) for m in row)
                                 for row in multiplicities))

    def left_degree(self, i: int) -> int:
        return sum(self.multiplicities[i - 1])

    def right_degree(self, j: int) -> int:
        return sum(row[j - 1] for row in self.multiplicities)

    def multiplicity(self, i: int, j: int) -> int:
        return self.multiplicities[i - 1][j - 1]


# ---------------------------------------------------------------------------
# Max flow (Dinic, deterministic adjacency order)


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, capacity: int) -> int:
        e = len(self.to)
        self.adj[u].append(e)
        self.to.append(v)
        self.cap.append(capacity)
        self.adj[v].append(e + 1)
        self.to.append(u)
        self.cap.append(0)
        return e

    def max_flow(self, s: int, t: int) -> int:
        to, cap, adj = self.to, self.cap, self.adj
        total = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                lu = level[u] + 1
                for e in adj[u]:
                    v = to[e]
                    if cap[e] > 0 and level[v] < 0:
                        level[v] = lu
                        queue.append(v)
            if level[t] < 0:
                return total
            it = [0] * self.n
            nodes = [s]
            edges: list[int] = []
            while nodes:
                u = nodes[-1]
                if u == t:
                    aug = min(cap[e] for e in edges)
                    total += aug
                    retreat = 0
                    for idx, e in enumerate(edges):
                        cap[e] -= aug
                        cap[e ^ 1] += aug
                        if cap[e] == 0 and retreat == 0:
                            retreat = idx + 1
                    del edges[retreat - 1:]
                    del nodes[retreat:]
                    continue
                advanced = False
                lu = level[u] + 1
                row = adj[u]
                while it[u] < len(row):
                    e = row[it[u]]
                    v = to[e]
                    if cap[e] > 0 and level[v] == lu:
                        nodes.append(v)
                        edges.append(e)
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    level[u] = -1
                    nodes.pop()
                    if edges:
                        edges.pop()

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if self.cap[e] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _solve_extraction(mult_rows: Sequence[dict[int, int]], left_targets:
                      Sequence[int], right_targets: Sequence[int],
                      ) -> list[dict[int, int]]:
    """Exact-degree extraction on sparse multiplicity rows.

    ``mult_rows[i]`` maps right vertex (0-based) to multiplicity.  Returns
    rows of the extracted sub-multigraph in the same shape, or raises
    :class:`ExtractionInfeasible` with a violated cut.
    """
    nl, nr = len(left_targets), len(right_targets)
    need = sum(left_targets)
    if need != sum(right_targets):
        raise PreconditionError(
            f"target sums differ: {need} vs {sum(right_targets)}")
    if need == 0:
        return [dict() for _ in range(nl)]

    # Unit case: all targets 1 and multiplicities 1 is a perfect b-matching
    # solved much faster by greedy plus augmentation.
    if (all(t == 1 for t in left_targets) and
            all(all(m == 1 for m in row.values()) for row in mult_rows)):
        return _solve_unit_matching(mult_rows, right_targets)

    source = nl + nr
    sink = source + 1
    net = _Dinic(sink + 1)
    for i, t in enumerate(left_targets):
        net.add_edge(source, i, t)
    mid_edges: list[list[tuple[int, int]]] = []
    for i, row in enumerate(mult_rows):
        here = []
        for j in sorted(row):
            m = row[j]
            if m > 0:
                here.append((j, net.add_edge(i, nl + j, m)))
        mid_edges.append(here)
    for j, t in enumerate(right_targets):
        net.add_edge(nl + j, sink, t)
    flow = net.max_flow(source, sink)
    if flow != need:
        reach = net.reachable(source)
        left_set = frozenset(i + 1 for i in range(nl) if i in reach)
        right_set = frozenset(j + 1 for j in range(nr) if nl + j in reach)
        raise ExtractionInfeasible(
            f"degree targets infeasible: flow {flow} < demand {need}; "
            f"violated cut isolates left vertices {sorted(left_set)}",
            left_set, right_set)
    out: list[dict[int, int]] = []
    for i, here in enumerate(mid_edges):
        taken = {}
        for j, e in here:
            used = mult_rows[i][j] - net.cap[e]
            if used:
                taken[j] = used
        out.append(taken)
    return out


def _solve_unit_matching(mult_rows: Sequence[dict[int, int]],
                         right_targets: Sequence[int]) -> list[dict[int, int]]:
    """Perfect b-matching with unit left demands: greedy then augmenting paths."""
    nl = len(mult_rows)
    adj = [sorted(row) for row in mult_rows]
    right_load = [0] * len(right_targets)
    match_left = [-1] * nl
    for i in range(nl):
        for j in adj[i]:
            if right_load[j] < right_targets[j]:
                match_left[i] = j
                right_load[j] += 1
                break
    for i in range(nl):
        if match_left[i] >= 0:
            continue
        # BFS over alternating paths: left -> unsaturated right, or steal a
        # right slot from another left vertex and re-place that one.
        parent_left: dict[int, tuple[int, int]] = {}
        owners: dict[int, list[int]] = {}
        for x in range(nl):
            if match_left[x] >= 0:
                owners.setdefault(match_left[x], []).append(x)
        seen_right: set[int] = set()
        queue = deque([i])
        end = None
        while queue and end is None:
            x = queue.popleft()
            for j in adj[x]:
                if j in seen_right:
                    continue
                seen_right.add(j)
                if right_load[j] < right_targets[j]:
                    end = (x, j)
                    break
                for y in owners.get(j, ()):
                    if y not in parent_left:
                        parent_left[y] = (x, j)
                        queue.append(y)
        if end is None:
            reach_left = frozenset(
                x + 1 for x in range(nl)
                if x == i or x in parent_left)
            raise ExtractionInfeasible(
                "degree targets infeasible: no augmenting path from left "
                f"vertex {i + 1}", reach_left, frozenset(seen_right))
        x, j = end
        right_load[j] += 1
        while True:
            match_left[x] = j
            if x == i:
                break
            # the predecessor takes over the slot x just released
            x, j = parent_left[x]
    out: list[dict[int, int]] = [{match_left[i]: 1} for i in range(nl)]
    return out


def extract_exact_degree_subgraph(graph: BipartiteMultigraph,
                                  left_targets: Sequence[int],
                                  right_targets: Sequence[int],
                                  ) -> BipartiteMultigraph:
    """A sub-multigraph with exactly the target degree at every vertex.

    Raises :class:`PreconditionError` when the targets are malformed
    (mismatched sums, or exceeding current degrees) and
    :class:`ExtractionInfeasible` when no such subgraph exists.
    """
    if len(left_targets) != graph.left_count:
        raise PreconditionError("left target length mismatch")
    if len(right_targets) != graph.right_count:
        raise PreconditionError("right target length mismatch")
    for i, t in enumerate(left_targets, start=1):
        if t < 0 or t > graph.left_degree(i):
            raise PreconditionError(
                f"left target {t} outside 0..degree({i})")
    for j, t in enumerate(right_targets, start=1):
        if t < 0 or t > graph.right_degree(j):
            raise PreconditionError(
                f"right target {t} outside 0..degree({j})")
    rows = [
        {j: m for j, m in enumerate(row) if m > 0}
        for row in graph.multiplicities
    ]
    taken = _solve_extraction(rows, list(left_targets), list(right_targets))
    mult = [[taken[i].get(j, 0) for j in range(graph.right_count)]
            for i in range(graph.left_count)]
    return BipartiteMultigraph(mult, graph.right_count)


# ---------------------------------------------------------------------------
# Splits on outline rectangles


def _row_extraction(row_cells: Sequence[Sequence[int]], a: int,
                    col_parts: Sequence[int], sym_parts: Sequence[int],
                    ) -> tuple[list[list[int]], list[list[int]]]:
    """Split ``a`` units off one row-class; returns (unit cells, rest cells)."""
    t = len(sym_parts)
    rows = []
    for cell in row_cells:
        counts: dict[int, int] = {}
        for s in cell:
            counts[s - 1] = counts.get(s - 1, 0) + 1
        rows.append(counts)
    left_targets = [a * q for q in col_parts]
    right_targets = [a * r for r in sym_parts]
    taken = _solve_extraction(rows, left_targets, right_targets)
    new_cells: list[list[int]] = []
    rest_cells: list[list[int]] = []
    for cell, got in zip(row_cells, taken):
        picked: list[int] = []
        for j, m in sorted(got.items()):
            picked.extend([j + 1] * m)
        remaining = Counter(cell)
        for s in picked:
            remaining[s] -= 1
        rest = []
        for s in sorted(remaining):
            rest.extend([s] * remaining[s])
        new_cells.append(picked)
        rest_cells.append(rest)
    return new_cells, rest_cells


def split_row(outline: OutlineRectangle, i: int, a: int) -> OutlineRectangle:
    """Refine row class i into classes of sizes (a, p_i - a)."""
    P = outline.row_partition
    if not 1 <= i <= P.k:
        raise PreconditionError(f"row index {i} outside [{P.k}]")
    p = P.part(i)
    if p < 2:
        raise PreconditionError(f"row {i} has part 1, nothing to split")
    if not 1 <= a < p:
        raise PreconditionError(f"need 1 <= a < {p}, got {a}")
    unit, rest = _row_extraction(
        outline.cells[i - 1], a, outline.col_partition.parts,
        outline.sym_partition.parts)
    new_parts = P.parts[: i - 1] + (a, p - a) + P.parts[i:]
    new_cells = (list(outline.cells[: i - 1]) + [unit, rest]
                 + list(outline.cells[i:]))
    return OutlineRectangle(Partition(new_parts), outline.col_partition,
                            outline.sym_partition, new_cells)


def split_column(outline: OutlineRectangle, j: int, a: int) -> OutlineRectangle:
    """Refine column class j; implemented by transposing the row split."""
    return split_row(outline.transpose(), j, a).transpose()


def split_symbol(outline: OutlineRectangle, l: int, a: int) -> OutlineRectangle:
    """Refine symbol class l into classes (a, r_l - a).

    Requires every row and column class to be a singleton, so the cells
    holding l form an r_l-regular bipartite graph on rows x columns; an
    a-regular subgraph is extracted and relabelled as the new symbol l, with
    the remainder shifted to l + 1.
    """
    R = outline.sym_partition
    if any(p != 1 for p in outline.row_partition.parts) or \
            any(q != 1 for q in outline.col_partition.parts):
        raise PreconditionError("symbol splits need singleton rows and columns")
    if not 1 <= l <= R.k:
        raise PreconditionError(f"symbol index {l} outside [{R.k}]")
    r = R.part(l)
    if r < 2:
        raise PreconditionError(f"symbol {l} has part 1, nothing to split")
    if not 1 <= a < r:
        raise PreconditionError(f"need 1 <= a < {r}, got {a}")
    n = outline.row_partition.k
    rows = [{j for j in range(n) if outline.cells[i][j] and
             outline.cells[i][j][0] == l} for i in range(n)]
    mult = [{j: 1 for j in sorted(cols)} for cols in rows]
    taken = _solve_extraction(mult, [a] * n, [a] * n)
    new_cells = []
    for i in range(n):
        got = taken[i]
        row_out = []
        for j in range(n):
            s = outline.cells[i][j][0]
            if s > l:
                row_out.append((s + 1,))
            elif s == l and got.get(j, 0) == 0:
                row_out.append((l + 1,))
            else:
                row_out.append((s,))
        new_cells.append(row_out)
    new_parts = R.parts[: l - 1] + (a, r - a) + R.parts[l:]
    return OutlineRectangle(outline.row_partition, outline.col_partition,
                            Partition(new_parts), new_cells)


# ---------------------------------------------------------------------------
# Full lift


class _LiftState:
    """Mutable working copy: cells as symbol lists with multiplicity."""

    __slots__ = ("row_parts", "col_parts", "sym_parts", "cells")

    def __init__(self, outline: OutlineRectangle):
        self.row_parts = list(outline.row_partition.parts)
        self.col_parts = list(outline.col_partition.parts)
        self.sym_parts = list(outline.sym_partition.parts)
        self.cells = [[list(c) for c in row] for row in outline.cells]

    def transpose(self) -> None:
        self.row_parts, self.col_parts = self.col_parts, self.row_parts
        self.cells = [list(col) for col in zip(*self.cells)]


def _split_rows_to_units(state: _LiftState) -> None:
    i = 0
    while i < len(state.row_parts):
        while state.row_parts[i] > 1:
            unit, rest = _row_extraction(
                state.cells[i], 1, state.col_parts, state.sym_parts)
            state.cells[i] = unit
            state.cells.insert(i + 1, rest)
            state.row_parts[i : i + 1] = [1, state.row_parts[i] - 1]
            i += 1
        i += 1


def _perfect_matching(adj: list[list[int]], n: int) -> list[int]:
    """One perfect matching of a regular bipartite graph, rows to columns."""
    match_row = [-1] * n
    match_col = [-1] * n
    for i in range(n):
        for j in adj[i]:
            if match_col[j] < 0:
                match_row[i] = j
                match_col[j] = i
                break
    for i in range(n):
        if match_row[i] >= 0:
            continue
        parent: dict[int, tuple[int, int]] = {}
        seen = [False] * n
        queue = deque([i])
        free_col = -1
        last_row = -1
        while queue and free_col < 0:
            x = queue.popleft()
            for j in adj[x]:
                if seen[j]:
                    continue
                seen[j] = True
                y = match_col[j]
                if y < 0:
                    free_col = j
                    last_row = x
                    break
                parent[y] = (x, j)
                queue.append(y)
        if free_col < 0:
            raise InternalError(
                "no perfect matching in a regular bipartite graph; the "
                "outline being lifted is corrupt")
        x, j = last_row, free_col
        while True:
            prev = match_row[x]
            match_row[x] = j
            match_col[j] = x
            if x == i:
                break
            x, j = parent[x]
    return match_row


def _split_symbols_to_units(labels: list[list[int]],
                            sym_parts: Sequence[int]) -> list[list[int]]:
    """Resolve each symbol class into final symbols via matchings."""
    n = len(labels)
    start = [0]
    for r in sym_parts:
        start.append(start[-1] + r)
    grid = [[0] * n for _ in range(n)]
    for l, r in enumerate(sym_parts, start=1):
        adj: list[list[int]] = [[] for _ in range(n)]
        row = labels
        for i in range(n):
            ri = row[i]
            adj[i] = [j for j in range(n) if ri[j] == l]
        base = start[l - 1]
        for sub in range(1, r):
            match = _perfect_matching(adj, n)
            sym = base + sub
            for i in range(n):
                j = match[i]
                grid[i][j] = sym
                adj[i].remove(j)
        for i in range(n):
            if len(adj[i]) != 1:
                raise InternalError("symbol class did not resolve to a "
                                    "transversal")
            grid[i][adj[i][0]] = base + r
    return grid


def lift(outline: OutlineRectangle) -> LatinSquare:
    """A latin square whose reduction modulo (P, Q, R) is ``outline``.

    Splits all rows to singletons, then all columns (by transposing), then
    all symbols.  The result is deterministic, and the round trip is exact:
    the output's reduction equals the input cellwise.
    """
    bad = validate_outline(outline)
    if bad:
        raise PreconditionError(f"not an outline rectangle: {bad[0]}")
    state = _LiftState(outline)
    _split_rows_to_units(state)
    state.transpose()
    _split_rows_to_units(state)
    state.transpose()
    labels = [[cell[0] for cell in row] for row in state.cells]
    grid = _split_symbols_to_units(labels, state.sym_parts)
    square = LatinSquare(grid)
    check = core_reduce(square, outline.row_partition, outline.col_partition,
                        outline.sym_partition)
    if check.cells != outline.cells:
        raise InternalError("lift round trip failed to reproduce the outline")
    return square


def lift_to_realization(outline: OutlineRectangle, partition: Partition,
                        ) -> tuple[LatinSquare, SubsquareCertificate]:
    """Lift an outline square with diagonal cells h_i^2 {i} to a realization.

    The diagonal condition forces every symbol-class-i occurrence in row
    class i into the diagonal cell, so the lifted square carries block i as a
    subsquare on rows, columns and symbols P[i]; the certificate is returned
    alongside and re-verified.
    """
    if (outline.row_partition != partition or
            outline.col_partition != partition or
            outline.sym_partition != partition):
        raise PreconditionError(
            "outline is not an outline square for the requested partition")
    for i in range(1, partition.k + 1):
        h = partition.part(i)
        expected = multiset([i] * (h * h))
        if outline.cell(i, i) != expected:
            raise RealizationError(
                f"diagonal cell ({i},{i}) must hold {h * h} copies of symbol "
                f"{i}", block=i, cell=(i, i))
    square = lift(outline)
    certificate = verify_realization(square, partition, normal_form=True)
    return square, certificate
