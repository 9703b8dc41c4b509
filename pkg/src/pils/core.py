"""Core types and checks for latin squares with prescribed disjoint subsquares.

A realization of an integer partition (h1 >= h2 >= ... >= hk) is a latin
square of order n = sum(hi) carrying pairwise disjoint subsquares of orders
h1, ..., hk.  This module holds the value types shared by the whole package
(partitions, squares, outline rectangles, frequency arrays, certificates),
the verification routines for them, the reduction (amalgamation) of a square
modulo a partition triple, and the existence predicate assembled from the
known characterizations.

Conventions: rows, columns and symbols are 1-based everywhere in the public
API.  Cell multisets are stored as sorted tuples of symbols with repetition;
dense count vectors are available through accessors.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal, Sequence


class PartitionError(ValueError):
    """Raised for malformed partitions (non-positive parts, bad sums)."""


class GridError(ValueError):
    """Raised for malformed grid input: not square, or symbols out of range."""


class PreconditionError(ValueError):
    """Raised when an operation's stated precondition does not hold."""


class RealizationError(ValueError):
    """Raised when a square fails a realization check.

    Attributes carry the first offending location so callers can report it:
    ``block`` is the 1-based block index (or None for latinness failures) and
    ``cell`` the offending (row, column) pair when one exists.
    """

    def __init__(self, message: str, *, block: int | None = None,
                 cell: tuple[int, int] | None = None):
        super().__init__(message)
        self.block = block
        self.cell = cell


class InternalError(RuntimeError):
    """A construction violated an invariant its theory guarantees.

    Any occurrence is a bug in this package (or a genuine gap in the
    underlying construction), never a user error.
    """


# ---------------------------------------------------------------------------
# Partitions


@dataclass(frozen=True)
class Partition:
    """An ordered list of positive parts.

    The raw constructor preserves the given order; reductions are order
    sensitive, e.g. the row partition (1,1,1,2,2,1,1) of a 9x9 square.  Use
    :meth:`sorted` for the usual non-increasing normal form.
    """

    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int]):
        parts = tuple(int(p) for p in parts)
        if any(p < 1 for p in parts):
            raise PartitionError(f"parts must be positive, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def sorted(cls, parts: Iterable[int]) -> "Partition":
        return cls(sorted(parts, reverse=True))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """Size of part i (1-based)."""
        return self.parts[i - 1]

    def block(self, i: int) -> range:
        """The 1-based index range covered by part i.

        Part i covers the h_i consecutive indices following the first
        i-1 parts, so the blocks partition [n].
        """
        lo = sum(self.parts[: i - 1])
        return range(lo + 1, lo + self.parts[i - 1] + 1)

    def block_of(self, x: int) -> int:
        """The 1-based part index whose block contains x."""
        if not 1 <= x <= self.n:
            raise PartitionError(f"{x} outside [{self.n}]")
        acc = 0
        for i, p in enumerate(self.parts, start=1):
            acc += p
            if x <= acc:
                return i
        raise AssertionError("unreachable")

    def is_non_increasing(self) -> bool:
        return all(a >= b for a, b in zip(self.parts, self.parts[1:]))

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


def _block_starts(parts: Sequence[int]) -> list[int]:
    starts = [0]
    for p in parts:
        starts.append(starts[-1] + p)
    return starts


def _group_map(parts: Sequence[int]) -> list[int]:
    """0-based lookup: value x-1 -> 1-based group index under the partition."""
    out = []
    for g, p in enumerate(parts, start=1):
        out.extend([g] * p)
    return out


# ---------------------------------------------------------------------------
# Latin squares


def is_latin(grid: Sequence[Sequence[int]]) -> bool:
    """Whether each symbol of [n] occurs exactly once per row and column.

    Malformed input (non-square shape, entries outside [n]) raises
    :class:`GridError` rather than returning False.
    """
    n = len(grid)
    if n == 0:
        raise GridError("empty grid")
    full = frozenset(range(1, n + 1))
    for r, row in enumerate(grid, start=1):
        if len(row) != n:
            raise GridError(f"row {r} has length {len(row)}, expected {n}")
        for c, v in enumerate(row, start=1):
            if not isinstance(v, int) or not 1 <= v <= n:
                raise GridError(f"cell ({r},{c}) holds {v!r}, expected 1..{n}")
    for row in grid:
        if set(row) != full:
            return False
    for c in range(n):
        if {row[c] for row in grid} != full:
            return False
    return True


@dataclass(frozen=True)
class LatinSquare:
    """An order-n latin square over symbols [n]."""

    order: int
    grid: tuple[tuple[int, ...], ...]

    def __init__(self, grid: Sequence[Sequence[int]]):
        if not is_latin(grid):
            raise GridError("grid is not a latin square")
        object.__setattr__(self, "order", len(grid))
        object.__setattr__(self, "grid", tuple(tuple(row) for row in grid))

    def cell(self, r: int, c: int) -> int:
        return self.grid[r - 1][c - 1]

    def transpose(self) -> "LatinSquare":
        return LatinSquare(list(zip(*self.grid)))

    def __str__(self) -> str:
        w = len(str(self.order))
        return "\n".join(" ".join(f"{v:>{w}}" for v in row) for row in self.grid)


@dataclass(frozen=True)
class SubsquareBlock:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    symbols: tuple[int, ...]


@dataclass(frozen=True)
class SubsquareCertificate:
    """Row, column and symbol sets witnessing pairwise disjoint subsquares."""

    blocks: tuple[SubsquareBlock, ...]

    @classmethod
    def diagonal(cls, partition: Partition) -> "SubsquareCertificate":
        """The normal-form certificate: block i on rows/cols/symbols P[i]."""
        blocks = tuple(
            SubsquareBlock(tuple(partition.block(i)), tuple(partition.block(i)),
                           tuple(partition.block(i)))
            for i in range(1, partition.k + 1))
        return cls(blocks)


def verify_subsquares(square: LatinSquare,
                      certificate: SubsquareCertificate) -> None:
    """Check that the certificate's blocks are pairwise disjoint subsquares.

    No coverage requirement: suitable for incomplete latin squares whose
    blocks need not partition the lines.  Raises :class:`RealizationError`
    naming the first offending block and cell.
    """
    seen_rows: set[int] = set()
    seen_cols: set[int] = set()
    seen_syms: set[int] = set()
    for i, blk in enumerate(certificate.blocks, start=1):
        h = len(blk.rows)
        if not len(blk.cols) == len(blk.symbols) == h:
            raise RealizationError(
                f"block {i} has sizes {h}x{len(blk.cols)} on "
                f"{len(blk.symbols)} symbols", block=i)
        for label, seen, vals in (("row", seen_rows, blk.rows),
                                  ("column", seen_cols, blk.cols),
                                  ("symbol", seen_syms, blk.symbols)):
            dup = seen.intersection(vals)
            if dup:
                raise RealizationError(
                    f"block {i} reuses {label} {min(dup)}", block=i)
            seen.update(vals)

        symset = set(blk.symbols)
        for r in blk.rows:
            row_syms = [square.cell(r, c) for c in blk.cols]
            for c, v in zip(blk.cols, row_syms):
                if v not in symset:
                    raise RealizationError(
                        f"block {i} is not a subsquare: cell ({r},{c}) holds "
                        f"{v}, outside its symbol set", block=i, cell=(r, c))
            if len(set(row_syms)) != h:
                raise RealizationError(
                    f"block {i} repeats a symbol in row {r}", block=i,
                    cell=(r, blk.cols[0]))
        for c in blk.cols:
            col_syms = {square.cell(r, c) for r in blk.rows}
            if len(col_syms) != h:
                raise RealizationError(
                    f"block {i} repeats a symbol in column {c}", block=i,
                    cell=(blk.rows[0], c))


def verify_realization(square: LatinSquare, partition: Partition,
                       normal_form: bool = True,
                       certificate: SubsquareCertificate | None = None,
                       ) -> SubsquareCertificate:
    """Check that ``square`` realizes ``partition`` and return the certificate.

    With ``normal_form`` the subsquares must sit on the main diagonal in part
    order, block i occupying rows, columns and symbols P[i].  Otherwise a
    caller-supplied certificate fixes the geometry and is checked as given.

    Raises :class:`RealizationError` naming the first offending block and
    cell on failure.
    """
    if partition.n != square.order:
        raise PreconditionError(
            f"partition sums to {partition.n}, square has order {square.order}")
    if normal_form:
        certificate = SubsquareCertificate.diagonal(partition)
    elif certificate is None:
        raise PreconditionError("certificate required when normal_form is unset")
    if len(certificate.blocks) != partition.k:
        raise RealizationError(
            f"certificate has {len(certificate.blocks)} blocks, partition has "
            f"{partition.k}")
    for i, blk in enumerate(certificate.blocks, start=1):
        h = partition.part(i)
        if not len(blk.rows) == len(blk.cols) == len(blk.symbols) == h:
            raise RealizationError(
                f"block {i} has sizes {len(blk.rows)}x{len(blk.cols)} on "
                f"{len(blk.symbols)} symbols, expected {h}", block=i)
    verify_subsquares(square, certificate)
    return certificate


# ---------------------------------------------------------------------------
# Outline rectangles

Multiset = tuple[int, ...]


def multiset(symbols: Iterable[int]) -> Multiset:
    return tuple(sorted(symbols))


def multiset_counts(cell: Multiset, t: int) -> list[int]:
    """Dense count vector over [t] for one cell."""
    out = [0] * t
    for s in cell:
        out[s - 1] += 1
    return out


@dataclass(frozen=True)
class OutlineRectangle:
    """A u x v array of symbol multisets tagged with partitions (P, Q, R).

    The defining conditions (checked by :func:`validate_outline`):

    * cell (i,j) holds p_i * q_j symbols;
    * symbol l occurs p_i * r_l times in row i;
    * symbol l occurs q_j * r_l times in column j.
    """

    row_partition: Partition
    col_partition: Partition
    sym_partition: Partition
    cells: tuple[tuple[Multiset, ...], ...]

    def __init__(self, row_partition: Partition, col_partition: Partition,
                 sym_partition: Partition,
                 cells: Sequence[Sequence[Iterable[int]]]):
        if row_partition.n != col_partition.n or row_partition.n != sym_partition.n:
            raise PartitionError(
                f"partition sums differ: {row_partition.n}, {col_partition.n}, "
                f"{sym_partition.n}")
        u, v = row_partition.k, col_partition.k
        if len(cells) != u or any(len(row) != v for row in cells):
            raise GridError(f"cell array is not {u}x{v}")
        frozen = tuple(tuple(multiset(c) for c in row) for row in cells)
        t = sym_partition.k
        for row in frozen:
            for c in row:
                if c and not (1 <= c[0] and c[-1] <= t):
                    raise GridError(f"cell symbol outside [{t}]: {c}")
        object.__setattr__(self, "row_partition", row_partition)
        object.__setattr__(self, "col_partition", col_partition)
        object.__setattr__(self, "sym_partition", sym_partition)
        object.__setattr__(self, "cells", frozen)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.row_partition.k, self.col_partition.k)

    def cell(self, i: int, j: int) -> Multiset:
        return self.cells[i - 1][j - 1]

    def cell_size(self, i: int, j: int) -> int:
        return len(self.cells[i - 1][j - 1])

    def row_symbol_count(self, i: int, l: int) -> int:
        """Occurrences of symbol l across row i."""
        return sum(c.count(l) for c in self.cells[i - 1])

    def col_symbol_count(self, j: int, l: int) -> int:
        """Occurrences of symbol l across column j."""
        return sum(row[j - 1].count(l) for row in self.cells)

    def is_square_form(self) -> bool:
        return (self.row_partition == self.col_partition ==
                self.sym_partition)

    def transpose(self) -> "OutlineRectangle":
        return OutlineRectangle(
            self.col_partition, self.row_partition, self.sym_partition,
            tuple(zip(*self.cells)))


@dataclass(frozen=True)
class OutlineViolation:
    kind: Literal["cell-size", "row-count", "col-count"]
    where: tuple[int, ...]
    symbol: int | None
    expected: int
    actual: int


def validate_outline(outline: OutlineRectangle) -> list[OutlineViolation]:
    """Every violated outline condition, with location and both counts.

    An empty report means the array is a valid outline rectangle for its
    partition triple.
    """
    P, Q, R = (outline.row_partition, outline.col_partition,
               outline.sym_partition)
    t = R.k
    violations: list[OutlineViolation] = []
    col_counter: list[Counter] = [Counter() for _ in range(Q.k)]
    for i in range(1, P.k + 1):
        row_counter: Counter = Counter()
        for j in range(1, Q.k + 1):
            cell = outline.cells[i - 1][j - 1]
            expected = P.part(i) * Q.part(j)
            if len(cell) != expected:
                violations.append(OutlineViolation(
                    "cell-size", (i, j), None, expected, len(cell)))
            row_counter.update(cell)
            col_counter[j - 1].update(cell)
        for l in range(1, t + 1):
            expected = P.part(i) * R.part(l)
            if row_counter[l] != expected:
                violations.append(OutlineViolation(
                    "row-count", (i,), l, expected, row_counter[l]))
    for j in range(1, Q.k + 1):
        for l in range(1, t + 1):
            expected = Q.part(j) * R.part(l)
            if col_counter[j - 1][l] != expected:
                violations.append(OutlineViolation(
                    "col-count", (j,), l, expected, col_counter[j - 1][l]))
    return violations


def reduce(square: LatinSquare, row_partition: Partition,
           col_partition: Partition, sym_partition: Partition,
           ) -> OutlineRectangle:
    """Amalgamate a latin square modulo (P, Q, R) into an outline rectangle.

    Rows are merged along P's blocks, columns along Q's, and every symbol is
    replaced by the index of the R-block containing it.  The output always
    satisfies the outline conditions; that is asserted here because every
    caller relies on it.
    """
    n = square.order
    for name, part in (("row", row_partition), ("column", col_partition),
                       ("symbol", sym_partition)):
        if part.n != n:
            raise PartitionError(
                f"{name} partition sums to {part.n}, square has order {n}")
    sym_group = _group_map(sym_partition.parts)
    rstarts = _block_starts(row_partition.parts)
    cstarts = _block_starts(col_partition.parts)
    cells = []
    for bi in range(row_partition.k):
        row_cells = []
        rows = range(rstarts[bi], rstarts[bi + 1])
        for bj in range(col_partition.k):
            cols = range(cstarts[bj], cstarts[bj + 1])
            row_cells.append(multiset(
                sym_group[square.grid[r][c] - 1] for r in rows for c in cols))
        cells.append(row_cells)
    outline = OutlineRectangle(row_partition, col_partition, sym_partition,
                               cells)
    bad = validate_outline(outline)
    if bad:
        raise InternalError(f"reduction is not an outline rectangle: {bad[0]}")
    return outline


# ---------------------------------------------------------------------------
# Frequency arrays


@dataclass(frozen=True)
class FrequencyArray:
    """A k x k array of non-negative integers."""

    k: int
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries: Sequence[Sequence[int]]):
        k = len(entries)
        if any(len(row) != k for row in entries):
            raise GridError("frequency array must be square")
        if any(v < 0 for row in entries for v in row):
            raise GridError("frequency array entries must be non-negative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "entries",
                           tuple(tuple(int(v) for v in row) for row in entries))

    def at(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]


# ---------------------------------------------------------------------------
# Existence predicate

Verdict = Literal["yes", "no", "unknown"]


@dataclass(frozen=True)
class Existence:
    verdict: Verdict
    reason: str
    detail: str

    def __bool__(self) -> bool:
        return self.verdict == "yes"


def exists(partition: Partition) -> Existence:
    """Decide existence of a realization where the known results apply.

    Decides every partition with at most four parts, every single-size and
    two-size partition, and every partition whose three largest parts agree;
    everything else is honestly Unknown.  The reason tag is machine readable.
    """
    if not partition.is_non_increasing():
        raise PreconditionError("exists() expects non-increasing parts")
    h = partition.parts
    k = partition.k

    if k == 0:
        raise PreconditionError("existence is about non-empty partitions")
    if k == 1:
        return Existence("yes", "one-part",
                         "a latin square of any order is its own subsquare")
    if k == 2:
        return Existence("no", "two-parts",
                         "no latin square has exactly two disjoint subsquares "
                         "covering it")
    if k == 3:
        if h[0] == h[2]:
            return Existence("yes", "three-parts", "three equal parts")
        return Existence("no", "three-parts",
                         "three parts require all three equal")
    if k == 4:
        if h[0] == h[2]:
            return Existence("yes", "four-parts", "three largest parts equal")
        if h[1] == h[3] and h[0] <= 2 * h[3]:
            return Existence("yes", "four-parts",
                             "three smallest parts equal and h1 <= 2*h4")
        return Existence("no", "four-parts",
                         "outside the four-part characterization")

    sizes = sorted(set(h), reverse=True)
    if len(sizes) == 1:
        return Existence("yes", "uniform-sizes",
                         f"k = {k} equal parts and k != 2")
    if len(sizes) == 2:
        a, b = sizes
        u = h.count(a)
        if u >= 3:
            return Existence("yes", "two-sizes", f"{u} >= 3 parts of the "
                             "larger size")
        if a <= (k - 2) * b:
            return Existence("yes", "two-sizes",
                             f"{a} <= (k-2)*{b} with {u} large parts")
        return Existence("no", "two-sizes",
                         f"{u} < 3 large parts and {a} > (k-2)*{b}")
    if h[0] == h[2]:
        return Existence("yes", "three-equal-largest",
                         "three or more equal largest parts always admit a "
                         "realization")
    return Existence("unknown", "uncharacterized",
                     "no applicable existence result")
