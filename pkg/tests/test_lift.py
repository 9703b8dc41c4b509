import itertools
import random

import pytest

from pils import (
    BipartiteMultigraph,
    ExtractionInfeasible,
    OutlineRectangle,
    Partition,
    PreconditionError,
    RealizationError,
    extract_exact_degree_subgraph,
    is_latin,
    lift,
    lift_to_realization,
    reduce,
    split_column,
    split_row,
    split_symbol,
    validate_outline,
    verify_realization,
)
from reference import (
    REDUCTION_COLS,
    REDUCTION_ROWS,
    REDUCTION_SYMS,
    REFERENCE_OUTLINE_CELLS,
)
from util import random_latin_square, random_partition


def reference_outline() -> OutlineRectangle:
    return OutlineRectangle(Partition(REDUCTION_ROWS),
                            Partition(REDUCTION_COLS),
                            Partition(REDUCTION_SYMS),
                            REFERENCE_OUTLINE_CELLS)


def all_subgraph_degrees(mult):
    """Exhaustive oracle: every achievable (left degrees, right degrees)."""
    edges = [(i, j, m) for i, row in enumerate(mult)
             for j, m in enumerate(row) if m]
    seen = set()
    for picks in itertools.product(*[range(m + 1) for _, _, m in edges]):
        left = [0] * len(mult)
        right = [0] * len(mult[0])
        for (i, j, _), take in zip(edges, picks):
            left[i] += take
            right[j] += take
        seen.add((tuple(left), tuple(right)))
    return seen


class TestExtraction:
    def test_regular_case(self):
        g = BipartiteMultigraph([[2, 2], [2, 2]])
        sub = extract_exact_degree_subgraph(g, [2, 2], [2, 2])
        assert all(sub.left_degree(i) == 2 for i in (1, 2))
        assert all(sub.right_degree(j) == 2 for j in (1, 2))
        assert all(sub.multiplicity(i, j) <= 2
                   for i in (1, 2) for j in (1, 2))

    def test_zero_targets(self):
        g = BipartiteMultigraph([[1, 0], [0, 1]])
        sub = extract_exact_degree_subgraph(g, [0, 0], [0, 0])
        assert sub.multiplicities == ((0, 0), (0, 0))

    def test_identity_against_exhaustive_oracle(self):
        mult = [[1, 0], [0, 1]]
        achievable = all_subgraph_degrees(mult)
        assert ((1, 1), (1, 1)) in achievable
        sub = extract_exact_degree_subgraph(
            BipartiteMultigraph(mult), [1, 1], [1, 1])
        assert sub.multiplicities == ((1, 0), (0, 1))
        # (2,0)/(1,1) is not achievable, and the call rejects it up front
        assert ((2, 0), (1, 1)) not in achievable
        with pytest.raises(PreconditionError):
            extract_exact_degree_subgraph(
                BipartiteMultigraph(mult), [2, 0], [1, 1])

    def test_infeasible_with_clean_preconditions(self):
        mult = [[1, 0], [0, 1]]
        assert ((0, 1), (1, 0)) not in all_subgraph_degrees(mult)
        with pytest.raises(ExtractionInfeasible) as info:
            extract_exact_degree_subgraph(
                BipartiteMultigraph(mult), [0, 1], [1, 0])
        assert 2 in info.value.left_set

    def test_random_extractions_match_targets(self):
        rng = random.Random(11)
        for _ in range(40):
            nl, nr = rng.randint(1, 4), rng.randint(1, 4)
            mult = [[rng.randint(0, 3) for _ in range(nr)]
                    for _ in range(nl)]
            achievable = all_subgraph_degrees(mult)
            left, right = rng.choice(sorted(achievable))
            g = BipartiteMultigraph(mult)
            sub = extract_exact_degree_subgraph(g, left, right)
            assert tuple(sub.left_degree(i + 1) for i in range(nl)) == left
            assert tuple(sub.right_degree(j + 1) for j in range(nr)) == right


class TestSplits:
    def test_split_row_on_reference_outline(self):
        out = split_row(reference_outline(), 4, 1)
        assert out.row_partition.parts == (1, 1, 1, 1, 1, 2, 1, 1)
        assert validate_outline(out) == []

    def test_split_part_one_row_rejected(self):
        with pytest.raises(PreconditionError):
            split_row(reference_outline(), 1, 1)

    def test_split_single_cell_outline(self):
        two = Partition([2])
        out = split_row(OutlineRectangle(two, two, two, [[(1, 1, 1, 1)]]), 1, 1)
        assert out.row_partition.parts == (1, 1)
        assert out.cell(1, 1) == (1, 1) and out.cell(2, 1) == (1, 1)

    def test_split_column_transposes(self):
        out = split_column(reference_outline(), 1, 1)
        assert out.col_partition.parts == (1, 2, 2, 2, 1, 1)
        assert validate_outline(out) == []

    def test_split_symbol_forced_two_by_two(self):
        ones = Partition([1, 1])
        outline = OutlineRectangle(ones, ones, Partition([2]),
                                   [[(1,), (1,)], [(1,), (1,)]])
        out = split_symbol(outline, 1, 1)
        assert out.sym_partition.parts == (1, 1)
        grid = [[out.cell(i, j)[0] for j in (1, 2)] for i in (1, 2)]
        assert is_latin(grid)

    def test_split_symbol_needs_singleton_lines(self):
        with pytest.raises(PreconditionError):
            split_symbol(reference_outline(), 1, 1)

    def test_split_symbol_part_one_rejected(self):
        ones = Partition([1, 1])
        outline = OutlineRectangle(ones, ones, ones,
                                   [[(1,), (2,)], [(2,), (1,)]])
        with pytest.raises(PreconditionError):
            split_symbol(outline, 1, 1)

    def test_every_split_output_validates(self):
        rng = random.Random(5)
        for _ in range(10):
            n = rng.randint(2, 10)
            sq = random_latin_square(n, rng)
            outline = reduce(sq, random_partition(n, rng),
                             random_partition(n, rng),
                             random_partition(n, rng))
            P = outline.row_partition
            splittable = [i for i in range(1, P.k + 1) if P.part(i) > 1]
            if splittable:
                i = rng.choice(splittable)
                out = split_row(outline, i, rng.randint(1, P.part(i) - 1))
                assert validate_outline(out) == []


class TestLift:
    def test_reference_outline_lifts(self):
        outline = reference_outline()
        square = lift(outline)
        assert square.order == 9
        again = reduce(square, outline.row_partition, outline.col_partition,
                       outline.sym_partition)
        assert again.cells == outline.cells

    def test_identity_lift(self):
        rng = random.Random(3)
        sq = random_latin_square(6, rng)
        ones = Partition([1] * 6)
        outline = reduce(sq, ones, ones, ones)
        assert lift(outline).grid == sq.grid

    def test_single_cell_lift(self):
        whole = Partition([5])
        outline = OutlineRectangle(whole, whole, whole, [[(1,) * 25]])
        assert lift(outline).order == 5

    def test_lift_is_deterministic(self):
        outline = reference_outline()
        assert lift(outline).grid == lift(outline).grid

    def test_round_trip_small(self):
        rng = random.Random(99)
        for _ in range(20):
            n = rng.randint(1, 12)
            sq = random_latin_square(n, rng)
            P, Q, R = (random_partition(n, rng) for _ in range(3))
            outline = reduce(sq, P, Q, R)
            assert reduce(lift(outline), P, Q, R).cells == outline.cells


class TestLiftToRealization:
    def test_hand_built_three_blocks(self):
        # diagonal 4 copies of i, off-diagonal 4 copies of the third symbol
        P = Partition([2, 2, 2])
        cells = [[(i,) * 4 if i == j else (6 - i - j,) * 4 for j in (1, 2, 3)]
                 for i in (1, 2, 3)]
        square, cert = lift_to_realization(
            OutlineRectangle(P, P, P, cells), P)
        verify_realization(square, P)

    def test_single_block(self):
        whole = Partition([4])
        outline = OutlineRectangle(whole, whole, whole, [[(1,) * 16]])
        square, cert = lift_to_realization(outline, whole)
        assert square.order == 4 and len(cert.blocks) == 1

    def test_foreign_symbol_on_diagonal_rejected(self):
        P = Partition([2, 2, 2])
        cells = [[(i,) * 4 if i == j else (6 - i - j,) * 4 for j in (1, 2, 3)]
                 for i in (1, 2, 3)]
        cells[0][0] = (1, 1, 1, 2)
        cells[0][1] = (1, 3, 3, 3)
        with pytest.raises(RealizationError):
            lift_to_realization(OutlineRectangle(P, P, P, cells), P)
