import pytest

from pils import (
    GridError,
    LatinSquare,
    OutlineRectangle,
    Partition,
    PartitionError,
    PreconditionError,
    RealizationError,
    exists,
    is_latin,
    reduce,
    validate_outline,
    verify_realization,
)
from reference import (
    REDUCTION_COLS,
    REDUCTION_ROWS,
    REDUCTION_SYMS,
    REFERENCE_OUTLINE_CELLS,
    REFERENCE_PARTITION,
    REFERENCE_SQUARE,
)


class TestPartition:
    def test_blocks_partition_the_ground_set(self):
        p = Partition([3, 2, 2, 1, 1])
        assert p.n == 9 and p.k == 5
        covered = [x for i in range(1, 6) for x in p.block(i)]
        assert covered == list(range(1, 10))
        assert list(p.block(2)) == [4, 5]
        assert p.block_of(5) == 2

    def test_raw_constructor_preserves_order(self):
        p = Partition([1, 3, 2])
        assert p.parts == (1, 3, 2)
        assert not p.is_non_increasing()
        assert Partition.sorted([1, 3, 2]).parts == (3, 2, 1)

    def test_rejects_bad_parts(self):
        with pytest.raises(PartitionError):
            Partition([2, 0])
        with pytest.raises(PartitionError):
            Partition([-1])

    def test_empty_partition_is_the_zero_object(self):
        p = Partition([])
        assert p.n == 0 and p.k == 0


class TestIsLatin:
    def test_reference_square(self):
        assert is_latin(REFERENCE_SQUARE)

    def test_order_one(self):
        assert is_latin([[1]])

    def test_repeated_symbol(self):
        assert not is_latin([[1, 2], [1, 2]])

    def test_malformed_is_an_error_not_false(self):
        with pytest.raises(GridError):
            is_latin([[1, 2], [2]])
        with pytest.raises(GridError):
            is_latin([[1, 3], [3, 1]])


class TestVerifyRealization:
    def test_reference_square_normal_form(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        cert = verify_realization(sq, Partition(REFERENCE_PARTITION))
        assert [blk.symbols for blk in cert.blocks] == [
            (1, 2, 3), (4, 5), (6, 7), (8,), (9,)]

    def test_whole_square_is_one_block(self):
        sq = LatinSquare([[(x + y) % 4 + 1 for y in range(4)]
                          for x in range(4)])
        cert = verify_realization(sq, Partition([4]))
        assert len(cert.blocks) == 1

    def test_wrong_partition_reports_block(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        with pytest.raises(RealizationError) as info:
            verify_realization(sq, Partition([3, 3, 1, 1, 1]))
        assert info.value.block == 2

    def test_mutation_is_caught(self):
        grid = [list(row) for row in REFERENCE_SQUARE]
        # swap two cells inside block 2's rows, leaving the grid latin
        grid[3][5], grid[3][7] = grid[3][7], grid[3][5]
        grid[7][5], grid[7][7] = grid[7][7], grid[7][5]
        assert is_latin(grid)
        with pytest.raises(RealizationError):
            verify_realization(LatinSquare(grid),
                               Partition(REFERENCE_PARTITION))


class TestReduce:
    def test_reference_reduction(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        outline = reduce(sq, Partition(REDUCTION_ROWS),
                         Partition(REDUCTION_COLS), Partition(REDUCTION_SYMS))
        assert [list(row) for row in outline.cells] == [
            list(row) for row in REFERENCE_OUTLINE_CELLS]

    def test_singleton_partitions_embed_the_square(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        ones = Partition([1] * 9)
        outline = reduce(sq, ones, ones, ones)
        for r in range(1, 10):
            for c in range(1, 10):
                assert outline.cell(r, c) == (sq.cell(r, c),)

    def test_everything_amalgamates(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        whole = Partition([9])
        outline = reduce(sq, whole, whole, whole)
        assert outline.cell(1, 1) == (1,) * 81

    def test_sum_mismatch(self):
        sq = LatinSquare(REFERENCE_SQUARE)
        with pytest.raises(PartitionError):
            reduce(sq, Partition([8]), Partition([9]), Partition([9]))

    def test_reduction_always_validates(self):
        import random

        from util import random_latin_square, random_partition

        rng = random.Random(20260808)
        for _ in range(25):
            n = rng.randint(1, 12)
            sq = random_latin_square(n, rng)
            outline = reduce(sq, random_partition(n, rng),
                             random_partition(n, rng),
                             random_partition(n, rng))
            assert validate_outline(outline) == []


class TestValidateOutline:
    def _reference_outline(self):
        return OutlineRectangle(Partition(REDUCTION_ROWS),
                                Partition(REDUCTION_COLS),
                                Partition(REDUCTION_SYMS),
                                REFERENCE_OUTLINE_CELLS)

    def test_reference_outline_valid(self):
        assert validate_outline(self._reference_outline()) == []

    def test_constructed_violation(self):
        cells = [list(row) for row in REFERENCE_OUTLINE_CELLS]
        cells[0][3] = (5,)  # swap the symbol 7 in cell (1,4) for a 5
        bad = validate_outline(OutlineRectangle(
            Partition(REDUCTION_ROWS), Partition(REDUCTION_COLS),
            Partition(REDUCTION_SYMS), cells))
        kinds = {(v.kind, v.where) for v in bad}
        assert ("row-count", (1,)) in kinds
        assert ("col-count", (4,)) in kinds

    def test_cell_size_violation(self):
        cells = [list(row) for row in REFERENCE_OUTLINE_CELLS]
        cells[0][0] = (1, 1)
        bad = validate_outline(OutlineRectangle(
            Partition(REDUCTION_ROWS), Partition(REDUCTION_COLS),
            Partition(REDUCTION_SYMS), cells))
        assert any(v.kind == "cell-size" and v.where == (1, 1) for v in bad)

    def test_empty_outline_is_valid(self):
        empty = Partition([])
        assert validate_outline(OutlineRectangle(empty, empty, empty, [])) \
            == []


class TestExists:
    @pytest.mark.parametrize("parts,verdict", [
        ((1, 1), "no"),
        ((4, 2, 2, 2), "yes"),
        ((7, 7, 1, 1, 1, 1, 1), "no"),
        ((5, 5, 5, 4, 3, 3, 1), "yes"),
        ((5, 3, 2, 2, 1), "unknown"),
        ((7,), "yes"),
        ((3, 3, 3), "yes"),
        ((4, 3, 2), "no"),
        ((2, 2, 2, 2, 2), "yes"),
        ((3, 1, 1, 1), "no"),
        ((2, 1, 1, 1), "yes"),
        ((9, 1, 1, 1, 1, 1, 1, 1, 1), "no"),
    ])
    def test_verdicts(self, parts, verdict):
        assert exists(Partition(parts)).verdict == verdict

    def test_reason_tags_are_stable(self):
        assert exists(Partition([1, 1])).reason == "two-parts"
        assert exists(Partition([2, 2, 2])).reason == "three-parts"
        assert exists(Partition([3, 3, 3, 3, 3])).reason == "uniform-sizes"
        assert exists(Partition([3, 3, 3, 1, 1])).reason == "two-sizes"
        assert exists(Partition([4, 4, 4, 3, 1])).reason == "three-equal-largest"

    def test_requires_sorted(self):
        with pytest.raises(PreconditionError):
            exists(Partition([1, 2]))
