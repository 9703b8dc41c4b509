"""A worked order-9 realization of (3,2,2,1,1) and its known reduction.

The square below carries disjoint subsquares of orders 3, 2, 2, 1, 1 on the
main diagonal.  Its reduction modulo the row partition (1,1,1,2,2,1,1), the
column partition (3,2,2,1,1) and the symbol partition (3,1,1,1,1,1,1) is the
7 x 5 outline rectangle REFERENCE_OUTLINE_CELLS; both serve as exact fixtures
for the reduce/lift round trip.
"""

REFERENCE_SQUARE = [
    [1, 2, 3, 8, 6, 5, 4, 9, 7],
    [2, 3, 1, 7, 9, 4, 5, 6, 8],
    [3, 1, 2, 6, 7, 9, 8, 5, 4],
    [7, 6, 9, 4, 5, 8, 1, 3, 2],
    [6, 7, 8, 5, 4, 1, 9, 2, 3],
    [9, 8, 5, 3, 2, 6, 7, 4, 1],
    [8, 9, 4, 2, 3, 7, 6, 1, 5],
    [5, 4, 7, 9, 1, 3, 2, 8, 6],
    [4, 5, 6, 1, 8, 2, 3, 7, 9],
]

REFERENCE_PARTITION = (3, 2, 2, 1, 1)

REDUCTION_ROWS = (1, 1, 1, 2, 2, 1, 1)
REDUCTION_COLS = (3, 2, 2, 1, 1)
REDUCTION_SYMS = (3, 1, 1, 1, 1, 1, 1)

REFERENCE_OUTLINE_CELLS = [
    [(1, 1, 1), (4, 6), (2, 3), (7,), (5,)],
    [(1, 1, 1), (5, 7), (2, 3), (4,), (6,)],
    [(1, 1, 1), (4, 5), (6, 7), (3,), (2,)],
    [(4, 4, 5, 5, 6, 7), (2, 2, 3, 3), (1, 1, 6, 7), (1, 1), (1, 1)],
    [(2, 3, 6, 6, 7, 7), (1, 1, 1, 1), (4, 4, 5, 5), (1, 2), (1, 3)],
    [(2, 3, 5), (1, 7), (1, 1), (6,), (4,)],
    [(2, 3, 4), (1, 6), (1, 1), (5,), (7,)],
]
