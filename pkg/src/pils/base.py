"""Constructive base cases for the engine's recursion.

Everything here is classical: idempotent squares of every order except 2,
uniform realizations built over an idempotent pattern, realizations with one
block of order s and m singletons built by prolonging a transversal-rich
square, and a verified search fallback for the two-size partitions the main
pipeline cannot reach.  The searches are deterministic and the fallback's
completion branch records every invocation for audit.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

from .core import (
    InternalError,
    LatinSquare,
    Partition,
    PreconditionError,
    SubsquareCertificate,
    verify_realization,
)
from .lift import lift_to_realization
from .core import OutlineRectangle, validate_outline

# Every use of the completion solver, for auditing which inputs ever reach
# the final fallback branch.
completion_invocations: list[tuple[int, ...]] = []


def _cyclic(n: int) -> list[list[int]]:
    return [[(x + y) % n + 1 for y in range(n)] for x in range(n)]


def idempotent_square(n: int) -> LatinSquare:
    """A latin square with cell (i, i) = i; exists for every n except 2.

    Odd orders come from the back-circulant formula; even orders prolong the
    odd square one below along an off-diagonal constant-difference
    transversal, which leaves the diagonal intact and puts n at (n, n).
    """
    if n < 1:
        raise PreconditionError("order must be positive")
    if n == 2:
        raise PreconditionError("no idempotent square of order 2 exists")
    if n == 1:
        return LatinSquare([[1]])
    if n % 2 == 1:
        inv2 = (n + 1) // 2
        return LatinSquare([[((i + j) * inv2 - 1) % n + 1 for j in range(1, n + 1)]
                            for i in range(1, n + 1)])
    m = n - 1
    inv2 = (m + 1) // 2
    base = [[((i + j) * inv2 - 1) % m + 1 for j in range(1, m + 1)]
            for i in range(1, m + 1)]
    grid = [row + [0] for row in base]
    grid.append([0] * n)
    for i in range(1, m + 1):
        j = (i - 2) % m + 1  # the difference-1 diagonal avoids (i, i)
        v = base[i - 1][j - 1]
        grid[i - 1][j - 1] = n
        grid[i - 1][m] = v
        grid[m][j - 1] = v
    grid[m][m] = n
    return LatinSquare(grid)


def ls_uniform(a: int, k: int) -> tuple[LatinSquare, SubsquareCertificate]:
    """A realization of (a^k) in normal form; exists exactly when k != 2."""
    if a < 1 or k < 1:
        raise PreconditionError("a and k must be positive")
    if k == 2:
        raise PreconditionError(
            "no latin square splits into exactly two disjoint subsquares")
    idem = idempotent_square(k)
    n = a * k
    grid = [[0] * n for _ in range(n)]
    for bi in range(k):
        for bj in range(k):
            sym_base = (idem.grid[bi][bj] - 1) * a
            for x in range(a):
                row = grid[bi * a + x]
                for y in range(a):
                    row[bj * a + y] = sym_base + (x + y) % a + 1
    square = LatinSquare(grid)
    partition = Partition([a] * k)
    return square, verify_realization(square, partition)


# ---------------------------------------------------------------------------
# Finite-field MOLS and transversal-rich squares


def _prime_power(q: int) -> tuple[int, int] | None:
    for p in range(2, q + 1):
        if q % p == 0:
            a = 0
            while q % p == 0:
                q //= p
                a += 1
            return (p, a) if q == 1 else None
    return None


def _poly_mul_mod(x: Sequence[int], y: Sequence[int], mod: Sequence[int],
                  p: int) -> tuple[int, ...]:
    out = [0] * (len(x) + len(y) - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                out[i + j] = (out[i + j] + xi * yj) % p
    # reduce by the monic modulus
    deg = len(mod) - 1
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(deg):
                out[i - deg + j] = (out[i - deg + j] - c * mod[j]) % p
    return tuple(out[:deg])


def _irreducible(p: int, a: int) -> tuple[int, ...]:
    """A monic irreducible polynomial of degree a over GF(p), low-first."""

    def polys(deg: int) -> Iterator[tuple[int, ...]]:
        for code in range(p ** deg):
            coeffs = []
            c = code
            for _ in range(deg):
                coeffs.append(c % p)
                c //= p
            yield tuple(coeffs) + (1,)

    def divides(d: Sequence[int], f: list[int]) -> bool:
        f = list(f)
        while len(f) >= len(d) and any(f):
            while f and f[-1] == 0:
                f.pop()
            if len(f) < len(d):
                break
            c = f[-1]
            off = len(f) - len(d)
            for i, di in enumerate(d):
                f[off + i] = (f[off + i] - c * di) % p
        while f and f[-1] == 0:
            f.pop()
        return not f

    for cand in polys(a):
        if cand[0] == 0:
            continue
        ok = True
        for deg in range(1, a // 2 + 1):
            for d in polys(deg):
                if divides(d, list(cand)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cand
    raise InternalError(f"no irreducible polynomial for GF({p}^{a})")


@lru_cache(maxsize=None)
def _field_tables(q: int) -> tuple[tuple[tuple[int, ...], ...],
                                   tuple[tuple[int, ...], ...]]:
    """Addition and multiplication tables of GF(q), elements 0..q-1."""
    pa = _prime_power(q)
    if pa is None:
        raise PreconditionError(f"{q} is not a prime power")
    p, a = pa
    if a == 1:
        add = tuple(tuple((x + y) % p for y in range(p)) for x in range(p))
        mul = tuple(tuple((x * y) % p for y in range(p)) for x in range(p))
        return add, mul
    mod = _irreducible(p, a)

    def decode(e: int) -> tuple[int, ...]:
        out = []
        for _ in range(a):
            out.append(e % p)
            e //= p
        return tuple(out)

    def encode(v: Sequence[int]) -> int:
        out = 0
        for c in reversed(v):
            out = out * p + c
        return out

    elems = [decode(e) for e in range(q)]
    add = tuple(tuple(encode([(x + y) % p for x, y in zip(ex, ey)])
                      for ey in elems) for ex in elems)
    mul = tuple(tuple(encode(_poly_mul_mod(ex, ey, mod, p)) for ey in elems)
                for ex in elems)
    return add, mul


def _mols_prime_power(q: int) -> tuple[list[list[int]], list[list[int]]]:
    """Two orthogonal squares over GF(q), 0-based symbols."""
    add, mul = _field_tables(q)
    first = [[add[i][j] for j in range(q)] for i in range(q)]
    # any multiplier other than 0 and 1 keeps the pair orthogonal
    c = 2 if q > 2 else 1
    second = [[add[mul[c][i]][j] for j in range(q)] for i in range(q)]
    return first, second


def _mols_product(pair_a, pair_b):
    a1, a2 = pair_a
    b1, b2 = pair_b
    ma, mb = len(a1), len(b1)

    def combine(x, y):
        return [[x[i // mb][j // mb] * mb + y[i % mb][j % mb]
                 for j in range(ma * mb)] for i in range(ma * mb)]

    return combine(a1, b1), combine(a2, b2)


def _mols(m: int) -> tuple[list[list[int]], list[list[int]]]:
    """A pair of MOLS(m) when every prime-power factor of m exceeds 2."""
    factors: list[int] = []
    rest = m
    for p in range(2, m + 1):
        if p * p > rest:
            break
        if rest % p == 0:
            q = 1
            while rest % p == 0:
                rest //= p
                q *= p
            factors.append(q)
    if rest > 1:
        factors.append(rest)
    if any(q == 2 for q in factors):
        raise PreconditionError(f"no direct-product mate for order {m}")
    pair = _mols_prime_power(factors[0])
    for q in factors[1:]:
        pair = _mols_product(pair, _mols_prime_power(q))
    return pair


def _turn_square(m: int) -> list[list[int]]:
    """Cyclic square with one intercalate turned; gains transversals for even m."""
    half = m // 2
    grid = [[(i + j) % m + 1 for j in range(m)] for i in range(m)]
    grid[0][0], grid[0][half] = grid[0][half], grid[0][0]
    grid[half][0], grid[half][half] = grid[half][half], grid[half][0]
    return grid


def _find_disjoint_transversals(grid: Sequence[Sequence[int]], count: int,
                                budget: int = 2_000_000,
                                ) -> list[list[int]] | None:
    """Up to ``count`` pairwise cell-disjoint transversals, by backtracking.

    Each transversal is returned as a column list indexed by row (0-based).
    Complete within the node budget; None when none exists or the budget
    runs out.
    """
    m = len(grid)
    taken = [[False] * m for _ in range(m)]
    found: list[list[int]] = []
    nodes = 0

    def one(row: int, cols: int, syms: int, cur: list[int]) -> Iterator[list[int]]:
        nonlocal nodes
        if row == m:
            yield list(cur)
            return
        for c in range(m):
            bit = 1 << c
            if cols & bit or taken[row][c]:
                continue
            s = 1 << (grid[row][c] - 1)
            if syms & s:
                continue
            nodes += 1
            if nodes > budget:
                return
            cur.append(c)
            yield from one(row + 1, cols | bit, syms | s, cur)
            cur.pop()

    def pack() -> bool:
        nonlocal nodes
        if len(found) == count:
            return True
        for trans in one(0, 0, 0, []):
            for r, c in enumerate(trans):
                taken[r][c] = True
            found.append(trans)
            if pack():
                return True
            found.pop()
            for r, c in enumerate(trans):
                taken[r][c] = False
            if nodes > budget:
                return False
        return False

    return found if pack() else None


def _transversal_square(m: int, count: int,
                        ) -> tuple[list[list[int]], list[list[int]]] | None:
    """A square of order m with ``count`` disjoint transversals, the first of
    which is the main diagonal (with distinct symbols)."""
    if count > m:
        return None
    if m % 2 == 1:
        grid = [[(i + j) % m + 1 for j in range(m)] for i in range(m)]
        # constant-difference diagonals; difference 0 is the main diagonal
        return grid, [[(r + d) % m for r in range(m)] for d in range(count)]
    if m % 4 == 0:
        first, second = _mols(m)
        grid = [[v + 1 for v in row] for row in first]
        transversals: list[list[int]] = [[-1] * m for _ in range(count)]
        for i in range(m):
            for j in range(m):
                level = second[i][j]
                if level < count:
                    transversals[level][i] = j
        return _diagonalize(grid, transversals)
    # m = 2 mod 4: no direct-product mate; search a turned cyclic square.
    # The budget is deliberately small: when the packing is not found almost
    # immediately the outline-completion route is cheaper than persisting.
    grid = _turn_square(m)
    found = _find_disjoint_transversals(grid, count, budget=150_000)
    if found is None:
        return None
    return _diagonalize(grid, found)


def _diagonalize(grid: list[list[int]],
                 transversals: list[list[int]],
                 ) -> tuple[list[list[int]], list[list[int]]]:
    """Permute columns so the first transversal becomes the main diagonal."""
    m = len(grid)
    first = transversals[0]
    new_to_old = [0] * m
    for r, c in enumerate(first):
        new_to_old[r] = c
    old_to_new = [0] * m
    for new, old in enumerate(new_to_old):
        old_to_new[old] = new
    out = [[grid[r][new_to_old[c]] for c in range(m)] for r in range(m)]
    moved = [[old_to_new[c] for c in t] for t in transversals]
    return out, moved


@lru_cache(maxsize=512)
def ls_one_big(s: int, m: int) -> tuple[LatinSquare, SubsquareCertificate]:
    """A realization of (s, 1^m): one order-s block plus m singletons.

    Normal form with the block first, on rows, columns and symbols [s].
    Exists whenever s <= m - 1; built by prolonging a square of order m with
    s + 1 disjoint transversals where such a square is on hand, otherwise by
    completing the outline square directly.  Results are cached; they are
    immutable values.
    """
    if s < 0 or m < 1:
        raise PreconditionError("need s >= 0 and m >= 1")
    if s == 0:
        square = idempotent_square(m)
        return square, verify_realization(square, Partition([1] * m))
    if m < 3:
        raise PreconditionError("one-big-block realizations need m >= 3")
    if s > m - 1:
        raise PreconditionError(
            f"s = {s} exceeds m - 1 = {m - 1}; no such realization exists")
    if s == 1:
        square = idempotent_square(m + 1)
        return square, verify_realization(square, Partition([1] * (m + 1)))

    partition = Partition([s] + [1] * m)
    got = _transversal_square(m, s + 1)
    if got is not None:
        square = _embed_block(got[0], got[1], s)
        return square, verify_realization(square, partition)
    outline = _complete_outline_square(partition)
    return lift_to_realization(outline, partition)


def _embed_block(m_grid: list[list[int]], transversals: list[list[int]],
                 s: int) -> LatinSquare:
    """Prolong along s off-diagonal transversals to embed an order-s block."""
    m = len(m_grid)
    # Relabel so the diagonal reads s+1 .. s+m, other symbols following.
    relabel = [0] * (m + 1)
    for i in range(m):
        relabel[m_grid[i][i]] = s + i + 1
    base = [[relabel[v] for v in row] for row in m_grid]
    n = s + m
    grid = [[0] * n for _ in range(n)]
    for x in range(s):
        for y in range(s):
            grid[x][y] = (x + y) % s + 1
    for i in range(m):
        for j in range(m):
            grid[s + i][s + j] = base[i][j]
    for c in range(1, s + 1):
        for i, j in enumerate(transversals[c]):
            v = base[i][j]
            grid[s + i][s + j] = c
            grid[s + i][c - 1] = v
            grid[c - 1][s + j] = v
    return LatinSquare(grid)


# ---------------------------------------------------------------------------
# Outline-square completion (the last-resort constructive search)


def _complete_outline_square(partition: Partition,
                             node_budget: int = 5_000_000) -> OutlineRectangle:
    """Fill c(i,j,l) meeting all outline-square equations, diagonal fixed.

    Symbols are processed largest class first; each symbol's placement is a
    capacitated transportation problem enumerated cell by cell (row-major,
    fair share first), and exhaustion of one symbol's choices backtracks
    chronologically into the previous symbol.
    """
    completion_invocations.append(partition.parts)
    parts = partition.parts
    k = partition.k
    rem = [[parts[i] * parts[j] if i != j else 0 for j in range(k)]
           for i in range(k)]
    nodes = 0

    def symbol_solutions(l: int, later: tuple[int, ...],
                         ) -> Iterator[list[tuple[int, int, int]]]:
        """All placements of symbol l against current capacities.

        ``later`` lists the symbols still to come: whatever they cannot
        absorb of a cell must be placed now, which bounds each value from
        below and prunes dead branches immediately.
        """
        nonlocal nodes
        hl = parts[l]
        later_set = set(later)
        later_sum = sum(parts[x] for x in later)
        cells = [(i, j) for i in range(k) for j in range(k)
                 if i != j and i != l and j != l]
        row_rem = [parts[i] * hl if i != l else 0 for i in range(k)]
        col_rem = [parts[j] * hl if j != l else 0 for j in range(k)]
        future_max = {}
        for i, j in cells:
            s = later_sum
            if i in later_set:
                s -= parts[i]
            if j in later_set:
                s -= parts[j]
            future_max[(i, j)] = min(parts[i], parts[j]) * s
        # capacity still ahead of each cell in its own row / column
        row_ahead = [0] * len(cells)
        col_ahead = [0] * len(cells)
        row_acc = [0] * k
        col_acc = [0] * k
        for idx in range(len(cells) - 1, -1, -1):
            i, j = cells[idx]
            row_ahead[idx] = row_acc[i]
            col_ahead[idx] = col_acc[j]
            row_acc[i] += rem[i][j]
            col_acc[j] += rem[i][j]

        def walk(idx: int, placed: list[tuple[int, int, int]],
                 ) -> Iterator[list[tuple[int, int, int]]]:
            nonlocal nodes
            if idx == len(cells):
                if all(v == 0 for v in row_rem) and all(v == 0 for v in col_rem):
                    yield list(placed)
                return
            i, j = cells[idx]
            cap = rem[i][j]
            hi = min(cap, row_rem[i], col_rem[j])
            lo = max(0, row_rem[i] - row_ahead[idx],
                     col_rem[j] - col_ahead[idx],
                     cap - future_max[(i, j)])
            if lo > hi:
                return
            # proportional share first: greedy extremes starve the symbols
            # still to come, so spread each line's demand over its capacity
            fair = hi
            if cap + row_ahead[idx]:
                fair = min(fair, round(row_rem[i] * cap
                                       / (cap + row_ahead[idx])))
            if cap + col_ahead[idx]:
                fair = min(fair, round(col_rem[j] * cap
                                       / (cap + col_ahead[idx])))
            fair = max(lo, min(hi, fair))
            order = [fair]
            step = 1
            while len(order) < hi - lo + 1:
                if fair + step <= hi:
                    order.append(fair + step)
                if fair - step >= lo:
                    order.append(fair - step)
                step += 1
            for v in order:
                nodes += 1
                if nodes > node_budget:
                    raise _CompletionBudget(placed)
                row_rem[i] -= v
                col_rem[j] -= v
                if v:
                    placed.append((i, j, v))
                yield from walk(idx + 1, placed)
                if v:
                    placed.pop()
                row_rem[i] += v
                col_rem[j] += v

        yield from walk(0, [])

    order = sorted(range(k), key=lambda l: (-parts[l], l))
    chosen: list[list[tuple[int, int, int]]] = []
    gens: list[Iterator] = []
    level = 0
    while level < k:
        if level == len(gens):
            gens.append(symbol_solutions(order[level],
                                         tuple(order[level + 1:])))
        try:
            placement = next(gens[level])
        except StopIteration:
            gens.pop()
            if not chosen:
                raise InternalError(
                    f"outline completion exhausted for {partition}; "
                    f"partial assignment depth {level}")
            for i, j, v in chosen.pop():
                rem[i][j] += v
            level -= 1
            continue
        for i, j, v in placement:
            rem[i][j] -= v
        chosen.append(placement)
        level += 1

    cells: list[list[list[int]]] = [[[] for _ in range(k)] for _ in range(k)]
    for i in range(k):
        cells[i][i] = [i + 1] * (parts[i] * parts[i])
    for l, placement in zip(order, chosen):
        for i, j, v in placement:
            cells[i][j].extend([l + 1] * v)
    outline = OutlineRectangle(partition, partition, partition, cells)
    bad = validate_outline(outline)
    if bad:
        raise InternalError(f"completed outline invalid: {bad[0]}")
    return outline


class _CompletionBudget(InternalError):
    def __init__(self, partial):
        super().__init__(
            f"outline completion exceeded its node budget; partial "
            f"assignment of size {len(partial)}")
        self.partial = list(partial)


def two_size_fallback(partition: Partition,
                      ) -> tuple[LatinSquare, SubsquareCertificate]:
    """Realize a^u b^v with u >= 3 when the main pipeline cannot.

    Uniform inputs delegate to ls_uniform.  Otherwise the circulant pipeline
    is attempted, then a single add-on step over the uniform base (b^k),
    whose own bound is the complement of the pipeline's hypothesis at level
    u; the outline-completion search only handles the residue where the
    pipeline's hypothesis holds but its seed parameters land out of range.
    """
    parts = partition.parts
    if not partition.is_non_increasing():
        raise PreconditionError("fallback expects non-increasing parts")
    if partition.k == 2:
        raise PreconditionError(
            "no latin square splits into exactly two disjoint subsquares")
    sizes = sorted(set(parts), reverse=True)
    if len(sizes) > 2:
        raise PreconditionError("fallback handles at most two distinct sizes")
    if len(sizes) == 1:
        return ls_uniform(sizes[0], partition.k)
    if parts.count(sizes[0]) < 3:
        raise PreconditionError(
            "fallback needs at least three parts of the larger size")

    from .engine import attempt_pipeline

    try:
        square, certificate, _ = attempt_pipeline(partition)
        return square, certificate
    except PreconditionError:
        pass
    got = _two_size_add_on(partition)
    if got is not None:
        return got
    outline = _complete_outline_square(partition)
    return lift_to_realization(outline, partition)


def _two_size_add_on(partition: Partition,
                     ) -> tuple[LatinSquare, SubsquareCertificate] | None:
    """One add-on step over the uniform base, when its bound allows it."""
    from .compose import (
        add_on_outline,
        array_from_outline_square,
        scale_outline_array,
        square_from_array,
        sum_outline_arrays,
    )
    from .core import reduce as core_reduce

    parts = partition.parts
    a, b = parts[0], parts[-1]
    u = parts.count(a)
    v = partition.k - u
    if (v - 1) * b > (u - 1) * a + (u - 2) * b:
        return None
    k = partition.k
    base_square, _ = ls_uniform(b, k)
    uniform = Partition([b] * k)
    body = array_from_outline_square(
        core_reduce(base_square, uniform, uniform, uniform),
        drop_diagonal=True)
    addon = add_on_outline(u, [b] * v, a)
    combined = sum_outline_arrays(body, scale_outline_array(addon, a - b))
    outline = square_from_array(combined, partition)
    return lift_to_realization(outline, partition)
