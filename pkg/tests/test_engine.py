import pytest

from pils import (
    Partition,
    PreconditionError,
    construct_ils,
    construct_m_equal,
    construct_main,
    select_t,
    verify_realization,
    verify_subsquares,
)


class TestSelectT:
    def test_first_branch_takes_h1(self):
        # 3*5 = 15 <= 21 + 1 - 4 = 18
        assert select_t(5, 2, 1, 21) == 5
        assert select_t(5, 2, 1, 22, parity="even") == 5

    def test_interval_branch_satisfies_proof_inequalities(self):
        # 3*h1 too large for the window: the largest admissible value is used
        h1, h4, hk, r = 10, 3, 2, 27
        t = select_t(h1, h4, hk, r)
        assert 3 * h1 > r + 1 - 2 * h4
        assert 2 * h4 <= 3 * t <= r + 1 - 2 * h4
        assert 0 <= r * (h1 - t) <= 2 * h1 * h1
        assert t <= h1

    def test_even_branch_inequalities(self):
        h1, h4, hk, r = 11, 10, 9, 46
        t = select_t(h1, h4, hk, r)
        assert 2 * h4 + 2 <= 3 * t + 1 <= r + 1 - 2 * h4
        assert 0 <= r * (h1 - t) <= 2 * h1 * h1 - t - 2 * (hk - 1)
        assert t * (t - 1) >= 2 * (hk - 1)
        assert t >= hk - 1  # trade-capacity preference

    def test_parity_mismatch_rejected(self):
        with pytest.raises(PreconditionError):
            select_t(5, 2, 1, 21, parity="even")


class TestConstructMEqual:
    def test_odd_route(self):
        P = Partition([2, 2, 2, 2, 2, 1, 1, 1, 1, 1])
        sq, cert, trace = construct_m_equal(P, m=3)
        verify_realization(sq, P)
        assert trace.steps[0]["op"] == "circulant-pipeline"
        assert trace.steps[0]["parity"] == "odd"

    def test_even_route(self):
        P = Partition([3, 3, 3, 2, 2, 2, 2, 2, 2, 2])
        sq, cert, trace = construct_m_equal(P, m=3)
        verify_realization(sq, P)
        assert trace.steps[0]["parity"] == "even"

    def test_hypothesis_violation(self):
        with pytest.raises(PreconditionError):
            construct_m_equal(Partition([3, 3, 3, 2, 1]), m=3)

    def test_m_defaults_to_first_admissible(self):
        P = Partition([2, 2, 2, 2, 2, 1, 1, 1, 1, 1])
        sq, cert, trace = construct_m_equal(P)
        assert trace.steps[0]["m"] == 3

    def test_three_distinct_sizes(self):
        P = Partition([3, 3, 3, 2, 2, 2, 1, 1, 1, 1, 1])
        sq, cert, _ = construct_m_equal(P, m=3)
        verify_realization(sq, P)


class TestConstructMain:
    @pytest.mark.parametrize("parts", [
        (3, 3, 3, 2, 1),
        (2, 2, 2),
        (5, 5, 5, 4, 3, 3, 1),
        (1, 1, 1),
        (4, 4, 4, 4),
        (2, 2, 2, 2, 2, 1, 1, 1, 1, 1),
        (6, 6, 6, 1),
        (3, 3, 3, 3, 2, 2, 1),
    ])
    def test_realizes(self, parts):
        P = Partition(parts)
        sq, cert, _ = construct_main(P)
        assert sq.order == P.n
        verify_realization(sq, P)

    def test_requires_three_equal_largest(self):
        with pytest.raises(PreconditionError):
            construct_main(Partition([3, 2, 2, 1]))

    def test_deterministic_and_trace_replays(self):
        P = Partition([4, 4, 4, 3, 2, 1])
        sq1, _, tr1 = construct_main(P)
        sq2, _, tr2 = construct_main(P)
        assert sq1.grid == sq2.grid
        assert tr1.to_json() == tr2.to_json()

    def test_trace_records_branches(self):
        _, _, trace = construct_main(Partition([5, 5, 5, 4, 3, 3, 1]))
        ops = [s["op"] for s in trace.steps]
        assert ops[0] in ("uniform-base", "rebuild")
        assert "add-on" in ops


class TestConstructIls:
    def test_gap_of_eight(self):
        sq, cert = construct_ils(20, [3, 2, 1])
        assert sq.order == 20
        assert sorted(len(b.rows) for b in cert.blocks) == [1, 2, 3]
        verify_subsquares(sq, cert)

    def test_exact_bound(self):
        # n = 2*h1 + sum exactly: zero padding beyond the tripled block
        sq, cert = construct_ils(12, [3, 2, 1])
        assert sq.order == 12
        verify_subsquares(sq, cert)

    def test_below_bound_rejected(self):
        with pytest.raises(PreconditionError):
            construct_ils(11, [3, 2, 1])

    def test_single_order(self):
        sq, cert = construct_ils(10, [2])
        assert sq.order == 10 and len(cert.blocks) == 1
        verify_subsquares(sq, cert)
