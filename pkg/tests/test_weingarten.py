import itertools
import math
from fractions import Fraction

import pytest

from qperm.errors import BoundError, SingularGramError
from qperm.partitions import SetPartition, enumerate_nc, kernel, leq
from qperm.weingarten import (
    check_inverse,
    dk_value,
    gram,
    haar_moment,
    parse_rational,
    rational_str,
    weingarten,
    weingarten_asymptotics,
)

ZERO2 = SetPartition.singletons(2)
ONE2 = SetPartition.full(2)


class TestGram:
    def test_k1(self):
        for n in (1, 4, 9):
            t = gram(1, n)
            assert t.entries == ((n,),)

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_k2(self, n):
        t = gram(2, n)
        assert t.index == (ZERO2, ONE2)
        assert t.entries == ((n * n, n), (n, n))

    def test_k3_diagonal_n4(self):
        t = gram(3, 4)
        assert [t.entries[i][i] for i in range(5)] == [64, 16, 16, 16, 4]

    def test_symmetry_and_diagonal(self):
        for k, n in [(3, 5), (4, 6)]:
            t = gram(k, n)
            size = len(t.index)
            for a in range(size):
                assert t.entries[a][a] == n ** t.index[a].block_count()
                for b in range(size):
                    assert t.entries[a][b] == t.entries[b][a]

    def test_bounds(self):
        with pytest.raises(BoundError):
            gram(0, 4)
        with pytest.raises(BoundError):
            gram(2, 0)


class TestWeingarten:
    def test_k1(self):
        assert weingarten(1, 7).entries == ((Fraction(1, 7),),)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 11])
    def test_k2_closed_form(self, n):
        t = weingarten(2, n)
        c = Fraction(1, n * (n - 1))
        assert t.entry(ZERO2, ZERO2) == c
        assert t.entry(ZERO2, ONE2) == -c
        assert t.entry(ONE2, ZERO2) == -c
        assert t.entry(ONE2, ONE2) == Fraction(1, n - 1)

    def test_k2_n5_value(self):
        assert weingarten(2, 5).entry(ONE2, ONE2) == Fraction(1, 4)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    @pytest.mark.parametrize("n", [4, 7, 12])
    def test_inverse_identity(self, k, n):
        assert check_inverse(k, n)

    @pytest.mark.parametrize("k,n", [(2, 4), (3, 5), (4, 4), (4, 9), (5, 6)])
    def test_matches_plain_gauss_jordan_oracle(self, k, n):
        from _oracles import gauss_jordan_inverse

        expected = gauss_jordan_inverse([list(r) for r in gram(k, n).entries])
        got = weingarten(k, n).entries
        assert [list(r) for r in got] == expected

    def test_symmetric(self):
        t = weingarten(4, 6)
        size = len(t.index)
        for a in range(size):
            for b in range(size):
                assert t.entries[a][b] == t.entries[b][a]

    def test_diagonal_sign_positive(self):
        for k in (1, 2, 3, 4):
            for n in (4, 6, 9):
                t = weingarten(k, n)
                for a in range(len(t.index)):
                    assert t.entries[a][a] > 0

    def test_singular_cases_report_parameters(self):
        with pytest.raises(SingularGramError) as err:
            weingarten(2, 1)
        assert (err.value.k, err.value.n) == (2, 1)
        with pytest.raises(SingularGramError):
            weingarten(3, 2)
        with pytest.raises(SingularGramError):
            weingarten(5, 3)

    def test_json_dict_round_trips(self):
        t = weingarten(2, 4)
        d = t.to_json_dict()
        assert d["index"] == ["1|2", "1,2"]
        assert d["matrix"] == [["1/12", "-1/12"], ["-1/12", "1/3"]]
        assert parse_rational(d["matrix"][1][1]) == Fraction(1, 3)

    def test_rational_str(self):
        assert rational_str(Fraction(-3, 9)) == "-1/3"
        assert rational_str(5) == "5/1"


class TestHaarMoment:
    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_first_moment_is_one_over_n(self, n):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert haar_moment(n, (i,), (j,)) == Fraction(1, n)

    def test_column_orthogonality_zero(self):
        assert haar_moment(4, (1, 2), (3, 3)) == 0

    def test_distinct_rows_same_columns(self):
        assert haar_moment(4, (1, 1), (2, 2)) == Fraction(1, 4)

    def test_row_sum_telescopes(self):
        # sum_{i1} psi(u_{i1 j1} u_{i2 j2}) = psi(u_{i2 j2}) for all j1, i2, j2
        for n in (4, 5):
            for j1, i2, j2 in itertools.product(range(1, n + 1), repeat=3):
                total = sum(
                    haar_moment(n, (i1, i2), (j1, j2)) for i1 in range(1, n + 1)
                )
                assert total == haar_moment(n, (i2,), (j2,))

    def test_triple_row_sum_telescopes(self):
        n = 4
        for j1 in (1, 3):
            for i2, j2, i3, j3 in itertools.product((1, 2, 4), repeat=4):
                total = sum(
                    haar_moment(n, (i1, i2, i3), (j1, j2, j3))
                    for i1 in range(1, n + 1)
                )
                assert total == haar_moment(n, (i2, i3), (j2, j3))

    def test_relabeling_invariance(self):
        n = 5
        words = [((1, 2, 1), (3, 3, 4)), ((2, 2), (1, 5)), ((1, 2, 3, 1), (2, 2, 4, 4))]
        for tau in itertools.permutations(range(1, n + 1)):
            relabel = lambda w: tuple(tau[x - 1] for x in w)
            for i, j in words:
                assert haar_moment(n, relabel(i), relabel(j)) == haar_moment(n, i, j)

    @pytest.mark.parametrize("n,k", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (3, 4)])
    def test_small_n_branches_agree_where_invertible(self, n, k):
        for i in itertools.product(range(1, n + 1), repeat=k):
            for j in itertools.product(range(1, n + 1), repeat=k):
                avg = haar_moment(n, i, j, method="average")
                wg = haar_moment(n, i, j, method="weingarten")
                assert avg == wg

    def test_small_n_weingarten_branch_can_be_singular(self):
        with pytest.raises(SingularGramError):
            haar_moment(2, (1, 1, 2), (1, 2, 1), method="weingarten")

    def test_index_out_of_range(self):
        with pytest.raises(BoundError):
            haar_moment(4, (5,), (1,))
        with pytest.raises(BoundError):
            haar_moment(4, (1, 2), (1,))


class TestAsymptotics:
    def test_diagonal_residual_k2(self):
        # W(1_2, 1_2) * n = n/(n-1); residual n*(n/(n-1) - 1) = n/(n-1) <= 2
        report = weingarten_asymptotics(2, range(4, 20), ONE2, ONE2)
        for row in report.rows:
            assert row.scaled == Fraction(row.n, row.n - 1)
        assert report.bounded
        assert report.max_abs <= 2

    def test_comparable_pair_k2(self):
        report = weingarten_asymptotics(2, range(4, 20), ZERO2, ONE2)
        assert report.relation == "mobius_residual"
        for row in report.rows:
            # W(0,1) n^2 = -n/(n-1) and mu = -1: r(n) = n(1 - n/(n-1)) = -n/(n-1)
            assert row.scaled == -Fraction(row.n, row.n - 1)
        assert report.bounded

    def test_incomparable_pair_uses_scaled_entry(self):
        p = SetPartition.from_text("1,2|3")
        q = SetPartition.from_text("1|2,3")
        report = weingarten_asymptotics(3, range(4, 30), p, q)
        assert report.relation == "scaled_entry"
        assert report.bounded

    def test_leading_coefficient_is_mobius_on_diagonal(self):
        for k in (2, 3):
            for p in enumerate_nc(k):
                report = weingarten_asymptotics(k, [200], p, p)
                # W(p,p) * n^{|p|} -> mu(p,p) = 1: residual/n small
                assert abs(report.rows[0].value * Fraction(200) ** p.block_count() - 1) < Fraction(1, 50)


class TestDk:
    def test_k1_identically_zero(self):
        report = dk_value(1, range(1, 30))
        assert all(v == 0 for _, v in report.values)
        assert report.max_value == 0

    def test_k2_at_4(self):
        report = dk_value(2, [4])
        assert report.values == ((4, Fraction(16, 3)),)

    def test_k2_closed_form_sweep(self):
        # d_2(n) = n * (4/(n-1)) / n ... from the closed form: each of the four
        # cells contributes |W n^{|p|} - mu| = 1/(n-1); total 4/(n-1), times n.
        report = dk_value(2, range(4, 41))
        for n, v in report.values:
            assert v == Fraction(4 * n, n - 1)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_bounded_over_sweep(self, k):
        report = dk_value(k, range(4, 41))
        values = [v for _, v in report.values]
        half = len(values) // 2
        assert max(values[half:]) <= max(values[:half])
