import json
from math import gcd

import pytest

from cuspk.errors import PreconditionViolation, WeightOutOfRange
from cuspk.polytopelab import (FAILS_CANDIDATE, HOLDS, UNDECIDED, UNSUPPORTED,
                               ExponentPolytope, IndexFunction, Verdict,
                               _cyclotomic, _zeta_powers, check_c1,
                               check_c2_c3, check_c4, escalate,
                               index_functions, q_union, run_conjecture_checks)
from cuspk.semigroup import Params, weights

P23 = Params(2, 3)
P25 = Params(2, 5)
P34 = Params(3, 4)


class TestIndexFunctions:
    def test_pentagon_weight(self):
        fns = index_functions(P23, 5, 3)
        assert len(fns) == 5
        assert all(f.alpha == 1 and f.beta == 1 for f in fns)
        assert sorted(f.vertex_exponents for f in fns) == [
            (0, 2), (1, 3), (2, 4), (3, 0), (4, 1)]

    def test_single_increment(self):
        fns = index_functions(P23, 2, 1)
        assert [(f.word, f.vertex_exponents) for f in fns] == [
            ((2,), (0,)), ((2,), (1,))]

    def test_endpoint_weight_is_pure_a(self):
        # weight c*m/a has beta = 0, so the word is a repeated
        fns = index_functions(P23, 8, 4)
        assert {f.word for f in fns} == {(2, 2, 2, 2)}
        assert all(f.alpha == 4 and f.beta == 0 for f in fns)

    def test_word_content(self):
        for m in (5, 6, 8, 12):
            data = weights(P23, m)
            for n in data.closed_weights:
                for f in index_functions(P23, m, n):
                    assert f.word.count(2) == f.alpha
                    assert f.word.count(3) == f.beta
                    assert sum(f.word) == m
                    assert len(f.vertex_exponents) == f.alpha + f.beta

    def test_out_of_range(self):
        with pytest.raises(WeightOutOfRange):
            index_functions(P23, 5, 2)


class TestQUnion:
    def test_pentagon(self):
        polys = q_union(P23, 5)
        assert [q.vertex_exponents for q in polys] == [
            (0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]
        assert all(q.weights == (3,) for q in polys)

    def test_gap_weight_empty(self):
        assert q_union(P23, 1) == []

    def test_two_weights(self):
        polys = q_union(P23, 6)
        assert [q.vertex_exponents for q in polys] == [
            (0, 2, 4), (0, 3), (1, 3, 5), (1, 4), (2, 5)]
        assert all(q.weights == (3, 4) for q in polys)


class TestOriginCheck:
    def test_pentagon_holds(self):
        v = check_c1(P23, 5, precision=128)
        assert v.status == HOLDS
        assert v.precision_bits == 128
        assert len(v.witness["separators"]) == 5

    def test_one_interior_weight_holds(self):
        assert check_c1(P23, 12, precision=128).status == HOLDS

    def test_vacuous(self):
        v = check_c1(P23, 1)
        assert v.status == HOLDS
        assert v.precision_bits == 0
        assert "vacuous" in v.witness

    @pytest.mark.parametrize("m", [2, 5, 8])
    def test_monotone_in_precision(self, m):
        lo = check_c1(P23, m, precision=64)
        hi = check_c1(P23, m, precision=256)
        if lo.status != UNDECIDED and hi.status != UNDECIDED:
            assert lo.status == hi.status

    def test_json_round_trip(self):
        row = check_c1(P23, 5).to_json()
        assert json.loads(json.dumps(row)) == row


class TestSummandChecks:
    def test_degenerate_a_case(self):
        v = check_c2_c3(P23, 2)
        assert v.status == HOLDS
        assert v.precision_bits == 0
        assert sorted(v.witness["a"]["intersections"]) == ["0", "1"]

    @pytest.mark.parametrize("m", [4, 8, 10])
    def test_a_divides(self, m):
        v = check_c2_c3(P23, m)
        assert v.status == HOLDS
        assert set(v.witness) == {"a"}
        assert len(v.witness["a"]["intersections"]) == 2

    def test_b_divides(self):
        v = check_c2_c3(P23, 9)
        assert v.status == HOLDS
        assert set(v.witness) == {"b"}
        assert len(v.witness["b"]["intersections"]) == 3

    def test_both_divide(self):
        v = check_c2_c3(P23, 6)
        assert v.status == HOLDS
        assert set(v.witness) == {"a", "b"}

    def test_precondition(self):
        with pytest.raises(PreconditionViolation):
            check_c2_c3(P23, 5)


class TestEdgeCoverage:
    def test_pentagon(self):
        v = check_c4(P23, 5)
        assert v.status == HOLDS
        assert len(v.witness["edges"]) == 5

    @pytest.mark.parametrize("p,m", [(P23, 7), (P34, 7), (P25, 9)])
    def test_rank_one_holds(self, p, m):
        assert check_c4(p, m).status == HOLDS

    def test_higher_dimension_unsupported(self):
        v = check_c4(P23, 11)
        assert v.status == UNSUPPORTED
        assert v.precision_bits == 0

    def test_vacuous(self):
        assert check_c4(P23, 1).status == HOLDS

    def test_precondition(self):
        with pytest.raises(PreconditionViolation):
            check_c4(P23, 6)


class TestExactHelpers:
    def test_cyclotomic_polynomials(self):
        assert _cyclotomic(1) == (-1, 1)
        assert _cyclotomic(2) == (1, 1)
        assert _cyclotomic(6) == (1, -1, 1)
        assert _cyclotomic(12) == (1, 0, -1, 0, 1)

    def test_powers_sum_to_zero(self):
        for m in (2, 3, 5, 6, 12):
            rows = _zeta_powers(m)
            deg = len(rows[0])
            assert [sum(r[k] for r in rows) for k in range(deg)] == [0] * deg

    def test_projection_steps(self):
        # multiplying a vertex exponent by a weight steps by j' and -i'
        for p in (P23, P25, P34):
            for m in range(1, 20):
                data = weights(p, m)
                for n, e in data.entries.items():
                    assert (p.a * n - e.j) % m == 0
                    assert (p.b * n + e.i) % m == 0
                    assert e.q == gcd(m, n) == gcd(e.i, e.j)


class TestDriver:
    def test_statement_selection(self):
        assert set(run_conjecture_checks(P23, 5)) == {"c1", "c4"}
        assert set(run_conjecture_checks(P23, 6)) == {"c1", "c2", "c3"}
        assert set(run_conjecture_checks(P23, 8)) == {"c1", "c2"}
        assert set(run_conjecture_checks(P23, 9)) == {"c1", "c3"}

    def test_small_sweep_all_hold(self):
        for m in range(1, 11):
            for key, verdict in run_conjecture_checks(P23, m, cap=256).items():
                assert verdict.status in (HOLDS, UNSUPPORTED), (m, key)

    def test_escalation_stops_at_cap(self):
        # a decided verdict comes back untouched whatever the cap
        v = escalate(check_c1, P23, 5, start=64, cap=128)
        assert v.status == HOLDS
        assert v.precision_bits in (64, 128)
