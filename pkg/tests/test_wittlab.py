"""Witt vector tests.

The operator matrices over F_p are checked against an independent oracle
that computes V, F and restriction directly with the integral Witt
addition/Frobenius polynomials (lift to Z, apply, reduce mod p) and then
converts to orbit coordinates by table lookup against multiples of the
Teichmuller unit.
"""

import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspk.errors import IntegralityViolation
from cuspk.semigroup import Params, TruncationSet, divide_set, truncation_S
from cuspk.wittlab import (
    GhostWittElement,
    frobenius,
    ghost,
    profile,
    relative_k_group,
    restriction,
    teichmuller,
    unghost,
    verschiebung,
    witt_F,
    witt_V,
    witt_add,
    witt_mul,
    witt_neg,
    witt_restrict,
    witt_zero,
)


def divisors_set(n):
    return TruncationSet(d for d in range(1, n + 1) if n % d == 0)


def witt_scale(k, x):
    """k * x via ghost coordinates (k an integer)."""
    gx = ghost(x)
    return unghost(x.S, {n: k * v for n, v in gx.items()})


def random_element(rng, S, lo=-3, hi=3):
    return GhostWittElement.of(S, {n: rng.randint(lo, hi) for n in S})


# --- independent F_p oracle ------------------------------------------------

def reduce_mod(x, p):
    return GhostWittElement.of(x.S, {n: v % p for n, v in x.coords})


def ptypical_table(p, n):
    """coords tuple of k*[1] in W_{{1,p,...,p^{n-1}}}(F_p) -> k."""
    S = TruncationSet(p ** i for i in range(n))
    table = {}
    acc = witt_zero(S)
    for k in range(p ** n):
        key = tuple(v for _, v in reduce_mod(acc, p).coords)
        table[key] = k
        acc = reduce_mod(witt_add(acc, teichmuller(S, 1)), p)
    return table


def orbit_coords(S, p, x):
    """Map x in W_S(F_p) to its orbit coordinates {e: residue mod p^{n_e}}.

    The e-component is the p-typical part of F_e(x), identified with an
    integer residue through k <-> k*[1].
    """
    out = {}
    for e, n_e in profile(S, p).orbits:
        fe = witt_F(S, e, x)
        ptyp = witt_restrict(TruncationSet(p ** i for i in range(n_e)), fe)
        key = tuple(v for _, v in reduce_mod(ptyp, p).coords)
        out[e] = ptypical_table(p, n_e)[key]
    return out


class TestProfiles:
    def test_frozen_examples(self):
        S = truncation_S(Params(2, 3), 0)
        assert profile(S, 2).orbits == ((1, 3), (3, 2))
        assert profile(S, 2).orders == (8, 4)
        assert profile(S, 5).orbits == ((1, 1), (2, 1), (3, 1), (4, 1), (6, 1))
        S1 = truncation_S(Params(2, 3), 1)
        assert profile(S1, 2).orbits == ((1, 4), (3, 3), (5, 2), (7, 1), (9, 1))

    @given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 60))
    def test_length_is_cardinality(self, p, n):
        S = divisors_set(n)
        assert profile(S, p).length == len(S)


class TestOperatorMatrices:
    def test_verschiebung_frozen(self):
        S = truncation_S(Params(2, 3), 0)
        V2 = verschiebung(S, 2, 2)
        assert V2.dom == (4, 2) and V2.cod == (8, 4)
        assert dict(V2.matrix.entries()) == {(0, 0): 2, (1, 1): 2}
        V3 = verschiebung(S, 3, 2)
        assert V3.dom == (4,) and V3.cod == (8, 4)
        assert dict(V3.matrix.entries()) == {(1, 0): 3}

    def test_frobenius_after_verschiebung_is_n(self):
        S = divisors_set(24)
        for p in (2, 3, 5):
            for n in (2, 3, 4, 6, 8, 12):
                comp = frobenius(S, n, p).compose(verschiebung(S, n, p))
                dom = comp.dom
                for (r, c), v in comp.matrix.entries():
                    want = n if r == c else 0
                    assert (v - want) % dom[r] == 0
                for i in range(len(dom)):
                    assert ((comp.matrix.row(i).get(i, 0)) - n) % dom[i] == 0

    def test_restriction_annihilates_verschiebung(self):
        p = Params(2, 3)
        S = truncation_S(p, 1)
        T = TruncationSet(m for m in S if m % 2 and m % 3)
        for prime in (2, 3, 5, 7):
            R = restriction(S, T, prime)
            assert R.compose(verschiebung(S, 2, prime)).is_zero()
            assert R.compose(verschiebung(S, 3, prime)).is_zero()

    @pytest.mark.parametrize("prime,n", [(2, 2), (2, 3), (2, 6), (3, 3), (3, 2), (5, 4)])
    def test_verschiebung_matches_witt_polynomials(self, prime, n):
        S = divisors_set(12)
        Sn = divide_set(S, n)
        V = verschiebung(S, n, prime)
        rng = random.Random(1000 + 7 * prime + n)
        for _ in range(8):
            x = reduce_mod(random_element(rng, Sn, 0, prime - 1), prime)
            lhs = orbit_coords(S, prime, reduce_mod(witt_V(S, n, x), prime))
            xc = orbit_coords(Sn, prime, x)
            prof_d = profile(Sn, prime)
            prof_c = profile(S, prime)
            vec = [xc[e] for e, _ in prof_d.orbits]
            img = V.matrix.matvec(vec)
            for i, (e, n_e) in enumerate(prof_c.orbits):
                assert lhs[e] % prime ** n_e == img[i] % prime ** n_e

    @pytest.mark.parametrize("prime,n", [(2, 2), (2, 3), (2, 6), (3, 3), (3, 4), (5, 2)])
    def test_frobenius_matches_witt_polynomials(self, prime, n):
        S = divisors_set(12)
        Sn = divide_set(S, n)
        F = frobenius(S, n, prime)
        rng = random.Random(2000 + 7 * prime + n)
        for _ in range(8):
            x = reduce_mod(random_element(rng, S, 0, prime - 1), prime)
            lhs = orbit_coords(Sn, prime, reduce_mod(witt_F(S, n, x), prime))
            xc = orbit_coords(S, prime, x)
            vec = [xc[e] for e, _ in profile(S, prime).orbits]
            img = F.matrix.matvec(vec)
            for i, (e, n_e) in enumerate(profile(Sn, prime).orbits):
                assert lhs[e] % prime ** n_e == img[i] % prime ** n_e

    def test_restriction_matches_witt_polynomials(self):
        S = divisors_set(12)
        T = divisors_set(6)
        for prime in (2, 3):
            R = restriction(S, T, prime)
            rng = random.Random(3000 + prime)
            for _ in range(6):
                x = reduce_mod(random_element(rng, S, 0, prime - 1), prime)
                lhs = orbit_coords(T, prime, reduce_mod(witt_restrict(T, x), prime))
                vec = [orbit_coords(S, prime, x)[e] for e, _ in profile(S, prime).orbits]
                img = R.matrix.matvec(vec)
                for i, (e, n_e) in enumerate(profile(T, prime).orbits):
                    assert lhs[e] % prime ** n_e == img[i] % prime ** n_e


class TestRelativeKGroups:
    def test_frozen_small_groups(self):
        assert relative_k_group(Params(2, 3), 5, 0).invariant_factors == (5,)
        assert relative_k_group(Params(2, 3), 2, 0).invariant_factors == (2,)
        assert relative_k_group(Params(2, 3), 3, 0).invariant_factors == (3,)
        assert relative_k_group(Params(2, 3), 5, 2).invariant_factors == (5, 25)
        assert relative_k_group(Params(2, 3), 7, 2).invariant_factors == (7, 49)
        assert relative_k_group(Params(2, 3), 5, 4).invariant_factors == (5, 5, 5, 25)
        assert relative_k_group(Params(3, 4), 5, 0).invariant_factors == (5, 25)

    def test_odd_and_negative_degrees_vanish(self):
        for q in (-2, -1, 1, 3, 5):
            res = relative_k_group(Params(2, 3), 5, q)
            assert res.invariant_factors == () and res.length == 0

    def test_perfect_field_flag(self):
        assert relative_k_group(Params(2, 3), 2, 2).perfect_field_only
        assert relative_k_group(Params(2, 3), 3, 2).perfect_field_only
        assert not relative_k_group(Params(2, 3), 5, 2).perfect_field_only
        assert relative_k_group(Params(3, 5), 5, 0).perfect_field_only

    def test_length_formula_sweep(self):
        # the function itself raises TheoremViolation on any mismatch
        for (a, b) in [(2, 3), (2, 5), (3, 4), (3, 5)]:
            for prime in (2, 3, 5, 7):
                for r in range(3):
                    res = relative_k_group(Params(a, b), prime, 2 * r)
                    assert res.length == (2 * r + 1) * (a - 1) * (b - 1) // 2
                    assert res.group.group(2 * r) == (0, res.invariant_factors)


class TestGhostArithmetic:
    def test_teichmuller_ghost(self):
        S = divisors_set(12)
        g = ghost(teichmuller(S, 2))
        assert g == {n: 2 ** n for n in [1, 2, 3, 4, 6, 12]}

    def test_frozen_sum_and_product(self):
        S = TruncationSet([1, 2])
        s = witt_add(teichmuller(S, 2), teichmuller(S, 3))
        assert s.coords == ((1, 5), (2, -6))
        m = witt_mul(teichmuller(S, 2), teichmuller(S, 3))
        assert m.coords == ((1, 6), (2, 0))

    def test_frobenius_of_teichmuller(self):
        S = divisors_set(8)
        assert witt_F(S, 2, teichmuller(S, 3)) == teichmuller(divide_set(S, 2), 9)

    def test_unghost_integrality_violation(self):
        S = TruncationSet([1, 2])
        with pytest.raises(IntegralityViolation):
            unghost(S, {1: 0, 2: 1})

    @given(st.sampled_from([6, 8, 12, 24, 30]), st.integers(0, 10 ** 6))
    @settings(max_examples=60)
    def test_ghost_round_trip(self, n, seed):
        S = divisors_set(n)
        x = random_element(random.Random(seed), S)
        assert unghost(S, ghost(x)) == x

    def test_ring_axioms_seeded(self):
        S = divisors_set(24)
        rng = random.Random(42)
        for _ in range(40):
            x, y, z = (random_element(rng, S) for _ in range(3))
            assert witt_add(x, y) == witt_add(y, x)
            assert witt_mul(x, y) == witt_mul(y, x)
            assert witt_add(witt_add(x, y), z) == witt_add(x, witt_add(y, z))
            assert witt_mul(witt_mul(x, y), z) == witt_mul(x, witt_mul(y, z))
            assert witt_mul(x, witt_add(y, z)) == witt_add(witt_mul(x, y), witt_mul(x, z))
            assert witt_add(x, witt_neg(x)) == witt_zero(S)
            assert witt_mul(x, teichmuller(S, 1)) == x

    def test_operator_identities_seeded(self):
        S = divisors_set(24)
        rng = random.Random(99)
        pairs = [(2, 3), (2, 2), (3, 4), (2, 12), (4, 6), (3, 8)]
        for _ in range(25):
            for m, n in pairs:
                x = random_element(rng, S)
                # F_m F_n = F_mn
                a1 = witt_F(divide_set(S, n), m, witt_F(S, n, x))
                assert a1 == witt_F(S, m * n, x)
                # V_n V_m = V_nm
                y = random_element(rng, divide_set(S, m * n))
                b1 = witt_V(S, n, witt_V(divide_set(S, n), m, y))
                assert b1 == witt_V(S, n * m, y)
                # F_n V_n = n
                z = random_element(rng, divide_set(S, n))
                assert witt_F(S, n, witt_V(S, n, z)) == witt_scale(n, z)
                # projection formula x * V_n(y) = V_n(F_n(x) * y)
                w = random_element(rng, divide_set(S, n))
                lhs = witt_mul(x, witt_V(S, n, w))
                rhs = witt_V(S, n, witt_mul(witt_F(S, n, x), w))
                assert lhs == rhs
            m, n = 2, 3
            # F_m V_n = V_n F_m for coprime m, n
            u = random_element(rng, divide_set(S, n))
            lhs = witt_F(divide_set(S, n), m, u)
            lhs = witt_V(divide_set(S, m), n, lhs)
            assert lhs == witt_F(S, m, witt_V(S, n, u))
