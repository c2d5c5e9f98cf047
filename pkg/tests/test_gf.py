"""Field towers: construction, Frobenius, subfield levels, linearized solving."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shintani.gf import FieldTower, TowerCapError, build_tower, is_prime


def test_build_tower_examples():
    t = build_tower(2, {1, 2})
    assert t.order == 4
    assert t.level(1) == (0, 1)
    t2 = build_tower(2, {1, 2, 4})
    assert t2.order == 16
    assert len(t2.level(2)) == 4  # solutions of x^4 = x
    t3 = build_tower(3, {1})
    assert t3.order == 3


def test_subfield_sizes_by_enumeration():
    t = FieldTower(2, 6)
    for d in (1, 2, 3, 6):
        assert len(t.level(d)) == 2 ** d


def test_bad_prime_and_cap():
    with pytest.raises(ValueError):
        build_tower(4, {1})
    with pytest.raises(TowerCapError):
        FieldTower(2, 30)


def test_frobenius_examples():
    t = FieldTower(2, 2)
    for x in t.level(1):
        assert t.frobenius_power(x, 2, 5) == x  # prime field fixed
    others = [x for x in t.level(2) if x not in t.level(1)]
    assert [t.frobenius_power(x, 2, 1) for x in others] == others[::-1]
    assert all(t.frobenius_power(x, 2, 0) == x for x in range(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=255), st.integers(min_value=1, max_value=5),
       st.integers(min_value=1, max_value=5))
def test_frobenius_power_composition(x, m, mp):
    t = FieldTower(2, 8)
    y = x
    for _ in range(mp):
        y = t.frobenius_power(y, 2, m)
    assert y == t.frobenius_power(x, 2, m * mp)


def test_field_arithmetic_consistency():
    t = FieldTower(3, 2)
    nonzero = [x for x in range(t.order) if x]
    for x in nonzero:
        assert t.mul(x, t.inv(x)) == 1
    for x in range(t.order):
        assert t.add(x, t.neg(x)) == 0
        assert t.mul(x, 1) == x


def test_solve_linearized_examples():
    t = FieldTower(2, 2)
    # x^2 + x = 0 over F_2: the Artin-Schreier kernel {0, 1}
    assert t.solve_linearized([(1, 1), (0, 1)], 0, 1) == [0, 1]
    # x^2 + x = 1: empty at level 1, the two elements of F_4 \ F_2 at level 2
    assert t.solve_linearized([(1, 1), (0, 1)], 1, 1) == []
    sols = t.solve_linearized([(1, 1), (0, 1)], 1, 2)
    assert sols == [x for x in t.level(2) if x not in t.level(1)]
    # identity map
    assert t.solve_linearized([(0, 1)], 3, 2) == [3]


def test_solutions_form_kernel_coset():
    t = FieldTower(2, 4)
    terms = [(1, 1), (0, 1)]
    kernel = set(t.solve_linearized(terms, 0, 4))
    for c in range(16):
        sols = t.solve_linearized(terms, c, 4)
        if sols:
            base = sols[0]
            assert {t.sub(s, base) for s in sols} == kernel


def test_level_validation():
    t = FieldTower(2, 4)
    with pytest.raises(ValueError):
        t.level(3)


def test_is_prime():
    assert [n for n in range(2, 20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
