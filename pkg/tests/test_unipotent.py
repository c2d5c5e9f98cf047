"""Connected-unipotent sessions: Lang solving, descent, scan, cross-checks."""

import random

import pytest

from shintani.chartab import character_table
from shintani.cyclotomic import Cyclotomic
from shintani.gf import FieldTower
from shintani.groups import ValidationError, unitriangular
from shintani.twist import hermitian
from shintani.unipotent import (EscalationError, UnipotentDescentSession, lang_solve,
                                unipotent_scan, ut_frob, ut_inv, ut_mul)

ONE = Cyclotomic.one()
ZERO = Cyclotomic.zero()


def test_lang_identity():
    tower = FieldTower(2, 4)
    assert lang_solve(tower, 3, 1, 1, (0, 0, 0)) == (0, 0, 0)


@pytest.mark.parametrize("p,k,m", [(2, 1, 1), (2, 1, 2), (2, 2, 1), (2, 2, 2)])
def test_lang_random_rhs(p, k, m):
    rng = random.Random(20 + k + m)
    tower = FieldTower(p, 4 * k * m)
    gm = unitriangular(3, tower, k * m)
    for _ in range(100):
        g = gm.elements[rng.randrange(gm.order)]
        z = lang_solve(tower, 3, k, m, g)
        assert ut_frob(z, tower, k * m) == ut_mul(z, g, tower, 3)


def test_lang_escalation_error():
    tower = FieldTower(2, 2)  # too small to escalate for the (1,3) entry
    with pytest.raises(EscalationError):
        for g in unitriangular(3, tower, 2).elements:
            lang_solve(tower, 3, 2, 1, g)


def test_ut_ops_roundtrip():
    tower = FieldTower(2, 4)
    rng = random.Random(9)
    for _ in range(50):
        a = tuple(rng.randrange(16) for _ in range(3))
        assert ut_mul(a, ut_inv(a, tower, 3), tower, 3) == (0, 0, 0)


@pytest.fixture(scope="module")
def sess1():
    return UnipotentDescentSession(3, 2, 1, 1)


@pytest.fixture(scope="module")
def sess2():
    return UnipotentDescentSession(3, 2, 1, 2)


def test_dimensions(sess1, sess2):
    assert len(sess1.space1) == 5  # conjugacy classes of U(3, F_2)
    assert sess2.gm.order == 64
    assert len(sess2.f_fixed()) == 5  # = dim Fun(G^F / ~) by the norm bijection


def test_gram_identity(sess1, sess2):
    for sess in (sess1, sess2):
        basis = sess.shintani_basis()
        assert len(basis.vectors) == len(sess.space1)
        for i, v in enumerate(basis.vectors):
            for j, u in enumerate(basis.vectors):
                assert hermitian(v, u) == (ONE if i == j else ZERO)


def test_sh1_identity_connected(sess1):
    """Sh_1 = t2* chi: the basis at m=1 is the theta-pullback of Irr(G^F)."""
    perm = sess1.theta_perm()
    table = character_table(sess1.g1)
    basis = sess1.shintani_basis()
    for lab, vec in zip(basis.labels, basis.vectors):
        pull = tuple(table.rows[lab.row][perm[i]] for i in range(len(perm)))
        assert vec.values == pull


def test_ipf_connected(sess1, sess2):
    for sess in (sess1, sess2):
        for w in sess.f_fixed():
            for vrow in range(len(sess.space1)):
                assert sess.ipf_crosscheck(w, vrow)


def test_theta_is_permutation(sess1):
    perm = sess1.theta_perm()
    assert sorted(perm) == list(range(len(perm)))


def test_scan_connected():
    res = unipotent_scan(3, 2, 1, m_max=48)
    assert res.m0 == 1
    assert len(res.almost_characters) == 5
    for cert in res.certificates.values():
        for _, _, ratio in cert:
            assert ratio.as_root_of_unity() is not None


def test_scan_rejects_nonprime_base():
    with pytest.raises(ValidationError):
        unipotent_scan(3, 2, 2, m_max=8)


def test_tie_break_shifts_by_mth_root(sess2):
    from shintani.cyclotomic import vector_ratio_root
    for lab in sess2.f_fixed():
        a = sess2.sh(lab, tie_break=0)
        b = sess2.sh(lab, tie_break=1)
        ratio = vector_ratio_root(a.values, b.values)
        assert ratio is not None
        _, n = ratio.as_root_of_unity()
        assert 2 % n == 0
