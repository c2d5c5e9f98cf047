"""Descent pipeline: trace functions, Sh_m, theta, matrices, scans, tie-breaks."""

import pytest

from shintani.cyclotomic import Cyclotomic, vector_ratio_root
from shintani.descent import FiniteDescentSession, ScanError, match_bases
from shintani.groups import cyclic, identity_map
from shintani.twist import hermitian

ONE = Cyclotomic.one()
ZERO = Cyclotomic.zero()


@pytest.fixture(scope="module")
def sess_s3(s3):
    return FiniteDescentSession(s3, identity_map(s3))


@pytest.fixture(scope="module")
def sess_z3(z3, z3_inv):
    return FiniteDescentSession(z3, z3_inv)


def test_irrep_family_counts(sess_s3, sess_z3):
    assert len(sess_s3.irrep_family(1)) == 8  # 3 + 2 + 3 over the three forms
    assert len(sess_z3.irrep_family(1)) == 1
    one = cyclic(1)
    triv = FiniteDescentSession(one, identity_map(one))
    assert len(triv.irrep_family(3)) == 1


def test_irrep_family_orthonormal(sess_s3):
    fam = sess_s3.irrep_family(1)
    for i, (_, fi) in enumerate(fam):
        for j, (_, fj) in enumerate(fam):
            assert hermitian(fi, fj) == (ONE if i == j else ZERO)


def test_f_fixed_m1_is_everything(sess_s3):
    assert len(sess_s3.f_fixed(1)) == len(sess_s3.irrep_family(1))


def test_f_fixed_z3_inv_m2(sess_z3):
    fixed = sess_z3.f_fixed(2)
    assert len(fixed) == 1
    lab = fixed[0][0]
    table = sess_z3.form_table(2, lab.form)
    assert all(v == ONE for v in table.rows[lab.row])  # the trivial character


def test_trace_function_norm_one(sess_s3, sess_z3):
    for sess, ms in [(sess_s3, (1, 2)), (sess_z3, (2, 4))]:
        for m in ms:
            for lab, _, _ in sess.f_fixed(m):
                t = sess.trace_function(lab)
                assert hermitian(t, t) == ONE


def test_trace_function_constant_z3(sess_z3):
    lab = sess_z3.f_fixed(2)[0][0]
    t = sess_z3.trace_function(lab)
    assert len(t.values) == 1 and t.values[0].as_root_of_unity() is not None


def test_sh1_identity(sess_s3, sess_z3, d4):
    for sess in (sess_s3, sess_z3, FiniteDescentSession(d4, identity_map(d4))):
        grp, f = sess.group, sess.frob
        for lab, _, _ in sess.f_fixed(1):
            chi = sess.irrep_by_label(lab)
            pull = tuple(chi.value_at((g, grp.mul(h, f(g)))) for g, h in sess.r1f.reps)
            assert sess.sh(1, lab).values == pull


def test_sh_orthonormal_basis(sess_s3):
    for m in (1, 2, 3):
        basis = sess_s3.shintani_basis(m)
        assert len(basis.vectors) == len(sess_s3.r1f)
        for i, v in enumerate(basis.vectors):
            for j, u in enumerate(basis.vectors):
                assert hermitian(v, u) == (ONE if i == j else ZERO)


def test_theta_unitary_and_identity_orbits(sess_s3):
    perm = sess_s3.theta_perm()
    assert sorted(perm) == list(range(len(perm)))
    # orbits with g = identity are fixed: t2(1, h) = (1, h)
    for i, (g, h) in enumerate(sess_s3.r1f.reps):
        if g == 0:
            assert perm[i] == i
    stabs = sess_s3.r1f.stabs
    assert all(stabs[i] == stabs[perm[i]] for i in range(len(perm)))


def test_theta_eigencheck_irreducibles_fail(sess_s3):
    """Some m=1 Shintani vectors for S3 fail to be theta eigenvectors."""
    basis = sess_s3.shintani_basis(1)
    eig = sess_s3.theta_eigencheck(basis.vectors)
    assert any(e is None for e in eig)


def test_shintani_matrix_unitary(sess_s3, sess_z3):
    for sess, m in [(sess_s3, 1), (sess_s3, 2), (sess_z3, 2)]:
        mat = sess.shintani_matrix(m)
        n = len(mat)
        for i in range(n):
            for j in range(n):
                acc = ZERO
                for k in range(len(mat[0])):
                    acc = acc + mat[i][k] * mat[j][k].conjugate()
                assert acc == (ONE if i == j else ZERO)


def test_shintani_matrix_z3_root(sess_z3):
    mat = sess_z3.shintani_matrix(2)
    assert len(mat) == 1 and mat[0][0].as_root_of_unity() is not None


def test_ipf_crosscheck(sess_z3, sess_s3):
    for sess, ms in [(sess_z3, (2,)), (sess_s3, (1, 2))]:
        chars = [lab for lab, _ in sess.irrep_family(1)]
        for m in ms:
            for wl, _, _ in sess.f_fixed(m):
                for vl in chars:
                    assert sess.ipf_crosscheck(m, wl, vl)


def test_ipf_trivial_group():
    triv = cyclic(1)
    sess = FiniteDescentSession(triv, identity_map(triv))
    lab = sess.f_fixed(1)[0][0]
    assert sess.ipf_crosscheck(1, lab, lab)


def test_scan_trivial_group():
    triv = cyclic(1)
    sess = FiniteDescentSession(triv, identity_map(triv))
    res = sess.stabilization_scan(8)
    assert res.m0 == 1 and len(res.almost_characters) == 1


def test_scan_results(sess_z3, z4, z4_inv):
    res = sess_z3.stabilization_scan(48)
    assert res.m0 == 2
    eig = sess_z3.theta_eigencheck(res.almost_characters)
    assert eig == [(0, 1)]
    sess4 = FiniteDescentSession(z4, z4_inv)
    res4 = sess4.stabilization_scan(48)
    assert res4.m0 % sess4.n == 0
    assert all(e is not None for e in sess4.theta_eigencheck(res4.almost_characters))


def test_scan_mmax_too_small(sess_z3):
    with pytest.raises(ScanError):
        sess_z3.stabilization_scan(2)


def test_scan_certificates_are_roots(sess_z3):
    res = sess_z3.stabilization_scan(48)
    for cert in res.certificates.values():
        for _, _, ratio in cert:
            assert ratio.as_root_of_unity() is not None


def test_tie_break_changes_by_mth_root(sess_s3, sess_z3):
    """Overriding the extension tie-break rescales Sh_m(W) by an m-th root only."""
    for sess in (sess_s3, sess_z3):
        for m in (2, 4):
            for lab, _, _ in sess.f_fixed(m):
                a = sess.sh(m, lab, tie_break=0)
                b = sess.sh(m, lab, tie_break=1)
                ratio = vector_ratio_root(a.values, b.values)
                assert ratio is not None
                k, n = ratio.as_root_of_unity()
                assert m % n == 0


def test_match_bases_ambiguity_guard(sess_z3):
    b2 = sess_z3.shintani_basis(2)
    b4 = sess_z3.shintani_basis(4)
    cert = match_bases(b2, b4)
    assert cert is not None and len(cert) == 1


def test_sh_values_independent_of_witness_convention(sess_s3):
    """Trace functions vanish off their form block."""
    for lab, _, _ in sess_s3.f_fixed(2):
        t = sess_s3.trace_function(lab)
        tcm = sess_s3.forms(2).h1
        for (g, h), v in zip(t.space.reps, t.values):
            if tcm.class_of[g] != lab.form:
                assert v.is_zero()
