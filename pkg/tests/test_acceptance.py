"""Acceptance suite: one test per criterion, exact (zero-tolerance) arithmetic.

Test pairs: (Z/3, inv), (Z/4, inv), (S_3, id), (S_3, ad((12))), (D_4, id) in
finite-model mode, plus unitriangular(3, F_2) with the q=2 Frobenius on the
connected path.  Every check is an exact equality in Q(zeta_N); there are no
tolerances to pin.  Each test prints one PASS line on success.
"""

import json
import random

import pytest

from shintani.chartab import character_table
from shintani.cyclotomic import Cyclotomic, vector_ratio_root
from shintani.descent import FiniteDescentSession
from shintani.doubles import (cs_trace_function, double_simples, integrality_report,
                              sigma_action, verify_theorem_iii)
from shintani.gf import FieldTower
from shintani.groups import (automorphism, cyclic, identity_map, inner_map,
                             permutation_group, unitriangular)
from shintani.twist import (ClassFunctionFamily, convolve, hermitian, r_space,
                            trace_identity_check, twisted_classes, unit_function)
from shintani.unipotent import UnipotentDescentSession, lang_solve, unipotent_scan, ut_frob, ut_mul

ONE = Cyclotomic.one()
ZERO = Cyclotomic.zero()


def _pairs():
    z3 = cyclic(3)
    z4 = cyclic(4)
    s3 = permutation_group([(1, 0, 2), (1, 2, 0)])
    d4 = permutation_group([(1, 2, 3, 0), (1, 0, 3, 2)])
    return [
        ("(Z3,inv)", z3, automorphism(z3, [z3.index[2]])),
        ("(Z4,inv)", z4, automorphism(z4, [z4.index[3]])),
        ("(S3,id)", s3, identity_map(s3)),
        ("(S3,ad12)", s3, inner_map(s3, 1)),
        ("(D4,id)", d4, identity_map(d4)),
    ]


@pytest.fixture(scope="module")
def sessions():
    return [(name, FiniteDescentSession(g, f)) for name, g, f in _pairs()]


@pytest.fixture(scope="module")
def scans(sessions):
    return [(name, sess, sess.stabilization_scan(48)) for name, sess in sessions]


@pytest.fixture(scope="module")
def connected_sessions():
    return {m: UnipotentDescentSession(3, 2, 1, m) for m in (1, 2, 4)}


def _gram_identity(vectors):
    return all(hermitian(v, u) == (ONE if i == j else ZERO)
               for i, v in enumerate(vectors) for j, u in enumerate(vectors))


def test_criterion_01_orthonormality(sessions):
    """Gram(Sh_m basis) = identity, exactly, for each computed m."""
    for name, sess in sessions:
        for m in sorted({1, 2, sess.n, 2 * sess.n}):
            basis = sess.shintani_basis(m)
            assert len(basis.vectors) == len(sess.r1f), (name, m)
            assert _gram_identity(basis.vectors), (name, m)
    print("ACCEPTANCE 1 orthonormality: PASS")


def test_criterion_02_sh1_identity(sessions):
    """Sh_1(W) = t2* chi_W exactly for every W on every pair."""
    for name, sess in sessions:
        grp, f = sess.group, sess.frob
        for lab, _, _ in sess.f_fixed(1):
            chi = sess.irrep_by_label(lab)
            pull = tuple(chi.value_at((g, grp.mul(h, f(g)))) for g, h in sess.r1f.reps)
            assert sess.sh(1, lab).values == pull, (name, lab)
    print("ACCEPTANCE 2 sh1-identity: PASS")


def test_criterion_03_inner_product_formula(sessions):
    """ipf_crosscheck passes for all (m <= 4, W, V), exact equality."""
    total = 0
    for name, sess in sessions:
        chars = [lab for lab, _ in sess.irrep_family(1)]
        for m in (1, 2, 3, 4):
            for wl, _, _ in sess.f_fixed(m):
                for vl in chars:
                    assert sess.ipf_crosscheck(m, wl, vl), (name, m, wl, vl)
                    total += 1
    print(f"ACCEPTANCE 3 inner-product-formula: PASS ({total} triples)")


def test_criterion_04_twisting_operator(sessions):
    """Theta is unitary and Theta T_C = theta_C^{-1} T_C for every fixed simple."""
    for name, sess in sessions:
        perm = sess.theta_perm()
        assert sorted(perm) == list(range(len(perm))), name
        assert all(sess.r1f.stabs[i] == sess.r1f.stabs[perm[i]]
                   for i in range(len(perm))), name
        simples = double_simples(sess.group)
        _, fixed = sigma_action(sess.group, simples, sess.frob)
        for i, u in fixed:
            t = cs_trace_function(sess.group, simples[i], sess.frob, u)
            expected = simples[i].twist.inverse()
            assert sess.theta_apply(t).values == tuple(expected * v for v in t.values), \
                (name, i)
    print("ACCEPTANCE 4 twisting-operator: PASS")


def test_criterion_05_stabilization(scans):
    """The scan certifies some m0 <= 48 on every pair; m0 is reported, not asserted."""
    found = {}
    for name, sess, res in scans:
        assert res.m0 <= 48
        assert 2 * res.m0 in res.certificates
        for cert in res.certificates.values():
            assert len(cert) == len(res.basis.vectors)
            for _, _, ratio in cert:
                assert ratio.as_root_of_unity() is not None
        found[name] = res.m0
    res_c = unipotent_scan(3, 2, 1, m_max=48)
    assert res_c.m0 <= 48
    found["unitriangular(3,F2) connected"] = res_c.m0
    print(f"ACCEPTANCE 5 stabilization: PASS (discovered m0: {found})")


def test_criterion_06_almost_characters_theta_eigen(scans):
    """Almost characters are Theta eigenvectors with root-of-unity eigenvalues."""
    for name, sess, res in scans:
        eig = sess.theta_eigencheck(res.almost_characters)
        assert all(e is not None for e in eig), name
    print("ACCEPTANCE 6 almost-theta-eigenvectors: PASS")


def test_criterion_07_sheaf_matching(scans):
    """Perfect matching CS(G)^F <-> almost characters with unit ratios; counts agree."""
    for name, sess, res in scans:
        rep = verify_theorem_iii(sess, res.almost_characters)
        assert rep["pass"], (name, rep["unmatched_residue"])
        assert rep["count_match"], name
        assert len(sess.irrep_family(1)) == rep["fixed_simples"], name
        if name == "(S3,id)":
            assert rep["fixed_simples"] == 8
    print("ACCEPTANCE 7 sheaf-matching: PASS")


def test_criterion_08_integrality():
    """Integer dims, sum dim^2 = |G|^2, root-of-unity twists, |G| <= 64."""
    t2 = FieldTower(2, 2)
    groups = [cyclic(1), cyclic(2), cyclic(3), cyclic(4),
              permutation_group([(1, 0, 2), (1, 2, 0)]),
              permutation_group([(1, 2, 3, 0), (1, 0, 3, 2)]),
              unitriangular(3, FieldTower(2, 1), 1),
              unitriangular(3, t2, 2)]
    for g in groups:
        assert g.order <= 64
        rep = integrality_report(g)
        assert rep["pass"], (g.kind, rep)
    print("ACCEPTANCE 8 integrality: PASS")


def test_criterion_09_trace_identity(sessions):
    """The module-trace identity holds for 100 random dims vectors per pair."""
    rng = random.Random(91)
    for name, sess in sessions:
        h1 = twisted_classes(sess.group, sess.frob)
        for _ in range(100):
            dims = [rng.randint(0, 9) for _ in h1.reps]
            assert trace_identity_check(sess.group, sess.frob, dims), (name, dims)
    print("ACCEPTANCE 9 trace-identity: PASS")


def test_criterion_10_algebra_structure(sessions):
    """Convolution: commutative, associative, unital; t1-pullback is a module map."""
    rng = random.Random(92)
    for name, sess in sessions:
        grp, f = sess.group, sess.frob
        space = sess.r1f
        space_ff = r_space(grp, f, f)

        def rand_fn(sp):
            vals = []
            for _ in range(len(sp)):
                c = Cyclotomic.rational(rng.randint(-2, 2))
                if rng.random() < 0.3:
                    c = c + Cyclotomic.zeta(4) * rng.randint(-1, 1)
                vals.append(c)
            return ClassFunctionFamily(sp, tuple(vals))

        unit = unit_function(space)
        for _ in range(100):
            a, b, c = rand_fn(space), rand_fn(space), rand_fn(space)
            assert convolve(a, b).values == convolve(b, a).values, name
            assert convolve(convolve(a, b), c).values == convolve(a, convolve(b, c)).values, name
            assert convolve(unit, a).values == a.values, name
            f2 = rand_fn(space_ff)
            t1_f2 = ClassFunctionFamily(space, tuple(
                f2.value_at((grp.mul(h, f(g)), h)) for g, h in space.reps))
            conv = convolve(a, f2)
            rhs = tuple(conv.value_at((grp.mul(h, f(g)), h)) for g, h in space.reps)
            assert convolve(a, t1_f2).values == rhs, name
    print("ACCEPTANCE 10 algebra-structure: PASS")


def test_criterion_11_connected_path(connected_sessions):
    """Lang solutions verify by substitution; the pipeline runs at m in {1,2,4}."""
    rng = random.Random(93)
    for p, k in ((2, 1), (2, 2)):
        tower = FieldTower(p, 4 * k)
        gm = unitriangular(3, tower, k)
        for _ in range(100):
            g = gm.elements[rng.randrange(gm.order)]
            z = lang_solve(tower, 3, k, 1, g)
            assert ut_frob(z, tower, k) == ut_mul(z, g, tower, 3)
    for m, sess in connected_sessions.items():
        basis = sess.shintani_basis()
        assert len(basis.vectors) == len(sess.space1), m
        assert _gram_identity(basis.vectors), m
        if m == 1:
            perm = sess.theta_perm()
            table = character_table(sess.g1)
            for lab, vec in zip(basis.labels, basis.vectors):
                pull = tuple(table.rows[lab.row][perm[i]] for i in range(len(perm)))
                assert vec.values == pull
    print("ACCEPTANCE 11 connected-path: PASS (m in {1,2,4})")


def test_criterion_12_determinism(tmp_path):
    """Byte-identical reruns; tie-break override shifts only by roots of unity."""
    from shintani.cli import SessionConfig, run_command
    spec = tmp_path / "z3.json"
    spec.write_text(json.dumps({"kind": "cyclic", "n": 3, "automorphism": {"images": [2]}}))
    for cmd, cfg_kwargs in [("scan", {"m_max": 8}), ("shintani", {"m": 2}),
                            ("csheaf", {}), ("classes", {})]:
        a = run_command(cmd, SessionConfig(spec_path=str(spec), **cfg_kwargs))
        b = run_command(cmd, SessionConfig(spec_path=str(spec), **cfg_kwargs))
        assert a == b, cmd

    sess0 = FiniteDescentSession(*_pairs()[2][1:], tie_break=0)
    sess1 = FiniteDescentSession(*_pairs()[2][1:], tie_break=1)
    for m in (2, 4):
        for (lab, _, _) in sess0.f_fixed(m):
            ratio = vector_ratio_root(sess0.sh(m, lab).values, sess1.sh(m, lab).values)
            assert ratio is not None
            _, n = ratio.as_root_of_unity()
            assert m % n == 0, (m, lab, ratio)
    print("ACCEPTANCE 12 determinism: PASS")
