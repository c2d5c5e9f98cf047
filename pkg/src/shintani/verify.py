"""Programmatic verification checks mirroring the acceptance suite.

Each check returns (name, passed, detail).  `run_all` executes the suite for
one configured group and reports per-check lines; the CLI `verify` command
prints them and folds the result into its exit code.
"""

from __future__ import annotations

import random

from .cyclotomic import Cyclotomic
from .descent import FiniteDescentSession, ScanError
from .doubles import integrality_report, verify_theorem_iii
from .twist import (ClassFunctionFamily, convolve, hermitian, r_space,
                    trace_identity_check, twisted_classes, unit_function)


def _gram_is_identity(vectors):
    for i, v in enumerate(vectors):
        for j, u in enumerate(vectors):
            if hermitian(v, u) != Cyclotomic.rational(1 if i == j else 0):
                return False
    return True


def check_orthonormality(sess: FiniteDescentSession, ms):
    for m in ms:
        basis = sess.shintani_basis(m)
        if len(basis.vectors) != len(sess.r1f):
            return False, f"m={m}: basis size {len(basis.vectors)} != dim {len(sess.r1f)}"
        if not _gram_is_identity(basis.vectors):
            return False, f"m={m}: Gram matrix is not the identity"
    return True, f"Gram(Sh_m)=I for m in {sorted(ms)}"

def check_sh1(sess: FiniteDescentSession):
    grp, f = sess.group, sess.frob
    for lab, _, _ in sess.f_fixed(1):
        chi = sess.irrep_by_label(lab)
        pull = tuple(chi.value_at((g, grp.mul(h, f(g)))) for g, h in sess.r1f.reps)
        if sess.sh(1, lab).values != pull:
            return False, f"Sh_1 != t2*chi at {lab}"
    return True, "Sh_1 = t2*chi for every W"

def check_ipf(sess: FiniteDescentSession, max_m=4):
    count = 0
    for m in range(1, max_m + 1):
        chars = [lab for lab, _ in sess.irrep_family(1)]
        for wl, _, _ in sess.f_fixed(m):
            for vl in chars:
                if not sess.ipf_crosscheck(m, wl, vl):
                    return False, f"inner product formula fails at m={m}, {wl}, {vl}"
                count += 1
    return True, f"inner-product formula exact on {count} (m,W,V) triples"

def check_theta_unitary(sess: FiniteDescentSession):
    perm = sess.theta_perm()
    if sorted(perm) != list(range(len(perm))):
        return False, "theta is not a permutation of orbits"
    stabs = sess.r1f.stabs
    if any(stabs[i] != stabs[perm[i]] for i in range(len(perm))):
        return False, "theta does not preserve stabilizer orders"
    return True, "theta is a stabilizer-preserving orbit permutation (unitary)"

def check_scan(sess: FiniteDescentSession, m_max):
    try:
        res = sess.stabilization_scan(m_max)
    except ScanError as e:
        return False, str(e), None
    return True, f"stabilized at m0={res.m0} with {len(res.almost_characters)} almost characters", res

def check_theta_eigen(sess: FiniteDescentSession, res):
    eig = sess.theta_eigencheck(res.almost_characters)
    if any(e is None for e in eig):
        return False, "an almost character is not a theta eigenvector with unit eigenvalue"
    return True, f"eigenvalues {sorted(set(eig))}"

def check_theorem_iii(sess: FiniteDescentSession, res):
    rep = verify_theorem_iii(sess, res.almost_characters)
    if not rep["pass"]:
        return False, f"matching failed: {rep['unmatched_residue']}"
    return True, f"{rep['fixed_simples']} fixed sheaves matched bijectively"

def check_integrality(group):
    rep = integrality_report(group)
    return rep["pass"], f"{rep['simples']} simples, sum dim^2 = {rep['sum_dim_squared']}"

def check_trace_identity(sess: FiniteDescentSession, trials=100, seed=2026):
    rng = random.Random(seed)
    h1 = twisted_classes(sess.group, sess.frob)
    for _ in range(trials):
        dims = [rng.randint(0, 9) for _ in h1.reps]
        if not trace_identity_check(sess.group, sess.frob, dims):
            return False, f"trace identity fails for dims {dims}"
    return True, f"{trials} random dimension vectors"

def check_algebra(sess: FiniteDescentSession, trials=100, seed=2027):
    rng = random.Random(seed)
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
    for _ in range(trials):
        a, b, c = rand_fn(space), rand_fn(space), rand_fn(space)
        if convolve(a, b).values != convolve(b, a).values:
            return False, "commutativity fails"
        if convolve(convolve(a, b), c).values != convolve(a, convolve(b, c)).values:
            return False, "associativity fails"
        if convolve(unit, a).values != a.values:
            return False, "unit law fails"
        # t1-pullback is a module map: f1 * t1^*f2 = t1^*(f1 * f2)
        f2 = rand_fn(space_ff)
        t1_f2 = ClassFunctionFamily(space, tuple(
            f2.value_at((grp.mul(h, f(g)), h)) for g, h in space.reps))
        lhs = convolve(a, t1_f2)
        conv = convolve(a, f2)
        rhs = tuple(conv.value_at((grp.mul(h, f(g)), h)) for g, h in space.reps)
        if lhs.values != rhs:
            return False, "t1-pullback module identity fails"
    return True, f"{trials} random triples (commutative, associative, unital, module map)"


def run_all(group, frob, m_max=48, suite="full"):
    """[(criterion, passed, detail)] for the finite-model suite of one pair."""
    sess = FiniteDescentSession(group, frob)
    out = []
    ms = sorted({1, 2, sess.n, 2 * sess.n})
    if suite in ("full", "basis"):
        out.append(("orthonormality",) + check_orthonormality(sess, ms))
        out.append(("sh1-identity",) + check_sh1(sess))
    if suite in ("full", "ipf"):
        out.append(("inner-product-formula",) + check_ipf(sess))
    if suite in ("full", "theta"):
        out.append(("theta-unitary",) + check_theta_unitary(sess))
    scan_res = None
    if suite in ("full", "scan"):
        ok, detail, scan_res = check_scan(sess, m_max)
        out.append(("stabilization", ok, detail))
        if ok:
            out.append(("almost-theta-eigen",) + check_theta_eigen(sess, scan_res))
            out.append(("sheaf-matching",) + check_theorem_iii(sess, scan_res))
    if suite in ("full", "double"):
        out.append(("integrality",) + check_integrality(group))
    if suite in ("full", "trace"):
        out.append(("trace-identity",) + check_trace_identity(sess))
    if suite in ("full", "algebra"):
        out.append(("algebra-structure",) + check_algebra(sess))
    return out
