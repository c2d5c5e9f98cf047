"""The descent pipeline: twisted trace functions, Sh_m, the twisting operator,
the inner-product cross-check, and the stabilization scan producing almost
characters.

A `FiniteDescentSession` fixes (Gamma, F) in finite-model mode and caches the
per-level data: pure inner forms of F^m, their tables, the F-stable labels,
and the normalized trace functions built through cyclic extension groups.
Trace functions are defined only up to m-th roots of unity; the extension
tie-break (first matching row of the extension table, unless overridden) pins
the representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chartab import character_table, extensions_of, sigma_fixed_rows
from .cyclotomic import Cyclotomic, vector_ratio_root
from .groups import FinGroup, GroupMap, ValidationError, cyclic_extension, identity_map, restrict_map
from .twist import (ClassFunctionFamily, hermitian, inner_forms, inverse_norm_pair,
                    r_space)


@dataclass(frozen=True)
class IrrepLabel:
    """An irreducible of one pure inner form at Frobenius power m."""

    m: int
    form: int
    row: int


@dataclass
class ShintaniBasis:
    m: int
    labels: list
    vectors: list  # ClassFunctionFamily on r_space(G, id, F)


class ScanError(ValueError):
    """Stabilization scan could not certify within m_max."""


class FiniteDescentSession:
    """Shintani descent for a finite group with an automorphism, finite-model mode."""

    def __init__(self, group: FinGroup, frob: GroupMap, tie_break: int = 0):
        if frob.source is not group or not frob.is_automorphism():
            raise ValidationError("session needs an automorphism of the group")
        self.group = group
        self.frob = frob
        self.n = frob.order()
        self.tie_break = tie_break
        self.r1f = r_space(group, identity_map(group), frob)
        self._forms = {}
        self._irreps = {}
        self._fixed = {}
        self._traces = {}
        self._sh = {}
        self._theta = None

    # -- level data ------------------------------------------------------

    def forms(self, m: int):
        if m not in self._forms:
            self._forms[m] = inner_forms(self.group, self.frob.power(m))
        return self._forms[m]

    def form_table(self, m: int, k: int):
        return character_table(self.forms(m).fixed[k])

    def irrep_family(self, m: int):
        """All (label, character as function on r_space(G, id, F^m)), orthonormal."""
        if m in self._irreps:
            return self._irreps[m]
        forms = self.forms(m)
        space = r_space(self.group, identity_map(self.group), self.frob.power(m))
        out = []
        for k in range(len(forms)):
            sub = forms.fixed[k]
            amb_to_sub = {amb: i for i, amb in enumerate(sub.ambient[1])}
            table = self.form_table(m, k)
            per_orbit = []
            for g, h in space.reps:
                if forms.h1.class_of[h] != k:
                    per_orbit.append(None)
                    continue
                z = self.group.inv(forms.h1.transporter[h])
                g2 = self.group.conj(z, g)
                per_orbit.append(sub.class_of(amb_to_sub[g2]))
            for row in range(table.nrows):
                vals = tuple(Cyclotomic.zero() if c is None else table.rows[row][c]
                             for c in per_orbit)
                out.append((IrrepLabel(m, k, row), ClassFunctionFamily(space, vals)))
        self._irreps[m] = out
        return out

    def irrep_by_label(self, label: IrrepLabel):
        for lab, fn in self.irrep_family(label.m):
            if lab == label:
                return fn
        raise KeyError(label)

    # -- F-fixed irreducibles and their twisting data ----------------------

    def _witness(self, m: int, k: int):
        """Least h with (g_k, h) in R_{F^m, F}; None when the form is not F-stable."""
        g = self.forms(m).reps[k]
        grp, f, fm = self.group, self.frob, self.frob.power(m)
        for h in range(grp.order):
            if grp.mul(grp.mul(h, f(g)), grp.inv(fm(h))) == g:
                return h
        return None

    def f_fixed(self, m: int):
        """Labels in Irrep(G, F^m)^F with their twisting witnesses."""
        if m in self._fixed:
            return self._fixed[m]
        forms = self.forms(m)
        out = []
        for k in range(len(forms)):
            h = self._witness(m, k)
            if h is None:
                continue
            sub = forms.fixed[k]
            amb = GroupMap(self.group, self.group,
                           tuple(self.group.conj(h, self.frob(x)) for x in range(self.group.order)))
            phi = restrict_map(amb, sub)
            table = self.form_table(m, k)
            _, fixed_rows = sigma_fixed_rows(table, phi)
            for row in fixed_rows:
                out.append((IrrepLabel(m, k, row), h, phi))
        self._fixed[m] = out
        return out

    def trace_function(self, label: IrrepLabel, witness=None, phi=None, tie_break=None):
        """T_{W,psi_W} on r_space(G, F^m, F), unit norm, extension tie-break pinned."""
        tb = self.tie_break if tie_break is None else tie_break
        key = (label, tb)
        if key in self._traces:
            return self._traces[key]
        m, k = label.m, label.form
        if witness is None or phi is None:
            match = [(h, p) for lab, h, p in self.f_fixed(m) if lab == label]
            if not match:
                raise ValidationError(f"{label} is not F-stable")
            witness, phi = match[0]
        grp, f = self.group, self.frob
        forms = self.forms(m)
        g_rep = forms.reps[k]
        sub = forms.fixed[k]
        amb_to_sub = {amb: i for i, amb in enumerate(sub.ambient[1])}
        # w = h F(h) ... F^{m-1}(h) g^{-1} lands in the fixed group
        acc, cur = 0, witness
        for _ in range(m):
            acc = grp.mul(acc, cur)
            cur = f(cur)
        w_amb = grp.mul(acc, grp.inv(g_rep))
        if w_amb not in amb_to_sub:
            raise ValidationError("extension twist element escaped the fixed group")
        ext = cyclic_extension(sub, phi, m, amb_to_sub[w_amb])
        table = self.form_table(m, k)
        chi_vals = table.rows[label.row]
        table_e, found = extensions_of(chi_vals, sub, ext)
        ext_row = found[tb % len(found)]
        s = ext.extra["s"]
        embed = ext.extra["embed"]

        space = r_space(grp, self.frob.power(m), f)
        tcm = forms.h1
        vals = []
        for g1, h1 in space.reps:
            if tcm.class_of[g1] != k:
                vals.append(Cyclotomic.zero())
                continue
            z = grp.inv(tcm.transporter[g1])
            h_moved = grp.mul(grp.mul(z, h1), grp.inv(f(z)))
            x_amb = grp.mul(h_moved, grp.inv(witness))
            if x_amb not in amb_to_sub:
                raise ValidationError("orbit point does not normalize to the fixed group")
            e_elt = ext.mul(embed[amb_to_sub[x_amb]], s)
            # the stalk composite traces to the inverse of the extension action,
            # so the value is the conjugate of the extension character at x*s
            vals.append(table_e.rows[ext_row][ext.class_of(e_elt)].conjugate())
        fn = ClassFunctionFamily(space, tuple(vals))
        self._traces[key] = fn
        return fn

    # -- Shintani descent ---------------------------------------------------

    def sh(self, m: int, label: IrrepLabel, tie_break=None) -> ClassFunctionFamily:
        """Sh_m(W): pullback of the trace function along the inverse norm."""
        tb = self.tie_break if tie_break is None else tie_break
        key = (m, label, tb)
        if key in self._sh:
            return self._sh[key]
        t = self.trace_function(label, tie_break=tb)
        vals = tuple(t.value_at(inverse_norm_pair(self.group, self.frob, m, pair))
                     for pair in self.r1f.reps)
        fn = ClassFunctionFamily(self.r1f, vals)
        self._sh[key] = fn
        return fn

    def shintani_basis(self, m: int, tie_break=None) -> ShintaniBasis:
        labels = [lab for lab, _, _ in self.f_fixed(m)]
        vectors = [self.sh(m, lab, tie_break=tie_break) for lab in labels]
        return ShintaniBasis(m, labels, vectors)

    # -- the twisting operator ----------------------------------------------

    def theta_perm(self):
        """Orbit permutation of R_{id,F} induced by t2: (g,h) -> (g, h F(g))."""
        if self._theta is None:
            grp, f = self.group, self.frob
            self._theta = tuple(self.r1f.orbit_of((g, grp.mul(h, f(g))))
                                for g, h in self.r1f.reps)
        return self._theta

    def theta_apply(self, fn: ClassFunctionFamily) -> ClassFunctionFamily:
        perm = self.theta_perm()
        return ClassFunctionFamily(self.r1f, tuple(fn.values[perm[i]] for i in range(len(perm))))

    # -- matrices and cross-checks -------------------------------------------

    def shintani_matrix(self, m: int):
        """Entries <Sh_m(W), chi_V> over W in Irrep(G,F^m)^F, V in Irrep(G,F)."""
        basis = self.shintani_basis(m)
        chars = self.irrep_family(1)
        return [[hermitian(v, chi) for _, chi in chars] for v in basis.vectors]

    def ipf_crosscheck(self, m: int, w_label: IrrepLabel, v_label: IrrepLabel) -> bool:
        """Compare <Sh_m(W), chi_V> against the categorical-trace orbit sum."""
        lhs = hermitian(self.sh(m, w_label), self.irrep_by_label(v_label))
        grp, f = self.group, self.frob
        t_w = self.trace_function(w_label)
        chi_v = self.irrep_by_label(v_label)
        space = t_w.space
        rhs = Cyclotomic.zero()
        for (h1, h2), st in zip(space.reps, space.stabs):
            tv = t_w.value_at((h1, h2))
            if tv.is_zero():
                continue
            # descend (h2, h1) in R_{F,F^m} through t2 inverses to R_{F,id}
            acc = h1
            for j in range(m - 1, -1, -1):
                acc = grp.mul(acc, grp.inv(self.frob.power(j)(h2)))
            mv = chi_v.value_at((acc, h2)).conjugate()
            if mv.is_zero():
                continue
            rhs = rhs + tv * mv * Fraction(1, st)
        return lhs == rhs

    # -- stabilization scan --------------------------------------------------

    def stabilization_scan(self, m_max: int = 48, stride: int | None = None):
        """Find the least m0 (multiple of the F-order) with certified stable basis."""
        return run_scan(self, self.shintani_basis, m_max, stride or self.n)

    def theta_eigencheck(self, vectors):
        """[(eigenvalue as (k, n) or None)] for Theta on each vector."""
        out = []
        for v in vectors:
            tv = self.theta_apply(v)
            lam = None
            for a, b in zip(tv.values, v.values):
                if not b.is_zero():
                    lam = a / b
                    break
            if lam is None or any(x != lam * y for x, y in zip(tv.values, v.values)):
                out.append(None)
            else:
                out.append(lam.as_root_of_unity())
        return out


def match_bases(a: ShintaniBasis, b: ShintaniBasis):
    """Perfect matching of two bases up to root-of-unity scalars, or None.

    Returns [(index in a, index in b, ratio)]; ambiguity (two valid partners
    for one vector) raises instead of resolving silently.
    """
    if len(a.vectors) != len(b.vectors):
        return None
    out = []
    taken = set()
    for i, v in enumerate(a.vectors):
        partners = []
        for j, u in enumerate(b.vectors):
            if j in taken:
                continue
            ratio = vector_ratio_root(v.values, u.values)
            if ratio is not None:
                partners.append((j, ratio))
        if len(partners) > 1:
            raise ValidationError("ambiguous basis match; orthonormality violated upstream")
        if not partners:
            return None
        j, ratio = partners[0]
        taken.add(j)
        out.append((i, j, ratio))
    return out


def run_scan(session, basis_fn, m_max: int, step: int):
    """Scan multiples of `step` for the least certified stabilization level.

    Certification: bases at m0 and 2 m0 (and 3 m0 when <= m_max) match under
    vector_ratio_root up to a bijection.  Raises ScanError when m_max is too
    small to certify any candidate.
    """
    bases = {}

    def basis(m):
        if m not in bases:
            bases[m] = basis_fn(m)
        return bases[m]

    attempts = []
    m0 = step
    while 2 * m0 <= m_max:
        cert2 = match_bases(basis(m0), basis(2 * m0))
        if cert2 is not None:
            cert3 = None
            if 3 * m0 <= m_max:
                cert3 = match_bases(basis(m0), basis(3 * m0))
                if cert3 is None:
                    attempts.append((m0, "matched 2m0 but not 3m0"))
                    m0 += step
                    continue
            certs = {2 * m0: cert2}
            if cert3 is not None:
                certs[3 * m0] = cert3
            return ScanResult(session, m0, basis(m0), certs, attempts)
        attempts.append((m0, "no match with 2m0"))
        m0 += step
    raise ScanError(
        f"m_max={m_max} too small: no stabilization certified "
        f"(stride {step}; attempts: {attempts})")


@dataclass
class ScanResult:
    session: object
    m0: int
    basis: ShintaniBasis
    certificates: dict
    attempts: list

    @property
    def almost_characters(self):
        return self.basis.vectors
