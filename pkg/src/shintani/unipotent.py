"""Connected-unipotent mode: descent for unitriangular groups over F_q.

The infinite connected group is never enumerated.  A session at level m works
with the finite fixed groups G^F and G^{F^m} inside one ambient field tower,
uses Lang sections (solved coordinate-wise as linearized equations) to
normalize orbit representatives to (x, 1) or (1, y) form, and otherwise runs
the same extension-group trace construction as the finite model.  H^1 is
trivial here, so there is a single inner form at every level.

Cross-level comparisons (the stabilization scan) rely on the base-field
elements having tower-independent codes, which holds exactly when q is prime;
the scanner refuses other bases rather than silently compare incompatible
labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chartab import character_table, extensions_of, sigma_fixed_rows
from .cyclotomic import Cyclotomic
from .descent import IrrepLabel, ShintaniBasis, run_scan
from .gf import FieldTower
from .groups import (ValidationError, cyclic_extension, frobenius_map, unitriangular,
                     _ut_positions)
from .twist import ClassFunctionFamily


class EscalationError(ValueError):
    """No solution within the ambient tower; a larger degree is required."""


def ut_mul(a, b, tower: FieldTower, n: int):
    pos = _ut_positions(n)
    pidx = {pq: k for k, pq in enumerate(pos)}
    out = []
    for (i, j) in pos:
        acc = tower.add(a[pidx[(i, j)]], b[pidx[(i, j)]])
        for k in range(i + 1, j):
            acc = tower.add(acc, tower.mul(a[pidx[(i, k)]], b[pidx[(k, j)]]))
        out.append(acc)
    return tuple(out)


def ut_inv(a, tower: FieldTower, n: int):
    pos = _ut_positions(n)
    pidx = {pq: k for k, pq in enumerate(pos)}
    out = [0] * len(pos)
    for (i, j) in sorted(pos, key=lambda pq: pq[1] - pq[0]):
        acc = tower.neg(a[pidx[(i, j)]])
        for k in range(i + 1, j):
            acc = tower.sub(acc, tower.mul(a[pidx[(i, k)]], out[pidx[(k, j)]]))
        out[pidx[(i, j)]] = acc
    return tuple(out)


def ut_frob(a, tower: FieldTower, j: int):
    return tuple(tower.frobenius_power(x, tower.p, j) for x in a)


def lang_solve(tower: FieldTower, n: int, k: int, m: int, g, verify=True):
    """A matrix z with F^m(z) = z g, F the q = p^k Frobenius, entries solved
    coordinate-wise at the smallest tower level admitting a solution."""
    pos = _ut_positions(n)
    pidx = {pq: t for t, pq in enumerate(pos)}
    q = tower.p ** k
    levels = [d for d in range(k * m, tower.degree + 1, k * m) if tower.degree % d == 0]
    if not levels:
        raise EscalationError(f"tower degree {tower.degree} has no level divisible by {k * m}")
    minus_one = tower.neg(1)
    out = [0] * len(pos)
    for (i, j) in sorted(pos, key=lambda pq: pq[1] - pq[0]):
        rhs = g[pidx[(i, j)]]
        for t in range(i + 1, j):
            rhs = tower.add(rhs, tower.mul(out[pidx[(i, t)]], g[pidx[(t, j)]]))
        sol = None
        for d in levels:
            found = tower.solve_linearized([(m, 1), (0, minus_one)], rhs, d, q=q)
            if found:
                sol = found[0]
                break
        if sol is None:
            raise EscalationError(
                f"Lang equation unsolvable within degree {tower.degree}; escalate the tower")
        out[pidx[(i, j)]] = sol
    z = tuple(out)
    if verify:
        if ut_frob(z, tower, k * m) != ut_mul(z, g, tower, n):
            raise AssertionError("Lang solution failed substitution check")
    return z


@dataclass
class ConnectedOrbitSpace:
    """Orbit data for a connected-mode R-space; no pair enumeration."""

    key: tuple
    reps: list
    sizes: list
    stabs: list
    mode: str = "connected-unipotent"

    def __len__(self):
        return len(self.reps)


class UnipotentDescentSession:
    """Shintani descent for unitriangular(n) over F_{p^k} at one level m."""

    def __init__(self, n: int, p: int, k: int, m: int, tower: FieldTower | None = None,
                 tie_break: int = 0, lang_factor: int = 0):
        self.n, self.p, self.k, self.m = n, p, k, m
        # each superdiagonal gap feeds already-escalated entries into the next
        # linearized equation, and char-p trace vanishing costs one factor p per gap
        factor = lang_factor or p ** (n - 2) * 2
        self.tower = tower or FieldTower(p, factor * k * m)
        if self.tower.degree % (k * m):
            raise ValidationError("ambient tower cannot host the requested level")
        self.tie_break = tie_break
        self.g1 = unitriangular(n, self.tower, k)
        self.gm = self.g1 if m == 1 else unitriangular(n, self.tower, k * m)
        self.frob_gm = frobenius_map(self.gm, k)
        self.classes1 = self.g1.conjugacy_classes()
        from .twist import twisted_classes
        self.tc = twisted_classes(self.gm, self.frob_gm)
        self.space1 = ConnectedOrbitSpace(
            key=("connected", n, p, k, "level1"),
            reps=[self.g1.elements[r] for r, _, _ in self.classes1],
            sizes=[sz for _, sz, _ in self.classes1],
            stabs=[c for _, _, c in self.classes1])
        self.space_m = ConnectedOrbitSpace(
            key=("connected", n, p, k, "trace", m),
            reps=[self.gm.elements[r] for r in self.tc.reps],
            sizes=list(self.tc.sizes),
            stabs=[self.gm.order // s for s in self.tc.sizes])
        self._traces = {}
        self._table_m = None

    # -- bookkeeping -------------------------------------------------------

    def table_m(self):
        if self._table_m is None:
            self._table_m = character_table(self.gm)
        return self._table_m

    def lang(self, mm: int, g_label):
        return lang_solve(self.tower, self.n, self.k, mm, g_label)

    def f_fixed(self):
        """Rows of Irr(G^{F^m}) fixed by the Frobenius action."""
        _, fixed = sigma_fixed_rows(self.table_m(), self.frob_gm)
        return [IrrepLabel(self.m, 0, row) for row in fixed]

    # -- trace functions and descent -----------------------------------------

    def trace_function(self, label: IrrepLabel, tie_break=None) -> ClassFunctionFamily:
        tb = self.tie_break if tie_break is None else tie_break
        key = (label, tb)
        if key in self._traces:
            return self._traces[key]
        ext = cyclic_extension(self.gm, self.frob_gm, self.m, 0)
        table_e, found = extensions_of(self.table_m().rows[label.row], self.gm, ext)
        ext_row = found[tb % len(found)]
        s = ext.extra["s"]
        embed = ext.extra["embed"]
        vals = []
        for y in self.tc.reps:
            e_elt = ext.mul(embed[y], s)
            vals.append(table_e.rows[ext_row][ext.class_of(e_elt)].conjugate())
        fn = ClassFunctionFamily(self.space_m, tuple(vals))
        self._traces[key] = fn
        return fn

    def trace_value_at(self, fn: ClassFunctionFamily, pair):
        """Evaluate a trace function at an arbitrary (g, h) in R_{F^m, F}."""
        g, h = pair
        z = self.lang(self.m, g)
        y = ut_mul(ut_mul(z, h, self.tower, self.n),
                   ut_inv(ut_frob(z, self.tower, self.k), self.tower, self.n),
                   self.tower, self.n)
        return fn.values[self.tc.class_of[self.gm.index[y]]]

    def char_value_at(self, row: int, pair):
        """Evaluate chi_row (an Irr(G^F) character on R_{id,F}) at a pair."""
        g, h = pair
        z = self.lang(1, h)
        x = ut_mul(ut_mul(z, g, self.tower, self.n), ut_inv(z, self.tower, self.n),
                   self.tower, self.n)
        return character_table(self.g1).rows[row][self.g1.class_of(self.g1.index[x])]

    def sh(self, label: IrrepLabel, tie_break=None) -> ClassFunctionFamily:
        """Sh_m(W) on the conjugacy classes of G^F via the inverse norm."""
        t = self.trace_function(label, tie_break=tie_break)
        vals = []
        for x in self.space1.reps:
            # N_m^-1 fixes (x, 1); normalize to (1, y) form through a Lang section
            vals.append(self.trace_value_at(t, (x, self._identity())))
        return ClassFunctionFamily(self.space1, tuple(vals))

    def _identity(self):
        return self.g1.elements[0]

    def shintani_basis(self, tie_break=None) -> ShintaniBasis:
        labels = self.f_fixed()
        return ShintaniBasis(self.m, labels,
                             [self.sh(lab, tie_break=tie_break) for lab in labels])

    # -- twisting operator ---------------------------------------------------

    def theta_perm(self):
        perm = []
        for r, _, _ in self.classes1:
            x = self.g1.elements[r]
            z = self.lang(1, x)
            xx = ut_mul(ut_mul(z, x, self.tower, self.n), ut_inv(z, self.tower, self.n),
                        self.tower, self.n)
            perm.append(self.g1.class_of(self.g1.index[xx]))
        return tuple(perm)

    def theta_apply(self, fn: ClassFunctionFamily) -> ClassFunctionFamily:
        perm = self.theta_perm()
        return ClassFunctionFamily(self.space1, tuple(fn.values[perm[i]] for i in range(len(perm))))

    # -- inner product formula -------------------------------------------------

    def ipf_crosscheck(self, w_label: IrrepLabel, v_row: int) -> bool:
        """<Sh_m(W), chi_V> against the orbit-sum realization, connected mode."""
        from .twist import hermitian
        chi_vals = tuple(character_table(self.g1).rows[v_row])
        chi_fn = ClassFunctionFamily(self.space1, chi_vals)
        lhs = hermitian(self.sh(w_label), chi_fn)
        t = self.trace_function(w_label)
        rhs = Cyclotomic.zero()
        for y, st in zip(self.space_m.reps, self.space_m.stabs):
            h1, h2 = self._identity(), y  # orbit representative (1, y)
            tv = t.values[self.tc.class_of[self.gm.index[y]]]
            if tv.is_zero():
                continue
            acc = h1
            for j in range(self.m - 1, -1, -1):
                acc = ut_mul(acc, ut_inv(ut_frob(h2, self.tower, self.k * j), self.tower, self.n),
                             self.tower, self.n)
            mv = self.char_value_at(v_row, (acc, h2)).conjugate()
            if mv.is_zero():
                continue
            rhs = rhs + tv * mv * Fraction(1, st)
        return lhs == rhs


def unipotent_scan(n: int, p: int, k: int, m_max: int = 48, stride: int = 1,
                   tie_break: int = 0):
    """Stabilization scan across levels; prime base fields only (label stability)."""
    if k != 1:
        raise ValidationError(
            "cross-level scans need tower-independent base labels; use a prime base field")
    sessions = {}

    def basis(m):
        if m not in sessions:
            sessions[m] = UnipotentDescentSession(n, p, k, m, tie_break=tie_break)
        sess = sessions[m]
        base = sessions[min(sessions)]
        if sess.space1.reps != base.space1.reps:
            raise ValidationError("base-level class labels differ across towers")
        return sess.shintani_basis()

    result = run_scan(None, basis, m_max, stride)
    result.session = sessions[result.m0]
    return result
