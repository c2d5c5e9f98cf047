"""Exact character tables via Dixon's method, plus class-function utilities.

The table is computed by simultaneously diagonalizing the class-algebra
structure-constant matrices over F_l (l = 1 mod exponent, l > 2 sqrt|G|),
then lifting eigenvalue multiplicities through a discrete Fourier transform
to sums of roots of unity.  No representation matrices are ever built;
extensions of fixed characters to cyclic extension groups are read off the
extension group's own table.
"""

from __future__ import annotations

import numpy as np
from sympy import nextprime, primitive_root
from sympy.ntheory.residue_ntheory import sqrt_mod

from .cyclotomic import Cyclotomic
from .groups import FinGroup, GroupMap, ValidationError


def _rref_mod(m, ell):
    """Row-reduced echelon form mod ell; returns (reduced rows, pivot columns)."""
    m = m.copy() % ell
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        sel = r + int(nz[0])
        if sel != r:
            m[[r, sel]] = m[[sel, r]]
        m[r] = (m[r] * pow(int(m[r, c]), ell - 2, ell)) % ell
        other = np.concatenate([np.arange(r), np.arange(r + 1, rows)])
        factors = m[other, c].copy()
        m[other] = (m[other] - np.outer(factors, m[r])) % ell
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _nullspace_mod(m, ell):
    """Rows spanning {x : m @ x = 0} mod ell."""
    red, pivots = _rref_mod(m, ell)
    cols = m.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-int(red[r, fc])) % ell
    return basis


def _hessenberg_mod(a, ell):
    h = a.copy() % ell
    d = h.shape[0]
    for j in range(d - 2):
        nz = np.nonzero(h[j + 1:, j])[0]
        if nz.size == 0:
            continue
        sel = j + 1 + int(nz[0])
        if sel != j + 1:
            h[[j + 1, sel]] = h[[sel, j + 1]]
            h[:, [j + 1, sel]] = h[:, [sel, j + 1]]
        ipiv = pow(int(h[j + 1, j]), ell - 2, ell)
        factors = (h[j + 2:, j] * ipiv) % ell
        h[j + 2:, :] = (h[j + 2:, :] - factors[:, None] * h[j + 1, :]) % ell
        h[:, j + 1] = (h[:, j + 1] + h[:, j + 2:] @ factors) % ell
    return h


def _charpoly_mod(a, ell):
    """Coefficients (ascending) of det(xI - a) mod ell."""
    h = _hessenberg_mod(a, ell)
    d = h.shape[0]
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, d + 1):
        prev = polys[k - 1]
        cur = np.zeros(k + 1, dtype=np.int64)
        cur[1:] = prev
        cur[:-1] = (cur[:-1] - h[k - 1, k - 1] * prev) % ell
        sub = 1
        for i in range(k - 1, 0, -1):
            sub = (sub * h[i, i - 1]) % ell
            if h[i - 1, k - 1]:
                term = (h[i - 1, k - 1] * sub) % ell
                cur[: i] = (cur[: i] - term * polys[i - 1]) % ell
        polys.append(cur % ell)
    return polys[d]


def _poly_roots_mod(coeffs, ell):
    xs = np.arange(ell, dtype=np.int64)
    acc = np.zeros(ell, dtype=np.int64)
    for c in coeffs[::-1]:
        acc = (acc * xs + int(c)) % ell
    return sorted(int(x) for x in np.nonzero(acc == 0)[0])


def dixon_prime(order: int, exponent: int) -> int:
    """Smallest prime = 1 mod exponent exceeding 2 sqrt(order)."""
    bound = 2 * int(order ** 0.5) + 1
    p = bound
    while True:
        p = int(nextprime(p))
        if (p - 1) % exponent == 0:
            return p


class CharacterTable:
    """Complete exact character table, rows sorted by degree then value order."""

    def __init__(self, group: FinGroup):
        self.group = group
        self.classes = group.conjugacy_classes()
        self.exponent = group.exponent()
        self.rows, self.ell = _dixon(group, self.exponent)
        self.degrees = tuple(row[0].rational_value() for row in self.rows)

    @property
    def nrows(self):
        return len(self.rows)

    def value(self, row: int, element: int) -> Cyclotomic:
        return self.rows[row][self.group.class_of(element)]

    def row_key(self, values) -> tuple:
        e = self.exponent
        return (values[0].rational_value(),) + tuple(v.sort_key(e) for v in values)

    def __repr__(self):
        return f"CharacterTable({self.group.kind}, {self.nrows} irreducibles)"


def _dixon(group: FinGroup, exponent: int):
    classes = group.conjugacy_classes()
    r = len(classes)
    n = group.order
    reps = [c[0] for c in classes]
    sizes = [c[1] for c in classes]
    ell = dixon_prime(n, exponent)

    members = [[] for _ in range(r)]
    for x in range(n):
        members[group.class_of(x)].append(x)

    group.conjugacy_classes()
    class_of = group._class_of
    mul = group.mul

    def class_matrix_t(i):
        # m[k, j] = #{(x, y) in C_i x C_j : x y = rep_k}, transposed for row action
        b = np.zeros((r, r), dtype=np.int64)
        for x in members[i]:
            xi = group.inv(x)
            for k, g in enumerate(reps):
                b[class_of[mul(xi, g)], k] += 1
        return b.T % ell

    # refine row subspaces until the joint eigenbasis is isolated
    spaces = [np.eye(r, dtype=np.int64)]
    for i in range(1, r):
        if all(s.shape[0] == 1 for s in spaces):
            break
        m = class_matrix_t(i)
        refined = []
        for s in spaces:
            if s.shape[0] == 1:
                refined.append(s)
                continue
            _, pivots = _rref_mod(s, ell)
            a = (s @ m % ell)[:, pivots]
            if s.shape[0] != len(pivots):
                raise AssertionError("subspace basis lost rank")
            for lam in _poly_roots_mod(_charpoly_mod(a, ell), ell):
                shifted = (a.T - lam * np.eye(s.shape[0], dtype=np.int64)) % ell
                kern = _nullspace_mod(shifted, ell)
                if kern.shape[0]:
                    sub, _ = _rref_mod(kern @ s % ell, ell)
                    refined.append(sub)
            spaces = None  # invalidated; rebuilt below
        spaces = refined
    if not all(s.shape[0] == 1 for s in spaces):
        raise AssertionError("class algebra failed to split; upstream bug")

    inv_map = [group.class_of(group.inv(g)) for g in reps]
    size_inv = [pow(sz % ell, ell - 2, ell) for sz in sizes]

    rows_fp = []
    for s in spaces:
        v = s[0] % ell
        if v[0] == 0:
            raise AssertionError("central character vanishes at the identity class")
        v = (v * pow(int(v[0]), ell - 2, ell)) % ell
        dot = 0
        for j in range(r):
            dot = (dot + int(v[j]) * int(v[inv_map[j]]) * size_inv[j]) % ell
        chi1_sq = (n * pow(dot, ell - 2, ell)) % ell
        root = sqrt_mod(chi1_sq, ell)
        if root is None:
            raise AssertionError("degree squared is not a quadratic residue")
        deg = min(int(root), ell - int(root))
        theta = [(int(v[j]) * deg * size_inv[j]) % ell for j in range(r)]
        rows_fp.append((deg, theta))

    # lift multiplicities of eigenvalues through the inverse DFT mod ell
    e = exponent
    power_class = [[0] * e for _ in range(r)]
    for j, g in enumerate(reps):
        cur = 0
        for t in range(e):
            power_class[j][t] = group.class_of(cur)
            cur = group.mul(cur, g)
    omega = pow(primitive_root(ell), (ell - 1) // e, ell)
    omega_inv = pow(omega, ell - 2, ell)
    v_dft = np.array([[pow(omega_inv, (t * k) % e, ell) for k in range(e)] for t in range(e)],
                     dtype=np.int64)
    e_inv = pow(e, ell - 2, ell)

    rows = []
    for deg, theta in rows_fp:
        out = []
        for j in range(r):
            th = np.array([theta[power_class[j][t]] for t in range(e)], dtype=np.int64)
            mults = (th @ v_dft % ell) * e_inv % ell
            if (mults > deg).any():
                raise AssertionError("lifted multiplicity exceeds the degree")
            out.append(Cyclotomic(e, {k: int(mults[k]) for k in range(e) if mults[k]}))
        if out[0] != Cyclotomic.rational(deg):
            raise AssertionError("lifted degree mismatch")
        rows.append(tuple(out))

    if sum(d * d for d, _ in rows_fp) != n:
        raise AssertionError("sum of squared degrees does not match the group order")

    key = lambda row: (row[0].rational_value(),) + tuple(v.sort_key(e) for v in row)
    rows.sort(key=key)
    return rows, ell


def table_to_json(table: CharacterTable) -> dict:
    """Rows = irreducibles, columns = class representatives, exact string entries."""
    classes = table.group.conjugacy_classes()
    return {
        "group_order": table.group.order,
        "classes": [{"representative_index": rep, "size": size, "centralizer_order": cent}
                    for rep, size, cent in classes],
        "rows": [{"degree": str(table.degrees[i]),
                  "values": [v.to_string() for v in table.rows[i]]}
                 for i in range(table.nrows)],
    }


def table_to_csv(table: CharacterTable) -> str:
    classes = table.group.conjugacy_classes()
    lines = ["degree;" + ";".join(f"class{rep}" for rep, _, _ in classes)]
    for i in range(table.nrows):
        lines.append(str(table.degrees[i]) + ";" +
                     ";".join(v.to_string() for v in table.rows[i]))
    return "\n".join(lines) + "\n"


_TABLE_CACHE: dict[int, CharacterTable] = {}


def character_table(group: FinGroup) -> CharacterTable:
    """The exact table of `group`, cached per group instance."""
    key = id(group)
    tbl = _TABLE_CACHE.get(key)
    if tbl is None or tbl.group is not group:
        tbl = CharacterTable(group)
        _TABLE_CACHE[key] = tbl
    return tbl


def inner_product(f, g, group: FinGroup) -> Cyclotomic:
    """(1/|G|) sum over classes of |C| f(c) conj(g(c)), exact."""
    classes = group.conjugacy_classes()
    if len(f) != len(classes) or len(g) != len(classes):
        raise ValidationError("class function length does not match the class count")
    acc = Cyclotomic.zero()
    for (rep, size, _), fv, gv in zip(classes, f, g):
        acc = acc + Cyclotomic.coerce(fv) * Cyclotomic.coerce(gv).conjugate() * size
    return acc / group.order


def sigma_fixed_rows(table: CharacterTable, phi: GroupMap):
    """Permutation i -> position of chi_i o phi, and the fixed row set."""
    if phi.source is not table.group or not phi.is_automorphism():
        raise ValidationError("phi must be an automorphism of the table's group")
    g = table.group
    lookup = {table.row_key(row): i for i, row in enumerate(table.rows)}
    perm = []
    for row in table.rows:
        moved = tuple(row[g.class_of(phi(rep))] for rep, _, _ in g.conjugacy_classes())
        perm.append(lookup[table.row_key(moved)])
    fixed = [i for i, j in enumerate(perm) if i == j]
    return tuple(perm), fixed


def restrict_row(table_e: CharacterTable, ext: FinGroup, n_grp: FinGroup, row: int):
    """Values of an extension-group character on the normal subgroup's classes."""
    embed = ext.extra["embed"]
    vals = []
    for rep, _, _ in n_grp.conjugacy_classes():
        vals.append(table_e.rows[row][ext.class_of(embed[rep])])
    return tuple(vals)


def extensions_of(chi_values, n_grp: FinGroup, ext: FinGroup):
    """Row indices of the extension group's table restricting to chi, in table order.

    Exactly m rows must match, pairwise differing by a linear character of
    the cyclic quotient; both facts are verified.
    """
    m = ext.extra["m"]
    table_e = character_table(ext)
    chi_values = tuple(Cyclotomic.coerce(v) for v in chi_values)
    found = [row for row in range(table_e.nrows)
             if restrict_row(table_e, ext, n_grp, row) == chi_values]
    if len(found) != m:
        raise ValidationError(
            f"expected {m} extensions, found {len(found)}; character not fixed or upstream bug")
    _verify_extension_ratios(table_e, ext, found)
    return table_e, found


def _verify_extension_ratios(table_e, ext, found):
    m = ext.extra["m"]
    if m == 1 or len(found) < 2:
        return
    n_order = ext.extra["normal"].order
    coset_classes = {}
    for i, (j, x) in enumerate(ext.elements):
        coset_classes.setdefault(j, set()).add(ext.class_of(i))
    base = table_e.rows[found[0]]
    for other in found[1:]:
        row = table_e.rows[other]
        for j, clss in coset_classes.items():
            lam = None
            for c in sorted(clss):
                if not base[c].is_zero():
                    lam = row[c] / base[c]
                    break
            if lam is None or lam.as_root_of_unity() is None:
                raise ValidationError("extension ratio is not a root of unity")
            for c in clss:
                if row[c] != lam * base[c]:
                    raise ValidationError("extensions do not differ by a linear character")
