"""Character sheaves for finite groups (trivial identity component): the
Drinfeld-double simples, their dimensions and twists, the Frobenius action,
trace-of-Frobenius functions, and the matching against almost characters.

A simple is a pair (conjugacy class of a, irreducible rho of the centralizer
C(a)); its twist rho(a)/rho(1) is a root of unity because a is central in
C(a).  Trace functions are built through the same cyclic-extension-group
construction as the descent pipeline, with the same orientation: the value on
an orbit is the conjugate of the extension character at c*s, which is what
makes the twisting operator act by the inverse twist.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chartab import character_table, extensions_of
from .cyclotomic import Cyclotomic, vector_ratio_root
from .groups import FinGroup, GroupMap, ValidationError, cyclic_extension, identity_map, restrict_map
from .twist import ClassFunctionFamily, r_space


@dataclass(frozen=True)
class DoubleSimple:
    """One Drinfeld-double simple: (class of a, irreducible of C(a))."""

    class_id: int
    class_rep: int
    rho_row: int
    dim: int
    twist: Cyclotomic


def double_simples(group: FinGroup):
    """All simples in deterministic (class, centralizer-row) order."""
    out = []
    for cid, (rep, size, _) in enumerate(group.conjugacy_classes()):
        cent = group.centralizer(rep)
        table = character_table(cent)
        back = {amb: i for i, amb in enumerate(cent.ambient[1])}
        a_sub = back[rep]
        for row in range(table.nrows):
            deg = table.degrees[row]
            twist = table.rows[row][cent.class_of(a_sub)] / Cyclotomic.rational(deg)
            if twist.as_root_of_unity() is None:
                raise ValidationError("twist of a double simple is not a root of unity")
            out.append(DoubleSimple(cid, rep, row, int(size * deg), twist))
    return out


def sigma_action(group: FinGroup, simples, sigma: GroupMap):
    """The permutation induced by sigma, with conjugating witnesses for fixed simples.

    Returns (perm, fixed) where perm[i] is the image index of simples[i] and
    fixed is a list of (index, witness u) with u sigma(a) u^-1 = a.
    """
    if sigma.source is not group or not sigma.is_automorphism():
        raise ValidationError("sigma must be an automorphism")
    index_of = {(s.class_id, s.rho_row): i for i, s in enumerate(simples)}
    perm = [None] * len(simples)
    fixed = []
    for i, s in enumerate(simples):
        a = s.class_rep
        b = sigma(a)
        cid2 = group.class_of(b)
        rep2 = group.conjugacy_classes()[cid2][0]
        u = next(x for x in range(group.order) if group.conj(x, b) == rep2)
        # rho' on C(rep2): y -> rho(sigma^-1(u^-1 y u))
        cent = group.centralizer(a)
        cent2 = group.centralizer(rep2)
        back = {amb: k for k, amb in enumerate(cent.ambient[1])}
        table = character_table(cent)
        table2 = character_table(cent2)
        sig_inv = sigma.inverse()
        vals = []
        for rep_c, _, _ in cent2.conjugacy_classes():
            y = cent2.ambient[1][rep_c]
            x = sig_inv(group.conj(group.inv(u), y))
            vals.append(table.rows[s.rho_row][cent.class_of(back[x])])
        row2 = {table2.row_key(r): k for k, r in enumerate(table2.rows)}[table2.row_key(tuple(vals))]
        perm[i] = index_of[(cid2, row2)]
        if perm[i] == i:
            fixed.append((i, next(x for x in range(group.order)
                                  if group.conj(x, sigma(a)) == a)))
    return tuple(perm), fixed


def cs_trace_function(group: FinGroup, simple: DoubleSimple, sigma: GroupMap,
                      witness: int, tie_break: int = 0) -> ClassFunctionFamily:
    """Trace-of-Frobenius of a sigma-fixed simple, on r_space(G, id, sigma)."""
    a = simple.class_rep
    u = witness
    if group.conj(u, sigma(a)) != a:
        raise ValidationError("witness does not conjugate sigma(a) back to a")
    cent = group.centralizer(a)
    back = {amb: i for i, amb in enumerate(cent.ambient[1])}
    n = sigma.order()
    phi_amb = GroupMap(group, group, tuple(group.conj(u, sigma(x)) for x in range(group.order)))
    phi = restrict_map(phi_amb, cent)
    acc, cur = 0, u
    for _ in range(n):
        acc = group.mul(acc, cur)
        cur = sigma(cur)
    if acc not in back:
        raise ValidationError("extension twist element escaped the centralizer")
    ext = cyclic_extension(cent, phi, n, back[acc])
    table = character_table(cent)
    table_e, found = extensions_of(table.rows[simple.rho_row], cent, ext)
    ext_row = found[tie_break % len(found)]
    s = ext.extra["s"]
    embed = ext.extra["embed"]

    space = r_space(group, identity_map(group), sigma)
    vals = []
    for g, h in space.reps:
        if group.class_of(g) != simple.class_id:
            vals.append(Cyclotomic.zero())
            continue
        x = group.class_transporter(g)  # g = x a x^-1
        c = group.mul(group.mul(group.mul(group.inv(x), h), sigma(x)), group.inv(u))
        if c not in back:
            raise ValidationError("orbit correction term escaped the centralizer")
        e_elt = ext.mul(embed[back[c]], s)
        vals.append(table_e.rows[ext_row][ext.class_of(e_elt)].conjugate())
    return ClassFunctionFamily(space, tuple(vals))


def integrality_report(group: FinGroup) -> dict:
    """Positivity/integrality avatar: integer dims, sum of squares, unit twists."""
    simples = double_simples(group)
    dim_sq = sum(s.dim * s.dim for s in simples)
    twists_ok = all(s.twist.as_root_of_unity() is not None for s in simples)
    dims_ok = all(isinstance(s.dim, int) and s.dim > 0 for s in simples)
    return {
        "simples": len(simples),
        "dims_positive_integers": dims_ok,
        "sum_dim_squared": dim_sq,
        "group_order_squared": group.order ** 2,
        "sum_rule": dim_sq == group.order ** 2,
        "twists_roots_of_unity": twists_ok,
        "pass": dims_ok and twists_ok and dim_sq == group.order ** 2,
    }


def verify_theorem_iii(session, almost_vectors) -> dict:
    """Match sigma-fixed double simples against almost characters.

    Requires a perfect matching with exact root-of-unity ratios; also checks
    the twisting-operator eigenvalue of each trace function against the
    inverse twist of its simple.  Returns a report dict; report["pass"] tells.
    """
    group, sigma = session.group, session.frob
    simples = double_simples(group)
    perm, fixed = sigma_action(group, simples, sigma)
    traces = []
    for idx, u in fixed:
        traces.append((idx, cs_trace_function(group, simples[idx], sigma, u)))

    theta_ok = True
    theta_report = []
    for idx, t in traces:
        expected = simples[idx].twist.inverse()
        tv = session.theta_apply(t)
        ok = tv.values == tuple(expected * v for v in t.values)
        theta_ok = theta_ok and ok
        theta_report.append({"simple": idx, "twist": str(simples[idx].twist), "eigen_ok": ok})

    matches = []
    unmatched = list(range(len(almost_vectors)))
    failure = None
    for idx, t in traces:
        found = None
        for j in unmatched:
            ratio = vector_ratio_root(almost_vectors[j].values, t.values)
            if ratio is not None:
                found = (j, ratio)
                break
        if found is None:
            failure = {"unmatched_simple": idx}
            break
        j, ratio = found
        unmatched.remove(j)
        matches.append({"simple": idx, "almost": j, "ratio": str(ratio),
                        "ratio_root": ratio.as_root_of_unity()})
    ok = failure is None and not unmatched and len(traces) == len(almost_vectors)
    return {
        "fixed_simples": len(traces),
        "almost_characters": len(almost_vectors),
        "count_match": len(traces) == len(almost_vectors),
        "matches": matches,
        "unmatched_residue": failure or ({"unmatched_almost": unmatched} if unmatched else None),
        "theta_eigen": theta_report,
        "pass": ok and theta_ok,
    }
