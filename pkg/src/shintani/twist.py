"""Twisted conjugation orbit spaces, pure inner forms, and function-space structure.

Finite-model mode enumerates R_{g1,g2} = {(g,h) : h g2(g) g1(h)^-1 = g} inside
Gamma x Gamma exactly, with orbit representatives, transporters and stabilizer
orders under the action ^x(g,h) = (x g g1(x)^-1, x h g2(x)^-1).  All function
values are exact cyclotomics; the Hermitian pairing weights each orbit by the
reciprocal of its stabilizer order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import Cyclotomic
from .groups import FinGroup, GroupMap, ValidationError, identity_map

R_SPACE_PAIR_CAP = 1 << 22


@dataclass
class TwistedClasses:
    """Orbits of g -> x g phi(x)^-1 with least-index representatives."""

    group: FinGroup
    phi: GroupMap
    reps: list
    sizes: list
    class_of: list
    transporter: list  # g = t * rep * phi(t)^-1

    def stab_order(self, cid: int) -> int:
        return self.group.order // self.sizes[cid]


def twisted_classes(group: FinGroup, phi: GroupMap) -> TwistedClasses:
    if phi.source is not group or not phi.is_automorphism():
        raise ValidationError("twisted classes need an automorphism of the group")
    n = group.order
    class_of = [-1] * n
    transporter = [0] * n
    reps, sizes = [], []
    gens = group.gens or list(range(n))
    for i in range(n):
        if class_of[i] >= 0:
            continue
        cid = len(reps)
        class_of[i] = cid
        transporter[i] = 0
        count = 1
        frontier = [i]
        while frontier:
            nxt = []
            for g in frontier:
                for x in gens:
                    y = group.mul(group.mul(x, g), group.inv(phi(x)))
                    if class_of[y] < 0:
                        class_of[y] = cid
                        transporter[y] = group.mul(x, transporter[g])
                        count += 1
                        nxt.append(y)
            frontier = nxt
        reps.append(i)
        sizes.append(count)
    return TwistedClasses(group, phi, reps, sizes, class_of, transporter)


@dataclass
class InnerFormFamily:
    """Representatives of H^1(F, Gamma) with their fixed groups G^{hF}."""

    group: FinGroup
    frob: GroupMap
    h1: TwistedClasses
    reps: list
    maps: list  # ad(h) o F per form
    fixed: list  # FinGroup per form

    def __len__(self):
        return len(self.reps)


def inner_forms(group: FinGroup, frob: GroupMap) -> InnerFormFamily:
    h1 = twisted_classes(group, frob)
    reps, maps, fixed = [], [], []
    for h in h1.reps:
        images = tuple(group.conj(h, frob(x)) for x in range(group.order))
        phi = GroupMap(group, group, images)
        sub = group.subgroup([x for x in range(group.order) if phi(x) == x])
        reps.append(h)
        maps.append(phi)
        fixed.append(sub)
    return InnerFormFamily(group, frob, h1, reps, maps, fixed)


@dataclass
class TwistedOrbitSpace:
    """G-orbits on R_{g1,g2}, finite-model enumeration."""

    group: FinGroup
    gamma1: GroupMap
    gamma2: GroupMap
    reps: list  # (g, h) index pairs
    sizes: list
    stabs: list
    pair_orbit: dict  # (g, h) -> (orbit id, transporter t with pair = ^t(rep))
    mode: str = "finite-model"

    @property
    def key(self):
        return (id(self.group), self.gamma1.images, self.gamma2.images)

    def orbit_of(self, pair) -> int:
        return self.pair_orbit[pair][0]

    def transport_to_rep(self, pair):
        """(orbit id, z) with ^z(pair) = rep."""
        oid, t = self.pair_orbit[pair]
        return oid, self.group.inv(t)

    def act(self, x: int, pair):
        g, h = pair
        grp = self.group
        return (grp.mul(grp.mul(x, g), grp.inv(self.gamma1(x))),
                grp.mul(grp.mul(x, h), grp.inv(self.gamma2(x))))

    def __len__(self):
        return len(self.reps)


def r_space(group: FinGroup, gamma1: GroupMap, gamma2: GroupMap) -> TwistedOrbitSpace:
    """Enumerate R_{g1,g2} and its orbit decomposition (cached per group)."""
    cache = group.extra.setdefault("_rspace_cache", {})
    key = (gamma1.images, gamma2.images)
    if key in cache:
        return cache[key]
    n = group.order
    if n * n > R_SPACE_PAIR_CAP:
        raise ValidationError(f"finite-model R-space over order {n} exceeds the pair cap")
    pairs = []
    for h in range(n):
        hi = group.inv(gamma1(h))
        for g in range(n):
            if group.mul(group.mul(h, gamma2(g)), hi) == g:
                pairs.append((g, h))
    pair_orbit = {}
    reps, sizes, stabs = [], [], []
    gens = group.gens or list(range(n))
    space = TwistedOrbitSpace(group, gamma1, gamma2, reps, sizes, stabs, pair_orbit)
    for start in pairs:
        if start in pair_orbit:
            continue
        oid = len(reps)
        pair_orbit[start] = (oid, 0)
        members = 1
        frontier = [start]
        while frontier:
            nxt = []
            for p in frontier:
                t = pair_orbit[p][1]
                for x in gens:
                    q = space.act(x, p)
                    if q not in pair_orbit:
                        pair_orbit[q] = (oid, group.mul(x, t))
                        members += 1
                        nxt.append(q)
            frontier = nxt
        reps.append(start)
        sizes.append(members)
        stabs.append(n // members)
    assert sum(sizes) == len(pairs)
    cache[key] = space
    return space


# -- the auxiliary maps tau, t1, t2 and the inverse norm -----------------------


def compose(g1: GroupMap, g2: GroupMap) -> GroupMap:
    return g1.compose(g2)


def map_tau(space: TwistedOrbitSpace) -> list:
    """Orbit bijection onto r_space(G, g2, g1) by swapping coordinates."""
    target = r_space(space.group, space.gamma2, space.gamma1)
    return _orbit_map(space, target, lambda g, h: (h, g))


def map_t1(space: TwistedOrbitSpace) -> list:
    """Orbit bijection onto r_space(G, g1 g2, g2): (g,h) -> (h g2(g), h)."""
    target = r_space(space.group, compose(space.gamma1, space.gamma2), space.gamma2)
    grp = space.group
    return _orbit_map(space, target, lambda g, h: (grp.mul(h, space.gamma2(g)), h))


def map_t2(space: TwistedOrbitSpace) -> list:
    """Orbit bijection onto r_space(G, g1, g1 g2): (g,h) -> (g, h g2(g))."""
    target = r_space(space.group, space.gamma1, compose(space.gamma1, space.gamma2))
    grp = space.group
    return _orbit_map(space, target, lambda g, h: (g, grp.mul(h, space.gamma2(g))))


def _orbit_map(space, target, fn):
    out = []
    seen = set()
    for g, h in space.reps:
        oid = target.orbit_of(fn(g, h))
        if oid in seen:
            raise ValidationError("orbit map is not injective")
        seen.add(oid)
        out.append(oid)
    if len(out) != len(target):
        raise ValidationError("orbit map is not surjective")
    return out


def inverse_norm_pair(group: FinGroup, frob: GroupMap, m: int, pair):
    """(g, h) -> (g h F(h) ... F^{m-1}(h), h)."""
    g, h = pair
    acc = g
    cur = h
    for _ in range(m):
        acc = group.mul(acc, cur)
        cur = frob(cur)
    return (acc, h)


def inverse_norm(group: FinGroup, frob: GroupMap, m: int) -> list:
    """Orbit bijection r_space(G, id, F) -> r_space(G, F^m, F)."""
    if m < 1:
        raise ValueError("norm level must be positive")
    source = r_space(group, identity_map(group), frob)
    target = r_space(group, frob.power(m), frob)
    out = []
    seen = set()
    for pair in source.reps:
        oid = target.orbit_of(inverse_norm_pair(group, frob, m, pair))
        if oid in seen:
            raise ValidationError("inverse norm is not injective on orbits")
        seen.add(oid)
        out.append(oid)
    if len(out) != len(target):
        raise ValidationError("inverse norm is not surjective on orbits")
    return out


# -- functions on orbit spaces --------------------------------------------------


@dataclass
class ClassFunctionFamily:
    """A G-invariant function on a twisted orbit space, one value per orbit."""

    space: TwistedOrbitSpace
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.space):
            raise ValidationError("value count does not match the orbit count")
        self.values = tuple(Cyclotomic.coerce(v) for v in self.values)

    def value_at(self, pair) -> Cyclotomic:
        return self.values[self.space.orbit_of(pair)]

    def scaled(self, c) -> "ClassFunctionFamily":
        c = Cyclotomic.coerce(c)
        return ClassFunctionFamily(self.space, tuple(v * c for v in self.values))


def hermitian(f1: ClassFunctionFamily, f2: ClassFunctionFamily) -> Cyclotomic:
    """sum over orbits of f1 * conj(f2) / |Stab|, exact."""
    if f1.space.key != f2.space.key:
        raise ValidationError("Hermitian pairing requires functions on the same space")
    acc = Cyclotomic.zero()
    for v1, v2, st in zip(f1.values, f2.values, f1.space.stabs):
        if v1.is_zero() or v2.is_zero():
            continue
        acc = acc + v1 * v2.conjugate() * Fraction(1, st)
    return acc


def unit_function(space: TwistedOrbitSpace) -> ClassFunctionFamily:
    """Convolution unit of Fun([G],F): the indicator of g = identity."""
    vals = [Cyclotomic.rational(1 if g == 0 else 0) for g, _ in space.reps]
    return ClassFunctionFamily(space, tuple(vals))


def convolve(f1: ClassFunctionFamily, f2: ClassFunctionFamily) -> ClassFunctionFamily:
    """f1 * f2 on R_{g1 g2, F} by summing over factorizations with shared h."""
    s1, s2 = f1.space, f2.space
    if s1.group is not s2.group or s1.gamma2.images != s2.gamma2.images:
        raise ValidationError("convolution requires a shared group and Frobenius")
    if s1.mode != "finite-model" or s2.mode != "finite-model":
        raise ValidationError("convolution is implemented in finite-model mode")
    grp = s1.group
    g1inv = s1.gamma1.inverse()
    target = r_space(grp, compose(s1.gamma1, s2.gamma1), s1.gamma2)
    vals = []
    for g, h in target.reps:
        acc = Cyclotomic.zero()
        for ga in range(grp.order):
            if (ga, h) not in s1.pair_orbit:
                continue
            v1 = f1.value_at((ga, h))
            if v1.is_zero():
                continue
            gb = g1inv(grp.mul(grp.inv(ga), g))
            if (gb, h) not in s2.pair_orbit:
                continue
            acc = acc + v1 * f2.value_at((gb, h))
        vals.append(acc)
    return ClassFunctionFamily(target, tuple(vals))


# -- the trace identity of the module-trace comparison -------------------------


def trace_identity_check(group: FinGroup, frob: GroupMap, dims) -> bool:
    """sum_h d_h/|G^{hF}| = sum_t (sum_{h F(h) = t} d_h)/|G^{tF^2}|, exactly."""
    h1 = twisted_classes(group, frob)
    if len(dims) != len(h1.reps):
        raise ValidationError("one dimension per H^1(F) class required")
    lhs = Fraction(0)
    for cid, h in enumerate(h1.reps):
        fixed = sum(1 for x in range(group.order)
                    if group.conj(h, frob(x)) == x)
        lhs += Fraction(dims[cid], fixed)
    frob2 = frob.power(2)
    h2 = twisted_classes(group, frob2)
    rhs = Fraction(0)
    for t in h2.reps:
        fixed2 = sum(1 for x in range(group.order)
                     if group.conj(t, frob2(x)) == x)
        total = 0
        for h in range(group.order):
            if group.mul(h, frob(h)) == t:
                total += dims[h1.class_of[h]]
        rhs += Fraction(total, fixed2)
    return lhs == rhs
