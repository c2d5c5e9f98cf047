"""Finite group engine: enumerated groups, validated maps, classes, extensions.

Elements are hashable, sortable labels (ints or nested tuples); groups
enumerate them by breadth-first closure from generators with lexicographic
tie-breaks inside each layer, so element indices - and everything derived
from them, orbit representatives included - are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf import FieldTower

GROUP_ORDER_CAP = 200000


class GroupCapError(ValueError):
    """Group closure exceeds the configured order cap."""


class ValidationError(ValueError):
    """A group-theoretic consistency check failed; carries a witness."""


class FinGroup:
    """An enumerated finite group. Index 0 is the identity."""

    def __init__(self, elements, mul_label, inv_label, gens, kind, ambient=None, extra=None):
        self.elements = list(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.mul_label = mul_label
        self.inv_label = inv_label
        self.order = len(self.elements)
        self.gens = list(gens)
        self.kind = kind
        self.ambient = ambient  # (group, embedding indices) for subgroups
        self.extra = extra or {}
        self._inv = None
        self._classes = None
        self._words = None

    # index-level operations -------------------------------------------------

    def mul(self, i: int, j: int) -> int:
        return self.index[self.mul_label(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        if self._inv is None:
            self._inv = [self.index[self.inv_label(x)] for x in self.elements]
        return self._inv[i]

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != 0:
            cur = self.mul(cur, i)
            k += 1
        return k

    def exponent(self) -> int:
        from math import lcm
        e = 1
        for rep, _, _ in self.conjugacy_classes():
            e = lcm(e, self.element_order(rep))
        return e

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FinGroup({self.kind}, order={self.order})"

    # words over generators ---------------------------------------------------

    def _ensure_words(self):
        """words[i] = (parent index, generator position); identity has None."""
        if self._words is not None:
            return self._words
        words = [None] * self.order
        seen = [False] * self.order
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for pos, g in enumerate(self.gens):
                    y = self.mul(x, g)
                    if not seen[y]:
                        seen[y] = True
                        words[y] = (x, pos)
                        nxt.append(y)
            frontier = nxt
        if not all(seen):
            raise ValidationError("generators do not generate the group")
        self._words = words
        return words

    # conjugacy ---------------------------------------------------------------

    def conjugacy_classes(self):
        """[(representative index, class size, centralizer order)], least-index reps."""
        self._compute_classes()
        return self._classes

    def class_of(self, i: int) -> int:
        self._compute_classes()
        return self._class_of[i]

    def class_transporter(self, i: int) -> int:
        """t with element_i = t * rep * t^-1."""
        self._compute_classes()
        return self._transporter[i]

    def _compute_classes(self):
        if self._classes is not None:
            return
        n = self.order
        class_of = [-1] * n
        transporter = [0] * n
        out = []
        gens = self.gens if self.gens else list(range(n))
        for i in range(n):
            if class_of[i] >= 0:
                continue
            cid = len(out)
            class_of[i] = cid
            transporter[i] = 0
            members = [i]
            frontier = [i]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = self.conj(g, x)
                        if class_of[y] < 0:
                            class_of[y] = cid
                            transporter[y] = self.mul(g, transporter[x])
                            members.append(y)
                            nxt.append(y)
                frontier = nxt
            out.append((i, len(members), n // len(members)))
        self._classes = out
        self._class_of = class_of
        self._transporter = transporter

    def class_members(self, cid: int):
        self._compute_classes()
        return [i for i in range(self.order) if self._class_of[i] == cid]

    def centralizer(self, a: int) -> "FinGroup":
        keep = [i for i in range(self.order) if self.mul(i, a) == self.mul(a, i)]
        return self.subgroup(keep)

    def subgroup(self, indices) -> "FinGroup":
        """The subgroup on the given ambient indices (must be closed), ambient order kept."""
        indices = sorted(set(indices))
        if not indices or indices[0] != 0:
            raise ValidationError("subgroup must contain the identity")
        labels = [self.elements[i] for i in indices]
        sub = FinGroup(labels, self.mul_label, self.inv_label,
                       gens=[], kind=f"sub({self.kind})", ambient=(self, indices))
        sub.gens = list(range(sub.order))  # every element; small subgroups only
        for i in range(sub.order):
            for j in sub.gens:
                if sub.mul_label(sub.elements[i], sub.elements[j]) not in sub.index:
                    raise ValidationError(f"subgroup not closed at pair {(i, j)}")
        return sub

    def embed_index(self, sub_i: int) -> int:
        """Ambient index of a subgroup element."""
        return self.ambient[1][sub_i]


# -- breadth-first closure ----------------------------------------------------


def _bfs_close(identity, gen_labels, mul_label, cap):
    elements = [identity]
    index = {identity}
    frontier = [identity]
    while frontier:
        layer = set()
        for x in frontier:
            for g in gen_labels:
                y = mul_label(x, g)
                if y not in index and y not in layer:
                    layer.add(y)
        frontier = sorted(layer)
        for y in frontier:
            index.add(y)
            elements.append(y)
        if len(elements) > cap:
            raise GroupCapError(f"group closure exceeded cap {cap}")
    return elements


# -- constructors ---------------------------------------------------------------


def cyclic(n: int) -> FinGroup:
    if n < 1:
        raise ValueError("cyclic order must be positive")
    mul = lambda a, b: (a + b) % n
    inv = lambda a: (-a) % n
    elements = _bfs_close(0, [1 % n], mul, GROUP_ORDER_CAP)
    g = FinGroup(elements, mul, inv, gens=[], kind=f"cyclic({n})")
    g.gens = [g.index[1 % n]] if n > 1 else []
    return g


def permutation_group(gen_perms) -> FinGroup:
    gens = [tuple(g) for g in gen_perms]
    deg = len(gens[0])
    for g in gens:
        if sorted(g) != list(range(deg)):
            raise ValidationError(f"not a permutation: {g}")
    ident = tuple(range(deg))
    mul = lambda a, b: tuple(a[b[i]] for i in range(deg))
    inv = lambda a: tuple(sorted(range(deg), key=lambda i: a[i]))
    elements = _bfs_close(ident, gens, mul, GROUP_ORDER_CAP)
    g = FinGroup(elements, mul, inv, gens=[], kind=f"perm(deg={deg})")
    g.gens = [g.index[x] for x in gens]
    return g


def cayley_table(table) -> FinGroup:
    """Group from a full multiplication table (row i, col j = i*j); 0 is the identity."""
    n = len(table)
    for i in range(n):
        if table[0][i] != i or table[i][0] != i:
            raise ValidationError("index 0 is not an identity for the table")
    inv_of = [None] * n
    for i in range(n):
        for j in range(n):
            if table[i][j] == 0:
                inv_of[i] = j
        if inv_of[i] is None:
            raise ValidationError(f"element {i} has no inverse")
    # Light's associativity test over a generating set
    gens = _generating_set(n, lambda a, b: table[a][b])
    for g in gens:
        for a in range(n):
            for b in range(n):
                if table[table[a][g]][b] != table[a][table[g][b]]:
                    raise ValidationError(f"associativity fails at ({a},{g},{b})")
    mul = lambda a, b: table[a][b]
    inv = lambda a: inv_of[a]
    g = FinGroup(list(range(n)), mul, inv, gens=[], kind=f"cayley({n})")
    g.gens = gens
    return g


def _generating_set(n, mul) -> list:
    gens, closure = [], {0}
    while len(closure) < n:
        x = min(i for i in range(n) if i not in closure)
        gens.append(x)
        frontier = list(closure)
        closure.add(x)
        frontier.append(x)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    y = mul(a, g)
                    if y not in closure:
                        closure.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def direct_product(a: FinGroup, b: FinGroup) -> FinGroup:
    if a.order * b.order > GROUP_ORDER_CAP:
        raise GroupCapError("direct product exceeds order cap")
    mul = lambda x, y: (a.mul_label(x[0], y[0]), b.mul_label(x[1], y[1]))
    inv = lambda x: (a.inv_label(x[0]), b.inv_label(x[1]))
    ident = (a.elements[0], b.elements[0])
    gen_labels = [(a.elements[g], b.elements[0]) for g in a.gens] + \
                 [(a.elements[0], b.elements[g]) for g in b.gens]
    elements = _bfs_close(ident, gen_labels, mul, GROUP_ORDER_CAP)
    g = FinGroup(elements, mul, inv, gens=[], kind=f"product({a.kind},{b.kind})")
    g.gens = [g.index[x] for x in gen_labels]
    return g


def _ut_positions(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def unitriangular(n: int, tower: FieldTower, level: int) -> FinGroup:
    """Upper unitriangular n x n matrices over the degree-`level` subfield."""
    pos = _ut_positions(n)
    pidx = {pq: k for k, pq in enumerate(pos)}
    field = tower

    if n == 3 and tower.p == 2:
        # hot path: entries (0,1), (0,2), (1,2); addition is xor
        exp, log, q1 = tower._exp, tower._log, tower.order - 1

        def mul(a, b):
            a0, a1, a2 = a
            b0, b1, b2 = b
            cross = exp[(log[a0] + log[b2]) % q1] if a0 and b2 else 0
            return (a0 ^ b0, a1 ^ b1 ^ cross, a2 ^ b2)

        def inv(a):
            a0, a1, a2 = a
            cross = exp[(log[a0] + log[a2]) % q1] if a0 and a2 else 0
            return (a0, a1 ^ cross, a2)
    else:
        def mul(a, b):
            out = []
            for (i, j) in pos:
                acc = field.add(a[pidx[(i, j)]], b[pidx[(i, j)]])
                for k in range(i + 1, j):
                    acc = field.add(acc, field.mul(a[pidx[(i, k)]], b[pidx[(k, j)]]))
                out.append(acc)
            return tuple(out)

        def inv(a):
            # back-substitution: entries of a^-1 column by column
            out = [0] * len(pos)
            for (i, j) in sorted(pos, key=lambda pq: pq[1] - pq[0]):
                acc = field.neg(a[pidx[(i, j)]])
                for k in range(i + 1, j):
                    acc = field.sub(acc, field.mul(a[pidx[(i, k)]], out[pidx[(k, j)]]))
                out[pidx[(i, j)]] = acc
            return tuple(out)

    size = len(tower.level(level)) ** len(pos)
    if size > GROUP_ORDER_CAP:
        raise GroupCapError(f"unitriangular({n}) over level {level} has order {size} > cap")
    ident = tuple([0] * len(pos))
    basis = tower.level_basis(level)
    gen_labels = []
    for k, (i, j) in enumerate(pos):
        if j == i + 1:
            for b in basis:
                lab = [0] * len(pos)
                lab[k] = b
                gen_labels.append(tuple(lab))
    elements = _bfs_close(ident, gen_labels, mul, GROUP_ORDER_CAP)
    if len(elements) != size:
        raise ValidationError("unitriangular closure has unexpected order")
    g = FinGroup(elements, mul, inv, gens=[], kind=f"unitriangular({n},q^{level})",
                 extra={"tower": tower, "level": level, "n": n, "positions": pos})
    g.gens = [g.index[x] for x in gen_labels]
    return g


def matrix_group(n: int, tower: FieldTower, gen_mats) -> FinGroup:
    """Group generated by invertible n x n matrices (flattened tuples) over the tower."""
    field = tower

    def mul(a, b):
        out = []
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = field.add(acc, field.mul(a[i * n + k], b[k * n + j]))
                out.append(acc)
        return tuple(out)

    def inv(a):
        m = [[a[i * n + j] for j in range(n)] for i in range(n)]
        e = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            sel = next((r for r in range(col, n) if m[r][col]), None)
            if sel is None:
                raise ValidationError("singular matrix in group")
            m[col], m[sel] = m[sel], m[col]
            e[col], e[sel] = e[sel], e[col]
            s = field.inv(m[col][col])
            m[col] = [field.mul(s, v) for v in m[col]]
            e[col] = [field.mul(s, v) for v in e[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    f = m[r][col]
                    m[r] = [field.sub(v, field.mul(f, w)) for v, w in zip(m[r], m[col])]
                    e[r] = [field.sub(v, field.mul(f, w)) for v, w in zip(e[r], e[col])]
        return tuple(v for row in e for v in row)

    gens = [tuple(g) for g in gen_mats]
    ident = tuple(1 if i == j else 0 for i in range(n) for j in range(n))
    elements = _bfs_close(ident, gens, mul, GROUP_ORDER_CAP)
    g = FinGroup(elements, mul, inv, gens=[], kind=f"matrix({n})", extra={"tower": tower, "n": n})
    g.gens = [g.index[x] for x in gens]
    return g


# -- group maps -----------------------------------------------------------------


@dataclass(frozen=True)
class GroupMap:
    source: FinGroup
    target: FinGroup
    images: tuple

    def __call__(self, i: int) -> int:
        return self.images[i]

    def is_automorphism(self) -> bool:
        return self.source is self.target and sorted(self.images) == list(range(self.source.order))

    def compose(self, other: "GroupMap") -> "GroupMap":
        """self after other."""
        if other.target is not self.source:
            raise ValidationError("composition domain mismatch")
        return GroupMap(other.source, self.target, tuple(self.images[j] for j in other.images))

    def inverse(self) -> "GroupMap":
        if not self.is_automorphism():
            raise ValidationError("only automorphisms invert")
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return GroupMap(self.source, self.target, tuple(inv))

    def power(self, k: int) -> "GroupMap":
        base = self if k >= 0 else self.inverse()
        out = identity_map(self.source)
        for _ in range(abs(k)):
            out = base.compose(out)
        return out

    def order(self) -> int:
        k, cur = 1, self
        ident = tuple(range(self.source.order))
        while cur.images != ident:
            cur = self.compose(cur)
            k += 1
        return k


def identity_map(g: FinGroup) -> GroupMap:
    return GroupMap(g, g, tuple(range(g.order)))


def inner_map(g: FinGroup, h: int) -> GroupMap:
    return GroupMap(g, g, tuple(g.conj(h, x) for x in range(g.order)))


def hom_from_gen_images(source: FinGroup, target: FinGroup, gen_images) -> GroupMap:
    """Propagate generator images along BFS words and validate the result."""
    if len(gen_images) != len(source.gens):
        raise ValidationError("one image per generator required")
    words = source._ensure_words()
    images = [None] * source.order
    images[0] = 0
    order_pass = sorted(range(source.order), key=lambda i: _word_depth(words, i))
    for i in order_pass:
        if i == 0:
            continue
        parent, pos = words[i]
        images[i] = target.mul(images[parent], gen_images[pos])
    for x in range(source.order):
        for pos, g in enumerate(source.gens):
            if images[source.mul(x, g)] != target.mul(images[x], gen_images[pos]):
                raise ValidationError(
                    f"not a homomorphism: witness pair (element {x}, generator {g})")
    return GroupMap(source, target, tuple(images))


def _word_depth(words, i):
    d = 0
    while words[i] is not None:
        i = words[i][0]
        d += 1
    return d


def automorphism(g: FinGroup, gen_images) -> GroupMap:
    """Validated automorphism from generator images (indices)."""
    m = hom_from_gen_images(g, g, list(gen_images))
    if sorted(m.images) != list(range(g.order)):
        raise ValidationError("map is not bijective")
    return m


def frobenius_map(g: FinGroup, j: int = 1) -> GroupMap:
    """Entrywise x -> x^(p^j) on a unitriangular/matrix group over a tower."""
    tower: FieldTower = g.extra["tower"]
    images = []
    for lab in (g.elements[i] for i in g.gens):
        images.append(g.index[tuple(tower.frobenius_power(x, tower.p, j) for x in lab)])
    return automorphism(g, images)


def fixed_subgroup(g: FinGroup, phi: GroupMap) -> FinGroup:
    if not phi.is_automorphism() or phi.source is not g:
        raise ValidationError("fixed_subgroup needs an automorphism of g")
    return g.subgroup([i for i in range(g.order) if phi(i) == i])


def restrict_map(phi: GroupMap, sub: FinGroup) -> GroupMap:
    """Restriction of an ambient automorphism to an invariant subgroup."""
    amb, emb = sub.ambient
    if amb is not phi.source:
        raise ValidationError("subgroup does not live in the map's source")
    images = []
    back = {j: i for i, j in enumerate(emb)}
    for i in range(sub.order):
        t = phi(emb[i])
        if t not in back:
            raise ValidationError("subgroup is not invariant under the map")
        images.append(back[t])
    return GroupMap(sub, sub, tuple(images))


def cyclic_extension(n_grp: FinGroup, phi: GroupMap, m: int, w: int) -> FinGroup:
    """The group <N, s | s x s^-1 = phi(x), s^m = w> of order m * |N|.

    Requires phi^m = conjugation by w and phi(w) = w, both validated.
    The distinguished coset generator s and the embedding of N are recorded
    in `extra` as indices.
    """
    if m < 1:
        raise ValueError("extension degree must be positive")
    if phi.source is not n_grp or not phi.is_automorphism():
        raise ValidationError("phi must be an automorphism of N")
    if phi(w) != w:
        raise ValidationError("phi must fix the twist element w")
    phi_pows = [tuple(range(n_grp.order))]
    for _ in range(m):
        phi_pows.append(tuple(phi(x) for x in phi_pows[-1]))
    for x in range(n_grp.order):
        if phi_pows[m][x] != n_grp.conj(w, x):
            raise ValidationError(f"phi^{m} is not conjugation by w: witness element {x}")
    if n_grp.order * m > GROUP_ORDER_CAP:
        raise GroupCapError("cyclic extension exceeds order cap")

    def mul(a, b):
        j1, x1 = a
        j2, x2 = b
        j = j1 + j2
        x = n_grp.mul(x1, phi_pows[j1][x2])
        if j >= m:
            j -= m
            x = n_grp.mul(x, w)
        return (j, x)

    def inv(a):
        j, x = a
        if j == 0:
            return (0, n_grp.inv(x))
        y = n_grp.mul(n_grp.inv(w), n_grp.inv(x))
        # phi^{-j}(y) = phi^{m-j}(conj_{w^-1}(y)) since phi^m = ad(w)
        y = phi_pows[m - j][n_grp.conj(n_grp.inv(w), y)]
        return (m - j, y)

    elements = [(j, x) for j in range(m) for x in range(n_grp.order)]
    e = FinGroup(elements, mul, inv, gens=[], kind=f"ext({n_grp.kind},m={m})",
                 extra={"normal": n_grp, "m": m, "w": w})
    e.gens = [e.index[(0, g)] for g in (n_grp.gens or range(n_grp.order))]
    if m > 1:
        e.gens.append(e.index[(1, 0)])
    e.extra["s"] = e.index[(1, 0)] if m > 1 else e.index[(0, w)]
    e.extra["embed"] = [e.index[(0, x)] for x in range(n_grp.order)]
    return e


# -- spec-driven construction ------------------------------------------------


def build_group(spec: dict):
    """Construct a group from a JSON-style description. Returns the FinGroup."""
    kind = spec.get("kind")
    if kind == "cyclic":
        return cyclic(int(spec["n"]))
    if kind == "permutation":
        return permutation_group(spec["generators"])
    if kind == "cayley":
        return cayley_table(spec["table"])
    if kind == "direct_product":
        parts = [build_group(s) for s in spec["factors"]]
        g = parts[0]
        for h in parts[1:]:
            g = direct_product(g, h)
        return g
    if kind == "unitriangular":
        fld = spec.get("field", {"p": 2, "degree": 1})
        p, deg = int(fld["p"]), int(fld.get("degree", 1))
        tower = FieldTower(p, deg)
        return unitriangular(int(spec.get("n", 3)), tower, deg)
    if kind == "matrix":
        fld = spec["field"]
        tower = FieldTower(int(fld["p"]), int(fld.get("degree", 1)))
        n = int(spec["n"])
        gens = [tuple(x for row in mat for x in row) for mat in spec["generators"]]
        return matrix_group(n, tower, gens)
    raise ValidationError(f"unknown group kind {kind!r}")
