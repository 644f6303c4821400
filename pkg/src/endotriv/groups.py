"""Finite permutation groups with full element enumeration.

Products compose right-to-left: ``(a*b)(i) = a(b(i))``, so permutation
matrices multiply in the same order as group elements.  Every element
carries a shortest word in the generators and their inverses, found by
breadth-first search with edges ordered ``g0, g0^-1, g1, g1^-1, ...``.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property
from math import gcd

import numpy as np

from .errors import CapExceeded, NotHomomorphism, NotInjective, ValidationError

GROUP_CAP = 20000


def _as_perm(images, degree):
    perm = tuple(int(x) for x in images)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise ValidationError(f"{list(images)} is not a permutation of 0..{degree - 1}")
    return perm


def format_word(word, labels) -> str:
    return " ".join(labels[k] if s > 0 else f"{labels[k]}^-1" for k, s in word)


class FiniteGroup:
    """A permutation group together with its enumerated elements.

    ``elements[0]`` is the identity; ``word(x)`` is the BFS word of ``x``
    as a tuple of ``(generator index, +1 or -1)`` letters.
    """

    def __init__(self, generators, labels=None, degree=None, name=None, cap=GROUP_CAP):
        if degree is None:
            degree = len(generators[0]) if generators else 1
        self.degree = degree
        self.generators = [_as_perm(g, degree) for g in generators]
        if labels is None:
            labels = [f"g{i}" for i in range(len(self.generators))]
        if len(labels) != len(self.generators) or len(set(labels)) != len(labels):
            raise ValidationError("need one distinct label per generator")
        self.labels = list(labels)
        self.name = name
        self._enumerate(cap)

    def _enumerate(self, cap):
        ident = tuple(range(self.degree))
        gens = [np.array(g) for g in self.generators]
        invs = [np.argsort(g) for g in gens]
        edges = []
        for k in range(len(gens)):
            edges.append((k, 1, gens[k]))
            edges.append((k, -1, invs[k]))
        elements = [ident]
        index = {ident: 0}
        words = [()]
        parent = [(-1, 0, 0)]
        queue = deque([0])
        while queue:
            x = queue.popleft()
            xa = np.array(elements[x])
            for k, s, g in edges:
                y = tuple(int(v) for v in xa[g])
                if y not in index:
                    if len(elements) >= cap:
                        raise CapExceeded(cap, f"group order exceeds cap {cap}")
                    index[y] = len(elements)
                    elements.append(y)
                    words.append(words[x] + ((k, s),))
                    parent.append((x, k, s))
                    queue.append(index[y])
        self.elements = elements
        self.index = index
        self.words = words
        self.parent = parent
        perms = np.array(elements, dtype=np.int64).reshape(len(elements), self.degree)
        self._perms = perms
        # right multiplication by generators: rmul[k][x] = x * g_k
        self.rmul = np.array(
            [[index[tuple(perms[x][np.array(g)])] for x in range(len(elements))]
             for g in self.generators], dtype=np.int64).reshape(len(gens), len(elements))

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    # ---- arithmetic --------------------------------------------------
    @cached_property
    def table(self):
        """Full multiplication table ``table[a, b] = index(a*b)``."""
        P = self._perms
        T = np.empty((len(self), len(self)), dtype=np.int64)
        for a in range(len(self)):
            prods = P[a][P]  # a∘b for every b
            T[a] = [self.index[tuple(row)] for row in prods]
        return T

    def mul(self, a: int, b: int) -> int:
        if len(self) <= 2048:
            return int(self.table[a, b])
        return self.index[tuple(int(v) for v in self._perms[a][self._perms[b]])]

    @cached_property
    def inverses(self):
        return np.array([self.index[tuple(int(v) for v in np.argsort(self._perms[a]))]
                         for a in range(len(self))], dtype=np.int64)

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    @cached_property
    def element_orders(self):
        orders = []
        for a in range(len(self)):
            n, x = 1, a
            while x != 0:
                x = self.mul(x, a)
                n += 1
            orders.append(n)
        return orders

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def p_part(self, p: int) -> int:
        n, r = self.order, 1
        while n % p == 0:
            n //= p
            r *= p
        return r

    def is_p_group(self, p: int) -> bool:
        return self.p_part(p) == self.order

    # ---- words -------------------------------------------------------
    def express_word(self, x: int):
        if not 0 <= x < len(self):
            raise ValidationError(f"element {x} not in group")
        return self.words[x]

    def word_string(self, x: int) -> str:
        return format_word(self.words[x], self.labels)

    def eval_word(self, word) -> int:
        x = 0
        for k, s in word:
            g = int(self.rmul[k][0])
            x = self.mul(x, g if s > 0 else self.inv(g))
        return x

    def parse_word(self, text: str):
        """Parse ``"a b^-1 a^3"`` into letters; ``"1"`` or ``""`` is the identity."""
        word = []
        for tok in text.replace("*", " ").split():
            if tok in ("1", "e"):
                continue
            name, _, exp = tok.partition("^")
            if name not in self.labels:
                raise ValidationError(f"unknown generator label {name!r}")
            n = int(exp) if exp else 1
            k = self.labels.index(name)
            word.extend([(k, 1 if n > 0 else -1)] * abs(n))
        return tuple(word)

    def element_from_word(self, text: str) -> int:
        return self.eval_word(self.parse_word(text))

    # ---- subgroups ---------------------------------------------------
    def closure(self, elems) -> frozenset:
        seen = {0}
        frontier = list(set(elems) - {0})
        gens = list(frontier)
        seen.update(frontier)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        new.append(y)
            frontier = new
        return frozenset(seen)

    def subgroup(self, elems) -> "Subgroup":
        return Subgroup(self, self.closure(elems))

    def conjugate_set(self, g: int, elems) -> frozenset:
        return frozenset(self.conj(g, x) for x in elems)

    def normalizes(self, g: int, elems) -> bool:
        return self.conjugate_set(g, elems) == frozenset(elems)

    def to_json(self) -> dict:
        d = {"degree": self.degree,
             "generators": [list(g) for g in self.generators],
             "labels": list(self.labels)}
        if self.name:
            d["name"] = self.name
        return d


class Subgroup:
    """A subgroup of ``parent`` given by its element indices."""

    def __init__(self, parent: FiniteGroup, elements):
        self.parent = parent
        self.elements = tuple(sorted(elements))
        self._set = frozenset(self.elements)
        if 0 not in self._set or parent.closure(self._set) != self._set:
            raise ValidationError("element set is not a subgroup")
        # greedy generating set in index order
        gens, span = [], frozenset([0])
        for x in self.elements:
            if x not in span:
                gens.append(x)
                span = parent.closure(gens)
        self.chosen_generators = gens

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._set

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent \
            and other._set == self._set

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent!r})"

    @property
    def generator_words(self):
        return [self.parent.word_string(x) for x in self.chosen_generators]

    @cached_property
    def group(self) -> FiniteGroup:
        """This subgroup as a standalone permutation group."""
        P = self.parent
        labels = [f"h{i}" for i in range(len(self.chosen_generators))]
        H = FiniteGroup([P.elements[x] for x in self.chosen_generators], labels,
                        degree=P.degree)
        return H

    @cached_property
    def embedding(self) -> "Embedding":
        return Embedding(self.group, self.parent, list(self.chosen_generators))

    def is_abelian(self):
        T = self.parent.table
        idx = np.array(self.elements)
        sub = T[np.ix_(idx, idx)]
        return bool((sub == sub.T).all())


class Homomorphism:
    """A homomorphism given by the images of the source generators."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images, check=True):
        self.source = source
        self.target = target
        imgs = []
        for x in images:
            if isinstance(x, str):
                x = target.element_from_word(x)
            imgs.append(int(x))
        if len(imgs) != source.ngens:
            raise ValidationError("need one image per source generator")
        self.images = imgs
        self.element_map = np.array(
            [self._eval(source.words[x]) for x in range(len(source))], dtype=np.int64)
        if check:
            self.validate()

    def _eval(self, word):
        x = 0
        T = self.target
        for k, s in word:
            y = self.images[k]
            x = T.mul(x, y if s > 0 else T.inv(y))
        return x

    def __call__(self, x: int) -> int:
        return int(self.element_map[x])

    def validate(self):
        S, T, m = self.source, self.target, self.element_map
        tab = S.table
        for a in range(len(S)):
            for b in range(len(S)):
                if m[tab[a, b]] != T.mul(int(m[a]), int(m[b])):
                    raise NotHomomorphism(
                        (S.word_string(a), S.word_string(b)),
                        f"map is not multiplicative on ({S.word_string(a) or '1'}, "
                        f"{S.word_string(b) or '1'})")

    def image_set(self) -> frozenset:
        return frozenset(int(x) for x in self.element_map)

    def kernel_is_trivial(self) -> bool:
        return len(self.image_set()) == len(self.source)

    def to_json(self) -> dict:
        return {lab: self.target.word_string(x) or "1"
                for lab, x in zip(self.source.labels, self.images)}


class Embedding(Homomorphism):
    def validate(self):
        super().validate()
        if not self.kernel_is_trivial():
            raise NotInjective("embedding is not injective")

    def image_subgroup(self) -> Subgroup:
        return Subgroup(self.target, self.image_set())


def validate_embedding(E: Homomorphism):
    """Return ``None`` if ``E`` is an injective homomorphism, else the reason."""
    try:
        Embedding(E.source, E.target, E.images)
    except (NotHomomorphism, NotInjective) as exc:
        return str(exc)
    return None


def express_word(G: FiniteGroup, x: int) -> str:
    return G.word_string(x)


# ---- p-subgroups --------------------------------------------------------

def _p_elements(G, p):
    return [x for x in range(1, len(G)) if _is_p_power(G.element_orders[x], p)]


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def sylow_p(G: FiniteGroup, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown from the trivial group by normalizing p-elements."""
    target = G.p_part(p)
    H = frozenset([0])
    pel = _p_elements(G, p)
    while len(H) < target:
        for x in pel:
            if x in H or not G.normalizes(x, H):
                continue
            K = G.closure(set(H) | {x})
            if _is_p_power(len(K), p):
                H = K
                break
        else:  # pragma: no cover - impossible by Sylow theory
            raise RuntimeError("Sylow growth stalled")
    return Subgroup(G, H)


def p_subgroups(G: FiniteGroup, p: int, elementary_abelian=False, cap=5000):
    """All non-trivial (elementary abelian) p-subgroups as frozensets."""
    pel = _p_elements(G, p)
    if elementary_abelian:
        pel = [x for x in pel if G.element_orders[x] == p]
    found = set()
    frontier = [frozenset([0])]
    while frontier:
        new = []
        for H in frontier:
            for x in pel:
                if x in H:
                    continue
                if elementary_abelian:
                    if any(G.mul(x, h) != G.mul(h, x) for h in H):
                        continue
                elif not G.normalizes(x, H):
                    continue
                K = G.closure(set(H) | {x})
                if not _is_p_power(len(K), p) or K in found:
                    continue
                found.add(K)
                if len(found) > cap:
                    raise CapExceeded(cap, "too many p-subgroups")
                new.append(K)
        frontier = new
    return found


def _class_rep(G, H):
    return min(tuple(sorted(G.conjugate_set(g, H))) for g in range(len(G)))


def subgroup_classes(G: FiniteGroup, subgroups):
    """Group subgroups by conjugacy; one canonical representative per class."""
    reps = {}
    for H in subgroups:
        key = _class_rep(G, H)
        reps.setdefault(key, set()).add(H)
    out = sorted(reps, key=lambda t: (len(t), t))
    return [(Subgroup(G, key), reps[key]) for key in out]


def elementary_abelian_reps(G: FiniteGroup, p: int):
    return [rep for rep, _ in subgroup_classes(G, p_subgroups(G, p, True))]


def p_subgroup_reps(G: FiniteGroup, p: int):
    return [rep for rep, _ in subgroup_classes(G, p_subgroups(G, p))]


def conjugacy_of_subgroups(G: FiniteGroup, H1: Subgroup, H2: Subgroup):
    """Some ``g`` with ``g H1 g^-1 = H2`` or ``None``."""
    if len(H1) != len(H2):
        return None
    target = frozenset(H2.elements)
    for g in range(len(G)):
        if G.conjugate_set(g, H1.elements) == target:
            return g
    return None


def direct_factor_complement(G: FiniteGroup, p: int):
    """If ``G = P x F`` with ``P`` Sylow and ``F`` a p'-group, return ``(P, F)``."""
    P = sylow_p(G, p)
    if any(not G.normalizes(g, P.elements) for g in range(len(G))):
        return None
    cand = [x for x in range(len(G))
            if gcd(G.element_orders[x], p) == 1
            and all(G.mul(x, y) == G.mul(y, x) for y in P.chosen_generators)]
    F = G.closure(cand)
    if len(F) * len(P) != len(G) or len(F) != len(cand):
        return None
    return P, Subgroup(G, F)


# ---- standard groups ----------------------------------------------------

def cyclic(n: int, label="g", name=None) -> FiniteGroup:
    if n == 1:
        return FiniteGroup([], [], degree=1, name=name or "C_1")
    return FiniteGroup([[(i + 1) % n for i in range(n)]], [label], name=name or f"C_{n}")


def trivial_group(name="1") -> FiniteGroup:
    return FiniteGroup([], [], degree=1, name=name)


def dihedral(n: int, labels=("r", "s")) -> FiniteGroup:
    """Dihedral group of order ``2n`` acting on the vertices of an n-gon."""
    r = [(i + 1) % n for i in range(n)]
    s = [(-i) % n for i in range(n)]
    return FiniteGroup([r, s], list(labels), name=f"D_{2 * n}")


def quaternion(labels=("i", "j")) -> FiniteGroup:
    """Q_8 in its left regular representation.

    Elements are ordered 1, i, j, k, -1, -i, -j, -k.
    """
    # multiplication of basis units: (sign, unit) with units 0=1,1=i,2=j,3=k
    unit = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}

    def idx(sign, u):
        return u if sign > 0 else u + 4

    def left(a):
        sa, ua = (1, a) if a < 4 else (-1, a - 4)
        out = []
        for b in range(8):
            sb, ub = (1, b) if b < 4 else (-1, b - 4)
            s, u = unit[(ua, ub)]
            out.append(idx(sa * sb * s, u))
        return out

    return FiniteGroup([left(1), left(2)], list(labels), name="Q_8")


def direct_product(G: FiniteGroup, H: FiniteGroup, name=None) -> FiniteGroup:
    n, m = G.degree, H.degree
    gens = [list(g) + [n + x for x in range(m)] for g in G.generators]
    gens += [list(range(n)) + [n + x for x in h] for h in H.generators]
    labels = list(G.labels) + [l if l not in G.labels else l + "'" for l in H.labels]
    return FiniteGroup(gens, labels, degree=n + m,
                       name=name or f"{G.name}x{H.name}")
