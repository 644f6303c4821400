"""Finitely generated abelian groups given by integer relation matrices.

A group is ``Z^n / rowspan(relations)``; a homomorphism ``A -> B`` is an
integer matrix whose column ``j`` is the image of generator ``j`` of ``A``.
All arithmetic is in Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, prod

from .errors import ValidationError


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A, B):
    if not A or not B:
        rows = len(A)
        cols = len(B[0]) if B else 0
        return [[0] * cols for _ in range(rows)]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def _transpose(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(r) for r in zip(*A)]


def snf(A, nrows=None, ncols=None):
    """Smith normal form: returns ``(D, U, V)`` with ``D = U A V``.

    ``D`` is diagonal with non-negative entries ``d1 | d2 | ...``; ``U`` and
    ``V`` are unimodular.  Shapes of empty matrices are taken from
    ``nrows``/``ncols``.
    """
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    D = [list(map(int, row)) for row in A] if m else []
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row dst += c * row src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the remaining block becomes the pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: the pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % D[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return D, U, V


def _diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def integer_kernel(A, ncols):
    """Basis (as rows) of ``{x in Z^ncols : A x = 0}``."""
    if not A:
        return _identity(ncols)
    D, U, V = snf(A, ncols=ncols)
    d = _diag(D)
    r = sum(1 for x in d if x)
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve_int(A, b, ncols):
    """Some integer ``x`` with ``A x = b`` or ``None``."""
    m = len(A)
    if m == 0:
        return [0] * ncols
    D, U, V = snf(A, ncols=ncols)
    c = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * ncols
    for i in range(m):
        dii = D[i][i] if i < ncols else 0
        if dii == 0:
            if c[i]:
                return None
        else:
            if c[i] % dii:
                return None
            y[i] = c[i] // dii
    return [sum(V[i][j] * y[j] for j in range(ncols)) for i in range(ncols)]


class FgAbGroup:
    """``Z^n_gens / rowspan(relations)`` with labelled generators."""

    def __init__(self, n_gens: int, relations=None, gen_labels=None):
        self.n_gens = int(n_gens)
        rel = [list(map(int, r)) for r in (relations or [])]
        if any(len(r) != self.n_gens for r in rel):
            raise ValidationError("relation length does not match generator count")
        self.relations = [r for r in rel if any(r)]
        self.gen_labels = list(gen_labels) if gen_labels else [f"x{i}" for i in range(n_gens)]

    def __repr__(self):
        return f"FgAbGroup({self})"

    def __str__(self):
        return self.canonical_string()

    @cached_property
    def _snf(self):
        return snf(self.relations, nrows=len(self.relations), ncols=self.n_gens)

    @cached_property
    def invariants(self):
        """Diagonal of the SNF padded with zeros to length ``n_gens``."""
        D, _, _ = self._snf
        d = _diag(D) if self.relations else []
        return d + [0] * (self.n_gens - len(d))

    def canonical(self):
        free = sum(1 for x in self.invariants if x == 0)
        torsion = [x for x in self.invariants if x > 1]
        return free, torsion

    def canonical_string(self):
        free, torsion = self.canonical()
        parts = []
        if free:
            parts.append("Z" if free == 1 else f"Z^{free}")
        parts += [f"Z/{d}" for d in torsion]
        return " ⊕ ".join(parts) if parts else "0"

    def is_trivial(self):
        return all(x == 1 for x in self.invariants)

    def is_finite(self):
        return all(x != 0 for x in self.invariants)

    def order(self):
        """Order of the group, or ``None`` if infinite."""
        if not self.is_finite():
            return None
        return prod(self.invariants)

    def normalize(self, v):
        """Canonical coordinates of the class of ``v`` in SNF coordinates."""
        _, _, V = self._snf
        n = self.n_gens
        # rowspan(R) = rowspan(D V^-1), so w = v V diagonalizes the lattice
        w = [sum(v[i] * V[i][j] for i in range(n)) for j in range(n)]
        return tuple(x % d if d else x for x, d in zip(w, self.invariants))

    def is_zero(self, v) -> bool:
        return all(x == 0 for x in self.normalize(v))

    def equal(self, u, v) -> bool:
        return self.is_zero([a - b for a, b in zip(u, v)])

    def element_order(self, v):
        """Order of the element ``v`` (``0`` for infinite order)."""
        w = self.normalize(v)
        o = 1
        for x, d in zip(w, self.invariants):
            if x == 0:
                continue
            if d == 0:
                return 0
            o = o * (d // gcd(d, x)) // gcd(o, d // gcd(d, x))
        return o

    def elements(self, cap=4096):
        """All elements (as generator-coordinate vectors) of a finite group."""
        if not self.is_finite():
            raise ValidationError("cannot enumerate an infinite group")
        if self.order() > cap:
            raise ValidationError("group too large to enumerate")
        _, _, V = self._snf
        Vi = _inverse_unimodular(V)
        n = self.n_gens
        out = []
        for w in product(*[range(d) for d in self.invariants]):
            out.append([sum(w[j] * Vi[j][i] for j in range(n)) for i in range(n)])
        return out

    def to_json(self):
        free, torsion = self.canonical()
        return {"free_rank": free, "torsion": torsion, "labels": self.gen_labels,
                "relations": self.relations, "canonical": self.canonical_string()}


def _inverse_unimodular(V):
    n = len(V)
    # V is unimodular, so the inverse exists over Z; solve via SNF of V
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        x = solve_int(V, e, n)
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def trivial_group():
    return FgAbGroup(0)


def cyclic_group(n: int, label="x"):
    return FgAbGroup(1, [[n]] if n else [], [label])


class FgAbHom:
    """Homomorphism given by images of source generators (columns)."""

    def __init__(self, source: FgAbGroup, target: FgAbGroup, images, check=True):
        self.source = source
        self.target = target
        M = [list(map(int, r)) for r in images] if images else []
        if not M:
            M = [[0] * source.n_gens for _ in range(target.n_gens)]
        if len(M) != target.n_gens or any(len(r) != source.n_gens for r in M):
            raise ValidationError("image matrix has the wrong shape")
        self.images = M
        if check:
            self.validate()

    def __repr__(self):
        return f"FgAbHom({self.source} -> {self.target}, {self.images})"

    def __call__(self, v):
        return [sum(self.images[i][j] * v[j] for j in range(self.source.n_gens))
                for i in range(self.target.n_gens)]

    def validate(self):
        for r in self.source.relations:
            if not self.target.is_zero(self(r)):
                raise ValidationError(f"relation {r} is not sent to zero")
        return True

    def compose(self, other: "FgAbHom") -> "FgAbHom":
        """``self o other``."""
        return FgAbHom(other.source, self.target, _matmul(self.images, other.images))

    def equals(self, other: "FgAbHom") -> bool:
        return all(self.target.equal(self(e), other(e))
                   for e in _identity(self.source.n_gens))

    def is_zero(self):
        return all(self.target.is_zero(self(e)) for e in _identity(self.source.n_gens))

    def to_json(self):
        return {"source": self.source.canonical_string(),
                "target": self.target.canonical_string(), "images": self.images}


@dataclass
class SubgroupData:
    """A group together with a map into (or out of) another group."""
    group: FgAbGroup
    map: FgAbHom


def kernel(f: FgAbHom) -> SubgroupData:
    """Kernel as a group with its inclusion into the source.

    ``x`` lies in the kernel iff ``F x = R^T y`` for some ``y``, where ``R``
    are the target relations; the pairs ``(x, y)`` form the integer kernel of
    ``[F | -R^T]``.
    """
    A, B = f.source, f.target
    nA, nB = A.n_gens, B.n_gens
    R = B.relations
    big = [f.images[i] + [-r[i] for r in R] for i in range(nB)]
    basis = integer_kernel(big, nA + len(R)) if nB else _identity(nA + len(R))
    gens = [v[:nA] for v in basis]
    # kernel generated by gens; relations: integer combos landing in A's relations
    k = len(gens)
    inc_mat = [[gens[j][i] for j in range(k)] for i in range(nA)]
    rels = _pullback_relations(inc_mat, A, k)
    K = FgAbGroup(k, rels, [f"k{j}" for j in range(k)])
    return SubgroupData(K, FgAbHom(K, A, inc_mat if k else [[] for _ in range(nA)],
                                   check=False))


def _pullback_relations(inc_mat, A: FgAbGroup, k: int):
    """Relations on ``Z^k`` pulled back along ``Z^k -> A``: combos mapping to 0."""
    nA = A.n_gens
    R = A.relations
    big = [[inc_mat[i][j] for j in range(k)] + [-r[i] for r in R] for i in range(nA)]
    if nA == 0:
        return _identity(k)
    basis = integer_kernel(big, k + len(R))
    return [v[:k] for v in basis]


def image(f: FgAbHom) -> SubgroupData:
    """Image as a group with its inclusion into the target."""
    A, B = f.source, f.target
    nA = A.n_gens
    rels = _pullback_relations(f.images, B, nA)
    I = FgAbGroup(nA, rels, [f"f({l})" for l in A.gen_labels])
    return SubgroupData(I, FgAbHom(I, B, f.images, check=False))


def cokernel(f: FgAbHom) -> SubgroupData:
    """Cokernel as a group with the projection from the target."""
    B = f.target
    cols = _transpose(f.images, f.source.n_gens)
    rels = B.relations + [c for c in cols if any(c)]
    Q = FgAbGroup(B.n_gens, rels, B.gen_labels)
    return SubgroupData(Q, FgAbHom(B, Q, _identity(B.n_gens), check=False))


def direct_sum(*groups: FgAbGroup) -> FgAbGroup:
    n = sum(G.n_gens for G in groups)
    rels, labels, o = [], [], 0
    for G in groups:
        for r in G.relations:
            rels.append([0] * o + r + [0] * (n - o - G.n_gens))
        labels += G.gen_labels
        o += G.n_gens
    return FgAbGroup(n, rels, labels)


def hom_pair(f: FgAbHom, g: FgAbHom) -> FgAbHom:
    """``(f, g) : A -> B (+) C``."""
    T = direct_sum(f.target, g.target)
    return FgAbHom(f.source, T, f.images + g.images)


def hom_difference(f: FgAbHom, g: FgAbHom) -> FgAbHom:
    """``(a, b) -> f(a) - g(b)`` on ``A (+) B``."""
    if f.target.n_gens != g.target.n_gens:
        raise ValidationError("difference of maps with different targets")
    S = direct_sum(f.source, g.source)
    M = [rf + [-x for x in rg] for rf, rg in zip(f.images, g.images)]
    return FgAbHom(S, f.target, M)


@dataclass
class Pullback:
    group: FgAbGroup
    to_a: FgAbHom
    to_b: FgAbHom
    inclusion: FgAbHom


def pullback(f: FgAbHom, g: FgAbHom) -> Pullback:
    """``{(a, b) : f(a) = g(b)}`` with its projections."""
    if f.target.n_gens != g.target.n_gens or f.target.relations != g.target.relations:
        raise ValidationError("pullback of maps with different targets")
    d = hom_difference(f, g)
    K = kernel(d)
    nA = f.source.n_gens
    inc = K.map.images
    to_a = FgAbHom(K.group, f.source, inc[:nA] if inc else [], check=False)
    to_b = FgAbHom(K.group, g.source, inc[nA:] if inc else [], check=False)
    return Pullback(K.group, to_a, to_b, K.map)


def contained(sub: FgAbHom, sup: FgAbHom) -> bool:
    """Is the image of ``sub`` contained in the image of ``sup`` (same target)?"""
    B = sup.target
    R = B.relations
    big = [sup.images[i] + [r[i] for r in R] for i in range(B.n_gens)]
    ncols = sup.source.n_gens + len(R)
    for j in range(sub.source.n_gens):
        v = [sub.images[i][j] for i in range(B.n_gens)]
        if solve_int(big, v, ncols) is None:
            return False
    return True


def is_exact(f: FgAbHom, g: FgAbHom) -> bool:
    """``image(f) = kernel(g)`` checked by double inclusion."""
    if not g.compose(f).is_zero():
        return False
    K = kernel(g)
    return contained(K.map, f)


def is_exact_bruteforce(f: FgAbHom, g: FgAbHom, cap=64) -> bool:
    """Element enumeration version of :func:`is_exact` for small finite groups."""
    B = f.target
    imgs = {B.normalize(f(a)) for a in f.source.elements(cap)}
    ker = {B.normalize(b) for b in B.elements(cap) if g.target.is_zero(g(b))}
    return imgs == ker


def isomorphic(A: FgAbGroup, B: FgAbGroup) -> bool:
    return A.canonical() == B.canonical()


def cyclic_units(F) -> FgAbGroup:
    """The multiplicative group of ``F``: cyclic of order ``q - 1``."""
    from .gf import get_field
    q = get_field(F).q
    return FgAbGroup(1, [[q - 1]], ["λ"])


@dataclass
class ExtensionReport:
    """``0 -> sub -> T -> quotient -> 0`` with the extension left open
    unless a splitting argument resolves it."""
    sub: FgAbGroup
    quotient: FgAbGroup
    resolved: FgAbGroup = None
    split_reason: str = None
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {"sub": self.sub.canonical_string(),
               "quotient": self.quotient.canonical_string(),
               "resolved": self.resolved.canonical_string() if self.resolved else None,
               "split_reason": self.split_reason}
        return out
