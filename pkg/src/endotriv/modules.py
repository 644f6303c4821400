"""kG-modules as matrix representations and the basic functors on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .errors import CapExceeded, FieldMismatch, ValidationError
from .gf import GF, get_field
from .groups import FiniteGroup, Homomorphism, Subgroup

DIM_CAP = 4096


class ModuleRep:
    """A finite-dimensional kG-module given by one matrix per generator.

    Matrices act on column vectors.  User-supplied modules are checked for
    Cayley consistency on construction; functors below build modules that
    are consistent by construction and pass ``validate=False``.
    """

    def __init__(self, group: FiniteGroup, field, matrices, validate=True,
                 element_fn=None, name=None):
        self.group = group
        self.field = get_field(field)
        if isinstance(matrices, dict):
            missing = set(group.labels) - set(matrices)
            if missing:
                raise ValidationError(f"no matrix for generator(s) {sorted(missing)}")
            matrices = [matrices[l] for l in group.labels]
        mats = [np.asarray(m, dtype=np.int64) for m in matrices]
        if len(mats) != group.ngens:
            raise ValidationError("need one matrix per generator")
        dims = {m.shape for m in mats}
        if element_fn is None and not mats:
            raise ValidationError("dimension of a module over the trivial group "
                                  "must be given through element_fn")
        if len(dims) > 1 or any(len(s) != 2 or s[0] != s[1] for s in dims):
            raise ValidationError("action matrices must be square of a common size")
        self.gens = mats
        self._element_fn = element_fn
        if mats:
            self.dim = mats[0].shape[0]
        else:
            self.dim = element_fn().shape[1]
        if self.dim > DIM_CAP:
            raise CapExceeded(DIM_CAP, f"module dimension {self.dim} exceeds cap")
        self.name = name
        if validate:
            self.validate()

    def __repr__(self):
        return f"ModuleRep(dim={self.dim}, over {self.group!r}, {self.field!r})"

    @classmethod
    def from_elements(cls, group, field, elements, name=None):
        """Build from a full ``(|G|, d, d)`` array of element matrices."""
        gen_idx = [int(group.rmul[k][0]) for k in range(group.ngens)]
        mats = [elements[x] for x in gen_idx]
        if not mats:
            d = elements.shape[1]
            return cls(group, field, [], validate=False, name=name,
                       element_fn=lambda: np.eye(d, dtype=np.int64)[None])
        return cls(group, field, mats, validate=False,
                   element_fn=lambda: elements, name=name)

    # ---- element matrices ------------------------------------------
    @cached_property
    def gen_inverses(self):
        F = self.field
        return [F.inverse(m) for m in self.gens]

    @cached_property
    def elements(self):
        """``elements[x]`` is the matrix of group element ``x``."""
        if self._element_fn is not None:
            E = self._element_fn()
            return np.asarray(E, dtype=np.int64)
        G, F, d = self.group, self.field, self.dim
        E = np.empty((len(G), d, d), dtype=np.int64)
        E[0] = F.eye(d)
        for x in range(1, len(G)):
            par, k, s = G.parent[x]
            step = self.gens[k] if s > 0 else self.gen_inverses[k]
            E[x] = F.matmul(E[par], step)
        return E

    def element_matrix(self, x: int):
        return self.elements[x]

    def validate(self):
        F, G = self.field, self.group
        for k, m in enumerate(self.gens):
            if m.size and (m.min() < 0 or m.max() >= F.q):
                raise ValidationError(f"entries of '{G.labels[k]}' out of range")
            if not F.is_invertible(m):
                raise ValidationError(f"action matrix for '{G.labels[k]}' is not invertible")
        E = self.elements
        for x in range(len(G)):
            for k in range(G.ngens):
                y = int(G.rmul[k][x])
                if not np.array_equal(F.matmul(E[x], self.gens[k]), E[y]):
                    w = G.word_string(x)
                    edge = f"{w}·{G.labels[k]}" if w else G.labels[k]
                    edge = edge.replace(" ", "·")
                    raise ValidationError(f"Cayley edge ({edge}) inconsistent")
        return True

    def same_algebra(self, other):
        if other.group is not self.group:
            raise ValidationError("modules over different groups")
        if other.field != self.field:
            raise FieldMismatch("modules over different fields")

    def act_on(self, K):
        """Action matrices on the invariant subspace spanned by the columns of ``K``."""
        F = self.field
        L = F.left_inverse(K)
        return [F.matmul(L, F.matmul(m, K)) for m in self.gens]

    def to_json(self) -> dict:
        F = self.field
        return {"field": {"p": F.p, "e": F.e}, "dim": self.dim,
                "matrices": {lab: [[F.to_coeffs(a) for a in row] for row in m.tolist()]
                             for lab, m in zip(self.group.labels, self.gens)}}


@dataclass
class HomSpace:
    source: ModuleRep
    target: ModuleRep
    basis: list

    @property
    def dim(self):
        return len(self.basis)

    def combine(self, coeffs):
        F = self.source.field
        out = F.zeros(self.target.dim, self.source.dim)
        for c, b in zip(coeffs, self.basis):
            if c:
                out = F.madd(out, F.scale(int(c), b))
        return out


# ---- constructors --------------------------------------------------------

def trivial(G: FiniteGroup, F) -> ModuleRep:
    F = get_field(F)
    return ModuleRep(G, F, [F.eye(1) for _ in range(G.ngens)], validate=False,
                     element_fn=lambda: np.ones((len(G), 1, 1), dtype=np.int64),
                     name="k")


def _perm_elements(n_points, images):
    """Permutation matrices with ``M[x] e_i = e_{images[x][i]}``."""
    n = len(images)
    E = np.zeros((n, n_points, n_points), dtype=np.int64)
    cols = np.arange(n_points)
    for x, img in enumerate(images):
        E[x, img, cols] = 1
    return E


def regular(G: FiniteGroup, F) -> ModuleRep:
    F = get_field(F)
    T = G.table
    E = _perm_elements(len(G), [T[x] for x in range(len(G))])
    return ModuleRep.from_elements(G, F, E, name="kG")


def free_module(G: FiniteGroup, F, rank: int) -> ModuleRep:
    F = get_field(F)
    n = len(G)
    T = G.table
    imgs = [np.concatenate([T[x] + i * n for i in range(rank)]) if rank else
            np.zeros(0, dtype=np.int64) for x in range(n)]
    E = _perm_elements(rank * n, imgs)
    return ModuleRep.from_elements(G, F, E, name=f"kG^{rank}")


def left_cosets(G: FiniteGroup, H: Subgroup):
    """Left cosets ``gH`` in order of their first (BFS-least) element."""
    reps, index = [], {}
    for g in range(len(G)):
        if g in index:
            continue
        c = len(reps)
        reps.append(g)
        for h in H.elements:
            index[G.mul(g, h)] = c
    return reps, index


def permutation_module(G: FiniteGroup, H: Subgroup, F) -> ModuleRep:
    F = get_field(F)
    reps, index = left_cosets(G, H)
    imgs = [np.array([index[G.mul(x, t)] for t in reps]) for x in range(len(G))]
    return ModuleRep.from_elements(G, F, _perm_elements(len(reps), imgs),
                                   name="k[G/H]")


# ---- functors ------------------------------------------------------------

def restrict(M: ModuleRep, H) -> ModuleRep:
    """Restriction along a subgroup or a homomorphism into ``M.group``."""
    if isinstance(H, Subgroup):
        if H.parent is not M.group:
            raise ValidationError("subgroup of a different group")
        hom = H.embedding
    elif isinstance(H, Homomorphism):
        hom = H
        if hom.target is not M.group:
            raise ValidationError("homomorphism does not land in the module's group")
    else:
        raise ValidationError("restrict needs a Subgroup or Homomorphism")
    emap = hom.element_map
    src = hom.source
    return ModuleRep.from_elements(src, M.field, M.elements[emap], name=M.name)


def induce(M: ModuleRep, G: FiniteGroup, H: Subgroup) -> ModuleRep:
    """Induce a module over ``H.group`` up to ``G`` (finite index)."""
    if M.group is not H.group:
        raise ValidationError("module is not over the given subgroup")
    F = M.field
    reps, index = left_cosets(G, H)
    to_h = {int(g): x for x, g in enumerate(H.embedding.element_map)}
    n, d = len(reps), M.dim
    E = np.zeros((len(G), n * d, n * d), dtype=np.int64)
    for x in range(len(G)):
        for i, t in enumerate(reps):
            xt = G.mul(x, t)
            j = index[xt]
            h = G.mul(G.inv(reps[j]), xt)
            E[x, j * d:(j + 1) * d, i * d:(i + 1) * d] = M.elements[to_h[h]]
    return ModuleRep.from_elements(G, F, E)


def dual(M: ModuleRep) -> ModuleRep:
    G = M.group
    E = M.elements[G.inverses].transpose(0, 2, 1).copy()
    return ModuleRep.from_elements(G, M.field, E)


def tensor(M: ModuleRep, N: ModuleRep) -> ModuleRep:
    M.same_algebra(N)
    F, G = M.field, M.group
    a, b = M.dim, N.dim
    if a * b > DIM_CAP:
        raise CapExceeded(DIM_CAP, f"tensor dimension {a * b} exceeds cap")

    def elements():
        EM, EN = M.elements, N.elements
        if F.prime:
            K = (EM[:, :, None, :, None] * EN[:, None, :, None, :]) % F.p
        else:
            K = F.mul[EM[:, :, None, :, None], EN[:, None, :, None, :]]
        return K.reshape(len(G), a * b, a * b)

    gens = [F.kron(m, n) for m, n in zip(M.gens, N.gens)]
    return ModuleRep(G, F, gens, validate=False, element_fn=elements)


def direct_sum(*mods: ModuleRep) -> ModuleRep:
    M = mods[0]
    for N in mods[1:]:
        M.same_algebra(N)
    G, F = M.group, M.field
    d = sum(N.dim for N in mods)
    E = np.zeros((len(G), d, d), dtype=np.int64)
    o = 0
    for N in mods:
        E[:, o:o + N.dim, o:o + N.dim] = N.elements
        o += N.dim
    return ModuleRep.from_elements(G, F, E)


def conjugate_basis(M: ModuleRep, S) -> ModuleRep:
    """The same module in the basis given by the columns of invertible ``S``."""
    F = M.field
    Si = F.inverse(S)
    E = np.array([F.matmul(Si, F.matmul(m, S)) for m in M.elements])
    return ModuleRep.from_elements(M.group, F, E)


def submodule_module(M: ModuleRep, K) -> ModuleRep:
    """The submodule spanned by the columns of ``K`` (assumed invariant)."""
    F = M.field
    if K.shape[1] == 0:
        return zero_module(M.group, F)
    L = F.left_inverse(K)
    E = np.array([F.matmul(L, F.matmul(m, K)) for m in M.elements])
    return ModuleRep.from_elements(M.group, F, E)


def zero_module(G: FiniteGroup, F) -> ModuleRep:
    F = get_field(F)
    return ModuleRep.from_elements(G, F, np.zeros((len(G), 0, 0), dtype=np.int64))


def spin(M: ModuleRep, vectors):
    """Basis (columns) of the smallest invariant subspace containing ``vectors``."""
    F = M.field
    V = np.asarray(vectors, dtype=np.int64).reshape(M.dim, -1)
    cols = F.column_basis(V)
    B = V[:, cols]
    frontier = B
    while frontier.shape[1]:
        imgs = np.concatenate([F.matmul(m, frontier) for m in M.gens], axis=1) \
            if M.gens else np.zeros((M.dim, 0), dtype=np.int64)
        cand = np.concatenate([B, imgs], axis=1)
        cols = F.column_basis(cand)
        new = [c for c in cols if c >= B.shape[1]]
        frontier = cand[:, new]
        B = cand[:, cols]
    return B


def submodule_generated(M: ModuleRep, vectors):
    """``(S, inclusion)`` for the submodule generated by ``vectors``."""
    F = M.field
    V = np.asarray(vectors, dtype=np.int64).reshape(M.dim, -1)
    if V.size and (V.min() < 0 or V.max() >= F.q):
        raise ValidationError("vector entries outside the field")
    B = spin(M, V)
    if B.shape[1]:
        R, _, _, _ = F.rref(B.T, transform=False)
        B = R[:B.shape[1]].T.copy()
    return submodule_module(M, B), B


def quotient(M: ModuleRep, S_basis):
    """``(Q, projection)`` for ``M`` modulo the invariant subspace ``S_basis``."""
    F = M.field
    comp = F.complement_coordinates(S_basis)
    d = M.dim
    W = np.concatenate([S_basis, F.eye(d)[:, comp]], axis=1)
    Wi = F.inverse(W)
    s = S_basis.shape[1]
    proj = Wi[s:]
    E = np.array([F.matmul(proj, F.matmul(m, W[:, s:])) for m in M.elements])
    return ModuleRep.from_elements(M.group, F, E), proj


# ---- hom spaces ----------------------------------------------------------

def _lincomb(F: GF, coeffs, mats):
    """``sum_i coeffs[i] * mats[i]`` for a stack of matrices."""
    n = mats.shape[0]
    flat = mats.reshape(n, -1)
    return F.matmul(np.asarray(coeffs, dtype=np.int64)[None, :], flat).reshape(mats.shape[1:])


def module_generators(M: ModuleRep):
    """Columns generating ``M`` as a module.

    Over a p-group in characteristic p this is a complement of the radical
    ``sum (g - 1) M`` and hence minimal; otherwise generators are chosen
    greedily from the standard basis.
    """
    F, G, d = M.field, M.group, M.dim
    if d == 0:
        return F.zeros(0, 0)
    if G.is_p_group(F.p):
        if M.gens:
            I = F.eye(d)
            rad = np.concatenate([F.msub(m, I) for m in M.gens], axis=1)
        else:
            rad = F.zeros(d, 0)
        comp = F.complement_coordinates(rad[:, F.column_basis(rad)] if rad.size else rad)
        return F.eye(d)[:, comp]
    chosen = []
    span = F.zeros(d, 0)
    for j in range(d):
        e = F.eye(d)[:, [j]]
        if span.shape[1] and F.rank(np.concatenate([span, e], axis=1)) == span.shape[1]:
            continue
        chosen.append(j)
        span = spin(M, F.eye(d)[:, chosen])
        if span.shape[1] == d:
            break
    return F.eye(d)[:, chosen]


def free_cover(M: ModuleRep, gens=None):
    """Matrix of ``kG^t -> M`` sending ``e_{j,g}`` to ``g * gens[:, j]``.

    Columns are ordered ``(j, g)`` with ``g`` running over element indices.
    """
    if gens is None:
        gens = module_generators(M)
    E = M.elements  # (|G|, d, d)
    t = gens.shape[1]
    F = M.field
    if t == 0:
        return F.zeros(M.dim, 0), gens
    cols = np.einsum("xab,bj->jax", E, gens) if F.prime else None
    if F.prime:
        Pi = (cols % F.p).transpose(1, 0, 2).reshape(M.dim, t * len(M.group))
    else:
        blocks = [F.matmul(E.transpose(1, 0, 2).reshape(M.dim * len(M.group), M.dim),
                           gens[:, [j]]).reshape(M.dim, len(M.group)) for j in range(t)]
        Pi = np.concatenate(blocks, axis=1)
    return Pi, gens


def free_action_rows(G: FiniteGroup, t: int, x: int):
    """Row permutation ``perm`` with ``(Reg^t(x) v) = v[perm]``."""
    n = len(G)
    inv = G.inverses[x]
    base = G.table[inv]  # Reg(x) e_h = e_{xh}, so new[xh] = old[h]
    return np.concatenate([base + j * n for j in range(t)]) if t else np.zeros(0, dtype=np.int64)


def free_submodule(G: FiniteGroup, F, t: int, K) -> ModuleRep:
    """The invariant subspace ``K`` (columns) of ``kG^t`` as a module."""
    F = get_field(F)
    if K.shape[1] == 0:
        return zero_module(G, F)
    L = F.left_inverse(K)
    gens = [F.matmul(L, K[free_action_rows(G, t, int(G.rmul[k][0]))])
            for k in range(G.ngens)]
    if not gens:
        return submodule_module(free_module(G, F, t), K)
    return ModuleRep(G, F, gens, validate=False)


def hom_kG(M: ModuleRep, N: ModuleRep) -> HomSpace:
    """Basis of ``Hom_kG(M, N)`` in reduced echelon order of the flattened matrices."""
    M.same_algebra(N)
    F, G = M.field, M.group
    dM, dN = M.dim, N.dim
    if dM == 0 or dN == 0:
        return HomSpace(M, N, [])
    Pi, gens = free_cover(M)
    t = gens.shape[1]
    n = len(G)
    K = F.kernel_basis(Pi)  # relations, columns in kG^t
    if K.shape[1]:
        rel_mod = free_submodule(G, F, t, K)
        rgens = F.matmul(K, module_generators(rel_mod))
    else:
        rgens = K
    EN = N.elements
    # equation for relation r: sum_{j,g} r[j,g] N(g) n_j = 0
    rows = []
    for c in range(rgens.shape[1]):
        r = rgens[:, c].reshape(t, n)
        rows.append(np.concatenate([_lincomb(F, r[j], EN) for j in range(t)], axis=1))
    if rows:
        A = np.concatenate(rows, axis=0)
        sol = F.kernel_basis(A)
    else:
        sol = F.eye(t * dN)
    # section of the cover: M -> kG^t
    S = F.solve_right(Pi, F.eye(dM))
    basis = []
    for c in range(sol.shape[1]):
        nj = sol[:, c].reshape(t, dN)
        Phi = np.concatenate([np.stack([EN[g] @ nj[j] for g in range(n)], axis=1) % F.p
                              if F.prime else
                              F.matmul(EN.transpose(1, 0, 2).reshape(dN * n, dN),
                                       nj[j][:, None]).reshape(dN, n)
                              for j in range(t)], axis=1)
        basis.append(F.matmul(Phi, S))
    return HomSpace(M, N, canonical_basis(F, basis, (dN, dM)))


def canonical_basis(F: GF, mats, shape):
    if not mats:
        return []
    V = np.stack([m.reshape(-1) for m in mats])
    R, r, _, _ = F.rref(V, transform=False)
    return [R[i].reshape(shape).copy() for i in range(r)]


def hom_kG_sylvester(M: ModuleRep, N: ModuleRep) -> HomSpace:
    """Direct solution of ``N(g) f = f M(g)`` for all generators (small cases)."""
    M.same_algebra(N)
    F = M.field
    a, b = M.dim, N.dim
    if a == 0 or b == 0:
        return HomSpace(M, N, [])
    # unknown f is b x a, flattened row-major: vec(f)[i*a + j] = f[i, j]
    blocks = []
    for m, n in zip(M.gens, N.gens):
        left = F.kron(n, F.eye(a))         # (N f) flattened
        right = F.kron(F.eye(b), m.T)      # (f M) flattened
        blocks.append(F.msub(left, right))
    if blocks:
        K = F.kernel_basis(np.concatenate(blocks, axis=0))
    else:
        K = F.eye(a * b)
    return HomSpace(M, N, canonical_basis(F, [K[:, c].reshape(b, a) for c in range(K.shape[1])],
                                          (b, a)))


def is_equivariant(M: ModuleRep, N: ModuleRep, f) -> bool:
    F = M.field
    return all(np.array_equal(F.matmul(f, m), F.matmul(n, f))
               for m, n in zip(M.gens, N.gens))


# ---- one-dimensional representations ------------------------------------

def one_dim_reps(G: FiniteGroup, F, max_gens=6):
    F = get_field(F)
    if G.ngens > max_gens:
        raise CapExceeded(max_gens, "too many generators for character search")
    out = []
    units = range(1, F.q)
    for vals in product(units, repeat=G.ngens):
        values = [1] * len(G)
        for x in range(1, len(G)):
            par, k, s = G.parent[x]
            v = vals[k] if s > 0 else int(F.inv[vals[k]])
            values[x] = int(F.mul[values[par], v])
        ok = all(int(F.mul[values[x], vals[k]]) == values[int(G.rmul[k][x])]
                 for x in range(len(G)) for k in range(G.ngens))
        if ok:
            E = np.array(values, dtype=np.int64).reshape(len(G), 1, 1)
            out.append(ModuleRep.from_elements(G, F, E, name="chi" + str(list(vals))))
    return out


def character_values(M: ModuleRep):
    """Scalar values of a one-dimensional module on all elements."""
    return [int(v) for v in M.elements[:, 0, 0]]
