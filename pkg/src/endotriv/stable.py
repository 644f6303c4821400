"""Stable module category over finite groups: stripping projective summands,
syzygies, stable isomorphism, endotriviality and Tate cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

import numpy as np

from .errors import CapExceeded, NotAPGroup, ValidationError
from .groups import elementary_abelian_reps, sylow_p
from . import modules as _modules
from .modules import (ModuleRep, dual, free_action_rows, free_cover,
                      free_submodule, hom_kG, restrict, tensor, zero_module)

ISO_SEARCH_CAP = 10000
EXHAUSTIVE_LIMIT = 2 ** 16


def _require_p_group(M: ModuleRep):
    if not M.group.is_p_group(M.field.p):
        raise NotAPGroup(f"{M.group.name or 'group'} of order {len(M.group)} "
                         f"is not a {M.field.p}-group")


def norm_matrix(M: ModuleRep):
    """Matrix of the sum of all group elements acting on ``M``."""
    F = M.field
    E = M.elements
    if F.prime:
        return E.sum(axis=0) % F.p
    return F.msum(list(E))


def norm_rank(M: ModuleRep) -> int:
    _require_p_group(M)
    if M.dim == 0:
        return 0
    return M.field.rank(norm_matrix(M))


# ---- stable classes and stripping ---------------------------------------

class StableClass:
    """A module without free summands, standing for its stable class."""

    def __init__(self, representative: ModuleRep):
        self.representative = representative

    @property
    def group(self):
        return self.representative.group

    @property
    def field(self):
        return self.representative.field

    @property
    def dim(self):
        return self.representative.dim

    def __repr__(self):
        return f"StableClass(dim={self.dim}, {self.group!r}, {self.field!r})"

    def to_json(self):
        return self.representative.to_json()


def as_module(X) -> ModuleRep:
    return X.representative if isinstance(X, StableClass) else X


@dataclass
class StripResult:
    """``M = S (+) kP^free_rank`` with ``witness = [K | iota]``.

    Columns of ``K`` span the complement ``S``; columns of ``iota`` are the
    free generators ``g v_i`` in the order ``(i, g)``.
    """
    stable: StableClass
    free_rank: int
    witness: np.ndarray
    complement: np.ndarray
    free_part: np.ndarray

    def verify(self, M: ModuleRep) -> bool:
        """Check ``witness^-1 M(g) witness = S(g) (+) Reg^r(g)`` on generators."""
        F, G = M.field, M.group
        W = self.witness
        if W.shape != (M.dim, M.dim) or not F.is_invertible(W):
            return False
        Wi = F.inverse(W)
        S = self.stable.representative
        s = S.dim
        for k, m in enumerate(M.gens):
            B = F.matmul(Wi, F.matmul(m, W))
            x = int(G.rmul[k][0])
            reg = F.eye(self.free_rank * len(G))[free_action_rows(G, self.free_rank, x)]
            if np.any(B[:s, s:]) or np.any(B[s:, :s]):
                return False
            if not np.array_equal(B[:s, :s], S.gens[k]):
                return False
            if not np.array_equal(B[s:, s:], reg):
                return False
        return True


def strip(M) -> StripResult:
    """Split off every free summand of a module over a p-group.

    The norm ``N`` of the group spans the socle of ``kP``; a vector ``v`` with
    ``N v != 0`` generates a free summand.  Taking ``v`` over the pivot columns
    of ``N`` gives all free summands at once, and the complement is cut out by
    a left inverse of ``[N v_i]`` transported over the group.
    """
    M = as_module(M)
    _require_p_group(M)
    F, G, d = M.field, M.group, M.dim
    n = len(G)
    if d == 0:
        return StripResult(StableClass(M), 0, F.zeros(0, 0), F.zeros(0, 0), F.zeros(0, 0))
    Nm = norm_matrix(M)
    cols = F.column_basis(Nm)
    r = len(cols)
    if r == 0:
        I = F.eye(d)
        return StripResult(StableClass(M), 0, I, I, F.zeros(d, 0))
    E = M.elements
    B = Nm[:, cols]
    lam = F.left_inverse(B)  # r x d, lam @ B = I
    # iota column (i, g) = M(g) e_{cols[i]}
    iota = E[:, :, cols].transpose(1, 2, 0).reshape(d, r * n)
    # rows lam_i M(g) for all i, g: the map to kP^r is m -> sum_g lam(M(g^-1) m) g
    if F.prime:
        A = np.einsum("id,xde->ixe", lam, E).reshape(r * n, d) % F.p
    else:
        A = np.concatenate([F.matmul(lam, E[x]) for x in range(n)], axis=0)
    K, free = F.kernel_basis(A, return_free=True)
    s = K.shape[1]
    if s != d - r * n:
        raise ArithmeticError("free summand split failed; norm argument violated")
    if s:
        gens = [F.matmul(m, K)[free] for m in M.gens]
        if gens:
            S = ModuleRep(G, F, gens, validate=False)
        else:
            S = ModuleRep.from_elements(G, F, F.eye(s)[None])
    else:
        S = zero_module(G, F)
    W = np.concatenate([K, iota], axis=1)
    return StripResult(StableClass(S), r, W, K, iota)


def stable_class(M) -> StableClass:
    if isinstance(M, StableClass):
        return M
    return strip(M).stable


def is_projective(M: ModuleRep, p=None) -> bool:
    """Projective iff free on restriction to a Sylow p-subgroup."""
    M = as_module(M)
    p = p or M.field.p
    if M.dim == 0:
        return True
    P = sylow_p(M.group, p)
    if len(P) == 1:
        return True
    R = restrict(M, P) if len(P) < len(M.group) else M
    return norm_rank(R) * len(P) == M.dim


# ---- syzygies -------------------------------------------------------------

@dataclass
class SyzygyStep:
    """One step ``0 -> Omega M -> kP^rank -> M`` of a minimal resolution.

    ``cover`` is the map ``kP^rank -> M`` and ``kernel`` the inclusion of
    ``Omega M`` into ``kP^rank`` (identity on the rows in ``free``).
    """
    module: ModuleRep
    rank: int
    cover: np.ndarray
    kernel: np.ndarray
    syzygy: ModuleRep


def syzygy_step(M: ModuleRep) -> SyzygyStep:
    _require_p_group(M)
    F, G = M.field, M.group
    Pi, gens = free_cover(M)
    t = gens.shape[1]
    if t * len(G) > _modules.DIM_CAP:
        raise CapExceeded(_modules.DIM_CAP, f"free cover of rank {t} exceeds the dimension cap")
    K = F.kernel_basis(Pi) if t else F.zeros(0, 0)
    if K.shape[1]:
        Om = free_submodule(G, F, t, K)
    else:
        Om = zero_module(G, F)
    return SyzygyStep(M, t, Pi, K, Om)


def omega(M, r: int = 1) -> StableClass:
    """``Omega^r M`` as a stable class; negative ``r`` goes through duals."""
    M = stable_class(M).representative
    _require_p_group(M)
    if r == 0:
        return StableClass(M)
    if r < 0:
        return StableClass(dual(omega(dual(M), -r).representative))
    X = M
    for _ in range(r):
        step = syzygy_step(X)
        X = step.syzygy
        res = strip(X)
        assert res.free_rank == 0, "minimal cover produced a free summand"
    return StableClass(X)


def omega_dims(M, r: int):
    """Dimensions of ``Omega^1 M .. Omega^r M`` along the minimal resolution."""
    X = stable_class(M).representative
    dims = []
    for _ in range(r):
        X = syzygy_step(X).syzygy
        dims.append(X.dim)
    return dims


def minimal_resolution(M, length: int):
    """Free ranks and boundaries of the minimal resolution of ``M``.

    Returns ``(ranks, cover, boundaries)`` where ``cover`` maps ``P_0 -> M``
    and ``boundaries[i]`` maps ``P_i -> P_{i-1}`` for ``1 <= i <= length``.
    """
    M = as_module(M)
    F = M.field
    step = syzygy_step(M)
    ranks = [step.rank]
    cover = step.cover
    boundaries = {}
    for i in range(1, length + 1):
        nxt = syzygy_step(step.syzygy)
        boundaries[i] = F.matmul(step.kernel, nxt.cover) if nxt.rank else \
            F.zeros(step.kernel.shape[0], 0)
        ranks.append(nxt.rank)
        step = nxt
    return ranks, cover, boundaries


# ---- stable isomorphism ---------------------------------------------------

@dataclass
class Iso:
    matrix: np.ndarray
    reason: str = "invertible equivariant map found"
    status: str = "Iso"


@dataclass
class NotIso:
    reason: str
    status: str = "NotIso"


@dataclass
class Undetermined:
    reason: str
    status: str = "Undetermined"


def fixed_points_dim(M: ModuleRep) -> int:
    F = M.field
    if M.dim == 0:
        return 0
    if not M.gens:
        return M.dim
    I = F.eye(M.dim)
    A = np.concatenate([F.msub(m, I) for m in M.gens], axis=0)
    return M.dim - F.rank(A)


def _hom_invariants(M: ModuleRep):
    """Cheap isomorphism invariants: fixed points and cofixed points."""
    return (fixed_points_dim(M), fixed_points_dim(dual(M)))


def stable_iso(M, N, seed: int = 0, cap: int = ISO_SEARCH_CAP,
               endotrivial: bool = False):
    """Decide ``M ~ N`` in the stable category of a p-group.

    Both sides are stripped first, so stable isomorphism becomes honest
    isomorphism of the cores.  ``endotrivial=True`` asserts both are
    endotrivial and enables the tensor criterion for a proof of non-iso.
    """
    A = stable_class(M).representative
    B = stable_class(N).representative
    A.same_algebra(B)
    F = A.field
    if A.dim != B.dim:
        return NotIso(f"stripped dimensions differ ({A.dim} vs {B.dim})")
    if A.dim == 0:
        return Iso(F.zeros(0, 0), "both stably zero")
    if all(np.array_equal(x, y) for x, y in zip(A.gens, B.gens)):
        return Iso(F.eye(A.dim), "identical stripped representatives")
    ia, ib = _hom_invariants(A), _hom_invariants(B)
    if ia != ib:
        return NotIso(f"fixed/cofixed point dimensions differ {ia} vs {ib}")
    if endotrivial:
        X = strip(tensor(A, dual(B))).stable
        if X.dim != 1:
            return NotIso(f"strip(M ⊗ N*) has dimension {X.dim}, not 1")
    H = hom_kG(A, B)
    h = H.dim
    if h == 0:
        return NotIso("no nonzero equivariant maps")
    hAA, hBB = hom_kG(A, A).dim, hom_kG(B, B).dim
    if not (hAA == hBB == h):
        return NotIso(f"hom dimensions differ: End(M)={hAA}, End(N)={hBB}, Hom(M,N)={h}")
    basis = np.stack([b.reshape(-1) for b in H.basis])
    total = F.q ** h
    rng = np.random.default_rng(seed)
    tries = min(cap, total)
    batch = 64
    done = 0
    while done < tries:
        k = min(batch, tries - done)
        C = F.random(rng, (k, h))
        mats = F.matmul(C, basis)
        for row in mats:
            f = row.reshape(B.dim, A.dim)
            if F.is_invertible(f):
                return Iso(f)
        done += k
    if total <= EXHAUSTIVE_LIMIT:
        for coeffs in product(range(F.q), repeat=h):
            f = F.matmul(np.array([coeffs], dtype=np.int64), basis).reshape(B.dim, A.dim)
            if F.is_invertible(f):
                return Iso(f)
        return NotIso(f"exhaustive search over all {total} equivariant maps")
    return Undetermined(f"no invertible map among {tries} random combinations "
                        f"of a {h}-dimensional hom space")


# ---- endotriviality -------------------------------------------------------

def is_endotrivial(M, p=None) -> bool:
    """Endotrivial iff ``M (x) M*`` is ``k`` plus free on every elementary
    abelian p-subgroup (classes up to conjugacy)."""
    M = as_module(M)
    p = p or M.field.p
    G = M.group
    if M.dim == 0:
        return False
    for E in elementary_abelian_reps(G, p):
        if len(E) == 1:
            continue
        R = restrict(M, E) if len(E) < len(G) else M
        if R.dim % p == 0:
            return False
        if strip(tensor(R, dual(R))).stable.dim != 1:
            return False
    return True


def stably_trivial(M) -> bool:
    """For an endotrivial module over a p-group: is ``[M] = [k]``?"""
    return stable_class(M).dim == 1


# ---- complete resolutions and Tate cohomology -----------------------------

@dataclass
class CompleteResolution:
    """Terms ``Q_i = kP^{ranks[i]}`` for ``lo <= i <= hi`` with boundaries
    ``d_i : Q_i -> Q_{i-1}`` for ``lo < i <= hi``.

    ``Q_i`` agrees with the minimal resolution of ``M`` for ``i >= 0`` and with
    the dual of the minimal resolution of ``M*`` for ``i < 0``.
    """
    module: ModuleRep
    lo: int
    hi: int
    ranks: dict
    boundaries: dict
    coincidence_degree: int = 0
    group_order: int = dc_field(default=1)

    def term_dim(self, i):
        return self.ranks[i] * self.group_order

    def check(self):
        """Boundaries compose to zero and ranks add up at interior degrees."""
        F = self.module.field
        for i in range(self.lo + 2, self.hi + 1):
            if np.any(F.matmul(self.boundaries[i - 1], self.boundaries[i])):
                return False
        for i in range(self.lo + 1, self.hi):
            if F.rank(self.boundaries[i]) + F.rank(self.boundaries[i + 1]) != self.term_dim(i):
                return False
        return True


def complete_resolution(M, lo: int, hi: int) -> CompleteResolution:
    M = stable_class(M).representative
    _require_p_group(M)
    F, G = M.field, M.group
    n = len(G)
    if lo > hi:
        raise ValidationError("empty window")
    up = max(hi, 0)
    down = max(-lo - 1, 0)
    ranks_p, cover, bd = minimal_resolution(M, up)
    ranks_q, cover_q, bd_q = minimal_resolution(dual(M), down)
    ranks, boundaries = {}, {}
    for i in range(lo, hi + 1):
        ranks[i] = ranks_p[i] if i >= 0 else ranks_q[-i - 1]
        if ranks[i] * n > _modules.DIM_CAP:
            raise CapExceeded(_modules.DIM_CAP, f"term Q_{i} exceeds the dimension cap")
    for i in range(lo + 1, hi + 1):
        if i >= 1:
            boundaries[i] = bd[i]
        elif i == 0:
            boundaries[i] = F.matmul(cover_q.T, cover)
        else:
            # d_i : P'_{-i-1}^* -> P'_{-i}^*, the transpose of d'_{-i}
            boundaries[i] = bd_q[-i].T.copy()
    return CompleteResolution(M, lo, hi, ranks, boundaries, 0, n)


@dataclass
class ExtHat:
    degree: int
    dim: int
    cocycles: list


def _coboundary(F, D, N: ModuleRep, n):
    """Matrix of ``Hom(Q_{i-1}, N) -> Hom(Q_i, N)``, ``f -> f d_i``.

    ``Hom_kG(kG^t, N) = N^t`` via ``f -> (f(e_{l,1}))_l``.
    """
    t_prev = D.shape[0] // n
    t_cur = D.shape[1] // n
    dN = N.dim
    E = N.elements
    out = F.zeros(t_cur * dN, t_prev * dN)
    for j in range(t_cur):
        col = D[:, j * n]
        for l in range(t_prev):
            coeffs = col[l * n:(l + 1) * n]
            if not np.any(coeffs):
                continue
            flat = F.matmul(coeffs[None, :], E.reshape(n, -1)).reshape(dN, dN)
            out[j * dN:(j + 1) * dN, l * dN:(l + 1) * dN] = flat
    return out


def ext_hat(M, N: ModuleRep, i: int, resolution: CompleteResolution = None) -> ExtHat:
    """Tate ``Ext^i(M, N)`` as the cohomology of ``Hom_kG(Q_*, N)`` at degree i."""
    Mrep = stable_class(M).representative
    Mrep.same_algebra(N)
    F = Mrep.field
    n = len(Mrep.group)
    C = resolution or complete_resolution(Mrep, i - 1, i + 1)
    if not (C.lo <= i - 1 and i + 1 <= C.hi):
        raise ValidationError(f"window [{C.lo},{C.hi}] does not cover [{i - 1},{i + 1}]")
    dN = N.dim
    dim_i = C.ranks[i] * dN
    if dim_i == 0:
        return ExtHat(i, 0, [])
    d_in = _coboundary(F, C.boundaries[i], N, n)        # Hom(Q_{i-1}) -> Hom(Q_i)
    d_out = _coboundary(F, C.boundaries[i + 1], N, n)   # Hom(Q_i) -> Hom(Q_{i+1})
    Z = F.kernel_basis(d_out) if d_out.size else F.eye(dim_i)
    Bd = d_in[:, F.column_basis(d_in)] if d_in.size else F.zeros(dim_i, 0)
    both = np.concatenate([Bd, Z], axis=1)
    piv = F.column_basis(both)
    reps = [both[:, c] for c in piv if c >= Bd.shape[1]]
    return ExtHat(i, Z.shape[1] - Bd.shape[1], reps)


def ordinary_ext_dim(M, N: ModuleRep, i: int) -> int:
    """``Ext^i(M, N)`` for ``i >= 1`` by dimension shifting:
    the cokernel of ``Hom(P_{i-1}, N) -> Hom(Omega^i M, N)``."""
    if i < 1:
        raise ValidationError("ordinary Ext via dimension shifting needs i >= 1")
    X = stable_class(M).representative
    F = X.field
    n = len(X.group)
    for _ in range(i - 1):
        X = syzygy_step(X).syzygy
    step = syzygy_step(X)
    Om, K = step.syzygy, step.kernel
    H = hom_kG(Om, N)
    if H.dim == 0:
        return 0
    E = N.elements
    imgs = []
    for l in range(step.rank):
        for c in range(N.dim):
            # f(e_{l,g}) = N(g) e_c, restricted along K
            fv = F.zeros(N.dim, step.rank * n)
            fv[:, l * n:(l + 1) * n] = E[:, :, c].T
            imgs.append(F.matmul(fv, K).reshape(-1))
    r = F.rank(np.stack(imgs)) if imgs else 0
    return H.dim - r
