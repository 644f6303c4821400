"""One-edge graphs of finite groups: amalgams ``A *_C B`` and HNN extensions
``H *_{(f, A)}``.

Modules over the infinite fundamental group are stored as finite gluing
data.  T of the fundamental group is assembled from the vertex and edge
groups through the six-term sequences with the connecting map fixed by
finiteness of the edge (amalgam, zero) or vertex (HNN, injective) group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedGroupShape, ValidationError
from .fgab import (ExtensionReport, FgAbGroup, FgAbHom, cokernel, cyclic_units,
                   direct_sum, hom_difference, hom_pair, is_exact, kernel, pullback)
from .gf import get_field
from .groups import (FiniteGroup, Homomorphism, p_subgroups,
                     subgroup_classes, validate_embedding)
from .modules import ModuleRep, free_module, direct_sum as mod_sum, restrict
from .stable import is_endotrivial, stable_iso, strip
from .tgroup import t_group, t_restriction


@dataclass
class AmalgamSpec:
    A: FiniteGroup
    B: FiniteGroup
    C: FiniteGroup
    embed_A: Homomorphism
    embed_B: Homomorphism
    field: object
    name: str = "A *_C B"

    def __post_init__(self):
        self.field = get_field(self.field)
        for lab, E, tgt in (("embed_A", self.embed_A, self.A), ("embed_B", self.embed_B, self.B)):
            if E.source is not self.C or E.target is not tgt:
                raise ValidationError(f"{lab} does not map C into its vertex group")
            why = validate_embedding(E)
            if why:
                raise ValidationError(f"{lab}: {why}")

    @property
    def p(self):
        return self.field.p


@dataclass
class HnnSpec:
    H: FiniteGroup
    A: FiniteGroup
    incl: Homomorphism
    f: Homomorphism
    field: object
    name: str = "H *_(f,A)"

    def __post_init__(self):
        self.field = get_field(self.field)
        for lab, E in (("incl", self.incl), ("f", self.f)):
            if E.source is not self.A or E.target is not self.H:
                raise ValidationError(f"{lab} does not map A into H")
            why = validate_embedding(E)
            if why:
                raise ValidationError(f"{lab}: {why}")

    @property
    def p(self):
        return self.field.p


# ---- modules over the fundamental group -----------------------------------

class GoGModule:
    """Gluing data for a module over ``A *_C B`` or an HNN extension.

    Amalgam: ``M`` over A, ``N`` over B and ``phi`` with
    ``phi M(c) = N(c) phi`` on the edge group.  HNN: ``M`` over H and
    ``theta`` with ``theta M(a) = M(f(a)) theta``.
    """

    def __init__(self, spec, M: ModuleRep, N: ModuleRep = None, phi=None, theta=None):
        self.spec = spec
        self.M = M
        self.N = N
        F = spec.field
        if isinstance(spec, AmalgamSpec):
            self.kind = "amalgam"
            if M.group is not spec.A or N is None or N.group is not spec.B:
                raise ValidationError("vertex modules are over the wrong groups")
            if M.dim != N.dim:
                raise ValidationError(f"vertex module dimensions differ ({M.dim} vs {N.dim})")
            self.phi = np.asarray(phi, dtype=np.int64)
            self._check(restrict(M, spec.embed_A), restrict(N, spec.embed_B), self.phi, "phi")
        else:
            self.kind = "hnn"
            if M.group is not spec.H:
                raise ValidationError("vertex module is over the wrong group")
            self.theta = np.asarray(theta, dtype=np.int64)
            self._check(restrict(M, spec.incl), restrict(M, spec.f), self.theta, "theta")
        self.field = F

    def _check(self, X, Y, T, name):
        F = self.spec.field
        if T.shape != (X.dim, X.dim) or not F.is_invertible(T):
            raise ValidationError(f"{name} is not an invertible {X.dim}x{X.dim} matrix")
        for k, (x, y) in enumerate(zip(X.gens, Y.gens)):
            if not np.array_equal(F.matmul(T, x), F.matmul(y, T)):
                lab = X.group.labels[k]
                raise ValidationError(f"{name} is not equivariant for edge generator '{lab}'")

    @property
    def dim(self):
        return self.M.dim

    def restrict_A(self) -> ModuleRep:
        return self.M

    def restrict_B(self) -> ModuleRep:
        """``b * m = phi^-1 (b phi(m))`` on the space of ``M``."""
        F = self.field
        Pi = F.inverse(self.phi)
        return ModuleRep(self.spec.B, F, [F.matmul(Pi, F.matmul(n, self.phi))
                                          for n in self.N.gens], validate=False)

    def restrict_H(self) -> ModuleRep:
        return self.M

    @property
    def t_matrix(self):
        return self.theta

    def vertex_modules(self):
        if self.kind == "amalgam":
            return [self.M, self.restrict_B()]
        return [self.M]

    def tensor(self, other: "GoGModule") -> "GoGModule":
        F = self.field
        from .modules import tensor
        if self.kind == "amalgam":
            return GoGModule(self.spec, tensor(self.M, other.M), tensor(self.N, other.N),
                             phi=F.kron(self.phi, other.phi))
        return GoGModule(self.spec, tensor(self.M, other.M), theta=F.kron(self.theta, other.theta))

    def to_json(self):
        F = self.field
        enc = lambda m: [[F.to_coeffs(int(a)) for a in row] for row in np.asarray(m).tolist()]
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "amalgam":
            out.update({"M": self.M.to_json(), "N": self.N.to_json(), "phi": enc(self.phi)})
        else:
            out.update({"M": self.M.to_json(), "theta": enc(self.theta)})
        return out


def c_module(spec: AmalgamSpec, M, N, phi) -> GoGModule:
    return GoGModule(spec, M, N, phi=phi)


def e_module(spec: HnnSpec, M, theta) -> GoGModule:
    return GoGModule(spec, M, theta=theta)


def is_endotrivial_gog(X: GoGModule) -> bool:
    """Every finite subgroup is conjugate into a vertex group, so the vertex
    restrictions decide."""
    return all(is_endotrivial(V) for V in X.vertex_modules())


def _right_coset_basis(G: FiniteGroup, emb: Homomorphism):
    """Columns of ``kG`` restricted to ``C``, ordered ``(x, c)`` with basis
    vector ``e_{c x}`` so that ``C`` acts as on a free module."""
    img = [int(v) for v in emb.element_map]
    seen, reps = set(), []
    for x in range(len(G)):
        if x in seen:
            continue
        reps.append(x)
        seen.update(G.mul(c, x) for c in img)
    order = [G.mul(c, x) for x in reps for c in img]
    return order


def _free_padding_basis(M, V, emb, copies, F):
    """Standard free basis of ``(M (+) kV^copies)`` restricted to the edge group."""
    n = len(V)
    order = _right_coset_basis(V, emb)
    d = M.dim + copies * n
    cols = []
    for j in range(copies):
        for x in order:
            e = F.zeros(d, 1)
            e[M.dim + j * n + x, 0] = 1
            cols.append(e)
    return np.concatenate(cols, axis=1) if cols else F.zeros(d, 0)


def align_representatives(spec: AmalgamSpec, M: ModuleRep, N: ModuleRep, phi_stable=None,
                          seed: int = 0) -> GoGModule:
    """Pad ``M`` and ``N`` with free modules so that a stable isomorphism of
    their edge restrictions becomes a genuine one."""
    F, C = spec.field, spec.C
    if not C.is_p_group(F.p):
        raise UnsupportedGroupShape("alignment needs the edge group to be a p-group")
    MC, NC = restrict(M, spec.embed_A), restrict(N, spec.embed_B)
    sM, sN = strip(MC), strip(NC)
    SM, SN = sM.stable.representative, sN.stable.representative
    if phi_stable is None:
        res = stable_iso(SM, SN, seed=seed)
        if res.status != "Iso":
            raise ValidationError(f"edge restrictions are not stably isomorphic: {res.reason}")
        phi_stable = res.matrix
    phi_stable = np.asarray(phi_stable, dtype=np.int64)
    iA = len(spec.A) // len(C)
    iB = len(spec.B) // len(C)
    a = b = 0
    while sM.free_rank + a * iA != sN.free_rank + b * iB:
        if sM.free_rank + a * iA < sN.free_rank + b * iB:
            a += 1
        else:
            b += 1
        if a > 4096 or b > 4096:
            raise ValidationError("no padding equalizes the free ranks")
    Mp = mod_sum(M, free_module(spec.A, F, a)) if a else M
    Np = mod_sum(N, free_module(spec.B, F, b)) if b else N
    pad = lambda W, extra: np.concatenate([W, F.zeros(extra, W.shape[1])], axis=0)
    WM = np.concatenate([pad(sM.witness, a * len(spec.A)),
                         _free_padding_basis(M, spec.A, spec.embed_A, a, F)], axis=1)
    WN = np.concatenate([pad(sN.witness, b * len(spec.B)),
                         _free_padding_basis(N, spec.B, spec.embed_B, b, F)], axis=1)
    R = WM.shape[0] - SM.dim
    core = F.zeros(WM.shape[0], WM.shape[0])
    core[:SM.dim, :SM.dim] = phi_stable
    core[SM.dim:, SM.dim:] = F.eye(R)
    phi = F.matmul(WN, F.matmul(core, F.inverse(WM)))
    return GoGModule(spec, Mp, Np, phi=phi)


# ---- T of the fundamental group -------------------------------------------

def _aut_hat(G: FiniteGroup, F) -> FgAbGroup:
    """Stable automorphisms of ``k``: ``k^x`` if p divides |G|, else trivial."""
    if G.p_part(F.p) > 1:
        return cyclic_units(F)
    return FgAbGroup(0)


def _scalar_res(src: FgAbGroup, tgt: FgAbGroup) -> FgAbHom:
    """Restriction of scalar automorphisms: identity when both sides are k^x."""
    if src.n_gens and tgt.n_gens:
        return FgAbHom(src, tgt, [[1]])
    return FgAbHom(src, tgt, [[0] * src.n_gens for _ in range(tgt.n_gens)])


@dataclass
class GogTResult:
    value: FgAbGroup = None
    extension: ExtensionReport = None
    derivation: list = field(default_factory=list)
    audit: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    components: int = None

    @property
    def T(self) -> str:
        if self.value is not None:
            return self.value.canonical_string()
        return f"extension of {self.extension.quotient} by {self.extension.sub}"

    def to_json(self):
        out = {"T": self.T, "derivation": self.derivation, "audit": self.audit}
        if self.value is not None:
            out["value"] = self.value.to_json()
        if self.extension is not None:
            out["extension"] = self.extension.to_json()
        if self.components is not None:
            out["components"] = self.components
        return out


def _oracle_group(oracles, key):
    v = oracles.get(key)
    if v is None or isinstance(v, FgAbGroup):
        return v
    return FgAbGroup(v["n_gens"], v.get("relations", []), v.get("labels"))


def _oracle_hom(oracles, key, src, tgt):
    v = oracles.get(key)
    if v is None:
        raise ValidationError(f"oracle '{key}' missing")
    if isinstance(v, FgAbHom):
        return v
    return FgAbHom(src, tgt, v)


def t_amalgam(spec: AmalgamSpec, oracles=None, seed: int = 0, cap: int = 12) -> GogTResult:
    """T(A *_C B) = {(x, y) in T(A) x T(B) : res x = res y}, the connecting map
    from Aut-hat(k) over C being zero because C is finite."""
    F = spec.field
    oracles = oracles or {}
    der = []
    reports = {}
    TA, TB, TC = (_oracle_group(oracles, "T_A"), _oracle_group(oracles, "T_B"),
                  _oracle_group(oracles, "T_C"))
    for key, G in (("A", spec.A), ("B", spec.B), ("C", spec.C)):
        if _oracle_group(oracles, "T_" + key) is None:
            reports[key] = t_group(G, F, cap=cap, seed=seed)
            der.append(f"T({key}) = {reports[key].value} [{reports[key].completeness}]")
        else:
            der.append(f"T({key}) = {_oracle_group(oracles, 'T_' + key)} [oracle]")
    TA = TA or reports["A"].value
    TB = TB or reports["B"].value
    TC = TC or reports["C"].value
    if "A" in reports and "C" in reports:
        resA = t_restriction(reports["A"], spec.embed_A, reports["C"])
    else:
        resA = _oracle_hom(oracles, "res_A", TA, TC)
    if "B" in reports and "C" in reports:
        resB = t_restriction(reports["B"], spec.embed_B, reports["C"])
    else:
        resB = _oracle_hom(oracles, "res_B", TB, TC)
    der.append(f"res^A_C = {resA.images}, res^B_C = {resB.images}")
    autA = _oracle_group(oracles, "aut_A") or _aut_hat(spec.A, F)
    autB = _oracle_group(oracles, "aut_B") or _aut_hat(spec.B, F)
    autC = _oracle_group(oracles, "aut_C") or _aut_hat(spec.C, F)
    aut_diff = hom_difference(_scalar_res(autA, autC), _scalar_res(autB, autC))
    cok = cokernel(aut_diff).group
    der.append(f"Aut-hat: A {autA}, B {autB}, C {autC}; "
               f"coker(res^A_C − res^B_C on Aut-hat) = {cok}")
    der.append("δ = 0 since C is finite")
    pb = pullback(resA, resB)
    diff = hom_difference(resA, resB)
    der.append(f"T(G) = ker(res^A_C − res^B_C) = {pb.group}")
    audit = {
        "T(A)×T(B)": is_exact(pb.inclusion, diff),
        "T(G)": kernel(pb.inclusion).group.is_trivial(),
        "Aut-hat(C)": cok.is_trivial(),
    }
    der.append("exactness self-audit: " + ", ".join(f"{k} {'ok' if v else 'FAILED'}"
                                                    for k, v in audit.items()))
    maps = {"res_A": resA, "res_B": resB, "to_A": pb.to_a, "to_B": pb.to_b}
    result = GogTResult(pb.group, None, der, audit, maps)
    result.reports = reports
    return result


def _same_embedding(e1: Homomorphism, e2: Homomorphism):
    return np.array_equal(np.asarray(e1.element_map), np.asarray(e2.element_map))


def t_hnn(spec: HnnSpec, oracles=None, seed: int = 0, cap: int = 12) -> GogTResult:
    """``0 -> coker(Aut-hat_H -> Aut-hat_A) -> T(G) -> ker(res - f* res) -> 0``,
    the connecting map being injective because H is finite."""
    F = spec.field
    oracles = oracles or {}
    der = []
    reports = {}
    for key, G in (("H", spec.H), ("A", spec.A)):
        if _oracle_group(oracles, "T_" + key) is None:
            reports[key] = t_group(G, F, cap=cap, seed=seed)
            der.append(f"T({key}) = {reports[key].value} [{reports[key].completeness}]")
        else:
            der.append(f"T({key}) = {_oracle_group(oracles, 'T_' + key)} [oracle]")
    TH = _oracle_group(oracles, "T_H") or reports["H"].value
    TA = _oracle_group(oracles, "T_A") or reports["A"].value
    if "H" in reports and "A" in reports:
        r1 = t_restriction(reports["H"], spec.incl, reports["A"])
        r2 = t_restriction(reports["H"], spec.f, reports["A"])
    else:
        r1 = _oracle_hom(oracles, "res_incl", TH, TA)
        r2 = _oracle_hom(oracles, "res_f", TH, TA)
    d = FgAbHom(TH, TA, [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(r1.images, r2.images)])
    autH = _oracle_group(oracles, "aut_H") or _aut_hat(spec.H, F)
    autA = _oracle_group(oracles, "aut_A") or _aut_hat(spec.A, F)
    # x -> x (f* x)^-1 on scalars: zero in additive notation
    aut_map = FgAbHom(autH, autA, [[0] * autH.n_gens for _ in range(autA.n_gens)])
    cok = cokernel(aut_map)
    sub = cok.group
    K = kernel(d)
    quotient = K.group
    der.append(f"Aut-hat: H {autH}, A {autA}; x ↦ x·(f*x)^-1 is trivial on scalars")
    der.append(f"im δ = coker(Aut-hat_H → Aut-hat_A) = {sub} (δ injective, H finite)")
    der.append(f"ker(res^H_A − f*res^H_A) = {quotient} = im(res^G_H)")
    if sub.is_trivial():
        der.append("ker(res^G_H) = im δ = 0: inflated one-dimensional representations "
                   "of the HNN quotient are stably trivial")
    ext = ExtensionReport(sub, quotient)
    if len(spec.A) == len(spec.H) and _same_embedding(spec.incl, spec.f):
        ext.resolved = direct_sum(sub, quotient)
        ext.split_reason = "inflation retraction along G → H (A = H, f = id; kernel Z " \
                           "is p-torsion-free)"
    elif sub.is_trivial():
        ext.resolved = quotient
        ext.split_reason = "sub is trivial"
    elif quotient.is_trivial():
        ext.resolved = sub
        ext.split_reason = "quotient is trivial"
    if ext.resolved is not None:
        der.append(f"T(G) = {ext.resolved} ({ext.split_reason})")
    else:
        der.append("extension class left undetermined")
    audit = {
        "T(H)": is_exact(K.map, d),
        "Aut-hat(A)": is_exact(aut_map, cok.map),
    }
    der.append("exactness self-audit: " + ", ".join(f"{k} {'ok' if v else 'FAILED'}"
                                                    for k, v in audit.items()))
    result = GogTResult(ext.resolved, ext, der, audit, {"res_incl": r1, "res_f": r2})
    result.reports = reports
    return result


# ---- components ------------------------------------------------------------

@dataclass
class ComponentReport:
    classes: list
    count: int

    def to_json(self):
        return {"count": self.count,
                "classes": [[f"{v}:{sorted(key)}" for v, key in cls] for cls in self.classes]}


def _class_index(G, p):
    """Map each non-trivial p-subgroup (frozenset) to its class key."""
    idx = {}
    classes = subgroup_classes(G, p_subgroups(G, p))
    for rep, members in classes:
        key = tuple(sorted(rep.elements))
        for H in members:
            idx[H] = key
    return idx, [tuple(sorted(rep.elements)) for rep, _ in classes]


def components(spec) -> ComponentReport:
    """Components of the graph on vertex-wise conjugacy classes of non-trivial
    p-subgroups, joined by containment and by edge-group identifications."""
    p = spec.p
    if isinstance(spec, AmalgamSpec):
        vertices = {"A": spec.A, "B": spec.B}
        edges = [("A", spec.embed_A, "B", spec.embed_B)]
        edge_group = spec.C
    else:
        vertices = {"H": spec.H}
        edges = [("H", spec.incl, "H", spec.f)]
        edge_group = spec.A
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    index = {}
    for v, G in vertices.items():
        idx, keys = _class_index(G, p)
        index[v] = idx
        for key in keys:
            parent[(v, key)] = (v, key)
        subs = list(idx)
        for H in subs:
            for K in subs:
                if H < K:
                    union((v, idx[H]), (v, idx[K]))
    for Q in p_subgroups(edge_group, p):
        for (v1, e1, v2, e2) in edges:
            i1 = frozenset(int(e1.element_map[x]) for x in Q)
            i2 = frozenset(int(e2.element_map[x]) for x in Q)
            union((v1, index[v1][i1]), (v2, index[v2][i2]))
    groups = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    classes = sorted((sorted(c) for c in groups.values()), key=lambda c: c[0])
    return ComponentReport(classes, len(classes))


# ---- inflation -------------------------------------------------------------

def inflate(spec, maps, M: ModuleRep, t_image: int = None) -> GoGModule:
    """View a module over a finite quotient ``Q`` as a module over the
    fundamental group, through vertex maps into ``Q``.

    Amalgam: ``maps = (to_Q_from_A, to_Q_from_B)``.  HNN: ``maps = to_Q_from_H``
    and ``t_image`` the element of ``Q`` that ``t`` maps to.
    """
    Q = M.group
    F = M.field
    if isinstance(spec, AmalgamSpec):
        fA, fB = maps
        if fA.target is not Q or fB.target is not Q:
            raise ValidationError("vertex maps must land in the module's group")
        for c in range(len(spec.C)):
            a = int(spec.embed_A.element_map[c])
            b = int(spec.embed_B.element_map[c])
            if int(fA.element_map[a]) != int(fB.element_map[b]):
                raise ValidationError(f"vertex maps disagree on edge element "
                                      f"'{spec.C.word_string(c) or '1'}'")
        return GoGModule(spec, restrict(M, fA), restrict(M, fB), phi=F.eye(M.dim))
    fH = maps
    if fH.target is not Q or t_image is None:
        raise ValidationError("HNN inflation needs a map H → Q and the image of t")
    for a in range(len(spec.A)):
        x = int(fH.element_map[int(spec.incl.element_map[a])])
        y = int(fH.element_map[int(spec.f.element_map[a])])
        if Q.mul(Q.mul(t_image, x), Q.inv(t_image)) != y:
            raise ValidationError("t does not conjugate the edge images correctly")
    return GoGModule(spec, restrict(M, fH), theta=M.elements[t_image])


@dataclass
class InflationMap:
    """``T(Q) -> T(G)`` read through ``T(G) -> T(A) x T(B)``."""
    to_vertices: FgAbHom
    kernel: FgAbGroup
    kernel_inclusion: FgAbHom
    derivation: list


def inflation_map(spec: AmalgamSpec, maps, TQ, seed: int = 0, cap: int = 12) -> InflationMap:
    """Induced map on T of inflation along vertex maps into a finite ``Q``.

    T of an amalgam with finite edge group embeds in ``T(A) x T(B)``, so the
    map is determined by restricting generators of ``T(Q)`` along both vertex
    maps and expressing them in ``T(A)`` and ``T(B)``.
    """
    if not isinstance(spec, AmalgamSpec):
        raise UnsupportedGroupShape("inflation maps on T are implemented for amalgams")
    F = spec.field
    fA, fB = maps
    TA = t_group(spec.A, F, cap=cap, seed=seed)
    TB = t_group(spec.B, F, cap=cap, seed=seed)
    rA = t_restriction(TQ, fA, TA)
    rB = t_restriction(TQ, fB, TB)
    both = hom_pair(rA, rB)
    K = kernel(both)
    der = [f"T(Q) = {TQ.value}", f"T(A) = {TA.value}, T(B) = {TB.value}",
           f"generator images in T(A) × T(B): {both.images}",
           f"kernel of inflation = {K.group}"]
    return InflationMap(both, K.group, K.map, der)
