"""The group T(G) of endotrivial modules for finite groups at desk scale.

Supported shapes are p-groups and direct products ``P x F`` with ``F`` a
p'-group.  Relations are found by stripping over ``P``: a stably trivial
class restricts to ``k`` plus free there, and the residual one-dimensional
character is read off from ``X^P / N_P X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (ExpressionNotFound, NotEndotrivial, UnsupportedGroupShape,
                     ValidationError)
from .fgab import FgAbGroup, FgAbHom, kernel
from .gf import get_field
from .groups import FiniteGroup, Homomorphism, Subgroup, direct_factor_complement
from .modules import ModuleRep, dual, one_dim_reps, restrict, tensor, trivial
from .stable import is_endotrivial, omega, stable_class, stable_iso

OMEGA_CAP = 12
EXTRA_BOX = 2


@dataclass
class NoRelationUpTo:
    cap: int

    def __str__(self):
        return f"NoRelationUpTo({self.cap})"


# ---- group shape -----------------------------------------------------------

class _Shape:
    """``G = P x F`` bookkeeping: Sylow factor, complement and inflation."""

    def __init__(self, G: FiniteGroup, p: int):
        self.G, self.p = G, p
        self.coprime = G.p_part(p) == 1
        if G.is_p_group(p):
            self.P, self.Fc = None, None
            self.ppart = None
        elif self.coprime:
            self.P, self.Fc = None, None
        else:
            pair = direct_factor_complement(G, p)
            if pair is None:
                raise UnsupportedGroupShape(
                    f"{G.name or 'group'} is neither a {p}-group nor a direct "
                    f"product of its Sylow {p}-subgroup with a {p}'-group")
            self.P, self.Fc = pair
            embP = self.P.embedding.element_map
            embF = self.Fc.embedding.element_map
            ppart = np.zeros(len(G), dtype=np.int64)
            for x in range(len(embP)):
                for y in range(len(embF)):
                    ppart[G.mul(int(embP[x]), int(embF[y]))] = x
            self.ppart = ppart

    @property
    def p_group(self) -> FiniteGroup:
        if self.P is None:
            return self.G
        return self.P.group

    def to_p(self, M: ModuleRep) -> ModuleRep:
        """Restriction to the Sylow factor."""
        return M if self.P is None else restrict(M, self.P)

    def inflate(self, M: ModuleRep) -> ModuleRep:
        """Module over ``P`` viewed over ``P x F`` with ``F`` acting trivially."""
        if self.P is None:
            return M
        return ModuleRep.from_elements(self.G, M.field, M.elements[self.ppart])


# ---- Omega order -----------------------------------------------------------

def omega_order(G: FiniteGroup, F, cap: int = OMEGA_CAP):
    """Least ``n`` in ``[1, cap]`` with ``Omega^n k`` stably trivial."""
    F = get_field(F)
    sh = _Shape(G, F.p)
    if sh.coprime:
        raise ValidationError(f"p = {F.p} does not divide |G| = {len(G)}")
    X = trivial(sh.p_group, F)
    for n in range(1, cap + 1):
        X = omega(X, 1).representative
        if X.dim == 1:
            return n
    return NoRelationUpTo(cap)


# ---- the report ------------------------------------------------------------

@dataclass
class TGroupReport:
    group: FiniteGroup
    field: object
    generators: list          # (label, ModuleRep over G or None for symbolic)
    value: FgAbGroup
    completeness: str         # "Verified" or "ComputedSubgroup"
    evidence: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    _ctx: object = None

    def express(self, M: ModuleRep):
        """Coordinates of the class of ``M`` in the generators (search in the box)."""
        return self._ctx.express(M)

    def to_json(self):
        return {"group": self.group.name, "field": {"p": self.field.p, "e": self.field.e},
                "T": self.value.canonical_string(), "value": self.value.to_json(),
                "generators": [lab for lab, _ in self.generators],
                "completeness": self.completeness, "evidence": self.evidence,
                "notes": self.notes}


class _Context:
    """Everything needed to evaluate and recognise classes in T(G)."""

    def __init__(self, G, F, extras, cap, seed):
        self.G, self.F, self.cap, self.seed = G, F, cap, seed
        self.shape = _Shape(G, F.p)
        self.evidence = []
        self.extras = list(extras)
        self._omega_p = {}
        self._omega_g = {}
        self.order = None
        if self.shape.coprime:
            self.labels = []
            self.chars = []
            return
        Pg = self.shape.p_group
        self._omega_p[0] = trivial(Pg, F)
        o = omega_order(G, F, cap)
        self.order = o if isinstance(o, int) else None
        self.extras_p = [stable_class(self.shape.to_p(E)).representative for E in self.extras]
        self._characters()
        self.labels = ["[Ωk]"] + [lab for lab, _ in self.char_gens] + \
            [f"[X{i}]" for i in range(len(self.extras))]

    # ---- characters ----------------------------------------------------
    def _characters(self):
        G, F = self.G, self.F
        q1 = F.q - 1
        chars = one_dim_reps(G, F)
        logs = []
        for c in chars:
            vals = [int(c.gens[k][0, 0]) for k in range(G.ngens)]
            logs.append(tuple(int(F.log[v]) for v in vals))
        zero = tuple([0] * G.ngens)
        # greedy generating set and coordinates of every character
        gens, coords = [], {zero: ()}
        for lg in logs:
            if lg in coords:
                continue
            gens.append(lg)
            m = len(gens)
            coords = {zero: (0,) * m}
            frontier = [zero]
            while frontier:
                new = []
                for v in frontier:
                    for i, g in enumerate(gens):
                        w = tuple((a + b) % q1 for a, b in zip(v, g))
                        if w not in coords:
                            c = list(coords[v])
                            c[i] += 1
                            coords[w] = tuple(c)
                            new.append(w)
                frontier = new
        m = len(gens)
        coords = {k: tuple(v) + (0,) * (m - len(v)) for k, v in coords.items()}
        self.char_logs = gens
        self.char_coords = coords
        self.char_gens = []
        for i, lg in enumerate(gens):
            vals = [int(F.power(F.primitive, a)) for a in lg]
            self.char_gens.append((f"χ{i}", ModuleRep(G, F, [[[v]] for v in vals],
                                                      validate=False)))
        # exact relations among the chosen characters
        if m:
            src = FgAbGroup(m)
            tgt = FgAbGroup(G.ngens, [[q1 * int(i == j) for j in range(G.ngens)]
                                      for i in range(G.ngens)])
            L = [[gens[j][i] for j in range(m)] for i in range(G.ngens)]
            K = kernel(FgAbHom(src, tgt, L))
            inc = K.map.images
            self.char_relations = [[inc[i][j] for i in range(m)]
                                   for j in range(K.group.n_gens)]
        else:
            self.char_relations = []
        self.chars = self.char_gens

    def character_of(self, X: ModuleRep):
        """Coordinates of the character of ``G`` on ``X^P / N_P X``."""
        F = self.F
        if not self.char_gens:
            return ()
        Xp = self.shape.to_p(X)
        d = X.dim
        I = F.eye(d)
        A = np.concatenate([F.msub(m, I) for m in Xp.gens], axis=0) if Xp.gens else F.zeros(0, d)
        fix = F.kernel_basis(A) if A.size else I
        Nm = F.msum(list(Xp.elements)) if not F.prime else Xp.elements.sum(axis=0) % F.p
        NX = Nm[:, F.column_basis(Nm)]
        both = np.concatenate([NX, fix], axis=1)
        piv = F.column_basis(both)
        extra = [c for c in piv if c >= NX.shape[1]]
        if len(extra) != 1:
            raise ValidationError("Tate H^0 over the Sylow subgroup is not one-dimensional")
        v = both[:, extra[0]]
        basis = np.concatenate([v[:, None], NX], axis=1)
        logs = []
        for m in X.gens:
            sol = F.solve_right(basis, F.matmul(m, v[:, None]))
            lam = int(sol[0, 0])
            logs.append(int(F.log[lam]))
        return self.char_coords[tuple(logs)]

    # ---- module evaluation ---------------------------------------------
    def omega_p(self, a: int) -> ModuleRep:
        if a not in self._omega_p:
            step = 1 if a > 0 else -1
            prev = self.omega_p(a - step)
            self._omega_p[a] = omega(prev, step).representative
        return self._omega_p[a]

    def omega_g(self, a: int) -> ModuleRep:
        if a not in self._omega_g:
            self._omega_g[a] = self.shape.inflate(self.omega_p(a))
        return self._omega_g[a]

    @staticmethod
    def _power(M, e, strip_it=True):
        X = None
        B = M if e >= 0 else dual(M)
        for _ in range(abs(e)):
            X = B if X is None else tensor(X, B)
            if strip_it:
                X = stable_class(X).representative
        return X

    def p_part(self, a, e, base=None):
        """Stripped ``base (x) Omega^a k (x) prod extras^e`` over P."""
        X = self.omega_p(a)
        if base is not None:
            X = stable_class(tensor(base, X)).representative
        for E, k in zip(self.extras_p, e):
            if k:
                X = stable_class(tensor(X, self._power(E, k))).representative
        return X

    def g_module(self, a, e, base=None):
        X = self.omega_g(a)
        if base is not None:
            X = tensor(base, X)
        for E, k in zip(self.extras, e):
            if k:
                X = tensor(X, self._power(E, k, strip_it=False))
        return X

    def box(self):
        if self.order is not None:
            arange = range(0, self.order)
        else:
            arange = range(-self.cap, self.cap + 1)
        erange = [range(-EXTRA_BOX, EXTRA_BOX + 1)] * len(self.extras)
        return arange, erange

    # ---- relations -----------------------------------------------------
    def relations(self):
        n_char = len(self.char_gens)
        nx = len(self.extras)
        rels = []
        if self.order is not None:
            rels.append([self.order] + [0] * (n_char + nx))
        for r in self.char_relations:
            rels.append([0] + list(r) + [0] * nx)
        arange, erange = self.box()
        for a in arange:
            for e in product(*erange):
                if a == 0 and not any(e):
                    continue
                if self.order is not None and not any(e):
                    continue
                X = self.p_part(a, e)
                ok = X.dim == 1
                self.evidence.append({"check": f"strip({self._word(a, e)})↓P", "dim": X.dim,
                                      "result": "Iso" if ok else "NotIso"})
                if not ok:
                    continue
                c = self.character_of(self.g_module(a, e)) if n_char else ()
                rels.append([a] + [-x for x in c] + list(e))
        return rels

    def _word(self, a, e):
        parts = [f"Ω^{a}k"]
        parts += [f"X{i}^{k}" for i, k in enumerate(e) if k]
        return " ⊗ ".join(parts)

    def express(self, M: ModuleRep):
        """Coordinates ``(a, chars, extras)`` of the class of ``M``."""
        if M.group is not self.G:
            raise ValidationError("module is over a different group")
        if self.shape.coprime:
            return []
        base_p = stable_class(self.shape.to_p(M)).representative
        arange, erange = self.box()
        for a in arange:
            for e in product(*erange):
                X = self.p_part(-a, tuple(-k for k in e), base=base_p)
                if X.dim != 1:
                    continue
                self.evidence.append({"check": f"strip(M ⊗ ({self._word(a, e)})*)↓P",
                                      "dim": 1, "result": "Iso"})
                c = self.character_of(self.g_module(-a, tuple(-k for k in e), base=M)) \
                    if self.char_gens else ()
                return [a] + list(c) + list(e)
        raise ExpressionNotFound("class not found in the search box")


# ---- pinned values ---------------------------------------------------------

def _is_cyclic(G):
    return max(G.element_orders) == len(G)


def _involutions(G):
    return sum(1 for o in G.element_orders if o == 2)


def pinned_value(G: FiniteGroup, F):
    """The tabulated T for the group shapes whose answer is known, else None."""
    F = get_field(F)
    p, n = F.p, len(G)
    if G.p_part(p) == 1:
        return FgAbGroup(0)
    if not G.is_p_group(p):
        return None
    if _is_cyclic(G):
        return FgAbGroup(0) if n == 2 else FgAbGroup(1, [[2]])
    if p == 2 and n == 8 and not G.is_abelian() and _involutions(G) == 1:
        if (F.q - 1) % 3 == 0:
            return FgAbGroup(2, [[2, 0], [0, 4]])
        return FgAbGroup(1, [[4]])
    if p == 2 and n >= 8 and not G.is_abelian() and max(G.element_orders) == n // 2 \
            and _involutions(G) == n // 2 + 1:
        return FgAbGroup(2)
    return None


def _pinned_full(ctx: _Context):
    """Pinned value of the whole group via the direct-product rule."""
    F = ctx.F
    if ctx.shape.coprime:
        return FgAbGroup(0)
    base = pinned_value(ctx.shape.p_group, F)
    if base is None:
        return None
    if ctx.shape.P is None:
        return base
    m = len(ctx.char_gens)
    chars = FgAbGroup(m, ctx.char_relations)
    from .fgab import direct_sum
    return direct_sum(base, chars)


def t_group(G: FiniteGroup, F, extra_gens=(), cap: int = OMEGA_CAP, seed: int = 0) -> TGroupReport:
    F = get_field(F)
    for i, E in enumerate(extra_gens):
        if E.group is not G or E.field != F:
            raise ValidationError(f"extra generator {i} is over a different group or field")
        if not is_endotrivial(E):
            raise NotEndotrivial(f"extra generator {i} is not endotrivial")
    ctx = _Context(G, F, extra_gens, cap, seed)
    notes = []
    if ctx.shape.coprime:
        value = FgAbGroup(0)
        gens = []
        notes.append(f"p = {F.p} does not divide |G| = {len(G)}: every module is "
                     "projective and T(G) = 0")
    else:
        gens = [("[Ωk]", None)] + list(ctx.char_gens) + \
            [(f"[X{i}]", E) for i, E in enumerate(extra_gens)]
        value = FgAbGroup(len(ctx.labels), ctx.relations(), ctx.labels)
        if ctx.order is None:
            notes.append(f"no relation Ω^n k ≃ k for n ≤ {cap}")
        # explicit non-iso checks of extras against powers of Ωk
        for i, E in enumerate(ctx.extras_p):
            rng = range(ctx.order) if ctx.order else range(-cap, cap + 1)
            for r in rng:
                res = stable_iso(E, ctx.omega_p(r), seed=seed, endotrivial=True)
                ctx.evidence.append({"check": f"X{i} vs Ω^{r}k", "result": res.status,
                                     "reason": res.reason})
    pin = _pinned_full(ctx)
    undetermined = any(e["result"] == "Undetermined" for e in ctx.evidence)
    if pin is not None and pin.canonical() == value.canonical() and not undetermined:
        completeness = "Verified"
    else:
        completeness = "ComputedSubgroup"
        if pin is not None:
            notes.append(f"tabulated value {pin.canonical_string()} differs from the "
                         "computed subgroup; supply further generators")
    return TGroupReport(G, F, gens, value, completeness, ctx.evidence, notes, ctx)


def t_restriction(source: TGroupReport, E, target: TGroupReport) -> FgAbHom:
    """``res : T(G) -> T(H)`` for ``H`` a subgroup (or embedded group) of ``G``."""
    G = source.group
    if isinstance(E, Subgroup):
        if E.parent is not G:
            raise ValidationError("subgroup of a different group")
        hom = E.embedding
    elif isinstance(E, Homomorphism):
        hom = E
    else:
        raise ValidationError("t_restriction needs a Subgroup or an Embedding")
    if hom.source is not target.group or hom.target is not G:
        raise ValidationError("embedding does not connect the two groups")
    ctx = source._ctx
    cols = []
    for lab, M in source.generators:
        if M is None:  # [Omega k]
            M = ctx.omega_g(1)
        R = restrict(M, hom)
        cols.append(target.express(R))
    nT = target.value.n_gens
    images = [[c[i] for c in cols] for i in range(nT)] if cols else [[] for _ in range(nT)]
    return FgAbHom(source.value, target.value, images)
