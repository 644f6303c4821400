"""JSON documents for groups, modules and graph-of-groups specs.

Every document carries ``"schema_version": 1`` and a ``"kind"``.  Groups
may be given inline or by the name of a shipped fixture; field elements
are coefficient vectors (low degree first) or plain integers for the
prime subfield.
"""

from __future__ import annotations

import json
import os
from importlib import resources

import numpy as np

from .errors import FieldMismatch, ValidationError
from .gf import FieldSpec, get_field
from .groups import Embedding, FiniteGroup, Homomorphism
from .modules import ModuleRep

SCHEMA_VERSION = 1
KINDS = ("group", "module", "amalgam", "hnn", "inflate")


def fixtures_dir() -> str:
    return str(resources.files("endotriv") / "fixtures")


def _fixture_path(name: str):
    base = fixtures_dir()
    for sub in ("", "groups", "modules", "specs"):
        path = os.path.join(base, sub, name if name.endswith(".json") else name + ".json")
        if os.path.exists(path):
            return path
    return None


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


class Loader:
    """Reads documents, sharing group objects between references to the same file."""

    def __init__(self, field=None):
        self.groups = {}
        self.field = get_field(field) if field is not None else None

    # ---- files ---------------------------------------------------------
    def resolve(self, ref: str, base_dir: str = None) -> str:
        cands = [ref]
        if base_dir:
            cands.insert(0, os.path.join(base_dir, ref))
        for c in cands:
            if os.path.exists(c):
                return os.path.abspath(c)
        path = _fixture_path(os.path.basename(ref))
        if path:
            return path
        raise ValidationError(f"{ref}: file or fixture not found")

    def read(self, ref: str, base_dir: str = None):
        path = self.resolve(ref, base_dir)
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{ref}: invalid JSON ({exc.msg} at line {exc.lineno})")
        if not isinstance(doc, dict):
            raise ValidationError(f"{ref}: top level must be an object")
        v = doc.get("schema_version", SCHEMA_VERSION)
        if v != SCHEMA_VERSION:
            raise ValidationError(f"{ref}: unsupported schema_version {v}")
        return doc, path

    def load(self, ref: str):
        doc, path = self.read(ref)
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ValidationError(f"{ref}: unknown kind {kind!r}")
        return kind, getattr(self, f"_{kind}")(doc, os.path.dirname(path), path)

    # ---- groups --------------------------------------------------------
    def group(self, spec, base_dir=None) -> FiniteGroup:
        if isinstance(spec, str):
            path = self.resolve(spec, base_dir)
            if path not in self.groups:
                doc, _ = self.read(path)
                self.groups[path] = self._group(doc, os.path.dirname(path), path)
            return self.groups[path]
        return self._group(spec, base_dir, None)

    def _group(self, doc, base_dir=None, path=None) -> FiniteGroup:
        if path and path in self.groups:
            return self.groups[path]
        try:
            gens = doc["generators"]
            labels = doc.get("labels")
            degree = doc.get("degree")
        except (KeyError, TypeError):
            raise ValidationError("group: needs 'generators'")
        if not isinstance(gens, list) or any(not isinstance(g, list) for g in gens):
            raise ValidationError("group.generators: must be a list of permutations")
        # identical generator data means the same group, wherever it was written
        key = json.dumps([gens, labels, degree])
        G = self.groups.get(key)
        if G is None:
            G = FiniteGroup(gens, labels, degree=degree, name=doc.get("name"))
            self.groups[key] = G
        if path:
            self.groups[path] = G
        return G

    # ---- fields and modules ----------------------------------------------
    def field_of(self, doc, where, override=True):
        """The field of a document; ``--field`` wins for specs, must agree for modules."""
        f = doc.get("field")
        if f is None:
            if self.field is None:
                raise ValidationError(f"{where}: no field given (use --field p,e)")
            return self.field
        try:
            F = get_field(FieldSpec(int(f["p"]), int(f.get("e", 1))))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{where}.field: malformed ({exc})")
        if self.field is not None and self.field != F:
            if override:
                return self.field
            raise FieldMismatch(f"{where}: module is over {F!r} but --field gives {self.field!r}")
        return F

    @staticmethod
    def element(F, x, where):
        if isinstance(x, int):
            if not 0 <= x < F.p:
                raise ValidationError(f"{where}: integer entries must lie in 0..{F.p - 1}")
            return x
        if isinstance(x, list) and all(isinstance(c, int) for c in x) and len(x) <= F.e:
            if any(not 0 <= c < F.p for c in x):
                raise ValidationError(f"{where}: coefficient outside 0..{F.p - 1}")
            return F.from_coeffs(list(x) + [0] * (F.e - len(x)))
        raise ValidationError(f"{where}: not a field element")

    def matrix(self, F, rows, where):
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ValidationError(f"{where}: matrix must be a list of rows")
        return np.array([[self.element(F, x, f"{where}[{i}][{j}]")
                          for j, x in enumerate(r)] for i, r in enumerate(rows)],
                        dtype=np.int64).reshape(len(rows), -1)

    def _module(self, doc, base_dir=None, path=None) -> ModuleRep:
        G = self.group(doc.get("group"), base_dir) if doc.get("group") is not None else None
        if G is None:
            raise ValidationError("module: needs 'group'")
        F = self.field_of(doc, "module", override=False)
        mats = doc.get("matrices")
        if not isinstance(mats, dict):
            raise ValidationError("module.matrices: must map generator labels to matrices")
        unknown = set(mats) - set(G.labels)
        if unknown:
            raise ValidationError(f"module.matrices: unknown generator(s) {sorted(unknown)}")
        M = {lab: self.matrix(F, mats[lab], f"module.matrices.{lab}")
             for lab in G.labels if lab in mats}
        dim = doc.get("dim")
        for lab, m in M.items():
            if dim is not None and m.shape != (dim, dim):
                raise ValidationError(f"module.matrices.{lab}: expected {dim}x{dim}")
        return ModuleRep(G, F, M, name=doc.get("name"))

    def module_for(self, ref: str, group: FiniteGroup = None) -> ModuleRep:
        kind, obj = self.load(ref)
        if kind != "module":
            raise ValidationError(f"{ref}: expected a module document, got {kind}")
        if group is not None and obj.group is not group:
            raise ValidationError(f"{ref}: module is over a different group")
        return obj

    # ---- graph-of-groups specs -------------------------------------------
    def _hom(self, src, tgt, images, where, cls=Embedding):
        if not isinstance(images, dict):
            raise ValidationError(f"{where}: must map source generator labels to words")
        missing = set(src.labels) - set(images)
        if missing:
            raise ValidationError(f"{where}: no image for {sorted(missing)}")
        return cls(src, tgt, [str(images[l]) for l in src.labels])

    def _amalgam(self, doc, base_dir=None, path=None):
        from .gog import AmalgamSpec
        F = self.field_of(doc, "amalgam")
        A = self.group(doc["A"], base_dir)
        B = self.group(doc["B"], base_dir)
        C = self.group(doc["C"], base_dir)
        eA = self._hom(C, A, doc.get("embed_A"), "amalgam.embed_A")
        eB = self._hom(C, B, doc.get("embed_B"), "amalgam.embed_B")
        spec = AmalgamSpec(A, B, C, eA, eB, F, name=doc.get("name", "A *_C B"))
        spec.oracles = doc.get("oracles")
        return spec

    def _hnn(self, doc, base_dir=None, path=None):
        from .gog import HnnSpec
        F = self.field_of(doc, "hnn")
        H = self.group(doc["H"], base_dir)
        A = self.group(doc["A"], base_dir)
        incl = self._hom(A, H, doc.get("incl"), "hnn.incl")
        f = self._hom(A, H, doc.get("f"), "hnn.f")
        spec = HnnSpec(H, A, incl, f, F, name=doc.get("name", "HNN"))
        spec.oracles = doc.get("oracles")
        return spec

    def _inflate(self, doc, base_dir=None, path=None):
        ref = doc.get("amalgam")
        if isinstance(ref, str):
            kind, spec = self.load(self.resolve(ref, base_dir))
        else:
            spec = self._amalgam(ref, base_dir)
        Q = self.group(doc["Q"], base_dir)
        maps = doc.get("maps", {})
        fA = self._hom(spec.A, Q, maps.get("A"), "inflate.maps.A", cls=Homomorphism)
        fB = self._hom(spec.B, Q, maps.get("B"), "inflate.maps.B", cls=Homomorphism)
        return {"spec": spec, "Q": Q, "maps": (fA, fB), "name": doc.get("name")}


# ---- serialisation -----------------------------------------------------------

def group_to_doc(G: FiniteGroup) -> dict:
    d = {"schema_version": SCHEMA_VERSION, "kind": "group"}
    d.update(G.to_json())
    return d


def module_to_doc(M: ModuleRep, group_ref=None) -> dict:
    d = {"schema_version": SCHEMA_VERSION, "kind": "module",
         "group": group_ref if group_ref is not None else group_to_doc(M.group)}
    d.update(M.to_json())
    if group_ref is None:
        d["group"].pop("schema_version")
        d["group"].pop("kind")
    return d


def _inline(G):
    return G.to_json()


def spec_to_doc(spec) -> dict:
    """Amalgam, HNN or inflation spec with every group written inline."""
    from .gog import AmalgamSpec
    if isinstance(spec, dict):
        d = {"schema_version": SCHEMA_VERSION, "kind": "inflate",
             "amalgam": spec_to_doc(spec["spec"]), "Q": _inline(spec["Q"]),
             "maps": {"A": spec["maps"][0].to_json(), "B": spec["maps"][1].to_json()}}
        d["amalgam"].pop("schema_version")
        if spec.get("name"):
            d["name"] = spec["name"]
        return d
    F = spec.field
    d = {"schema_version": SCHEMA_VERSION, "field": {"p": F.p, "e": F.e}, "name": spec.name}
    if isinstance(spec, AmalgamSpec):
        d.update(kind="amalgam", A=_inline(spec.A), B=_inline(spec.B), C=_inline(spec.C),
                 embed_A=spec.embed_A.to_json(), embed_B=spec.embed_B.to_json())
    else:
        d.update(kind="hnn", H=_inline(spec.H), A=_inline(spec.A),
                 incl=spec.incl.to_json(), f=spec.f.to_json())
    if getattr(spec, "oracles", None):
        d["oracles"] = spec.oracles
    return d
