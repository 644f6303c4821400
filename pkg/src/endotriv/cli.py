"""``endotriv`` command line: validate inputs, run the engine, print reports.

Exit status 0 on success, 2 on invalid input or an exceeded cap, 3 when a
check came back Undetermined.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field as dc_field

from .errors import CapExceeded, EndotrivError, Undetermined
from .gf import FieldSpec
from .io import Loader, SCHEMA_VERSION, dumps, module_to_doc
from . import modules as modrep
from .stable import (complete_resolution, ext_hat, is_endotrivial, is_projective,
                     omega, stable_iso, strip)

VERBS = ("validate", "strip", "omega", "is-projective", "is-endotrivial", "stable-iso",
         "tgroup", "exthat", "amalgam", "hnn", "components", "inflate")

EXIT_OK, EXIT_INVALID, EXIT_UNDETERMINED = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    inputs: list
    field: tuple = None
    seed: int = 0
    caps: dict = dc_field(default_factory=lambda: {"omega_cap": 12, "iso_search_cap": 10000,
                                                "dim_cap": 4096})
    output_mode: str = "both"
    extras: list = dc_field(default_factory=list)
    r: int = 1
    window: tuple = (-4, 4)
    coeff: str = None

    def __post_init__(self):
        if self.command not in VERBS:
            raise EndotrivError(f"unknown command {self.command!r}")
        if any(v <= 0 for v in self.caps.values()):
            raise EndotrivError("caps must be positive")
        if self.seed < 0:
            raise EndotrivError("seed must be non-negative")


class Report:
    """Text lines plus the JSON document they summarise."""

    def __init__(self, command):
        self.lines = []
        self.doc = {"schema_version": SCHEMA_VERSION, "command": command}
        self.status = EXIT_OK

    def say(self, line):
        self.lines.append(line)

    def render(self, mode):
        out = []
        if mode in ("text", "both"):
            out.extend(self.lines)
        if mode in ("json", "both"):
            out.append(dumps(self.doc))
        return "\n".join(out) + "\n"


def _field(text):
    try:
        parts = [int(x) for x in text.split(",")]
        return FieldSpec(*parts)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"field must be 'p' or 'p,e' ({exc})")


def _range(text):
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("range must look like LO..HI")


def build_parser():
    ap = argparse.ArgumentParser(prog="endotriv",
                                 description="Endotrivial modules and the group T(G).")
    ap.add_argument("command", choices=VERBS)
    ap.add_argument("inputs", nargs="*", help="JSON input files or fixture names")
    ap.add_argument("--field", type=_field, help="field as p,e")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cap-omega", "--cap", dest="cap_omega", type=int, default=12)
    ap.add_argument("--cap-dim", type=int, default=4096)
    ap.add_argument("--cap-iso", type=int, default=10000)
    ap.add_argument("--extra", action="append", default=[], help="extra generator module")
    ap.add_argument("--r", type=int, default=1, help="syzygy degree for omega")
    ap.add_argument("--range", dest="window", type=_range, default=(-4, 4))
    ap.add_argument("--with", dest="coeff", help="coefficient module for exthat (default k)")
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--json", dest="mode", action="store_const", const="json")
    mode.add_argument("--text", dest="mode", action="store_const", const="text")
    return ap


def _need(cfg, n):
    if len(cfg.inputs) != n:
        raise EndotrivError(f"{cfg.command} expects {n} input file(s), got {len(cfg.inputs)}")


def _module_or_trivial(loader, ref):
    kind, obj = loader.load(ref)
    if kind == "module":
        return obj
    if kind == "group":
        if loader.field is None:
            raise EndotrivError("a group input needs --field to build the trivial module")
        return modrep.trivial(obj, loader.field)
    raise EndotrivError(f"{ref}: expected a module or group, got {kind}")


# ---- verbs -------------------------------------------------------------------

def _validate(cfg, loader, rep):
    _need(cfg, 1)
    kind, obj = loader.load(cfg.inputs[0])
    rep.doc.update({"input": cfg.inputs[0], "valid": True, "kind": kind})
    rep.say(f"{cfg.inputs[0]}: valid {kind}")
    if kind == "module":
        rep.doc["dim"] = obj.dim
        rep.say(f"dim = {obj.dim}")


def _strip(cfg, loader, rep):
    _need(cfg, 1)
    M = _module_or_trivial(loader, cfg.inputs[0])
    res = strip(M)
    ok = res.verify(M)
    S = res.stable.representative
    rep.doc.update({"dim": M.dim, "stable_dim": S.dim, "free_rank": res.free_rank,
                    "group_order": len(M.group), "witness_verified": ok,
                    "stable": module_to_doc(S)})
    rep.say(f"dim {M.dim} = {S.dim} + {res.free_rank}·{len(M.group)} "
            f"(free rank {res.free_rank}); witness verified: {ok}")


def _omega(cfg, loader, rep):
    _need(cfg, 1)
    M = _module_or_trivial(loader, cfg.inputs[0])
    X = omega(M, cfg.r).representative
    if X.dim > cfg.caps["dim_cap"]:
        raise CapExceeded(cfg.caps["dim_cap"], f"dim_cap exceeded by Ω^{cfg.r} (dim {X.dim})")
    rep.doc.update({"r": cfg.r, "dim": X.dim, "module": module_to_doc(X)})
    rep.say(f"Ω^{cfg.r} M has stripped dimension {X.dim}")


def _is_projective(cfg, loader, rep):
    _need(cfg, 1)
    M = _module_or_trivial(loader, cfg.inputs[0])
    v = is_projective(M)
    rep.doc.update({"projective": v, "dim": M.dim})
    rep.say(f"projective: {v}")


def _is_endotrivial(cfg, loader, rep):
    _need(cfg, 1)
    M = _module_or_trivial(loader, cfg.inputs[0])
    v = is_endotrivial(M)
    rep.doc.update({"endotrivial": v, "dim": M.dim})
    rep.say(f"endotrivial: {v}")


def _stable_iso(cfg, loader, rep):
    _need(cfg, 2)
    M = _module_or_trivial(loader, cfg.inputs[0])
    N = _module_or_trivial(loader, cfg.inputs[1])
    res = stable_iso(M, N, seed=cfg.seed, cap=cfg.caps["iso_search_cap"])
    rep.doc.update({"result": res.status, "reason": res.reason})
    if res.status == "Iso":
        F = M.field
        rep.doc["matrix"] = [[F.to_coeffs(int(a)) for a in row] for row in res.matrix.tolist()]
    rep.say(f"{res.status}: {res.reason}")
    if res.status == "Undetermined":
        rep.status = EXIT_UNDETERMINED


def _tgroup(cfg, loader, rep):
    from .tgroup import t_group
    _need(cfg, 1)
    kind, G = loader.load(cfg.inputs[0])
    if kind != "group":
        raise EndotrivError("tgroup expects a group document")
    if loader.field is None:
        raise EndotrivError("tgroup needs --field p,e")
    extras = [loader.module_for(x, G) for x in cfg.extras]
    r = t_group(G, loader.field, extras, cap=cfg.caps["omega_cap"], seed=cfg.seed)
    rep.doc.update(r.to_json())
    rep.say(f"T = {r.value.canonical_string()}")
    rep.say(f"generators: {', '.join(lab for lab, _ in r.generators) or 'none'}")
    rep.say(f"completeness: {r.completeness}")
    for e in r.evidence:
        rep.say(f"  {e['check']}: {e['result']}" + (f" (dim {e['dim']})" if "dim" in e else ""))
    for n in r.notes:
        rep.say(f"note: {n}")
    if any(e["result"] == "Undetermined" for e in r.evidence):
        rep.status = EXIT_UNDETERMINED


def _exthat(cfg, loader, rep):
    _need(cfg, 1)
    M = _module_or_trivial(loader, cfg.inputs[0])
    N = _module_or_trivial(loader, cfg.coeff) if cfg.coeff else modrep.trivial(M.group, M.field)
    lo, hi = cfg.window
    C = complete_resolution(M, lo - 1, hi + 1)
    dims = {i: ext_hat(M, N, i, C).dim for i in range(lo, hi + 1)}
    rep.doc.update({"range": [lo, hi], "dims": {str(i): d for i, d in dims.items()},
                    "ranks": {str(i): C.ranks[i] for i in sorted(C.ranks)},
                    "exact": C.check()})
    rep.say("Ext-hat dimensions: " + ", ".join(f"{i}:{d}" for i, d in dims.items()))
    rep.say(f"complete resolution ranks: {[C.ranks[i] for i in sorted(C.ranks)]}; "
            f"exact: {C.check()}")


def _amalgam(cfg, loader, rep):
    from .gog import components, t_amalgam
    _need(cfg, 1)
    kind, spec = loader.load(cfg.inputs[0])
    if kind != "amalgam":
        raise EndotrivError("amalgam expects an amalgam spec")
    res = t_amalgam(spec, getattr(spec, "oracles", None), seed=cfg.seed,
                    cap=cfg.caps["omega_cap"])
    res.components = components(spec).count
    rep.doc.update(res.to_json())
    rep.doc.update({"name": spec.name, "field": {"p": spec.field.p, "e": spec.field.e},
                    "q": spec.field.q})
    rep.say(f"{spec.name} over {spec.field!r}")
    for line in res.derivation:
        rep.say(f"  {line}")
    rep.say(f"components = {res.components}")
    rep.say(f"T = {res.T}")


def _hnn(cfg, loader, rep):
    from .gog import t_hnn
    _need(cfg, 1)
    kind, spec = loader.load(cfg.inputs[0])
    if kind != "hnn":
        raise EndotrivError("hnn expects an HNN spec")
    res = t_hnn(spec, getattr(spec, "oracles", None), seed=cfg.seed, cap=cfg.caps["omega_cap"])
    rep.doc.update(res.to_json())
    rep.doc.update({"name": spec.name, "field": {"p": spec.field.p, "e": spec.field.e},
                    "q": spec.field.q})
    rep.say(f"{spec.name} over {spec.field!r}")
    for line in res.derivation:
        rep.say(f"  {line}")
    rep.say(f"T = {res.T}")


def _components(cfg, loader, rep):
    from .gog import components
    _need(cfg, 1)
    kind, spec = loader.load(cfg.inputs[0])
    if kind not in ("amalgam", "hnn"):
        raise EndotrivError("components expects an amalgam or HNN spec")
    c = components(spec)
    rep.doc.update(c.to_json())
    rep.say(f"components = {c.count}")


def _inflate(cfg, loader, rep):
    from .gog import inflate, inflation_map, is_endotrivial_gog
    from .tgroup import t_group
    _need(cfg, 1)
    kind, data = loader.load(cfg.inputs[0])
    if kind != "inflate":
        raise EndotrivError("inflate expects an inflation spec")
    spec, Q, maps = data["spec"], data["Q"], data["maps"]
    F = spec.field
    TQ = t_group(Q, F, cap=cfg.caps["omega_cap"], seed=cfg.seed)
    Om = omega(modrep.trivial(Q, F), 1).representative
    X = inflate(spec, maps, Om)
    im = inflation_map(spec, maps, TQ, seed=cfg.seed, cap=cfg.caps["omega_cap"])
    gens = [[row[j] for row in im.to_vertices.images] for j in range(TQ.value.n_gens)]
    rep.doc.update({"T_Q": TQ.value.canonical_string(), "images": gens,
                    "kernel": im.kernel.canonical_string(),
                    "kernel_generators": im.kernel_inclusion.images,
                    "inflated_omega_endotrivial": is_endotrivial_gog(X),
                    "derivation": im.derivation})
    for line in im.derivation:
        rep.say(f"  {line}")
    rep.say(f"inflated Ωk endotrivial: {is_endotrivial_gog(X)}")
    rep.say(f"T(Q) → T(A) × T(B): generators ↦ {gens}; kernel = {im.kernel.canonical_string()}")


DISPATCH = {"validate": _validate, "strip": _strip, "omega": _omega,
            "is-projective": _is_projective, "is-endotrivial": _is_endotrivial,
            "stable-iso": _stable_iso, "tgroup": _tgroup, "exthat": _exthat,
            "amalgam": _amalgam, "hnn": _hnn, "components": _components,
            "inflate": _inflate}


def run(cfg: RunConfig):
    """Execute a command; returns ``(exit status, output text)``."""
    rep = Report(cfg.command)
    loader = Loader(cfg.field)
    prev_cap = modrep.DIM_CAP
    try:
        modrep.DIM_CAP = cfg.caps["dim_cap"]
        DISPATCH[cfg.command](cfg, loader, rep)
    except Undetermined as exc:
        rep = Report(cfg.command)
        rep.status = EXIT_UNDETERMINED
        rep.doc.update({"undetermined": str(exc)})
        rep.say(f"undetermined: {exc}")
    except CapExceeded as exc:
        rep = Report(cfg.command)
        rep.status = EXIT_INVALID
        rep.doc.update({"error": str(exc), "cap": exc.cap})
        rep.say(f"error: {exc}")
    except (EndotrivError, ValueError) as exc:
        rep = Report(cfg.command)
        rep.status = EXIT_INVALID
        rep.doc.update({"error": str(exc), "inputs": list(cfg.inputs)})
        rep.say(f"error: {exc}")
    finally:
        modrep.DIM_CAP = prev_cap
    return rep.status, rep.render(cfg.output_mode)


def _join_range(argv):
    # argparse reads "--range -4..7" as two flags; glue the value on
    out, it = [], iter(argv)
    for a in it:
        if a == "--range":
            out.append("--range=" + next(it, ""))
        else:
            out.append(a)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_range(argv))
    try:
        cfg = RunConfig(args.command, args.inputs, args.field, args.seed,
                        {"omega_cap": args.cap_omega, "iso_search_cap": args.cap_iso,
                         "dim_cap": args.cap_dim},
                        args.mode or "both", args.extra, args.r, args.window, args.coeff)
    except EndotrivError as exc:
        sys.stdout.write(dumps({"schema_version": SCHEMA_VERSION, "error": str(exc)}) + "\n")
        return EXIT_INVALID
    status, text = run(cfg)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
