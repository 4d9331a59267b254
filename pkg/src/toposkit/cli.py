"""Command line front end for site documents.

Subcommands: ``validate`` (document well-formedness and functor laws),
``sheaf-check`` / ``sheafify`` (against the document's topology),
``yoneda-check`` (representable hom counts), ``adjunction-check`` and
``reconstruct`` (the tensor adjunction machinery over the document's
category), and ``giraud-audit`` (exactness preconditions, also usable
without a document for the module scope).

Reports are deterministic: the same inputs produce byte-identical text
and JSON output.  Exit codes: 0 when every check passes, 1 when a
checked property fails, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Mapping, Optional, Sequence

from .category import FinCategory
from .diagnostics import BoundExceeded, StructureError
from .dsl import (CategoryDecl, Decl, DslError, Elaborated, RingDecl,
                  SiteDocument, TopologyDecl, elaborate, parse,
                  presheaf_decl_from, print_document, ring_from_text)
from .giraud import (audit_coproducts, audit_epi_coequalizer,
                     audit_equivalence_relations, audit_exact_forks,
                     audit_generators, abstract_scope, presheaf_scope,
                     rmod_scope)
from .modules import FinRing
from .materialize import nat_module
from .presheaf import (Presheaf, mod_presheaf, nat_transformations,
                       set_presheaf, validate_presheaf, yoneda_mod,
                       yoneda_set)
from .reconstruction import (adjunction_check, build_site, embedding_tally,
                             objects_are_sheaves, tensor_with_A)
from .sheaf import is_sheaf, sheafify
from .topology import GrothendieckTopology, Sieve, validate_topology

__all__ = ["main", "run_command", "render_report"]

SCHEMA = "toposkit-report/1"

COMMANDS = ("validate", "sheaf-check", "sheafify", "yoneda-check",
            "adjunction-check", "reconstruct", "giraud-audit")


class UsageError(Exception):
    pass


# -- report plumbing ----------------------------------------------------------


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, Sieve):
        return {"object": x.codomain, "arrows": sorted(x.arrows)}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=str)
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if hasattr(x, "assignment") and hasattr(x, "sieve"):
        return {"sieve": _jsonable(x.sieve),
                "assignment": _jsonable(dict(x.assignment))}
    return str(x)


def _check(name: str, ok: bool, detail: str, witness=None) -> dict:
    return {"name": name, "ok": bool(ok), "detail": detail,
            "witness": _jsonable(witness)}


def _report(command: str, checks: list[dict]) -> tuple[int, dict]:
    ok = all(c["ok"] for c in checks)
    report = {"schema": SCHEMA, "command": command,
              "status": "pass" if ok else "fail", "checks": checks}
    return (0 if ok else 1), report


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines = [f"toposkit {report['command']}: {report['status']}"]
    for c in report["checks"]:
        mark = "pass" if c["ok"] else "FAIL"
        lines.append(f"{mark} {c['name']}: {c['detail']}")
        if c["witness"] is not None and not c["ok"]:
            lines.append(f"  witness: {_witness_text(c['witness'])}")
    return "\n".join(lines) + "\n"


def _witness_text(w) -> str:
    if isinstance(w, dict):
        return "; ".join(f"{k} {_witness_text(v)}" for k, v in w.items())
    if isinstance(w, list):
        return "[" + ", ".join(_witness_text(v) for v in w) + "]"
    return str(w)


# -- shared lookups -----------------------------------------------------------


def _the_presheaf(el: Elaborated, flags) -> tuple[str, Presheaf]:
    name = flags.presheaf
    if not name:
        raise UsageError("--presheaf NAME is required for this command")
    if name not in el.presheaves:
        have = ", ".join(sorted(el.presheaves)) or "none"
        raise UsageError(f"unknown presheaf {name}; declared: {have}")
    return name, el.presheaves[name]


def _the_topology(el: Elaborated, base: str) -> tuple[str, GrothendieckTopology]:
    names = [n for n, b in el.topology_base.items() if b == base]
    if not names:
        raise UsageError(f"no topology declared on category {base}")
    if len(names) > 1:
        raise UsageError(f"several topologies on {base}: {', '.join(sorted(names))}")
    return names[0], el.topologies[names[0]]


def _the_category(el: Elaborated) -> tuple[str, FinCategory]:
    if len(el.categories) != 1:
        raise UsageError("this command needs exactly one category declaration")
    return next(iter(el.categories.items()))


def _flag_ring(el: Elaborated, flags) -> Optional[FinRing]:
    if getattr(flags, "ring", None):
        return ring_from_text(flags.ring)
    return el.ring


def _onto_site(site: FinCategory, p: Presheaf) -> Presheaf:
    """Rebuild a presheaf on the site copy of its own base category."""
    rests = {a.name: None for a in site.arrows if not site.is_identity(a.name)}
    if p.flavor == "set":
        return set_presheaf(
            site, {c: p.value(c) for c in site.objects},
            {a: {x: p.restrict(a, x)
                 for x in p.value(site.target(a))} for a in rests})
    return mod_presheaf(
        site, p.ring, {c: p.value(c) for c in site.objects},
        {a: p.restriction(a) for a in rests})


def _object_list(flags, objects: Sequence[str]) -> list[str]:
    if getattr(flags, "object", None):
        if flags.object not in objects:
            raise UsageError(f"unknown object {flags.object}; "
                             f"declared: {', '.join(objects)}")
        return [flags.object]
    return list(objects)


# -- subcommands --------------------------------------------------------------


def _cmd_validate(el: Elaborated, flags) -> tuple[int, dict]:
    checks = []
    for name, cat in sorted(el.categories.items()):
        checks.append(_check(
            f"category {name}", True,
            f"{len(cat.objects)} objects, {len(cat.arrows)} arrows"))
    for name in sorted(el.topologies):
        rep = validate_topology(el.topologies[name])
        detail = ("all three axioms hold" if rep.ok
                  else f"{len(rep.violations)} axiom violations")
        checks.append(_check(f"topology {name}", rep.ok, detail,
                             [str(v) for v in rep.violations] or None))
    for name in sorted(el.presheaves):
        rep = validate_presheaf(el.presheaves[name])
        detail = ("functor laws hold" if rep.ok
                  else f"{len(rep.violations)} functor law violations")
        checks.append(_check(f"presheaf {name}", rep.ok, detail,
                             [str(v) for v in rep.violations] or None))
    for name in sorted(el.morphisms):
        checks.append(_check(f"morphism {name}", True,
                             "components are natural"))
    return _report("validate", checks)


def _cmd_sheaf_check(el: Elaborated, flags) -> tuple[int, dict]:
    name, p = _the_presheaf(el, flags)
    jname, j = _the_topology(el, el.presheaf_base[name])
    chk = is_sheaf(p, j)
    witness = None
    if chk.witness is not None:
        obj, sieve, fam = chk.witness
        witness = {"object": obj, "sieve": sorted(sieve.arrows),
                   "family": {f: str(x) for f, x in sorted(fam.assignment.items())}}
    detail = (f"sheaf for {jname}" if chk.ok
              else f"not a sheaf for {jname}: {chk.detail}")
    return _report("sheaf-check", [_check(f"sheaf {name}", chk.ok, detail,
                                          witness)])


def _cmd_sheafify(el: Elaborated, flags) -> tuple[int, dict, Optional[str]]:
    name, p = _the_presheaf(el, flags)
    base = el.presheaf_base[name]
    jname, j = _the_topology(el, base)
    res = sheafify(p, j)
    decls: list[Decl] = []
    for d in el.document.decls:
        keep = ((isinstance(d, CategoryDecl) and d.name == base)
                or (isinstance(d, RingDecl) and p.flavor == "mod")
                or (isinstance(d, TopologyDecl) and d.name == jname))
        if keep:
            decls.append(d)
    decls.append(presheaf_decl_from(name, res.sheaf, base))
    text = print_document(SiteDocument(tuple(decls)))
    sizes = ", ".join(
        f"{c}:{len(res.sheaf.value(c)) if p.flavor == 'set' else res.sheaf.value(c).size}"
        for c in res.sheaf.base.objects)
    code, report = _report("sheafify", [
        _check(f"sheafify {name}", True,
               f"associated sheaf for {jname}; value sizes {sizes}")])
    return code, report, text


def _cmd_yoneda_check(el: Elaborated, flags) -> tuple[int, dict]:
    name, p = _the_presheaf(el, flags)
    cat = el.categories[el.presheaf_base[name]]
    checks = []
    for c in _object_list(flags, cat.objects):
        if p.flavor == "set":
            nats = len(nat_transformations(yoneda_set(cat, c), p))
            size = len(p.value(c))
        else:
            nats = nat_module(yoneda_mod(cat, p.ring, c), p).module.size
            size = p.value(c).size
        checks.append(_check(
            f"yoneda at {c}", nats == size,
            f"|Nat(y({c}), {name})| = {nats}, |{name}({c})| = {size}"))
    return _report("yoneda-check", checks)


def _cmd_adjunction_check(el: Elaborated, flags) -> tuple[int, dict]:
    name, p = _the_presheaf(el, flags)
    cat = el.categories[el.presheaf_base[name]]
    ring = p.ring if p.flavor == "mod" else None
    ctx = build_site(cat, list(cat.objects), audit=False)
    f = _onto_site(ctx.site, p)
    tensor = tensor_with_A(ctx, f)
    if tensor is None:
        return _report("adjunction-check", [_check(
            f"tensor {name}", False,
            "the tensor with the inclusion has no value in this category")])
    checks = [_check(f"tensor {name}", True,
                     f"value {tensor.obj} via {tensor.route}")]
    for e in _object_list(flags, cat.objects):
        rep = adjunction_check(ctx, ring, f, e, tensor=tensor)
        parts = [f"transpose bijective: {rep.bijective}",
                 f"natural in the object: {rep.natural_in_target}",
                 f"triangles: {rep.triangle_unit}, {rep.triangle_counit}"]
        checks.append(_check(f"adjunction at {e}", rep.ok, "; ".join(parts),
                             list(rep.notes) or None))
    return _report("adjunction-check", checks)


def _cmd_reconstruct(el: Elaborated, flags) -> tuple[int, dict]:
    cname, cat = _the_category(el)
    ring = _flag_ring(el, flags)
    gens = _object_list(flags, cat.objects)
    try:
        ctx = build_site(cat, gens)
    except StructureError as e:
        return _report("reconstruct", [
            _check("generating family", False, str(e))])
    checks = [_check("generating family", True,
                     f"site on {', '.join(ctx.gens)} with "
                     f"{len(ctx.site.arrows)} arrows")]
    basis = ctx.reports["basis"]
    checks.append(_check("covering basis", basis.ok,
                         "epimorphic families satisfy the basis axioms"
                         if basis.ok else f"{len(basis.violations)} violations",
                         [str(v) for v in basis.violations] or None))
    topo = ctx.reports["topology"]
    checks.append(_check("topology axioms", topo.ok,
                         "saturation satisfies the topology axioms"
                         if topo.ok else f"{len(topo.violations)} violations",
                         [str(v) for v in topo.violations] or None))
    sheaves = objects_are_sheaves(ctx, ring=ring)
    bad = sorted(e for e, chk in sheaves.items() if not chk.ok)
    checks.append(_check(
        "restricted objects are sheaves", not bad,
        f"{len(sheaves) - len(bad)} of {len(sheaves)} restricted objects "
        "satisfy the sheaf condition",
        {e: sheaves[e].detail for e in bad} or None))
    tally = embedding_tally(ctx, ring=ring)
    checks.append(_check(
        "restriction is full and faithful", tally.ok,
        f"full: {tally.full}, faithful: {tally.faithful}",
        None if tally.ok else [list(row) for row in tally.pairs]))
    if ctx.reports.get("giraud") is not None:
        for rep in ctx.reports["giraud"]:
            viol = [i for i in rep.items if i.status == "violation"]
            counts: dict[str, int] = {}
            for item in rep.items:
                counts[item.status] = counts.get(item.status, 0) + 1
            detail = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
            checks.append(_check(
                f"precondition {rep.axiom}", not viol, detail,
                [{"subject": _jsonable(i.subject), "detail": i.detail}
                 for i in viol] or None))
    elif "giraud_note" in ctx.reports:
        checks.append(_check("preconditions", True,
                             str(ctx.reports["giraud_note"])))
    return _report("reconstruct", checks)


def _cmd_giraud_audit(el: Optional[Elaborated], flags) -> tuple[int, dict]:
    scope_kind = getattr(flags, "scope", None) or "abstract"
    if scope_kind == "rmod":
        if not getattr(flags, "ring", None):
            raise UsageError("--ring is required for --scope rmod")
        ring = ring_from_text(flags.ring)
        scope = rmod_scope(ring, flags.bound or 16)
        label = f"modules over {flags.ring} with at most {flags.bound or 16} elements"
    elif scope_kind == "presheaf":
        if el is None:
            raise UsageError("a document is required for --scope presheaf")
        _, cat = _the_category(el)
        scope = presheaf_scope(cat, flags.bound or 2)
        label = f"presheaves with values of size at most {flags.bound or 2}"
    else:
        if el is None:
            raise UsageError("a document is required for --scope abstract")
        _, cat = _the_category(el)
        scope = abstract_scope(cat)
        label = "the declared category"
    audits = (("coproducts", audit_coproducts),
              ("epi-coequalizer", audit_epi_coequalizer),
              ("equivalence-relations", audit_equivalence_relations),
              ("exact-forks", audit_exact_forks),
              ("generators", audit_generators))
    checks = []
    for audit_name, fn in audits:
        rep = fn(scope)
        viol = [i for i in rep.items if i.status == "violation"]
        counts: dict[str, int] = {}
        for item in rep.items:
            counts[item.status] = counts.get(item.status, 0) + 1
        detail = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items())) or "no items"
        checks.append(_check(
            audit_name, not viol, detail,
            [{"subject": _jsonable(i.subject), "detail": i.detail}
             for i in viol] or None))
    code, report = _report("giraud-audit", checks)
    report["scope"] = label
    return code, report


# -- dispatch -----------------------------------------------------------------


def run_command(command: str, el: Optional[Elaborated],
                flags) -> tuple[int, dict, Optional[str]]:
    """Dispatch a subcommand; returns (exit code, report, optional artifact)."""
    if command == "validate":
        code, rep = _cmd_validate(el, flags)
    elif command == "sheaf-check":
        code, rep = _cmd_sheaf_check(el, flags)
    elif command == "sheafify":
        return _cmd_sheafify(el, flags)
    elif command == "yoneda-check":
        code, rep = _cmd_yoneda_check(el, flags)
    elif command == "adjunction-check":
        code, rep = _cmd_adjunction_check(el, flags)
    elif command == "reconstruct":
        code, rep = _cmd_reconstruct(el, flags)
    elif command == "giraud-audit":
        code, rep = _cmd_giraud_audit(el, flags)
    else:
        raise UsageError(f"unknown command {command}")
    return code, rep, None


def _arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="toposkit",
        description="Validate and analyze finite site documents.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file", nargs="?",
                    help="site document (optional only for giraud-audit "
                         "with --scope rmod)")
    ap.add_argument("--presheaf", metavar="NAME")
    ap.add_argument("--object", metavar="NAME")
    ap.add_argument("--ring", metavar="R", help="ring such as Z/2 or Z/2 x Z/4")
    ap.add_argument("--bound", type=int, metavar="N")
    ap.add_argument("--scope", choices=("abstract", "rmod", "presheaf"),
                    help="giraud-audit scope (default abstract)")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--out", metavar="FILE")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _arg_parser().parse_intermixed_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    el: Optional[Elaborated] = None
    try:
        if args.file is not None:
            try:
                with open(args.file, "r", encoding="utf-8") as fh:
                    source = fh.read()
            except OSError as e:
                print(f"toposkit: cannot read {args.file}: {e.strerror}",
                      file=sys.stderr)
                return 2
            try:
                doc = parse(source)
            except DslError as e:
                for d in e.diagnostics:
                    print(f"{args.file}: {d}", file=sys.stderr)
                return 2
            try:
                el = elaborate(doc)
            except DslError as e:
                if args.command == "validate":
                    checks = [_check("document", False, str(d))
                              for d in e.diagnostics]
                    _, report = _report("validate", checks)
                    sys.stdout.write(render_report(report, args.format))
                    return 1
                for d in e.diagnostics:
                    print(f"{args.file}: {d}", file=sys.stderr)
                return 2
        elif not (args.command == "giraud-audit" and args.scope == "rmod"):
            print("toposkit: a document file is required", file=sys.stderr)
            return 2
        code, report, artifact = run_command(args.command, el, args)
    except UsageError as e:
        print(f"toposkit: {e}", file=sys.stderr)
        return 2
    except BoundExceeded as e:
        print(f"toposkit: bound exceeded: {e}", file=sys.stderr)
        return 2
    except StructureError as e:
        print(f"toposkit: {e}", file=sys.stderr)
        return 2
    if artifact is not None:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(artifact)
            sys.stdout.write(render_report(report, args.format))
        else:
            sys.stdout.write(artifact)
    else:
        sys.stdout.write(render_report(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
