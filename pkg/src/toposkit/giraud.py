"""Executable checks for the five exactness axioms of topos theory.

Each audit runs one axiom over a scope: an abstract finite category taken
as-is, the modules over a ring up to an element bound, or the set-valued
presheaves on a base up to a value-size bound.  The infinite scopes are
checked on finite slices and every report says which slice.

Outcomes are graded.  A "violation" is a counterexample to the axiom's
conclusion with all hypotheses present; "hypothesis-missing" records that
a required construction (a coproduct, a kernel pair) does not exist in
the scope, which for a finite slice of an infinite category is normal; a
"note" carries information that does not affect the verdict, such as the
strictness caveat on zero objects in module categories.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .category import (FinCategory, coequalizer, coproduct, generates,
                       initial_object, is_epi, is_iso, kernel_pair, pullback)
from .diagnostics import BoundExceeded, StructureError
from .modules import (Element, FinModule, FinRing, ModuleHom, cokernel,
                      direct_sum, hom_make, hom_module, image, is_isomorphism,
                      is_surjective, mod_coequalizer, mod_pullback,
                      module_make, ring_make, solve_hom)
from .presheaf import (PresheafMorphism, SetPresheaf,
                       colimit_of_representables, compose_morphisms,
                       is_natural_iso, nat_transformations, presheaf_morphism,
                       set_presheaf, yoneda_classify)
from .materialize import all_set_presheaves, small_modules

SUBMODULE_EXHAUSTIVE_LIMIT = 64     # ambient sizes up to this get every subobject
RELATION_EXHAUSTIVE_LIMIT = 16      # squares up to this get every relation subobject
RELATION_PAIR_CAP = 2 ** 12         # hard cap on candidate element pairs


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class AuditItem:
    status: str                     # pass | violation | hypothesis-missing | note
    subject: tuple
    detail: str


@dataclass(frozen=True)
class AuditReport:
    axiom: str
    scope: str
    items: tuple[AuditItem, ...]

    @property
    def ok(self) -> bool:
        return all(i.status != "violation" for i in self.items)

    def with_status(self, status: str) -> list[AuditItem]:
        return [i for i in self.items if i.status == status]

    def summary(self) -> str:
        counts: dict[str, int] = {}
        for i in self.items:
            counts[i.status] = counts.get(i.status, 0) + 1
        body = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
        return f"{self.axiom} on {self.scope}: {body or 'nothing checked'}"


class _Audit:
    def __init__(self, axiom: str, scope: str) -> None:
        self.axiom = axiom
        self.scope = scope
        self.items: list[AuditItem] = []

    def add(self, status: str, subject: tuple, detail: str) -> None:
        self.items.append(AuditItem(status, subject, detail))

    def done(self) -> AuditReport:
        return AuditReport(self.axiom, self.scope, tuple(self.items))


# -- scopes --------------------------------------------------------------------


@dataclass(frozen=True)
class AuditScope:
    """What to audit and how far to look.

    ``kind`` selects the target: "abstract" takes ``category`` literally;
    "rmod" ranges over modules over ``ring`` with at most ``bound``
    elements; "presheaf" ranges over set-valued presheaves on ``base``
    with value sets of at most ``bound`` elements.  ``hom_sample`` caps
    per-pair arrow enumeration in the infinite scopes.
    """

    kind: str
    category: Optional[FinCategory] = None
    ring: Optional[FinRing] = None
    base: Optional[FinCategory] = None
    bound: int = 16
    hom_sample: int = 32

    def __post_init__(self) -> None:
        if self.kind not in ("abstract", "rmod", "presheaf"):
            raise StructureError(f"unknown audit scope kind {self.kind!r}")
        if self.kind == "abstract" and self.category is None:
            raise StructureError("abstract scope needs a category")
        if self.kind == "rmod" and self.ring is None:
            raise StructureError("rmod scope needs a ring")
        if self.kind == "presheaf" and self.base is None:
            raise StructureError("presheaf scope needs a base category")
        if self.bound <= 0 or self.hom_sample <= 0:
            raise StructureError("bounds must be positive")

    def label(self) -> str:
        if self.kind == "abstract":
            return f"category with {len(self.category.objects)} objects"
        if self.kind == "rmod":
            return f"modules over {self.ring} with <= {self.bound} elements"
        return (f"presheaves on {len(self.base.objects)} objects with value "
                f"sizes <= {self.bound}")


def abstract_scope(cat: FinCategory) -> AuditScope:
    return AuditScope("abstract", category=cat)


def rmod_scope(ring, bound: int = 16, hom_sample: int = 32) -> AuditScope:
    return AuditScope("rmod", ring=ring_make(ring), bound=bound,
                      hom_sample=hom_sample)


def presheaf_scope(base: FinCategory, bound: int = 2,
                   hom_sample: int = 32) -> AuditScope:
    return AuditScope("presheaf", base=base, bound=bound,
                      hom_sample=hom_sample)


# -- submodule enumeration ------------------------------------------------------


def span(m: FinModule, gens: Sequence[Element]) -> frozenset[Element]:
    """All elements reachable from the generators by addition and the
    ring action."""
    have = {m.zero()}
    frontier = [m.zero()]
    scalars = list(m.ring.elements())
    while frontier:
        x = frontier.pop()
        for g in gens:
            for r in scalars:
                y = m.add(x, m.scale(r, g))
                if y not in have:
                    have.add(y)
                    frontier.append(y)
    return frozenset(have)


def all_submodules(m: FinModule) -> list[frozenset[Element]]:
    """Every submodule of ``m`` as an element set, smallest first.

    Exhaustive closure walk; refuses modules with more than
    ``SUBMODULE_EXHAUSTIVE_LIMIT`` elements.
    """
    if m.size > SUBMODULE_EXHAUSTIVE_LIMIT:
        raise BoundExceeded(f"module has {m.size} elements; exhaustive "
                            f"subobject enumeration is capped at "
                            f"{SUBMODULE_EXHAUSTIVE_LIMIT}")
    elements = list(m.elements())
    scalars = list(m.ring.elements())
    zero_sub = frozenset({m.zero()})
    found = {zero_sub}
    frontier = [zero_sub]
    while frontier:
        sub = frontier.pop()
        for e in elements:
            if e in sub:
                continue
            # adjoining e to a submodule closes in one pass
            bigger = frozenset(m.add(s, m.scale(r, e))
                               for s in sub for r in scalars)
            if bigger not in found:
                found.add(bigger)
                frontier.append(bigger)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def submodule_inclusion(m: FinModule,
                        elems: frozenset[Element]) -> tuple[FinModule, ModuleHom]:
    """Present an element-set submodule as a module with its inclusion.

    The submodule is the image of a map out of one free rank per
    generator and ring component, so the presentation is already in
    canonical form.
    """
    gens = sorted(elems)
    moduli = m.ring.moduli
    dom = module_make(m.ring, [(c, moduli[c])
                               for _ in gens for c in range(len(moduli))])
    cols = []
    for g in gens:
        for c in range(len(moduli)):
            unit = tuple(1 if i == c else 0 for i in range(len(moduli)))
            cols.append(m.scale(unit, g))
    matrix = [[col[i] for col in cols] for i in range(m.rank)]
    sub, incl = image(hom_make(dom, m, matrix))
    got = {incl.apply(x) for x in sub.elements()}
    if got != set(elems):
        raise StructureError("submodule presentation does not match its span")
    return sub, incl


# -- shared helpers -------------------------------------------------------------


def _canonical_epis(m: FinModule) -> Iterator[tuple[ModuleHom, frozenset[Element]]]:
    """Quotient maps by every submodule; up to isomorphism this is every
    epimorphism out of ``m``."""
    for elems in all_submodules(m):
        _, incl = submodule_inclusion(m, elems)
        _, proj = cokernel(incl)
        yield proj, elems


def _sample_homs(src: FinModule, tgt: FinModule, cap: int) -> list[ModuleHom]:
    return list(itertools.islice(hom_module(src, tgt).all_homs(), cap))


def _mod_comparison(q: ModuleHom, f: ModuleHom) -> Optional[ModuleHom]:
    """The unique h with h after q = f, when q is surjective."""
    cols = []
    for jdx in range(q.codomain.rank):
        gen = tuple(1 if i == jdx else 0 for i in range(q.codomain.rank))
        lift = solve_hom(q, gen)
        if lift is None:
            return None
        cols.append(f.apply(lift))
    matrix = [[cols[jcol][i] for jcol in range(len(cols))]
              for i in range(f.codomain.rank)]
    h = hom_make(q.codomain, f.codomain, matrix)
    if h.compose(q) != f:
        return None
    return h


# -- axiom (i): coproducts exist, disjoint, stable ------------------------------


def audit_coproducts(scope: AuditScope) -> AuditReport:
    """Coproducts exist, distinct injections pull back to the initial
    object, and pulling the coproduct back redistributes it.

    In the module scope stability is checked along the coproduct's own
    injections; stability along arbitrary arrows fails there for honest
    reasons (the zero arrow merges components) and is reported as a note
    with a witness instead of a violation.
    """
    audit = _Audit("coproducts", scope.label())
    if scope.kind == "abstract":
        _coproducts_abstract(scope.category, audit)
    elif scope.kind == "rmod":
        _coproducts_rmod(scope, audit)
    else:
        _coproducts_presheaf(scope, audit)
    return audit.done()


def _coproducts_abstract(cat: FinCategory, audit: _Audit) -> None:
    init = initial_object(cat)
    for x, y in itertools.combinations_with_replacement(cat.objects, 2):
        got = coproduct(cat, x, y)
        if got is None:
            audit.add("hypothesis-missing", (x, y),
                      f"no coproduct of ({x}, {y}) in this category")
            continue
        obj, i1, i2 = got
        pb = pullback(cat, i1, i2)
        if pb is None:
            audit.add("hypothesis-missing", (x, y),
                      "injections have no pullback")
        elif init is None:
            audit.add("hypothesis-missing", (x, y),
                      "the category has no initial object")
        elif pb[0] != init:
            audit.add("violation", (x, y, pb[0]),
                      "pullback of distinct injections is not initial")
        else:
            audit.add("pass", (x, y), "disjointness holds")
        _stability_abstract(cat, audit, (x, y), obj, i1, i2)


def _stability_abstract(cat: FinCategory, audit: _Audit, subject: tuple,
                        obj: str, i1: str, i2: str) -> None:
    for h in cat.arrows_into[obj]:
        if cat.is_identity(h):
            continue
        p1 = pullback(cat, i1, h)
        p2 = pullback(cat, i2, h)
        if p1 is None or p2 is None:
            audit.add("hypothesis-missing", subject + (h,),
                      "a pullback along the test arrow is missing")
            continue
        side = coproduct(cat, p1[0], p2[0])
        if side is None:
            audit.add("hypothesis-missing", subject + (h,),
                      "the redistributed coproduct is missing")
            continue
        sobj, j1, j2 = side
        # unique mediating arrow to the domain of h, then invertibility
        dom = cat.source(h)
        mediators = [m for m in cat.hom(sobj, dom)
                     if cat.compose(m, j1) == p1[2] and cat.compose(m, j2) == p2[2]]
        if len(mediators) != 1 or is_iso(cat, mediators[0]) is None:
            audit.add("violation", subject + (h,),
                      "redistributed coproduct does not recover the domain")
        else:
            audit.add("pass", subject + (h,), "stable along this arrow")


def _coproducts_rmod(scope: AuditScope, audit: _Audit) -> None:
    mods = small_modules(scope.ring, scope.bound)
    audit.add("note", (),
              "the zero module is initial but not strict; disjointness "
              "below is the literal pullback-is-initial check")
    for m, n in itertools.combinations_with_replacement(mods, 2):
        _, (i1, i2), _ = direct_sum(m, n)
        pb, _, _ = mod_pullback(i1, i2)
        if pb.size == 1:
            audit.add("pass", (str(m), str(n)),
                      "pullback of the injections is zero")
        else:
            audit.add("violation", (str(m), str(n)),
                      f"pullback of injections has {pb.size} elements")
        # stability along the coproduct's own injections
        okay = True
        for inj in (i1, i2):
            a1, _, _ = mod_pullback(i1, inj)
            a2, _, _ = mod_pullback(i2, inj)
            back = a1.size * a2.size
            if back != inj.domain.size:
                okay = False
                audit.add("violation", (str(m), str(n)),
                          "pullback along an injection does not redistribute")
        if okay:
            audit.add("pass", (str(m), str(n)), "stable along both injections")
    # arbitrary-arrow stability honestly fails in modules: record one witness
    two = module_make(scope.ring, [(0, _least_piece(scope.ring))])
    total, (i1, i2), _ = direct_sum(two, two)
    diag = hom_make(two, total, [[1], [1]])
    a1, _, _ = mod_pullback(i1, diag)
    a2, _, _ = mod_pullback(i2, diag)
    if a1.size * a2.size != two.size:
        audit.add("note", (str(two),),
                  "stability along arbitrary arrows fails: the diagonal "
                  "into a double pulls back to zero on both components")


def _least_piece(ring: FinRing) -> int:
    m = ring.moduli[0]
    for d in range(2, m + 1):
        if m % d == 0:
            return d
    return m


def _coproducts_presheaf(scope: AuditScope, audit: _Audit) -> None:
    pool = all_set_presheaves(scope.base, scope.bound)
    pairs = list(itertools.combinations_with_replacement(range(len(pool)), 2))
    for ia, ib in pairs:
        p, q = pool[ia], pool[ib]
        total, j1, j2 = psh_coproduct(p, q)
        pb, _, _ = psh_pullback(j1, j2)
        if any(pb.value(c) for c in pb.base.objects):
            audit.add("violation", (f"P{ia}", f"P{ib}"),
                      "injections overlap")
        else:
            audit.add("pass", (f"P{ia}", f"P{ib}"), "disjointness holds")
        tests = itertools.islice(
            (h for d in pool for h in nat_transformations(d, total)),
            scope.hom_sample)
        for h in tests:
            b1, _, leg1 = psh_pullback(j1, h)
            b2, _, leg2 = psh_pullback(j2, h)
            side, k1, k2 = psh_coproduct(b1, b2)
            mediator = _psh_copair(side, k1, k2, leg1, leg2, h.source)
            if not is_natural_iso(mediator):
                audit.add("violation", (f"P{ia}", f"P{ib}"),
                          "redistributed coproduct misses the domain")
                break
        else:
            audit.add("pass", (f"P{ia}", f"P{ib}"),
                      f"stable along <= {scope.hom_sample} sampled arrows")


# -- presheaf-level constructions (set flavor) -----------------------------------


def psh_coproduct(p: SetPresheaf, q: SetPresheaf):
    """Pointwise tagged union with its two injections.

    Elements are tagged tuples so nesting never collides.
    """
    base = p.base
    values = {c: tuple([("a", x) for x in p.value(c)] +
                       [("b", x) for x in q.value(c)])
              for c in base.objects}
    rests = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        m = {("a", x): ("a", p.restrict(a.name, x)) for x in p.value(a.target)}
        m.update({("b", x): ("b", q.restrict(a.name, x))
                  for x in q.value(a.target)})
        rests[a.name] = m
    total = set_presheaf(base, values, rests)
    j1 = presheaf_morphism(p, total, {c: {x: ("a", x) for x in p.value(c)}
                                      for c in base.objects})
    j2 = presheaf_morphism(q, total, {c: {x: ("b", x) for x in q.value(c)}
                                      for c in base.objects})
    return total, j1, j2


def psh_pullback(f: PresheafMorphism, g: PresheafMorphism):
    """Pointwise pullback of a cospan, with its two projections."""
    if f.target != g.target:
        raise StructureError("pullback needs a shared target")
    p, q = f.source, g.source
    base = p.base
    values = {}
    for c in base.objects:
        values[c] = tuple((x, y) for x in p.value(c) for y in q.value(c)
                          if f.apply(c, x) == g.apply(c, y))
    rests = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        rests[a.name] = {(x, y): (p.restrict(a.name, x), q.restrict(a.name, y))
                         for x, y in values[a.target]}
    pb = set_presheaf(base, values, rests)
    l1 = presheaf_morphism(pb, p, {c: {pair: pair[0] for pair in values[c]}
                                   for c in base.objects})
    l2 = presheaf_morphism(pb, q, {c: {pair: pair[1] for pair in values[c]}
                                   for c in base.objects})
    return pb, l1, l2


def _psh_copair(side: SetPresheaf, k1: PresheafMorphism, k2: PresheafMorphism,
                u1: PresheafMorphism, u2: PresheafMorphism,
                target: SetPresheaf) -> PresheafMorphism:
    """[u1, u2] out of a coproduct presented by its injections."""
    comps = {}
    for c in side.base.objects:
        m = {}
        for x in k1.source.value(c):
            m[k1.apply(c, x)] = u1.apply(c, x)
        for x in k2.source.value(c):
            m[k2.apply(c, x)] = u2.apply(c, x)
        comps[c] = m
    return presheaf_morphism(side, target, comps)


def psh_coequalizer(u: PresheafMorphism, v: PresheafMorphism):
    """Pointwise quotient by the relation u(x) ~ v(x), with projection."""
    if u.source != v.source or u.target != v.target:
        raise StructureError("coequalizer needs a parallel pair")
    q = u.target
    base = q.base
    classes: dict[str, dict[str, str]] = {}
    values = {}
    for c in base.objects:
        parent = {x: x for x in q.value(c)}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in u.source.value(c):
            a, b = find(u.apply(c, x)), find(v.apply(c, x))
            if a != b:
                parent[a] = b
        named: dict[str, str] = {}
        label: dict[str, str] = {}
        for x in q.value(c):
            root = find(x)
            if root not in named:
                named[root] = f"q{len(named)}"
            label[x] = named[root]
        classes[c] = label
        values[c] = tuple(dict.fromkeys(label[x] for x in q.value(c)))
    rests = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        m = {}
        for x in q.value(a.target):
            got = classes[a.source][q.restrict(a.name, x)]
            cls = classes[a.target][x]
            if m.get(cls, got) != got:
                raise StructureError("quotient restriction is not well defined")
            m[cls] = got
        rests[a.name] = m
    quo = set_presheaf(base, values, rests)
    proj = presheaf_morphism(q, quo, classes)
    return quo, proj


def psh_is_epi(m: PresheafMorphism) -> bool:
    return all(set(m.apply(c, x) for x in m.source.value(c)) ==
               set(m.target.value(c)) for c in m.source.base.objects)


# -- axiom (ii): epis are coequalizers -------------------------------------------


def audit_epi_coequalizer(scope: AuditScope) -> AuditReport:
    """Every epimorphism coequalizes its kernel pair."""
    audit = _Audit("epi-coequalizer", scope.label())
    if scope.kind == "abstract":
        _epis_abstract(scope.category, audit)
    elif scope.kind == "rmod":
        _epis_rmod(scope, audit)
    else:
        _epis_presheaf(scope, audit)
    return audit.done()


def _epis_abstract(cat: FinCategory, audit: _Audit) -> None:
    for a in cat.arrows:
        if cat.is_identity(a.name) or not is_epi(cat, a.name):
            continue
        kp = kernel_pair(cat, a.name)
        if kp is None:
            audit.add("hypothesis-missing", (a.name,), "no kernel pair")
            continue
        _, u, v = kp
        ce = coequalizer(cat, u, v)
        if ce is None:
            audit.add("hypothesis-missing", (a.name,),
                      "kernel pair has no coequalizer")
            continue
        qobj, q = ce
        mediators = [h for h in cat.hom(qobj, a.target)
                     if cat.compose(h, q) == a.name]
        if len(mediators) == 1 and is_iso(cat, mediators[0]) is not None:
            audit.add("pass", (a.name,), "epi is the coequalizer of its kernel pair")
        else:
            audit.add("violation", (a.name,),
                      "comparison from the coequalizer is not invertible")


def _epis_rmod(scope: AuditScope, audit: _Audit) -> None:
    for m in small_modules(scope.ring, scope.bound):
        if m.size > SUBMODULE_EXHAUSTIVE_LIMIT:
            continue
        for q, elems in _canonical_epis(m):
            _, u, v = mod_pullback(q, q)
            _, proj = mod_coequalizer(u, v)
            h = _mod_comparison(proj, q)
            if h is not None and is_isomorphism(h):
                audit.add("pass", (str(m), f"kernel {len(elems)} elements"),
                          "quotient map coequalizes its kernel pair")
            else:
                audit.add("violation", (str(m), f"kernel {len(elems)} elements"),
                          "comparison from the coequalizer is not invertible")


def _epis_presheaf(scope: AuditScope, audit: _Audit) -> None:
    pool = all_set_presheaves(scope.base, scope.bound)
    seen = 0
    for p in pool:
        for q in pool:
            for f in nat_transformations(p, q):
                if not psh_is_epi(f):
                    continue
                if seen >= scope.hom_sample:
                    return
                seen += 1
                _, u, v = psh_pullback(f, f)
                _, proj = psh_coequalizer(u, v)
                mediator = _psh_epi_comparison(proj, f)
                if mediator is not None and is_natural_iso(mediator):
                    audit.add("pass", (f"epi#{seen}",),
                              "epi coequalizes its kernel pair")
                else:
                    audit.add("violation", (f"epi#{seen}",),
                              "comparison from the coequalizer fails")


def _psh_epi_comparison(proj: PresheafMorphism,
                        f: PresheafMorphism) -> Optional[PresheafMorphism]:
    comps = {}
    for c in proj.source.base.objects:
        m = {}
        for x in proj.source.value(c):
            cls = proj.apply(c, x)
            want = f.apply(c, x)
            if m.get(cls, want) != want:
                return None
            m[cls] = want
        comps[c] = m
    return presheaf_morphism(proj.target, f.target, comps)


# -- axiom (iii): equivalence relations are effective ----------------------------


def audit_equivalence_relations(scope: AuditScope) -> AuditReport:
    """Reflexive, symmetric, transitive relation subobjects admit
    quotients and are the kernel pairs of those quotients."""
    audit = _Audit("equivalence-relations", scope.label())
    if scope.kind == "abstract":
        _equiv_abstract(scope.category, audit)
    elif scope.kind == "rmod":
        _equiv_rmod(scope, audit)
    else:
        _equiv_presheaf(scope, audit)
    return audit.done()


def _equiv_rmod(scope: AuditScope, audit: _Audit) -> None:
    for m in small_modules(scope.ring, scope.bound):
        square, (i1, i2), (p1, p2) = direct_sum(m, m)
        if square.size <= RELATION_EXHAUSTIVE_LIMIT:
            candidates = all_submodules(square)
        elif m.size <= SUBMODULE_EXHAUSTIVE_LIMIT and \
                m.size ** 2 <= RELATION_PAIR_CAP:
            # the square is too big to walk; congruences by submodules
            # still cover every equivalence relation on a module
            candidates = [_congruence(m, n) for n in all_submodules(m)]
        else:
            audit.add("note", (str(m),),
                      f"skipped: {m.size ** 2} candidate pairs exceed "
                      f"{RELATION_PAIR_CAP}")
            continue
        for elems in candidates:
            diag = {square.add(i1.apply(x), i2.apply(x))
                    for x in m.elements()}
            refl = diag <= set(elems)
            symm = all(_swap(m, e) in elems for e in elems)
            trans = _transitive(m, elems)
            if not (refl and symm and trans):
                continue
            _, incl = submodule_inclusion(square, elems)
            r1 = p1.compose(incl)
            r2 = p2.compose(incl)
            _, proj = mod_coequalizer(r1, r2)
            kp, k1, k2 = mod_pullback(proj, proj)
            kp_elems = {square.add(i1.apply(k1.apply(x)), i2.apply(k2.apply(x)))
                        for x in kp.elements()}
            if kp_elems == set(elems):
                audit.add("pass", (str(m), f"relation {len(elems)} elements"),
                          "equivalence relation is the kernel pair of its quotient")
            else:
                audit.add("violation", (str(m), f"relation {len(elems)} elements"),
                          "kernel pair of the quotient differs from the relation")


def _congruence(m: FinModule, sub: frozenset[Element]) -> frozenset[Element]:
    out = set()
    for x in m.elements():
        for n in sub:
            y = m.add(x, n)
            out.add(tuple(x) + tuple(y))
    return frozenset(out)


def _swap(m: FinModule, pair: Element) -> Element:
    r = m.rank
    return tuple(pair[r:]) + tuple(pair[:r])


def _transitive(m: FinModule, elems: frozenset[Element]) -> bool:
    r = m.rank
    by_first: dict[Element, list[Element]] = {}
    for e in elems:
        by_first.setdefault(tuple(e[:r]), []).append(tuple(e[r:]))
    for e in elems:
        mid = tuple(e[r:])
        for z in by_first.get(mid, ()):
            if tuple(e[:r]) + z not in elems:
                return False
    return True


def _equiv_abstract(cat: FinCategory, audit: _Audit) -> None:
    for robj in cat.objects:
        for eobj in cat.objects:
            for r1, r2 in itertools.product(cat.hom(robj, eobj), repeat=2):
                if not _jointly_monic(cat, r1, r2):
                    continue
                if not _is_equivalence_abstract(cat, robj, eobj, r1, r2):
                    continue
                ce = coequalizer(cat, r1, r2)
                if ce is None:
                    audit.add("hypothesis-missing", (r1, r2), "no quotient")
                    continue
                _, q = ce
                kp = kernel_pair(cat, q)
                if kp is None:
                    audit.add("hypothesis-missing", (r1, r2),
                              "quotient has no kernel pair")
                    continue
                kobj, k1, k2 = kp
                isos = [w for w in cat.hom(robj, kobj)
                        if cat.compose(k1, w) == r1 and cat.compose(k2, w) == r2
                        and is_iso(cat, w) is not None]
                if isos:
                    audit.add("pass", (r1, r2), "relation is effective")
                else:
                    audit.add("violation", (r1, r2),
                              "relation is not the kernel pair of its quotient")


def _jointly_monic(cat: FinCategory, r1: str, r2: str) -> bool:
    src = cat.source(r1)
    for x in cat.objects:
        for a, b in itertools.product(cat.hom(x, src), repeat=2):
            if a != b and cat.compose(r1, a) == cat.compose(r1, b) \
                    and cat.compose(r2, a) == cat.compose(r2, b):
                return False
    return True


def _is_equivalence_abstract(cat: FinCategory, robj: str, eobj: str,
                             r1: str, r2: str) -> bool:
    ident = cat.id_of(eobj)
    refl = any(cat.compose(r1, d) == ident and cat.compose(r2, d) == ident
               for d in cat.hom(eobj, robj))
    if not refl:
        return False
    symm = any(cat.compose(r1, s) == r2 and cat.compose(r2, s) == r1
               for s in cat.hom(robj, robj))
    if not symm:
        return False
    pb = pullback(cat, r2, r1)
    if pb is None:
        return True  # transitivity untestable without the composite object
    pobj, pa, pb_leg = pb
    return any(cat.compose(r1, t) == cat.compose(r1, pa) and
               cat.compose(r2, t) == cat.compose(r2, pb_leg)
               for t in cat.hom(pobj, robj))


def _equiv_presheaf(scope: AuditScope, audit: _Audit) -> None:
    pool = all_set_presheaves(scope.base, scope.bound)
    seen = 0
    for p in pool:
        if seen >= scope.hom_sample:
            break
        square, l1, l2 = _psh_square(p)
        for rel in _sub_presheaves(square):
            if not _psh_equivalence(p, rel):
                continue
            if seen >= scope.hom_sample:
                break
            seen += 1
            incl = presheaf_morphism(rel, square,
                                     {c: {x: x for x in rel.value(c)}
                                      for c in rel.base.objects})
            r1 = compose_morphisms(l1, incl)
            r2 = compose_morphisms(l2, incl)
            _, proj = psh_coequalizer(r1, r2)
            kp, k1, k2 = psh_pullback(proj, proj)
            want = {c: {(r1.apply(c, x), r2.apply(c, x)) for x in rel.value(c)}
                    for c in p.base.objects}
            got = {c: {(k1.apply(c, x), k2.apply(c, x)) for x in kp.value(c)}
                   for c in p.base.objects}
            if want == got:
                audit.add("pass", (f"relation#{seen}",),
                          "pointwise equivalence relation is effective")
            else:
                audit.add("violation", (f"relation#{seen}",),
                          "kernel pair of the quotient differs from the relation")


def _psh_square(p: SetPresheaf):
    base = p.base
    values = {c: tuple((x, y) for x in p.value(c) for y in p.value(c))
              for c in base.objects}
    rests = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        rests[a.name] = {(x, y): (p.restrict(a.name, x), p.restrict(a.name, y))
                         for x in p.value(a.target) for y in p.value(a.target)}
    square = set_presheaf(base, values, rests)
    l1 = presheaf_morphism(square, p, {c: {pair: pair[0] for pair in values[c]}
                                       for c in base.objects})
    l2 = presheaf_morphism(square, p, {c: {pair: pair[1] for pair in values[c]}
                                       for c in base.objects})
    return square, l1, l2


def _sub_presheaves(p: SetPresheaf) -> Iterator[SetPresheaf]:
    base = p.base
    per_object = [list(_subsets(p.value(c))) for c in base.objects]
    for pick in itertools.product(*per_object):
        chosen = dict(zip(base.objects, pick))
        closed = True
        for a in base.arrows:
            if base.is_identity(a.name):
                continue
            if any(p.restrict(a.name, x) not in chosen[a.source]
                   for x in chosen[a.target]):
                closed = False
                break
        if not closed:
            continue
        values = {c: tuple(x for x in p.value(c) if x in chosen[c])
                  for c in base.objects}
        rests = {a.name: {x: p.restrict(a.name, x) for x in values[a.target]}
                 for a in base.arrows if not base.is_identity(a.name)}
        yield set_presheaf(base, values, rests)


def _subsets(xs: Sequence[str]) -> Iterator[frozenset[str]]:
    for k in range(len(xs) + 1):
        for combo in itertools.combinations(xs, k):
            yield frozenset(combo)


def _psh_equivalence(p: SetPresheaf, rel: SetPresheaf) -> bool:
    for c in p.base.objects:
        have = set(rel.value(c))
        if any((x, x) not in have for x in p.value(c)):
            return False
        if any((b, a) not in have for a, b in have):
            return False
        if any((a, d) not in have for a, b in have for bb, d in have if b == bb):
            return False
    return True


# -- axiom (iv): exact forks are stably exact ------------------------------------


def audit_exact_forks(scope: AuditScope) -> AuditReport:
    """Kernel-pair coequalizer diagrams stay exact after pullback."""
    audit = _Audit("exact-forks", scope.label())
    if scope.kind == "rmod":
        _forks_rmod(scope, audit)
    elif scope.kind == "abstract":
        _forks_abstract(scope.category, audit)
    else:
        _forks_presheaf(scope, audit)
    return audit.done()


def _forks_abstract(cat: FinCategory, audit: _Audit) -> None:
    for a in cat.arrows:
        if not is_epi(cat, a.name):
            continue
        kp = kernel_pair(cat, a.name)
        if kp is None:
            continue
        _, u, v = kp
        ce = coequalizer(cat, u, v)
        if ce is None or not any(
                cat.compose(h, ce[1]) == a.name and is_iso(cat, h) is not None
                for h in cat.hom(ce[0], cat.target(a.name))):
            continue  # not an exact fork, nothing to preserve
        for h in cat.arrows_into[cat.target(a.name)]:
            back = pullback(cat, a.name, h)
            if back is None:
                audit.add("hypothesis-missing", (a.name, h),
                          "no pullback along the test arrow")
                continue
            _, _, q_leg = back
            kp2 = kernel_pair(cat, q_leg)
            if kp2 is None:
                audit.add("hypothesis-missing", (a.name, h),
                          "pulled-back arrow has no kernel pair")
                continue
            ce2 = coequalizer(cat, kp2[1], kp2[2])
            exact = (is_epi(cat, q_leg) and ce2 is not None and any(
                cat.compose(w, ce2[1]) == q_leg and is_iso(cat, w) is not None
                for w in cat.hom(ce2[0], cat.target(q_leg))))
            if exact:
                audit.add("pass", (a.name, h), "pulled-back fork is exact")
            else:
                audit.add("violation", (a.name, h),
                          "pulled-back fork lost exactness")


def _forks_rmod(scope: AuditScope, audit: _Audit) -> None:
    for m in small_modules(scope.ring, scope.bound):
        if m.size > SUBMODULE_EXHAUSTIVE_LIMIT:
            continue
        for q, _ in _canonical_epis(m):
            target = q.codomain
            for other in small_modules(scope.ring, scope.bound):
                for h in _sample_homs(other, target, scope.hom_sample):
                    _, _, q_leg = mod_pullback(q, h)
                    # fork pulled back along h; re-check exactness
                    _, u2, v2 = mod_pullback(q_leg, q_leg)
                    _, proj2 = mod_coequalizer(u2, v2)
                    comp = _mod_comparison(proj2, q_leg)
                    if comp is not None and is_isomorphism(comp) \
                            and is_surjective(q_leg):
                        audit.add("pass", (str(m), str(other)),
                                  "pulled-back fork is exact")
                    else:
                        audit.add("violation", (str(m), str(other)),
                                  "pulled-back fork lost exactness")


def _forks_presheaf(scope: AuditScope, audit: _Audit) -> None:
    pool = all_set_presheaves(scope.base, scope.bound)
    seen = 0
    for p in pool:
        for q in pool:
            for f in nat_transformations(p, q):
                if not psh_is_epi(f) or seen >= scope.hom_sample:
                    continue
                seen += 1
                for other in pool[:3]:
                    for h in itertools.islice(nat_transformations(other, q), 2):
                        _, _, q_leg = psh_pullback(f, h)
                        _, u2, v2 = psh_pullback(q_leg, q_leg)
                        _, proj2 = psh_coequalizer(u2, v2)
                        comp = _psh_epi_comparison(proj2, q_leg)
                        if comp is not None and is_natural_iso(comp) \
                                and psh_is_epi(q_leg):
                            audit.add("pass", (f"fork#{seen}",),
                                      "pulled-back fork is exact")
                        else:
                            audit.add("violation", (f"fork#{seen}",),
                                      "pulled-back fork lost exactness")


# -- axiom (v): a small generating set -------------------------------------------


def audit_generators(scope: AuditScope, gens: Optional[Sequence] = None) -> AuditReport:
    """A declared set of objects generates: its arrows separate parallel
    pairs.  Presheaf scope defaults to the representables and also
    witnesses generation through colimits of representables."""
    audit = _Audit("generators", scope.label())
    if scope.kind == "abstract":
        names = list(gens or ())
        if generates(scope.category, names):
            audit.add("pass", tuple(names), "arrows from the chosen objects "
                                            "separate every parallel pair")
        else:
            audit.add("violation", tuple(names),
                      "some parallel pair is not separated")
    elif scope.kind == "rmod":
        _generators_rmod(scope, list(gens or [module_make(scope.ring,
                         [(c, m) for c, m in enumerate(scope.ring.moduli)])]),
                         audit)
    else:
        _generators_presheaf(scope, audit)
    return audit.done()


def _generators_rmod(scope: AuditScope, gens: Sequence[FinModule],
                     audit: _Audit) -> None:
    mods = small_modules(scope.ring, scope.bound)
    for m in mods:
        for n in mods:
            homs = _sample_homs(m, n, scope.hom_sample)
            for u, v in itertools.combinations(homs, 2):
                separated = False
                for g in gens:
                    for h in hom_module(g, m).all_homs():
                        if u.compose(h) != v.compose(h):
                            separated = True
                            break
                    if separated:
                        break
                if not separated:
                    audit.add("violation", (str(m), str(n)),
                              "a parallel pair escapes the generators")
                    return
    audit.add("pass", tuple(str(g) for g in gens),
              f"parallel pairs separated across {len(mods)} modules "
              f"(<= {scope.hom_sample} homs per pair)")


def _generators_presheaf(scope: AuditScope, audit: _Audit) -> None:
    pool = all_set_presheaves(scope.base, scope.bound)
    checked = 0
    for p in pool:
        for q in pool:
            for u, v in itertools.combinations(nat_transformations(p, q), 2):
                if checked >= scope.hom_sample:
                    break
                checked += 1
                # separate through an actual map out of a representable
                separated = any(
                    compose_morphisms(u, g) != compose_morphisms(v, g)
                    for c in scope.base.objects for x in p.value(c)
                    for g in (yoneda_classify(p, c, x),))
                if not separated:
                    audit.add("violation", (), "distinct transformations "
                                               "agree on all representable probes")
                    return
    audit.add("pass", tuple(scope.base.objects),
              f"representables separate {checked} sampled parallel pairs")
    for p in itertools.islice(pool, 4):
        if all(not p.value(c) for c in scope.base.objects):
            continue
        res = colimit_of_representables(p)
        if is_natural_iso(res.comparison):
            audit.add("pass", ("colimit-of-representables",),
                      "sampled object is a colimit of representables")
        else:
            audit.add("violation", ("colimit-of-representables",),
                      "comparison from the representable colimit fails")
