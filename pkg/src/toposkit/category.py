"""Finite categories as explicit composition tables.

A ``FinCategory`` stores every object, every arrow and the whole binary
composition table.  Everything downstream (epi/mono tests, limits,
colimits) is decided by exhaustive enumeration over these tables, so the
answers are exact.  Arrows are compared by name only; two arrows with the
same source and target are distinct unless they are the same table entry.

Composition is written in function order: ``compose(g, f)`` is "first
``f``, then ``g``" and requires ``target(f) == source(g)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from . import _kernels
from .diagnostics import Report, StructureError


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True, eq=False)
class FinCategory:
    objects: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    identity: Mapping[str, str]
    composition: Mapping[tuple[str, str], str]

    def __post_init__(self) -> None:
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise StructureError("duplicate arrow names")
        if len(set(self.objects)) != len(self.objects):
            raise StructureError("duplicate object names")
        by_name = {a.name: a for a in self.arrows}
        for a in self.arrows:
            if a.source not in set(self.objects) or a.target not in set(self.objects):
                raise StructureError(f"arrow {a.name} references unknown object")
        for obj in self.objects:
            ident = self.identity.get(obj)
            if ident is None or ident not in by_name:
                raise StructureError(f"no identity arrow for {obj}")
            ia = by_name[ident]
            if ia.source != obj or ia.target != obj:
                raise StructureError(f"identity of {obj} is not an endo-arrow")
        # The table must be total on composable pairs and empty elsewhere.
        for g, f in self.composition:
            if g not in by_name or f not in by_name:
                raise StructureError(f"composition entry ({g}, {f}) names unknown arrows")
            if by_name[f].target != by_name[g].source:
                raise StructureError(f"composition entry ({g}, {f}) is not composable")
            if self.composition[(g, f)] not in by_name:
                raise StructureError(f"composite of ({g}, {f}) names an unknown arrow")
        for g in self.arrows:
            for f in self.arrows:
                if f.target == g.source and (g.name, f.name) not in self.composition:
                    raise StructureError(f"missing composite for ({g.name}, {f.name})")

    # -- lookups ---------------------------------------------------------

    @cached_property
    def arrow_by_name(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    @cached_property
    def hom_table(self) -> dict[tuple[str, str], tuple[str, ...]]:
        table: dict[tuple[str, str], list[str]] = {
            (x, y): [] for x in self.objects for y in self.objects
        }
        for a in self.arrows:
            table[(a.source, a.target)].append(a.name)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def arrows_into(self) -> dict[str, tuple[str, ...]]:
        table: dict[str, list[str]] = {x: [] for x in self.objects}
        for a in self.arrows:
            table[a.target].append(a.name)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def arrows_out_of(self) -> dict[str, tuple[str, ...]]:
        table: dict[str, list[str]] = {x: [] for x in self.objects}
        for a in self.arrows:
            table[a.source].append(a.name)
        return {k: tuple(v) for k, v in table.items()}

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return self.hom_table[(x, y)]

    def source(self, f: str) -> str:
        return self.arrow_by_name[f].source

    def target(self, f: str) -> str:
        return self.arrow_by_name[f].target

    def compose(self, g: str, f: str) -> str:
        """g after f; raises on non-composable pairs."""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise StructureError(f"arrows ({g}, {f}) are not composable") from None

    def id_of(self, obj: str) -> str:
        return self.identity[obj]

    def is_identity(self, f: str) -> bool:
        a = self.arrow_by_name[f]
        return self.identity.get(a.source) == f


def category(
    objects: Sequence[str],
    arrows: Sequence[tuple[str, str, str]] = (),
    compose: Optional[Mapping[tuple[str, str], str]] = None,
    identities: Optional[Mapping[str, str]] = None,
) -> FinCategory:
    """Build a ``FinCategory`` with identity arrows and unit composites filled in.

    ``arrows`` lists non-identity arrows as ``(name, source, target)``.
    ``compose`` must cover every composable pair of non-identity arrows;
    composites with an identity are derived.  Pass ``identities`` to
    use existing arrow names instead of the generated ``id_<object>``.
    """
    identities = dict(identities or {})
    arrow_list = [Arrow(*a) for a in arrows]
    declared = {a.name for a in arrow_list}
    for obj in objects:
        if obj not in identities:
            name = f"id_{obj}"
            if name in declared:
                raise StructureError(f"arrow name {name} collides with generated identity")
            identities[obj] = name
            arrow_list.append(Arrow(name, obj, obj))
    table: dict[tuple[str, str], str] = dict(compose or {})
    by_name = {a.name: a for a in arrow_list}
    for g in arrow_list:
        for f in arrow_list:
            if f.target != g.source or (g.name, f.name) in table:
                continue
            if identities.get(g.source) == g.name:
                table[(g.name, f.name)] = f.name
            elif identities.get(f.source) == f.name:
                table[(g.name, f.name)] = g.name
    return FinCategory(tuple(objects), tuple(arrow_list), identities, table)


def validate_category(cat: FinCategory) -> Report:
    """Check unit and associativity laws plus composite typing.

    Reports every violation with its witnessing arrows; an empty report
    means the composition table is a genuine category.
    """
    report = Report()
    for f in cat.arrows:
        ident_t = cat.id_of(f.target)
        ident_s = cat.id_of(f.source)
        left = cat.compose(ident_t, f.name)
        if left != f.name:
            report.add("unit", (ident_t, f.name),
                       f"compose({ident_t}, {f.name}) = {left}, expected {f.name}")
        right = cat.compose(f.name, ident_s)
        if right != f.name:
            report.add("unit", (f.name, ident_s),
                       f"compose({f.name}, {ident_s}) = {right}, expected {f.name}")
    for (g, f), h in cat.composition.items():
        ga, fa, ha = cat.arrow_by_name[g], cat.arrow_by_name[f], cat.arrow_by_name[h]
        if cat.is_identity(g) or cat.is_identity(f):
            continue  # identity typing is subsumed by the unit law above
        if ha.source != fa.source or ha.target != ga.target:
            report.add("typing", (g, f),
                       f"composite {h} of ({g}, {f}) has wrong source or target")
    def try_compose(g: str, f: str) -> Optional[str]:
        # A wrongly-typed composite can make the next composition undefined;
        # that defect is already reported above, so skip instead of raising.
        return cat.composition.get((g, f))

    for h in cat.arrows:
        for g in cat.arrows:
            if g.target != h.source:
                continue
            for f in cat.arrows:
                if f.target != g.source:
                    continue
                hg = try_compose(h.name, g.name)
                gf = try_compose(g.name, f.name)
                lhs = try_compose(hg, f.name) if hg is not None else None
                rhs = try_compose(h.name, gf) if gf is not None else None
                if lhs is not None and rhs is not None and lhs != rhs:
                    report.add("associativity", (h.name, g.name, f.name),
                               f"({h.name}∘{g.name})∘{f.name} = {lhs} but "
                               f"{h.name}∘({g.name}∘{f.name}) = {rhs}")
    return report


# -- functors and diagrams -----------------------------------------------


@dataclass(frozen=True)
class FunctorData:
    domain: FinCategory
    codomain: FinCategory
    object_map: Mapping[str, str]
    arrow_map: Mapping[str, str]
    contravariant: bool = False

    def on_object(self, x: str) -> str:
        return self.object_map[x]

    def on_arrow(self, f: str) -> str:
        return self.arrow_map[f]


def validate_functor(fun: FunctorData) -> Report:
    """Identity and composition preservation, with the declared variance."""
    report = Report()
    dom, cod = fun.domain, fun.codomain
    for x in dom.objects:
        if x not in fun.object_map:
            raise StructureError(f"functor undefined on object {x}")
    for a in dom.arrows:
        if a.name not in fun.arrow_map:
            raise StructureError(f"functor undefined on arrow {a.name}")
        img = cod.arrow_by_name[fun.on_arrow(a.name)]
        want_src = fun.on_object(a.target if fun.contravariant else a.source)
        want_tgt = fun.on_object(a.source if fun.contravariant else a.target)
        if img.source != want_src or img.target != want_tgt:
            report.add("typing", (a.name,), f"image of {a.name} has wrong endpoints")
    if not report.ok:
        return report
    for x in dom.objects:
        if fun.on_arrow(dom.id_of(x)) != cod.id_of(fun.on_object(x)):
            report.add("identity", (x,), f"identity of {x} is not preserved")
    for (g, f), h in dom.composition.items():
        if fun.contravariant:
            img = cod.compose(fun.on_arrow(f), fun.on_arrow(g))
        else:
            img = cod.compose(fun.on_arrow(g), fun.on_arrow(f))
        if img != fun.on_arrow(h):
            report.add("composition", (g, f),
                       f"image of composite ({g}, {f}) differs from composite of images")
    return report


# -- arrow classification ------------------------------------------------


def is_epi(cat: FinCategory, f: str) -> bool:
    """Right-cancellable: u∘f = v∘f forces u = v.  Exhaustive."""
    tgt = cat.target(f)
    for w in cat.objects:
        hom = cat.hom(tgt, w)
        for u, v in itertools.combinations(hom, 2):
            if cat.compose(u, f) == cat.compose(v, f):
                return False
    return True


def is_mono(cat: FinCategory, f: str) -> bool:
    """Left-cancellable: f∘u = f∘v forces u = v.  Exhaustive."""
    src = cat.source(f)
    for w in cat.objects:
        hom = cat.hom(w, src)
        for u, v in itertools.combinations(hom, 2):
            if cat.compose(f, u) == cat.compose(f, v):
                return False
    return True


def is_iso(cat: FinCategory, f: str) -> Optional[str]:
    """The two-sided inverse of f, or None."""
    a = cat.arrow_by_name[f]
    for g in cat.hom(a.target, a.source):
        if (cat.compose(g, f) == cat.id_of(a.source)
                and cat.compose(f, g) == cat.id_of(a.target)):
            return g
    return None


def is_epimorphic_family(cat: FinCategory, codomain: str,
                         family: Iterable[str]) -> bool:
    """Joint right-cancellation for a family of arrows into ``codomain``.

    The empty family qualifies exactly when no two distinct parallel
    arrows leave ``codomain`` at all.
    """
    fam = list(family)
    for f in fam:
        if cat.target(f) != codomain:
            raise StructureError(f"{f} is not an arrow into {codomain}")
    for w in cat.objects:
        for u, v in itertools.combinations(cat.hom(codomain, w), 2):
            if all(cat.compose(u, f) == cat.compose(v, f) for f in fam):
                return False
    return True


def generates(cat: FinCategory, gens: Sequence[str]) -> bool:
    """Arrows out of ``gens`` jointly separate every parallel pair."""
    for w1 in cat.objects:
        for w2 in cat.objects:
            for u, v in itertools.combinations(cat.hom(w1, w2), 2):
                separated = False
                for g in gens:
                    for f in cat.hom(g, w1):
                        if cat.compose(u, f) != cat.compose(v, f):
                            separated = True
                            break
                    if separated:
                        break
                if not separated:
                    return False
    return True


# -- limits and colimits by search ---------------------------------------


@dataclass(frozen=True)
class Cone:
    apex: str
    legs: Mapping[str, str]  # shape object -> arrow apex -> D(object)


@dataclass(frozen=True)
class Cocone:
    apex: str
    legs: Mapping[str, str]  # shape object -> arrow D(object) -> apex


def _diagram_nodes(diagram: FunctorData) -> tuple[str, ...]:
    return diagram.domain.objects


def cones_over(cat: FinCategory, diagram: FunctorData, apex: str) -> list[Cone]:
    """All cones from ``apex`` over the diagram, via the enumeration kernel."""
    shape = diagram.domain
    nodes = _diagram_nodes(diagram)
    index = {n: i for i, n in enumerate(nodes)}
    homs = [cat.hom(apex, diagram.on_object(n)) for n in nodes]
    sizes = [len(h) for h in homs]
    positions = [{f: i for i, f in enumerate(h)} for h in homs]
    constraints = []
    for a in shape.arrows:
        if shape.is_identity(a.name):
            continue
        src, tgt = index[a.source], index[a.target]
        img = diagram.on_arrow(a.name)
        table = [positions[tgt][cat.compose(img, leg)] for leg in homs[src]]
        constraints.append((src, tgt, table))
    out = []
    for sol in _kernels.enumerate_assignments(sizes, constraints):
        out.append(Cone(apex, {n: homs[i][sol[i]] for i, n in enumerate(nodes)}))
    return out


def cocones_under(cat: FinCategory, diagram: FunctorData, apex: str) -> list[Cocone]:
    """All cocones into ``apex`` under the diagram."""
    shape = diagram.domain
    nodes = _diagram_nodes(diagram)
    index = {n: i for i, n in enumerate(nodes)}
    homs = [cat.hom(diagram.on_object(n), apex) for n in nodes]
    sizes = [len(h) for h in homs]
    positions = [{f: i for i, f in enumerate(h)} for h in homs]
    constraints = []
    for a in shape.arrows:
        if shape.is_identity(a.name):
            continue
        src, tgt = index[a.source], index[a.target]
        img = diagram.on_arrow(a.name)
        # leg at source = leg at target ∘ D(a): functional in the target leg.
        table = [positions[src][cat.compose(leg, img)] for leg in homs[tgt]]
        constraints.append((tgt, src, table))
    out = []
    for sol in _kernels.enumerate_assignments(sizes, constraints):
        out.append(Cocone(apex, {n: homs[i][sol[i]] for i, n in enumerate(nodes)}))
    return out


def finite_limit(cat: FinCategory, diagram: FunctorData) -> Optional[Cone]:
    """Search for a limiting cone; None when the category has none.

    The first universal cone in declaration order is returned, so the
    choice is deterministic.
    """
    all_cones = {apex: cones_over(cat, diagram, apex) for apex in cat.objects}
    for apex in cat.objects:
        for cone in all_cones[apex]:
            if _is_limiting(cat, cone, all_cones):
                return cone
    return None


def _is_limiting(cat: FinCategory, cone: Cone,
                 all_cones: Mapping[str, list[Cone]]) -> bool:
    for apex2, cones2 in all_cones.items():
        hom = cat.hom(apex2, cone.apex)
        for other in cones2:
            mediating = [
                h for h in hom
                if all(cat.compose(cone.legs[n], h) == other.legs[n]
                       for n in cone.legs)
            ]
            if len(mediating) != 1:
                return False
    return True


def finite_colimit(cat: FinCategory, diagram: FunctorData) -> Optional[Cocone]:
    """Dual search; first universal cocone in declaration order."""
    all_cocones = {apex: cocones_under(cat, diagram, apex) for apex in cat.objects}
    for apex in cat.objects:
        for cocone in all_cocones[apex]:
            if _is_colimiting(cat, cocone, all_cocones):
                return cocone
    return None


def _is_colimiting(cat: FinCategory, cocone: Cocone,
                   all_cocones: Mapping[str, list[Cocone]]) -> bool:
    for apex2, cocones2 in all_cocones.items():
        hom = cat.hom(cocone.apex, apex2)
        for other in cocones2:
            mediating = [
                h for h in hom
                if all(cat.compose(h, cocone.legs[n]) == other.legs[n]
                       for n in cocone.legs)
            ]
            if len(mediating) != 1:
                return False
    return True


def verify_limit(cat: FinCategory, diagram: FunctorData, cone: Cone) -> bool:
    """Universality re-check written independently of the search.

    Candidate cones are produced by brute force over leg tuples (no
    constraint propagation), so agreement with ``finite_limit`` is a
    two-route check rather than a replay.
    """
    shape = diagram.domain
    nodes = _diagram_nodes(diagram)
    for n in nodes:
        leg = cat.arrow_by_name[cone.legs[n]]
        if leg.source != cone.apex or leg.target != diagram.on_object(n):
            return False
    for a in shape.arrows:
        if cat.compose(diagram.on_arrow(a.name), cone.legs[a.source]) != cone.legs[a.target]:
            return False
    for apex2 in cat.objects:
        for legs in itertools.product(*(cat.hom(apex2, diagram.on_object(n)) for n in nodes)):
            candidate = dict(zip(nodes, legs))
            if any(cat.compose(diagram.on_arrow(a.name), candidate[a.source]) != candidate[a.target]
                   for a in shape.arrows):
                continue
            mediating = [
                h for h in cat.hom(apex2, cone.apex)
                if all(cat.compose(cone.legs[n], h) == candidate[n] for n in nodes)
            ]
            if len(mediating) != 1:
                return False
    return True


def verify_colimit(cat: FinCategory, diagram: FunctorData, cocone: Cocone) -> bool:
    """Dual of ``verify_limit``; same independence from the search."""
    shape = diagram.domain
    nodes = _diagram_nodes(diagram)
    for n in nodes:
        leg = cat.arrow_by_name[cocone.legs[n]]
        if leg.source != diagram.on_object(n) or leg.target != cocone.apex:
            return False
    for a in shape.arrows:
        if cat.compose(cocone.legs[a.target], diagram.on_arrow(a.name)) != cocone.legs[a.source]:
            return False
    for apex2 in cat.objects:
        for legs in itertools.product(*(cat.hom(diagram.on_object(n), apex2) for n in nodes)):
            candidate = dict(zip(nodes, legs))
            if any(cat.compose(candidate[a.target], diagram.on_arrow(a.name)) != candidate[a.source]
                   for a in shape.arrows):
                continue
            mediating = [
                h for h in cat.hom(cocone.apex, apex2)
                if all(cat.compose(h, cocone.legs[n]) == candidate[n] for n in nodes)
            ]
            if len(mediating) != 1:
                return False
    return True


# -- common shapes -------------------------------------------------------


def discrete_shape(n: int) -> FinCategory:
    return category([f"n{i}" for i in range(n)])


def parallel_pair_shape() -> FinCategory:
    return category(["n0", "n1"], [("s", "n0", "n1"), ("t", "n0", "n1")])


def cospan_shape() -> FinCategory:
    return category(["nl", "nr", "nc"], [("l", "nl", "nc"), ("r", "nr", "nc")])


def diagram(shape: FinCategory, cat: FinCategory,
            objects: Mapping[str, str], arrows: Mapping[str, str]) -> FunctorData:
    arrow_map = dict(arrows)
    for n in shape.objects:
        arrow_map.setdefault(shape.id_of(n), cat.id_of(objects[n]))
    fun = FunctorData(shape, cat, dict(objects), arrow_map)
    rep = validate_functor(fun)
    if not rep.ok:
        raise StructureError(f"not a diagram: {rep.summary()}")
    return fun


def pullback(cat: FinCategory, f: str, g: str) -> Optional[tuple[str, str, str]]:
    """Pullback of the cospan (f, g): returns (object, to source(f), to source(g))."""
    if cat.target(f) != cat.target(g):
        raise StructureError("pullback needs a cospan: targets differ")
    shape = cospan_shape()
    d = diagram(shape, cat,
                {"nl": cat.source(f), "nr": cat.source(g), "nc": cat.target(f)},
                {"l": f, "r": g})
    cone = finite_limit(cat, d)
    if cone is None:
        return None
    return cone.apex, cone.legs["nl"], cone.legs["nr"]


def kernel_pair(cat: FinCategory, f: str) -> Optional[tuple[str, str, str]]:
    return pullback(cat, f, f)


def coequalizer(cat: FinCategory, u: str, v: str) -> Optional[tuple[str, str]]:
    """Coequalizer of a parallel pair: returns (object, quotient arrow)."""
    if cat.source(u) != cat.source(v) or cat.target(u) != cat.target(v):
        raise StructureError("coequalizer needs a parallel pair")
    shape = parallel_pair_shape()
    d = diagram(shape, cat,
                {"n0": cat.source(u), "n1": cat.target(u)},
                {"s": u, "t": v})
    cocone = finite_colimit(cat, d)
    if cocone is None:
        return None
    return cocone.apex, cocone.legs["n1"]


def coproduct(cat: FinCategory, x: str, y: str) -> Optional[tuple[str, str, str]]:
    """Binary coproduct: returns (object, injection from x, injection from y)."""
    shape = discrete_shape(2)
    d = diagram(shape, cat, {"n0": x, "n1": y}, {})
    cocone = finite_colimit(cat, d)
    if cocone is None:
        return None
    return cocone.apex, cocone.legs["n0"], cocone.legs["n1"]


def product(cat: FinCategory, x: str, y: str) -> Optional[tuple[str, str, str]]:
    shape = discrete_shape(2)
    d = diagram(shape, cat, {"n0": x, "n1": y}, {})
    cone = finite_limit(cat, d)
    if cone is None:
        return None
    return cone.apex, cone.legs["n0"], cone.legs["n1"]


def initial_object(cat: FinCategory) -> Optional[str]:
    shape = discrete_shape(0)
    d = diagram(shape, cat, {}, {})
    cocone = finite_colimit(cat, d)
    return None if cocone is None else cocone.apex


def terminal_object(cat: FinCategory) -> Optional[str]:
    shape = discrete_shape(0)
    d = diagram(shape, cat, {}, {})
    cone = finite_limit(cat, d)
    return None if cone is None else cone.apex


# -- subcategories -------------------------------------------------------


def full_subcategory(cat: FinCategory, objects: Sequence[str]) -> tuple[FinCategory, FunctorData]:
    """Full subcategory on ``objects`` plus its inclusion functor."""
    kept = set(objects)
    for obj in objects:
        if obj not in set(cat.objects):
            raise StructureError(f"unknown object {obj}")
    arrows = tuple(a for a in cat.arrows if a.source in kept and a.target in kept)
    identity = {x: cat.id_of(x) for x in objects}
    names = {a.name for a in arrows}
    comp = {
        (g, f): h for (g, f), h in cat.composition.items()
        if g in names and f in names
    }
    sub = FinCategory(tuple(objects), arrows, identity, comp)
    inclusion = FunctorData(sub, cat, {x: x for x in objects},
                            {a.name: a.name for a in arrows})
    return sub, inclusion
