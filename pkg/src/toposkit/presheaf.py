"""Presheaves on a finite category, valued in finite sets or finite modules.

A presheaf assigns a value to every object and a restriction map to every
arrow, contravariantly: for an arrow f: A -> B the restriction acts
value(B) -> value(A).  Functor laws are checked by ``validate_presheaf``
rather than at construction time, so law-breaking candidates can be built
and then diagnosed.

Set-valued presheaves store tuples of hashable element ids; module-valued
presheaves assign a ``FinModule`` to each object and a ``ModuleHom`` to
each arrow, all over one fixed finite ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional, Sequence, Union

from . import _kernels
from .category import FinCategory, FunctorData, category
from .diagnostics import Report, StructureError
from .modules import (Element, FinModule, FinRing, ModDiagram, ModuleHom,
                      cokernel, direct_sum_hom, direct_sum_many, hom_make,
                      hom_module, identity_hom, invert, is_isomorphism,
                      mod_colimit, mod_limit, module_make, ring_make,
                      solve_hom, zero_hom, zero_module)


# -- presheaf data -------------------------------------------------------


@dataclass(frozen=True)
class SetPresheaf:
    base: FinCategory
    values: Mapping[str, tuple]
    restrictions: Mapping[str, Mapping]

    flavor = "set"

    def value(self, obj: str) -> tuple:
        return self.values[obj]

    def restriction(self, f: str) -> Mapping:
        return self.restrictions[f]

    def restrict(self, f: str, x: Hashable) -> Hashable:
        return self.restrictions[f][x]


@dataclass(frozen=True)
class ModPresheaf:
    base: FinCategory
    ring: FinRing
    values: Mapping[str, FinModule]
    restrictions: Mapping[str, ModuleHom]

    flavor = "mod"

    def value(self, obj: str) -> FinModule:
        return self.values[obj]

    def restriction(self, f: str) -> ModuleHom:
        return self.restrictions[f]

    def restrict(self, f: str, x: Element) -> Element:
        return self.restrictions[f].apply(x)


Presheaf = Union[SetPresheaf, ModPresheaf]


def set_presheaf(base: FinCategory,
                 values: Mapping[str, Sequence[Hashable]],
                 restrictions: Mapping[str, Mapping]) -> SetPresheaf:
    """Build a set-valued presheaf; identity restrictions are filled in.

    Each restriction must be a total map from the value at the arrow's
    target into the value at its source.  Functor laws are not enforced
    here; run ``validate_presheaf`` for those.
    """
    vals: dict[str, tuple] = {}
    for obj in base.objects:
        if obj not in values:
            raise StructureError(f"no value set for object {obj}")
        elems = tuple(values[obj])
        if len(set(elems)) != len(elems):
            raise StructureError(f"duplicate elements in value at {obj}")
        vals[obj] = elems
    rests: dict[str, Mapping] = {}
    for a in base.arrows:
        if a.name in restrictions:
            m = dict(restrictions[a.name])
        elif base.is_identity(a.name):
            m = {x: x for x in vals[a.source]}
        else:
            raise StructureError(f"no restriction along {a.name}")
        if set(m) != set(vals[a.target]):
            raise StructureError(f"restriction along {a.name} is not total")
        for x, y in m.items():
            if y not in vals[a.source]:
                raise StructureError(
                    f"restriction along {a.name} maps {x} outside value({a.source})")
        rests[a.name] = m
    return SetPresheaf(base, vals, rests)


def mod_presheaf(base: FinCategory,
                 ring: Union[int, Sequence[int], FinRing],
                 values: Mapping[str, FinModule],
                 restrictions: Mapping[str, ModuleHom]) -> ModPresheaf:
    """Build a module-valued presheaf; identity restrictions are filled in."""
    ring = ring_make(ring)
    vals: dict[str, FinModule] = {}
    for obj in base.objects:
        if obj not in values:
            raise StructureError(f"no value module for object {obj}")
        if values[obj].ring != ring:
            raise StructureError(f"value at {obj} lives over a different ring")
        vals[obj] = values[obj]
    rests: dict[str, ModuleHom] = {}
    for a in base.arrows:
        if a.name in restrictions:
            h = restrictions[a.name]
        elif base.is_identity(a.name):
            h = identity_hom(vals[a.source])
        else:
            raise StructureError(f"no restriction along {a.name}")
        if h.domain != vals[a.target] or h.codomain != vals[a.source]:
            raise StructureError(f"restriction along {a.name} has wrong endpoints")
        rests[a.name] = h
    return ModPresheaf(base, ring, vals, rests)


def constant_presheaf(base: FinCategory, elements: Sequence[Hashable]) -> SetPresheaf:
    elems = tuple(elements)
    return set_presheaf(base, {obj: elems for obj in base.objects},
                        {a.name: {x: x for x in elems} for a in base.arrows})


def terminal_presheaf(base: FinCategory) -> SetPresheaf:
    return constant_presheaf(base, ("*",))


def zero_presheaf(base: FinCategory,
                  ring: Union[int, Sequence[int], FinRing]) -> ModPresheaf:
    ring = ring_make(ring)
    z = zero_module(ring)
    return mod_presheaf(base, ring, {obj: z for obj in base.objects},
                        {a.name: zero_hom(z, z) for a in base.arrows})


def validate_presheaf(p: Presheaf) -> Report:
    """Check contravariant functor laws; every violation carries witnesses."""
    report = Report()
    base = p.base
    for obj in base.objects:
        ident = base.id_of(obj)
        if p.flavor == "set":
            broken = any(p.restrict(ident, x) != x for x in p.value(obj))
        else:
            broken = p.restriction(ident) != identity_hom(p.value(obj))
        if broken:
            report.add("identity", (ident,),
                       f"restriction along {ident} is not the identity")
    for (g, f), h in base.composition.items():
        # contravariance: the composite g.f restricts as (along g) then (along f)
        if p.flavor == "set":
            tgt = base.target(g)
            ok = all(p.restrict(h, x) == p.restrict(f, p.restrict(g, x))
                     for x in p.value(tgt))
        else:
            ok = p.restriction(h) == p.restriction(f).compose(p.restriction(g))
        if not ok:
            report.add("composition", (g, f),
                       f"restriction along composite of ({g}, {f}) "
                       f"differs from the composite of restrictions")
    return report


# -- morphisms -----------------------------------------------------------


@dataclass(frozen=True)
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: Mapping[str, Union[Mapping, ModuleHom]]

    def at(self, obj: str) -> Union[Mapping, ModuleHom]:
        return self.components[obj]

    def apply(self, obj: str, x):
        comp = self.components[obj]
        return comp.apply(x) if isinstance(comp, ModuleHom) else comp[x]


def _require_same_base(p: Presheaf, q: Presheaf) -> None:
    if p.base is not q.base and p.base != q.base:
        raise StructureError("presheaves live on different base categories")
    if p.flavor != q.flavor:
        raise StructureError("presheaves have different value flavors")
    if p.flavor == "mod" and p.ring != q.ring:
        raise StructureError("presheaves live over different rings")


def presheaf_morphism(source: Presheaf, target: Presheaf,
                      components: Mapping[str, Union[Mapping, ModuleHom]],
                      check: bool = True) -> PresheafMorphism:
    """Build a morphism of presheaves; naturality is verified unless ``check``
    is disabled by enumeration code that has already established it."""
    _require_same_base(source, target)
    base = source.base
    comps: dict[str, Union[Mapping, ModuleHom]] = {}
    for obj in base.objects:
        if obj not in components:
            raise StructureError(f"morphism has no component at {obj}")
        comp = components[obj]
        if source.flavor == "set":
            comp = dict(comp)
            if set(comp) != set(source.value(obj)):
                raise StructureError(f"component at {obj} is not total")
            for x, y in comp.items():
                if y not in set(target.value(obj)):
                    raise StructureError(
                        f"component at {obj} maps {x} outside the target value")
        else:
            if not isinstance(comp, ModuleHom):
                raise StructureError(f"component at {obj} is not a ModuleHom")
            if comp.domain != source.value(obj) or comp.codomain != target.value(obj):
                raise StructureError(f"component at {obj} has wrong endpoints")
        comps[obj] = comp
    phi = PresheafMorphism(source, target, comps)
    if check:
        for a in base.arrows:
            if base.is_identity(a.name):
                continue
            if not _square_commutes(phi, a.name, a.source, a.target):
                raise StructureError(
                    f"naturality fails along {a.name}")
    return phi


def _square_commutes(phi: PresheafMorphism, f: str, src: str, tgt: str) -> bool:
    p, q = phi.source, phi.target
    if p.flavor == "set":
        return all(phi.apply(src, p.restrict(f, x)) == q.restrict(f, phi.apply(tgt, x))
                   for x in p.value(tgt))
    left = phi.at(src).compose(p.restriction(f))
    right = q.restriction(f).compose(phi.at(tgt))
    return left == right


def identity_morphism(p: Presheaf) -> PresheafMorphism:
    if p.flavor == "set":
        comps = {obj: {x: x for x in p.value(obj)} for obj in p.base.objects}
    else:
        comps = {obj: identity_hom(p.value(obj)) for obj in p.base.objects}
    return presheaf_morphism(p, p, comps, check=False)


def compose_morphisms(second: PresheafMorphism,
                      first: PresheafMorphism) -> PresheafMorphism:
    """second after first."""
    if first.target != second.source:
        raise StructureError("morphisms are not composable")
    comps: dict[str, Union[Mapping, ModuleHom]] = {}
    for obj in first.source.base.objects:
        if first.source.flavor == "set":
            comps[obj] = {x: second.at(obj)[first.at(obj)[x]]
                          for x in first.source.value(obj)}
        else:
            comps[obj] = second.at(obj).compose(first.at(obj))
    return presheaf_morphism(first.source, second.target, comps, check=False)


def zero_morphism(p: ModPresheaf, q: ModPresheaf) -> PresheafMorphism:
    _require_same_base(p, q)
    comps = {obj: zero_hom(p.value(obj), q.value(obj)) for obj in p.base.objects}
    return presheaf_morphism(p, q, comps, check=False)


def is_natural_iso(phi: PresheafMorphism) -> bool:
    for obj in phi.source.base.objects:
        comp = phi.at(obj)
        if isinstance(comp, ModuleHom):
            if not is_isomorphism(comp):
                return False
        else:
            if len(set(comp.values())) != len(comp) or \
                    len(comp) != len(phi.target.value(obj)):
                return False
    return True


def invert_morphism(phi: PresheafMorphism) -> PresheafMorphism:
    if not is_natural_iso(phi):
        raise StructureError("morphism is not an isomorphism")
    comps: dict[str, Union[Mapping, ModuleHom]] = {}
    for obj in phi.source.base.objects:
        comp = phi.at(obj)
        if isinstance(comp, ModuleHom):
            comps[obj] = invert(comp)
        else:
            comps[obj] = {y: x for x, y in comp.items()}
    return presheaf_morphism(phi.target, phi.source, comps, check=False)


# -- free modules on finite sets ------------------------------------------


def free_module(ring: Union[int, Sequence[int], FinRing], count: int) -> FinModule:
    """The free module on ``count`` generators: one coordinate per generator
    and ring component, laid out generator-major."""
    ring = ring_make(ring)
    orders = [(c, m) for _ in range(count) for c, m in enumerate(ring.moduli)]
    return module_make(ring, orders)


def free_unit(ring: FinRing, count: int, index: int) -> Element:
    """The ``index``-th generator of ``free_module(ring, count)``."""
    k = len(ring.moduli)
    vec = [0] * (count * k)
    for c in range(k):
        vec[index * k + c] = 1
    return tuple(vec)


def free_into(ring: FinRing, count: int, codomain: FinModule,
              images: Sequence[Element]) -> ModuleHom:
    """The hom out of a free module sending generator ``b`` to ``images[b]``."""
    domain = free_module(ring, count)
    k = len(ring.moduli)
    cols: list[Element] = []
    for b in range(count):
        for c in range(k):
            unit = tuple(1 if j == c else 0 for j in range(k))
            cols.append(codomain.scale(unit, images[b]))
    matrix = [[cols[j][i] for j in range(len(cols))]
              for i in range(codomain.rank)]
    return hom_make(domain, codomain, matrix)


def free_basis_hom(ring: FinRing, dom_count: int, cod_count: int,
                   images: Sequence[int]) -> ModuleHom:
    """Linear extension of a map of generating sets, by generator index."""
    cod = free_module(ring, cod_count)
    return free_into(ring, dom_count, cod,
                     [free_unit(ring, cod_count, i) for i in images])


# -- Yoneda objects -------------------------------------------------------


def yoneda_set(cat: FinCategory, c: str) -> SetPresheaf:
    """The presheaf of arrows into ``c``; restrictions precompose."""
    if c not in cat.objects:
        raise StructureError(f"unknown object {c}")
    values = {x: cat.hom(x, c) for x in cat.objects}
    rests = {}
    for a in cat.arrows:
        rests[a.name] = {g: cat.compose(g, a.name) for g in values[a.target]}
    return set_presheaf(cat, values, rests)


def yoneda_mod(cat: FinCategory, ring: Union[int, Sequence[int], FinRing],
               c: str) -> ModPresheaf:
    """The free module presheaf on arrows into ``c``.

    value(X) is free on the set of arrows X -> c, in hom-table order, and
    restrictions extend precomposition linearly.
    """
    if c not in cat.objects:
        raise StructureError(f"unknown object {c}")
    ring = ring_make(ring)
    values = {x: free_module(ring, len(cat.hom(x, c))) for x in cat.objects}
    rests = {}
    for a in cat.arrows:
        dom_basis = cat.hom(a.target, c)
        cod_basis = cat.hom(a.source, c)
        images = [cod_basis.index(cat.compose(g, a.name)) for g in dom_basis]
        rests[a.name] = free_basis_hom(ring, len(dom_basis), len(cod_basis), images)
    return mod_presheaf(cat, ring, values, rests)


def yoneda_postcompose(cat: FinCategory, u: str,
                       flavor: str = "set",
                       ring: Optional[FinRing] = None) -> PresheafMorphism:
    """The morphism of Yoneda presheaves induced by postcomposition with u."""
    src, tgt = cat.source(u), cat.target(u)
    if flavor == "set":
        p, q = yoneda_set(cat, src), yoneda_set(cat, tgt)
        comps = {x: {g: cat.compose(u, g) for g in p.value(x)}
                 for x in cat.objects}
        return presheaf_morphism(p, q, comps)
    p, q = yoneda_mod(cat, ring, src), yoneda_mod(cat, ring, tgt)
    comps = {}
    for x in cat.objects:
        dom_basis = cat.hom(x, src)
        cod_basis = cat.hom(x, tgt)
        images = [cod_basis.index(cat.compose(u, g)) for g in dom_basis]
        comps[x] = free_basis_hom(ring, len(dom_basis), len(cod_basis), images)
    return presheaf_morphism(p, q, comps)


def yoneda_classify(f: Presheaf, c: str, p) -> PresheafMorphism:
    """The morphism out of the Yoneda presheaf at ``c`` picking out ``p``.

    Sends an arrow g: X -> c to the restriction of ``p`` along g; this is
    one half of the Yoneda bijection.
    """
    if f.flavor == "set":
        y = yoneda_set(f.base, c)
        comps = {x: {g: f.restrict(g, p) for g in y.value(x)}
                 for x in f.base.objects}
        return presheaf_morphism(y, f, comps)
    y = yoneda_mod(f.base, f.ring, c)
    comps = {}
    for x in f.base.objects:
        basis = f.base.hom(x, c)
        comps[x] = free_into(f.ring, len(basis), f.value(x),
                             [f.restrict(g, p) for g in basis])
    return presheaf_morphism(y, f, comps)


def yoneda_element(phi: PresheafMorphism, c: str):
    """The other half of the Yoneda bijection: evaluate at the identity."""
    cat = phi.source.base
    ident = cat.id_of(c)
    if phi.source.flavor == "set":
        return phi.apply(c, ident)
    basis = cat.hom(c, c)
    ring = phi.source.ring
    return phi.at(c).apply(free_unit(ring, len(basis), basis.index(ident)))


# -- natural transformation enumeration -----------------------------------


def nat_transformations(p: Presheaf, q: Presheaf) -> list[PresheafMorphism]:
    """Every natural transformation p => q, in deterministic order.

    Components are enumerated object by object in declaration order and
    pruned by the naturality squares; the result order is lexicographic in
    the componentwise value choices.
    """
    _require_same_base(p, q)
    if p.flavor == "set":
        return _nat_transformations_set(p, q)
    return _nat_transformations_mod(p, q)


def _nat_transformations_set(p: SetPresheaf, q: SetPresheaf) -> list[PresheafMorphism]:
    base = p.base
    variables: list[tuple[str, Hashable]] = []
    var_index: dict[tuple[str, Hashable], int] = {}
    for obj in base.objects:
        for x in p.value(obj):
            var_index[(obj, x)] = len(variables)
            variables.append((obj, x))
    sizes = [len(q.value(obj)) for obj, _ in variables]
    q_index = {obj: {y: i for i, y in enumerate(q.value(obj))}
               for obj in base.objects}
    constraints = []
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        table = tuple(q_index[a.source][q.restrict(a.name, y)]
                      for y in q.value(a.target))
        for x in p.value(a.target):
            xr = p.restrict(a.name, x)
            constraints.append((var_index[(a.target, x)],
                                var_index[(a.source, xr)], table))
    out = []
    for sol in _kernels.enumerate_assignments(sizes, constraints):
        comps: dict[str, dict] = {obj: {} for obj in base.objects}
        for (obj, x), v in zip(variables, sol):
            comps[obj][x] = q.value(obj)[v]
        out.append(presheaf_morphism(p, q, comps, check=False))
    return out


def _nat_transformations_mod(p: ModPresheaf, q: ModPresheaf) -> list[PresheafMorphism]:
    base = p.base
    objs = list(base.objects)
    pos = {obj: i for i, obj in enumerate(objs)}
    hom_mods = [hom_module(p.value(obj), q.value(obj)) for obj in objs]
    choices = [[hm.to_hom(e) for e in hm.module.elements()] for hm in hom_mods]
    # naturality squares checked as soon as both endpoints are assigned
    checks: list[list[tuple[str, str, str]]] = [[] for _ in objs]
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        k = max(pos[a.source], pos[a.target])
        checks[k].append((a.name, a.source, a.target))
    out: list[PresheafMorphism] = []
    assignment: list[ModuleHom] = []

    def consistent(k: int) -> bool:
        for f, src, tgt in checks[k]:
            left = assignment[pos[src]].compose(p.restriction(f))
            right = q.restriction(f).compose(assignment[pos[tgt]])
            if left != right:
                return False
        return True

    def descend(k: int) -> None:
        if k == len(objs):
            comps = {obj: assignment[i] for i, obj in enumerate(objs)}
            out.append(presheaf_morphism(p, q, comps, check=False))
            return
        for hom in choices[k]:
            assignment.append(hom)
            if consistent(k):
                descend(k + 1)
            assignment.pop()

    descend(0)
    return out


# -- category of elements --------------------------------------------------


@dataclass(frozen=True)
class ElementCategory:
    category: FinCategory
    projection: FunctorData
    node_of: Mapping[tuple[str, Hashable], str]
    element_of: Mapping[str, tuple[str, Hashable]]
    arrow_base: Mapping[str, str]


def _element_label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(str(v) for v in x) + ")"
    return str(x)


def _presheaf_elements(p: Presheaf, obj: str) -> list:
    if p.flavor == "set":
        return list(p.value(obj))
    return list(p.value(obj).elements())


def category_of_elements(p: Presheaf) -> ElementCategory:
    """Pairs (object, element) with an arrow per base arrow matching the
    restriction; module-valued presheaves contribute every element, zero
    included.  Assumes the presheaf passes ``validate_presheaf``.
    """
    base = p.base
    node_of: dict[tuple[str, Hashable], str] = {}
    element_of: dict[str, tuple[str, Hashable]] = {}
    for obj in base.objects:
        for x in _presheaf_elements(p, obj):
            name = f"{obj}:{_element_label(x)}"
            node_of[(obj, x)] = name
            element_of[name] = (obj, x)
    arrows: list[tuple[str, str, str]] = []
    arrow_base: dict[str, str] = {}
    arrow_key: dict[tuple[str, Hashable], str] = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        for x in _presheaf_elements(p, a.target):
            xr = p.restrict(a.name, x)
            name = f"{a.name}@{_element_label(x)}"
            arrows.append((name, node_of[(a.source, xr)], node_of[(a.target, x)]))
            arrow_base[name] = a.name
            arrow_key[(a.name, x)] = name
    compose_table: dict[tuple[str, str], str] = {}
    for n2, s2, t2 in arrows:
        for n1, s1, t1 in arrows:
            if t1 != s2:
                continue
            u = base.compose(arrow_base[n2], arrow_base[n1])
            tgt_obj, tgt_el = element_of[t2]
            if base.is_identity(u):
                compose_table[(n2, n1)] = f"id_{t2}"
            else:
                compose_table[(n2, n1)] = arrow_key[(u, tgt_el)]
    ecat = category(list(element_of), arrows, compose_table)
    object_map = {name: element_of[name][0] for name in element_of}
    arrow_map = dict(arrow_base)
    for name in element_of:
        arrow_map[ecat.id_of(name)] = base.id_of(element_of[name][0])
    projection = FunctorData(ecat, base, object_map, arrow_map)
    return ElementCategory(ecat, projection, node_of, element_of, arrow_base)


# -- diagrams of presheaves and pointwise (co)limits -----------------------


@dataclass(frozen=True)
class PresheafDiagram:
    shape: FinCategory
    nodes: Mapping[str, Presheaf]
    edges: Mapping[str, PresheafMorphism]

    def __post_init__(self) -> None:
        for obj in self.shape.objects:
            if obj not in self.nodes:
                raise StructureError(f"diagram has no node at {obj}")
        nodes = list(self.nodes.values())
        for other in nodes[1:]:
            _require_same_base(nodes[0], other)
        edges = dict(self.edges)
        for a in self.shape.arrows:
            if self.shape.is_identity(a.name):
                edges.setdefault(a.name, identity_morphism(self.nodes[a.source]))
            elif a.name not in edges:
                raise StructureError(f"diagram has no edge along {a.name}")
            e = edges[a.name]
            if e.source != self.nodes[a.source] or e.target != self.nodes[a.target]:
                raise StructureError(f"edge along {a.name} has wrong endpoints")
        object.__setattr__(self, "edges", edges)
        for (g, f), h in self.shape.composition.items():
            if edges[h] != compose_morphisms(edges[g], edges[f]):
                raise StructureError(f"diagram does not respect composite ({g}, {f})")

    def on_edge(self, name: str) -> PresheafMorphism:
        return self.edges[name]

    @property
    def base(self) -> FinCategory:
        return next(iter(self.nodes.values())).base

    @property
    def flavor(self) -> str:
        return next(iter(self.nodes.values())).flavor


@dataclass(frozen=True)
class PresheafLimit:
    presheaf: Presheaf
    legs: Mapping[str, PresheafMorphism]


@dataclass(frozen=True)
class PresheafColimit:
    presheaf: Presheaf
    legs: Mapping[str, PresheafMorphism]


def _diagram_edges(shape: FinCategory) -> list:
    return [a for a in shape.arrows if not shape.is_identity(a.name)]


def pointwise_limit(diag: PresheafDiagram) -> PresheafLimit:
    """Objectwise limit with induced restrictions; functor laws re-verified."""
    if diag.flavor == "set":
        return _pointwise_limit_set(diag)
    return _pointwise_limit_mod(diag)


def _check_laws(p: Presheaf) -> Presheaf:
    report = validate_presheaf(p)
    if not report.ok:
        raise StructureError(f"induced presheaf breaks functor laws: {report.summary()}")
    return p


def _pointwise_limit_set(diag: PresheafDiagram) -> PresheafLimit:
    base = diag.base
    node_names = list(diag.shape.objects)
    idx = {n: i for i, n in enumerate(node_names)}
    edges = _diagram_edges(diag.shape)

    def tuples_at(obj: str) -> list[tuple]:
        out = []
        for t in itertools.product(*[diag.nodes[n].value(obj) for n in node_names]):
            if all(diag.on_edge(a.name).apply(obj, t[idx[a.source]]) == t[idx[a.target]]
                   for a in edges):
                out.append(t)
        return out

    values = {obj: tuples_at(obj) for obj in base.objects}
    rests: dict[str, dict] = {}
    for a in base.arrows:
        m = {}
        for t in values[a.target]:
            rt = tuple(diag.nodes[n].restrict(a.name, t[idx[n]]) for n in node_names)
            m[t] = rt
        rests[a.name] = m
    lim = _check_laws(set_presheaf(base, values, rests))
    legs = {}
    for n in node_names:
        comps = {obj: {t: t[idx[n]] for t in values[obj]} for obj in base.objects}
        legs[n] = presheaf_morphism(lim, diag.nodes[n], comps)
    return PresheafLimit(lim, legs)


def _object_mod_diagram(diag: PresheafDiagram, obj: str) -> ModDiagram:
    return ModDiagram(diag.shape,
                      {n: diag.nodes[n].value(obj) for n in diag.shape.objects},
                      {a.name: diag.on_edge(a.name).at(obj)
                       for a in _diagram_edges(diag.shape)})


def _pointwise_limit_mod(diag: PresheafDiagram) -> PresheafLimit:
    base = diag.base
    ring = next(iter(diag.nodes.values())).ring
    node_names = list(diag.shape.objects)
    lims = {obj: mod_limit(_object_mod_diagram(diag, obj)) for obj in base.objects}
    rests: dict[str, ModuleHom] = {}
    for a in base.arrows:
        src_l, tgt_l = lims[a.source], lims[a.target]
        block = direct_sum_hom([diag.nodes[n].restriction(a.name) for n in node_names])
        cols = []
        for j in range(tgt_l.module.rank):
            gen = tuple(1 if i == j else 0 for i in range(tgt_l.module.rank))
            y = block.apply(tgt_l.inclusion.apply(gen))
            x = solve_hom(src_l.inclusion, y)
            if x is None:
                raise StructureError(f"limit restriction along {a.name} does not factor")
            cols.append(x)
        matrix = [[cols[j][i] for j in range(len(cols))]
                  for i in range(src_l.module.rank)]
        rests[a.name] = hom_make(tgt_l.module, src_l.module, matrix)
    lim = _check_laws(mod_presheaf(base, ring,
                                   {obj: lims[obj].module for obj in base.objects},
                                   rests))
    legs = {}
    for n in node_names:
        comps = {obj: lims[obj].legs[n] for obj in base.objects}
        legs[n] = presheaf_morphism(lim, diag.nodes[n], comps)
    return PresheafLimit(lim, legs)


def pointwise_colimit(diag: PresheafDiagram) -> PresheafColimit:
    """Objectwise colimit with induced restrictions.

    Set values are glued as connected components of the element relation
    over the disjoint union; module values go through the quotient of the
    coordinate sum.
    """
    if diag.flavor == "set":
        return _pointwise_colimit_set(diag)
    return _pointwise_colimit_mod(diag)


class _UnionFind:
    def __init__(self, keys):
        self.parent = {k: k for k in keys}

    def find(self, k):
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _pointwise_colimit_set(diag: PresheafDiagram) -> PresheafColimit:
    base = diag.base
    node_names = list(diag.shape.objects)
    edges = _diagram_edges(diag.shape)
    class_of: dict[str, dict[tuple[str, Hashable], str]] = {}
    values: dict[str, list[str]] = {}
    members: dict[str, dict[str, list[tuple[str, Hashable]]]] = {}
    for obj in base.objects:
        keys = [(n, x) for n in node_names for x in diag.nodes[n].value(obj)]
        uf = _UnionFind(keys)
        for a in edges:
            e = diag.on_edge(a.name)
            for x in diag.nodes[a.source].value(obj):
                uf.union((a.source, x), (a.target, e.apply(obj, x)))
        names: dict[tuple[str, Hashable], str] = {}
        order: list[str] = []
        mem: dict[str, list[tuple[str, Hashable]]] = {}
        for k in keys:
            root = uf.find(k)
            if root not in names:
                names[root] = f"q{len(order)}"
                order.append(names[root])
                mem[names[root]] = []
            mem[names[root]].append(k)
        class_of[obj] = {k: names[uf.find(k)] for k in keys}
        values[obj] = order
        members[obj] = mem
    rests: dict[str, dict] = {}
    for a in base.arrows:
        m = {}
        for cls in values[a.target]:
            images = {class_of[a.source][(n, diag.nodes[n].restrict(a.name, x))]
                      for n, x in members[a.target][cls]}
            if len(images) != 1:
                raise StructureError(
                    f"colimit restriction along {a.name} is not well defined")
            m[cls] = images.pop()
        rests[a.name] = m
    colim = _check_laws(set_presheaf(base, values, rests))
    legs = {}
    for n in node_names:
        comps = {obj: {x: class_of[obj][(n, x)] for x in diag.nodes[n].value(obj)}
                 for obj in base.objects}
        legs[n] = presheaf_morphism(diag.nodes[n], colim, comps)
    return PresheafColimit(colim, legs)


def _pointwise_colimit_mod(diag: PresheafDiagram) -> PresheafColimit:
    base = diag.base
    ring = next(iter(diag.nodes.values())).ring
    node_names = list(diag.shape.objects)
    colims = {obj: mod_colimit(_object_mod_diagram(diag, obj)) for obj in base.objects}
    rests: dict[str, ModuleHom] = {}
    for a in base.arrows:
        src_c, tgt_c = colims[a.source], colims[a.target]
        block = direct_sum_hom([diag.nodes[n].restriction(a.name) for n in node_names])
        cols = []
        for j in range(tgt_c.module.rank):
            gen = tuple(1 if i == j else 0 for i in range(tgt_c.module.rank))
            y = solve_hom(tgt_c.surjection, gen)
            if y is None:
                raise StructureError("colimit surjection failed to lift a generator")
            cols.append(src_c.surjection.apply(block.apply(y)))
        matrix = [[cols[j][i] for j in range(len(cols))]
                  for i in range(src_c.module.rank)]
        rests[a.name] = hom_make(tgt_c.module, src_c.module, matrix)
    colim = _check_laws(mod_presheaf(base, ring,
                                     {obj: colims[obj].module for obj in base.objects},
                                     rests))
    legs = {}
    for n in node_names:
        comps = {obj: colims[obj].legs[n] for obj in base.objects}
        legs[n] = presheaf_morphism(diag.nodes[n], colim, comps)
    return PresheafColimit(colim, legs)


# -- every presheaf is a colimit of Yoneda objects -------------------------


@dataclass(frozen=True)
class RepresentableColimit:
    presheaf: Presheaf
    comparison: PresheafMorphism
    legs: Mapping[str, PresheafMorphism]
    elements: ElementCategory


def colimit_of_representables(f: Presheaf) -> RepresentableColimit:
    """Glue Yoneda presheaves over the category of elements of ``f``.

    The set-valued flavor takes the ordinary colimit.  The module-valued
    flavor takes the colimit in the module-enriched sense: cocone legs are
    required to depend additively (and scalar-compatibly) on the element
    index, which adds linearity identifications beyond the arrow-induced
    ones.  In both flavors the canonical comparison morphism into ``f``
    is returned; it is an isomorphism.
    """
    if f.flavor == "set":
        return _colimit_of_representables_set(f)
    return _colimit_of_representables_mod(f)


def _colimit_of_representables_set(f: SetPresheaf) -> RepresentableColimit:
    base = f.base
    elems = category_of_elements(f)
    shape = elems.category
    nodes = {}
    yoneda_cache: dict[str, SetPresheaf] = {}
    for name, (obj, _) in elems.element_of.items():
        if obj not in yoneda_cache:
            yoneda_cache[obj] = yoneda_set(base, obj)
        nodes[name] = yoneda_cache[obj]
    edges = {}
    for aname, u in elems.arrow_base.items():
        src_obj = elems.element_of[shape.source(aname)][0]
        tgt_obj = elems.element_of[shape.target(aname)][0]
        comps = {x: {g: base.compose(u, g) for g in yoneda_cache[src_obj].value(x)}
                 for x in base.objects}
        edges[aname] = presheaf_morphism(yoneda_cache[src_obj],
                                         yoneda_cache[tgt_obj], comps)
    colim = pointwise_colimit(PresheafDiagram(shape, nodes, edges))
    comps: dict[str, dict] = {}
    for x in base.objects:
        m: dict = {}
        for name, (obj, p) in elems.element_of.items():
            leg = colim.legs[name]
            for g in yoneda_cache[obj].value(x):
                cls = leg.apply(x, g)
                val = f.restrict(g, p)
                if cls in m and m[cls] != val:
                    raise StructureError("comparison to the glued colimit is not "
                                         "well defined")
                m[cls] = val
        comps[x] = m
    comparison = presheaf_morphism(colim.presheaf, f, comps)
    return RepresentableColimit(colim.presheaf, comparison, colim.legs, elems)


def _scalar_hom(m: FinModule, r: Element) -> ModuleHom:
    matrix = [[r[m.components[i]] if i == j else 0 for j in range(m.rank)]
              for i in range(m.rank)]
    return hom_make(m, m, matrix)


def _colimit_of_representables_mod(f: ModPresheaf) -> RepresentableColimit:
    base = f.base
    ring = f.ring
    elems = category_of_elements(f)
    shape = elems.category
    node_names = list(shape.objects)
    yoneda_cache = {obj: yoneda_mod(base, ring, obj) for obj in base.objects}
    node_obj = {name: elems.element_of[name][0] for name in node_names}
    node_el = {name: elems.element_of[name][1] for name in node_names}

    idempotents = [tuple(1 if j == c else 0 for j in range(len(ring.moduli)))
                   for c in range(len(ring.moduli))]
    surjs: dict[str, ModuleHom] = {}
    injs_at: dict[str, dict[str, ModuleHom]] = {}
    values: dict[str, FinModule] = {}
    for x in base.objects:
        big, injs, _ = direct_sum_many([yoneda_cache[node_obj[n]].value(x)
                                        for n in node_names])
        inj_of = dict(zip(node_names, injs))
        relations: list[ModuleHom] = []
        for aname, u in elems.arrow_base.items():
            src_n, tgt_n = shape.source(aname), shape.target(aname)
            post = _yoneda_post_component(base, ring, u, x)
            relations.append(inj_of[tgt_n].compose(post).sub(inj_of[src_n]))
        for n in node_names:
            obj, p = node_obj[n], node_el[n]
            mod = f.value(obj)
            for q in mod.elements():
                s = mod.add(p, q)
                n_q = elems.node_of[(obj, q)]
                n_s = elems.node_of[(obj, s)]
                relations.append(inj_of[n_s].sub(inj_of[n]).sub(inj_of[n_q]))
            if len(ring.moduli) > 1:
                for e_c in idempotents:
                    t = mod.scale(e_c, p)
                    n_t = elems.node_of[(obj, t)]
                    scal = _scalar_hom(yoneda_cache[obj].value(x), e_c)
                    relations.append(inj_of[n_t].sub(inj_of[n].compose(scal)))
        if relations:
            _, _, projs = direct_sum_many([r.domain for r in relations])
            total = relations[0].compose(projs[0])
            for rel, proj in zip(relations[1:], projs[1:]):
                total = total.add(rel.compose(proj))
            quot, surj = cokernel(total)
        else:
            quot, surj = big, identity_hom(big)
        values[x] = quot
        surjs[x] = surj
        injs_at[x] = inj_of
    rests: dict[str, ModuleHom] = {}
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        blocks = [yoneda_cache[node_obj[n]].restriction(a.name) for n in node_names]
        block = direct_sum_hom(blocks)
        cols = []
        for j in range(values[a.target].rank):
            gen = tuple(1 if i == j else 0 for i in range(values[a.target].rank))
            y = solve_hom(surjs[a.target], gen)
            if y is None:
                raise StructureError("colimit surjection failed to lift a generator")
            cols.append(surjs[a.source].apply(block.apply(y)))
        matrix = [[cols[j][i] for j in range(len(cols))]
                  for i in range(values[a.source].rank)]
        rests[a.name] = hom_make(values[a.target], values[a.source], matrix)
    colim = _check_laws(mod_presheaf(base, ring, values, rests))
    legs = {}
    for n in node_names:
        comps = {x: surjs[x].compose(injs_at[x][n]) for x in base.objects}
        legs[n] = presheaf_morphism(yoneda_cache[node_obj[n]], colim, comps)
    comps = {}
    for x in base.objects:
        evals = {n: free_into(ring, len(base.hom(x, node_obj[n])), f.value(x),
                              [f.restrict(g, node_el[n])
                               for g in base.hom(x, node_obj[n])])
                 for n in node_names}
        offsets = {}
        pos = 0
        for n in node_names:
            offsets[n] = pos
            pos += injs_at[x][n].domain.rank
        cols = []
        for j in range(values[x].rank):
            gen = tuple(1 if i == j else 0 for i in range(values[x].rank))
            y = solve_hom(surjs[x], gen)
            if y is None:
                raise StructureError("colimit surjection failed to lift a generator")
            total = f.value(x).zero()
            for n in node_names:
                start = offsets[n]
                part = tuple(y[start:start + injs_at[x][n].domain.rank])
                total = f.value(x).add(total, evals[n].apply(part))
            cols.append(total)
        matrix = [[cols[j][i] for j in range(len(cols))]
                  for i in range(f.value(x).rank)]
        comps[x] = hom_make(values[x], f.value(x), matrix)
    comparison = presheaf_morphism(colim, f, comps)
    return RepresentableColimit(colim, comparison, legs, elems)


def _yoneda_post_component(base: FinCategory, ring: FinRing, u: str,
                           x: str) -> ModuleHom:
    """Component at ``x`` of postcomposition with ``u`` on Yoneda presheaves."""
    dom_basis = base.hom(x, base.source(u))
    cod_basis = base.hom(x, base.target(u))
    images = [cod_basis.index(base.compose(u, g)) for g in dom_basis]
    return free_basis_hom(ring, len(dom_basis), len(cod_basis), images)
