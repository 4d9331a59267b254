"""Bounded materializations of functor categories as finite categories.

Infinite categories (all presheaves on a base, all modules over a ring)
are represented here by finite full subcategories: every object up to a
size bound, every arrow between them, with an explicit composition table.
Checks that quantify over "all objects" then run over the materialized
slice, and reports must label the bound.

For module-valued presheaves the hom-sets carry module structure; the
materialization records it as an explicit arrow/element bijection per
hom-set and verifies that composition is bilinear against it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Optional, Sequence, Union

from .category import FinCategory, category
from .diagnostics import OperationCancelled, StructureError
from .modules import (Element, FinModule, FinRing, HomModule, ModuleHom,
                      direct_sum_many, hom_make, hom_module, identity_hom,
                      kernel, module_make, ring_make, solve_hom)
from .presheaf import (ModPresheaf, Presheaf, PresheafMorphism, SetPresheaf,
                       compose_morphisms, identity_morphism, mod_presheaf,
                       nat_transformations, presheaf_morphism, set_presheaf)

CancelCheck = Optional[Callable[[], bool]]

# full bilinearity verification is quadratic in hom-set sizes; above this
# many pairs the check falls back to module generators
BILINEAR_PAIR_CAP = 4096


def _tick(cancel: CancelCheck) -> None:
    if cancel is not None and cancel():
        raise OperationCancelled("materialization cancelled")


# -- enumerating presheaves ---------------------------------------------------


def all_set_presheaves(base: FinCategory, max_size: int,
                       cancel: CancelCheck = None) -> list[SetPresheaf]:
    """Every set-valued presheaf on ``base`` with values of at most
    ``max_size`` elements, in a fixed enumeration order.

    Value sets are canonical: ``x0, x1, ...`` at every object.
    """
    non_id = [a for a in base.arrows if not base.is_identity(a.name)]
    out: list[SetPresheaf] = []
    for sizes in itertools.product(range(max_size + 1), repeat=len(base.objects)):
        _tick(cancel)
        size_of = dict(zip(base.objects, sizes))
        values = {obj: tuple(f"x{k}" for k in range(size_of[obj]))
                  for obj in base.objects}
        pools = []
        feasible = True
        for a in non_id:
            src, tgt = values[a.source], values[a.target]
            if tgt and not src:
                feasible = False
                break
            pools.append([dict(zip(tgt, pick))
                          for pick in itertools.product(src, repeat=len(tgt))])
        if not feasible:
            continue
        for combo in itertools.product(*pools):
            _tick(cancel)
            rests = {a.name: m for a, m in zip(non_id, combo)}
            if _set_restrictions_functorial(base, values, rests):
                out.append(set_presheaf(base, values, rests))
    return out


def _set_restrictions_functorial(base: FinCategory, values, rests) -> bool:
    def of(name: str):
        if base.is_identity(name):
            return {x: x for x in values[base.source(name)]}
        return rests[name]

    for g in base.arrows:
        for f in base.arrows:
            if f.target != g.source:
                continue
            h = base.compose(g.name, f.name)
            rg, rf, rh = of(g.name), of(f.name), of(h)
            # contravariance: value(target g) -> value(source f)
            if any(rf[rg[x]] != rh[x] for x in values[g.target]):
                return False
    return True


def small_modules(ring: Union[int, Sequence[int], FinRing],
                  max_size: int) -> list[FinModule]:
    """Every module over the ring with at most ``max_size`` elements, one
    per isomorphism class, smallest first."""
    r = ring_make(ring)
    # prime-power cyclic pieces give exactly one member per isomorphism
    # class (over Z/6 both Z/6 and Z/2 x Z/3 would otherwise appear)
    pieces = []
    for c, m in enumerate(r.moduli):
        pieces.extend((c, d) for d in range(2, m + 1)
                      if m % d == 0 and _is_prime_power(d))
    found = [module_make(r, ())]
    for count in range(1, max_size.bit_length() + 1):
        for combo in itertools.combinations_with_replacement(pieces, count):
            size = 1
            for _, d in combo:
                size *= d
            if 1 < size <= max_size:
                found.append(module_make(r, list(combo)))
    found.sort(key=lambda m: (m.size, m.orders, m.components))
    return found


def _is_prime_power(d: int) -> bool:
    p = 2
    while p * p <= d:
        if d % p == 0:
            while d % p == 0:
                d //= p
            return d == 1
        p += 1
    return d > 1


def all_mod_presheaves(base: FinCategory, ring, max_size: int,
                       cancel: CancelCheck = None) -> list[ModPresheaf]:
    """Every module-valued presheaf on ``base`` with values of at most
    ``max_size`` elements, values drawn from ``small_modules``."""
    r = ring_make(ring)
    mods = small_modules(r, max_size)
    non_id = [a for a in base.arrows if not base.is_identity(a.name)]
    out: list[ModPresheaf] = []
    for pick in itertools.product(mods, repeat=len(base.objects)):
        _tick(cancel)
        values = dict(zip(base.objects, pick))
        pools = [list(hom_module(values[a.target], values[a.source]).all_homs())
                 for a in non_id]
        for combo in itertools.product(*pools):
            _tick(cancel)
            rests = {a.name: h for a, h in zip(non_id, combo)}
            if _mod_restrictions_functorial(base, values, rests):
                out.append(mod_presheaf(base, r, values, rests))
    return out


def _mod_restrictions_functorial(base: FinCategory, values, rests) -> bool:
    def of(name: str) -> ModuleHom:
        if base.is_identity(name):
            return identity_hom(values[base.source(name)])
        return rests[name]

    for g in base.arrows:
        for f in base.arrows:
            if f.target != g.source:
                continue
            h = base.compose(g.name, f.name)
            if of(f.name).compose(of(g.name)) != of(h):
                return False
    return True


# -- modules of natural transformations ---------------------------------------


@dataclass(frozen=True)
class NatModule:
    """The module of natural transformations between module presheaves.

    Elements live in the kernel of the naturality difference map inside
    the sum of the per-object hom modules.
    """

    source: ModPresheaf
    target: ModPresheaf
    module: FinModule
    inclusion: ModuleHom
    blocks: tuple[HomModule, ...]
    offsets: tuple[int, ...]

    def to_morphism(self, elt: Element) -> PresheafMorphism:
        vec = self.inclusion.apply(elt)
        comps = {}
        for obj, hm, start in zip(self.source.base.objects, self.blocks,
                                  self.offsets):
            comps[obj] = hm.to_hom(vec[start:start + hm.module.rank])
        return presheaf_morphism(self.source, self.target, comps, check=False)

    def from_morphism(self, m: PresheafMorphism) -> Element:
        vec: list[int] = []
        for obj, hm in zip(self.source.base.objects, self.blocks):
            vec.extend(hm.from_hom(m.at(obj)))
        out = solve_hom(self.inclusion, tuple(vec))
        if out is None:
            raise StructureError("morphism is not natural")
        return out

    def morphisms(self) -> Iterator[PresheafMorphism]:
        for elt in self.module.elements():
            yield self.to_morphism(elt)


def nat_module(p: ModPresheaf, q: ModPresheaf) -> NatModule:
    """Present Nat(p, q) as a finite module via the naturality kernel."""
    if p.base is not q.base:
        raise StructureError("presheaves live on different bases")
    if p.ring != q.ring:
        raise StructureError("presheaves live over different rings")
    base = p.base
    blocks = tuple(hom_module(p.value(obj), q.value(obj)) for obj in base.objects)
    block_of = dict(zip(base.objects, blocks))
    total, _, projs = direct_sum_many([hm.module for hm in blocks])
    proj_of = dict(zip(base.objects, projs))
    offsets = []
    pos = 0
    for hm in blocks:
        offsets.append(pos)
        pos += hm.module.rank
    rows: list[ModuleHom] = []
    for a in base.arrows:
        if base.is_identity(a.name):
            continue
        # naturality along a: A -> B, as maps p(B) -> q(A)
        ha, hb = block_of[a.source], block_of[a.target]
        mixed = hom_module(p.value(a.target), q.value(a.source))
        left = _linear_on_homs(ha, mixed, lambda h, a=a: h.compose(p.restriction(a.name)))
        right = _linear_on_homs(hb, mixed, lambda h, a=a: q.restriction(a.name).compose(h))
        rows.append(left.compose(proj_of[a.source])
                    .sub(right.compose(proj_of[a.target])))
    if not rows:
        return NatModule(p, q, total, identity_hom(total), blocks, tuple(offsets))
    _, rinjs, _ = direct_sum_many([r.codomain for r in rows])
    diff = rinjs[0].compose(rows[0])
    for inj, row in zip(rinjs[1:], rows[1:]):
        diff = diff.add(inj.compose(row))
    ker, incl = kernel(diff)
    return NatModule(p, q, ker, incl, blocks, tuple(offsets))


def _linear_on_homs(src: HomModule, dst: HomModule,
                    act: Callable[[ModuleHom], ModuleHom]) -> ModuleHom:
    """Matrix of an operation on homs that is linear in the hom."""
    cols = []
    for jdx in range(src.module.rank):
        gen = tuple(1 if i == jdx else 0 for i in range(src.module.rank))
        cols.append(dst.from_hom(act(src.to_hom(gen))))
    matrix = [[cols[jcol][i] for jcol in range(len(cols))]
              for i in range(dst.module.rank)]
    return hom_make(src.module, dst.module, matrix)


# -- materialized categories --------------------------------------------------


@dataclass(frozen=True)
class EnrichedHom:
    """Module structure on one hom-set of a materialized category."""
    module: FinModule
    element_of: Mapping[str, Element]
    arrow_of: Mapping[Element, str]


@dataclass(frozen=True)
class MaterializedCategory:
    """A finite category whose objects name presheaves or modules.

    ``things`` maps object names to the modeled objects; ``maps`` sends
    every arrow name (identities included) to the modeled morphism.  For
    module-valued targets ``enrichment`` carries the hom-set module
    structure, keyed by (source, target) object names.
    """

    category: FinCategory
    kind: str  # "set-presheaf" | "mod-presheaf" | "module"
    things: Mapping[str, object]
    maps: Mapping[str, object]
    ring: Optional[FinRing]
    enrichment: Optional[Mapping[tuple[str, str], EnrichedHom]]
    bound: int

    def object_name(self, thing) -> str:
        for name, have in self.things.items():
            if have == thing:
                return name
        raise StructureError("object is not materialized")

    def arrow_name(self, m) -> str:
        for name, have in self.maps.items():
            if have == m:
                return name
        raise StructureError("morphism is not materialized")

    def hom_structure(self, x: str, y: str) -> EnrichedHom:
        if self.enrichment is None:
            raise StructureError("category carries no hom-module structure")
        return self.enrichment[(x, y)]

    def find_isomorphic(self, thing) -> Optional[str]:
        """Name of a materialized object isomorphic to the given presheaf
        or module, or None."""
        from .modules import modules_isomorphic
        from .presheaf import is_natural_iso
        for name, have in self.things.items():
            if self.kind == "module":
                if modules_isomorphic(thing, have) is not None:
                    return name
            else:
                if have == thing or any(is_natural_iso(t) for t in
                                        nat_transformations(thing, have)):
                    return name
        return None


def _set_component_key(comp: Mapping) -> tuple:
    return tuple(sorted(comp.items()))


def _morphism_key(m: PresheafMorphism) -> tuple:
    parts = []
    for obj in m.source.base.objects:
        c = m.at(obj)
        parts.append(c.matrix if isinstance(c, ModuleHom) else _set_component_key(c))
    return tuple(parts)


def materialize_presheaf_category(presheaves: Sequence[Presheaf],
                                  bound: int = 0,
                                  cancel: CancelCheck = None) -> MaterializedCategory:
    """Assemble the given presheaves and every natural transformation
    between them into a finite category.

    Module flavor also computes the hom-set module structure and checks
    it against the enumerated arrows and bilinearity of composition.
    """
    if not presheaves:
        raise StructureError("nothing to materialize")
    flavor = presheaves[0].flavor
    base = presheaves[0].base
    for p in presheaves:
        if p.base is not base or p.flavor != flavor:
            raise StructureError("presheaves must share base and flavor")
    names = [f"P{i}" for i in range(len(presheaves))]
    thing_of = dict(zip(names, presheaves))
    arrow_rows: list[tuple[str, str, str]] = []
    maps: dict[str, PresheafMorphism] = {}
    by_key: dict[tuple[str, str, tuple], str] = {}
    counter = 0
    for i, pi in enumerate(presheaves):
        for j, pj in enumerate(presheaves):
            _tick(cancel)
            for t in nat_transformations(pi, pj):
                key = (names[i], names[j], _morphism_key(t))
                if i == j and t == identity_morphism(pi):
                    by_key[key] = f"id_{names[i]}"
                    continue
                name = f"t{counter}"
                counter += 1
                arrow_rows.append((name, names[i], names[j]))
                maps[name] = t
                by_key[key] = name
    compose: dict[tuple[str, str], str] = {}
    for gname, gsrc, gtgt in arrow_rows:
        for fname, fsrc, ftgt in arrow_rows:
            if ftgt != gsrc:
                continue
            _tick(cancel)
            h = compose_morphisms(maps[gname], maps[fname])
            compose[(gname, fname)] = by_key[(fsrc, gtgt, _morphism_key(h))]
    cat = category(names, arrow_rows, compose)
    for i, name in enumerate(names):
        maps[cat.id_of(name)] = identity_morphism(presheaves[i])
    enrichment = None
    ring = None
    if flavor == "mod":
        ring = presheaves[0].ring
        enrichment = {}
        for i, pi in enumerate(presheaves):
            for j, pj in enumerate(presheaves):
                _tick(cancel)
                nm = nat_module(pi, pj)
                hom_names = cat.hom(names[i], names[j])
                if nm.module.size != len(hom_names):
                    raise StructureError(
                        f"hom-module of ({names[i]}, {names[j]}) has "
                        f"{nm.module.size} elements but {len(hom_names)} "
                        f"transformations were enumerated")
                element_of = {}
                arrow_of = {}
                for elt in nm.module.elements():
                    t = nm.to_morphism(elt)
                    arrow = by_key[(names[i], names[j], _morphism_key(t))]
                    element_of[arrow] = elt
                    arrow_of[elt] = arrow
                enrichment[(names[i], names[j])] = EnrichedHom(
                    nm.module, element_of, arrow_of)
        _check_bilinearity(cat, enrichment, cancel)
    return MaterializedCategory(cat, f"{flavor}-presheaf", thing_of, maps,
                                ring, enrichment, bound)


def materialize_module_category(ring, max_size: int,
                                cancel: CancelCheck = None) -> MaterializedCategory:
    """The category of modules over the ring with at most ``max_size``
    elements: one object per isomorphism class, all homomorphisms."""
    r = ring_make(ring)
    mods = small_modules(r, max_size)
    names = [f"M{i}" for i in range(len(mods))]
    thing_of = dict(zip(names, mods))
    arrow_rows: list[tuple[str, str, str]] = []
    maps: dict[str, ModuleHom] = {}
    by_key: dict[tuple[str, str, tuple], str] = {}
    counter = 0
    homs = {}
    for i, mi in enumerate(mods):
        for j, mj in enumerate(mods):
            _tick(cancel)
            homs[(i, j)] = hom_module(mi, mj)
            for h in homs[(i, j)].all_homs():
                key = (names[i], names[j], h.matrix)
                if i == j and h == identity_hom(mi):
                    by_key[key] = f"id_{names[i]}"
                    continue
                name = f"h{counter}"
                counter += 1
                arrow_rows.append((name, names[i], names[j]))
                maps[name] = h
                by_key[key] = name
    compose: dict[tuple[str, str], str] = {}
    for gname, gsrc, gtgt in arrow_rows:
        for fname, fsrc, ftgt in arrow_rows:
            if ftgt != gsrc:
                continue
            comp = maps[gname].compose(maps[fname])
            compose[(gname, fname)] = by_key[(fsrc, gtgt, comp.matrix)]
    cat = category(names, arrow_rows, compose)
    for i, name in enumerate(names):
        maps[cat.id_of(name)] = identity_hom(mods[i])
    enrichment = {}
    for i in range(len(mods)):
        for j in range(len(mods)):
            hm = homs[(i, j)]
            element_of = {}
            arrow_of = {}
            for elt in hm.module.elements():
                h = hm.to_hom(elt)
                arrow = by_key[(names[i], names[j], h.matrix)]
                element_of[arrow] = elt
                arrow_of[elt] = arrow
            enrichment[(names[i], names[j])] = EnrichedHom(
                hm.module, element_of, arrow_of)
    _check_bilinearity(cat, enrichment, cancel)
    return MaterializedCategory(cat, "module", thing_of, maps, r,
                                enrichment, max_size)


def _check_bilinearity(cat: FinCategory,
                       enrichment: Mapping[tuple[str, str], EnrichedHom],
                       cancel: CancelCheck) -> None:
    """Composition must be additive in each argument for the declared
    hom-module structures."""
    for x in cat.objects:
        for y in cat.objects:
            exy = enrichment[(x, y)]
            for z in cat.objects:
                _tick(cancel)
                eyz = enrichment[(y, z)]
                exz = enrichment[(x, z)]
                if exy.module.size * eyz.module.size <= BILINEAR_PAIR_CAP:
                    lefts = list(exy.module.elements())
                else:
                    lefts = _generators(exy.module)
                rights = list(eyz.module.elements()) \
                    if eyz.module.size * len(lefts) <= BILINEAR_PAIR_CAP \
                    else _generators(eyz.module)
                for g in rights:
                    gname = eyz.arrow_of[g]
                    for f1 in lefts:
                        for f2 in lefts:
                            fsum = exy.module.add(f1, f2)
                            lhs = exz.element_of[
                                cat.compose(gname, exy.arrow_of[fsum])]
                            rhs = exz.module.add(
                                exz.element_of[cat.compose(gname, exy.arrow_of[f1])],
                                exz.element_of[cat.compose(gname, exy.arrow_of[f2])])
                            if lhs != rhs:
                                raise StructureError(
                                    f"composition is not additive on "
                                    f"hom({x},{y}) x hom({y},{z})")
                for f in _generators(exy.module):
                    fname = exy.arrow_of[f]
                    for g1 in rights:
                        for g2 in rights:
                            gsum = eyz.module.add(g1, g2)
                            lhs = exz.element_of[
                                cat.compose(eyz.arrow_of[gsum], fname)]
                            rhs = exz.module.add(
                                exz.element_of[cat.compose(eyz.arrow_of[g1], fname)],
                                exz.element_of[cat.compose(eyz.arrow_of[g2], fname)])
                            if lhs != rhs:
                                raise StructureError(
                                    f"composition is not additive on "
                                    f"hom({y},{z}) x hom({x},{y})")


def _generators(m: FinModule) -> list[Element]:
    gens = []
    for jdx in range(m.rank):
        gens.append(tuple(1 if i == jdx else 0 for i in range(m.rank)))
    return gens
