"""Matching families, sheaf conditions, and sheafification by double plus.

A matching family for a sieve S on C assigns to every arrow f in S an
element of the value at its source, compatibly with precomposition.  A
presheaf is a sheaf for a topology when every matching family for every
covering sieve has exactly one amalgamation, and separated when it has at
most one.

The plus-construction evaluates match(min_cover(C), F): the covering
sieves of C form a finite filtered poset under reverse inclusion whose
top refinement is the intersection of all covers, so the colimit of
match(-) collapses to its value there.  Every call cross-validates that
shortcut against the general glued-classes construction and fails loudly
on disagreement rather than trusting the optimization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional, Sequence, Union

from . import _kernels
from .category import FinCategory, pullback
from .diagnostics import StructureError
from .modules import (Element, FinModule, ModuleHom, cokernel,
                      direct_sum_many, hom_make, identity_hom, is_injective,
                      is_isomorphism, kernel, solve_hom)
from .presheaf import (ModPresheaf, Presheaf, PresheafMorphism, SetPresheaf,
                       compose_morphisms, mod_presheaf, nat_transformations,
                       presheaf_morphism, set_presheaf, validate_presheaf)
from .topology import GrothendieckTopology, Sieve, min_cover, sieve_key

# above this many elements in the relevant modules, sheaf checks switch
# from elementwise scanning to the linear criterion
ELEMENTWISE_LIMIT = 64


# -- matching families ------------------------------------------------------


@dataclass(frozen=True)
class MatchingFamily:
    sieve: Sieve
    assignment: Mapping[str, Hashable]

    def __getitem__(self, arrow: str):
        return self.assignment[arrow]


def _sieve_order(cat: FinCategory, s: Sieve) -> list[str]:
    # declaration order of the category, for reproducible enumeration
    return [f for f in cat.arrows_into[s.codomain] if f in s.arrows]


def family_label(fam: MatchingFamily) -> str:
    parts = []
    for f in sorted(fam.assignment):
        x = fam.assignment[f]
        shown = "(" + ",".join(str(v) for v in x) + ")" if isinstance(x, tuple) else str(x)
        parts.append(f"{f}:{shown}")
    return "{" + ",".join(parts) + "}"


def is_matching(p: Presheaf, fam: MatchingFamily) -> bool:
    cat = p.base
    for f in fam.sieve.arrows:
        for g in cat.arrows_into[cat.source(f)]:
            h = cat.compose(f, g)
            if fam.assignment[h] != p.restrict(g, fam.assignment[f]):
                return False
    return True


def _match_set(p: SetPresheaf, s: Sieve) -> list[MatchingFamily]:
    cat = p.base
    order = _sieve_order(cat, s)
    index = {f: i for i, f in enumerate(order)}
    sizes = [len(p.value(cat.source(f))) for f in order]
    val_index = {}
    for f in order:
        src = cat.source(f)
        if src not in val_index:
            val_index[src] = {x: i for i, x in enumerate(p.value(src))}
    constraints = []
    for f in order:
        src = cat.source(f)
        for g in cat.arrows_into[src]:
            h = cat.compose(f, g)
            table = tuple(val_index[cat.source(g)][p.restrict(g, x)]
                          for x in p.value(src))
            constraints.append((index[f], index[h], table))
    out = []
    for sol in _kernels.enumerate_assignments(sizes, constraints):
        assignment = {f: p.value(cat.source(f))[v] for f, v in zip(order, sol)}
        out.append(MatchingFamily(s, assignment))
    return out


@dataclass(frozen=True)
class MatchingModule:
    """The module of matching families for one sieve on a module presheaf.

    ``module`` presents the families; ``inclusion`` embeds them into the
    coordinate sum of the values at the arrow sources, ordered by ``order``.
    """
    sieve: Sieve
    order: tuple[str, ...]
    module: FinModule
    inclusion: ModuleHom
    offsets: Mapping[str, int]
    blocks: Mapping[str, FinModule]

    def to_family(self, elt: Element) -> MatchingFamily:
        vec = self.inclusion.apply(elt)
        assignment = {}
        for f in self.order:
            start = self.offsets[f]
            assignment[f] = tuple(vec[start:start + self.blocks[f].rank])
        return MatchingFamily(self.sieve, assignment)

    def from_family(self, fam: MatchingFamily) -> Element:
        vec: list[int] = []
        for f in self.order:
            vec.extend(fam.assignment[f])
        out = solve_hom(self.inclusion, tuple(vec))
        if out is None:
            raise StructureError("family is not matching")
        return out

    def families(self):
        for elt in self.module.elements():
            yield self.to_family(elt)


def _match_mod(p: ModPresheaf, s: Sieve) -> MatchingModule:
    cat = p.base
    order = tuple(_sieve_order(cat, s))
    blocks = {f: p.value(cat.source(f)) for f in order}
    total, _, projs = direct_sum_many([blocks[f] for f in order], ring=p.ring)
    proj_of = dict(zip(order, projs))
    offsets = {}
    pos = 0
    for f in order:
        offsets[f] = pos
        pos += blocks[f].rank
    rows = []
    for f in order:
        src = cat.source(f)
        for g in cat.arrows_into[src]:
            h = cat.compose(f, g)
            rows.append(proj_of[h].sub(p.restriction(g).compose(proj_of[f])))
    if not rows:
        return MatchingModule(s, order, total, identity_hom(total), offsets, blocks)
    _, rinjs, _ = direct_sum_many([r.codomain for r in rows])
    diff = rinjs[0].compose(rows[0])
    for inj, row in zip(rinjs[1:], rows[1:]):
        diff = diff.add(inj.compose(row))
    ker, incl = kernel(diff)
    return MatchingModule(s, order, ker, incl, offsets, blocks)


def matching_families(p: Presheaf, s: Sieve):
    """Set flavor: the exhaustive list of families.  Mod flavor: the module
    of families, presented as a kernel of the compatibility difference map."""
    if s.codomain not in p.base.objects:
        raise StructureError(f"unknown object {s.codomain}")
    if p.flavor == "set":
        return _match_set(p, s)
    return _match_mod(p, s)


def matching_families_elementwise(p: Presheaf, s: Sieve) -> list[MatchingFamily]:
    """Brute-force enumeration over raw assignments; the oracle twin of
    ``matching_families`` for small instances."""
    cat = p.base
    order = _sieve_order(cat, s)
    pools = []
    for f in order:
        src = cat.source(f)
        pools.append(list(p.value(src)) if p.flavor == "set"
                     else list(p.value(src).elements()))
    out = []
    for combo in itertools.product(*pools):
        fam = MatchingFamily(s, dict(zip(order, combo)))
        if is_matching(p, fam):
            out.append(fam)
    return out


def amalgamations(p: Presheaf, s: Sieve, fam: MatchingFamily) -> list:
    """All elements of the value at the codomain restricting to the family."""
    elems = (p.value(s.codomain) if p.flavor == "set"
             else p.value(s.codomain).elements())
    out = []
    for x in elems:
        if all(p.restrict(f, x) == fam.assignment[f] for f in s.arrows):
            out.append(x)
    return out


# -- sheaf and separatedness checks ------------------------------------------


@dataclass(frozen=True)
class SheafCheck:
    ok: bool
    witness: Optional[tuple[str, Sieve, MatchingFamily]]
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def _zero_family(p: ModPresheaf, s: Sieve) -> MatchingFamily:
    cat = p.base
    return MatchingFamily(s, {f: p.value(cat.source(f)).zero()
                              for f in s.arrows})


def _canonical_to_match(p: ModPresheaf, c: str, mm: MatchingModule) -> ModuleHom:
    """The linear map x |-> (x·f)_f from the value at c into the match module."""
    val = p.value(c)
    cols = []
    for jdx in range(val.rank):
        gen = tuple(1 if i == jdx else 0 for i in range(val.rank))
        fam = MatchingFamily(mm.sieve, {f: p.restrict(f, gen)
                                        for f in mm.sieve.arrows})
        cols.append(mm.from_family(fam))
    matrix = [[cols[jcol][i] for jcol in range(len(cols))]
              for i in range(mm.module.rank)]
    return hom_make(val, mm.module, matrix)


def _mod_check_linear(p: ModPresheaf, c: str, s: Sieve, mm: MatchingModule,
                      want_exactly_one: bool) -> Optional[SheafCheck]:
    """Sheaf condition at one sieve by rank arithmetic: exactly one
    amalgamation for every family means the canonical map is invertible."""
    can = _canonical_to_match(p, c, mm)
    if not is_injective(can):
        return SheafCheck(False, (c, s, _zero_family(p, s)),
                          f"family at {c} has at least 2 amalgamations")
    if want_exactly_one and not is_isomorphism(can):
        for elt in mm.module.elements():
            if solve_hom(can, elt) is None:
                return SheafCheck(False, (c, s, mm.to_family(elt)),
                                  f"family at {c} has 0 amalgamations")
        raise StructureError("canonical map is not surjective yet every "
                             "family lifted; module arithmetic is broken")
    return None


def _scan_amalgamations(p: Presheaf, j: GrothendieckTopology,
                        want_exactly_one: bool) -> SheafCheck:
    for c in p.base.objects:
        for s in sorted(j.at(c), key=sieve_key):
            if p.flavor == "mod":
                mm = _match_mod(p, s)
                if max(p.value(c).size, mm.module.size) > ELEMENTWISE_LIMIT:
                    bad = _mod_check_linear(p, c, s, mm, want_exactly_one)
                    if bad is not None:
                        return bad
                    continue
                fams = list(mm.families())
            else:
                fams = _match_set(p, s)
            for fam in fams:
                n = len(amalgamations(p, s, fam))
                if want_exactly_one and n != 1:
                    return SheafCheck(False, (c, s, fam),
                                      f"family at {c} has {n} amalgamations")
                if not want_exactly_one and n > 1:
                    return SheafCheck(False, (c, s, fam),
                                      f"family at {c} has {n} amalgamations")
    return SheafCheck(True, None, "")


def is_sheaf(p: Presheaf, j: GrothendieckTopology) -> SheafCheck:
    """Exactly one amalgamation per matching family per covering sieve.

    Counterexamples come smallest-sieve-first, in declaration order.
    """
    return _scan_amalgamations(p, j, want_exactly_one=True)


def is_separated(p: Presheaf, j: GrothendieckTopology) -> SheafCheck:
    """At most one amalgamation per matching family per covering sieve."""
    return _scan_amalgamations(p, j, want_exactly_one=False)


def is_sheaf_basis(p: Presheaf, j: GrothendieckTopology) -> SheafCheck:
    """The pairwise-pullback form of the sheaf condition.

    Treats each covering sieve as a bare family: an assignment of elements
    x_f is compatible when for every pair (f, g) the two restrictions to a
    pullback of (f, g) agree.  Needs those pullbacks to exist in the base;
    raises when one is missing.  On sites with pullbacks this agrees with
    ``is_sheaf``.
    """
    cat = p.base
    for c in p.base.objects:
        for s in sorted(j.at(c), key=sieve_key):
            order = _sieve_order(cat, s)
            pb: dict[tuple[str, str], tuple[str, str, str]] = {}
            for f, g in itertools.product(order, order):
                got = pullback(cat, f, g)
                if got is None:
                    raise StructureError(f"no pullback of ({f}, {g}); the "
                                         f"pairwise form does not apply")
                pb[(f, g)] = got
            pools = [list(p.value(cat.source(f))) if p.flavor == "set"
                     else list(p.value(cat.source(f)).elements())
                     for f in order]
            for combo in itertools.product(*pools):
                xs = dict(zip(order, combo))
                compatible = True
                for f, g in itertools.product(order, order):
                    _, to_f, to_g = pb[(f, g)]
                    if p.restrict(to_f, xs[f]) != p.restrict(to_g, xs[g]):
                        compatible = False
                        break
                if not compatible:
                    continue
                fam = MatchingFamily(s, xs)
                n = len([x for x in (p.value(c) if p.flavor == "set"
                                     else p.value(c).elements())
                         if all(p.restrict(f, x) == xs[f] for f in order)])
                if n != 1:
                    return SheafCheck(False, (c, s, fam),
                                      f"pairwise-compatible family at {c} "
                                      f"has {n} amalgamations")
    return SheafCheck(True, None, "")


# -- the plus-construction ----------------------------------------------------


@dataclass(frozen=True)
class PlusResult:
    presheaf: Presheaf
    unit: PresheafMorphism
    min_covers: Mapping[str, Sieve]


def _restrict_family(p: Presheaf, fam: MatchingFamily, target: Sieve) -> MatchingFamily:
    if not target.arrows <= fam.sieve.arrows:
        raise StructureError("can only restrict a family to a smaller sieve")
    return MatchingFamily(target, {f: fam.assignment[f] for f in target.arrows})


def _pull_family(p: Presheaf, fam: MatchingFamily, u: str,
                 target: Sieve) -> MatchingFamily:
    """The family (x·u) on a sieve contained in the pullback of fam's sieve."""
    cat = p.base
    assignment = {}
    for g in target.arrows:
        h = cat.compose(u, g)
        if h not in fam.sieve.arrows:
            raise StructureError(f"{target.codomain} sieve does not pull back "
                                 f"into the family's sieve along {u}")
        assignment[g] = fam.assignment[h]
    return MatchingFamily(target, assignment)


def _cross_validate_plus_set(p: SetPresheaf, j: GrothendieckTopology, c: str,
                             s0: Sieve, canonical: list[MatchingFamily]) -> None:
    covers = sorted(j.at(c), key=sieve_key)
    entries: list[tuple[Sieve, MatchingFamily]] = []
    for s in covers:
        for fam in _match_set(p, s):
            entries.append((s, fam))
    parent = list(range(len(entries)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, (si, fi) in enumerate(entries):
        for k in range(i + 1, len(entries)):
            sk, fk = entries[k]
            common = Sieve(c, si.arrows & sk.arrows)
            if not j.covering(common):
                raise StructureError("intersection of covers fails to cover; "
                                     "topology is not saturated")
            if _restrict_family(p, fi, common) == _restrict_family(p, fk, common):
                ri, rk = find(i), find(k)
                if ri != rk:
                    parent[ri] = rk
    classes: dict[int, list[int]] = {}
    for i in range(len(entries)):
        classes.setdefault(find(i), []).append(i)
    if len(classes) != len(canonical):
        raise StructureError("plus-construction cross-validation failed: "
                             f"{len(classes)} glued classes vs "
                             f"{len(canonical)} refined families at {c}")
    canon_index = {family_label(f): n for n, f in enumerate(canonical)}
    for members in classes.values():
        reps = {canon_index[family_label(_restrict_family(p, entries[i][1], s0))]
                for i in members}
        if len(reps) != 1:
            raise StructureError("plus-construction cross-validation failed: "
                                 f"a glued class is inconsistent at {c}")


def _mod_restriction_hom(p: ModPresheaf, big: MatchingModule,
                         small: MatchingModule) -> ModuleHom:
    cols = []
    for jdx in range(big.module.rank):
        gen = tuple(1 if i == jdx else 0 for i in range(big.module.rank))
        fam = big.to_family(gen)
        cols.append(small.from_family(_restrict_family(p, fam, small.sieve)))
    matrix = [[cols[jcol][i] for jcol in range(len(cols))]
              for i in range(small.module.rank)]
    return hom_make(big.module, small.module, matrix)


def _cross_validate_plus_mod(p: ModPresheaf, j: GrothendieckTopology, c: str,
                             s0: Sieve, canonical: MatchingModule) -> None:
    covers = sorted(j.at(c), key=sieve_key)
    mods = {s: _match_mod(p, s) for s in covers}
    total, injs, projs = direct_sum_many([mods[s].module for s in covers])
    inj_of = dict(zip(covers, injs))
    relations: list[ModuleHom] = []
    for si in covers:
        for sk in covers:
            if si == sk or not sk.arrows <= si.arrows:
                continue
            if not j.covering(Sieve(c, si.arrows & sk.arrows)):
                raise StructureError("intersection of covers fails to cover")
            r = _mod_restriction_hom(p, mods[si], mods[sk])
            relations.append(inj_of[sk].compose(r).sub(inj_of[si]))
    if relations:
        _, _, rprojs = direct_sum_many([r.domain for r in relations])
        diff = relations[0].compose(rprojs[0])
        for rel, proj in zip(relations[1:], rprojs[1:]):
            diff = diff.add(rel.compose(proj))
        quot, surj = cokernel(diff)
    else:
        quot, surj = total, identity_hom(total)
    to_s0 = {s: _mod_restriction_hom(p, mods[s], canonical) for s in covers}
    cols = []
    for jdx in range(quot.rank):
        gen = tuple(1 if i == jdx else 0 for i in range(quot.rank))
        lift = solve_hom(surj, gen)
        if lift is None:
            raise StructureError("plus-construction cross-validation failed: "
                                 "quotient generator did not lift")
        acc = canonical.module.zero()
        for s, proj in zip(covers, projs):
            acc = canonical.module.add(acc, to_s0[s].apply(proj.apply(lift)))
        cols.append(acc)
    matrix = [[cols[jcol][i] for jcol in range(len(cols))]
              for i in range(canonical.module.rank)]
    comparison = hom_make(quot, canonical.module, matrix)
    if not is_isomorphism(comparison):
        raise StructureError("plus-construction cross-validation failed: "
                             f"glued colimit differs from the refinement at {c}")


def plus_construction(p: Presheaf, j: GrothendieckTopology) -> PlusResult:
    """One application of plus: values become matching families over the
    intersection of all covers, with the unit sending x to (x·f)_f.

    The shortcut through the smallest cover is cross-validated against the
    glued-classes colimit over all covers on every call.
    """
    if p.flavor == "set":
        return _plus_set(p, j)
    return _plus_mod(p, j)


def _plus_set(p: SetPresheaf, j: GrothendieckTopology) -> PlusResult:
    cat = p.base
    s0 = {c: min_cover(j, c) for c in cat.objects}
    families = {c: _match_set(p, s0[c]) for c in cat.objects}
    for c in cat.objects:
        _cross_validate_plus_set(p, j, c, s0[c], families[c])
    names = {c: {family_label(f): f for f in families[c]} for c in cat.objects}
    values = {c: [family_label(f) for f in families[c]] for c in cat.objects}
    rests: dict[str, dict] = {}
    for a in cat.arrows:
        m = {}
        for label in values[a.target]:
            fam = names[a.target][label]
            pulled = _pull_family(p, fam, a.name, s0[a.source])
            m[label] = family_label(pulled)
        rests[a.name] = m
    plus = set_presheaf(cat, values, rests)
    report = validate_presheaf(plus)
    if not report.ok:
        raise StructureError(f"plus presheaf breaks functor laws: {report.summary()}")
    comps = {}
    for c in cat.objects:
        comps[c] = {x: family_label(MatchingFamily(
            s0[c], {f: p.restrict(f, x) for f in s0[c].arrows}))
            for x in p.value(c)}
    unit = presheaf_morphism(p, plus, comps)
    return PlusResult(plus, unit, s0)


def _plus_mod(p: ModPresheaf, j: GrothendieckTopology) -> PlusResult:
    cat = p.base
    s0 = {c: min_cover(j, c) for c in cat.objects}
    mods = {c: _match_mod(p, s0[c]) for c in cat.objects}
    for c in cat.objects:
        _cross_validate_plus_mod(p, j, c, s0[c], mods[c])
    values = {c: mods[c].module for c in cat.objects}
    rests: dict[str, ModuleHom] = {}
    for a in cat.arrows:
        big, small = mods[a.target], mods[a.source]
        cols = []
        for jdx in range(big.module.rank):
            gen = tuple(1 if i == jdx else 0 for i in range(big.module.rank))
            fam = big.to_family(gen)
            pulled = _pull_family(p, fam, a.name, s0[a.source])
            cols.append(small.from_family(pulled))
        matrix = [[cols[jcol][i] for jcol in range(len(cols))]
                  for i in range(small.module.rank)]
        rests[a.name] = hom_make(big.module, small.module, matrix)
    plus = mod_presheaf(cat, p.ring, values, rests)
    report = validate_presheaf(plus)
    if not report.ok:
        raise StructureError(f"plus presheaf breaks functor laws: {report.summary()}")
    comps = {}
    for c in cat.objects:
        cols = []
        for jdx in range(p.value(c).rank):
            gen = tuple(1 if i == jdx else 0 for i in range(p.value(c).rank))
            fam = MatchingFamily(s0[c], {f: p.restrict(f, gen)
                                         for f in s0[c].arrows})
            cols.append(mods[c].from_family(fam))
        matrix = [[cols[jcol][i] for jcol in range(len(cols))]
                  for i in range(values[c].rank)]
        comps[c] = hom_make(p.value(c), values[c], matrix)
    unit = presheaf_morphism(p, plus, comps)
    return PlusResult(plus, unit, s0)


def plus_morphism(phi: PresheafMorphism, j: GrothendieckTopology,
                  source_plus: Optional[PlusResult] = None,
                  target_plus: Optional[PlusResult] = None) -> PresheafMorphism:
    """The induced morphism between plus presheaves, componentwise on families."""
    p, q = phi.source, phi.target
    sp = source_plus or plus_construction(p, j)
    tp = target_plus or plus_construction(q, j)
    cat = p.base
    comps: dict[str, Union[dict, ModuleHom]] = {}
    for c in cat.objects:
        s0 = sp.min_covers[c]
        if p.flavor == "set":
            m = {}
            for fam_label_, fam in _label_map_set(p, s0).items():
                mapped = MatchingFamily(s0, {f: phi.apply(cat.source(f),
                                                          fam.assignment[f])
                                             for f in s0.arrows})
                m[fam_label_] = family_label(mapped)
            comps[c] = m
        else:
            src_mod = _match_mod(p, s0)
            tgt_mod = _match_mod(q, s0)
            cols = []
            for jdx in range(src_mod.module.rank):
                gen = tuple(1 if i == jdx else 0 for i in range(src_mod.module.rank))
                fam = src_mod.to_family(gen)
                mapped = MatchingFamily(s0, {f: phi.apply(cat.source(f),
                                                          fam.assignment[f])
                                             for f in s0.arrows})
                cols.append(tgt_mod.from_family(mapped))
            matrix = [[cols[jcol][i] for jcol in range(len(cols))]
                      for i in range(tgt_mod.module.rank)]
            comps[c] = hom_make(src_mod.module, tgt_mod.module, matrix)
    return presheaf_morphism(sp.presheaf, tp.presheaf, comps)


def _label_map_set(p: SetPresheaf, s0: Sieve) -> dict[str, MatchingFamily]:
    return {family_label(f): f for f in _match_set(p, s0)}


@dataclass(frozen=True)
class SheafifyResult:
    sheaf: Presheaf
    unit: PresheafMorphism


def sheafify(p: Presheaf, j: GrothendieckTopology) -> SheafifyResult:
    """Double plus; asserts the result actually is a sheaf."""
    first = plus_construction(p, j)
    second = plus_construction(first.presheaf, j)
    check = is_sheaf(second.presheaf, j)
    if not check.ok:
        raise StructureError(f"double plus failed to produce a sheaf: {check.detail}")
    unit = compose_morphisms(second.unit, first.unit)
    return SheafifyResult(second.presheaf, unit)


def sheafify_morphism(phi: PresheafMorphism,
                      j: GrothendieckTopology) -> PresheafMorphism:
    return plus_morphism(plus_morphism(phi, j), j)


def factor_through_unit(phi: PresheafMorphism,
                        j: GrothendieckTopology) -> PresheafMorphism:
    """The unique psi with psi after unit = phi, for a sheaf target.

    Found by exhaustive search over natural transformations out of the
    sheafification; exactly one match must exist.
    """
    target_check = is_sheaf(phi.target, j)
    if not target_check.ok:
        raise StructureError("factorization target is not a sheaf")
    result = sheafify(phi.source, j)
    found = [psi for psi in nat_transformations(result.sheaf, phi.target)
             if compose_morphisms(psi, result.unit) == phi]
    if len(found) != 1:
        raise StructureError(f"expected exactly one factorization, found "
                             f"{len(found)}")
    return found[0]


# -- local surjectivity and epis ----------------------------------------------


@dataclass(frozen=True)
class LocalSurjectivityCheck:
    ok: bool
    witness: Optional[tuple[str, Hashable]]

    def __bool__(self) -> bool:
        return self.ok


def _in_image(phi: PresheafMorphism, obj: str, y) -> bool:
    comp = phi.at(obj)
    if isinstance(comp, ModuleHom):
        return solve_hom(comp, y) is not None
    return y in set(comp.values())


def is_locally_surjective(phi: PresheafMorphism,
                          j: GrothendieckTopology) -> LocalSurjectivityCheck:
    """Every section of the target is hit after restriction along some
    cover.  The smallest cover imposes the fewest conditions, so checking
    it alone decides the question.
    """
    q = phi.target
    cat = q.base
    for c in cat.objects:
        s0 = min_cover(j, c)
        elems = q.value(c) if q.flavor == "set" else q.value(c).elements()
        for y in elems:
            for f in s0.arrows:
                if not _in_image(phi, cat.source(f), q.restrict(f, y)):
                    return LocalSurjectivityCheck(False, (c, y))
    return LocalSurjectivityCheck(True, None)


@dataclass(frozen=True)
class EpiCheck:
    epi: bool
    locally_surjective: bool
    witness: Optional[tuple]
    pool_size: int
    detail: str

    def __bool__(self) -> bool:
        return self.epi


def sheaf_epi_check(phi: PresheafMorphism, j: GrothendieckTopology,
                    pool: Sequence[Presheaf]) -> EpiCheck:
    """Epi test against an explicit pool of sheaves: phi is declared epi
    when no parallel pair out of its target through a pool sheaf is merged
    by phi without being equal.  Local surjectivity is computed alongside
    as the sufficient-condition cross-check; a locally surjective morphism
    contradicted by the pool signals an internal error.
    """
    locally = is_locally_surjective(phi, j)
    for h in pool:
        check = is_sheaf(h, j)
        if not check.ok:
            raise StructureError("epi-check pool contains a non-sheaf")
        outs = nat_transformations(phi.target, h)
        for u, v in itertools.combinations(outs, 2):
            if compose_morphisms(u, phi) == compose_morphisms(v, phi):
                if locally.ok:
                    raise StructureError(
                        "locally surjective morphism merged by a sheaf pair; "
                        "this contradicts the epi criterion")
                return EpiCheck(False, locally.ok, (u, v, h), len(pool),
                                "distinct parallel pair agrees after phi")
    detail = ("locally surjective" if locally.ok
              else f"no separating pair among {len(pool)} pool sheaves")
    return EpiCheck(True, locally.ok, None, len(pool), detail)
