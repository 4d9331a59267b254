"""Sieves, covering bases, and Grothendieck topologies on a finite category.

A sieve on C is a set of arrows into C closed under precomposition; all
sieves on all objects of a finite category form a finite lattice, so a
topology can be stored extensionally as the full list of covering sieves
per object and every axiom is directly checkable.

Topology generation saturates a seed family of sieves to the least fixed
point under the maximal-sieve, pullback-stability and transitivity axioms.
The lattice has size 2^(arrows into C), so generation enforces a hard cap
on the arrow fan-in and fails loudly instead of blowing up.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .category import (FinCategory, FunctorData, full_subcategory, generates,
                       is_epimorphic_family, is_iso, pullback)
from .diagnostics import BoundExceeded, Report, StructureError

DEFAULT_FANIN_CAP = 12
DEFAULT_COMBO_CAP = 4096


# -- arrow families and sieves ---------------------------------------------


@dataclass(frozen=True)
class ArrowFamily:
    codomain: str
    arrows: frozenset[str]

    def sorted_arrows(self) -> tuple[str, ...]:
        return tuple(sorted(self.arrows))


@dataclass(frozen=True)
class Sieve:
    codomain: str
    arrows: frozenset[str]

    def sorted_arrows(self) -> tuple[str, ...]:
        return tuple(sorted(self.arrows))

    def __contains__(self, arrow: str) -> bool:
        return arrow in self.arrows


def family_make(cat: FinCategory, codomain: str,
                arrows: Iterable[str]) -> ArrowFamily:
    fam = frozenset(arrows)
    if codomain not in cat.objects:
        raise StructureError(f"unknown object {codomain}")
    for f in fam:
        if cat.target(f) != codomain:
            raise StructureError(f"{f} is not an arrow into {codomain}")
    return ArrowFamily(codomain, fam)


def _closed_under_precomposition(cat: FinCategory, arrows: frozenset[str]) -> bool:
    for f in arrows:
        for g in cat.arrows_into[cat.source(f)]:
            if cat.compose(f, g) not in arrows:
                return False
    return True


def sieve_make(cat: FinCategory, codomain: str, arrows: Iterable[str]) -> Sieve:
    """A sieve from an explicit arrow set; raises unless already closed."""
    fam = family_make(cat, codomain, arrows)
    if not _closed_under_precomposition(cat, fam.arrows):
        raise StructureError(f"arrow set on {codomain} is not precomposition-closed")
    return Sieve(codomain, fam.arrows)


def sieve_generate(cat: FinCategory, fam: ArrowFamily) -> Sieve:
    """Smallest precomposition-closed superset of the family."""
    closed = set(fam.arrows)
    work = list(fam.arrows)
    while work:
        f = work.pop()
        for g in cat.arrows_into[cat.source(f)]:
            h = cat.compose(f, g)
            if h not in closed:
                closed.add(h)
                work.append(h)
    return Sieve(fam.codomain, frozenset(closed))


def maximal_sieve(cat: FinCategory, c: str) -> Sieve:
    if c not in cat.objects:
        raise StructureError(f"unknown object {c}")
    return Sieve(c, frozenset(cat.arrows_into[c]))


def pullback_sieve(cat: FinCategory, f: str, s: Sieve) -> Sieve:
    """The sieve {g into source(f) | f∘g ∈ s}."""
    if cat.target(f) != s.codomain:
        raise StructureError(f"{f} does not land in {s.codomain}")
    d = cat.source(f)
    kept = frozenset(g for g in cat.arrows_into[d]
                     if cat.compose(f, g) in s.arrows)
    return Sieve(d, kept)


def sieve_key(s: Sieve) -> tuple:
    return (len(s.arrows), s.sorted_arrows())


def all_sieves(cat: FinCategory, c: str,
               cap: int = DEFAULT_FANIN_CAP) -> list[Sieve]:
    """Every sieve on ``c``, smallest first; exponential in fan-in."""
    into = cat.arrows_into[c]
    if len(into) > cap:
        raise BoundExceeded(
            f"{len(into)} arrows into {c} exceeds the sieve lattice cap {cap}")
    out = []
    for k in range(len(into) + 1):
        for subset in itertools.combinations(into, k):
            arrows = frozenset(subset)
            if _closed_under_precomposition(cat, arrows):
                out.append(Sieve(c, arrows))
    return sorted(out, key=sieve_key)


# -- bases ------------------------------------------------------------------


@dataclass(frozen=True)
class Basis:
    base: FinCategory
    families: Mapping[str, tuple[ArrowFamily, ...]]

    def __post_init__(self) -> None:
        for obj in self.base.objects:
            if obj not in self.families:
                raise StructureError(f"basis has no family list at {obj}")
            for fam in self.families[obj]:
                if fam.codomain != obj:
                    raise StructureError(f"family filed under {obj} has codomain "
                                         f"{fam.codomain}")

    def at(self, obj: str) -> tuple[ArrowFamily, ...]:
        return self.families[obj]

    def has_family(self, codomain: str, arrows: frozenset[str]) -> bool:
        return any(f.arrows == arrows for f in self.families[codomain])


def basis_make(cat: FinCategory,
               families: Mapping[str, Sequence[Iterable[str]]]) -> Basis:
    built = {}
    for obj in cat.objects:
        fams = [family_make(cat, obj, arrows)
                for arrows in families.get(obj, ())]
        built[obj] = tuple(sorted(fams, key=lambda f: (len(f.arrows),
                                                       f.sorted_arrows())))
    return Basis(cat, built)


def validate_basis(cat: FinCategory, basis: Basis,
                   combo_cap: int = DEFAULT_COMBO_CAP) -> Report:
    """The three covering-basis clauses, each reported with witnesses.

    1. every isomorphism into C forms a singleton family in K(C);
    2. any family pulled back along g: D -> C lands in K(D), which needs
       the pullbacks to exist (missing ones are reported, not crashed on);
    3. composing a family with chosen families over each domain gives a
       family in K(C).
    """
    report = Report()
    for c in cat.objects:
        for f in cat.arrows_into[c]:
            if is_iso(cat, f) is not None and not basis.has_family(c, frozenset({f})):
                report.add("isomorphism", (f,),
                           f"isomorphism {f} into {c} is not a singleton family")
    for c in cat.objects:
        for fam in basis.at(c):
            for g in cat.arrows_into[c]:
                d = cat.source(g)
                pulled = set()
                missing = False
                for f in sorted(fam.arrows):
                    pb = pullback(cat, f, g)
                    if pb is None:
                        report.add("pullback-missing", (f, g),
                                   f"no pullback of {f} along {g}")
                        missing = True
                        continue
                    pulled.add(pb[2])
                if missing:
                    continue
                if not basis.has_family(d, frozenset(pulled)):
                    report.add("stability",
                               (g,) + fam.sorted_arrows(),
                               f"family on {c} pulled back along {g} "
                               f"is missing from K({d})")
    for c in cat.objects:
        for fam in basis.at(c):
            members = fam.sorted_arrows()
            pools = [basis.at(cat.source(f)) for f in members]
            count = 1
            for pool in pools:
                count *= max(len(pool), 1)
            if count > combo_cap:
                raise BoundExceeded(
                    f"transitivity check at {c} needs {count} family choices, "
                    f"cap is {combo_cap}")
            for choice in itertools.product(*pools):
                composed = set()
                for f, sub in zip(members, choice):
                    for g in sub.arrows:
                        composed.add(cat.compose(f, g))
                if not basis.has_family(c, frozenset(composed)):
                    report.add("transitivity",
                               members + tuple(sorted(composed)),
                               f"composite family on {c} is missing from K({c})")
    return report


# -- topologies -------------------------------------------------------------


@dataclass(frozen=True)
class GrothendieckTopology:
    base: FinCategory
    covers: Mapping[str, tuple[Sieve, ...]]

    def __post_init__(self) -> None:
        for obj in self.base.objects:
            if obj not in self.covers:
                raise StructureError(f"topology has no sieve list at {obj}")
            for s in self.covers[obj]:
                if s.codomain != obj:
                    raise StructureError(f"sieve filed under {obj} has codomain "
                                         f"{s.codomain}")

    def at(self, obj: str) -> tuple[Sieve, ...]:
        return self.covers[obj]

    def covering(self, s: Sieve) -> bool:
        return any(t.arrows == s.arrows for t in self.covers[s.codomain])


def trivial_topology(cat: FinCategory) -> GrothendieckTopology:
    return GrothendieckTopology(
        cat, {c: (maximal_sieve(cat, c),) for c in cat.objects})


def validate_topology(j: GrothendieckTopology,
                      cap: int = DEFAULT_FANIN_CAP) -> Report:
    """Direct re-check of the three topology axioms, scanning the whole
    sieve lattice for transitivity; independent of the saturation code."""
    report = Report()
    cat = j.base
    for c in cat.objects:
        if not j.covering(maximal_sieve(cat, c)):
            report.add("maximal", (c,), f"maximal sieve on {c} does not cover")
    for c in cat.objects:
        for s in j.at(c):
            for f in cat.arrows_into[c]:
                if not j.covering(pullback_sieve(cat, f, s)):
                    report.add("stability", (f,) + s.sorted_arrows(),
                               f"pullback of a cover of {c} along {f} "
                               f"does not cover {cat.source(f)}")
    for c in cat.objects:
        lattice = all_sieves(cat, c, cap)
        for t in lattice:
            if j.covering(t):
                continue
            for s in j.at(c):
                if all(j.covering(pullback_sieve(cat, f, t)) for f in s.arrows):
                    report.add("transitivity",
                               s.sorted_arrows() + ("->",) + t.sorted_arrows(),
                               f"sieve on {c} is locally covering but missing")
                    break
    return report


def _saturate(cat: FinCategory,
              seeds: Mapping[str, Iterable[frozenset[str]]],
              cap: int) -> GrothendieckTopology:
    """Worklist fixpoint over the finite sieve lattice: start from the seeds
    plus maximal sieves, then repeatedly add pullbacks of covers and any
    sieve whose pullback along every arrow of some cover already covers."""
    lattices = {c: all_sieves(cat, c, cap) for c in cat.objects}
    covers: dict[str, set[frozenset[str]]] = {c: set() for c in cat.objects}
    for c in cat.objects:
        covers[c].add(maximal_sieve(cat, c).arrows)
        for arrows in seeds.get(c, ()):
            covers[c].add(frozenset(arrows))
    changed = True
    while changed:
        changed = False
        for c in cat.objects:
            for arrows in list(covers[c]):
                s = Sieve(c, arrows)
                for f in cat.arrows_into[c]:
                    pulled = pullback_sieve(cat, f, s)
                    if pulled.arrows not in covers[pulled.codomain]:
                        covers[pulled.codomain].add(pulled.arrows)
                        changed = True
        for c in cat.objects:
            for t in lattices[c]:
                if t.arrows in covers[c]:
                    continue
                for arrows in list(covers[c]):
                    s = Sieve(c, arrows)
                    if all(pullback_sieve(cat, f, t).arrows
                           in covers[cat.source(f)] for f in s.arrows):
                        covers[c].add(t.arrows)
                        changed = True
                        break
    final = {c: tuple(sorted((Sieve(c, a) for a in covers[c]), key=sieve_key))
             for c in cat.objects}
    return GrothendieckTopology(cat, final)


def generate_topology(cat: FinCategory, basis: Basis,
                      require_valid: bool = True,
                      cap: int = DEFAULT_FANIN_CAP) -> GrothendieckTopology:
    """Saturate the basis to the least topology containing it."""
    if require_valid:
        report = validate_basis(cat, basis)
        if not report.ok:
            raise StructureError(f"basis is invalid: {report.summary()}")
    seeds = {c: [sieve_generate(cat, fam).arrows for fam in basis.at(c)]
             for c in cat.objects}
    return _saturate(cat, seeds, cap)


def topology_from_sieves(cat: FinCategory,
                         seeds: Mapping[str, Sequence[Iterable[str]]],
                         cap: int = DEFAULT_FANIN_CAP) -> GrothendieckTopology:
    """Saturate explicit seed arrow sets (closing them into sieves first)."""
    sets = {c: [sieve_generate(cat, family_make(cat, c, arrows)).arrows
                for arrows in seeds.get(c, ())]
            for c in cat.objects}
    return _saturate(cat, sets, cap)


# -- the epimorphic-family basis --------------------------------------------


def epimorphic_basis(ambient: FinCategory, gens: Sequence[str],
                     size_limit: Optional[int] = None,
                     cap: int = DEFAULT_FANIN_CAP) -> tuple[Basis, FunctorData]:
    """All jointly epimorphic families of subcategory arrows, per object.

    The generators must actually generate the ambient category.  Families
    are subsets of the arrows into each object inside the full subcategory
    on ``gens``, tested for joint epimorphy in the ambient category; the
    empty family is included when it is genuinely epimorphic there.
    """
    if not generates(ambient, gens):
        raise StructureError("chosen objects do not generate the ambient category")
    sub, inclusion = full_subcategory(ambient, gens)
    families: dict[str, list[ArrowFamily]] = {}
    for c in sub.objects:
        into = sub.arrows_into[c]
        limit = len(into) if size_limit is None else min(size_limit, len(into))
        if len(into) > cap:
            raise BoundExceeded(
                f"{len(into)} arrows into {c} exceeds the family scan cap {cap}")
        found = []
        for k in range(limit + 1):
            for subset in itertools.combinations(into, k):
                if is_epimorphic_family(ambient, c, subset):
                    found.append(ArrowFamily(c, frozenset(subset)))
        families[c] = sorted(found, key=lambda f: (len(f.arrows),
                                                   f.sorted_arrows()))
    return Basis(sub, {c: tuple(v) for c, v in families.items()}), inclusion


# -- smallest covers ---------------------------------------------------------


def min_cover(j: GrothendieckTopology, c: str) -> Sieve:
    """Intersection of every covering sieve on ``c``; must itself cover."""
    sieves = j.at(c)
    if not sieves:
        raise StructureError(f"no covering sieves on {c}")
    arrows = frozenset.intersection(*[s.arrows for s in sieves])
    result = Sieve(c, arrows)
    if not j.covering(result):
        raise StructureError(
            f"intersection of covers of {c} does not cover; topology is not "
            f"saturated")
    return result
