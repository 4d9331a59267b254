"""Brute-force oracles and random instance generators.

Everything here recomputes expected answers straight from the definitions,
deliberately avoiding the library routines under test.  Slow and simple on
purpose; instance sizes are kept small enough that exhaustive scans finish
in milliseconds.
"""

from __future__ import annotations

import itertools
import random
from typing import Optional

from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_form

from toposkit.category import FinCategory, category
from toposkit.modules import (FinModule, FinRing, ModDiagram, ModuleHom,
                              hom_make, module_make, ring_make, zero_module)
from toposkit.presheaf import (Presheaf, SetPresheaf, constant_presheaf,
                               set_presheaf, mod_presheaf, validate_presheaf,
                               yoneda_set)
from toposkit.topology import GrothendieckTopology, topology_from_sieves


# -- random bases -------------------------------------------------------------


def random_poset_category(rng: random.Random) -> FinCategory:
    """A random poset on two or three objects; arrow i <= j is named f<i><j>."""
    n = rng.choice((2, 3, 3))
    names = ("X0", "X1", "X2")[:n]
    rel = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.7:
                rel.add((i, j))
    for (i, j), (k, l) in itertools.product(tuple(rel), tuple(rel)):
        if j == k:
            rel.add((i, l))  # transitive closure; <=3 points, one pass is enough
    arrows = [(f"f{i}{j}", names[i], names[j]) for i, j in sorted(rel)]
    compose = {}
    for i, j in rel:
        for k, l in rel:
            if j == k:
                compose[(f"f{k}{l}", f"f{i}{j}")] = f"f{i}{l}"
    return category(names, arrows, compose)


def random_monoid_category(
    rng: random.Random,
) -> tuple[FinCategory, dict[str, tuple[int, ...]]]:
    """A one-object category from a small transformation monoid.

    Arrows act on a 2- or 3-point set; the composition table is taken in
    the opposite order, so the action table returned alongside is a valid
    system of restriction maps (see ``tautological_presheaf``).
    """
    while True:
        npts = rng.choice((2, 3))
        ident = tuple(range(npts))
        gens = {tuple(rng.randrange(npts) for _ in range(npts))
                for _ in range(rng.choice((1, 1, 2)))}
        gens.discard(ident)
        elems = {ident} | gens
        frontier = list(elems)
        while frontier:
            m = frontier.pop()
            for g in elems.copy():
                for comp in (tuple(m[g[i]] for i in range(npts)),
                             tuple(g[m[i]] for i in range(npts))):
                    if comp not in elems:
                        elems.add(comp)
                        frontier.append(comp)
        if len(elems) <= 7:
            break
    maps = sorted(elems - {ident})
    name_of = {ident: "id_X"}
    for k, m in enumerate(maps):
        name_of[m] = f"m{k}"
    arrows = [(name_of[m], "X", "X") for m in maps]
    compose = {}
    for a, b in itertools.product(maps, maps):
        # category composite "a after b" acts as "apply a, then b"
        compose[(name_of[a], name_of[b])] = name_of[tuple(b[a[i]] for i in range(npts))]
    cat = category(("X",), arrows, compose)
    table = {name_of[m]: m for m in elems}
    return cat, table


def tautological_presheaf(cat: FinCategory,
                          table: dict[str, tuple[int, ...]]) -> SetPresheaf:
    """The point set of a transformation monoid, acted on by restriction."""
    npts = len(next(iter(table.values())))
    pts = tuple(range(npts))
    rests = {name: {x: t[x] for x in pts} for name, t in table.items()}
    return set_presheaf(cat, {"X": pts}, rests)


def random_site(rng: random.Random):
    """A random small category with a saturated topology on it.

    Returns ``(cat, topology, action_table)`` where the table is ``None``
    for poset bases.
    """
    if rng.random() < 0.7:
        cat, table = random_poset_category(rng), None
    else:
        cat, table = random_monoid_category(rng)
    seeds = {}
    for c in cat.objects:
        into = sorted(cat.arrows_into[c])
        fams = []
        for _ in range(rng.randrange(1, 3)):
            k = rng.randrange(0, len(into) + 1)
            fams.append(rng.sample(into, k))
        seeds[c] = fams
    return cat, topology_from_sieves(cat, seeds), table


# -- random presheaves --------------------------------------------------------


def _fill_composites_set(cat: FinCategory, vals, rests) -> bool:
    """Extend a partial restriction assignment to composite arrows."""
    changed = True
    while changed:
        changed = False
        for (g, f), h in cat.composition.items():
            if cat.is_identity(g) or cat.is_identity(f) or cat.is_identity(h):
                continue
            if h not in rests and g in rests and f in rests:
                rests[h] = {x: rests[f][rests[g][x]]
                            for x in vals[cat.target(g)]}
                changed = True
    return all(cat.is_identity(a.name) or a.name in rests for a in cat.arrows)


def random_set_presheaf(rng: random.Random, cat: FinCategory,
                        max_size: int = 4,
                        table: Optional[dict] = None) -> SetPresheaf:
    """A random presheaf with value sizes in 1..max_size.

    Mixes representables, constants, the tautological action (when one is
    available) and rejection-sampled random restriction tables.
    """
    choices = ["constant", "random", "random", "representable"]
    if table is not None:
        choices.append("tautological")
    for _ in range(80):
        kind = rng.choice(choices)
        if kind == "constant":
            return constant_presheaf(cat, tuple(range(rng.randint(1, max_size))))
        if kind == "tautological":
            return tautological_presheaf(cat, table)
        if kind == "representable":
            p = yoneda_set(cat, rng.choice(cat.objects))
            if all(len(p.value(c)) <= max_size for c in cat.objects):
                return p
            continue
        vals = {c: tuple(range(rng.randint(1, max_size))) for c in cat.objects}
        composite = {h for (g, f), h in cat.composition.items()
                     if not (cat.is_identity(g) or cat.is_identity(f))}
        rests: dict[str, dict] = {}
        for a in cat.arrows:
            if cat.is_identity(a.name) or a.name in composite:
                continue
            rests[a.name] = {x: rng.choice(vals[a.source])
                             for x in vals[a.target]}
        if not _fill_composites_set(cat, vals, rests):
            continue
        p = set_presheaf(cat, vals, rests)
        if validate_presheaf(p).ok:
            return p
    return constant_presheaf(cat, ("c",))


def random_hom(rng: random.Random, domain: FinModule,
               codomain: FinModule) -> ModuleHom:
    """A uniformly random well-defined hom, entry by entry."""
    rows = []
    for i in range(codomain.rank):
        row = []
        for j in range(domain.rank):
            d_cod = codomain.orders[i]
            step = d_cod // __import__("math").gcd(d_cod, domain.orders[j])
            row.append(step * rng.randrange(d_cod // step))
        rows.append(row)
    return hom_make(domain, codomain, rows)


def random_module(rng: random.Random, ring: FinRing,
                  max_rank: int = 2) -> FinModule:
    divisors = [d for d in range(2, ring.moduli[0] + 1)
                if ring.moduli[0] % d == 0]
    orders = tuple(rng.choice(divisors) for _ in range(rng.randint(0, max_rank)))
    return module_make(ring, orders)


def random_mod_presheaf(rng: random.Random, base: FinCategory, ring,
                        max_rank: int = 2):
    """A random module presheaf; cyclic ring only."""
    ring = ring_make(ring)
    for _ in range(80):
        vals = {c: random_module(rng, ring, max_rank) for c in base.objects}
        composite = {h for (g, f), h in base.composition.items()
                     if not (base.is_identity(g) or base.is_identity(f))}
        rests: dict[str, ModuleHom] = {}
        for a in base.arrows:
            if base.is_identity(a.name) or a.name in composite:
                continue
            rests[a.name] = random_hom(rng, vals[a.target], vals[a.source])
        changed = True
        while changed:
            changed = False
            for (g, f), h in base.composition.items():
                if base.is_identity(g) or base.is_identity(f) or base.is_identity(h):
                    continue
                if h not in rests and g in rests and f in rests:
                    rests[h] = rests[f].compose(rests[g])
                    changed = True
        if not all(base.is_identity(a.name) or a.name in rests
                   for a in base.arrows):
            continue
        try:
            p = mod_presheaf(base, ring, vals, rests)
        except Exception:
            continue
        if validate_presheaf(p).ok:
            return p
    from toposkit.presheaf import zero_presheaf
    return zero_presheaf(base, ring)


# -- definitional checkers ----------------------------------------------------


def _elements(p: Presheaf, c: str) -> list:
    if p.flavor == "set":
        return list(p.value(c))
    return list(p.value(c).elements())


def brute_amalgamation_scan(p: Presheaf, j: GrothendieckTopology,
                            at_most_one: bool = False):
    """Sheaf (or separatedness) condition by exhaustive scan.

    Matching is checked straight from the definition: a family (x_f) over a
    sieve matches when restricting x_f along any h lands on the member at
    f compose h.  Returns ``(ok, witness)``.
    """
    cat = p.base
    for c in cat.objects:
        for s in j.at(c):
            arrows = sorted(s.arrows)
            pools = [_elements(p, cat.source(f)) for f in arrows]
            for combo in itertools.product(*pools):
                x = dict(zip(arrows, combo))
                matching = True
                for f in arrows:
                    for h in cat.arrows_into[cat.source(f)]:
                        if p.restrict(h, x[f]) != x[cat.compose(f, h)]:
                            matching = False
                            break
                    if not matching:
                        break
                if not matching:
                    continue
                n = sum(1 for y in _elements(p, c)
                        if all(p.restrict(f, y) == x[f] for f in arrows))
                if n > 1 or (n == 0 and not at_most_one):
                    return False, (c, s, x, n)
    return True, None


def brute_nat_transformations(p: Presheaf, q: Presheaf) -> list[dict]:
    """Every natural transformation, by filtering all component tables."""
    assert p.base is q.base or p.base == q.base
    cat = p.base
    objs = list(cat.objects)
    pools = []
    for c in objs:
        src, tgt = _elements(p, c), _elements(q, c)
        pools.append([dict(zip(src, choice))
                      for choice in itertools.product(tgt, repeat=len(src))])
    out = []
    for combo in itertools.product(*pools):
        comp = dict(zip(objs, combo))
        if all(comp[a.source][p.restrict(a.name, x)]
               == q.restrict(a.name, comp[a.target][x])
               for a in cat.arrows for x in _elements(p, a.target)):
            out.append(comp)
    return out


def brute_hom_count(m: FinModule, n: FinModule) -> int:
    """Module homs counted by scanning generator images.

    A candidate map sends generator i to ``images[i]`` and extends by
    linearity on coordinates; additivity is then verified on every pair of
    elements, which rejects ill-defined choices.
    """
    elems = list(m.elements())
    count = 0
    for images in itertools.product(list(n.elements()), repeat=m.rank):
        def f(x):
            acc = n.zero()
            for xi, img in zip(x, images):
                acc = n.add(acc, tuple((xi * a) % d
                                       for a, d in zip(img, n.orders)))
            return acc
        if all(f(m.add(a, b)) == n.add(f(a), f(b))
               for a in elems for b in elems):
            count += 1
    return count


def brute_kernel_elements(h: ModuleHom) -> set:
    return {x for x in h.domain.elements() if h.apply(x) == h.codomain.zero()}


def brute_image_elements(h: ModuleHom) -> set:
    return {h.apply(x) for x in h.domain.elements()}


def brute_limit_elements(diagram: ModDiagram) -> set:
    """Compatible tuples in the product, straight from the cone condition."""
    nodes = list(diagram.shape.objects)
    idx = {n: k for k, n in enumerate(nodes)}
    pools = [list(diagram.nodes[n].elements()) for n in nodes]
    out = set()
    for combo in itertools.product(*pools):
        ok = True
        for a in diagram.shape.arrows:
            if diagram.shape.is_identity(a.name):
                continue
            if diagram.on_edge(a.name).apply(combo[idx[a.source]]) \
                    != combo[idx[a.target]]:
                ok = False
                break
        if ok:
            out.add(combo)
    return out


def snf_diagonal_oracle(matrix) -> list[int]:
    """Invariant factors of an integer matrix, via an outside implementation."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if rows == 0 or cols == 0:
        return []
    s = smith_normal_form(Matrix(matrix), domain=ZZ)
    return [abs(int(s[i, i])) for i in range(min(rows, cols))]


def abelian_group_order_profile(elems: set, add, zero) -> tuple[int, ...]:
    """Sorted element orders of a finite abelian group, an iso invariant."""
    orders = []
    for x in elems:
        k, acc = 1, x
        while acc != zero:
            acc = add(acc, x)
            k += 1
        orders.append(k)
    return tuple(sorted(orders))
