"""Finite modules over finite commutative rings Z/n1 x ... x Z/nk.

A module is presented as a direct sum of cyclic groups: coordinate ``j``
ranges over ``Z/d_j`` and is tagged with the ring component acting on it
(``d_j`` divides that component's modulus).  Every finite module over
such a ring has this shape, so the presentation loses nothing.

Homomorphisms are integer matrices acting on coefficient tuples; entry
``(i, j)`` is only admissible when ``d_j * a[i][j] == 0`` modulo the
codomain order ``e_i`` and the two coordinates share a ring component.
Kernels, cokernels and images reduce to integer lattice computations via
Smith normal form; no floating point is involved anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from . import intmat
from .category import FinCategory
from .diagnostics import Report, StructureError

Element = tuple[int, ...]


@dataclass(frozen=True)
class FinRing:
    """Product of cyclic rings; ``moduli[c]`` is the modulus of component c."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.moduli or any(n < 1 for n in self.moduli):
            raise StructureError("ring moduli must be positive")

    @property
    def is_cyclic(self) -> bool:
        return len(self.moduli) == 1

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(n) for n in self.moduli))

    def one(self) -> Element:
        return tuple(1 % n for n in self.moduli)

    def __str__(self) -> str:
        return " x ".join(f"Z/{n}" for n in self.moduli)


def ring_make(spec: Union[int, Sequence[int], FinRing]) -> FinRing:
    """Z/n for an int, a product ring for a sequence of moduli."""
    if isinstance(spec, FinRing):
        return spec
    if isinstance(spec, int):
        return FinRing((spec,))
    return FinRing(tuple(spec))


@dataclass(frozen=True)
class FinModule:
    ring: FinRing
    orders: tuple[int, ...]
    components: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.orders) != len(self.components):
            raise StructureError("orders and components must align")
        for d, c in zip(self.orders, self.components):
            if not 0 <= c < len(self.ring.moduli):
                raise StructureError(f"unknown ring component {c}")
            if d < 1 or self.ring.moduli[c] % d != 0:
                raise StructureError(
                    f"cyclic order {d} does not divide ring modulus {self.ring.moduli[c]}")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def size(self) -> int:
        return prod(self.orders)

    @property
    def is_zero(self) -> bool:
        return self.size == 1

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.orders))

    def zero(self) -> Element:
        return (0,) * self.rank

    def reduce(self, xs: Sequence[int]) -> Element:
        return tuple(x % d for x, d in zip(xs, self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x: Element) -> Element:
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def sub(self, x: Element, y: Element) -> Element:
        return self.add(x, self.neg(y))

    def scale(self, r: Element, x: Element) -> Element:
        """Ring action; ``r`` is a ring element (one entry per component)."""
        return tuple((r[c] * a) % d
                     for a, d, c in zip(x, self.orders, self.components))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.ring.is_cyclic:
            return " + ".join(f"Z/{d}" for d in self.orders)
        return " + ".join(f"Z/{d}@{c}" for d, c in zip(self.orders, self.components))


OrderSpec = Union[int, tuple[int, int]]


def module_make(ring: Union[int, Sequence[int], FinRing],
                orders: Sequence[OrderSpec] = ()) -> FinModule:
    """Module from cyclic orders.

    Over a cyclic ring plain ints suffice; over a product ring each entry
    must be ``(component, order)`` so the action is unambiguous.  The
    zero module is the empty list (orders equal to 1 also work).
    """
    r = ring_make(ring)
    ds: list[int] = []
    cs: list[int] = []
    for spec in orders:
        if isinstance(spec, tuple):
            c, d = spec
        else:
            if not r.is_cyclic:
                raise StructureError(
                    "plain integer orders are ambiguous over a product ring; "
                    "use (component, order) pairs")
            c, d = 0, spec
        ds.append(d)
        cs.append(c)
    return FinModule(r, tuple(ds), tuple(cs))


def zero_module(ring: Union[int, Sequence[int], FinRing]) -> FinModule:
    return module_make(ring, ())


@dataclass(frozen=True)
class ModuleHom:
    domain: FinModule
    codomain: FinModule
    matrix: tuple[tuple[int, ...], ...]  # rows indexed by codomain coordinates

    def __post_init__(self) -> None:
        if self.domain.ring != self.codomain.ring:
            raise StructureError("hom between modules over different rings")
        if len(self.matrix) != self.codomain.rank:
            raise StructureError("matrix row count must equal codomain rank")
        for row in self.matrix:
            if len(row) != self.domain.rank:
                raise StructureError("matrix column count must equal domain rank")

    def apply(self, x: Element) -> Element:
        return tuple(
            sum(a * v for a, v in zip(row, x)) % d
            for row, d in zip(self.matrix, self.codomain.orders))

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        """self after other."""
        if other.codomain != self.domain:
            raise StructureError("homs are not composable")
        if self.domain.rank == 0:
            # empty middle dimension: mat_mul cannot recover the column count
            m = [[0] * other.domain.rank for _ in range(self.codomain.rank)]
        else:
            m = intmat.mat_mul([list(r) for r in self.matrix],
                               [list(r) for r in other.matrix])
        return hom_make(other.domain, self.codomain, m)

    def add(self, other: "ModuleHom") -> "ModuleHom":
        if (other.domain, other.codomain) != (self.domain, self.codomain):
            raise StructureError("hom addition needs equal endpoints")
        m = [[a + b for a, b in zip(r1, r2)]
             for r1, r2 in zip(self.matrix, other.matrix)]
        return hom_make(self.domain, self.codomain, m)

    def neg(self) -> "ModuleHom":
        return hom_make(self.domain, self.codomain,
                        [[-a for a in row] for row in self.matrix])

    def sub(self, other: "ModuleHom") -> "ModuleHom":
        return self.add(other.neg())

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for row in self.matrix for a in row)


def _normalize_rows(codomain: FinModule, matrix: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(a % d for a in row)
        for row, d in zip(matrix, codomain.orders))


def hom_make(domain: FinModule, codomain: FinModule,
             matrix: Sequence[Sequence[int]]) -> ModuleHom:
    """Validated homomorphism; raises on an inadmissible entry."""
    norm = _normalize_rows(codomain, matrix)
    for i, (row, e, bc) in enumerate(zip(norm, codomain.orders, codomain.components)):
        for j, (a, d, dc) in enumerate(zip(row, domain.orders, domain.components)):
            if a == 0:
                continue
            if dc != bc:
                raise StructureError(
                    f"entry ({i},{j}) crosses ring components {dc} -> {bc}")
            if (d * a) % e != 0:
                raise StructureError(
                    f"entry ({i},{j}) = {a} violates {d}*{a} == 0 mod {e}")
    return ModuleHom(domain, codomain, norm)


def validate_hom_matrix(domain: FinModule, codomain: FinModule,
                        matrix: Sequence[Sequence[int]]) -> Report:
    """Same admissibility conditions as ``hom_make`` but as a report."""
    report = Report()
    if len(matrix) != codomain.rank or any(len(r) != domain.rank for r in matrix):
        report.add("shape", (), "matrix shape does not match module ranks")
        return report
    norm = _normalize_rows(codomain, matrix)
    for i, (row, e, bc) in enumerate(zip(norm, codomain.orders, codomain.components)):
        for j, (a, d, dc) in enumerate(zip(row, domain.orders, domain.components)):
            if a == 0:
                continue
            if dc != bc:
                report.add("component", (i, j), f"entry ({i},{j}) crosses ring components")
            elif (d * a) % e != 0:
                report.add("congruence", (i, j),
                           f"entry ({i},{j}) = {a} violates {d}*{a} == 0 mod {e}")
    return report


def identity_hom(m: FinModule) -> ModuleHom:
    return hom_make(m, m, intmat.identity(m.rank))


def zero_hom(domain: FinModule, codomain: FinModule) -> ModuleHom:
    return hom_make(domain, codomain,
                    [[0] * domain.rank for _ in range(codomain.rank)])


# -- direct sums ---------------------------------------------------------


def direct_sum_many(mods: Sequence[FinModule],
                    ring: Optional[FinRing] = None) -> tuple[FinModule, list[ModuleHom], list[ModuleHom]]:
    """(sum, injections, projections); coordinate blocks in argument order.

    The empty sum is the zero module, which needs the ring spelled out.
    """
    if not mods:
        if ring is None:
            raise StructureError("direct sum of an empty family needs a ring")
        return zero_module(ring), [], []
    ring = mods[0].ring
    orders: list[int] = []
    comps: list[int] = []
    offsets = []
    for m in mods:
        if m.ring != ring:
            raise StructureError("direct sum of modules over different rings")
        offsets.append(len(orders))
        orders.extend(m.orders)
        comps.extend(m.components)
    total = FinModule(ring, tuple(orders), tuple(comps))
    injections = []
    projections = []
    for m, off in zip(mods, offsets):
        inj = [[0] * m.rank for _ in range(total.rank)]
        proj = [[0] * total.rank for _ in range(m.rank)]
        for j in range(m.rank):
            inj[off + j][j] = 1
            proj[j][off + j] = 1
        injections.append(hom_make(m, total, inj))
        projections.append(hom_make(total, m, proj))
    return total, injections, projections


def direct_sum(m: FinModule, n: FinModule) -> tuple[FinModule, tuple[ModuleHom, ModuleHom], tuple[ModuleHom, ModuleHom]]:
    total, injs, projs = direct_sum_many([m, n])
    return total, (injs[0], injs[1]), (projs[0], projs[1])


# -- kernels, cokernels, images ------------------------------------------


def _component_blocks(hom: ModuleHom) -> list[tuple[int, list[int], list[int]]]:
    """(component, domain coordinate indices, codomain coordinate indices)."""
    comps = sorted(set(hom.domain.components) | set(hom.codomain.components))
    out = []
    for c in comps:
        dj = [j for j, cc in enumerate(hom.domain.components) if cc == c]
        ci = [i for i, cc in enumerate(hom.codomain.components) if cc == c]
        out.append((c, dj, ci))
    return out


def _subquotient(gen_cols: list[list[int]], ambient_orders: list[int]) -> list[tuple[int, list[int]]]:
    """Present (lattice spanned by gen_cols + diag(orders)) / diag(orders).

    Returns ``(order, generator_vector)`` pairs with order > 1; generator
    vectors live in the ambient coordinate system.
    """
    k = len(ambient_orders)
    if k == 0:
        return []
    cols = [list(c) for c in gen_cols]
    for j, d in enumerate(ambient_orders):
        col = [0] * k
        col[j] = d
        cols.append(col)
    basis = intmat.column_lattice_basis(cols, k)
    lmat = [[basis[b][i] for b in range(len(basis))] for i in range(k)]
    relation_cols = []
    for j, d in enumerate(ambient_orders):
        target = [0] * k
        target[j] = d
        expr = intmat.solve(lmat, target)
        assert expr is not None, "relation lattice must lie inside the generated lattice"
        relation_cols.append(expr)
    c_mat = [[relation_cols[j][i] for j in range(k)] for i in range(len(basis))]
    u2, t, _ = intmat.smith_normal_form(c_mat)
    u2inv = intmat.invert_unimodular(u2)
    gens = intmat.mat_mul(lmat, u2inv)
    out = []
    for i in range(len(basis)):
        order = t[i][i]
        assert order >= 1, "quotient of full-rank lattices has no free part"
        if order > 1:
            out.append((order, [gens[r][i] for r in range(k)]))
    return out


def kernel(hom: ModuleHom) -> tuple[FinModule, ModuleHom]:
    """(kernel module, inclusion into the domain)."""
    dom, cod = hom.domain, hom.codomain
    picked: list[tuple[int, int, list[int]]] = []  # (component, order, vector)
    for c, dj, ci in _component_blocks(hom):
        k, m = len(dj), len(ci)
        if k == 0:
            continue
        d_orders = [dom.orders[j] for j in dj]
        if m == 0:
            sol_cols = []  # no constraints: the whole block is kernel
            for j in range(k):
                col = [0] * k
                col[j] = 1
                sol_cols.append(col)
        else:
            block = [[hom.matrix[ci[i]][dj[j]] for j in range(k)] for i in range(m)]
            wide = [row + [0] * m for row in block]
            for i in range(m):
                wide[i][k + i] = -cod.orders[ci[i]]
            sol_cols = [col[:k] for col in intmat.kernel_basis(wide)]
        for order, vec in _subquotient(sol_cols, d_orders):
            full = [0] * dom.rank
            for local, j in enumerate(dj):
                full[j] = vec[local]
            picked.append((c, order, full))
    picked.sort(key=lambda t: t[0])
    ker = FinModule(dom.ring, tuple(p[1] for p in picked), tuple(p[0] for p in picked))
    matrix = [[picked[g][2][i] for g in range(len(picked))] for i in range(dom.rank)]
    return ker, hom_make(ker, dom, matrix)


def cokernel(hom: ModuleHom) -> tuple[FinModule, ModuleHom]:
    """(quotient module, projection from the codomain)."""
    dom, cod = hom.domain, hom.codomain
    picked: list[tuple[int, int, list[int]]] = []  # (component, order, projection row)
    for c, dj, ci in _component_blocks(hom):
        k, m = len(dj), len(ci)
        if m == 0:
            continue
        e_orders = [cod.orders[i] for i in ci]
        block = [[hom.matrix[ci[i]][dj[j]] for j in range(k)] for i in range(m)]
        wide = [block[i] + [0] * m for i in range(m)]
        for i in range(m):
            wide[i][k + i] = e_orders[i]
        u, s, _ = intmat.smith_normal_form(wide)
        for i in range(m):
            order = s[i][i]
            assert order >= 1, "codomain relations keep the quotient finite"
            if order > 1:
                row = [0] * cod.rank
                for local, idx in enumerate(ci):
                    row[idx] = u[i][local]
                picked.append((c, order, row))
    picked.sort(key=lambda t: t[0])
    quot = FinModule(cod.ring, tuple(p[1] for p in picked), tuple(p[0] for p in picked))
    matrix = [p[2] for p in picked]
    return quot, hom_make(cod, quot, matrix)


def image(hom: ModuleHom) -> tuple[FinModule, ModuleHom]:
    """(image module, inclusion into the codomain)."""
    dom, cod = hom.domain, hom.codomain
    picked: list[tuple[int, int, list[int]]] = []
    for c, dj, ci in _component_blocks(hom):
        k, m = len(dj), len(ci)
        if m == 0:
            continue
        e_orders = [cod.orders[i] for i in ci]
        cols = []
        for j in range(k):
            cols.append([hom.matrix[ci[i]][dj[j]] for i in range(m)])
        for order, vec in _subquotient(cols, e_orders):
            full = [0] * cod.rank
            for local, idx in enumerate(ci):
                full[idx] = vec[local]
            picked.append((c, order, full))
    picked.sort(key=lambda t: t[0])
    img = FinModule(cod.ring, tuple(p[1] for p in picked), tuple(p[0] for p in picked))
    matrix = [[picked[g][2][i] for g in range(len(picked))] for i in range(cod.rank)]
    return img, hom_make(img, cod, matrix)


def solve_hom(hom: ModuleHom, target: Element) -> Optional[Element]:
    """Some preimage of ``target`` under ``hom``, or None.

    Solved exactly: A x + diag(e) z = target over the integers.
    """
    dom, cod = hom.domain, hom.codomain
    if cod.rank == 0:
        return dom.zero()
    wide = [list(row) + [0] * cod.rank for row in hom.matrix]
    for i in range(cod.rank):
        wide[i][dom.rank + i] = cod.orders[i]
    sol = intmat.solve(wide, list(target))
    if sol is None:
        return None
    return dom.reduce(sol[:dom.rank])


def is_injective(hom: ModuleHom) -> bool:
    return kernel(hom)[0].size == 1


def is_surjective(hom: ModuleHom) -> bool:
    return cokernel(hom)[0].size == 1


def is_isomorphism(hom: ModuleHom) -> bool:
    return (hom.domain.size == hom.codomain.size
            and is_injective(hom) and is_surjective(hom))


def invert(hom: ModuleHom) -> ModuleHom:
    """Inverse of an isomorphism, built by solving on generators."""
    if not is_isomorphism(hom):
        raise StructureError("hom is not invertible")
    cols = []
    for i in range(hom.codomain.rank):
        gen = tuple(1 if j == i else 0 for j in range(hom.codomain.rank))
        pre = solve_hom(hom, gen)
        assert pre is not None
        cols.append(pre)
    matrix = [[cols[i][r] for i in range(hom.codomain.rank)]
              for r in range(hom.domain.rank)]
    return hom_make(hom.codomain, hom.domain, matrix)


# -- derived binary operations -------------------------------------------


def mod_equalizer(u: ModuleHom, v: ModuleHom) -> tuple[FinModule, ModuleHom]:
    if (u.domain, u.codomain) != (v.domain, v.codomain):
        raise StructureError("equalizer needs a parallel pair")
    return kernel(u.sub(v))


def mod_coequalizer(u: ModuleHom, v: ModuleHom) -> tuple[FinModule, ModuleHom]:
    if (u.domain, u.codomain) != (v.domain, v.codomain):
        raise StructureError("coequalizer needs a parallel pair")
    return cokernel(u.sub(v))


def mod_pullback(f: ModuleHom, g: ModuleHom) -> tuple[FinModule, ModuleHom, ModuleHom]:
    """Pullback of a cospan: (object, projection to dom f, projection to dom g)."""
    if f.codomain != g.codomain:
        raise StructureError("pullback needs a cospan")
    total, (i1, i2), (p1, p2) = direct_sum(f.domain, g.domain)
    diff = f.compose(p1).sub(g.compose(p2))
    ker, incl = kernel(diff)
    return ker, p1.compose(incl), p2.compose(incl)


# -- hom modules ----------------------------------------------------------


@dataclass(frozen=True)
class HomModule:
    """The R-module of homomorphisms M -> N, with its matrix coding.

    ``module`` elements are coefficient tuples, one coordinate per matrix
    position (i, j) whose cyclic hom group Z/gcd(d_j, e_i) is nontrivial;
    ``to_hom`` and ``from_hom`` convert between tuples and homs.
    """

    source: FinModule
    target: FinModule
    module: FinModule
    positions: tuple[tuple[int, int], ...]  # (codomain row, domain column)

    def to_hom(self, elt: Element) -> ModuleHom:
        matrix = [[0] * self.source.rank for _ in range(self.target.rank)]
        for coord, (i, j) in enumerate(self.positions):
            e = self.target.orders[i]
            g = self.module.orders[coord]
            matrix[i][j] = (elt[coord] * (e // g)) % e
        return hom_make(self.source, self.target, matrix)

    def from_hom(self, hom: ModuleHom) -> Element:
        if (hom.domain, hom.codomain) != (self.source, self.target):
            raise StructureError("hom has the wrong endpoints")
        out = []
        for coord, (i, j) in enumerate(self.positions):
            e = self.target.orders[i]
            g = self.module.orders[coord]
            step = e // g
            a = hom.matrix[i][j]
            assert a % step == 0, "admissible entries are multiples of e/gcd"
            out.append((a // step) % g)
        return tuple(out)

    def all_homs(self) -> Iterator[ModuleHom]:
        for elt in self.module.elements():
            yield self.to_hom(elt)


def hom_module(m: FinModule, n: FinModule) -> HomModule:
    """Module of all homomorphisms M -> N over the shared ring."""
    if m.ring != n.ring:
        raise StructureError("hom module needs a shared ring")
    orders: list[int] = []
    comps: list[int] = []
    positions: list[tuple[int, int]] = []
    for i, (e, ec) in enumerate(zip(n.orders, n.components)):
        for j, (d, dc) in enumerate(zip(m.orders, m.components)):
            if dc != ec:
                continue
            g = gcd(d, e)
            if g > 1:
                orders.append(g)
                comps.append(ec)
                positions.append((i, j))
    module = FinModule(m.ring, tuple(orders), tuple(comps))
    return HomModule(m, n, module, tuple(positions))


# -- canonical form and isomorphism ---------------------------------------


def _prime_powers(d: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            k = 0
            while d % p == 0:
                d //= p
                k += 1
            out.append((p, p ** k))
        p += 1
    if d > 1:
        out.append((d, d))
    return out


def canonical_decomposition(m: FinModule) -> tuple[FinModule, ModuleHom, ModuleHom]:
    """(canonical module, iso to it, iso from it).

    The canonical form splits every cyclic factor into prime powers and
    sorts coordinates by (component, prime, power), so two modules are
    isomorphic exactly when their canonical forms are equal.
    """
    entries = []  # (component, prime, power, source coord, crt unit)
    for j, (d, c) in enumerate(zip(m.orders, m.components)):
        for p, q in _prime_powers(d):
            rest = d // q
            # unit u with u = 1 mod q and u = 0 mod d/q
            if rest == 1:
                u = 1
            else:
                inv = pow(rest % q, -1, q)
                u = (rest * inv) % d
            entries.append((c, p, q, j, u))
    entries.sort(key=lambda t: (t[0], t[1], t[2], t[3]))
    canon = FinModule(m.ring, tuple(e[2] for e in entries),
                      tuple(e[0] for e in entries))
    fwd = [[0] * m.rank for _ in range(len(entries))]
    bwd = [[0] * len(entries) for _ in range(m.rank)]
    for row, (c, p, q, j, u) in enumerate(entries):
        fwd[row][j] = 1          # x mod q
        bwd[j][row] = u          # CRT reassembly
    return canon, hom_make(m, canon, fwd), hom_make(canon, m, bwd)


def modules_isomorphic(m: FinModule, n: FinModule) -> Optional[ModuleHom]:
    """An explicit isomorphism M -> N when one exists, else None."""
    if m.ring != n.ring:
        return None
    cm, to_cm, _ = canonical_decomposition(m)
    cn, _, from_cn = canonical_decomposition(n)
    if cm != cn:
        return None
    return from_cn.compose(to_cm)


# -- diagrams of modules ---------------------------------------------------


@dataclass(frozen=True)
class ModDiagram:
    """A functor from a finite shape category into modules over one ring."""

    shape: FinCategory
    nodes: Mapping[str, FinModule]
    edges: Mapping[str, ModuleHom]

    def __post_init__(self) -> None:
        edges = dict(self.edges)
        for n in self.shape.objects:
            if n not in self.nodes:
                raise StructureError(f"diagram undefined on node {n}")
        for a in self.shape.arrows:
            if self.shape.is_identity(a.name):
                edges.setdefault(a.name, identity_hom(self.nodes[a.source]))
            if a.name not in edges:
                raise StructureError(f"diagram undefined on arrow {a.name}")
            e = edges[a.name]
            if e.domain != self.nodes[a.source] or e.codomain != self.nodes[a.target]:
                raise StructureError(f"diagram edge {a.name} has wrong endpoints")
        object.__setattr__(self, "edges", edges)
        for (g, f), h in self.shape.composition.items():
            if edges[g].compose(edges[f]) != edges[h]:
                raise StructureError(f"diagram is not functorial at ({g}, {f})")

    def on_edge(self, name: str) -> ModuleHom:
        return self.edges[name]


@dataclass(frozen=True)
class ModLimit:
    module: FinModule
    legs: Mapping[str, ModuleHom]        # node -> (limit -> node value)
    product: FinModule
    inclusion: ModuleHom                 # limit -> product
    projections: Mapping[str, ModuleHom]


@dataclass(frozen=True)
class ModColimit:
    module: FinModule
    legs: Mapping[str, ModuleHom]        # node -> (node value -> colimit)
    coproduct: FinModule
    surjection: ModuleHom                # coproduct -> colimit
    injections: Mapping[str, ModuleHom]


def mod_limit(diagram: ModDiagram) -> ModLimit:
    """The joint equalizer inside the product of the node modules."""
    nodes = list(diagram.shape.objects)
    prod_mod, _, projs = direct_sum_many([diagram.nodes[n] for n in nodes])
    proj_of = dict(zip(nodes, projs))
    rows = []
    for a in diagram.shape.arrows:
        if diagram.shape.is_identity(a.name):
            continue
        rows.append(diagram.on_edge(a.name).compose(proj_of[a.source])
                    .sub(proj_of[a.target]))
    if not rows:
        incl = identity_hom(prod_mod)
        return ModLimit(prod_mod, dict(proj_of), prod_mod, incl, proj_of)
    _, injs, _ = direct_sum_many([r.codomain for r in rows])
    total = injs[0].compose(rows[0])
    for inj, row in zip(injs[1:], rows[1:]):
        total = total.add(inj.compose(row))
    lim, incl = kernel(total)
    return ModLimit(lim, {n: proj_of[n].compose(incl) for n in nodes},
                    prod_mod, incl, proj_of)


def mod_colimit(diagram: ModDiagram) -> ModColimit:
    """The quotient of the coordinate sum by the edge relations."""
    nodes = list(diagram.shape.objects)
    sum_mod, injs, _ = direct_sum_many([diagram.nodes[n] for n in nodes])
    inj_of = dict(zip(nodes, injs))
    cols = []
    for a in diagram.shape.arrows:
        if diagram.shape.is_identity(a.name):
            continue
        cols.append(inj_of[a.target].compose(diagram.on_edge(a.name))
                    .sub(inj_of[a.source]))
    if not cols:
        surj = identity_hom(sum_mod)
        return ModColimit(sum_mod, dict(inj_of), sum_mod, surj, inj_of)
    _, _, projs = direct_sum_many([c.domain for c in cols])
    total = cols[0].compose(projs[0])
    for col, proj in zip(cols[1:], projs[1:]):
        total = total.add(col.compose(proj))
    quot, surj = cokernel(total)
    return ModColimit(quot, {n: surj.compose(inj_of[n]) for n in nodes},
                      sum_mod, surj, inj_of)


def direct_sum_hom(homs: Sequence[ModuleHom]) -> ModuleHom:
    """Block-diagonal hom between the direct sums of domains and codomains."""
    dom, _, projs = direct_sum_many([h.domain for h in homs])
    cod, injs, _ = direct_sum_many([h.codomain for h in homs])
    total = zero_hom(dom, cod)
    for h, inj, proj in zip(homs, injs, projs):
        total = total.add(inj.compose(h).compose(proj))
    return total
