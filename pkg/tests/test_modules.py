"""Finite module arithmetic cross-checked against elementwise brute force."""

import itertools
import random

import pytest

from oracles import (abelian_group_order_profile, brute_hom_count,
                     brute_image_elements, brute_kernel_elements,
                     brute_limit_elements, random_hom, random_module)
from toposkit.category import category, discrete_shape, parallel_pair_shape
from toposkit.diagnostics import StructureError
from toposkit.modules import (ModDiagram, canonical_decomposition, cokernel,
                              direct_sum, direct_sum_many, hom_make,
                              hom_module, identity_hom, image, invert,
                              is_injective, is_isomorphism, is_surjective,
                              kernel, mod_coequalizer, mod_colimit,
                              mod_equalizer, mod_limit, mod_pullback,
                              module_make, modules_isomorphic, ring_make,
                              solve_hom, validate_hom_matrix, zero_hom,
                              zero_module)


def test_module_arithmetic_basics():
    m = module_make(4, (2, 4))
    assert m.size == 8 and m.rank == 2
    assert m.add((1, 3), (1, 2)) == (0, 1)
    assert m.neg((1, 1)) == (1, 3)
    assert m.scale((3,), (1, 2)) == (1, 2)
    assert list(m.elements())[0] == (0, 0)
    assert zero_module(4).is_zero


def test_hom_congruence_is_enforced_with_a_named_entry():
    z2 = module_make(4, (2,))
    z4 = module_make(4, (4,))
    with pytest.raises(StructureError, match=r"entry \(0,0\)"):
        hom_make(z2, z4, [[1]])
    assert hom_make(z2, z4, [[2]]).apply((1,)) == (2,)
    with pytest.raises(StructureError, match="column count"):
        hom_make(z2, z4, [[2, 0]])
    report = validate_hom_matrix(z2, z4, [[1]])
    assert not report.ok


def test_kernel_and_image_and_cokernel_match_elementwise_scans():
    rng = random.Random(21)
    for ringn in (2, 4, 6):
        ring = ring_make(ringn)
        for _ in range(40):
            h = random_hom(rng, random_module(rng, ring),
                           random_module(rng, ring))
            ker, incl = kernel(h)
            want_ker = brute_kernel_elements(h)
            got_ker = {incl.apply(x) for x in ker.elements()}
            assert got_ker == want_ker
            assert len(got_ker) == ker.size
            img, emb = image(h)
            want_img = brute_image_elements(h)
            got_img = {emb.apply(x) for x in img.elements()}
            assert got_img == want_img
            assert img.size == len(want_img)
            cok, proj = cokernel(h)
            assert is_surjective(proj)
            assert cok.size * len(want_img) == h.codomain.size
            assert all(proj.apply(y) == cok.zero() for y in want_img)


def test_solve_hom_finds_preimages_exactly_when_they_exist():
    rng = random.Random(22)
    for _ in range(60):
        ring = ring_make(rng.choice((2, 4, 6)))
        h = random_hom(rng, random_module(rng, ring), random_module(rng, ring))
        img = brute_image_elements(h)
        for y in h.codomain.elements():
            x = solve_hom(h, y)
            if y in img:
                assert x is not None and h.apply(x) == y
            else:
                assert x is None


def test_hom_module_size_matches_generator_image_count():
    rng = random.Random(23)
    for _ in range(25):
        ring = ring_make(rng.choice((2, 4)))
        m, n = random_module(rng, ring), random_module(rng, ring)
        hm = hom_module(m, n)
        assert hm.module.size == brute_hom_count(m, n)
        # element/hom round trip is a bijection onto the homs
        homs = {hm.to_hom(x).matrix for x in hm.module.elements()}
        assert len(homs) == hm.module.size
        for x in hm.module.elements():
            assert hm.from_hom(hm.to_hom(x)) == x


def test_direct_sum_projections_and_injections_pair_up():
    z4 = module_make(4, (4,))
    z2 = module_make(4, (2,))
    total, injs, projs = direct_sum_many([z4, z2, z4])
    assert total.orders == (4, 2, 4)
    for k, (inj, proj) in enumerate(zip(injs, projs)):
        assert proj.compose(inj).matrix == identity_hom(inj.domain).matrix
        for j, other in enumerate(projs):
            if j != k:
                assert other.compose(inj).is_zero
    with pytest.raises(StructureError):
        direct_sum_many([])
    empty, no_injs, no_projs = direct_sum_many([], ring=ring_make(4))
    assert empty.is_zero and no_injs == [] and no_projs == []


def test_isomorphism_detection_uses_order_profiles_correctly():
    ring = ring_make(4)
    a = module_make(ring, (2, 4))
    b = module_make(ring, (4, 2))
    iso = modules_isomorphic(a, b)
    assert iso is not None and is_isomorphism(iso)
    inv = invert(iso)
    assert inv.compose(iso).matrix == identity_hom(a).matrix
    c = module_make(ring, (2, 2, 2))
    d = module_make(ring, (2, 4))
    assert modules_isomorphic(c, d) is None
    prof_a = abelian_group_order_profile(set(a.elements()), a.add, a.zero())
    prof_b = abelian_group_order_profile(set(b.elements()), b.add, b.zero())
    assert prof_a == prof_b


def test_canonical_decomposition_round_trips():
    rng = random.Random(24)
    for _ in range(30):
        ring = ring_make(rng.choice((2, 4, 6, 12)))
        m = random_module(rng, ring, max_rank=3)
        canon, fwd, back = canonical_decomposition(m)
        assert fwd.domain == m and fwd.codomain == canon
        assert back.compose(fwd).matrix == identity_hom(m).matrix
        assert fwd.compose(back).matrix == identity_hom(canon).matrix
        # every canonical factor is a prime power, and the form is stable
        for d in canon.orders:
            facs = {p for p in (2, 3, 5, 7, 11) if d % p == 0}
            assert len(facs) == 1
        again, _, _ = canonical_decomposition(canon)
        assert again == canon


def test_equalizer_and_pullback_carve_out_the_right_elements():
    rng = random.Random(25)
    for _ in range(40):
        ring = ring_make(rng.choice((2, 4)))
        a, b = random_module(rng, ring), random_module(rng, ring)
        u, v = random_hom(rng, a, b), random_hom(rng, a, b)
        eq, incl = mod_equalizer(u, v)
        want = {x for x in a.elements() if u.apply(x) == v.apply(x)}
        assert {incl.apply(x) for x in eq.elements()} == want
        c = random_module(rng, ring)
        f, g = random_hom(rng, a, b), random_hom(rng, c, b)
        pb, p1, p2 = mod_pullback(f, g)
        want_pairs = {(x, y) for x in a.elements() for y in c.elements()
                      if f.apply(x) == g.apply(y)}
        got_pairs = {(p1.apply(z), p2.apply(z)) for z in pb.elements()}
        assert got_pairs == want_pairs and pb.size == len(want_pairs)


def _random_diagram(rng, ring):
    kind = rng.choice(("discrete", "parallel", "span"))
    if kind == "discrete":
        shape = discrete_shape(rng.randint(1, 3))
        nodes = {n: random_module(rng, ring) for n in shape.objects}
        return ModDiagram(shape, nodes, {})
    if kind == "parallel":
        shape = parallel_pair_shape()
        a, b = random_module(rng, ring), random_module(rng, ring)
        return ModDiagram(shape, {"n0": a, "n1": b},
                          {"s": random_hom(rng, a, b),
                           "t": random_hom(rng, a, b)})
    shape = category(("l", "c", "r"),
                     [("lc", "l", "c"), ("rc", "r", "c")])
    l, c, r = (random_module(rng, ring) for _ in range(3))
    return ModDiagram(shape, {"l": l, "c": c, "r": r},
                      {"lc": random_hom(rng, l, c),
                       "rc": random_hom(rng, r, c)})


def test_limits_match_the_compatible_tuple_scan():
    rng = random.Random(26)
    for _ in range(40):
        ring = ring_make(rng.choice((2, 4, 6)))
        dia = _random_diagram(rng, ring)
        lim = mod_limit(dia)
        nodes = list(dia.shape.objects)
        got = {tuple(lim.legs[n].apply(x) for n in nodes)
               for x in lim.module.elements()}
        want = brute_limit_elements(dia)
        assert got == want and lim.module.size == len(want)


def test_colimits_satisfy_the_couniversal_property_by_search():
    rng = random.Random(27)
    for _ in range(25):
        ring = ring_make(rng.choice((2, 4)))
        dia = _random_diagram(rng, ring)
        colim = mod_colimit(dia)
        # legs commute with every edge
        for a in dia.shape.arrows:
            if dia.shape.is_identity(a.name):
                continue
            lhs = colim.legs[a.target].compose(dia.on_edge(a.name))
            assert lhs.matrix == colim.legs[a.source].matrix
        # cocones into a small probe module factor uniquely
        probe = module_make(ring, (ring.moduli[0],))
        nodes = list(dia.shape.objects)
        for trial in range(3):
            f = random_hom(rng, colim.module, probe)
            cocone = {n: f.compose(colim.legs[n]) for n in nodes}
            mediators = [
                h for h in _all_homs(colim.module, probe)
                if all(h.compose(colim.legs[n]).matrix == cocone[n].matrix
                       for n in nodes)]
            assert len(mediators) == 1
            assert mediators[0].matrix == f.matrix


def _all_homs(m, n):
    return list(hom_module(m, n).all_homs())


def test_coequalizer_is_the_cokernel_of_the_difference():
    rng = random.Random(28)
    for _ in range(30):
        ring = ring_make(rng.choice((2, 6)))
        a, b = random_module(rng, ring), random_module(rng, ring)
        u, v = random_hom(rng, a, b), random_hom(rng, a, b)
        coeq, proj = mod_coequalizer(u, v)
        assert proj.compose(u).matrix == proj.compose(v).matrix
        assert is_surjective(proj)
        cok, cproj = cokernel(u.sub(v))
        assert modules_isomorphic(coeq, cok) is not None
