"""Scratch smoke for reconstruction.py; deleted before packaging."""

from toposkit.category import category, full_subcategory
from toposkit.diagnostics import StructureError
from toposkit.materialize import (all_mod_presheaves, all_set_presheaves,
                                  materialize_module_category,
                                  materialize_presheaf_category)
from toposkit.modules import ring_make
from toposkit.presheaf import (compose_morphisms, mod_presheaf, set_presheaf,
                               yoneda_mod, yoneda_set, zero_presheaf)
from toposkit.reconstruction import (SiteContext, adjunction_check,
                                     build_site, coproduct_comparison_check,
                                     counit_check, embedding_tally,
                                     hom_functor_R, morphism_to_nat_trans,
                                     objects_are_sheaves,
                                     restricted_hom_presheaf, tensor_with_A,
                                     unit_check)
from toposkit.topology import trivial_topology

c2 = category(["U", "V"], [("i", "U", "V")], {})


def part_a_plain_c2():
    ctx = build_site(c2, ["U", "V"])
    assert set(ctx.site.objects) == {"U", "V"}
    assert ctx.reports["basis"].ok
    assert ctx.reports["topology"].ok
    assert ctx.reports["giraud"] is not None
    # empty families are jointly epimorphic in a poset, so empty sieves cover
    assert any(len(s.arrows) == 0 for s in ctx.topology.at("U"))
    assert any(len(s.arrows) == 0 for s in ctx.topology.at("V"))

    sheaves = objects_are_sheaves(ctx)
    assert sheaves["V"].ok
    assert not sheaves["U"].ok and sheaves["U"].witness is not None
    mod_sheaves = objects_are_sheaves(ctx, ring=2)
    assert not mod_sheaves["U"].ok and not mod_sheaves["V"].ok

    tally = embedding_tally(ctx)
    assert tally.ok and tally.full and tally.faithful
    counts = {(x, y): (h, n) for x, y, h, n in tally.pairs}
    assert counts[("V", "U")] == (0, 0) and counts[("U", "V")] == (1, 1)
    # free linearization keeps faithfulness but adds module maps (the zero
    # map at least), so fullness fails over a plain ambient
    tally_mod = embedding_tally(ctx, ring=2)
    assert tally_mod.faithful and not tally_mod.full

    m_i = morphism_to_nat_trans(ctx, "i")
    m_idu = morphism_to_nat_trans(ctx, c2.id_of("U"))
    assert compose_morphisms(m_i, m_idu) == m_i
    assert morphism_to_nat_trans(ctx, "i", ring=2).at("U") is not None

    yv = yoneda_set(ctx.site, "V")
    t = tensor_with_A(ctx, yv)
    assert t is not None and t.obj == "V"
    assert t.route == "elements colimit, agreeing with the presentation"
    assert unit_check(ctx, None, yv, tensor=t).ok

    yu = yoneda_set(ctx.site, "U")
    t2 = tensor_with_A(ctx, yu)
    assert t2 is not None and t2.obj == "U"
    u2 = unit_check(ctx, None, yu, tensor=t2)
    assert u2.ok and u2.sheaf is False

    empty = set_presheaf(ctx.site, {"U": (), "V": ()}, {"i": {}})
    t3 = tensor_with_A(ctx, empty)
    assert t3 is not None and t3.obj == "U"

    rep = adjunction_check(ctx, None, yv, "V", tensor=t)
    assert rep.ok and rep.bijective
    rep2 = adjunction_check(ctx, None, empty, "V", tensor=t3)
    assert rep2.ok

    assert counit_check(ctx, None, "U").ok
    assert counit_check(ctx, None, "V").ok

    one_obj = build_site(c2, ["V"], audit=False) if False else None
    print("part A ok")


def part_b_one_object_site():
    ctx = build_site(c2, ["V"])
    assert ctx.site.objects == ("V",)
    p = restricted_hom_presheaf(ctx, "U")
    assert p.value("V") == ()
    q = restricted_hom_presheaf(ctx, "V")
    assert len(q.value("V")) == 1
    print("part B ok")


def part_c_generation_failure():
    par = category(["A", "B"], [("u", "A", "B"), ("v", "A", "B")], {})
    try:
        build_site(par, ["B"])
        raise AssertionError("expected StructureError")
    except StructureError:
        pass
    print("part C ok")


def part_d_absent_tensor():
    par = category(["A", "B"], [("u", "A", "B"), ("v", "A", "B")], {})
    ctx = build_site(par, ["A"])
    assert ctx.site.objects == ("A",)
    f2 = set_presheaf(ctx.site, {"A": ("x0", "x1")}, {})
    assert tensor_with_A(ctx, f2) is None
    f1 = set_presheaf(ctx.site, {"A": ("x0",)}, {})
    t = tensor_with_A(ctx, f1)
    assert t is not None and t.obj == "A"
    print("part D ok")


def part_e_mod_materialized():
    r2 = ring_make(2)
    things = all_mod_presheaves(c2, r2, 2)
    assert len(things) == 5
    amb = materialize_presheaf_category(things, bound=2)
    name_yu = amb.find_isomorphic(yoneda_mod(c2, r2, "U"))
    name_yv = amb.find_isomorphic(yoneda_mod(c2, r2, "V"))
    assert name_yu is not None and name_yv is not None

    ctx = build_site(amb, [name_yu, name_yv])
    hom = ctx.site.hom
    sizes = (len(hom(name_yu, name_yu)), len(hom(name_yu, name_yv)),
             len(hom(name_yv, name_yu)), len(hom(name_yv, name_yv)))
    assert sizes == (2, 2, 1, 2), sizes
    assert len(ctx.site.arrows) == 7

    sheaves = objects_are_sheaves(ctx, ring=r2)
    assert all(chk.ok for chk in sheaves.values()), {
        k: v.detail for k, v in sheaves.items() if not v.ok}

    tally = embedding_tally(ctx, ring=r2)
    assert tally.ok, tally.pairs

    for e in amb.category.objects:
        re = hom_functor_R(ctx, r2, e)
        t = tensor_with_A(ctx, re)
        assert t is not None and t.obj == e, (e, t and t.obj)
        assert unit_check(ctx, r2, re, tensor=t).ok
        ce = counit_check(ctx, r2, e, tensor=t)
        assert ce.ok and ce.evaluation_agrees, (e, ce.detail)

    re_u = hom_functor_R(ctx, r2, name_yu)
    t_u = tensor_with_A(ctx, re_u)
    rep = adjunction_check(ctx, r2, re_u, name_yv, tensor=t_u)
    assert rep.ok, rep
    assert rep.triangle_unit and rep.triangle_counit

    # a presheaf on which every site arrow acts as the identity is not
    # additive in the site's zero arrows, so it sits outside the image of
    # restriction: the tensor collapses and the unit cannot invert
    two = yoneda_mod(c2, r2, "V").value("V")
    ident = {a.name: None for a in ctx.site.arrows}
    from toposkit.modules import hom_make, identity_hom
    const = mod_presheaf(ctx.site, r2,
                         {name_yu: two, name_yv: two},
                         {a.name: identity_hom(two)
                          for a in ctx.site.arrows})
    t_c = tensor_with_A(ctx, const)
    assert t_c is not None
    zero_thing = amb.things[t_c.obj]
    assert all(zero_thing.value(o).size == 1 for o in c2.objects)
    uc = unit_check(ctx, r2, const, tensor=t_c)
    assert not uc.ok and uc.sheaf is True

    # zero presheaf tensors to the zero thing
    t_z = tensor_with_A(ctx, zero_presheaf(ctx.site, r2))
    assert t_z is not None and t_z.obj == t_c.obj

    by_shape = {}
    for name in amb.category.objects:
        th = amb.things[name]
        by_shape[(th.value("U").size, th.value("V").size)] = \
            by_shape.get((th.value("U").size, th.value("V").size), []) + [name]
    xa = by_shape[(2, 1)][0]
    xb = by_shape[(1, 2)][0]
    comp = coproduct_comparison_check(ctx, r2, xa, xb)
    assert comp.applicable and comp.ok, comp
    big = by_shape[(2, 2)]
    comp2 = coproduct_comparison_check(ctx, r2, big[0], big[0])
    assert not comp2.applicable
    print("part E ok")


def part_f_set_materialized():
    things = all_set_presheaves(c2, 2)
    assert len(things) == 11, len(things)
    amb = materialize_presheaf_category(things, bound=2)
    name_yu = amb.find_isomorphic(yoneda_set(c2, "U"))
    name_yv = amb.find_isomorphic(yoneda_set(c2, "V"))
    ctx = build_site(amb, [name_yu, name_yv], audit=False)
    hom = ctx.site.hom
    assert (len(hom(name_yu, name_yv)), len(hom(name_yv, name_yu))) == (1, 0)

    sheaves = objects_are_sheaves(ctx)
    assert all(chk.ok for chk in sheaves.values())

    y_site = yoneda_set(ctx.site, name_yv)
    t = tensor_with_A(ctx, y_site)
    assert t is not None and t.obj == name_yv
    assert unit_check(ctx, None, y_site, tensor=t).ok
    assert counit_check(ctx, None, name_yv).ok
    rep = adjunction_check(ctx, None, y_site, name_yu, tensor=t,
                           triangles=False)
    assert rep.ok
    print("part F ok")


def part_g_nongenerating_counit():
    r4 = ring_make(4)
    amb = materialize_module_category(r4, 4)
    sizes = {name: amb.things[name].size for name in amb.category.objects}
    z2 = next(n for n, s in sizes.items() if s == 2)
    z4 = next(n for n, s in sizes.items()
              if s == 4 and amb.things[n].rank == 1)
    try:
        build_site(amb, [z2])
        raise AssertionError("expected StructureError")
    except StructureError:
        pass
    site, incl = full_subcategory(amb.category, [z2])
    ctx = SiteContext(amb, (z2,), site, incl, trivial_topology(site), {})
    ce = counit_check(ctx, r4, z4)
    assert ce.arrow is not None and not ce.ok, ce
    ce2 = counit_check(ctx, r4, z2)
    assert ce2.ok
    print("part G ok")


if __name__ == "__main__":
    part_a_plain_c2()
    part_b_one_object_site()
    part_c_generation_failure()
    part_d_absent_tensor()
    part_e_mod_materialized()
    part_f_set_materialized()
    part_g_nongenerating_counit()
    print("reconstruction smoke green")
