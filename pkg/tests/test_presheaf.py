"""Presheaves, natural transformations, and colimit machinery."""

import random

import pytest

from oracles import (brute_nat_transformations, random_mod_presheaf,
                     random_monoid_category, random_poset_category,
                     random_set_presheaf)
from toposkit.category import category, discrete_shape, validate_functor
from toposkit.diagnostics import StructureError
from toposkit.presheaf import (PresheafDiagram, category_of_elements,
                               colimit_of_representables, compose_morphisms,
                               constant_presheaf, free_module, free_unit,
                               identity_morphism, is_natural_iso,
                               mod_presheaf, nat_transformations,
                               pointwise_colimit, pointwise_limit,
                               presheaf_morphism, set_presheaf,
                               terminal_presheaf, validate_presheaf,
                               yoneda_classify, yoneda_element, yoneda_mod,
                               yoneda_postcompose, yoneda_set, zero_presheaf)


def test_functor_law_violations_are_reported_not_raised(chain3):
    p = set_presheaf(
        chain3,
        {"U": ("u",), "V": ("a", "b"), "W": ("w",)},
        {"i": {"a": "u", "b": "u"}, "j": {"w": "a"},
         "k": {"w": "u"}},
    )
    assert validate_presheaf(p).ok
    q = set_presheaf(
        chain3,
        {"U": ("0", "1"), "V": ("a", "b"), "W": ("w",)},
        {"i": {"a": "0", "b": "1"}, "j": {"w": "a"},
         "k": {"w": "1"}},  # should be "0" to match the composite
    )
    report = validate_presheaf(q)
    assert not report.ok
    assert any(v.kind == "composition" for v in report.violations)


def test_morphism_naturality_is_enforced(c2, worked_f):
    g = constant_presheaf(c2, ("x", "y"))
    with pytest.raises(StructureError, match="naturality fails along i"):
        presheaf_morphism(worked_f, g, {"V": {"p": "x"}, "U": {"a": "y", "b": "y"}})
    ok = presheaf_morphism(worked_f, g, {"V": {"p": "x"}, "U": {"a": "x", "b": "y"}})
    assert ok.apply("U", "a") == "x"


def test_yoneda_bijection_on_the_worked_presheaf(c2, worked_f):
    for c in c2.objects:
        nats = nat_transformations(yoneda_set(c2, c), worked_f)
        assert len(nats) == len(worked_f.value(c))
        # evaluation at the identity is injective onto the value
        seen = {yoneda_element(phi, c) for phi in nats}
        assert seen == set(worked_f.value(c))
        for phi in nats:
            back = yoneda_classify(worked_f, c, yoneda_element(phi, c))
            assert all(back.at(x) == phi.at(x) for x in c2.objects)


def test_yoneda_bijection_is_natural_along_base_arrows():
    rng = random.Random(41)
    for _ in range(20):
        cat = random_poset_category(rng)
        f = random_set_presheaf(rng, cat, 3)
        for a in cat.arrows:
            if cat.is_identity(a.name):
                continue
            # evaluate-then-restrict equals precompose-then-evaluate
            for phi in nat_transformations(yoneda_set(cat, a.target), f):
                lhs = f.restrict(a.name, yoneda_element(phi, a.target))
                pre = yoneda_postcompose(cat, a.name)
                rhs = yoneda_element(compose_morphisms(phi, pre), a.source)
                assert lhs == rhs


def test_yoneda_mod_counts_match_module_sizes(c2, chain3):
    rng = random.Random(42)
    for base in (c2, chain3):
        for _ in range(10):
            f = random_mod_presheaf(rng, base, 4)
            for c in base.objects:
                nats = nat_transformations(yoneda_mod(base, 4, c), f)
                assert len(nats) == f.value(c).size
                seen = {yoneda_element(phi, c) for phi in nats}
                assert seen == set(f.value(c).elements())


def test_nat_transformation_enumeration_matches_brute_filter():
    rng = random.Random(43)
    for _ in range(25):
        if rng.random() < 0.5:
            cat = random_poset_category(rng)
            table = None
        else:
            cat, table = random_monoid_category(rng)
        p = random_set_presheaf(rng, cat, 2, table)
        q = random_set_presheaf(rng, cat, 2, table)
        got = nat_transformations(p, q)
        want = brute_nat_transformations(p, q)
        assert len(got) == len(want)
        as_dicts = [{c: dict(phi.at(c)) for c in cat.objects} for phi in got]
        for w in want:
            assert w in as_dicts


def test_category_of_elements_counts_and_projects(worked_f):
    elts = category_of_elements(worked_f)
    assert len(elts.category.objects) == 3  # p, a, b
    assert validate_functor(elts.projection).ok
    # one non-identity arrow: (U, a) -> (V, p) over i
    nonid = [a for a in elts.category.arrows
             if not elts.category.is_identity(a.name)]
    assert len(nonid) == 1
    src = elts.element_of[nonid[0].source]
    tgt = elts.element_of[nonid[0].target]
    assert src == ("U", "a") and tgt == ("V", "p")
    assert elts.arrow_base[nonid[0].name] == "i"


def test_colimit_of_representables_recovers_set_presheaves(worked_f):
    rng = random.Random(44)
    cases = [worked_f,
             yoneda_set(worked_f.base, "U"),
             terminal_presheaf(worked_f.base)]
    for _ in range(12):
        cat = random_poset_category(rng)
        cases.append(random_set_presheaf(rng, cat, 3))
    for f in cases:
        rec = colimit_of_representables(f)
        assert rec.comparison.target is f or rec.comparison.target == f
        assert is_natural_iso(rec.comparison)


def test_colimit_of_representables_recovers_mod_presheaves(c2, chain3):
    rng = random.Random(45)
    cases = [zero_presheaf(c2, 2), yoneda_mod(c2, 2, "V")]
    for _ in range(8):
        cases.append(random_mod_presheaf(rng, rng.choice((c2, chain3)), 4))
    for f in cases:
        rec = colimit_of_representables(f)
        assert is_natural_iso(rec.comparison)


def test_pointwise_limits_and_colimits_of_discrete_diagrams(c2, worked_f):
    other = yoneda_set(c2, "V")
    dia = PresheafDiagram(discrete_shape(2),
                          {"n0": worked_f, "n1": other}, {})
    prod = pointwise_limit(dia).presheaf
    copr = pointwise_colimit(dia).presheaf
    for c in c2.objects:
        assert len(prod.value(c)) == len(worked_f.value(c)) * len(other.value(c))
        assert len(copr.value(c)) == len(worked_f.value(c)) + len(other.value(c))
    assert validate_presheaf(prod).ok and validate_presheaf(copr).ok


def test_free_modules_have_basis_units(r2):
    m = free_module(r2, 3)
    assert m.size == 8
    assert free_unit(r2, 3, 1) == (0, 1, 0)


def test_zero_presheaf_is_terminal_among_mod_presheaves(c2):
    z = zero_presheaf(c2, 2)
    y = yoneda_mod(c2, 2, "V")
    assert len(nat_transformations(y, z)) == 1
    assert len(nat_transformations(z, y)) == 1


def test_identity_and_composition_of_morphisms(worked_f):
    ident = identity_morphism(worked_f)
    assert compose_morphisms(ident, ident).at("U") == ident.at("U")
    assert is_natural_iso(ident)
