"""Sieves, bases, and topology saturation."""

import random

import pytest

from oracles import random_site
from toposkit.category import category
from toposkit.diagnostics import BoundExceeded, StructureError
from toposkit.topology import (GrothendieckTopology, Sieve, all_sieves,
                               basis_make, epimorphic_basis, family_make,
                               generate_topology, maximal_sieve, min_cover,
                               pullback_sieve, sieve_generate, sieve_make,
                               topology_from_sieves, trivial_topology,
                               validate_basis, validate_topology)


def test_sieve_lattice_on_the_arrow_base(c2):
    at_v = all_sieves(c2, "V")
    at_u = all_sieves(c2, "U")
    assert [s.sorted_arrows() for s in at_v] == [(), ("i",), ("i", "id_V")]
    assert [s.sorted_arrows() for s in at_u] == [(), ("id_U",)]
    # {id_V} alone misses the precomposite id_V o i
    with pytest.raises(StructureError, match="not precomposition-closed"):
        sieve_make(c2, "V", ["id_V"])
    closed = sieve_generate(c2, family_make(c2, "V", ["id_V"]))
    assert closed.arrows == frozenset({"id_V", "i"})


def test_standard_topology_has_the_expected_covers(c2, j2):
    assert {s.sorted_arrows() for s in j2.at("V")} == {("i",), ("i", "id_V")}
    assert {s.sorted_arrows() for s in j2.at("U")} == {("id_U",)}
    assert validate_topology(j2).ok
    assert j2.covering(Sieve("V", frozenset({"i"})))
    assert not j2.covering(Sieve("V", frozenset()))


def test_validate_topology_catches_each_axiom(c2, j2):
    missing_max = GrothendieckTopology(
        c2, {"V": (Sieve("V", frozenset({"i"})),), "U": j2.at("U")})
    report = validate_topology(missing_max)
    assert any(v.kind == "maximal" for v in report.violations)
    unstable = GrothendieckTopology(
        c2, {"V": (maximal_sieve(c2, "V"), Sieve("V", frozenset())),
             "U": (maximal_sieve(c2, "U"),)})
    report = validate_topology(unstable)
    assert not report.ok


def test_saturation_produces_valid_topologies_on_random_sites():
    rng = random.Random(51)
    for _ in range(60):
        cat, j, _ = random_site(rng)
        assert validate_topology(j).ok
        for c in cat.objects:
            assert j.covering(maximal_sieve(cat, c))
            for s in j.at(c):
                for f in cat.arrows_into[c]:
                    assert j.covering(pullback_sieve(cat, f, s))


def test_pullback_sieve_is_the_preimage(c2, j2):
    s = Sieve("V", frozenset({"i"}))
    pulled = pullback_sieve(c2, "i", s)
    assert pulled.codomain == "U" and pulled.arrows == frozenset({"id_U"})
    assert pullback_sieve(c2, "id_V", s).arrows == s.arrows
    with pytest.raises(StructureError):
        pullback_sieve(c2, "id_U", s)


def test_trivial_topology_and_min_cover(c2, j2):
    triv = trivial_topology(c2)
    assert validate_topology(triv).ok
    assert all(len(triv.at(c)) == 1 for c in c2.objects)
    assert min_cover(j2, "V").arrows == frozenset({"i"})
    assert min_cover(j2, "U").arrows == frozenset({"id_U"})


def test_epimorphic_basis_on_the_arrow_base_validates(c2):
    basis, incl = epimorphic_basis(c2, ["U", "V"])
    fams_v = {f.sorted_arrows() for f in basis.at("V")}
    fams_u = {f.sorted_arrows() for f in basis.at("U")}
    # no parallel pairs anywhere, so even the empty family is epimorphic
    assert fams_v == {(), ("i",), ("id_V",), ("i", "id_V")}
    assert fams_u == {(), ("id_U",)}
    assert validate_basis(c2, basis).ok
    j = generate_topology(c2, basis)
    assert validate_topology(j).ok
    assert j.covering(Sieve("V", frozenset()))


def test_epimorphic_basis_requires_generators(c2):
    par = category(("A", "B"), [("u", "A", "B"), ("v", "A", "B")])
    with pytest.raises(StructureError, match="do not generate"):
        epimorphic_basis(par, ["B"])
    basis, _ = epimorphic_basis(par, ["A", "B"])
    # the empty family separates nothing at A, where u and v leave
    assert {f.sorted_arrows() for f in basis.at("A")} == {("id_A",)}
    assert len(basis.at("B")) == 8
    # this category has no pullback of u along v, and the validator says
    # which clause that starves instead of crashing
    report = validate_basis(par, basis)
    assert not report.ok
    assert {v.kind for v in report.violations} <= {"pullback-missing",
                                                   "stability"}


def test_invalid_bases_are_named_by_clause(c2):
    # missing the identity singleton breaks the isomorphism clause
    basis = basis_make(c2, {"V": [["i"]], "U": [["id_U"]]})
    report = validate_basis(c2, basis)
    assert any(v.kind == "isomorphism" for v in report.violations)
    with pytest.raises(StructureError, match="basis is invalid"):
        generate_topology(c2, basis)
    # the same seeds saturate fine when fed as raw sieves
    j = topology_from_sieves(c2, {"V": [["i"]], "U": [["id_U"]]})
    assert validate_topology(j).ok


def test_fanin_cap_fails_loudly():
    star_arrows = [(f"a{k}", f"S{k}", "C") for k in range(13)]
    objs = ["C"] + [f"S{k}" for k in range(13)]
    star = category(objs, star_arrows)
    with pytest.raises(BoundExceeded, match="exceeds"):
        all_sieves(star, "C")
    # any leg subset is a sieve; adding id_C forces the maximal one
    assert len(all_sieves(star, "C", cap=14)) == 2 ** 13 + 1
