import sys
sys.path.insert(0, "src")

from toposkit.category import category
from toposkit.modules import module_make, zero_module, zero_hom, hom_make, identity_hom
from toposkit.presheaf import set_presheaf, mod_presheaf, nat_transformations
from toposkit.topology import Sieve, topology_from_sieves, min_cover
from toposkit.sheaf import (matching_families, matching_families_elementwise,
                            amalgamations, is_sheaf, is_separated, is_sheaf_basis,
                            plus_construction, sheafify, plus_morphism,
                            factor_through_unit, is_locally_surjective,
                            sheaf_epi_check, MatchingFamily, family_label)

c2 = category(["V", "U"], [("i", "U", "V")], {})
j2 = topology_from_sieves(c2, {"V": [["i"]]})
print("J2 covers:", {c: [sorted(s.arrows) for s in j2.at(c)] for c in c2.objects})

F = set_presheaf(c2, {"V": ["p"], "U": ["a", "b"]}, {"i": {"p": "a"}})

si = Sieve("V", frozenset({"i"}))
fams = matching_families(F, si)
print("families over {i}:", [family_label(f) for f in fams])
assert len(fams) == 2
assert matching_families_elementwise(F, si) == fams
fa = [f for f in fams if f.assignment["i"] == "a"][0]
fb = [f for f in fams if f.assignment["i"] == "b"][0]
assert amalgamations(F, si, fa) == ["p"]
assert amalgamations(F, si, fb) == []

chk = is_sheaf(F, j2)
print("is_sheaf(F):", chk.ok, chk.detail)
assert not chk.ok
wc, ws, wf = chk.witness
assert wc == "V" and ws.arrows == frozenset({"i"}) and wf.assignment["i"] == "b"
assert is_separated(F, j2).ok

basis_chk = is_sheaf_basis(F, j2)
print("is_sheaf_basis(F):", basis_chk.ok)
assert not basis_chk.ok

print("min_cover(V):", sorted(min_cover(j2, "V").arrows))

plus = plus_construction(F, j2)
Fp = plus.presheaf
print("F+(V):", Fp.value("V"))
print("F+(U):", Fp.value("U"))
assert len(Fp.value("V")) == 2 and len(Fp.value("U")) == 2
rest = Fp.restrictions["i"]
print("F+(i):", dict(rest))
assert len(set(rest.values())) == 2
assert is_sheaf(Fp, j2).ok
assert is_sheaf_basis(Fp, j2).ok
print("unit at V:", dict(plus.unit.at("V")))
print("unit at U:", dict(plus.unit.at("U")))

res = sheafify(F, j2)
print("a(F)(V):", res.sheaf.value("V"), " a(F)(U):", res.sheaf.value("U"))
assert len(res.sheaf.value("V")) == 2

psi = factor_through_unit(plus.unit, j2)
print("factorization found:", {c: dict(psi.at(c)) for c in c2.objects})

loc = is_locally_surjective(plus.unit, j2)
print("unit locally surjective:", loc.ok)
assert loc.ok

epi = sheaf_epi_check(plus.unit, j2, [Fp, res.sheaf])
print("unit epi:", epi.epi, "|", epi.detail)
assert epi.epi

# module flavor: G(V) = Z/2, G(U) = 0 over the ring Z/2
zm = zero_module(2)
gv = module_make(2, [(0, 2)])
G = mod_presheaf(c2, 2, {"V": gv, "U": zm}, {"i": zero_hom(gv, zm)})
gchk = is_sheaf(G, j2)
print("is_sheaf(G):", gchk.ok, gchk.detail)
assert not gchk.ok and not is_separated(G, j2).ok
gplus = plus_construction(G, j2)
print("G+(V):", gplus.presheaf.value("V"), " G+(U):", gplus.presheaf.value("U"))
assert gplus.presheaf.value("V").is_zero and gplus.presheaf.value("U").is_zero
ga = sheafify(G, j2)
assert ga.sheaf.value("V").is_zero

# a module sheaf big enough to force the linear route (size 128 > 64)
big = module_make(2, [(0, 2)] * 7)
H = mod_presheaf(c2, 2, {"V": big, "U": big}, {"i": identity_hom(big)})
hchk = is_sheaf(H, j2)
print("is_sheaf(H) via linear route:", hchk.ok)
assert hchk.ok
hplus = plus_construction(H, j2)
assert hplus.presheaf.value("V").size == 128

# plus is functorial: induced map on a morphism F -> F
ident_like = nat_transformations(F, F)
print("Nat(F,F) count:", len(ident_like))
pm = plus_morphism(ident_like[0], j2)
print("plus_morphism ok, components:", {c: dict(pm.at(c)) for c in c2.objects})
print("sheaf smoke OK")
