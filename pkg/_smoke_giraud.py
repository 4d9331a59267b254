import time

from toposkit.category import category
from toposkit.giraud import (abstract_scope, all_submodules, audit_coproducts,
                             audit_epi_coequalizer,
                             audit_equivalence_relations, audit_exact_forks,
                             audit_generators, presheaf_scope, rmod_scope,
                             submodule_inclusion, span)
from toposkit.modules import module_make, ring_make

t0 = time.time()

c2 = category(["U", "V"], [("i", "U", "V")], {})

# abstract scope on the two-object poset
rep = audit_coproducts(abstract_scope(c2))
print("C2 coproducts:", rep.summary())
viol = rep.with_status("violation")
assert not rep.ok
assert any(v.subject[:2] == ("V", "V") for v in viol), viol
assert not any(v.subject[:2] == ("U", "V") for v in viol)

rep = audit_epi_coequalizer(abstract_scope(c2))
print("C2 epis:", rep.summary())
assert not rep.ok
assert rep.with_status("violation")[0].subject == ("i",)

rep = audit_equivalence_relations(abstract_scope(c2))
print("C2 equiv:", rep.summary())
assert rep.ok

rep = audit_exact_forks(abstract_scope(c2))
print("C2 forks:", rep.summary())
assert rep.ok   # i's fork is not exact, so nothing to pull back

rep = audit_generators(abstract_scope(c2), ["U"])
print("C2 generators:", rep.summary())
assert rep.ok

# coproduct genuinely absent: two objects, no connecting arrows
disc = category(["A", "B"], [], {})
rep = audit_coproducts(abstract_scope(disc))
print("discrete coproducts:", rep.summary())
assert rep.ok
assert any(i.status == "hypothesis-missing" for i in rep.items)

# empty generating set fails once a distinct parallel pair exists
par = category(["A", "B"], [("u", "A", "B"), ("v", "A", "B")], {})
rep = audit_generators(abstract_scope(par), [])
print("parallel generators:", rep.summary())
assert not rep.ok
rep = audit_generators(abstract_scope(par), ["A"])
assert rep.ok

print("abstract done", round(time.time() - t0, 2))

# submodule enumeration oracle checks
r2 = ring_make(2)
m22 = module_make(r2, [2, 2])
subs = all_submodules(m22)
assert len(subs) == 5, len(subs)          # 0, three lines, everything
m4 = module_make(ring_make(4), [4])
assert len(all_submodules(m4)) == 3       # 0, 2Z/4, Z/4
m2222 = module_make(r2, [2, 2, 2, 2])
assert len(all_submodules(m2222)) == 67   # Gaussian binomial sum for F2^4
for elems in subs:
    sub, incl = submodule_inclusion(m22, elems)
    assert {incl.apply(x) for x in sub.elements()} == set(elems)
assert span(m22, [(1, 0)]) == frozenset({(0, 0), (1, 0)})
print("submodules done", round(time.time() - t0, 2))

# module scope over Z/2 (small bound for the smoke)
sc = rmod_scope(2, bound=4, hom_sample=8)
rep = audit_coproducts(sc)
print("rmod coproducts:", rep.summary())
assert rep.ok
notes = rep.with_status("note")
assert len(notes) == 2      # strictness caveat + diagonal instability witness

rep = audit_epi_coequalizer(sc)
print("rmod epis:", rep.summary())
assert rep.ok
assert len(rep.with_status("pass")) == 1 + 2 + 5   # 0, Z/2, Z/2+Z/2 quotients

rep = audit_equivalence_relations(sc)
print("rmod equiv:", rep.summary())
assert rep.ok
assert rep.with_status("pass")

rep = audit_exact_forks(sc)
print("rmod forks:", rep.summary())
assert rep.ok
print("rmod scope done", round(time.time() - t0, 2))

rep = audit_generators(sc)
print("rmod generators:", rep.summary())
assert rep.ok

t1 = time.time()
sc16 = rmod_scope(2, bound=16, hom_sample=8)
rep = audit_exact_forks(sc16)
assert rep.ok
print("rmod forks bound16:", rep.summary(), round(time.time() - t1, 2))

t1 = time.time()
rep = audit_equivalence_relations(sc16)
assert rep.ok
print("rmod equiv bound16:", rep.summary(), round(time.time() - t1, 2))

# presheaf scope on C2
t1 = time.time()
psc = presheaf_scope(c2, bound=2, hom_sample=12)
for fn in (audit_coproducts, audit_epi_coequalizer,
           audit_equivalence_relations, audit_exact_forks, audit_generators):
    rep = fn(psc)
    print("psh", rep.summary(), round(time.time() - t1, 2))
    assert rep.ok, rep.with_status("violation")

print("giraud smoke OK", round(time.time() - t0, 2))
