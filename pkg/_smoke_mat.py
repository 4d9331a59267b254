import sys, time
sys.path.insert(0, "src")

from toposkit.category import category, validate_category
from toposkit.materialize import (all_set_presheaves, all_mod_presheaves,
                                  small_modules, nat_module,
                                  materialize_presheaf_category,
                                  materialize_module_category)
from toposkit.presheaf import nat_transformations, yoneda_set, yoneda_mod

c2 = category(["V", "U"], [("i", "U", "V")], {})

t0 = time.time()
sp = all_set_presheaves(c2, 2)
print("set presheaves <=2:", len(sp), f"({time.time()-t0:.2f}s)")
assert len(sp) == 11

mp = all_mod_presheaves(c2, 2, 2)
print("mod presheaves <=2:", len(mp), [(p.value('V').size, p.value('U').size) for p in mp])
assert len(mp) == 5

print("small_modules(6,6):", [str(m) for m in small_modules(6, 6)])
assert len(small_modules(6, 6)) == 5

# nat module vs enumeration, dual route
for p in mp:
    for q in mp:
        nm = nat_module(p, q)
        listed = nat_transformations(p, q)
        assert nm.module.size == len(listed), (str(p), str(q))
print("nat_module sizes match enumeration on all 25 pairs")

t0 = time.time()
amb_mod = materialize_presheaf_category(mp, bound=2)
print(f"mod ambient: {len(amb_mod.category.objects)} objects, "
      f"{len(amb_mod.category.arrows)} arrows ({time.time()-t0:.2f}s)")
rep = validate_category(amb_mod.category)
assert rep.ok
yv = yoneda_mod(c2, 2, "V")
yu = yoneda_mod(c2, 2, "U")
print("y_mod(V) is", amb_mod.object_name(yv), " y_mod(U) is", amb_mod.object_name(yu))

t0 = time.time()
amb_set = materialize_presheaf_category(sp, bound=2)
print(f"set ambient: {len(amb_set.category.objects)} objects, "
      f"{len(amb_set.category.arrows)} arrows ({time.time()-t0:.2f}s)")
t0 = time.time()
rep = validate_category(amb_set.category)
assert rep.ok
print(f"set ambient validates ({time.time()-t0:.2f}s)")
ysv = yoneda_set(c2, "V")
ysu = yoneda_set(c2, "U")
print("y(V) is", amb_set.find_isomorphic(ysv), " y(U) is", amb_set.find_isomorphic(ysu))

t0 = time.time()
fm = materialize_module_category(2, 4)
print(f"FinMod(Z/2)<=4: {len(fm.category.objects)} objects, "
      f"{len(fm.category.arrows)} arrows ({time.time()-t0:.2f}s)")
assert validate_category(fm.category).ok
sizes = {n: m.size for n, m in fm.things.items()}
print("module sizes:", sizes)
e = fm.hom_structure("M2", "M2")
print("End(M2) size:", e.module.size)
print("materialize smoke OK")
