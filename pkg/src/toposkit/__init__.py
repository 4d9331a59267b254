"""Finite category, sheaf, and module toolkit.

Everything operates on explicit finite data: categories with composition
tables, presheaves with enumerated values, Grothendieck topologies as
sieve sets, and modules over finite commutative rings.  The package is
organized bottom up:

``category``
    finite categories, functors, limits and colimits by search
``modules``
    finitely generated modules over Z/n and products, homs, kernels
``presheaf``
    set- and module-valued presheaves, Yoneda objects, elements
``topology``
    sieves, covering bases, topology saturation and validation
``sheaf``
    matching families, sheaf checks, plus construction, sheafification
``materialize``
    desk-scale models of presheaf and module categories
``giraud``
    graded audits of exactness properties on three kinds of scope
``reconstruction``
    sites from generators, restricted homs, the tensor adjunction
``dsl`` / ``cli``
    a declaration language and command line front end

The compiled search kernel is used when available; set
``TOPOSKIT_PURE_PYTHON=1`` to force the pure Python fallback.
"""

from .category import (Arrow, Cocone, Cone, FinCategory, FunctorData,
                       category, coequalizer, coproduct, cospan_shape,
                       diagram, discrete_shape, finite_colimit, finite_limit,
                       full_subcategory, generates, initial_object, is_epi,
                       is_epimorphic_family, is_iso, is_mono, kernel_pair,
                       parallel_pair_shape, pullback)
from .diagnostics import (BoundExceeded, OperationCancelled, Report,
                          StructureError, ToposkitError, Violation)
from .giraud import (AuditItem, AuditReport, AuditScope, abstract_scope,
                     all_submodules, audit_coproducts, audit_epi_coequalizer,
                     audit_equivalence_relations, audit_exact_forks,
                     audit_generators, presheaf_scope, rmod_scope, span)
from .materialize import (CancelCheck, EnrichedHom, MaterializedCategory,
                          NatModule, all_mod_presheaves, all_set_presheaves,
                          materialize_module_category,
                          materialize_presheaf_category, nat_module,
                          small_modules)
from .modules import (Element, FinModule, FinRing, HomModule, ModuleHom,
                      canonical_decomposition, cokernel, direct_sum,
                      direct_sum_many, hom_make, hom_module, identity_hom,
                      image, is_injective, is_isomorphism, is_surjective,
                      kernel, mod_coequalizer, mod_equalizer, mod_pullback,
                      module_make, modules_isomorphic, ring_make, solve_hom,
                      zero_hom, zero_module)
from .presheaf import (ElementCategory, ModPresheaf, Presheaf,
                       PresheafDiagram, PresheafMorphism, SetPresheaf,
                       category_of_elements, colimit_of_representables,
                       compose_morphisms, constant_presheaf, free_module,
                       identity_morphism, is_natural_iso, mod_presheaf,
                       nat_transformations, pointwise_colimit,
                       pointwise_limit, presheaf_morphism, set_presheaf,
                       terminal_presheaf, validate_presheaf, yoneda_classify,
                       yoneda_element, yoneda_mod, yoneda_set, zero_presheaf)
from .reconstruction import (AdjunctionReport, CoproductComparison,
                             CounitReport, EmbeddingTally, SiteContext,
                             TensorPresentation, UnitReport, adjunction_check,
                             build_site, coproduct_comparison_check,
                             counit_check, embedding_tally, hom_functor_R,
                             morphism_to_nat_trans, objects_are_sheaves,
                             restricted_hom_presheaf, tensor_with_A,
                             unit_check)
from .sheaf import (MatchingFamily, SheafCheck, amalgamations, is_sheaf,
                    is_sheaf_basis, is_locally_surjective, matching_families,
                    plus_construction, sheaf_epi_check, sheafify,
                    sheafify_morphism)
from .topology import (ArrowFamily, Basis, GrothendieckTopology, Sieve,
                       basis_make, epimorphic_basis, family_make,
                       generate_topology, maximal_sieve, min_cover,
                       pullback_sieve, sieve_generate, sieve_make,
                       topology_from_sieves, trivial_topology,
                       validate_basis, validate_topology)

__version__ = "0.1.0"
