"""Shared fixtures: the two-object arrow base, its standard topology, the
worked presheaf on it, a three-object chain, and materialized ambient
categories (built once per session; the chain ambient takes ~12 s)."""

import pytest

from toposkit.category import category
from toposkit.materialize import (all_mod_presheaves, all_set_presheaves,
                                  materialize_module_category,
                                  materialize_presheaf_category)
from toposkit.modules import ring_make
from toposkit.presheaf import set_presheaf
from toposkit.topology import topology_from_sieves


@pytest.fixture(scope="session")
def c2():
    return category(("U", "V"), [("i", "U", "V")])


@pytest.fixture(scope="session")
def j2(c2):
    # covers: {i} over V, the identity over U
    return topology_from_sieves(c2, {"V": [["i"]], "U": [["id_U"]]})


@pytest.fixture(scope="session")
def worked_f(c2):
    return set_presheaf(c2, {"V": ("p",), "U": ("a", "b")},
                        {"i": {"p": "a"}})


@pytest.fixture(scope="session")
def chain3():
    return category(
        ("U", "V", "W"),
        [("i", "U", "V"), ("j", "V", "W"), ("k", "U", "W")],
        {("j", "i"): "k"},
    )


@pytest.fixture(scope="session")
def r2():
    return ring_make(2)


@pytest.fixture(scope="session")
def amb_set_c2(c2):
    return materialize_presheaf_category(all_set_presheaves(c2, 2))


@pytest.fixture(scope="session")
def amb_mod_c2(c2, r2):
    return materialize_presheaf_category(all_mod_presheaves(c2, r2, 2))


@pytest.fixture(scope="session")
def amb_set_chain3(chain3):
    return materialize_presheaf_category(all_set_presheaves(chain3, 2))


@pytest.fixture(scope="session")
def amb_rmod_z2():
    return materialize_module_category(2, 4)
