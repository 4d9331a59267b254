"""The compiled enumeration kernel against its portable twin."""

import os
import random
import subprocess
import sys

import pytest

from toposkit._kernels import backend_name, csp_py

try:
    from toposkit._kernels import _csp
except ImportError:
    _csp = None

needs_compiled = pytest.mark.skipif(_csp is None,
                                    reason="compiled kernel not built")


def _random_instance(rng):
    n = rng.randint(0, 5)
    sizes = [rng.randint(1, 4) for _ in range(n)]
    constraints = []
    for _ in range(rng.randint(0, 2 * n)):
        a = rng.randrange(n)
        b = rng.randrange(n)
        table = [rng.randrange(sizes[b]) for _ in range(sizes[a])]
        constraints.append((a, b, table))
    return sizes, constraints


@needs_compiled
def test_backends_enumerate_identical_solution_lists():
    rng = random.Random(31)
    for _ in range(300):
        sizes, constraints = _random_instance(rng)
        pure = csp_py.enumerate_assignments(sizes, constraints)
        fast = _csp.enumerate_assignments(sizes, constraints)
        assert pure == fast
        assert csp_py.count_assignments(sizes, constraints) \
            == _csp.count_assignments(sizes, constraints)


@needs_compiled
def test_backends_respect_the_limit_identically():
    rng = random.Random(32)
    for _ in range(100):
        sizes, constraints = _random_instance(rng)
        for limit in (0, 1, 2, 7):
            assert csp_py.enumerate_assignments(sizes, constraints, limit) \
                == _csp.enumerate_assignments(sizes, constraints, limit)


def test_pure_kernel_validates_constraint_shapes():
    with pytest.raises(ValueError, match="unknown variable"):
        csp_py.enumerate_assignments([2], [(0, 3, [0, 0])])
    with pytest.raises(ValueError, match="wrong length"):
        csp_py.enumerate_assignments([2, 2], [(0, 1, [0])])


def test_environment_variable_forces_the_pure_backend():
    code = ("import toposkit._kernels as k; print(k.backend_name())")
    forced = subprocess.run(
        [sys.executable, "-c", code],
        env={**os.environ, "TOPOSKIT_PURE_PYTHON": "1"},
        capture_output=True, text=True, check=True)
    assert forced.stdout.strip() == "pure-python"
    free = subprocess.run(
        [sys.executable, "-c", code],
        env={k: v for k, v in os.environ.items()
             if k != "TOPOSKIT_PURE_PYTHON"},
        capture_output=True, text=True, check=True)
    assert free.stdout.strip() in ("compiled", "pure-python")
    assert backend_name() in ("compiled", "pure-python")


def test_enumeration_order_is_lexicographic():
    sols = csp_py.enumerate_assignments([2, 2], [])
    assert sols == [(0, 0), (0, 1), (1, 0), (1, 1)]
    one = csp_py.enumerate_assignments([3], [(0, 0, [1, 1, 1])])
    assert one == [(1,)]
