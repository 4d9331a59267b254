"""Integer matrix routines against an outside Smith-form implementation."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import snf_diagonal_oracle
from toposkit import intmat


def _matrices(max_dim=4, max_entry=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-max_entry, max_entry),
                         min_size=c, max_size=c),
                min_size=r, max_size=r)))


@given(_matrices())
@settings(max_examples=150, deadline=None)
def test_smith_form_diagonal_matches_outside_oracle(a):
    u, d, v = intmat.smith_normal_form(a)
    got = [abs(d[i][i]) for i in range(min(len(d), len(d[0])))]
    assert got == snf_diagonal_oracle(a)


@given(_matrices())
@settings(max_examples=150, deadline=None)
def test_smith_form_transforms_are_unimodular_and_factor(a):
    u, d, v = intmat.smith_normal_form(a)
    assert intmat.mat_mul(intmat.mat_mul(u, a), v) == d
    for m in (u, v):
        inv = intmat.invert_unimodular(m)
        n = len(m)
        assert intmat.mat_mul(m, inv) == intmat.identity(n)
    # the diagonal is a divisibility chain
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    for x, y in zip(diag, diag[1:]):
        assert (x == 0 and y == 0) or (x != 0 and y % x == 0)


@given(_matrices())
@settings(max_examples=100, deadline=None)
def test_kernel_basis_spans_exactly_the_nullspace(a):
    basis = intmat.kernel_basis(a)
    rows, cols = len(a), len(a[0])
    for vec in basis:
        assert intmat.mat_vec(a, vec) == [0] * rows
    # dimension check against the oracle: #zero invariant factors plus
    # missing columns equals the nullity
    diag = snf_diagonal_oracle(a)
    nullity = cols - sum(1 for x in diag if x != 0)
    assert len(basis) == nullity


def test_solve_agrees_with_exhaustive_search_on_small_systems():
    rng = random.Random(5)
    for _ in range(200):
        rows, cols = rng.randint(1, 3), rng.randint(1, 3)
        a = [[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)]
        x = [rng.randint(-3, 3) for _ in range(cols)]
        b = intmat.mat_vec(a, x)
        got = intmat.solve(a, b)
        assert got is not None
        assert intmat.mat_vec(a, got) == b
        # an unsolvable target: scale a solvable one past every small combo
        target = [v * 2 + 1 for v in intmat.mat_vec(a, [1] * cols)]
        maybe = intmat.solve(a, target)
        if maybe is not None:
            assert intmat.mat_vec(a, maybe) == target


def test_column_lattice_basis_preserves_the_lattice():
    rng = random.Random(6)
    for _ in range(80):
        dim = rng.randint(1, 3)
        ncols = rng.randint(0, 4)
        cols = [[rng.randint(-4, 4) for _ in range(dim)] for _ in range(ncols)]
        basis = intmat.column_lattice_basis(cols, dim)
        # every original column solves over the basis and vice versa
        if basis:
            bmat = intmat.transpose(basis)
            for c in cols:
                assert intmat.solve(bmat, c) is not None
        else:
            assert all(all(v == 0 for v in c) for c in cols)
        if cols:
            cmat = intmat.transpose(cols)
            for b in basis:
                assert intmat.solve(cmat, b) is not None
