"""Exact integer matrix utilities: Smith normal form and friends.

Matrices are lists of row lists of Python ints, so nothing overflows.
``smith_normal_form(A)`` returns unimodular ``U``, ``V`` with
``U @ A @ V = S`` diagonal and each diagonal entry dividing the next.
"""

from __future__ import annotations

from typing import Optional, Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    rows, inner = len(a), len(b)
    cols = len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            av = ai[k]
            if av:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    oi[j] += av * bk[j]
    return out


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(row[j] * v[j] for j in range(len(v))) for row in a]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


class _Worksheet:
    """Row/column operation state shared by the SNF passes."""

    def __init__(self, a: Sequence[Sequence[int]]):
        self.s: Matrix = [list(row) for row in a]
        self.m = len(self.s)
        self.n = len(self.s[0]) if self.s else 0
        self.u = identity(self.m)
        self.v = identity(self.n)

    def swap_rows(self, i: int, j: int) -> None:
        self.s[i], self.s[j] = self.s[j], self.s[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]

    def swap_cols(self, i: int, j: int) -> None:
        for row in self.s:
            row[i], row[j] = row[j], row[i]
        for row in self.v:
            row[i], row[j] = row[j], row[i]

    def add_row(self, dst: int, src: int, q: int) -> None:
        self.s[dst] = [x + q * y for x, y in zip(self.s[dst], self.s[src])]
        self.u[dst] = [x + q * y for x, y in zip(self.u[dst], self.u[src])]

    def add_col(self, dst: int, src: int, q: int) -> None:
        for row in self.s:
            row[dst] += q * row[src]
        for row in self.v:
            row[dst] += q * row[src]

    def negate_row(self, i: int) -> None:
        self.s[i] = [-x for x in self.s[i]]
        self.u[i] = [-x for x in self.u[i]]

    def diagonalize(self) -> None:
        s = self.s
        for t in range(min(self.m, self.n)):
            while True:
                pivot = None
                best = None
                for i in range(t, self.m):
                    for j in range(t, self.n):
                        x = s[i][j]
                        if x != 0 and (best is None or abs(x) < best):
                            best = abs(x)
                            pivot = (i, j)
                if pivot is None:
                    return
                if pivot != (t, t):
                    if pivot[0] != t:
                        self.swap_rows(t, pivot[0])
                    if pivot[1] != t:
                        self.swap_cols(t, pivot[1])
                clean = True
                for i in range(t + 1, self.m):
                    if s[i][t]:
                        self.add_row(i, t, -(s[i][t] // s[t][t]))
                        if s[i][t]:
                            clean = False
                for j in range(t + 1, self.n):
                    if s[t][j]:
                        self.add_col(j, t, -(s[t][j] // s[t][t]))
                        if s[t][j]:
                            clean = False
                if clean:
                    if s[t][t] < 0:
                        self.negate_row(t)
                    break


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with S = U·A·V in Smith normal form."""
    w = _Worksheet(a)
    w.diagonalize()
    k = min(w.m, w.n)
    while True:
        bad = None
        for i in range(k - 1):
            di, dj = w.s[i][i], w.s[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                bad = i
                break
        if bad is None:
            break
        # fold column bad+1 into column bad and rediagonalize; each pass
        # strictly shrinks the pivot at ``bad`` towards the gcd
        w.add_col(bad, bad + 1, 1)
        w.diagonalize()
    return w.u, w.s, w.v


def invert_unimodular(a: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a unimodular integer matrix via its own SNF."""
    n = len(a)
    u, s, v = smith_normal_form(a)
    for i in range(n):
        if s[i][i] != 1:
            raise ValueError("matrix is not unimodular")
    # a = u^-1 s v^-1 = u^-1 v^-1, so a^-1 = v u
    return mat_mul(v, u)


def kernel_basis(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis columns for the integer kernel {x : A x = 0}."""
    if not a:
        return []
    n = len(a[0])
    u, s, v = smith_normal_form(a)
    rank = sum(1 for i in range(min(len(a), n)) if s[i][i] != 0)
    return [[v[i][j] for i in range(n)] for j in range(rank, n)]


def solve(a: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[list[int]]:
    """One integer solution of A x = b, or None."""
    m = len(a)
    n = len(a[0]) if a else 0
    u, s, v = smith_normal_form(a)
    ub = mat_vec(u, list(b))
    y = [0] * n
    for i in range(m):
        d = s[i][i] if i < min(m, n) else 0
        if d != 0:
            if ub[i] % d != 0:
                return None
            y[i] = ub[i] // d
        elif ub[i] != 0:
            return None
    return mat_vec(v, y)


def column_lattice_basis(cols: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Basis columns of the lattice spanned by ``cols`` inside Z^dim."""
    if not cols:
        return []
    a = [[col[i] for col in cols] for i in range(dim)]
    u, s, v = smith_normal_form(a)
    uinv = invert_unimodular(u)
    basis = []
    for i in range(min(dim, len(cols))):
        d = s[i][i]
        if d != 0:
            basis.append([uinv[r][i] * d for r in range(dim)])
    return basis
