# cython: boundscheck=False, wraparound=False
"""Compiled enumeration of assignments under functional constraints.

Semantics are identical to ``csp_py.enumerate_assignments``; see there for
the contract.  The search is an iterative depth-first walk over variables
in declaration order, so solutions come out lexicographically sorted.
"""

from libc.stdlib cimport malloc, free


def enumerate_assignments(sizes, constraints, limit=None):
    cdef int n = len(sizes)
    cdef int m = len(constraints)
    cdef int i, j, a, b, val, ok
    cdef long cap = -1 if limit is None else <long> limit

    for a, b, table in constraints:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"constraint ({a}, {b}) references unknown variable")
        if len(table) != sizes[a]:
            raise ValueError(f"constraint table for ({a}, {b}) has wrong length")

    if n == 0:
        return [()]

    cdef int *csizes = <int *> malloc(n * sizeof(int))
    cdef int *values = <int *> malloc(n * sizeof(int))
    # Constraints grouped by their later endpoint, flattened:
    # starts[i]..starts[i+1] index into (avar, bvar, tables).
    cdef int *starts = <int *> malloc((n + 1) * sizeof(int))
    cdef int *avar = <int *> malloc((m if m else 1) * sizeof(int))
    cdef int *bvar = <int *> malloc((m if m else 1) * sizeof(int))
    cdef int **tables = <int **> malloc((m if m else 1) * sizeof(int *))
    cdef int *tdata = NULL
    cdef long tlen = 0
    if csizes is NULL or values is NULL or starts is NULL or avar is NULL \
            or bvar is NULL or tables is NULL:
        raise MemoryError()

    out = []
    try:
        for i in range(n):
            csizes[i] = sizes[i]

        for a, b, table in constraints:
            tlen += len(table)
        if tlen:
            tdata = <int *> malloc(tlen * sizeof(int))
            if tdata is NULL:
                raise MemoryError()

        grouped = [[] for _ in range(n)]
        for a, b, table in constraints:
            grouped[max(a, b)].append((a, b, table))
        j = 0
        tlen = 0
        for i in range(n):
            starts[i] = j
            for a, b, table in grouped[i]:
                avar[j] = a
                bvar[j] = b
                tables[j] = tdata + tlen
                for val in table:
                    tdata[tlen] = val
                    tlen += 1
                j += 1
        starts[n] = j

        i = 0
        values[0] = -1
        while i >= 0:
            values[i] += 1
            if values[i] >= csizes[i]:
                i -= 1
                continue
            ok = 1
            for j in range(starts[i], starts[i + 1]):
                if values[bvar[j]] != tables[j][values[avar[j]]]:
                    ok = 0
                    break
            if not ok:
                continue
            if i == n - 1:
                out.append(tuple([values[j] for j in range(n)]))
                if cap >= 0 and len(out) >= cap:
                    break
            else:
                i += 1
                values[i] = -1
    finally:
        free(csizes)
        free(values)
        free(starts)
        free(avar)
        free(bvar)
        free(tables)
        if tdata is not NULL:
            free(tdata)
    return out


def count_assignments(sizes, constraints):
    return len(enumerate_assignments(sizes, constraints))
