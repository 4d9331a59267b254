"""Pure-Python enumeration of assignments under functional constraints.

This is the portable twin of the compiled kernel in ``_csp.pyx``.  Both
solve the same problem: variable ``i`` ranges over ``range(sizes[i])`` and
every constraint ``(a, b, table)`` demands ``v[b] == table[v[a]]``.  That
one shape covers natural-transformation search (one variable per element
of the source presheaf), matching-family search (one variable per arrow
of a sieve) and cocone search (one variable per diagram node).
"""

from __future__ import annotations

from typing import Optional, Sequence


def enumerate_assignments(
    sizes: Sequence[int],
    constraints: Sequence[tuple[int, int, Sequence[int]]],
    limit: Optional[int] = None,
) -> list[tuple[int, ...]]:
    """All satisfying assignments, in lexicographic order.

    ``limit`` truncates the enumeration once that many solutions exist,
    which keeps "is there more than one" questions cheap.
    """
    n = len(sizes)
    for a, b, table in constraints:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"constraint ({a}, {b}) references unknown variable")
        if len(table) != sizes[a]:
            raise ValueError(f"constraint table for ({a}, {b}) has wrong length")
    if n == 0:
        return [()] if not constraints else [()]

    # Constraints become checkable once both endpoints are assigned; index
    # them by the later variable so each is tested exactly once per branch.
    pending: list[list[tuple[int, int, Sequence[int]]]] = [[] for _ in range(n)]
    for a, b, table in constraints:
        pending[max(a, b)].append((a, b, table))

    out: list[tuple[int, ...]] = []
    values = [0] * n

    def extend(i: int) -> bool:
        if i == n:
            out.append(tuple(values))
            return limit is not None and len(out) >= limit
        for val in range(sizes[i]):
            values[i] = val
            ok = True
            for a, b, table in pending[i]:
                if values[b] != table[values[a]]:
                    ok = False
                    break
            if ok and extend(i + 1):
                return True
        return False

    extend(0)
    return out


def count_assignments(
    sizes: Sequence[int],
    constraints: Sequence[tuple[int, int, Sequence[int]]],
) -> int:
    """Number of satisfying assignments (no materialization)."""
    return len(enumerate_assignments(sizes, constraints))
