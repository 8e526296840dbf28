"""Slow reference implementations used as independent test oracles."""

from fractions import Fraction
from itertools import combinations

from entropicns.exactgeom.rational import canonical_ray, nullspace, rank


def brute_force_rays(rows, d):
    """Extreme rays of the pointed cone {x : rows . x >= 0} by vertex-style
    enumeration over all (d-1)-subsets of tight rows."""
    rows = [list(map(Fraction, r)) for r in rows]
    if rank(rows) < d:
        raise ValueError("cone is not pointed")
    out = set()
    for sub in combinations(range(len(rows)), d - 1):
        tight = [rows[i] for i in sub]
        if rank(tight) != d - 1:
            continue
        (v,) = nullspace(tight, d)
        for sgn in (1, -1):
            w = [sgn * x for x in v]
            if all(sum(a * x for a, x in zip(r, w)) >= 0 for r in rows):
                out.add(canonical_ray(w))
    return out


def in_cone_of(point, gens):
    """Membership of ``point`` in the conic hull of ``gens`` by exact search
    over supports of size <= dim (Caratheodory)."""
    from entropicns.exactgeom.rational import solve_exact

    d = len(point)
    if not any(point):
        return True
    for k in range(1, min(d, len(gens)) + 1):
        for sub in combinations(range(len(gens)), k):
            A = [[Fraction(gens[j][i]) for j in sub] for i in range(d)]
            if rank(A) != k:
                continue
            sol = solve_exact(A, [Fraction(x) for x in point])
            if sol is not None and all(x >= 0 for x in sol):
                return True
    return False
