"""Exact rational helpers: parsing, primitive scaling and Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Convert ints, strings ("p/q"), Fractions and binary-exact floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    # numpy integer scalars and the like
    return Fraction(int(value)) if float(value).is_integer() else Fraction(float(value))


def fraction_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale ``vec`` by a positive factor to coprime integers.

    The zero vector is returned unchanged (as integers).
    """
    fr = [as_fraction(v) for v in vec]
    den = reduce(lcm, (q.denominator for q in fr), 1)
    ints = [int(q * den) for q in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(i // g for i in ints)


def canonical_ray(vec: Sequence) -> tuple[int, ...]:
    """Canonical scaling of a ray: primitive integer vector (positive scale only)."""
    return primitive(vec)


def canonical_line(vec: Sequence) -> tuple[int, ...]:
    """Canonical scaling of a line (either sign allowed): first nonzero entry positive."""
    p = primitive(vec)
    for x in p:
        if x:
            return p if x > 0 else tuple(-y for y in p)
    return p


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b) if x and y)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form over the rationals.

    Returns ``(matrix, pivots)`` where ``matrix`` only holds the nonzero rows.
    """
    m = [[as_fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    n = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        row = m[r]
        nz = [j for j in range(c, n) if row[j] != 0]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    mi = m[i]
                    for j in nz:
                        mi[j] -= f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis of ``{x : rows @ x = 0}``, one vector per free column."""
    if not rows:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve_exact(A: Sequence[Sequence], b: Sequence, free_values=None):
    """Solve ``A x = b`` exactly.

    Returns ``None`` when inconsistent.  Free columns take the values in
    ``free_values`` (default 0).
    """
    n = len(A[0]) if A else 0
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    pset = set(pivots)
    x = [Fraction(0)] * n
    for c in range(n):
        if c not in pset and free_values is not None:
            x[c] = as_fraction(free_values[c])
    for row, p in zip(red, pivots):
        x[p] = row[n] - sum(row[c] * x[c] for c in range(n) if c not in pset and row[c])
    return x


def rationalize(value: float, max_den: int = 10**6) -> Fraction:
    """Nearest small-denominator rational of a float (used only as a guess)."""
    q = Fraction(value).limit_denominator(max_den)
    r = round(value)
    if abs(value - r) < 1e-9:
        return Fraction(r)
    return q
