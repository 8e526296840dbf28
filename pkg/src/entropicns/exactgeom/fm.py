"""Fourier-Motzkin projection and LP-based redundancy removal."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Callable, Iterable

from .cone import HCone, LinearForm
from .errors import DimensionMismatch, ResourceLimitExceeded
from .lp import lp_check
from .rational import canonical_line, primitive, rref

log = logging.getLogger(__name__)


def _independent_equalities(eqs: list[LinearForm]) -> list[LinearForm]:
    kept: list[LinearForm] = []
    rows: list[list[Fraction]] = []
    for f in eqs:
        if f.is_zero():
            continue
        trial = rows + [list(f.coeffs)]
        if len(rref(trial)[1]) > len(rows):
            rows = trial
            kept.append(f)
    return kept


def remove_redundant(cone: HCone, method: str = "auto") -> HCone:
    """Drop inequalities implied by the remaining rows and the equalities.

    Rows are visited in order; a row is removed when minimising it over the
    cone cut out by every other surviving row stays bounded at 0.
    """
    base = cone.deduplicated()
    eqs = _independent_equalities(base.equalities)
    ineqs = list(base.inequalities)
    i = 0
    while i < len(ineqs):
        others = HCone(cone.space, ineqs[:i] + ineqs[i + 1 :], eqs)
        out = lp_check(others, ineqs[i], None, method)
        if out.bounded and out.value >= 0:
            del ineqs[i]
        else:
            i += 1
    return HCone(cone.space, ineqs, eqs)


def _substitute(rows: list[LinearForm], eq: LinearForm, col: int) -> list[LinearForm]:
    piv = eq.coeffs[col]
    out = []
    for f in rows:
        a = f.coeffs[col]
        if a:
            f = f - eq * (a / piv)
        out.append(f)
    return out


def fm_eliminate(
    cone: HCone,
    drop: Iterable[int],
    *,
    max_rows: int | None = 20000,
    redundancy: bool = True,
    method: str = "auto",
    progress: Callable[[int, int], None] | None = None,
) -> HCone:
    """Project ``cone`` onto the coordinates not in ``drop``.

    Equalities touching a dropped coordinate are used for substitution first;
    the remaining dropped coordinates are eliminated one by one (cheapest
    ``|P|*|N|`` first), pruning redundant rows after every step.
    """
    n = cone.dim
    drop = sorted(set(drop))
    for j in drop:
        if not 0 <= j < n:
            raise DimensionMismatch(f"coordinate {j} outside a space of dimension {n}")
    ineqs = [f for f in cone.inequalities]
    eqs = [f for f in cone.equalities if not f.is_zero()]
    pending = list(drop)

    # Gaussian substitution with equalities
    changed = True
    while changed:
        changed = False
        for k, eq in enumerate(eqs):
            col = next((j for j in pending if eq.coeffs[j]), None)
            if col is None:
                continue
            rest = eqs[:k] + eqs[k + 1 :]
            ineqs = _substitute(ineqs, eq, col)
            eqs = [f for f in _substitute(rest, eq, col) if not f.is_zero()]
            pending.remove(col)
            changed = True
            break

    def norm(rows):
        seen, out = set(), []
        for f in rows:
            p = primitive(f.coeffs)
            if any(p) and p not in seen:
                seen.add(p)
                out.append(LinearForm.ge(p))
        return out

    ineqs = norm(ineqs)
    while pending:
        def cost(j):
            p = sum(1 for f in ineqs if f.coeffs[j] > 0)
            q = sum(1 for f in ineqs if f.coeffs[j] < 0)
            return p * q - p - q

        j = min(pending, key=lambda c: (cost(c), c))
        pending.remove(j)
        pos = [f for f in ineqs if f.coeffs[j] > 0]
        neg = [f for f in ineqs if f.coeffs[j] < 0]
        new = [f for f in ineqs if f.coeffs[j] == 0]
        for fp in pos:
            for fn in neg:
                new.append(fp * (-fn.coeffs[j]) + fn * fp.coeffs[j])
        if max_rows is not None and len(new) > max_rows:
            raise ResourceLimitExceeded("row", len(new), max_rows)
        ineqs = norm(new)
        if redundancy:
            ineqs = remove_redundant(HCone(cone.space, ineqs, eqs), method).inequalities
        if progress is not None:
            progress(len(drop) - len(pending), len(ineqs))

    keep = [j for j in range(n) if j not in set(drop)]
    space = cone.space.restrict(keep)
    out = HCone(
        space,
        [LinearForm.ge([f.coeffs[j] for j in keep]) for f in ineqs],
        [LinearForm.eq(canonical_line([f.coeffs[j] for j in keep])) for f in eqs],
    )
    return remove_redundant(out, method) if redundancy else out.deduplicated()
