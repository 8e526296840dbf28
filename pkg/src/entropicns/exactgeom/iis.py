"""Irreducible infeasible subsystems by a deletion filter."""

from __future__ import annotations

from typing import Callable, Mapping

from .cone import HCone
from .errors import FeasibleSystemError
from .lp import lp_check

Oracle = Callable[[HCone], bool]


def iis_rows(cone: HCone, pins: Mapping | None = None, feasible: Oracle | None = None) -> list[int]:
    """Indices of a 1-minimal infeasible set of inequality rows.

    Equalities and pins are kept throughout.  ``feasible`` overrides the
    feasibility test (e.g. a tolerance-gated float check); by default the
    exact LP is used and its Farkas support seeds the filter.
    """
    pins = dict(pins or {})
    if feasible is None:
        out = lp_check(cone, None, pins)
        if out.feasible:
            raise FeasibleSystemError("the system is feasible under the given pins")
        rows = sorted({i for (kind, i), _ in out.certificate.terms if kind == "ge"})

        def feasible(c: HCone) -> bool:
            return lp_check(c, None, pins).feasible
    else:
        if feasible(cone):
            raise FeasibleSystemError("the system is feasible under the given pins")
        rows = list(range(len(cone.inequalities)))

    def sub(idx):
        return HCone(cone.space, [cone.inequalities[i] for i in idx], list(cone.equalities))

    if feasible(sub(rows)):  # pragma: no cover - certificate support is always infeasible
        rows = list(range(len(cone.inequalities)))
    k = 0
    while k < len(rows):
        trial = rows[:k] + rows[k + 1 :]
        if not feasible(sub(trial)):
            rows = trial
        else:
            k += 1
    return rows


def iis_shrink(cone: HCone, pins: Mapping | None = None, feasible: Oracle | None = None) -> HCone:
    """Subsystem of ``cone`` that stays infeasible under ``pins`` and loses that
    property when any single inequality is removed."""
    rows = iis_rows(cone, pins, feasible)
    return HCone(cone.space, [cone.inequalities[i] for i in rows], list(cone.equalities))
