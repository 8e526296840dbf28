"""LP-based membership and validity tests.

Exact-rational vectors go through :func:`~entropicns.exactgeom.lp_check`.
Float vectors (entropies of quantum boxes) are tested with a tolerance band
around each pinned coordinate, using HiGHS directly; such verdicts are
numerical by nature and labelled as such by callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from ..entropy import CoordinateSpace, EntropyVector
from ..exactgeom import HCone, IndexSpace, LinearForm, LPOutcome, lp_check, reindex
from ..scenarios import (
    BIPARTITIONS,
    MarginalScenario,
    bilocal_local_system,
    hybrid_system,
    local_system,
)

FLOAT_TOL = 1e-7


def _vector_values(vec) -> tuple[CoordinateSpace | None, tuple]:
    if isinstance(vec, EntropyVector):
        return vec.space, vec.values
    return None, tuple(vec)


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def pins_for(system: HCone, space: CoordinateSpace, values: Sequence) -> dict[int, object]:
    """Pins of ``values`` (given on ``space``) on the coordinates of ``system``."""
    out = {}
    for m, v in zip(space.masks, values):
        out[system.space.index(m)] = v
    return out


def float_feasible(system: HCone, pins: dict[int, float], tol: float = FLOAT_TOL) -> bool:
    """Feasibility with each pin relaxed to ``[v - tol, v + tol]``."""
    n = system.dim
    A = np.array([[float(c) for c in f.coeffs] for f in system.inequalities], dtype=float).reshape(-1, n)
    E = np.array([[float(c) for c in f.coeffs] for f in system.equalities], dtype=float).reshape(-1, n)
    bounds = [(None, None)] * n
    for j, v in pins.items():
        v = float(v)
        bounds[j] = (v - tol, v + tol)
    res = linprog(
        np.zeros(n),
        A_ub=-A if len(A) else None,
        b_ub=np.zeros(len(A)) if len(A) else None,
        A_eq=E if len(E) else None,
        b_eq=np.zeros(len(E)) if len(E) else None,
        bounds=bounds,
        method="highs",
    )
    return res.status == 0


def member(system: HCone, space: CoordinateSpace, values: Sequence, tol: float = FLOAT_TOL) -> bool:
    pins = pins_for(system, space, values)
    if _is_exact(values):
        return lp_check(system, None, {k: Fraction(v) for k, v in pins.items()}).feasible
    return float_feasible(system, pins, tol)


def _space_of(vec, scenario: MarginalScenario):
    space, values = _vector_values(vec)
    return space or scenario.space, values


def is_local(vec, scenario: MarginalScenario, tol: float = FLOAT_TOL) -> bool:
    """Whether the observable entropies extend to a joint Shannon entropy vector
    of all observables (Shannon relaxation of the LHV condition)."""
    space, values = _space_of(vec, scenario)
    return member(local_system(scenario), space, values, tol)


def is_bilocal(vec, scenario: MarginalScenario, tol: float = FLOAT_TOL) -> bool:
    """Joint Shannon cone plus the extended end-party independence equality."""
    space, values = _space_of(vec, scenario)
    return member(bilocal_local_system(scenario), space, values, tol)


def hybrid_membership(vec, scenario: MarginalScenario, tol: float = FLOAT_TOL) -> dict[str, bool]:
    space, values = _space_of(vec, scenario)
    return {bp: member(hybrid_system(bp, scenario), space, values, tol) for bp in BIPARTITIONS}


def is_gtnl_extremal(vec, scenario: MarginalScenario, tol: float = FLOAT_TOL) -> bool:
    """GTNL test valid for extremal rays: outside every single hybrid cone."""
    return not any(hybrid_membership(vec, scenario, tol).values())


def joint_hybrid_system(scenario: MarginalScenario) -> tuple[HCone, list[int]]:
    """Direct sum of the three hybrid systems plus observable variables ``t``
    tied by ``h1 + h2 + h3 = t`` on the observable coordinates.

    Returns the system and the positions of ``t``.
    """
    parts = [hybrid_system(bp, scenario) for bp in BIPARTITIONS]
    obs = scenario.space
    offsets, total = [], 0
    for p in parts:
        offsets.append(total)
        total += p.dim
    t0 = total
    total += obs.dim
    keys = [(k, m) for k, p in enumerate(parts) for m in p.space.masks] + [("t", m) for m in obs.masks]
    space = IndexSpace(total, keys)
    ineqs, eqs = [], []
    zero = [Fraction(0)] * total

    def lift(f, k):
        c = list(zero)
        for i in f.support():
            c[offsets[k] + i] = f.coeffs[i]
        return c

    for k, p in enumerate(parts):
        ineqs += [LinearForm.ge(lift(f, k)) for f in p.inequalities]
        eqs += [LinearForm.eq(lift(f, k)) for f in p.equalities]
    for j, m in enumerate(obs.masks):
        c = list(zero)
        for k, p in enumerate(parts):
            c[offsets[k] + p.space.index(m)] = Fraction(1)
        c[t0 + j] = Fraction(-1)
        eqs.append(LinearForm.eq(c))
    return HCone(space, ineqs, eqs), list(range(t0, t0 + obs.dim))


def gtnl_membership_general(vec, scenario: MarginalScenario, tol: float = FLOAT_TOL) -> bool:
    """Whether ``vec`` is a sum of one element of each hybrid cone (joint LP)."""
    space, values = _space_of(vec, scenario)
    system, tpos = joint_hybrid_system(scenario)
    by_mask = dict(zip(space.masks, values))
    pins = {tpos[j]: by_mask[m] for j, m in enumerate(scenario.space.masks)}
    if _is_exact(values):
        return lp_check(system, None, {k: Fraction(v) for k, v in pins.items()}).feasible
    return float_feasible(system, pins, tol)


# ---------------------------------------------------------------------------
# validity
# ---------------------------------------------------------------------------


@dataclass
class Validity:
    valid: bool
    outcome: LPOutcome
    system: HCone

    def __bool__(self):
        return self.valid

    @property
    def witness(self):
        """Recession direction with negative value when invalid."""
        return self.outcome.ray


def check_validity(form: LinearForm, form_space, system: HCone, extra_equalities: Iterable[LinearForm] = (),
                   method: str = "auto") -> Validity:
    """Minimise the inequality over ``system``; valid iff the minimum is 0.

    The inequality may live on a coordinate subset of the system (projection
    lemma); it is re-indexed onto the system by subset key.
    """
    extra = list(extra_equalities)
    if extra:
        system = system.with_rows((), extra)
    obj = reindex(form, form_space, system.space)
    out = lp_check(system, obj, None, method)
    return Validity(out.bounded and out.value >= 0, out, system)


def check_hybrid_validity(form: LinearForm, form_space, scenario: MarginalScenario) -> dict[str, Validity]:
    """Validity on each hybrid cone separately (sufficient and necessary for
    the convex hull, since the zero vector lies in every cone)."""
    return {bp: check_validity(form, form_space, hybrid_system(bp, scenario)) for bp in BIPARTITIONS}
