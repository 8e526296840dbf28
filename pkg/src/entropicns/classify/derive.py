"""Targeted derivation of entropic inequalities violated by a given vector.

An infeasible pinned system is shrunk to an irreducible infeasible subsystem,
the unpinned coordinates of that subsystem are eliminated by Fourier-Motzkin,
and the most violated row of the projection is returned.  The projection of a
subsystem is implied by the full system, so every returned row is valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from ..entropy import CoordinateSpace, EntropyVector, entropy_vector, format_form
from ..exactgeom import (
    FeasibleSystemError,
    HCone,
    LinearForm,
    fm_eliminate,
    iis_shrink,
    primitive,
)
from ..scenarios import MarginalScenario
from .membership import check_hybrid_validity, check_validity, joint_hybrid_system

log = logging.getLogger(__name__)


@dataclass
class Derived:
    form: LinearForm  # on ``space``
    space: CoordinateSpace
    violation: object  # value of the form on the source vector (negative)
    iis_size: int
    candidates: int
    visibility: object = 1

    def __str__(self):
        return format_form(self.form, self.space)


def _as_fraction(v, max_den: int | None) -> Fraction:
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    f = Fraction(float(v))
    return f.limit_denominator(max_den) if max_den else f


def derive_on(system: HCone, pins: dict[int, object], max_rows: int | None = 20000,
              max_den: int | None = 10**9) -> tuple[LinearForm, list[int], int, int]:
    """Core routine on raw coordinates.

    Returns the chosen row over the pinned coordinates (in sorted order), those
    coordinates, the IIS size and the number of projected rows.
    """
    fp = {k: _as_fraction(v, max_den) for k, v in pins.items()}
    sub = iis_shrink(system, fp)
    keep = sorted(fp)
    drop = [j for j in range(system.dim) if j not in fp]
    proj = fm_eliminate(sub, drop, max_rows=max_rows)
    point = [fp[j] for j in keep]
    best, best_val = None, None
    for f in proj.inequalities:
        val = f.dot(point)
        if best_val is None or val < best_val:
            best, best_val = f, val
    for e in proj.equalities:
        val = e.dot(point)
        if val:
            cand = e if val < 0 else -e
            cand = LinearForm.ge(cand.coeffs)
            if best_val is None or -abs(val) < best_val:
                best, best_val = cand, -abs(val)
    if best is None or best_val >= 0:  # pragma: no cover - the IIS is infeasible
        raise RuntimeError("projection of the infeasible subsystem admits the point")
    return best, keep, len(sub.inequalities), len(proj.inequalities)


def _lift(form_on_keep: LinearForm, keep: Sequence[int], dim: int) -> LinearForm:
    c = [Fraction(0)] * dim
    for j, v in zip(keep, form_on_keep.coeffs):
        c[j] = v
    return LinearForm.ge(c)


def derive_inequality(vec: EntropyVector, system: HCone, *, max_rows: int | None = 20000,
                      check: bool = True) -> Derived:
    """Inequality valid on ``system`` and violated by ``vec``.

    ``system`` must contain every coordinate of ``vec.space``; the result
    lives on ``vec.space``.
    """
    space = vec.space
    pins = {system.space.index(m): v for m, v in zip(space.masks, vec.values)}
    row, keep, nrows, ncand = derive_on(system, pins, max_rows)
    form = _lift(row, keep, system.dim)
    # keep order follows system indices; map back to the vector's space
    out = [Fraction(0)] * space.dim
    for j in form.support():
        out[space.index(system.space.keys[j])] = form.coeffs[j]
    result = LinearForm.ge(primitive(out))
    if check:
        v = check_validity(result, space, system)
        if not v.valid:  # pragma: no cover - guaranteed by construction
            raise RuntimeError("derived inequality failed its validity check")
    viol = _evaluate(result, vec.values)
    return Derived(result, space, viol, nrows, ncand)


def derive_gtnl_witness(vec: EntropyVector, scenario: MarginalScenario, *,
                        max_rows: int | None = 20000, check: bool = True) -> Derived:
    """Inequality valid on the sum of the three hybrid cones, violated by ``vec``."""
    system, tpos = joint_hybrid_system(scenario)
    space = scenario.space
    by_mask = dict(zip(vec.space.masks, vec.values))
    pins = {tpos[j]: by_mask[m] for j, m in enumerate(space.masks)}
    row, keep, nrows, ncand = derive_on(system, pins, max_rows)
    pos = {t: j for j, t in enumerate(tpos)}
    out = [Fraction(0)] * space.dim
    for k, c in zip(keep, row.coeffs):
        out[pos[k]] = c
    result = LinearForm.ge(primitive(out))
    if check and not all(check_hybrid_validity(result, space, scenario).values()):
        raise RuntimeError("derived witness failed a hybrid validity check")  # pragma: no cover
    values = [by_mask[m] for m in space.masks]
    return Derived(result, space, _evaluate(result, values), nrows, ncand)


def _evaluate(form: LinearForm, values) -> object:
    if all(isinstance(v, (int, Fraction)) for v in values):
        return form.dot(values)
    return float(sum(float(c) * float(v) for c, v in zip(form.coeffs, values) if c))


@dataclass
class NoiseRun:
    results: list[Derived] = field(default_factory=list)
    member_at: object = None  # first visibility at which the noisy vector is inside

    @property
    def tightest(self) -> Derived | None:
        return self.results[-1] if self.results else None


def default_schedule(step: Fraction = Fraction(1, 20)) -> list[Fraction]:
    out, v = [], Fraction(1)
    while v >= 0:
        out.append(v)
        v -= step
    return out


def derive_with_noise(box, scenario: MarginalScenario, system: HCone,
                      visibilities: Iterable = None,
                      derive: Callable[[EntropyVector, HCone], Derived] | None = None) -> NoiseRun:
    """Re-derive at decreasing visibility until the noisy vector is a member.

    The inequality found at the lowest violating visibility is the tightest.
    """
    from ..boxes import white_noise

    derive = derive or (lambda vec, sys_: derive_inequality(vec, sys_))
    run = NoiseRun()
    for v in visibilities if visibilities is not None else default_schedule():
        noisy = white_noise(box, v)
        vec = entropy_vector(noisy, scenario)
        try:
            d = derive(vec, system)
        except FeasibleSystemError:
            run.member_at = v
            break
        d.visibility = v
        run.results.append(d)
        log.info("visibility %s: %s (violation %s)", v, d, d.violation)
    return run
