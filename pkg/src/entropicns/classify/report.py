"""Labelling of ray classes and the JSON classification report."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from ..exactgeom import VCone
from ..exactgeom.rational import format_rational
from ..scenarios import MarginalScenario, ns_cone
from .membership import gtnl_membership_general, is_bilocal, is_gtnl_extremal, is_local
from .registry import get
from .symmetry import RayClass, SymmetryGroup, orbit_classes, scenario_group

log = logging.getLogger(__name__)

LABELS = ("local", "gtnl", "bilocal", "ic")

# Label sets grouped by the test that produces them.
_PRODUCES = {
    "local": ("local", "nonlocal"),
    "gtnl": ("gtnl",),
    "bilocal": ("bilocal", "nonbilocal", "genuinely_nonbilocal"),
    "ic": ("ic_violating",),
}


def shannon_relaxation(scenario: MarginalScenario) -> bool:
    """Joint-distribution tests over four or more variables only use the Shannon
    outer approximation of the entropy cone."""
    return scenario.n >= 4


def ray_labels(ray: Sequence[Fraction], scenario: MarginalScenario, wanted: Sequence[str],
               extremal: bool = True) -> set[str]:
    out: set[str] = set()
    ray = [Fraction(x) for x in ray]
    local = None
    if "local" in wanted or "bilocal" in wanted:
        local = is_local(ray, scenario)
    if "local" in wanted:
        out.add("local" if local else "nonlocal")
    if "gtnl" in wanted and scenario.parties == 3 and scenario.kind == "bell" and not local:
        gt = is_gtnl_extremal(ray, scenario) if extremal else not gtnl_membership_general(ray, scenario)
        if gt:
            out.add("gtnl")
    if "bilocal" in wanted and scenario.parties >= 3 and scenario.kind != "ic":
        if is_bilocal(ray, scenario):
            out.add("bilocal")
        else:
            out.add("nonbilocal")
            if local:
                out.add("genuinely_nonbilocal")
    if "ic" in wanted and scenario.kind == "ic":
        if get("ic").evaluate(ray) < 0:
            out.add("ic_violating")
    return out


def _label_job(args):
    ray, scenario, wanted, extremal = args
    return ray_labels(ray, scenario, wanted, extremal)


@dataclass
class Classification:
    scenario: MarginalScenario
    classes: list[RayClass]
    wanted: list[str]
    total_rays: int
    group_order: int
    notes: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out = {"total": len(self.classes)}
        for w in self.wanted:
            for lab in _PRODUCES.get(w, (w,)):
                out[lab] = sum(1 for c in self.classes if lab in c.labels)
        return out

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.spec.to_dict() if self.scenario.spec else self.scenario.name,
            "group_order": self.group_order,
            "rays": self.total_rays,
            "classes": [c.to_dict() for c in self.classes],
            "counts": self.counts(),
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def classify(rays: VCone | Sequence[Sequence], scenario: MarginalScenario, wanted: Sequence[str] = ("local",),
             group: SymmetryGroup | None = None, *, extremal: bool = True, threads: int = 1,
             progress: Callable[[int, int], None] | None = None) -> Classification:
    """Group rays into orbit classes and label one member of each class.

    Labels are read off the first member ray (lowest input index) of each
    class, so they always describe an actual ray even when the grouping
    symmetry is not a symmetry of every label's test.
    """
    for w in wanted:
        if w not in LABELS:
            raise ValueError(f"unknown label {w!r}; known: {', '.join(LABELS)}")
    ray_list = rays.rays if isinstance(rays, VCone) else [tuple(Fraction(x) for x in r) for r in rays]
    if group is None:
        group = scenario_group(scenario, cone=ns_cone(scenario))
    classes = orbit_classes(ray_list, group)
    jobs = [(ray_list[c.members[0]], scenario, list(wanted), extremal) for c in classes]
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            results = list(ex.map(_label_job, jobs, chunksize=8))
    else:
        results = []
        for k, job in enumerate(jobs):
            results.append(_label_job(job))
            if progress:
                progress(k + 1, len(jobs))
    for c, labs in zip(classes, results):
        c.labels = set(labs)
    notes = []
    if shannon_relaxation(scenario) and any(w in wanted for w in ("local", "bilocal")):
        notes.append("shannon-relaxation: local/bilocal verdicts use the Shannon outer approximation")
    if scenario.kind == "bilocal":
        notes.append(f"bilocal-mode: {scenario.bilocal_mode}")
    return Classification(scenario, classes, list(wanted), len(ray_list), group.order, notes)


def format_counts(counts: dict[str, int]) -> str:
    return ", ".join(f"{k}={v}" for k, v in counts.items())


def representative_strings(c: RayClass) -> list[str]:
    return [format_rational(x) for x in c.representative]
