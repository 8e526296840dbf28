"""Builders for marginal scenarios and their entropic cones."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .entropy import (
    PARTY_LETTERS,
    CoordinateSpace,
    H,
    I,
    Observable,
    _sparse_to_form,
    bits,
    elemental_forms,
    empty_equality,
    functional,
)
from .exactgeom import HCone, LinearForm
from .exactgeom.rational import primitive

KINDS = ("bell", "bilocal", "ic")
BILOCAL_MODES = ("observable", "extended")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    settings: tuple[int, ...] = ()
    bilocal_mode: str = "observable"

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(int(s) for s in self.settings))
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.bilocal_mode not in BILOCAL_MODES:
            raise ValueError(f"unknown bilocal mode {self.bilocal_mode!r}")
        if self.kind == "bilocal" and len(self.settings) < 3:
            raise ValueError("a bilocal scenario needs at least three parties")
        if self.kind != "ic" and (not self.settings or min(self.settings) < 1):
            raise ValueError("every party needs at least one setting")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "settings": list(self.settings)}
        if self.kind == "bilocal":
            out["bilocal_mode"] = self.bilocal_mode
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        return cls(data["kind"], tuple(data.get("settings", ())), data.get("bilocal_mode", "observable"))

    def build(self) -> "MarginalScenario":
        if self.kind == "ic":
            return ic_scenario()
        if self.kind == "bilocal":
            return bilocal_scenario(self.settings, self.bilocal_mode)
        return bell_scenario(self.settings)

    @property
    def shorthand(self) -> str:
        if self.kind == "ic":
            return "ic"
        return f"{self.kind}:{'x'.join(map(str, self.settings))}"


def parse_scenario(text: str) -> ScenarioSpec:
    """``bell:2x2``, ``bell:3x3``, ``bell:2x2x2``, ``bilocal:2x2x2``, ``bilocal:2x1x1``, ``ic``.

    A trailing ``/extended`` selects the extended bilocality constraint.
    """
    text = text.strip().lower()
    if text == "ic":
        return ScenarioSpec("ic")
    m = re.fullmatch(r"(bell|bilocal):(\d+(?:x\d+)*)(?:/(observable|extended))?", text)
    if not m:
        raise ValueError(f"cannot parse scenario {text!r}")
    settings = tuple(int(s) for s in m.group(2).split("x"))
    if len(settings) == 1:
        raise ValueError("give one settings count per party, e.g. bell:2x2")
    return ScenarioSpec(m.group(1), settings, m.group(3) or "observable")


@dataclass
class MarginalScenario:
    observables: tuple[Observable, ...]
    contexts: tuple[int, ...]
    kind: str = "bell"
    settings: tuple[int, ...] = ()
    bilocal_mode: str = "observable"
    name: str = ""

    def __post_init__(self):
        self.observables = tuple(self.observables)
        self.contexts = tuple(self.contexts)
        for a, b in itertools.permutations(self.contexts, 2):
            if a & b == a:
                raise ValueError("contexts must be maximal")
        covered = 0
        for c in self.contexts:
            covered |= c
        if covered != (1 << len(self.observables)) - 1:
            raise ValueError("every observable must appear in a context")

    @cached_property
    def space(self) -> CoordinateSpace:
        return CoordinateSpace.marginal(self.observables, self.contexts)

    @cached_property
    def full_space(self) -> CoordinateSpace:
        return CoordinateSpace.full(self.observables)

    @property
    def n(self) -> int:
        return len(self.observables)

    @property
    def parties(self) -> int:
        return len(self.settings)

    def observable(self, party: int, setting: int) -> int:
        for i, o in enumerate(self.observables):
            if o.party == party and o.setting == setting:
                return i
        raise KeyError((party, setting))

    def party_mask(self, party: int) -> int:
        return sum(1 << i for i, o in enumerate(self.observables) if o.party == party)

    @property
    def spec(self) -> ScenarioSpec:
        return ScenarioSpec(self.kind, self.settings, self.bilocal_mode)


def _observables(settings: Sequence[int]) -> list[Observable]:
    if len(settings) > len(PARTY_LETTERS):
        raise ValueError("too many parties")
    return [Observable.of(p, s, bare=(m == 1)) for p, m in enumerate(settings) for s in range(m)]


def _bell_contexts(obs: Sequence[Observable], settings: Sequence[int]) -> list[int]:
    index = {(o.party, o.setting): i for i, o in enumerate(obs)}
    out = []
    for choice in itertools.product(*[range(m) for m in settings]):
        out.append(sum(1 << index[(p, s)] for p, s in enumerate(choice)))
    return out


def bell_scenario(settings: Sequence[int] | int, m: int | None = None) -> MarginalScenario:
    """One context per choice of one setting for every party.

    ``bell_scenario([2, 2])`` or ``bell_scenario(2, 2)`` (parties, settings).
    """
    if isinstance(settings, int):
        settings = [m if m is not None else 2] * settings
    settings = tuple(int(s) for s in settings)
    if not settings or min(settings) < 1:
        raise ValueError("every party needs at least one setting")
    obs = _observables(settings)
    return MarginalScenario(tuple(obs), tuple(_bell_contexts(obs, settings)), "bell", settings,
                            name="bell:" + "x".join(map(str, settings)))


def bilocal_scenario(settings: Sequence[int] = (2, 2, 2), mode: str = "observable") -> MarginalScenario:
    """Bell contexts with end parties A (first) and C (last) fed by independent sources."""
    sc = bell_scenario(settings)
    if len(sc.settings) < 3:
        raise ValueError("a bilocal scenario needs at least three parties")
    if mode not in BILOCAL_MODES:
        raise ValueError(f"unknown bilocal mode {mode!r}")
    return MarginalScenario(sc.observables, sc.contexts, "bilocal", sc.settings, mode,
                            name="bilocal:" + "x".join(map(str, sc.settings)))


IC_NAMES = ("X0", "X1", "G0", "G1", "M")


def ic_scenario() -> MarginalScenario:
    obs = tuple(Observable(n, i, 0) for i, n in enumerate(IC_NAMES))
    return MarginalScenario(obs, (0b00101, 0b01010, 0b10000), "ic", (), name="ic")


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


def context_system(space: CoordinateSpace, contexts: Sequence[int]) -> HCone:
    """Union of the elemental systems of ``contexts`` on ``space``; rows that
    are positive multiples of earlier ones are merged."""
    rows, seen = [], set()
    for ctx in contexts:
        for sparse in elemental_forms(bits(ctx)):
            f = _sparse_to_form(sparse, space)
            key = primitive(f.coeffs)
            if key not in seen:
                seen.add(key)
                rows.append(f)
    return HCone(space, rows, [empty_equality(space)])


def ns_cone(scenario: MarginalScenario) -> HCone:
    """Intersection of the per-context Shannon cones on the observable space."""
    cone = context_system(scenario.space, scenario.contexts)
    if scenario.kind == "ic":
        cone = cone.with_rows(ic_constraints(scenario))
    return cone


def local_system(scenario: MarginalScenario) -> HCone:
    """Shannon cone of all observables jointly (a joint entropy exists)."""
    full = (1 << scenario.n) - 1
    return context_system(scenario.full_space, [full])


def _hybrid_contexts(scenario: MarginalScenario, local_party: int) -> list[int]:
    others = [p for p in range(scenario.parties) if p != local_party]
    base = scenario.party_mask(local_party)
    out = []
    for choice in itertools.product(*[range(scenario.settings[p]) for p in others]):
        out.append(base | sum(1 << scenario.observable(p, s) for p, s in zip(others, choice)))
    return out


def parse_bipartition(text: str, parties: int = 3) -> int:
    """Index of the local party in ``'A|BC'``, ``'B|AC'`` or ``'C|AB'``."""
    m = re.fullmatch(r"([A-H])\|([A-H]+)", text.strip().upper())
    if not m:
        raise ValueError(f"cannot parse bipartition {text!r}")
    local = PARTY_LETTERS.index(m.group(1))
    rest = sorted(PARTY_LETTERS.index(c) for c in m.group(2))
    if sorted([local] + rest) != list(range(parties)):
        raise ValueError(f"bipartition {text!r} does not cover {parties} parties")
    return local


def hybrid_contexts(bipartition: str, scenario: MarginalScenario | None = None) -> list[int]:
    scenario = scenario or bell_scenario([2, 2, 2])
    return _hybrid_contexts(scenario, parse_bipartition(bipartition, scenario.parties))


def hybrid_system(bipartition: str, scenario: MarginalScenario | None = None) -> HCone:
    """L|NS cone: the local party's settings are jointly distributed with one
    setting of each remaining party.  Lives on the marginal space of those
    extended contexts."""
    scenario = scenario or bell_scenario([2, 2, 2])
    ctx = hybrid_contexts(bipartition, scenario)
    space = CoordinateSpace.marginal(scenario.observables, ctx)
    return context_system(space, ctx)


BIPARTITIONS = ("A|BC", "B|AC", "C|AB")


def _end_masks(scenario: MarginalScenario) -> tuple[int, int]:
    return scenario.party_mask(0), scenario.party_mask(scenario.parties - 1)


def bilocal_constraints(scenario: MarginalScenario, mode: str | None = None) -> list[LinearForm]:
    """Independence of the end parties.

    ``observable``: I(A_x : C_z) = 0 for every pair of settings (observable space).
    ``extended``: H(A_all C_all) = H(A_all) + H(C_all) (full space).
    """
    mode = mode or scenario.bilocal_mode
    a_mask, c_mask = _end_masks(scenario)
    names = scenario.space.names
    if mode == "observable":
        out = []
        for a in bits(a_mask):
            for c in bits(c_mask):
                out.append(functional(I(names[a], names[c]), scenario.space, "eq"))
        return out
    if mode == "extended":
        A = [names[b] for b in bits(a_mask)]
        C = [names[b] for b in bits(c_mask)]
        return [functional(H(A) + H(C) - H(A + C), scenario.full_space, "eq")]
    raise ValueError(f"unknown bilocal mode {mode!r}")


def bilocal_ns_cone(scenario: MarginalScenario, mode: str | None = None) -> HCone:
    """NS cone with end-party independence.

    ``observable`` intersects the observable NS cone with I(A_x:C_z)=0.
    ``extended`` adds the context of all end-party observables, imposes the
    extended constraint there, and is meant to be projected to observables.
    """
    mode = mode or scenario.bilocal_mode
    if mode == "observable":
        return ns_cone(scenario).with_rows((), bilocal_constraints(scenario, "observable"))
    a_mask, c_mask = _end_masks(scenario)
    ctx = list(scenario.contexts) + [a_mask | c_mask]
    space = CoordinateSpace.marginal(scenario.observables, ctx)
    cone = context_system(space, ctx)
    names = scenario.space.names
    A = [names[b] for b in bits(a_mask)]
    C = [names[b] for b in bits(c_mask)]
    return cone.with_rows((), [functional(H(A) + H(C) - H(A + C), space, "eq")])


def bilocal_local_system(scenario: MarginalScenario) -> HCone:
    """Joint Shannon cone plus the extended bilocality equality."""
    return local_system(scenario).with_rows((), bilocal_constraints(scenario, "extended"))


def ic_constraints(scenario: MarginalScenario | None = None) -> list[LinearForm]:
    """H(M) - I(X_s : G_s) >= 0 for both bits."""
    scenario = scenario or ic_scenario()
    return [functional(H("M") - I(f"X{s}", f"G{s}"), scenario.space) for s in (0, 1)]


def ic_cone() -> HCone:
    return ns_cone(ic_scenario())


def observable_projection_indices(space: CoordinateSpace, target: CoordinateSpace) -> list[int]:
    """Positions in ``space`` of the coordinates that also belong to ``target``."""
    return [i for i, m in enumerate(space.masks) if m in target._index]


def scenario_to_json(scenario: MarginalScenario) -> str:
    return json.dumps(scenario.spec.to_dict(), sort_keys=True)
