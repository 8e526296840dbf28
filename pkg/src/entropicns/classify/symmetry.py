"""Observable relabelings acting on entropy coordinates, orbits and canonical forms."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..entropy import CoordinateSpace, bits
from ..exactgeom import HCone, VCone
from ..exactgeom.rational import primitive


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``q`` first, then ``p``."""
    return tuple(p[q[i]] for i in range(len(q)))


def _map_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for b in bits(mask):
        out |= 1 << perm[b]
    return out


@dataclass
class SymmetryGroup:
    """Group of observable permutations, with their action on ``space``.

    ``coordinate_perms[g][i]`` is the position that coordinate ``i`` is sent to.
    """

    space: CoordinateSpace
    observable_perms: list[tuple[int, ...]]
    coordinate_perms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        perms = []
        for op in self.observable_perms:
            perms.append([self.space.index(_map_mask(m, op)) for m in self.space.masks])
        self.coordinate_perms = np.array(perms, dtype=np.int64).reshape(len(perms), self.space.dim)

    @property
    def order(self) -> int:
        return len(self.observable_perms)

    @classmethod
    def trivial(cls, space: CoordinateSpace) -> "SymmetryGroup":
        return cls(space, [tuple(range(len(space.observables)))])

    @classmethod
    def generated(cls, space: CoordinateSpace, generators: Iterable[Sequence[int]]) -> "SymmetryGroup":
        """Breadth-first closure of ``generators``."""
        n = len(space.observables)
        ident = tuple(range(n))
        gens = [tuple(g) for g in generators]
        seen = {ident}
        order = [ident]
        queue = deque([ident])
        while queue:
            g = queue.popleft()
            for s in gens:
                h = _compose(s, g)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    queue.append(h)
        return cls(space, order)

    def act(self, g: int, vec: Sequence) -> tuple:
        perm = self.coordinate_perms[g]
        out = [None] * len(vec)
        for i, v in enumerate(vec):
            out[perm[i]] = v
        return tuple(out)

    def orbit(self, vec: Sequence) -> set[tuple]:
        return {self.act(g, vec) for g in range(self.order)}

    def preserves(self, g: int, cone: HCone) -> bool:
        """Whether element ``g`` maps the row set of ``cone`` onto itself."""
        def keyset(rows, kind):
            out = set()
            for f in rows:
                c = primitive(f.coeffs)
                if kind == "eq":
                    c = _line_key(c)
                out.add(c)
            return out

        for rows, kind in ((cone.inequalities, "ge"), (cone.equalities, "eq")):
            ref = keyset(rows, kind)
            moved = keyset([type(f)(self.act(g, f.coeffs), f.relation) for f in rows], kind)
            if ref != moved:
                return False
        return True

    def restricted_to(self, cone: HCone) -> "SymmetryGroup":
        keep = [self.observable_perms[g] for g in range(self.order) if self.preserves(g, cone)]
        return SymmetryGroup(self.space, keep)

    def with_space(self, space: CoordinateSpace) -> "SymmetryGroup":
        return SymmetryGroup(space, self.observable_perms)


def _line_key(c):
    for x in c:
        if x:
            return c if x > 0 else tuple(-y for y in c)
    return c


def scenario_generators(scenario, network: bool = True) -> list[tuple[int, ...]]:
    """Setting relabelings within each party and swaps of parties with equal
    setting counts.

    With ``network`` set, bilocal scenarios only swap the two end parties;
    otherwise every party pair is allowed as in the plain Bell scenario.
    """
    obs = scenario.observables
    n = len(obs)
    index = {(o.party, o.setting): i for i, o in enumerate(obs)}
    gens: list[tuple[int, ...]] = []
    for p, m in enumerate(scenario.settings):
        for s in range(m - 1):
            perm = list(range(n))
            a, b = index[(p, s)], index[(p, s + 1)]
            perm[a], perm[b] = b, a
            gens.append(tuple(perm))
    parties = range(len(scenario.settings))
    pairs = list(itertools.combinations(parties, 2))
    if network and scenario.kind == "bilocal":
        pairs = [(0, len(scenario.settings) - 1)]
    for p, q in pairs:
        if scenario.settings[p] != scenario.settings[q]:
            continue
        perm = list(range(n))
        for s in range(scenario.settings[p]):
            a, b = index[(p, s)], index[(q, s)]
            perm[a], perm[b] = b, a
        gens.append(tuple(perm))
    return gens


def scenario_group(scenario, space: CoordinateSpace | None = None, cone: HCone | None = None,
                   network: bool = True) -> SymmetryGroup:
    """Symmetry group of a scenario (trivial for the IC scenario), optionally
    cut down to the elements preserving ``cone``."""
    space = space or scenario.space
    if scenario.kind == "ic":
        return SymmetryGroup.trivial(space)
    group = SymmetryGroup.generated(space, scenario_generators(scenario, network))
    if cone is not None:
        group = group.with_space(cone.space).restricted_to(cone).with_space(space)
    return group


# ---------------------------------------------------------------------------
# canonical forms and classes
# ---------------------------------------------------------------------------


def _int_matrix(rays: Sequence[Sequence]) -> np.ndarray:
    rows = [primitive(r) for r in rays]
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


def _lexmin_rows(stack: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic minimum over axis 0 of a (G, k, D) array."""
    best = stack[0].copy()
    for cand in stack[1:]:
        diff = cand != best
        anyd = diff.any(axis=1)
        first = diff.argmax(axis=1)
        rows = np.arange(best.shape[0])
        less = anyd & (cand[rows, first] < best[rows, first])
        best[less] = cand[less]
    return best


def canonical_matrix(R: np.ndarray, group: SymmetryGroup) -> np.ndarray:
    inv = np.argsort(group.coordinate_perms, axis=1)  # out[perm[i]] = v[i] -> out = v[inv]
    return _lexmin_rows(np.stack([R[:, inv[g]] for g in range(group.order)]))


def canonical_form(ray: Sequence, group: SymmetryGroup) -> tuple[Fraction, ...]:
    """Lexicographic minimum of the orbit of ``ray``."""
    return min(group.orbit(tuple(Fraction(x) for x in ray)))


@dataclass
class RayClass:
    representative: tuple[Fraction, ...]
    orbit_size: int
    members: list[int] = field(default_factory=list)
    labels: set[str] = field(default_factory=set)

    def to_dict(self) -> dict:
        from ..exactgeom.rational import format_rational

        return {
            "representative": [format_rational(x) for x in self.representative],
            "orbit_size": self.orbit_size,
            "labels": sorted(self.labels),
        }


def orbit_classes(rays: VCone | Sequence[Sequence], group: SymmetryGroup) -> list[RayClass]:
    """Partition rays by canonical form; classes sorted by representative."""
    ray_list = rays.rays if isinstance(rays, VCone) else list(rays)
    if not ray_list:
        return []
    R = _int_matrix(ray_list)
    C = canonical_matrix(R, group)
    uniq, inverse = np.unique(C, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    members: list[list[int]] = [[] for _ in range(len(uniq))]
    for i, c in enumerate(inverse):
        members[c].append(i)
    out = []
    for rep, mem in zip(uniq, members):
        rep_t = tuple(Fraction(int(x)) for x in rep)
        out.append(RayClass(rep_t, len(group.orbit(rep_t)), mem))
    return out
