"""Half-space / generator representations of polyhedral cones and proof certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Iterable, Protocol, Sequence

from .errors import CertificateError, DimensionMismatch
from .rational import as_fraction, canonical_line, canonical_ray, dot, format_rational, parse_rational, primitive


class Space(Protocol):
    """What the kernel needs from a coordinate space."""

    @property
    def dim(self) -> int: ...

    @property
    def keys(self) -> Sequence[Hashable]: ...

    def index(self, key) -> int: ...

    def labels(self) -> list[list[str]]: ...

    def restrict(self, keep: Sequence[int]) -> "Space": ...


class IndexSpace:
    """Plain ``R^n`` with coordinates ``x0 .. x{n-1}``."""

    def __init__(self, n: int, keys: Sequence[Hashable] | None = None):
        self._keys = tuple(range(n)) if keys is None else tuple(keys)
        self._index = {k: i for i, k in enumerate(self._keys)}

    @property
    def dim(self) -> int:
        return len(self._keys)

    @property
    def keys(self):
        return self._keys

    def index(self, key) -> int:
        return self._index[key]

    def labels(self) -> list[list[str]]:
        return [[f"x{k}"] for k in self._keys]

    def restrict(self, keep):
        return IndexSpace(len(keep), [self._keys[i] for i in keep])

    def __eq__(self, other):
        return isinstance(other, IndexSpace) and self._keys == other._keys

    def __hash__(self):
        return hash(self._keys)

    def __repr__(self):
        return f"IndexSpace({self.dim})"


class Relation(str, Enum):
    GE = "ge"
    EQ = "eq"


@dataclass(frozen=True)
class LinearForm:
    """``coeffs . h >= 0`` (GE) or ``coeffs . h = 0`` (EQ)."""

    coeffs: tuple[Fraction, ...]
    relation: Relation = Relation.GE

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))
        object.__setattr__(self, "relation", Relation(self.relation))

    @classmethod
    def ge(cls, coeffs) -> "LinearForm":
        return cls(tuple(coeffs), Relation.GE)

    @classmethod
    def eq(cls, coeffs) -> "LinearForm":
        return cls(tuple(coeffs), Relation.EQ)

    @classmethod
    def zero(cls, n: int, relation=Relation.GE) -> "LinearForm":
        return cls((Fraction(0),) * n, relation)

    def __len__(self):
        return len(self.coeffs)

    def dot(self, h: Sequence):
        return dot(self.coeffs, h)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coeffs) if c]

    def _check(self, other: "LinearForm"):
        if len(other) != len(self):
            raise DimensionMismatch(f"forms of length {len(self)} and {len(other)}")

    def __add__(self, other: "LinearForm") -> "LinearForm":
        self._check(other)
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.relation)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.coeffs), self.relation)

    def __mul__(self, k) -> "LinearForm":
        k = as_fraction(k)
        return LinearForm(tuple(a * k for a in self.coeffs), self.relation)

    __rmul__ = __mul__

    def as_relation(self, relation) -> "LinearForm":
        return LinearForm(self.coeffs, relation)

    def normalized(self) -> "LinearForm":
        """Integer coprime coefficients; equalities also get a sign convention."""
        if self.relation is Relation.EQ:
            return LinearForm(canonical_line(self.coeffs), self.relation)
        return LinearForm(primitive(self.coeffs), self.relation)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]


RowId = tuple[str, int]


@dataclass
class HCone:
    """``{h : M h >= 0, L h = 0}`` over ``space``."""

    space: Space
    inequalities: list[LinearForm] = field(default_factory=list)
    equalities: list[LinearForm] = field(default_factory=list)

    def __post_init__(self):
        self.inequalities = [f if f.relation is Relation.GE else f.as_relation(Relation.GE) for f in self.inequalities]
        self.equalities = [f if f.relation is Relation.EQ else f.as_relation(Relation.EQ) for f in self.equalities]
        n = self.space.dim
        for f in (*self.inequalities, *self.equalities):
            if len(f) != n:
                raise DimensionMismatch(f"form of length {len(f)} in a space of dimension {n}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def row(self, rid: RowId) -> LinearForm:
        kind, i = rid
        rows = {"ge": self.inequalities, "eq": self.equalities}.get(kind)
        if rows is None or not 0 <= i < len(rows):
            raise CertificateError(f"unresolved row identifier {rid!r}")
        return rows[i]

    def row_ids(self) -> list[RowId]:
        return [("ge", i) for i in range(len(self.inequalities))] + [("eq", i) for i in range(len(self.equalities))]

    def find_row(self, form: LinearForm) -> RowId | None:
        """Row identifier of a row equal to ``form`` (exactly, not up to scaling)."""
        rows = self.inequalities if form.relation is Relation.GE else self.equalities
        kind = "ge" if form.relation is Relation.GE else "eq"
        for i, r in enumerate(rows):
            if r.coeffs == form.coeffs:
                return (kind, i)
        return None

    def with_rows(self, inequalities: Iterable[LinearForm] = (), equalities: Iterable[LinearForm] = ()) -> "HCone":
        return HCone(self.space, [*self.inequalities, *inequalities], [*self.equalities, *equalities])

    def deduplicated(self) -> "HCone":
        """Drop zero rows and rows that are positive multiples of earlier rows."""
        seen_i, ineqs = set(), []
        for f in self.inequalities:
            key = primitive(f.coeffs)
            if any(key) and key not in seen_i:
                seen_i.add(key)
                ineqs.append(f)
        seen_e, eqs = set(), []
        for f in self.equalities:
            key = canonical_line(f.coeffs)
            if any(key) and key not in seen_e:
                seen_e.add(key)
                eqs.append(f)
        return HCone(self.space, ineqs, eqs)

    def contains(self, h: Sequence) -> bool:
        return all(f.dot(h) >= 0 for f in self.inequalities) and all(f.dot(h) == 0 for f in self.equalities)

    def matrices(self):
        return [list(f.coeffs) for f in self.inequalities], [list(f.coeffs) for f in self.equalities]

    def to_dict(self) -> dict:
        return {
            "space": self.space.labels(),
            "inequalities": [f.to_strings() for f in self.inequalities],
            "equalities": [f.to_strings() for f in self.equalities],
        }

    @classmethod
    def from_dict(cls, data: dict, space: Space) -> "HCone":
        ge = [LinearForm.ge([parse_rational(x) for x in r]) for r in data.get("inequalities", [])]
        eq = [LinearForm.eq([parse_rational(x) for x in r]) for r in data.get("equalities", [])]
        return cls(space, ge, eq)


@dataclass
class VCone:
    """Generators: extremal rays (positive span) plus lineality generators (linear span)."""

    space: Space
    rays: list[tuple[Fraction, ...]] = field(default_factory=list)
    lineality: list[tuple[Fraction, ...]] = field(default_factory=list)

    def __post_init__(self):
        n = self.space.dim
        rays = []
        for r in self.rays:
            if len(r) != n:
                raise DimensionMismatch(f"ray of length {len(r)} in a space of dimension {n}")
            c = canonical_ray(r)
            if not any(c):
                raise ValueError("zero ray")
            rays.append(tuple(Fraction(x) for x in c))
        self.rays = rays
        self.lineality = [tuple(Fraction(x) for x in canonical_line(v)) for v in self.lineality]

    def ray_set(self) -> set[tuple[Fraction, ...]]:
        return set(self.rays)

    def to_dict(self) -> dict:
        out = {"space": self.space.labels(), "rays": [[format_rational(x) for x in r] for r in self.rays]}
        if self.lineality:
            out["lineality"] = [[format_rational(x) for x in r] for r in self.lineality]
        return out

    @classmethod
    def from_dict(cls, data: dict, space: Space) -> "VCone":
        rays = [tuple(parse_rational(x) for x in r) for r in data.get("rays", [])]
        lin = [tuple(parse_rational(x) for x in r) for r in data.get("lineality", [])]
        return cls(space, rays, lin)


@dataclass
class Certificate:
    """Nonnegative combination of ``system`` rows claimed to equal ``target``.

    Equality rows may carry multipliers of either sign.
    """

    terms: list[tuple[RowId, Fraction]]
    target: LinearForm

    def combination(self, system: HCone) -> tuple[Fraction, ...]:
        acc = [Fraction(0)] * system.dim
        for rid, mult in self.terms:
            row = system.row(rid)
            if len(row) != system.dim:
                raise DimensionMismatch("row length differs from the system dimension")
            m = as_fraction(mult)
            for i in row.support():
                acc[i] += m * row.coeffs[i]
        return tuple(acc)


def verify_certificate(cert: Certificate, system: HCone) -> bool:
    """Exact check that ``sum(multiplier * row) == target`` with GE multipliers >= 0."""
    for rid, mult in cert.terms:
        system.row(rid)
        if rid[0] == "ge" and as_fraction(mult) < 0:
            return False
    if len(cert.target) != system.dim:
        raise DimensionMismatch("certificate target lives in a different space")
    return cert.combination(system) == tuple(cert.target.coeffs)


def certificate_mismatch(cert: Certificate, system: HCone) -> list[int]:
    """Coordinates where the combination differs from the target."""
    comb = cert.combination(system)
    return [i for i, (a, b) in enumerate(zip(comb, cert.target.coeffs)) if a != b]


def reindex(form: LinearForm, src: Space, dst: Space) -> LinearForm:
    """Re-express ``form`` on ``dst`` by coordinate key; missing support keys raise KeyError."""
    out = [Fraction(0)] * dst.dim
    for i in form.support():
        out[dst.index(src.keys[i])] += form.coeffs[i]
    return LinearForm(tuple(out), form.relation)


def reindex_vector(vec: Sequence, src: Space, dst: Space, fill=0) -> list:
    """Coordinate-wise copy of ``vec`` into ``dst`` (keys absent from ``src`` get ``fill``)."""
    out = [fill] * dst.dim
    for i, k in enumerate(src.keys):
        try:
            out[dst.index(k)] = vec[i]
        except KeyError:
            if vec[i]:
                raise
    return out
