"""Entropy coordinates over labelled observables.

A coordinate is a subset of observables (a bitmask over the ordered observable
list).  Spaces always start with the empty set and list the remaining subsets
by size, then lexicographically by observable position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactgeom import HCone, LinearForm
from .exactgeom.rational import as_fraction, format_rational

PARTY_LETTERS = "ABCDEFGH"


class SignalingError(ValueError):
    """Context marginals of a box disagree on a shared subset."""


class UnknownSubset(KeyError):
    """An entropy term refers to a subset that is not a coordinate."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown subset"


@dataclass(frozen=True)
class Observable:
    name: str
    party: int = 0
    setting: int = 0

    @classmethod
    def of(cls, party: int, setting: int, bare: bool = False) -> "Observable":
        letter = PARTY_LETTERS[party]
        return cls(letter if bare else f"{letter}{setting}", party, setting)

    def __str__(self):
        return self.name


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def submasks(mask: int) -> list[int]:
    """All subsets of ``mask`` (including 0 and ``mask``)."""
    out = [0]
    for b in bits(mask):
        out += [m | (1 << b) for m in out]
    return out


def _order_key(mask: int):
    return (popcount(mask), bits(mask))


class CoordinateSpace:
    """Ordered set of observable subsets."""

    def __init__(self, observables: Sequence[Observable], masks: Iterable[int], *, sort: bool = True):
        self.observables = tuple(observables)
        masks = list(dict.fromkeys(int(m) for m in masks))
        if sort:
            masks.sort(key=_order_key)
        full = (1 << len(self.observables)) - 1
        if any(m & ~full for m in masks):
            raise ValueError("subset refers to an unknown observable")
        self.masks = tuple(masks)
        self._index = {m: i for i, m in enumerate(self.masks)}
        self._by_name = {o.name: i for i, o in enumerate(self.observables)}

    # -- constructors
    @classmethod
    def full(cls, observables: Sequence[Observable]) -> "CoordinateSpace":
        return cls(observables, range(1 << len(observables)))

    @classmethod
    def marginal(cls, observables: Sequence[Observable], contexts: Iterable[int]) -> "CoordinateSpace":
        masks = {0}
        for c in contexts:
            masks.update(submasks(c))
        return cls(observables, masks)

    # -- Space protocol
    @property
    def dim(self) -> int:
        return len(self.masks)

    @property
    def keys(self):
        return self.masks

    def index(self, key) -> int:
        mask = self.mask(key)
        try:
            return self._index[mask]
        except KeyError:
            raise UnknownSubset(f"H({self.subset_label(mask)}) is not a coordinate of this space") from None

    def labels(self) -> list[list[str]]:
        return [[self.observables[b].name for b in bits(m)] for m in self.masks]

    def restrict(self, keep: Sequence[int]) -> "CoordinateSpace":
        return CoordinateSpace(self.observables, [self.masks[i] for i in keep], sort=False)

    def __eq__(self, other):
        return isinstance(other, CoordinateSpace) and (self.observables, self.masks) == (other.observables, other.masks)

    def __hash__(self):
        return hash((self.observables, self.masks))

    def __contains__(self, key) -> bool:
        try:
            return self.mask(key) in self._index
        except KeyError:
            return False

    def __repr__(self):
        return f"CoordinateSpace({[o.name for o in self.observables]}, dim={self.dim})"

    # -- helpers
    @property
    def names(self) -> list[str]:
        return [o.name for o in self.observables]

    def mask(self, key) -> int:
        """Bitmask of a subset given as mask, name string or iterable of names."""
        if isinstance(key, (int, np.integer)):
            return int(key)
        if isinstance(key, str):
            key = split_names(key, self.names)
        m = 0
        for name in key:
            if isinstance(name, Observable):
                name = name.name
            try:
                m |= 1 << self._by_name[name]
            except KeyError:
                raise UnknownSubset(f"unknown observable {name!r}") from None
        return m

    def subset_label(self, mask: int) -> str:
        return "".join(self.observables[b].name for b in bits(mask))

    def coordinate_labels(self) -> list[str]:
        return [f"H({self.subset_label(m)})" for m in self.masks]

    def to_json(self) -> list[list[str]]:
        return self.labels()

    @classmethod
    def from_json(cls, labels: Sequence[Sequence[str]], observables: Sequence[Observable] | None = None):
        if observables is None:
            seen: dict[str, None] = {}
            for lab in labels:
                for n in lab:
                    seen.setdefault(n, None)
            observables = [_guess_observable(n) for n in seen]
            observables.sort(key=lambda o: (o.party, o.setting, o.name))
        names = {o.name: i for i, o in enumerate(observables)}
        masks = [sum(1 << names[n] for n in lab) for lab in labels]
        return cls(observables, masks, sort=False)


def _guess_observable(name: str) -> Observable:
    m = re.fullmatch(r"([A-Z])(\d*)", name)
    if m and m.group(1) in PARTY_LETTERS:
        return Observable(name, PARTY_LETTERS.index(m.group(1)), int(m.group(2) or 0))
    return Observable(name, 99, 0)


def split_names(text: str, names: Sequence[str]) -> list[str]:
    """Split ``"A0B1"`` or ``"A0,B1"`` into observable names (longest match first)."""
    text = text.replace(" ", "")
    if not text:
        return []
    if "," in text:
        return [t for t in text.split(",") if t]
    ordered = sorted(names, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        for n in ordered:
            if text.startswith(n, i):
                out.append(n)
                i += len(n)
                break
        else:
            raise UnknownSubset(f"cannot parse observable list {text!r}")
    return out


# ---------------------------------------------------------------------------
# Shannon inequalities
# ---------------------------------------------------------------------------


def elemental_forms(variables: Sequence[int]) -> list[dict[int, int]]:
    """Elemental inequalities over the observables at positions ``variables``,
    as sparse ``{mask: coefficient}`` dictionaries."""
    n = len(variables)
    if n < 1:
        raise ValueError("need at least one variable")
    bit = [1 << v for v in variables]
    full = sum(bit)
    rows: list[dict[int, int]] = []
    for i in range(n):
        rows.append({full: 1, full & ~bit[i]: -1})
    for i, j in combinations(range(n), 2):
        rest = [bit[k] for k in range(n) if k not in (i, j)]
        for r in range(len(rest) + 1):
            for sub in combinations(rest, r):
                s = sum(sub)
                rows.append({s | bit[i]: 1, s | bit[j]: 1, s | bit[i] | bit[j]: -1, s: -1})
    return rows


def _sparse_to_form(row: Mapping[int, int], space: CoordinateSpace, relation="ge") -> LinearForm:
    coeffs = [Fraction(0)] * space.dim
    for mask, c in row.items():
        if mask == 0:
            continue
        coeffs[space.index(mask)] += c
    return LinearForm.ge(coeffs) if relation == "ge" else LinearForm.eq(coeffs)


def empty_equality(space: CoordinateSpace) -> LinearForm:
    coeffs = [Fraction(0)] * space.dim
    coeffs[space.index(0)] = Fraction(1)
    return LinearForm.eq(coeffs)


def elemental_inequalities(n: int | Sequence[int], space: CoordinateSpace | None = None) -> HCone:
    """Monotonicity and submodularity rows over ``n`` variables, plus H(∅)=0.

    ``n`` is either a count (the first ``n`` observables of ``space``) or a list
    of observable positions.  Without a space, the full space over generic
    observables ``X1..Xn`` is used.
    """
    if isinstance(n, int):
        if n < 1:
            raise ValueError("need at least one variable")
        variables = list(range(n))
    else:
        variables = list(n)
    if space is None:
        obs = [Observable(f"X{i + 1}", 0, i) for i in range(len(variables))]
        space = CoordinateSpace.full(obs)
    rows = [_sparse_to_form(r, space) for r in elemental_forms(variables)]
    return HCone(space, rows, [empty_equality(space)] if 0 in space._index else [])


def shannon_count(n: int) -> int:
    return (2 ** (n - 2)) * math.comb(n, 2) + n if n >= 2 else n


# ---------------------------------------------------------------------------
# entropy expressions
# ---------------------------------------------------------------------------


class Expr:
    """Linear combination of joint entropies keyed by frozensets of names."""

    def __init__(self, terms: Mapping[frozenset, Fraction] | None = None):
        self.terms: dict[frozenset, Fraction] = {}
        for k, v in (terms or {}).items():
            v = as_fraction(v)
            if v and k:
                self.terms[frozenset(k)] = self.terms.get(frozenset(k), Fraction(0)) + v
        self.terms = {k: v for k, v in self.terms.items() if v}

    def __add__(self, other: "Expr") -> "Expr":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, Fraction(0)) + v
        return Expr(t)

    def __neg__(self) -> "Expr":
        return Expr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, k) -> "Expr":
        k = as_fraction(k)
        return Expr({s: v * k for s, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Expr) and self.terms == other.terms

    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            s = "+" if v > 0 else "-"
            mag = abs(v)
            coef = "" if mag == 1 else f"{format_rational(mag)}*"
            parts.append(f"{s}{coef}H({''.join(sorted(k))})")
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out


def _names(arg) -> list[str]:
    if isinstance(arg, str):
        return [arg]
    return [str(a) for a in arg]


def H(*variables, given: Iterable = ()) -> Expr:
    """H(X | given) = H(X, given) - H(given)."""
    xs = frozenset(n for v in variables for n in _names(v))
    cond = frozenset(n for v in given for n in _names(v)) if not isinstance(given, str) else frozenset([given])
    return Expr({xs | cond: 1}) - Expr({cond: 1})


def I(a, b, given: Iterable = ()) -> Expr:
    """I(A:B | C) = H(AC) + H(BC) - H(ABC) - H(C)."""
    A = frozenset(_names(a))
    B = frozenset(_names(b))
    C = frozenset(_names(given)) if not isinstance(given, str) else frozenset([given])
    return Expr({A | C: 1}) + Expr({B | C: 1}) - Expr({A | B | C: 1}) - Expr({C: 1})


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([HI])\(([^)]*)\)\s*"
)


def parse_expr(text: str, names: Sequence[str]) -> Expr:
    """Parse e.g. ``"H(A0B0) + H(A0|B1) - 2*I(A0:B0|C1)"``."""
    pos = 0
    total = Expr()
    text = text.strip()
    if not text:
        return total
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse entropy expression at {text[pos:]!r}")
        sign, coef, kind, body = m.groups()
        k = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            k = -k
        if kind == "H":
            main, _, cond = body.partition("|")
            term = H(split_names(main, names), given=split_names(cond, names))
        else:
            main, _, cond = body.partition("|")
            if ":" not in main:
                raise ValueError(f"mutual information needs ':' in {body!r}")
            a, b = main.split(":", 1)
            term = I(split_names(a, names), split_names(b, names), given=split_names(cond, names))
        total = total + term * k
        pos = m.end()
    return total


def functional(expr: Expr | str, space: CoordinateSpace, relation: str = "ge") -> LinearForm:
    """Coefficient vector of an entropy expression on ``space``."""
    if isinstance(expr, str):
        expr = parse_expr(expr, space.names)
    coeffs = [Fraction(0)] * space.dim
    for subset, c in expr.terms.items():
        coeffs[space.index(sorted(subset))] += c
    return LinearForm.ge(coeffs) if relation == "ge" else LinearForm.eq(coeffs)


def form_to_expr(form: LinearForm, space: CoordinateSpace) -> Expr:
    return Expr({frozenset(space.labels()[i]): c for i, c in enumerate(form.coeffs) if c})


def format_form(form: LinearForm, space: CoordinateSpace) -> str:
    rel = ">= 0" if form.relation.value == "ge" else "= 0"
    return f"{form_to_expr(form, space)} {rel}"


# ---------------------------------------------------------------------------
# entropy vectors
# ---------------------------------------------------------------------------


@dataclass
class EntropyVector:
    space: CoordinateSpace
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.space.dim:
            raise ValueError("entropy vector length does not match its space")
        self.values = tuple(self.values)
        if 0 in self.space._index and self.values[self.space.index(0)] != 0:
            raise ValueError("H(∅) must be 0")

    @classmethod
    def exact(cls, space: CoordinateSpace, values: Mapping | Sequence) -> "EntropyVector":
        if isinstance(values, Mapping):
            vec = [Fraction(0)] * space.dim
            for k, v in values.items():
                vec[space.index(k)] = as_fraction(v)
            return cls(space, tuple(vec))
        return cls(space, tuple(as_fraction(v) for v in values))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    def __getitem__(self, key):
        return self.values[self.space.index(key)]

    def evaluate(self, form: LinearForm):
        if self.is_exact:
            return form.dot(self.values)
        return float(sum(float(c) * v for c, v in zip(form.coeffs, self.values) if c))

    def pins(self) -> dict[int, object]:
        return {i: v for i, v in enumerate(self.values)}

    def to_dict(self) -> dict:
        vals = [format_rational(v) if isinstance(v, Fraction) else format(float(v), ".17g") for v in self.values]
        return {"space": self.space.to_json(), "values": vals}

    @classmethod
    def from_dict(cls, data: Mapping, space: CoordinateSpace | None = None) -> "EntropyVector":
        space = space or CoordinateSpace.from_json(data["space"])
        raw = data["values"]
        if all(isinstance(v, str) and re.fullmatch(r"-?\d+(/\d+)?", v) for v in raw):
            return cls(space, tuple(Fraction(v) for v in raw))
        return cls(space, tuple(float(v) for v in raw))


def shannon_entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def exact_entropy(p: np.ndarray) -> Fraction:
    """Shannon entropy of a rational distribution whose nonzero entries are all
    powers of 1/2, the only case with a rational value."""
    total = Fraction(0)
    for v in np.ravel(p):
        v = Fraction(v)
        if v == 0:
            continue
        k = v.denominator.bit_length() - 1
        if v.numerator != 1 or v.denominator != 1 << k:
            raise ValueError(f"probability {v} is not a power of 1/2; entropy is irrational")
        total += k * v
    return total


def entropy_vector(box, scenario, *, tol: float = 1e-12, exact: bool = False) -> EntropyVector:
    """Entropy vector of ``box`` on the observable coordinates of ``scenario``.

    Float by default. With ``exact`` the box must be rational and every
    marginal probability a power of 1/2. Raises :class:`SignalingError` when
    two contexts disagree on a shared marginal.
    """
    space = scenario.space
    obs = scenario.observables
    if exact:
        if not box.exact:
            raise ValueError("exact entropies need a rational box")
        table = box.table
    else:
        table = np.asarray(box.float_table(), dtype=float)
    nparty = box.parties
    marg: dict[int, tuple[np.ndarray, int]] = {}
    for ci, ctx in enumerate(scenario.contexts):
        setting = [0] * nparty
        present = []
        for b in bits(ctx):
            o = obs[b]
            setting[o.party] = o.setting
            present.append(o.party)
        joint = table[tuple(setting)]  # outcomes per party
        for sub in submasks(ctx):
            if sub == 0:
                continue
            keep = sorted(obs[b].party for b in bits(sub))
            drop = tuple(a for a in range(nparty) if a not in keep)
            p = joint.sum(axis=drop) if drop else joint
            if sub in marg:
                q, cj = marg[sub]
                if exact:
                    differs = q.shape != p.shape or any(x != y for x, y in zip(np.ravel(q), np.ravel(p)))
                else:
                    differs = q.shape != p.shape or np.max(np.abs(q - p)) > tol
                if differs:
                    raise SignalingError(
                        f"marginal of {space.subset_label(sub)} differs between contexts "
                        f"{space.subset_label(scenario.contexts[cj])} and {space.subset_label(ctx)}"
                    )
            else:
                marg[sub] = (p, ci)
    if exact:
        ex = {m: exact_entropy(marg[m][0]) for m in space.masks if m}
        return EntropyVector(space, tuple(ex.get(m, Fraction(0)) for m in space.masks))
    vals = [0.0] * space.dim
    for m in space.masks:
        if m:
            vals[space.index(m)] = shannon_entropy(marg[m][0])
    return EntropyVector(space, tuple(vals))
