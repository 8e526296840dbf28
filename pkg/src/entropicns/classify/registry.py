"""Named entropic inequalities, all stored in the form ``expr >= 0``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..entropy import CoordinateSpace, functional, parse_expr
from ..exactgeom import HCone, LinearForm
from ..scenarios import (
    MarginalScenario,
    bilocal_local_system,
    local_system,
    ns_cone,
    parse_scenario,
)


@dataclass(frozen=True)
class NamedInequality:
    id: str
    scenario_name: str
    expr: str
    description: str
    validity: str  # "local", "ns", "hybrid", "bilocal" or "none"

    @cached_property
    def scenario(self) -> MarginalScenario:
        return parse_scenario(self.scenario_name).build()

    @property
    def space(self) -> CoordinateSpace:
        return self.scenario.space

    @cached_property
    def form(self) -> LinearForm:
        return functional(self.expr, self.space)

    def evaluate(self, vec) -> object:
        """Value of the left-hand side on an entropy vector of the scenario."""
        from ..entropy import EntropyVector
        from ..exactgeom import reindex_vector

        if isinstance(vec, EntropyVector):
            values = reindex_vector(vec.values, vec.space, self.space)
        else:
            values = list(vec)
        if all(isinstance(v, (int,)) or hasattr(v, "denominator") for v in values):
            return self.form.dot(values)
        return float(sum(float(c) * float(v) for c, v in zip(self.form.coeffs, values) if c))

    def system(self) -> HCone | None:
        sc = self.scenario
        if self.validity == "local":
            return local_system(sc)
        if self.validity == "ns":
            return ns_cone(sc)
        if self.validity == "bilocal":
            return bilocal_local_system(sc)
        return None


_ECHSH = "H(A0B0) + H(A0B1) + H(A1B0) - H(A1B1) - H(A0) - H(B0)"

_ENTRIES = [
    NamedInequality(
        "echsh", "bell:2x2", _ECHSH,
        "entropic CHSH inequality (-S_E >= 0)", "local",
    ),
    NamedInequality(
        "s3", "bell:3x3",
        "-I(A0:B2) + I(A0:B1) - I(A1:B1) + I(A1:B0) - I(A1:B2) - I(A2:B2) - I(A2:B1) - I(A2:B0)"
        " + H(A2) + 2*H(B2) + H(B1)",
        "entropic Collins-Gisin inequality (-S_3 >= 0)", "local",
    ),
    NamedInequality(
        "m3", "bell:2x2x2",
        "-H(A0B1C1) + H(A1B1C1) + H(A1B1C0) + H(A1B0C1) + H(A0B0C0) - H(B0C0) - H(A1C1) - H(A1B1)",
        "tripartite inequality M_3 <= 0 (as -M_3 >= 0)", "local",
    ),
    NamedInequality(
        "monogamy", "bell:2x2x2",
        "H(A0B0) + H(A0B1) + H(A1B0) - H(A1B1) - H(A0) - H(B0)"
        " + H(A0C0) + H(A0C1) + H(A1C0) - H(A1C1) - H(A0) - H(C0)",
        "monogamy of entropic CHSH violations, -(S_E^AB + S_E^AC) >= 0", "ns",
    ),
    NamedInequality(
        "s_lns", "bell:2x2x2",
        "H(A1B1C0) + H(A1B0C0) + H(A1B0C1) + H(A0B1C0) + H(A0B1C1)"
        " - H(A1B1C1) - H(A1B0) - H(A1C0) - H(A0C1) - H(B1C0)",
        "genuine tripartite nonlocality witness S_L|NS >= 0", "hybrid",
    ),
    NamedInequality(
        "bilocal5", "bilocal:2x1x1",
        "H(A0B) + H(C|A1B) - H(A0C)",
        "bilocality inequality H(A0C) <= H(A0B) + H(C|A1B)", "bilocal",
    ),
    NamedInequality(
        "s_bl", "bilocal:2x2x2",
        "-H(A0B0C0) + H(A1B1C0) + H(A0B0C1) + H(A1B1C1) - H(A1C1) - H(A1B1)",
        "bilocality inequality S_BL >= 0", "bilocal",
    ),
    NamedInequality(
        "ic", "ic",
        "H(M) - I(X0:G0) - I(X1:G1)",
        "information causality, I(X0:G0) + I(X1:G1) <= H(M)", "none",
    ),
]

REGISTRY: dict[str, NamedInequality] = {e.id: e for e in _ENTRIES}

# Printed main-text variant of the S_L|NS witness (no H(A0B1C1) term); kept
# outside the registry and only used to record its validity status.
S_LNS_SHORT = NamedInequality(
    "s_lns_short", "bell:2x2x2",
    "H(A1B1C0) + H(A1B0C0) + H(A1B0C1) + H(A0B1C0)"
    " - H(A1B1C1) - H(A1B0) - H(A1C0) - H(A0C1) - H(B1C0)",
    "nine-term variant of S_L|NS", "hybrid",
)


def get(name: str) -> NamedInequality:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown inequality {name!r}; known: {', '.join(REGISTRY)}") from None


def expression_form(text: str, space: CoordinateSpace, relation: str = "ge") -> LinearForm:
    return functional(parse_expr(text, space.names), space, relation)
