"""Built-in validity proofs as exact sums of system rows.

Each proof lists Shannon-type rows as ``"lhs >= rhs"`` (or ``"lhs = rhs"``
for constraint equalities) with a rational multiplier.  Every row must be an
actual row of the named system; the weighted sum must reproduce the target
inequality coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..entropy import CoordinateSpace, functional, parse_expr
from ..exactgeom import Certificate, CertificateError, HCone, LinearForm, certificate_mismatch, reindex
from ..exactgeom.rational import primitive
from ..scenarios import (
    bell_scenario,
    bilocal_local_system,
    bilocal_scenario,
    hybrid_system,
    local_system,
    ns_cone,
)
from .registry import get

SYSTEMS: dict[str, Callable[[], HCone]] = {
    "ns:bell:2x2x2": lambda: ns_cone(bell_scenario([2, 2, 2])),
    "hybrid:A|BC": lambda: hybrid_system("A|BC"),
    "hybrid:B|AC": lambda: hybrid_system("B|AC"),
    "hybrid:C|AB": lambda: hybrid_system("C|AB"),
    "local:bell:2x2": lambda: local_system(bell_scenario([2, 2])),
    "local:bell:2x2x2": lambda: local_system(bell_scenario([2, 2, 2])),
    "bilocal:2x1x1": lambda: bilocal_local_system(bilocal_scenario([2, 1, 1], "extended")),
    "bilocal:2x2x2": lambda: bilocal_local_system(bilocal_scenario([2, 2, 2], "extended")),
}


@dataclass
class Proof:
    id: str
    inequality: str  # registry id
    system_id: str
    rows: list[tuple[str, Fraction]] = field(default_factory=list)

    def system(self) -> HCone:
        return SYSTEMS[self.system_id]()


@dataclass
class ProofResult:
    id: str
    ok: bool
    message: str = ""
    mismatch: list[str] = field(default_factory=list)

    def to_dict(self):
        return {"id": self.id, "ok": self.ok, "message": self.message, "mismatch": self.mismatch}


def _row_form(text: str, space: CoordinateSpace) -> LinearForm:
    if ">=" in text:
        lhs, rhs = text.split(">=")
        rel = "ge"
    elif "=" in text:
        lhs, rhs = text.split("=")
        rel = "eq"
    else:
        raise ValueError(f"row {text!r} has no relation")
    names = space.names
    expr = parse_expr(lhs, names) - parse_expr(rhs, names)
    return functional(expr, space, rel)


def _locate(system: HCone, form: LinearForm, text: str):
    rid = system.find_row(form)
    if rid is None:
        prim = LinearForm(tuple(primitive(form.coeffs)), form.relation)
        rid = system.find_row(prim)
        if rid is None and form.relation.value == "eq":
            rid = system.find_row(-prim)
            if rid is not None:
                return rid, Fraction(-1) * (form.coeffs[form.support()[0]] / prim.coeffs[prim.support()[0]])
        if rid is None:
            raise CertificateError(f"{text!r} is not a row of the system")
        return rid, form.coeffs[form.support()[0]] / prim.coeffs[prim.support()[0]]
    return rid, Fraction(1)


def build_certificate(proof: Proof, system: HCone | None = None) -> tuple[Certificate, HCone]:
    system = system or proof.system()
    ineq = get(proof.inequality)
    terms = []
    for text, mult in proof.rows:
        form = _row_form(text, system.space)
        rid, scale = _locate(system, form, text)
        terms.append((rid, Fraction(mult) * scale))
    target = reindex(ineq.form, ineq.space, system.space)
    return Certificate(terms, target), system


def verify_proof(proof: Proof) -> ProofResult:
    try:
        cert, system = build_certificate(proof)
    except (CertificateError, KeyError, ValueError) as exc:
        return ProofResult(proof.id, False, str(exc))
    if any(rid[0] == "ge" and m < 0 for rid, m in cert.terms):
        return ProofResult(proof.id, False, "negative multiplier on an inequality row")
    bad = certificate_mismatch(cert, system)
    if bad:
        labels = [system.space.subset_label(system.space.masks[i]) for i in bad]
        return ProofResult(proof.id, False, "sum differs from the target at " + ", ".join(labels), labels)
    return ProofResult(proof.id, True, f"{len(cert.terms)} rows")


def _unit(*rows: str) -> list[tuple[str, Fraction]]:
    return [(r, Fraction(1)) for r in rows]


_PROOFS = [
    Proof("monogamy", "monogamy", "ns:bell:2x2x2", _unit(
        "H(A0B0) + H(A0C1) >= H(A0B0C1) + H(A0)",
        "H(A0B1) + H(A0C0) >= H(A0B1C0) + H(A0)",
        "H(A1B0) + H(B0C1) >= H(A1B0C1) + H(B0)",
        "H(A1C0) + H(B1C0) >= H(A1B1C0) + H(C0)",
        "H(A0B0C1) >= H(B0C1)",
        "H(A0B1C0) >= H(B1C0)",
        "H(A1B0C1) >= H(A1C1)",
        "H(A1B1C0) >= H(A1B1)",
    )),
    Proof("gtnl_A|BC", "s_lns", "hybrid:A|BC", _unit(
        "H(A0A1B1C0) >= H(A0A1C0)",
        "H(A0A1B1C1) >= H(A1B1C1)",
        "H(A0A1B0C0) >= H(A0A1B0)",
        "H(A0A1B0C1) >= H(A0A1C1)",
        "H(A1B1C0) + H(A0B1C0) >= H(A0A1B1C0) + H(B1C0)",
        "H(A0A1C1) + H(A0B1C1) >= H(A0A1B1C1) + H(A0C1)",
        "H(A0A1C0) + H(A1B0C0) >= H(A0A1B0C0) + H(A1C0)",
        "H(A0A1B0) + H(A1B0C1) >= H(A0A1B0C1) + H(A1B0)",
    )),
    # the two remaining bipartitions were found with the LP dual and frozen here
    Proof("gtnl_B|AC", "s_lns", "hybrid:B|AC", _unit(
        "H(A0B0B1C0) >= H(B0B1C0)",
        "H(A0B1C0) + H(B0B1C0) >= H(B1C0) + H(A0B0B1C0)",
        "H(A0B0B1C1) >= H(A0B0C1)",
        "H(A0B0C1) + H(A0B1C1) >= H(A0C1) + H(A0B0B1C1)",
        "H(A1B0B1C0) >= H(A1B0B1)",
        "H(A1B0C0) + H(A1B1C0) >= H(A1C0) + H(A1B0B1C0)",
        "H(A1B0B1C1) >= H(A1B1C1)",
        "H(A1B0B1) + H(A1B0C1) >= H(A1B0) + H(A1B0B1C1)",
    )),
    Proof("gtnl_C|AB", "s_lns", "hybrid:C|AB", _unit(
        "H(A0B1C0C1) >= H(B1C0C1)",
        "H(A0B1C0C1) >= H(A0C0C1)",
        "H(A0B1C0) + H(B1C0C1) >= H(B1C0) + H(A0B1C0C1)",
        "H(A0B1C1) + H(A0C0C1) >= H(A0C1) + H(A0B1C0C1)",
        "H(A1B0C0C1) >= H(A1C0C1)",
        "H(A1B0C0) + H(A1B0C1) >= H(A1B0) + H(A1B0C0C1)",
        "H(A1B1C0C1) >= H(A1B1C1)",
        "H(A1B1C0) + H(A1C0C1) >= H(A1C0) + H(A1B1C0C1)",
    )),
    Proof("bilocal5", "bilocal5", "bilocal:2x1x1", _unit(
        "H(A0) + H(C) >= H(A0C)",
        "H(A0A1BC) >= H(A0A1C)",
        "H(A0A1) + H(A0B) >= H(A0A1B) + H(A0)",
        "H(A0A1B) + H(A1BC) >= H(A0A1BC) + H(A1B)",
    ) + [("H(A0A1) + H(C) = H(A0A1C)", Fraction(-1))]),
    Proof("s_bl", "s_bl", "bilocal:2x2x2", _unit(
        "H(A0A1B0B1C0C1) >= H(A0A1B0B1C0)",
        "H(A0A1B0B1C0C1) >= H(A0A1B0C0C1)",
        "H(B0C1) + H(C0C1) >= H(B0C0C1) + H(C1)",
        "H(A0A1) + H(A1C1) >= H(A0A1C1) + H(A1)",
        "H(A0B0C1) + H(B0C0C1) >= H(A0B0C0C1) + H(B0C1)",
        "H(A1B1C0) + H(A1B1C1) >= H(A1B1C0C1) + H(A1B1)",
        "H(A0A1C1) + H(A1C0C1) >= H(A0A1C0C1) + H(A1C1)",
        "H(A0B0B1C0) + H(A0B0C0C1) >= H(A0B0B1C0C1) + H(A0B0C0)",
        "H(A1B0C0C1) + H(A1B1C0C1) >= H(A1B0B1C0C1) + H(A1C0C1)",
        "H(A0A1B0B1C0) + H(A0B0B1C0C1) >= H(A0A1B0B1C0C1) + H(A0B0B1C0)",
        "H(A0A1B0C0C1) + H(A1B0B1C0C1) >= H(A0A1B0B1C0C1) + H(A1B0C0C1)",
        # without this row the sum falls short of the target by I(A1:C1)
        "H(A1) + H(C1) >= H(A1C1)",
    ) + [("H(A0A1) + H(C0C1) = H(A0A1C0C1)", Fraction(-1))]),
    # chain-rule argument expanded into elemental rows (LP dual, frozen)
    Proof("m3", "m3", "local:bell:2x2x2", _unit(
        "H(A0A1B0B1C0C1) >= H(A0B0B1C0C1)",
        "H(A0A1B0B1C0C1) >= H(A0A1B1C0C1)",
        "H(A0A1B0B1C0C1) >= H(A0A1B0B1C1)",
        "H(A0B0C0C1) + H(A1B0C0C1) >= H(B0C0C1) + H(A0A1B0C0C1)",
        "H(A0A1B0C0C1) + H(A1B0B1C0C1) >= H(A1B0C0C1) + H(A0A1B0B1C0C1)",
        "H(A0B0C0) + H(B0C0C1) >= H(B0C0) + H(A0B0C0C1)",
        "H(A0A1B1C0C1) + H(A0B0B1C0C1) >= H(A0B1C0C1) + H(A0A1B0B1C0C1)",
        "H(A0A1B0B1C1) + H(A0B0B1C0C1) >= H(A0B0B1C1) + H(A0A1B0B1C0C1)",
        "H(A1B0C1) + H(A1B1C1) >= H(A1C1) + H(A1B0B1C1)",
        "H(A0B0B1C1) + H(A0B1C0C1) >= H(A0B1C1) + H(A0B0B1C0C1)",
        "H(A1B0B1C1) + H(A1B1C0C1) >= H(A1B1C1) + H(A1B0B1C0C1)",
        "H(A1B1C0) + H(A1B1C1) >= H(A1B1) + H(A1B1C0C1)",
    )),
    # entropic CHSH as a sum of rows of the joint four-variable Shannon cone
    Proof("chsh_projection", "echsh", "local:bell:2x2", _unit(
        "H(A0A1B0B1) >= H(A1B0B1)",
        "H(A0A1B0B1) >= H(A0A1B1)",
        "H(A0B0) + H(A1B0) >= H(B0) + H(A0A1B0)",
        "H(A0A1B1) + H(A1B0B1) >= H(A1B1) + H(A0A1B0B1)",
        "H(A0A1) + H(A0B1) >= H(A0) + H(A0A1B1)",
        "H(A0A1B0) + H(A0A1B1) >= H(A0A1) + H(A0A1B0B1)",
    )),
]

PROOFS: dict[str, Proof] = {p.id: p for p in _PROOFS}


def builtin_certificates() -> list[tuple[Certificate, str]]:
    return [(build_certificate(p)[0], p.system_id) for p in _PROOFS]


def verify_all() -> list[ProofResult]:
    return [verify_proof(p) for p in _PROOFS]
