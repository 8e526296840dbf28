"""Symmetry reduction, LP classification, validity checks and derivations."""

from .certificates import PROOFS, Proof, ProofResult, build_certificate, builtin_certificates, verify_all, verify_proof
from .derive import Derived, derive_gtnl_witness, derive_inequality, derive_with_noise
from .membership import (
    FLOAT_TOL,
    Validity,
    check_hybrid_validity,
    check_validity,
    gtnl_membership_general,
    hybrid_membership,
    is_bilocal,
    is_gtnl_extremal,
    is_local,
    joint_hybrid_system,
)
from .registry import REGISTRY, S_LNS_SHORT, NamedInequality, get
from .report import Classification, classify, ray_labels, shannon_relaxation
from .symmetry import (
    RayClass,
    SymmetryGroup,
    canonical_form,
    orbit_classes,
    scenario_generators,
    scenario_group,
)

__all__ = [
    "FLOAT_TOL",
    "PROOFS",
    "REGISTRY",
    "S_LNS_SHORT",
    "Classification",
    "Derived",
    "NamedInequality",
    "Proof",
    "ProofResult",
    "RayClass",
    "SymmetryGroup",
    "Validity",
    "build_certificate",
    "builtin_certificates",
    "canonical_form",
    "check_hybrid_validity",
    "check_validity",
    "classify",
    "derive_gtnl_witness",
    "derive_inequality",
    "derive_with_noise",
    "get",
    "gtnl_membership_general",
    "hybrid_membership",
    "is_bilocal",
    "is_gtnl_extremal",
    "is_local",
    "joint_hybrid_system",
    "orbit_classes",
    "ray_labels",
    "scenario_generators",
    "scenario_group",
    "shannon_relaxation",
    "verify_all",
    "verify_proof",
]
