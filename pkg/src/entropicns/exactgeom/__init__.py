"""Exact-rational polyhedral kernel."""

from .cone import (
    Certificate,
    HCone,
    IndexSpace,
    LinearForm,
    Relation,
    VCone,
    certificate_mismatch,
    reindex,
    reindex_vector,
    verify_certificate,
)
from .dd import DDConfig, dd_enumerate, facets_from_rays
from .errors import CertificateError, DimensionMismatch, FeasibleSystemError, GeometryError, ResourceLimitExceeded
from .fm import fm_eliminate, remove_redundant
from .iis import iis_rows, iis_shrink
from .lp import LPOutcome, implies, is_feasible, lp_check, lp_min, verify_outcome
from .rational import canonical_line, canonical_ray, primitive

__all__ = [
    "Certificate",
    "CertificateError",
    "DDConfig",
    "DimensionMismatch",
    "FeasibleSystemError",
    "GeometryError",
    "HCone",
    "IndexSpace",
    "LPOutcome",
    "LinearForm",
    "Relation",
    "ResourceLimitExceeded",
    "VCone",
    "canonical_line",
    "canonical_ray",
    "certificate_mismatch",
    "dd_enumerate",
    "facets_from_rays",
    "fm_eliminate",
    "iis_rows",
    "iis_shrink",
    "implies",
    "is_feasible",
    "lp_check",
    "lp_min",
    "primitive",
    "reindex",
    "reindex_vector",
    "remove_redundant",
    "verify_certificate",
    "verify_outcome",
]
