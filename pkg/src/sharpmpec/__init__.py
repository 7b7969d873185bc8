"""Exact checks of sharp stationarity conditions for MPECs with polyhedral lower levels."""
from .cone import HCone, VCone, canonical, h_to_v, polar, v_to_h
from .errors import SharpMpecError
from .geometry import analyze_point, check_2_nondegenerate, directional
from .io import bundled_path, parse_certificate, parse_problem
from .lp import HPolyhedron, lp_solve, vertices
from .problem import ProblemData
from .stationarity import (
    AuditReport,
    Found,
    MStatCertificate,
    NotFoundWithinCatalog,
    SharpCertificate,
    corollary_unique_check,
    mscq_sufficient_check,
    search_mstat,
    search_sharp,
    sharp_vs_mstat_audit,
    verify_mstat,
    verify_sharp,
)

__all__ = [
    "AuditReport",
    "Found",
    "HCone",
    "HPolyhedron",
    "MStatCertificate",
    "NotFoundWithinCatalog",
    "ProblemData",
    "SharpCertificate",
    "SharpMpecError",
    "VCone",
    "analyze_point",
    "bundled_path",
    "canonical",
    "check_2_nondegenerate",
    "corollary_unique_check",
    "directional",
    "h_to_v",
    "lp_solve",
    "mscq_sufficient_check",
    "parse_certificate",
    "parse_problem",
    "polar",
    "search_mstat",
    "search_sharp",
    "sharp_vs_mstat_audit",
    "v_to_h",
    "verify_mstat",
    "verify_sharp",
    "vertices",
]
