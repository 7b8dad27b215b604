"""theta-attest – high-precision verification of theta-function identities"""

from .catalog import Catalog, CatalogError, load_catalog, parse_catalog
from .cfrac import h_cf_prefix, h_from_param, h_product, h_theta, verify_table
from .identities import check_bridge_S311, eval_quotient, factor_analysis, residual, verify
from .mparith import BigReal, DomainError, Precision, exp, pi, pow_rational
from .params import (
    check_cross_relations,
    check_reciprocal_symmetry,
    eval_param,
    verify_closed_form,
    verify_intermediates,
)
from .qseries import elliptic_K, euler_product, theta_fneg, theta_general, theta_phi, theta_psi
from .radexpr import EvaluationError, ParseError, evaluate, parse, to_text
from .report import CheckResult, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "BigReal",
    "Catalog",
    "CatalogError",
    "CheckResult",
    "DomainError",
    "EvaluationError",
    "ParseError",
    "Precision",
    "VerificationReport",
    "check_bridge_S311",
    "check_cross_relations",
    "check_reciprocal_symmetry",
    "elliptic_K",
    "euler_product",
    "eval_param",
    "eval_quotient",
    "evaluate",
    "exp",
    "factor_analysis",
    "h_cf_prefix",
    "h_from_param",
    "h_product",
    "h_theta",
    "load_catalog",
    "parse",
    "parse_catalog",
    "pi",
    "pow_rational",
    "residual",
    "theta_fneg",
    "theta_general",
    "theta_phi",
    "theta_psi",
    "to_text",
    "verify",
    "verify_closed_form",
    "verify_intermediates",
    "verify_table",
    "__version__",
]
