"""Exact two-term recurrence reduction of algebraic and exp/cos/sin-weighted integrals."""
from .arith import Poly, rat
from .catalog import AlgTerm, RelationInstance, Rule, default_catalog, instantiate, instantiate_for_partner, load_catalog, rules_for
from .engine import ReduceOptions, ReductionResult, Step, absorb_cofactor, apply_step, reduce
from .errors import RecurintError
from .model import (DegeneracyProfile, FormClass, Integrand, PowerFactor, TranscFactor, classify, classify_full,
                    degeneracy_profile, normalize)
from .text import parse_expr, print_expr, serialize_result
from .verify import relation_residual, selftest_catalog, verify_result

__version__ = "0.1.0"
