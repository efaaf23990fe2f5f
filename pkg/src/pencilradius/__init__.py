"""Stability radius of matrix pencils lambda -> T - lambda*S.

Three independent estimators (rank-drop oracle, chain-limit, and
generalized-inverse spectral-radius optimization), plus the subspace and
resolvent machinery they are built on.
"""

from .exceptions import (ConstancyViolated, ContractViolation,
                         DecompositionError, NoComplementFound, NotStabilized,
                         OracleUnreliable, PencilRadiusError,
                         SvdConvergenceError)
from .geninv import (ComplementPair, GenInverse, OptBudget, Resolvent,
                     find_fixed_complements, minimize_sr, neumann_family,
                     parametrize_inner, reflexive_closure, resolvent_eval,
                     verify_resolvent)
from .pencil import (ChainSpace, LimitSpaces, Pencil, chain_space, gamma_m,
                     limit_spaces, reduced_min_modulus)
from .radius import (RadiusReport, SearchConfig, d_bartlay, d_geninv,
                     d_oracle, full_report)

__version__ = "0.1.0"

__all__ = [
    "ChainSpace", "ComplementPair", "ConstancyViolated", "ContractViolation",
    "DecompositionError", "GenInverse", "LimitSpaces", "NoComplementFound",
    "NotStabilized", "OptBudget", "OracleUnreliable", "Pencil",
    "PencilRadiusError", "RadiusReport", "Resolvent", "SearchConfig",
    "SvdConvergenceError", "chain_space", "d_bartlay", "d_geninv", "d_oracle",
    "find_fixed_complements", "full_report", "gamma_m", "limit_spaces",
    "minimize_sr", "neumann_family", "parametrize_inner", "reflexive_closure",
    "resolvent_eval", "verify_resolvent", "reduced_min_modulus",
]
