from .pdb import PatternDatabases, build_pdbs
from .search import (Certificate, ExceedsCap, OptimalResult, SearchBudgetExceeded,
                     certify_depth, heuristic_value, solve_optimal)

__all__ = [
    "Certificate", "ExceedsCap", "OptimalResult", "PatternDatabases",
    "SearchBudgetExceeded", "build_pdbs", "certify_depth", "heuristic_value",
    "solve_optimal",
]
