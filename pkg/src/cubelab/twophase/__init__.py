from .search import (InvalidCubeString, MovePlan, TimeBudgetExceeded, expand_plan,
                     parse_plan, solve_cubies, solve_facelets, solve_state)
from .tables import PruningTables, build_tables

__all__ = [
    "InvalidCubeString", "MovePlan", "TimeBudgetExceeded", "PruningTables",
    "build_tables", "expand_plan", "parse_plan", "solve_cubies", "solve_facelets",
    "solve_state",
]
