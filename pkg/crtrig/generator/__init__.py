"""LPによる多項式係数の生成モジュール"""

from crtrig.generator.constraints import (
    Constraint,
    ConstraintSet,
    LpProblem,
    anchor_constraints,
    make_constraints,
)
from crtrig.generator.lp import GeneratorConfig, LpInfeasibleError, LpResult, solve_lp
from crtrig.generator.report import GenerationReport
from crtrig.generator.synthesize import generate_func_polys
from crtrig.generator.validate import validate

__all__ = [
    "Constraint",
    "ConstraintSet",
    "GenerationReport",
    "GeneratorConfig",
    "LpInfeasibleError",
    "LpProblem",
    "LpResult",
    "anchor_constraints",
    "generate_func_polys",
    "make_constraints",
    "solve_lp",
    "validate",
]
