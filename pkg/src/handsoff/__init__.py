"""Sparse (L0, hands-off) control of LTI systems through the L1 relaxation.

The main entry points are :func:`solve_lp` (uniform-grid linear program),
:func:`shoot_solve` (costate shooting on dead-zone extremals) and the
analysis helpers in :mod:`handsoff.analysis`.
"""
__version__ = "0.1.0"

from .linalg import cell_integral, cell_integrals, expm, kalman_rank
from .model import (Assumption1, ControlSignal, LtiSystem, SystemFileError,
                    check_assumption1, l0_norm, l1_norm, load_system,
                    system_from_dict, terminal_map)
from .l1lp import SolveResult, in_budget_set, solve_lp, transcribe, value_l1
from .shooting import (CostateSeed, NotNormalError, SwitchingStructure, dead_zone,
                       shoot_residual, shoot_solve, switching_structure)
from .oracle import (Oracle1dParams, OutOfReachError, oracle1d_control,
                     oracle1d_reach, oracle1d_value)
from .analysis import (ValueTable, boundary_point, continuity_report,
                       level_set_suite, parse_grid, sweep)

__all__ = [
    "expm", "cell_integral", "cell_integrals", "kalman_rank",
    "LtiSystem", "ControlSignal", "Assumption1", "SystemFileError",
    "check_assumption1", "l0_norm", "l1_norm", "terminal_map",
    "load_system", "system_from_dict",
    "SolveResult", "transcribe", "solve_lp", "value_l1", "in_budget_set",
    "CostateSeed", "SwitchingStructure", "NotNormalError", "dead_zone",
    "switching_structure", "shoot_residual", "shoot_solve",
    "Oracle1dParams", "OutOfReachError", "oracle1d_reach", "oracle1d_value",
    "oracle1d_control",
    "ValueTable", "parse_grid", "sweep", "continuity_report",
    "boundary_point", "level_set_suite",
]
