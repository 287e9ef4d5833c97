"""Time discretization of a nonlocal phase-field system with inertia."""
from .grid import Grid
from .kernel import Kernel, KernelSpec, build_kernel
from .resolvent import (Nonlinearity, admissible_h, resolvent_bisect,
                        resolvent_field, resolvent_solve)
from .elliptic import HelmholtzProblem, helmholtz_solve
from .scheme import (FieldPreset, Forcing, Scenario, StepState, Stepper,
                     Trajectory, average_forcing, eval_bar, eval_hat,
                     eval_underline, solve_trajectory)
from .analysis import (apriori_report, cauchy_check, convergence_study,
                       discrete_error)
from .config import load_config, parse_config
from .scenarios import bundled_scenarios, scenario_path

__version__ = '0.1.0'
