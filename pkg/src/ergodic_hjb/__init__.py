"""Vanishing-discount experiments for weakly coupled Hamilton-Jacobi-Bellman
systems indexed by a continuum of components.

The discounted system is discretised on the circle times ``[0, 1]`` with a
monotone finite-difference scheme and midpoint quadrature in the component
variable; a sweep drives the discount to zero and records the diagnostics
that certify convergence of the solutions.
"""
from .grid import Field, Grid, diff_minus, diff_plus, lipschitz_x, make_grid, sup_norm
from .kernel import (KernelModel, apply_theta, discretize_kernel, perron_gamma,
                     weighted_identity_residual)
from .model import HJBModel, IndexSets, instantiate_model, uniqueness_sets, validate_assumptions
from .oracles import gamma_dense, linear_system_solve, mane_potential
from .reports import RunConfig, emit_reports, parse_config
from .scheme import SchemeParams, discrete_residual, dissipation, make_params
from .solver import SolveReport, ergodic_residual, nonnegativity_check, solve_discounted
from .sweep import Metrics, SweepOptions, SweepReport, metrics_for, run_sweep

__version__ = "0.1.0"
