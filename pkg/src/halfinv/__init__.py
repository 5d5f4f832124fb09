"""Numerical half-inverse Sturm-Liouville problem on (0, 2pi).

Recover q on (0, pi) and h from one spectrum plus q on (pi, 2pi) and H, and
measure the Lipschitz stability of that map empirically.
"""
from .asymptotics import (AuxDecomposition, MixedData, SpectrumDecomposition, ball_norms, b_omega_norm,
                          decompose_aux, decompose_spectrum, mixed_distance, omega_pm, recompose)
from .cauchy import (CauchyData, EigenData, cauchy_from_potential, eigen_data_from_cauchy,
                     gelfand_levitan_reconstruct, phi_from_cauchy, weyl_value)
from .char_product import ZeroProductFunction, delta_from_zeros, extract_M, extract_right_kernels
from .errors import (BracketFailure, DenominatorUnderflow, GridTooCoarse, HalfInverseError, IllConditioned,
                     NearZeroDenominator, NonFiniteState, NonPositiveNorming, PoleProximity, SingularGLSystem,
                     TooShort, WronskianMismatch)
from .grid import GridFunction, concatenate, l2_distance
from .kernels import KernelFunction, TrigSeries
from .moments import GramConditioning, MomentSystem, gram_matrix, moments_of, riesz_bounds, solve_moments
from .pipeline import (Perturbation, SolveConfig, SolveReport, SweepRow, compute_rhs, solve_half_inverse,
                       stability_sweep, synthesize_mixed_data)
from .sl_direct import (BoundaryParams, IntegratorConfig, SolutionBoundary, aux_spectra, char_value,
                        eigenvalues_full, integrate_solution, phi_boundary, psi_boundary)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
