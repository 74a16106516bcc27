"""Numerical laboratory for zeros of random polynomials with i.i.d.
exponential coefficients."""

from .classp import (ConeSpec, InconclusiveSignError, MembershipVerdict,
                     bes_condition, bnk_membership, de_angelis_condition_iii,
                     de_angelis_smallest_m, membership_verdict, near_one_budget,
                     near_one_count_bound, near_one_tail, obrechkoff_mass)
from .equilibrium import (equilibrium_potential, equilibrium_potential_residual,
                          phi_cdf, phi_density, phi_quantile, phi_sample,
                          rate_at_equilibrium, tail_mass, variational_residual)
from .experiments import (ExperimentConfig, ExperimentReport,
                          all_real_probability, circle_convergence_experiment,
                          conditioned_real_profile, joint_log_density,
                          wilson_interval, xn_from_roots, xn_statistic,
                          xn_tail_experiment, yn_experiment, yn_statistic)
from .measures import (EmpiricalMeasure, GridDensityMeasure, PairKernelParams,
                       SeparationError, circle_measure, clipped_pair_kernel,
                       disc_measure, discrete_log_energy, discretize_symmetric,
                       empirical_from_configuration, interval_measure,
                       inversion_energy_gap, invert_atoms, log_energy,
                       log_potential, measure_distance, measure_from_json,
                       measure_to_json, mutual_energy, normalized_potential,
                       pair_kernel, pair_kernel_excess, rate_function,
                       rect_measure, truncated_pair_kernel)
from .polynomials import (ExactPolynomial, Polynomial,
                          all_coefficients_positive, evaluate,
                          monic_from_roots, poly_power,
                          sample_exponential_poly)
from .rootfind import (AsymmetryError, ConvergenceError, RootConfiguration,
                       classify_conjugates, find_roots)

__version__ = "0.1.0"
