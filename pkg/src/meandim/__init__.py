"""Finite-scale estimators for mean dimension with potential.

Covering numbers, Hausdorff content, nerve-based width dimension,
rate-distortion, Frostman measures, optimal couplings and dynamical tilings
on finite dynamical systems.
"""
from .chain import ChainReport, RateBoundCheck, example_hilbert, verify_chain, verify_rate_bound
from .config import Scenario, load_measure, load_potential, load_psi, load_scenario, load_system
from .covering import (Cover, CoveringResult, PressureProfile, covering_number, mdim_M_estimate,
                       pressure_profile, symbolic_covering_bound, tame_growth_report,
                       tame_metric_transform)
from .errors import (BudgetExceededError, ConfigError, DegenerateMarkersError,
                     InsufficientGridError, InvalidQueryError, MeandimError, NoMarkerError,
                     NonMonotoneContentError, SupportError, UncertifiedWindowError)
from .hausdorff import HausdorffQuery, dim_at_scale, hausdorff_content, mean_hausdorff_profile
from .info import (BAResult, Channel, RDCurve, binary_entropy, blahut_arimoto, conditional_entropy,
                   entropy, kl_divergence, lemma_kl_bound_check, mutual_information,
                   product_rate_distortion, property_checks, rate_distortion, rd_curve,
                   rdim_estimate)
from .measures import (FrostmanResult, ProbMeasure, TransportPlan, empirical_average,
                       frostman_measure, integrate, invariant_average, optimal_coupling,
                       product_measure, pushforward, quantized_top_uniform, wasserstein)
from .nerve import NerveComplex, mdim_profile, nerve_of, widim_pair, widim_upper
from .spaces import (FiniteSystem, Potential, SymbolicModel, average_metric, birkhoff_sum,
                     bowen_metric, build_symbolic, dynamical_system)
from .tiling import (MarkerFunction, TilingChart, bisector_abscissa, boundary_density,
                     equivariance_check, tiling_for)

__version__ = "0.1.0"
