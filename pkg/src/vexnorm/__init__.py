"""Variable-exponent Lebesgue / Herz-Morrey norms, fractional integrals and
their BMO commutators on truncated dyadic grids, with an empirical
inequality-verification harness."""

from .errors import (ArgumentError, BudgetError, ConfigError,
                     ConstructionError, DataError, VexnormError)
from .grid import (DyadicGrid, GridFunction, build_grid, characteristic_ball,
                   characteristic_shell, from_callable, restrict_to_shell)
from .exponents import (Constant, ExponentFunction, GaussBump, LogDecay,
                        check_log_holder, conjugate, sobolev_partner)
from .norms import (BallFamily, HerzMorreyParams, bmo_norm,
                    dyadic_ball_family, herz_morrey_norm, holder_pair,
                    luxemburg_norm, mean_on_set, modular)
from .operators import (FracIntegralSpec, commutator, commutator_many,
                        fractional_integral, fractional_integral_many,
                        maximal)
from .verify import (DeltaEstimate, E123Report, RatioReport, TheoremParams,
                     build_test_family, check_theorem, decompose_E123,
                     estimate_delta, hls_experiment, kernel_lower_bound,
                     log_symbol, run_ratio_experiment, theorem_experiment,
                     theorem_params, validate_bmo_symbol)

__version__ = "0.1.0"
