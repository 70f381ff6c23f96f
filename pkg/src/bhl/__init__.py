"""Numerics for Hankel operators on weighted Bergman spaces over the disc.

The package is organized around radial weights (classification into the
doubling and regularity classes with computed witnesses), their reproducing
kernels, Hankel operator Gram matrices in exact moment arithmetic, Schatten
norms with tail-based divergence flags, two mean-oscillation functionals
(kernel-averaged and hyperbolic-disc-averaged), invariant-measure integrals,
hyperbolic lattices, and an experiment harness tying the three comparable
quantities together per (weight, symbol, exponent) cell.
"""

from .errors import (BHLError, ConfigError, ConvergenceError, DomainError,
                     NumericalError, ResourceLimitError)
from .geometry import (BergmanDisc, Lattice, LatticeValidation, bergman_disc,
                       bergman_distance, generate_lattice, mobius,
                       validate_lattice)
from .harness import (EquivalenceReport, EquivalenceRow, ExperimentConfig,
                      LemmaSuiteReport, run_equivalence, run_lemma_suite)
from .kernels import (NormBracket, kernel_norm_bracket, kernel_norm_sq,
                      kernel_value, kernel_values, normalized_kernel,
                      normalized_kernel_norm, standard_kernel)
from .operators import (HankelGram, OrthonormalBasis, SchattenReport,
                        SynthesisResult, bergman_project, commutator, hankel,
                        hankel_gram, mixed_orthonormal_basis, schatten_norm,
                        singular_values, slope_divergent, synthesis_matrix,
                        tail_slope)
from .oscillation import (LatticeNorm, MOProfile, MOVariant, berezin,
                          berezin_series, disc_average, mo_global,
                          mo_global_series, mo_local, oscillation_integral,
                          oscillation_lattice_norm, oscillation_profile,
                          oscillation_profiles)
from .quadrature import (DiscRule, InvariantIntegral, disc_rule,
                         integrate_bergman_disc, integrate_disc,
                         integrate_invariant, invariant_nodes)
from .symbols import SymbolPoly, inner_product, norm_sq, parse_symbol
from .weights import (RadialWeight, WeightClassReport, classify,
                      load_moment_cache, save_moment_cache)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
