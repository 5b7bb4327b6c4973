"""Random walks given by polynomials of tridiagonal stochastic matrices.

Scalar and matrix-valued orthogonal polynomials, Karlin-McGregor
representations and the Ehrenfest model family.
"""

from .banded import BandedMatrix, ThetaPolynomial, is_stochastic, jacobi_matrix, theta_of_matrix
from .block_mvop import (BlockTridiagonal, MatrixPolynomial, block_partition, commutant, inner_product,
                         mvop_sequence, norm_ratio_test, scalar_link_check, weight_at)
from .ehrenfest import (ModelSpec, SpectrumReport, build, multiplicity_report, spectral_gap, spectrum, stationary,
                        theta_for)
from .km_kernel import KMContext, km_block_entry, km_context, km_scalar_entry, n_step_distribution, tv_distance
from .scalar_orthopoly import (DiscreteMeasure, JacobiCoefficients, ScalarFamily, ehrenfest_measure, gram_check,
                               krawtchouk_eval, poly_eval_by_recurrence)

__version__ = "0.1.0"
