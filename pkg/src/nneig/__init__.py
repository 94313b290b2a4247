"""Eigenvalue estimation for non-normal matrices.

Complex eigenvalues are located by sampling the complex plane and querying
the smallest singular value of the shifted matrix: sigma0(mu) vanishes
exactly at eigenvalues and bounds the distance to the spectrum from both
sides. The package provides the adaptive shrinking-grid search, a 1-D
variant for real spectra, region existence scans, an annulus search for
extreme eigenvalues and the spectral gap, pseudospectrum grids, eigenvector
extraction, test-matrix generation with known Jordan structure, and the
bounded polynomial square-root machinery that connects sigma0 queries to
ground-energy estimation of the Hermitianized shifted operator.
"""

from .chebapprox import (ChebPoly, HmuReport, cheb_sqrt, heaviside_poly,
                         sqrt_product, verify_Hmu)
from .errors import (ApproximationError, BoundViolationError, InputError,
                     NneigError, ParseError, ProbabilisticFailureError)
from .extreme import (Annulus, ExtremeParams, ExtremeTrace, GapResult,
                      circle_count, largest_modulus_eigenvalue,
                      smallest_modulus_eigenvalue, spectral_gap)
from .linalg import (SvdResult, operator_norm, read_matrix, require_matrix,
                     shifted, svd, write_matrix)
from .matgen import (GeneratedMatrix, JordanSpec, companion_matrix,
                     haar_unitary, jordan_block, jordan_matrix)
from .oracle import (GroundVectorResult, SigmaEstimate, SigmaOracleConfig,
                     distance_bound, ground_vector, sigma0, sigma0_batch)
from .pspec import (InclusionReport, PspecGrid, check_inclusions, pspec_grid,
                    write_pspec_csv, write_pspec_meta)
from .solver import (EigenvectorResult, LevelRecord, Region, RegionScanResult,
                     SolverParams, SolverTrace, eigenvector_for,
                     estimate_eigenvalue, estimate_real_eigenvalue,
                     grid_spacing, has_eigenvalue_in_region, level_count)

__version__ = "0.1.0"
