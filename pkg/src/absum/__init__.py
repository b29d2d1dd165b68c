"""absum: weighted sliding-mean summability diagnostics for series.

Transforms, a truncated series-space norm, membership and hypothesis
diagnostics with uniformity-in-shift evidence, matrix classifiers, and
exact subset-enumeration functionals, all desk-scale and backed by
naive oracles in the test suite.
"""

__version__ = "0.1.0"

from ._backend import BACKEND, active_backend
from .errors import (AbsumError, BudgetError, ConfigError, FamilyError,
                     InternalInvariantError, OracleBudgetError)
from .matrixclass import (BTable, ClassificationReport, ConditionReport,
                          InfMatrix, LemmaParams, SandwichReport,
                          apply_matrix, check_column_sup, check_column_tails,
                          check_rowsum_sup, check_rowsum_tails, classify_c,
                          classify_l1, column_coeff, fill_b_table,
                          image_series, sandwich_check, subset_functional,
                          upper_functional)
from .seqcore import (SeriesView, TruncWindow, WeightSeq,
                      make_bounded_partial_sum_series)
from .summability import (FAIL, INCONCLUSIVE, PASS_AT_SCALE,
                          AlmostConvergenceReport, InclusionBoundReport,
                          MembershipEvidence, MethodParams,
                          SeriesConditionReport, UBoundednessReport,
                          almost_convergence, check_series_condition,
                          check_u_bounded, classical_norm,
                          inclusion_bound_check, membership, truncated_norm)
from .transform import (TransformTable, fill_table, fill_unit_table,
                        mean_difference, recover_term, unit_mean_difference,
                        weighted_mean, write_table_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
