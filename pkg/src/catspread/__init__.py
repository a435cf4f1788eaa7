"""Spread measures and axiom checks for categorical distributions."""

from .errors import (CatSpreadError, DegenerateDenominatorError, DimensionError,
                     DomainError, NegativeTypeError, SampleSizeError,
                     SimplexError)
from .measures import (Algebraic, AlphaPower, Custom, CustomWeight,
                       DistanceVariance, Euclidean, Exp, Extropy,
                       GaussianKernel, Geometric, Gini, MatrixDistance,
                       NegLogComplement, Pmf, Power, Shannon, Sin, Tsallis,
                       TsallisSum, TwoConstant, algebraic_family, base_term,
                       distance_variance, evaluate, extropy,
                       generalized_distance_variance, geometric_family, gini,
                       lin_distance_matrix, one_hot_covariance, shannon,
                       tsallis, uniform_distance_variance)
from .estimation import (EstimateResult, Method, Sample, empirical_pmf,
                         estimate, jackknife, simulate_estimator,
                         unbiased_dvar_sq_paper, unbiased_dvar_sq_ustat)
from .axioms import (AxiomReport, MajorizationVerdict, Relation, Status,
                     check_additivity, check_axioms, majorization_compare,
                     random_majorization_pair, schur_derivative_test,
                     t_transform)

__version__ = "0.1.0"
