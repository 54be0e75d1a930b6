"""Generalized Hermite divided differences, moduli of smoothness and related estimates."""

from .bestapprox import MinimaxResult, remez_discrete
from .corpus import ModulusFunction, corpus_lookup, phi_lookup
from .divdiff import (MonomialPoly, NewtonForm, divided_difference, eval_newton,
                      newton_hermite, oracle_leading_coeff)
from .errors import (AccuracyError, CapabilityError, ConditioningError, ConfigError,
                     ConvergenceError, CorpusLookupError, DivlabError, DomainError,
                     PreconditionError, ValidationError)
from .functionals import LambdaResult, QuadratureSpec, lambda_pqr, lambda_r
from .knots import IndexPair, Interval, KnotSet, d_pq, q_set
from .smoothness import ModulusEstimate, marchaud_rhs, modulus, modulus_curve, phi_from_omega

__version__ = "0.1.0"
