"""Bregman-geometry first-order optimization toolkit.

Adaptive mirror descent with residual-driven step-sizes for convex problems
that are continuous or smooth relative to a reference Bregman function
rather than an ambient norm, plus baselines (entropic gradient descent,
proportional response), stochastic gradient oracles, a non-Lipschitz problem
library headed by the linear Fisher market, and a benchmark harness that
checks the method's convergence certificates at runtime.
"""

from .analysis import (CertificateReport, RateFit, Trace, TraceRecord,
                       check_divergence_bound, check_regret_certificate,
                       check_sequence_lemmas, check_step_identity, fit_rate,
                       lemma_log_plus_one, lemma_log_ratio, lemma_offset_log,
                       lemma_offset_sqrt, lemma_sqrt_sum, summarize_multiseed)
from .errors import (BregoptError, CertificateViolation, DegenerateInit,
                     DomainViolation, LemmaViolation, MismatchedHorizons,
                     MissingOptimum, NoMaximizer, NonPositiveGap, SolverAbort,
                     StepTooLarge)
from .geometry import (BregmanGeometry, EntropicGeometry, EuclideanGeometry,
                       LogBarrierGeometry)
from .oracle import (NOISE_NONE, NOISE_RESAMPLE, NOISE_SPHERE, Oracle,
                     OracleConfig)
from .problems import (FisherMarket, Problem, first_order_gap,
                       fisher_geometry, fisher_gradient, fisher_objective,
                       fisher_problem, fisher_rs_certificate,
                       make_random_market, make_synthetic_rc_problem,
                       market_from_json, market_to_json, rc_certificate,
                       solve_fisher_reference)
from .solvers import (AdaMirState, SolverSpec, adamir_init, adamir_step,
                      egd_step, pr_step, run)

__version__ = "0.1.0"

__all__ = [
    "AdaMirState", "BregmanGeometry", "BregoptError", "CertificateReport",
    "CertificateViolation", "DegenerateInit", "DomainViolation",
    "EntropicGeometry", "EuclideanGeometry", "FisherMarket",
    "LemmaViolation", "LogBarrierGeometry", "MismatchedHorizons",
    "MissingOptimum", "NOISE_NONE", "NOISE_RESAMPLE", "NOISE_SPHERE",
    "NoMaximizer", "NonPositiveGap", "Oracle", "OracleConfig", "Problem",
    "RateFit", "SolverAbort", "SolverSpec", "StepTooLarge", "Trace",
    "TraceRecord", "adamir_init", "adamir_step", "check_divergence_bound",
    "check_regret_certificate", "check_sequence_lemmas", "check_step_identity",
    "egd_step", "first_order_gap", "fisher_geometry", "fisher_gradient",
    "fisher_objective", "fisher_problem", "fisher_rs_certificate", "fit_rate",
    "lemma_log_plus_one", "lemma_log_ratio", "lemma_offset_log",
    "lemma_offset_sqrt", "lemma_sqrt_sum", "make_random_market",
    "make_synthetic_rc_problem", "market_from_json", "market_to_json",
    "pr_step", "rc_certificate", "run", "solve_fisher_reference",
    "summarize_multiseed",
]
