"""Analytic metrics and Monte Carlo for clustered hybrid OMA/NOMA uplinks."""

from ._core import (
    AccuracyError,
    DomainError,
    NetworkParams,
    ParseError,
    analytic_metrics,
    chi,
    conditional_occupancy,
    delta_star,
    digamma,
    kmax_for_tail,
    laplace,
    occupancy_pmf,
    regularized_gamma_q,
    run_table,
    simulate,
)

__all__ = [
    "AccuracyError",
    "DomainError",
    "NetworkParams",
    "ParseError",
    "analytic_metrics",
    "chi",
    "conditional_occupancy",
    "delta_star",
    "digamma",
    "kmax_for_tail",
    "laplace",
    "occupancy_pmf",
    "regularized_gamma_q",
    "run_table",
    "simulate",
]
