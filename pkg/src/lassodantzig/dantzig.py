"""Dantzig selector: minimal l1 norm under |(1/n) D^{-1/2} X^T (y - X b)|_inf <= r."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (CoefficientVector, InvalidInputError, RegressionInstance,
                   as_vector, gram)
from .simplex import simplex_lp


@dataclass(frozen=True)
class DantzigConfig:
    r: float
    lp_tol: float = 1e-9
    max_pivots: int = 100_000

    def __post_init__(self):
        if self.r < 0:
            raise InvalidInputError("r must be nonnegative")
        if self.lp_tol <= 0:
            raise InvalidInputError("lp_tol must be positive")


@dataclass(frozen=True)
class DantzigResult:
    beta_hat: CoefficientVector
    l1_norm: float
    feasible: bool
    max_constraint: float
    pivots_used: int
    min_reduced_cost: float


def dantzig_feasibility(instance: RegressionInstance, beta, r: float,
                        tol: float = 0.0) -> tuple[bool, float]:
    d = instance.design
    b = as_vector(beta)
    if b.size != d.M:
        raise InvalidInputError("coefficient dimension does not match design")
    corr = d.entries.T @ (instance.y - d.entries @ b) / d.n
    val = float(np.max(np.abs(corr) / d.column_norms))
    return val <= r + tol, val


def fit_dantzig(instance: RegressionInstance, config: DantzigConfig) -> DantzigResult:
    """Split b = u - v with u, v >= 0 and minimize sum(u + v) over 2M inequalities."""
    d = instance.design
    M = d.M
    scale = 1.0 / d.column_norms
    G = gram(d).psi * scale[:, None]
    z = (d.entries.T @ instance.y / d.n) * scale
    A_ub = np.block([[G, -G], [-G, G]])
    b_ub = np.concatenate([z + config.r, config.r - z])
    lp = simplex_lp(np.ones(2 * M), A_ub, b_ub, tol=config.lp_tol, max_pivots=config.max_pivots)
    beta = lp.x[:M] - lp.x[M:]
    feasible, val = dantzig_feasibility(instance, beta, config.r, tol=config.lp_tol)
    return DantzigResult(
        beta_hat=CoefficientVector(beta),
        l1_norm=float(np.abs(beta).sum()),
        feasible=feasible,
        max_constraint=val,
        pivots_used=lp.pivots,
        min_reduced_cost=lp.min_reduced_cost,
    )
