"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves   min c^T x   s.t.   A x <= b,  x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InfeasibleError, InvalidInputError, PivotLimitError

_PIV_TOL = 1e-11


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    fun: float
    basis: tuple[int, ...]
    pivots: int
    phase1_pivots: int
    min_reduced_cost: float


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _run(T: np.ndarray, basis: list[int], ncols: int, tol: float, budget: int) -> int:
    """Bland-rule pivoting on tableau T whose last row holds reduced costs.

    Only the first ``ncols`` columns may enter. Returns the pivot count.
    """
    m = T.shape[0] - 1
    pivots = 0
    while True:
        cost = T[-1, :ncols]
        cand = np.flatnonzero(cost < -tol)
        if cand.size == 0:
            return pivots
        col = int(cand[0])
        colv = T[:m, col]
        pos = colv > _PIV_TOL
        if not np.any(pos):
            raise InvalidInputError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        # Bland: among tied rows leave the basic variable with smallest index
        row = int(min(ties, key=lambda i: basis[i]))
        if pivots >= budget:
            raise PivotLimitError(f"pivot budget {budget} exhausted")
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1


def simplex_lp(c, A_ub, b_ub, tol: float = 1e-9, max_pivots: int = 100_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    m, N = A.shape
    if c.size != N or b.size != m:
        raise InvalidInputError("inconsistent LP dimensions")

    # standard form [A I] [x; s] = b, rows flipped to make b >= 0
    neg = b < 0
    A_std = np.hstack([A, np.eye(m)])
    sign = np.where(neg, -1.0, 1.0)
    A_rows = A_std * sign[:, None]
    b_rows = b * sign
    art_rows = np.flatnonzero(neg)
    k = art_rows.size
    nstd = N + m

    T = np.zeros((m + 1, nstd + k + 1))
    T[:m, :nstd] = A_rows
    T[:m, -1] = b_rows
    basis = [N + i for i in range(m)]
    for a, i in enumerate(art_rows):
        T[i, nstd + a] = 1.0
        basis[i] = nstd + a

    phase1 = 0
    if k:
        # phase one objective: sum of artificials, expressed in nonbasic terms
        T[-1, nstd:nstd + k] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        phase1 = _run(T, basis, nstd + k, tol, max_pivots)
        infeas = -T[-1, -1]
        if infeas > tol * max(1.0, np.abs(b).max()):
            raise InfeasibleError(f"no feasible point (phase-one residual {infeas:.3e})")
        # drive artificial variables out of the basis
        for i in range(m):
            if basis[i] >= nstd:
                row = T[i, :nstd]
                nz = np.flatnonzero(np.abs(row) > 1e-9)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    phase1 += 1
        keep = [i for i in range(m) if basis[i] < nstd]
        if len(keep) < m:
            T = np.vstack([T[keep], T[-1:]])
            basis = [basis[i] for i in keep]
            A_rows, b_rows = A_rows[keep], b_rows[keep]
        T = np.hstack([T[:, :nstd], T[:, -1:]])

    c_std = np.concatenate([c, np.zeros(m)])
    T[-1] = 0.0
    T[-1, :nstd] = c_std
    for i, j in enumerate(basis):
        T[-1] -= c_std[j] * T[i]
    phase2 = _run(T, basis, nstd, tol, max_pivots - phase1)

    # recompute the basic solution from the original data to shed pivoting drift
    B = A_rows[:, basis]
    try:
        xb = np.linalg.solve(B, b_rows)
        duals = np.linalg.solve(B.T, c_std[basis])
    except np.linalg.LinAlgError:
        xb = T[:-1, -1].copy()
        duals = None
    xb = np.maximum(xb, 0.0)
    x_std = np.zeros(nstd)
    x_std[basis] = xb
    if duals is not None:
        reduced = c_std - A_rows.T @ duals
    else:
        reduced = T[-1, :nstd]
    x = x_std[:N]
    return LPResult(x=x, fun=float(c @ x), basis=tuple(basis), pivots=phase1 + phase2,
                    phase1_pivots=phase1, min_reduced_cost=float(reduced.min()))
