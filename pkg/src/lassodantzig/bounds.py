"""Right-hand sides of the prediction, estimation and oracle bounds, and the
sparse-approximation oracle they are compared against."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (CoefficientVector, DesignMatrix, InvalidInputError, PenaltyLevel,
                   as_vector, empirical_norm)

HOLD_TOL = 1e-9


@dataclass(frozen=True)
class BoundCheck:
    name: str
    empirical: float
    rhs: float
    kappa_used: float
    event_required: str  # "A", "B", "A&B" or "none"
    certified: bool = True
    applicable: bool = True
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.empirical <= self.rhs + HOLD_TOL

    @property
    def vacuous(self) -> bool:
        return math.isinf(self.rhs)

    def to_json(self) -> dict:
        return {"name": self.name, "empirical": self.empirical, "rhs": self.rhs,
                "holds": self.holds, "kappa_used": self.kappa_used,
                "event_required": self.event_required, "certified": self.certified,
                "applicable": self.applicable, "note": self.note}


def _check(name, empirical, rhs_fn, kappa, event, certified=True, note=""):
    """Build a BoundCheck; a nonpositive or missing kappa makes the bound vacuous."""
    if kappa is None or not kappa > 0:
        return BoundCheck(name, float(empirical), math.inf, float("nan") if kappa is None else kappa,
                          event, certified=False, note="vacuous: kappa not positive")
    return BoundCheck(name, float(empirical), float(rhs_fn(kappa)), float(kappa), event,
                      certified=certified, note=note)


# ---------------------------------------------------------------------------
# constants


def c_eps(eps: float) -> float:
    """C(eps) = 8 b^2/(b-1) at b = 1 + 2/eps, i.e. 4 eps + 16 + 16/eps."""
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    return 4.0 * eps + 16.0 + 16.0 / eps


def c_constants(eps: float, C0: float, phi_max: float, f_max: float, f_min: float,
                kappa: float) -> tuple[float, float, float]:
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if kappa <= 0:
        raise InvalidInputError("kappa must be positive")
    C = c_eps(eps)
    C1 = 4.0 * ((1.0 + eps) * C0 + C) * phi_max * f_max**2 / (kappa**2 * f_min**2)
    C2 = 16.0 * C1 + C
    return C, C1, C2


# ---------------------------------------------------------------------------
# oracle


@dataclass(frozen=True)
class OracleApproximation:
    """Best k-sparse least-squares fits of f on the dictionary, k = 0..s."""

    beta_oracle: CoefficientVector
    support: tuple[int, ...]
    bias: float
    table: tuple[float, ...]
    supports: tuple[tuple[int, ...], ...]
    betas: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def s(self) -> int:
        return len(self.table) - 1

    @property
    def bias_exact_s(self) -> float:
        """Infimum of the bias over vectors with exactly s nonzeros."""
        return self.table[-1]

    def to_json(self) -> dict:
        return {"support": list(self.support), "bias": self.bias,
                "beta_oracle": self.beta_oracle.to_json(),
                "table": [{"k": k, "bias": b, "support": list(J), "beta": [float(x) for x in bt]}
                          for k, (b, J, bt) in enumerate(zip(self.table, self.supports, self.betas))]}


def best_sparse_approx(design: DesignMatrix, f_true, s: int,
                       enumeration_cap: int = 10**6) -> OracleApproximation:
    X = design.entries
    n, M = X.shape
    f = as_vector(f_true)
    if f.size != n:
        raise InvalidInputError("target length does not match design")
    if s < 0 or s > M:
        raise InvalidInputError("s must satisfy 0 <= s <= M")
    total = sum(math.comb(M, k) for k in range(s + 1))
    if total > enumeration_cap:
        raise InvalidInputError(f"{total} supports exceed the enumeration cap {enumeration_cap}")
    table = [empirical_norm(f) ** 2]
    supports: list[tuple[int, ...]] = [()]
    betas = [np.zeros(M)]
    for k in range(1, s + 1):
        best_val, best_J, best_coef = math.inf, None, None
        it = itertools.combinations(range(M), k)
        while True:
            block = list(itertools.islice(it, 4096))
            if not block:
                break
            idx = np.asarray(block, dtype=np.intp)
            sub = np.transpose(X[:, idx], (1, 0, 2))  # (C, n, k)
            coef = np.linalg.pinv(sub) @ f  # minimum-norm least squares
            res = f[None, :] - np.einsum("cnk,ck->cn", sub, coef)
            vals = (res * res).sum(axis=1) / n
            i = int(np.argmin(vals))
            if best_J is None or vals[i] < best_val - 1e-15 * max(1.0, best_val):
                best_val, best_J, best_coef = float(vals[i]), tuple(int(j) for j in idx[i]), coef[i]
        # monotone by nesting; guard against rounding
        best_val = min(best_val, table[-1])
        b = np.zeros(M)
        b[list(best_J)] = best_coef
        table.append(best_val)
        supports.append(best_J)
        betas.append(b)
    k_best = int(np.argmin(table))
    return OracleApproximation(CoefficientVector(betas[k_best]), supports[k_best], table[k_best],
                               tuple(table), tuple(supports), tuple(betas))


# ---------------------------------------------------------------------------
# equivalence (prediction-loss closeness of the two estimators)


def equivalence_bounds(pred_L: float, pred_D: float, sparsity_L: int, sparsity_D: int, s: int,
                       kappa_s1: Optional[float], kappa_s5: Optional[float],
                       penalty: PenaltyLevel, f_max: float, unit_norms: bool,
                       certified: bool = True) -> list[BoundCheck]:
    """Closeness of the Lasso and Dantzig prediction losses, checked from normalized losses."""
    A, sig, n, lm = penalty.A, penalty.sigma, penalty.n, penalty.log_M
    out = []
    emp1 = abs(pred_D - pred_L)
    if sparsity_L <= s:
        out.append(_check("th1-equiv", emp1,
                          lambda k: 16 * A**2 * sparsity_L * sig**2 / n * f_max**2 / k**2 * lm,
                          kappa_s1, "A&B", certified))
    else:
        out.append(BoundCheck("th1-equiv", emp1, math.inf, float("nan"), "A&B", applicable=False,
                              note="sparsity of Lasso exceeds s"))
    if unit_norms and sparsity_D <= s:
        out.append(_check("th2-equiv", pred_L,
                          lambda k: 10 * pred_D + 81 * A**2 * sparsity_D * sig**2 * lm / (n * k**2),
                          kappa_s5, "A&B", certified))
    else:
        out.append(BoundCheck("th2-equiv", pred_L, math.inf, float("nan"), "A&B", applicable=False,
                              note="needs unit column norms and sparsity of Dantzig <= s"))
    return out


# ---------------------------------------------------------------------------
# linear model: Dantzig and Lasso rates


def _lp_name(prefix: str, p: float) -> str:
    return f"{prefix}-p{p:g}"


def dantzig_rhs_l1(A, sigma, s, n, M, kappa):
    return 8 * A / kappa**2 * sigma * s * math.sqrt(math.log(M) / n)


def dantzig_rhs_pred(A, sigma, s, M, kappa):
    return 16 * A**2 / kappa**2 * sigma**2 * s * math.log(M)


def dantzig_rhs_lp(A, sigma, s, m, n, M, kappa_m, p):
    return (2 ** (p - 1) * 8 * (1 + math.sqrt(s / m)) ** (2 * (p - 1)) * s
            * (A * sigma / kappa_m**2 * math.sqrt(math.log(M) / n)) ** p)


def lasso_rhs_l1(A, sigma, s, n, M, kappa):
    return 16 * A / kappa**2 * sigma * s * math.sqrt(math.log(M) / n)


def lasso_rhs_pred(A, sigma, s, M, kappa):
    return 16 * A**2 / kappa**2 * sigma**2 * s * math.log(M)


def lasso_rhs_sparsity(phi_max, s, kappa):
    return 64 * phi_max / kappa**2 * s


def lasso_rhs_lp(A, sigma, s, m, n, M, kappa_m, p):
    return (16 * (1 + 3 * math.sqrt(s / m)) ** (2 * (p - 1)) * s
            * (A * sigma / kappa_m**2 * math.sqrt(math.log(M) / n)) ** p)


def _validate_p(p_list):
    for p in p_list:
        if not (1 < p <= 2):
            raise InvalidInputError(f"p must lie in (1, 2], got {p}")


def dantzig_bounds(beta_D, beta_ref, design: DesignMatrix, s: int, m: int,
                   kappa_s1: Optional[float], kappa_sm1: Optional[float],
                   penalty: PenaltyLevel, p_list: Sequence[float] = (1.5, 2.0),
                   prefix: str = "th4", event: str = "B",
                   certified: bool = True) -> list[BoundCheck]:
    """l1, prediction and lp deviations of the Dantzig selector from a sparse
    vector satisfying the Dantzig constraint (beta* on event B, or any feasible
    beta such as the Lasso solution)."""
    _validate_p(p_list)
    A, sig, n, M = penalty.A, penalty.sigma, penalty.n, penalty.M
    diff = as_vector(beta_D) - as_vector(beta_ref)
    Xd = design.entries @ diff
    if prefix == "th4":
        names = ("th43-l1", "th44-pred", "th42")
    else:
        names = (f"{prefix}-l1", f"{prefix}-pred", prefix)
    out = [
        _check(names[0], np.abs(diff).sum(),
               lambda k: dantzig_rhs_l1(A, sig, s, n, M, k), kappa_s1, event, certified),
        _check(names[1], float(Xd @ Xd),
               lambda k: dantzig_rhs_pred(A, sig, s, M, k), kappa_s1, event, certified),
    ]
    for p in p_list:
        out.append(_check(_lp_name(names[2], p), float(np.sum(np.abs(diff) ** p)),
                          lambda k, p=p: dantzig_rhs_lp(A, sig, s, m, n, M, k, p),
                          kappa_sm1, event, certified))
    return out


def lasso_bounds(beta_L, beta_star, design: DesignMatrix, s: int, m: int,
                 kappa_s3: Optional[float], kappa_sm3: Optional[float], phi_max: float,
                 penalty: PenaltyLevel, p_list: Sequence[float] = (1.5, 2.0),
                 zero_tol: float = 0.0, certified: bool = True) -> list[BoundCheck]:
    _validate_p(p_list)
    A, sig, n, M = penalty.A, penalty.sigma, penalty.n, penalty.M
    bL = as_vector(beta_L)
    diff = bL - as_vector(beta_star)
    Xd = design.entries @ diff
    sparsity = int(np.sum(np.abs(bL) > zero_tol))
    out = [
        _check("th53-l1", np.abs(diff).sum(),
               lambda k: lasso_rhs_l1(A, sig, s, n, M, k), kappa_s3, "A", certified),
        _check("th54-pred", float(Xd @ Xd),
               lambda k: lasso_rhs_pred(A, sig, s, M, k), kappa_s3, "A", certified),
        _check("th55-sparsity", sparsity,
               lambda k: lasso_rhs_sparsity(phi_max, s, k), kappa_s3, "A", certified),
    ]
    for p in p_list:
        out.append(_check(_lp_name("th52", p), float(np.sum(np.abs(diff) ** p)),
                          lambda k, p=p: lasso_rhs_lp(A, sig, s, m, n, M, k, p),
                          kappa_sm3, "A", certified))
    return out


# ---------------------------------------------------------------------------
# oracle inequalities


def oracle_inequality_rhs(oracle: OracleApproximation, eps: float, kappa: float, f_max: float,
                          penalty: PenaltyLevel, variant: str = "lasso",
                          admissible: Optional[Sequence[int]] = None,
                          C2: Optional[float] = None) -> float:
    """Right-hand side of the sparsity oracle inequalities.

    lasso:      (1+eps) min_{k<=s} [bias_k + C(eps) f_max^2 A^2 sigma^2 k log M /(kappa^2 n)]
    restricted: same with kappa -> gamma, minimum over the ``admissible`` sparsities k
    dantzig:    (1+eps) bias_s + C2(eps) f_max^2 A^2 sigma^2 s log M /(kappa0^2 n)
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if not kappa > 0:
        raise InvalidInputError("kappa (or gamma) must be positive")
    A, sig, n, lm = penalty.A, penalty.sigma, penalty.n, penalty.log_M
    var = f_max**2 * A**2 * sig**2 * lm / (kappa**2 * n)
    if variant in ("lasso", "restricted"):
        ks = range(len(oracle.table)) if admissible is None else list(admissible)
        ks = [k for k in ks if 0 <= k < len(oracle.table)]
        if not ks:
            raise InvalidInputError("no admissible beta for the oracle inequality")
        C = c_eps(eps)
        return (1 + eps) * min(oracle.table[k] + C * var * k for k in ks)
    if variant == "dantzig":
        if C2 is None:
            raise InvalidInputError("the Dantzig variant needs C2(eps)")
        return (1 + eps) * oracle.bias_exact_s + C2 * var * oracle.s
    raise InvalidInputError(f"unknown variant {variant!r}")


def weak_sparsity_check(beta, design: DesignMatrix, f_true, s: int, C0: float, kappa: float,
                        f_max: float, penalty: PenaltyLevel,
                        zero_tol: float = 0.0) -> tuple[bool, float]:
    """(member of the weak-sparsity set, smallest C0 making beta a member)."""
    b = as_vector(beta)
    k = int(np.sum(np.abs(b) > zero_tol))
    bias = empirical_norm(design.entries @ b - as_vector(f_true)) ** 2
    if k > s:
        return False, math.inf
    unit = f_max**2 * penalty.r**2 / kappa**2
    if k == 0 or unit == 0:
        implied = 0.0 if bias == 0 else math.inf
    else:
        implied = bias / (unit * k)
    return bool(implied <= C0), implied


def oracle_checks(pred_L: float, pred_D: float, oracle: OracleApproximation, eps: float,
                  kappa: Optional[float], kappa0_fn, phi_max: float, f_max: float, f_min: float,
                  penalty: PenaltyLevel, M: int) -> list[BoundCheck]:
    """Sparsity oracle checks for the Lasso and the Dantzig selector.

    ``kappa0_fn(u)`` returns a certified kappa(u, c0) for the enlarged sparsity u.
    """
    out = []
    if kappa is None or not kappa > 0:
        out.append(BoundCheck("th3-oracle", pred_L, math.inf, float("nan"), "A", certified=False,
                              note="vacuous: kappa not positive"))
        out.append(BoundCheck("prop1-oracle", pred_D, math.inf, float("nan"), "A",
                              applicable=False, note="needs kappa"))
        return out
    out.append(BoundCheck("th3-oracle", pred_L,
                          oracle_inequality_rhs(oracle, eps, kappa, f_max, penalty), kappa, "A"))
    s = oracle.s
    unit = f_max**2 * penalty.r**2 / kappa**2
    implied = [oracle.table[k] / (unit * k) for k in range(1, s + 1)] if unit > 0 else []
    C0 = min(implied) if implied else math.inf
    if not math.isfinite(C0):
        out.append(BoundCheck("prop1-oracle", pred_D, math.inf, float("nan"), "A",
                              applicable=False, note="weak sparsity constant undefined"))
        return out
    _, C1, C2 = c_constants(eps, C0, phi_max, f_max, f_min, kappa)
    u = s * max(C1, 1.0)
    if u > M:
        out.append(BoundCheck("prop1-oracle", pred_D, math.inf, float("nan"), "A",
                              applicable=False, note=f"inapplicable: s*max(C1,1)={u:.4g} > M"))
        return out
    kappa0 = kappa0_fn(int(math.floor(u)))
    if kappa0 is None or not kappa0 > 0:
        out.append(BoundCheck("prop1-oracle", pred_D, math.inf, float("nan"), "A",
                              certified=False, note="vacuous: kappa0 not certified"))
        return out
    out.append(BoundCheck("prop1-oracle", pred_D,
                          oracle_inequality_rhs(oracle, eps, kappa0, f_max, penalty,
                                                variant="dantzig", C2=C2), kappa0, "A"))
    return out


def holder_interpolation(b1: float, b2: float, p: float) -> float:
    """b1^(2-p) b2^(p-1): bound on sum a_j^p given sum a_j <= b1, sum a_j^2 <= b2."""
    return b1 ** (2 - p) * b2 ** (p - 1)
