"""Problem data shared by the solvers, the RE analysis and the bound checks.

Index sets are 0-based tuples of column indices throughout the package.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)
TWO_SQRT2 = 2.0 * math.sqrt(2.0)


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class PreconditionError(InvalidInputError):
    """Raised when a vector is outside the set an operation is defined on."""


class SolverError(RuntimeError):
    """Base class for numerical solver failures."""


class InfeasibleError(SolverError):
    pass


class PivotLimitError(SolverError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def as_vector(x) -> np.ndarray:
    """Return ``x`` as a 1-D float array; unwraps :class:`CoefficientVector`."""
    if isinstance(x, CoefficientVector):
        return x.beta
    return np.asarray(x, dtype=float).reshape(-1)


def empirical_norm(values) -> float:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise InvalidInputError("empirical norm of an empty vector")
    return float(math.sqrt(np.dot(v, v) / v.size))


@dataclass(frozen=True)
class DesignMatrix:
    """n x M design with cached empirical column norms ||f_j||_n."""

    entries: np.ndarray
    column_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.entries, dtype=float)
        if X.ndim != 2:
            raise InvalidInputError("design must be a 2-D matrix")
        n, M = X.shape
        if n < 1 or M < 2:
            raise InvalidInputError(f"need n >= 1 and M >= 2, got n={n}, M={M}")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("design contains non-finite entries")
        norms = np.sqrt(np.einsum("ij,ij->j", X, X) / n)
        if np.any(norms <= 0):
            bad = np.flatnonzero(norms <= 0).tolist()
            raise InvalidInputError(f"columns with zero empirical norm: {bad}")
        object.__setattr__(self, "entries", _frozen(X))
        object.__setattr__(self, "column_norms", _frozen(norms))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def M(self) -> int:
        return self.entries.shape[1]

    @property
    def f_max(self) -> float:
        return float(self.column_norms.max())

    @property
    def f_min(self) -> float:
        return float(self.column_norms.min())

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.column_norms**2)

    def has_unit_norms(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self.column_norms - 1.0) <= tol))

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.entries.shape, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.entries).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class GramMatrix:
    psi: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.psi, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise InvalidInputError("Gram matrix must be square")
        object.__setattr__(self, "psi", _frozen(P))

    @property
    def M(self) -> int:
        return self.psi.shape[0]

    @property
    def phi_max(self) -> float:
        """Largest eigenvalue of the Gram matrix."""
        return float(np.linalg.eigvalsh(self.psi)[-1])

    def has_unit_diagonal(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(np.diag(self.psi) - 1.0) <= tol))


def gram(design: DesignMatrix) -> GramMatrix:
    X = design.entries
    P = X.T @ X / design.n
    P = 0.5 * (P + P.T)
    # diagonal taken from the cached norms so psi[j, j] == ||f_j||_n^2 exactly
    np.fill_diagonal(P, design.column_norms**2)
    return GramMatrix(P)


def as_gram(obj) -> GramMatrix:
    if isinstance(obj, GramMatrix):
        return obj
    if isinstance(obj, DesignMatrix):
        return gram(obj)
    return GramMatrix(np.asarray(obj, dtype=float))


@dataclass(frozen=True)
class CoefficientVector:
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen(np.asarray(self.beta, dtype=float).reshape(-1)))

    def __len__(self):
        return self.beta.size

    def support(self, zero_tol: float = 0.0) -> tuple[int, ...]:
        return sparsity_and_support(self.beta, zero_tol)[1]

    def sparsity(self, zero_tol: float = 0.0) -> int:
        return sparsity_and_support(self.beta, zero_tol)[0]

    def restrict(self, J: Iterable[int]) -> np.ndarray:
        """Vector equal to beta on J and zero elsewhere."""
        out = np.zeros_like(self.beta)
        idx = list(J)
        out[idx] = self.beta[idx]
        return out

    def norm(self, p: float = 1.0) -> float:
        if math.isinf(p):
            return float(np.max(np.abs(self.beta), initial=0.0))
        return float(np.sum(np.abs(self.beta) ** p) ** (1.0 / p))

    def to_json(self) -> list[float]:
        return [float(b) for b in self.beta]


def sparsity_and_support(beta, zero_tol: float = 0.0) -> tuple[int, tuple[int, ...]]:
    if zero_tol < 0:
        raise InvalidInputError("zero_tol must be nonnegative")
    b = as_vector(beta)
    J = tuple(int(j) for j in np.flatnonzero(np.abs(b) > zero_tol))
    return len(J), J


def _complement_mask(M: int, J: Iterable[int]) -> np.ndarray:
    mask = np.ones(M, dtype=bool)
    idx = list(J)
    if idx:
        mask[idx] = False
    return mask


def cone_slack(delta, J0: Iterable[int], c0: float) -> float:
    """c0*|delta_J0|_1 - |delta_J0^c|_1 (nonnegative inside the cone)."""
    d = as_vector(delta)
    out = _complement_mask(d.size, J0)
    return float(c0 * np.abs(d[~out]).sum() - np.abs(d[out]).sum())


def cone_membership(delta, J0: Iterable[int], c0: float, tol: float = 0.0) -> bool:
    d = as_vector(delta)
    J0 = list(J0)
    if any(j < 0 or j >= d.size for j in J0):
        raise InvalidInputError("J0 must index coordinates of delta")
    if c0 <= 0:
        raise InvalidInputError("c0 must be positive")
    on = np.abs(d[J0]).sum() if J0 else 0.0
    if on == 0.0 and np.any(d != 0):
        return False
    return cone_slack(d, J0, c0) >= -tol


def select_j01(delta, J0: Iterable[int], m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Indices of the m largest |delta_j| outside J0 (ties to the lower index), and J0 u J1."""
    d = as_vector(delta)
    J0 = sorted(set(int(j) for j in J0))
    if m < 1:
        raise InvalidInputError("m must be a positive integer")
    if m + len(J0) > d.size:
        raise InvalidInputError(f"m + |J0| = {m + len(J0)} exceeds M = {d.size}")
    outside = np.flatnonzero(_complement_mask(d.size, J0))
    # lexsort: last key is primary; stable on index for equal magnitudes
    order = np.lexsort((outside, -np.abs(d[outside])))
    J1 = tuple(sorted(int(j) for j in outside[order[:m]]))
    return J1, tuple(sorted(set(J0) | set(J1)))


def losses(b1, b2, design: DesignMatrix, p: float = 1.0) -> tuple[float, float, float]:
    """(|b1-b2|_p^p, |X(b1-b2)|^2/n, |X(b1-b2)|^2)."""
    if not (0 < p <= 2):
        raise InvalidInputError("p must lie in (0, 2]")
    diff = as_vector(b1) - as_vector(b2)
    if diff.size != design.M:
        raise InvalidInputError("coefficient dimension does not match design")
    lp = float(np.sum(np.abs(diff) ** p))
    Xd = design.entries @ diff
    sq = float(Xd @ Xd)
    return lp, sq / design.n, sq


@dataclass(frozen=True)
class PenaltyLevel:
    A: float
    sigma: float
    n: int
    M: int
    r: float

    @property
    def lasso_admissible(self) -> bool:
        return self.A > TWO_SQRT2

    @property
    def dantzig_admissible(self) -> bool:
        return self.A > SQRT2

    @property
    def log_M(self) -> float:
        return math.log(self.M)


def penalty_level(A: float, sigma: float, n: int, M: int) -> PenaltyLevel:
    """Tuning radius r = A*sigma*sqrt(log(M)/n) (natural log)."""
    if M < 2:
        raise InvalidInputError("M must be at least 2")
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    if A <= 0:
        raise InvalidInputError("A must be positive")
    if sigma < 0:
        raise InvalidInputError("sigma must be nonnegative")
    r = A * sigma * math.sqrt(math.log(M) / n)
    return PenaltyLevel(float(A), float(sigma), int(n), int(M), float(r))


def normal_upper_tail(t: float) -> float:
    return 0.5 * math.erfc(t / SQRT2)


def event_probability(A: float, M: int, event: str = "A", form: str = "crude") -> float:
    """Lower bound on P(event) for the noise events A and B; may be negative."""
    if A <= 0 or M < 2:
        raise InvalidInputError("need A > 0 and M >= 2")
    event = event.upper().removesuffix("-EVENT")
    if event not in ("A", "B"):
        raise InvalidInputError(f"unknown event {event!r}")
    if form == "crude":
        divisor = 8.0 if event == "A" else 2.0
        return 1.0 - M ** (1.0 - A * A / divisor)
    if form == "refined":
        t = A * math.sqrt(math.log(M))
        if event == "A":
            t /= 2.0
        return 1.0 - 2.0 * M * normal_upper_tail(t)
    raise InvalidInputError(f"unknown form {form!r}")


@dataclass(frozen=True)
class RegressionInstance:
    design: DesignMatrix
    y: np.ndarray
    sigma: float = 0.0
    f_true: Optional[np.ndarray] = None
    beta_star: Optional[CoefficientVector] = None
    noise: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.design.n
        object.__setattr__(self, "y", _check_len(self.y, n, "y"))
        if self.f_true is not None:
            object.__setattr__(self, "f_true", _check_len(self.f_true, n, "f_true"))
        if self.noise is not None:
            object.__setattr__(self, "noise", _check_len(self.noise, n, "noise"))
        if self.beta_star is not None and not isinstance(self.beta_star, CoefficientVector):
            object.__setattr__(self, "beta_star", CoefficientVector(self.beta_star))
        if self.beta_star is not None and len(self.beta_star) != self.design.M:
            raise InvalidInputError("beta_star dimension does not match design")
        if self.sigma < 0:
            raise InvalidInputError("sigma must be nonnegative")

    @property
    def is_linear(self) -> bool:
        """True when f_true equals X beta_star (to 1e-12 relative)."""
        if self.beta_star is None or self.f_true is None:
            return False
        fit = self.design.entries @ self.beta_star.beta
        scale = max(1.0, float(np.max(np.abs(fit), initial=0.0)))
        return bool(np.max(np.abs(fit - self.f_true)) <= 1e-12 * scale)


def _check_len(v, n: int, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size != n:
        raise InvalidInputError(f"{name} has length {a.size}, expected {n}")
    return _frozen(a)


def linear_instance(design: DesignMatrix, beta_star: Sequence[float], noise=None,
                    sigma: float = 0.0) -> RegressionInstance:
    """Instance of the linear model y = X beta* + w."""
    b = np.asarray(beta_star, dtype=float)
    f = design.entries @ b
    w = np.zeros(design.n) if noise is None else np.asarray(noise, dtype=float)
    return RegressionInstance(design, f + w, sigma=sigma, f_true=f,
                              beta_star=CoefficientVector(b), noise=w)
