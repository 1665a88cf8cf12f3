"""Restricted eigenvalues, restricted correlations and the RE constants kappa.

Every lower bound on kappa produced here is certified: restricted eigenvalues
and correlations are either enumerated exactly or replaced by provable
relaxations (Gershgorin / global spectrum / Frobenius), never by samples.
Upper bounds on kappa come from explicit cone witnesses.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .core import (DesignMatrix, GramMatrix, InvalidInputError, PreconditionError,
                   as_gram, as_vector, cone_membership, select_j01)

DEFAULT_CAP = 10**6
THETA_PAIR_CAP = 2 * 10**5
_CHUNK = 20000
_STRICT = 1e-12


def _combos(M: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(M), k)),
                       dtype=np.intp, count=math.comb(M, k) * k)
    return flat.reshape(-1, k)


def _iter_combos(M: int, k: int, chunk: int = _CHUNK):
    it = itertools.combinations(range(M), k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.intp)


_MEMO: dict = {}
_MEMO_SIZE = 512


def _memoized(fn):
    """Cache results per Gram content; the enumerations are pure and costly."""

    @functools.wraps(fn)
    def wrapper(gram, *args, **kwargs):
        P = as_gram(gram).psi
        if kwargs.get("rng") is not None:
            return fn(P, *args, **kwargs)
        key = (fn.__name__, hashlib.sha1(np.ascontiguousarray(P).tobytes()).hexdigest(),
               P.shape, args, tuple(sorted(kwargs.items())))
        if key not in _MEMO:
            if len(_MEMO) >= _MEMO_SIZE:
                _MEMO.pop(next(iter(_MEMO)))
            _MEMO[key] = fn(P, *args, **kwargs)
        return _MEMO[key]

    return wrapper


def _offdiag_abs(P: np.ndarray) -> np.ndarray:
    A = np.abs(P).copy()
    np.fill_diagonal(A, 0.0)
    return A


class RestrictedEigen(NamedTuple):
    phi_min: float
    phi_max: float
    exact: bool


@_memoized
def restricted_eigenvalues(gram, u: float, enumeration_cap: int = DEFAULT_CAP,
                           mode: str = "certified", samples: int = 2000,
                           rng: Optional[np.random.Generator] = None) -> RestrictedEigen:
    """phi_min(u), phi_max(u) over supports of size floor(u).

    Exhaustive when C(M, u) <= enumeration_cap. Otherwise ``mode="certified"``
    returns a lower bound on phi_min and an upper bound on phi_max, and
    ``mode="sampled"`` returns extremes over random supports; both flag exact=False.
    """
    P = as_gram(gram).psi
    M = P.shape[0]
    u = int(math.floor(u))
    if u < 1 or u > M:
        raise InvalidInputError(f"u must satisfy 1 <= u <= M={M}")
    if not _offdiag_abs(P).any():
        d = np.diag(P)
        return RestrictedEigen(float(d.min()), float(d.max()), True)
    if math.comb(M, u) <= enumeration_cap:
        lo, hi = np.inf, -np.inf
        for idx in _iter_combos(M, u):
            ev = np.linalg.eigvalsh(P[idx[:, :, None], idx[:, None, :]])
            lo = min(lo, float(ev[:, 0].min()))
            hi = max(hi, float(ev[:, -1].max()))
        return RestrictedEigen(lo, hi, True)
    if mode == "sampled":
        rng = rng if rng is not None else np.random.default_rng(0)
        idx = np.sort(np.stack([rng.choice(M, u, replace=False) for _ in range(samples)]), axis=1)
        ev = np.linalg.eigvalsh(P[idx[:, :, None], idx[:, None, :]])
        return RestrictedEigen(float(ev[:, 0].min()), float(ev[:, -1].max()), False)
    if mode != "certified":
        raise InvalidInputError(f"unknown mode {mode!r}")
    ev = np.linalg.eigvalsh(P)
    off = np.sort(_offdiag_abs(P), axis=1)[:, ::-1]
    radius = off[:, :u - 1].sum(axis=1)
    d = np.diag(P)
    lo = max(float(ev[0]), float((d - radius).min()))
    hi = min(float(ev[-1]), float((d + radius).max()))
    return RestrictedEigen(lo, hi, False)


class RestrictedCorrelation(NamedTuple):
    theta: float
    exact: bool


@_memoized
def restricted_correlation(gram, m1: int, m2: int,
                           pair_cap: int = THETA_PAIR_CAP,
                           enumeration_cap: int = DEFAULT_CAP) -> RestrictedCorrelation:
    """theta_{m1,m2}: largest spectral norm of Psi[I1, I2] over disjoint |I1|<=m1, |I2|<=m2.

    The maximum is attained at full sizes. When enumeration exceeds the caps a
    certified upper bound is returned with exact=False.
    """
    P = as_gram(gram).psi
    M = P.shape[0]
    if m1 < 1 or m2 < 1:
        raise InvalidInputError("m1 and m2 must be positive")
    if m1 + m2 > M:
        raise InvalidInputError(f"theta_{{{m1},{m2}}} undefined: m1 + m2 > M = {M}")
    a, b = sorted((m1, m2))
    off = _offdiag_abs(P)
    mu = float(off.max())
    if mu == 0.0:
        return RestrictedCorrelation(0.0, True)
    n_first = math.comb(M, a)
    if a == 1 or (n_first * math.comb(M - a, b) > pair_cap and n_first <= enumeration_cap):
        # per-I1 Frobenius bound: exact when |I1| = 1 (row vector)
        best = 0.0
        for I1 in _iter_combos(M, a):
            sq = (P[I1] ** 2).sum(axis=1)  # (chunk, M)
            mask = np.zeros_like(sq, dtype=bool)
            np.put_along_axis(mask, I1, True, axis=1)
            sq[mask] = -np.inf
            top = -np.sort(-sq, axis=1)[:, :b]
            best = max(best, float(np.sqrt(top.sum(axis=1)).max()))
        return RestrictedCorrelation(best, a == 1)
    if n_first * math.comb(M - a, b) <= pair_cap:
        best = 0.0
        tails = _combos(M - a, b)
        for I1 in itertools.combinations(range(M), a):
            I1 = np.asarray(I1)
            rem = np.setdiff1d(np.arange(M), I1)
            idx2 = rem[tails]  # (C2, b)
            blocks = np.transpose(P[I1][:, idx2], (1, 0, 2))  # (C2, a, b)
            best = max(best, float(np.linalg.norm(blocks, 2, axis=(1, 2)).max()))
        return RestrictedCorrelation(best, True)
    return RestrictedCorrelation(mu * math.sqrt(a * b), False)


# ---------------------------------------------------------------------------
# kappa lower bounds


class KappaBounds(NamedTuple):
    kappa1: Optional[float]
    kappa2: Optional[float]
    exact: bool


def _positive_or_none(x: float) -> Optional[float]:
    return x if x > _STRICT else None


def kappa_lower_bounds(gram, s: int, c0: float, m: Optional[int] = None,
                       enumeration_cap: int = DEFAULT_CAP,
                       pair_cap: int = THETA_PAIR_CAP) -> KappaBounds:
    """kappa1(s,c0) and kappa2(s,m,c0); None when undefined or not positive."""
    G = as_gram(gram)
    M = G.M
    if s < 1 or c0 <= 0:
        raise InvalidInputError("need s >= 1 and c0 > 0")
    exact = True
    k1 = None
    if 2 * s <= M and 3 * s <= M:
        ev = restricted_eigenvalues(G, 2 * s, enumeration_cap)
        th = restricted_correlation(G, s, 2 * s, pair_cap, enumeration_cap)
        exact &= ev.exact and th.exact
        if ev.phi_min > 0:
            k1 = _positive_or_none(math.sqrt(ev.phi_min) * (1.0 - c0 * th.theta / ev.phi_min))
    k2 = None
    if m is not None:
        if m < s or s + m > M or 2 * s > M:
            raise InvalidInputError("kappa2 needs m >= s, s + m <= M and s <= M/2")
        lo = restricted_eigenvalues(G, s + m, enumeration_cap)
        hi = restricted_eigenvalues(G, m, enumeration_cap)
        exact &= lo.exact and hi.exact
        if lo.phi_min > 0:
            k2 = _positive_or_none(math.sqrt(lo.phi_min)
                                   * (1.0 - c0 * math.sqrt(s * hi.phi_max / (m * lo.phi_min))))
    return KappaBounds(k1, k2, exact)


def coherence_kappa_bounds(gram, s: int, c0: float,
                           enumeration_cap: int = DEFAULT_CAP) -> dict[str, Optional[float]]:
    """Lower bounds on kappa(s,c0) from the correlation-type sufficient conditions.

    kappa^2 >= phi_min(s) - 2 c0 theta_{s,1} sqrt(s)   (condition 3)
    kappa^2 >= phi_min(s) - 2 c0 theta_{1,1} s         (condition 4)
    kappa^2 >= 1 - (1 + 2 c0) theta_{1,1} s            (condition 5, unit diagonal)
    """
    G = as_gram(gram)
    M = G.M
    ev = restricted_eigenvalues(G, s, enumeration_cap)
    t11 = restricted_correlation(G, 1, 1).theta
    out: dict[str, Optional[float]] = {}
    if s + 1 <= M:
        ts1 = restricted_correlation(G, s, 1).theta
        v = ev.phi_min - 2 * c0 * ts1 * math.sqrt(s)
        out["kappa3"] = _positive_or_none(math.sqrt(v)) if v > 0 else None
    v = ev.phi_min - 2 * c0 * t11 * s
    out["kappa4"] = _positive_or_none(math.sqrt(v)) if v > 0 else None
    if G.has_unit_diagonal():
        v = 1.0 - (1 + 2 * c0) * t11 * s
        out["kappa5"] = _positive_or_none(math.sqrt(v)) if v > 0 else None
    return out


@dataclass(frozen=True)
class AssumptionVerdict:
    holds: bool
    slack: float
    exact: bool
    applicable: bool = True


def _verdict(lhs: float, rhs: float, exact: bool) -> AssumptionVerdict:
    slack = lhs - rhs
    return AssumptionVerdict(bool(slack > _STRICT * max(1.0, abs(lhs), abs(rhs))), slack, exact)


_NA = AssumptionVerdict(False, float("nan"), True, applicable=False)


def check_assumptions(gram, s: int, c0: float, m: Optional[int] = None,
                      which: Optional[Iterable[int]] = None,
                      enumeration_cap: int = DEFAULT_CAP) -> dict[int, AssumptionVerdict]:
    """Verdict and slack (LHS - RHS) for the five sufficient conditions.

    ``which=None`` evaluates 1-4 and also 5 when the diagonal is unit; asking
    for 5 explicitly on a non-unit diagonal raises InvalidInputError. Verdicts
    built from bounds (exact=False) are sound when they hold.
    """
    G = as_gram(gram)
    M = G.M
    unit = G.has_unit_diagonal()
    if which is None:
        which = [1, 2, 3, 4] + ([5] if unit else [])
    which = list(which)
    if 5 in which and not unit:
        raise InvalidInputError("condition 5 requires a unit-diagonal Gram matrix")
    out: dict[int, AssumptionVerdict] = {}
    for k in which:
        if k == 1:
            if 3 * s > M:
                out[1] = _NA
                continue
            ev = restricted_eigenvalues(G, 2 * s, enumeration_cap)
            th = restricted_correlation(G, s, 2 * s)
            out[1] = _verdict(ev.phi_min, c0 * th.theta, ev.exact and th.exact)
        elif k == 2:
            if m is None or m < s or s + m > M or 2 * s > M:
                out[2] = _NA
                continue
            lo = restricted_eigenvalues(G, s + m, enumeration_cap)
            hi = restricted_eigenvalues(G, m, enumeration_cap)
            out[2] = _verdict(m * lo.phi_min, c0 * c0 * s * hi.phi_max, lo.exact and hi.exact)
        elif k == 3:
            if s + 1 > M:
                out[3] = _NA
                continue
            ev = restricted_eigenvalues(G, s, enumeration_cap)
            th = restricted_correlation(G, s, 1)
            out[3] = _verdict(ev.phi_min, 2 * c0 * th.theta * math.sqrt(s), ev.exact and th.exact)
        elif k == 4:
            ev = restricted_eigenvalues(G, s, enumeration_cap)
            th = restricted_correlation(G, 1, 1)
            out[4] = _verdict(ev.phi_min, 2 * c0 * th.theta * s, ev.exact)
        elif k == 5:
            th = restricted_correlation(G, 1, 1)
            out[5] = _verdict(1.0 / ((1 + 2 * c0) * s), th.theta, True)
        else:
            raise InvalidInputError(f"unknown assumption {k}")
    return out


# ---------------------------------------------------------------------------
# kappa upper bounds by cone search


def _project_l1(V: np.ndarray, mask: np.ndarray, radius: np.ndarray) -> np.ndarray:
    """Column-wise Euclidean projection of V (zero outside ``mask``) onto l1 balls."""
    V = np.where(mask, V, 0.0)
    absV = np.abs(V)
    norms = absV.sum(axis=0)
    out = V.copy()
    need = norms > radius
    if not np.any(need):
        return out
    A = absV[:, need]
    R = radius[need]
    srt = -np.sort(-A, axis=0)
    css = np.cumsum(srt, axis=0)
    k = np.arange(1, A.shape[0] + 1)[:, None]
    cond = srt - (css - R) / k > 0
    rho = A.shape[0] - 1 - np.argmax(cond[::-1], axis=0)
    tau = (css[rho, np.arange(A.shape[1])] - R) / (rho + 1)
    out[:, need] = np.sign(V[:, need]) * np.maximum(A - tau, 0.0)
    return out


def _ratios(P: np.ndarray, D: np.ndarray, J0mask: np.ndarray, m: Optional[int]):
    """Plain and m-variant ratios |X D|/(sqrt(n)|D_J0|) column-wise."""
    q = np.maximum(np.einsum("ip,ij,jp->p", D, P, D), 0.0)
    sq = D * D
    den0 = np.sqrt((sq * J0mask).sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        plain = np.where(den0 > 0, np.sqrt(q) / den0, np.inf)
    if m is None:
        return plain, None
    outside = np.where(J0mask, -np.inf, sq)
    top = -np.sort(-outside, axis=0)[:m]
    top = np.where(np.isfinite(top), top, 0.0)
    denm = np.sqrt(den0**2 + top.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        mvar = np.where(denm > 0, np.sqrt(q) / denm, np.inf)
    return plain, mvar


def _top_mask(D: np.ndarray, s: int) -> np.ndarray:
    order = np.argsort(-np.abs(D), axis=0, kind="stable")[:s]
    mask = np.zeros(D.shape, dtype=bool)
    np.put_along_axis(mask, order, True, axis=0)
    return mask


@dataclass(frozen=True)
class KappaEstimate:
    lower: Optional[float]
    upper: float
    witness_J0: tuple[int, ...]
    witness: np.ndarray = field(repr=False)
    exact: bool
    lower_source: Optional[str] = None
    m: Optional[int] = None


def _cone_search(P: np.ndarray, J0s: np.ndarray, s: int, c0: float, m: Optional[int],
                 starts: int, iterations: int, rng: np.random.Generator,
                 reselect: bool, extra: Sequence[np.ndarray] = ()):
    """Projected-gradient search for small |X D|/|D_J0| over the c0-cone.

    Returns (best_plain, witness_plain, J0_plain, best_m, witness_m, J0_m).
    """
    M = P.shape[0]
    lam = float(np.linalg.eigvalsh(P)[-1])
    step = 1.0 / lam if lam > 0 else 1.0
    best = [np.inf, None, None, np.inf, None, None]

    def consider(D, mask):
        if reselect:
            mask = _top_mask(D, s)
        plain, mv = _ratios(P, D, mask, m)
        i = int(np.argmin(plain))
        if plain[i] < best[0]:
            best[0], best[1] = float(plain[i]), D[:, i].copy()
            best[2] = tuple(int(j) for j in np.flatnonzero(mask[:, i]))
        if mv is not None:
            i = int(np.argmin(mv))
            if mv[i] < best[3]:
                best[3], best[4] = float(mv[i]), D[:, i].copy()
                best[5] = tuple(int(j) for j in np.flatnonzero(mask[:, i]))

    if len(extra):
        E = np.column_stack([as_vector(e) for e in extra])
        E = E[:, np.abs(E).sum(axis=0) > 0]
        if E.size:
            mask = _top_mask(E, s)
            ok = np.array([cone_membership(E[:, i], np.flatnonzero(mask[:, i]), c0, tol=1e-12)
                           for i in range(E.shape[1])])
            if np.any(ok):
                consider(E[:, ok], mask[:, ok])

    per_chunk = max(1, 4096 // starts)
    for c in range(0, len(J0s), per_chunk):
        block = J0s[c:c + per_chunk]
        ncol = len(block) * starts
        mask = np.zeros((M, ncol), dtype=bool)
        for bi, J0 in enumerate(block):
            mask[np.asarray(J0, dtype=np.intp), bi * starts:(bi + 1) * starts] = True
        D = rng.standard_normal((M, ncol))
        a = np.where(mask, D, 0.0)
        a /= np.linalg.norm(a, axis=0)
        v = np.where(mask, 0.0, rng.standard_normal((M, ncol)))
        l1v = np.abs(v).sum(axis=0)
        R = c0 * np.abs(a).sum(axis=0)
        frac = rng.uniform(0.0, 1.0, ncol)
        frac[::starts] = 0.0  # one start per J0 with nothing off the support
        v *= np.where(l1v > 0, frac * R / np.where(l1v > 0, l1v, 1.0), 0.0)
        D = a + v
        for it in range(iterations):
            D = D - step * (P @ D)
            a = np.where(mask, D, 0.0)
            na = np.linalg.norm(a, axis=0)
            bad = na == 0
            if np.any(bad):
                a[:, bad] = np.where(mask[:, bad], 1.0, 0.0)
                na[bad] = np.sqrt(mask[:, bad].sum(axis=0))
            a /= na
            R = c0 * np.abs(a).sum(axis=0) * (1.0 - 1e-12)
            v = _project_l1(np.where(mask, 0.0, D), ~mask, R)
            D = a + v
            if it % 25 == 24 or it == iterations - 1:
                consider(D, mask)
        if iterations == 0:
            consider(D, mask)
    return best


def estimate_kappa(gram, s: int, c0: float, m: Optional[int] = None,
                   enumeration_cap: int = DEFAULT_CAP, search_budget: int = 64,
                   iterations: int = 500, seed: int = 0,
                   witnesses: Sequence[np.ndarray] = (),
                   with_lower: bool = True) -> KappaEstimate:
    """Interval [lower, upper] for kappa(s, c0), or kappa(s, m, c0) when m is given.

    ``lower`` is the best certified constant (kappa1/kappa2 and the
    coherence-type bounds); ``upper`` is the smallest ratio attained by a cone
    witness found by search (or supplied through ``witnesses``).
    """
    G = as_gram(gram)
    P = G.psi
    M = G.M
    if s < 1 or s > M:
        raise InvalidInputError(f"s must satisfy 1 <= s <= M={M}")
    if c0 <= 0:
        raise InvalidInputError("c0 must be positive")
    if m is not None and (m < s or s + m > M):
        raise InvalidInputError("m-variant needs m >= s and s + m <= M")
    rng = np.random.default_rng(seed)
    total = math.comb(M, s)
    exact = total <= enumeration_cap
    if exact:
        J0s = _combos(M, s)
    else:
        J0s = np.sort(np.stack([rng.choice(M, s, replace=False)
                                for _ in range(max(1, search_budget))]), axis=1)
    found = _cone_search(P, J0s, s, c0, m, search_budget, iterations, rng,
                         reselect=True, extra=witnesses)
    if m is None:
        upper, wit, J0 = found[0], found[1], found[2]
    else:
        upper, wit, J0 = found[3], found[4], found[5]

    lower, source = _certified_lower(G, s, c0, m, enumeration_cap) if with_lower else (None, None)
    return KappaEstimate(lower=lower, upper=upper, witness_J0=J0, witness=wit,
                         exact=exact, lower_source=source, m=m)


def _certified_lower(G: GramMatrix, s: int, c0: float, m: Optional[int],
                     enumeration_cap: int) -> tuple[Optional[float], Optional[str]]:
    M = G.M
    cands: dict[str, Optional[float]] = {}
    if 2 * s <= M and (m is None or s + m <= M):
        kb = kappa_lower_bounds(G, s, c0, m=s if m is None else m,
                                enumeration_cap=enumeration_cap)
        if m is None or m == s:
            cands["kappa1"] = kb.kappa1
        cands["kappa2"] = kb.kappa2
    if m is None:
        cands.update(coherence_kappa_bounds(G, s, c0, enumeration_cap))
    valid = {k: v for k, v in cands.items() if v is not None}
    if not valid:
        return None, None
    source = max(valid, key=valid.get)
    return valid[source], source


def certified_kappa(gram, s: int, c0: float, m: Optional[int] = None,
                    enumeration_cap: int = DEFAULT_CAP) -> tuple[Optional[float], Optional[str]]:
    """Best certified lower bound on kappa(s,c0) (or kappa(s,m,c0)), without search."""
    G = as_gram(gram)
    if s < 1 or s > G.M:
        raise InvalidInputError(f"s must satisfy 1 <= s <= M={G.M}")
    if c0 <= 0:
        raise InvalidInputError("c0 must be positive")
    if m is not None and (m < s or s + m > G.M):
        raise InvalidInputError("m-variant needs m >= s and s + m <= M")
    return _certified_lower(G, s, c0, m, enumeration_cap)


def j0_kappa_lower(gram, J0: Sequence[int], c0: float) -> Optional[float]:
    """Certified lower bound on min over the c0-cone of J0 of |X D|/(sqrt(n)|D_J0|).

    Uses lambda_min(Psi_J0) - 2 c0 sqrt(|J0|) max_{j not in J0} |Psi_{J0,j}|_2.
    """
    P = as_gram(gram).psi
    J0 = np.asarray(sorted(J0), dtype=np.intp)
    if J0.size == 0:
        return None
    lam = float(np.linalg.eigvalsh(P[np.ix_(J0, J0)])[0])
    rest = np.setdiff1d(np.arange(P.shape[0]), J0)
    cross = float(np.sqrt((P[np.ix_(J0, rest)] ** 2).sum(axis=0)).max()) if rest.size else 0.0
    v = lam - 2.0 * c0 * math.sqrt(J0.size) * cross
    return math.sqrt(v) if v > 0 else None


class MembershipVerdict(NamedTuple):
    verdict: str  # "holds", "fails" or "undetermined"
    lower: Optional[float]
    upper: float


def lambda_membership(gram, J0: Sequence[int], gamma: float, c0: float,
                      search_budget: int = 64, iterations: int = 500,
                      seed: int = 0) -> MembershipVerdict:
    """Whether J0 belongs to the family of supports whose cone constant is >= gamma."""
    if gamma <= 0:
        raise InvalidInputError("gamma must be positive")
    P = as_gram(gram).psi
    J0 = tuple(sorted(int(j) for j in J0))
    lo = j0_kappa_lower(P, J0, c0)
    if lo is not None and lo >= gamma:
        return MembershipVerdict("holds", lo, float("nan"))
    found = _cone_search(P, np.asarray([J0], dtype=np.intp), len(J0), c0, None,
                         search_budget, iterations, np.random.default_rng(seed), reselect=False)
    if found[0] < gamma:
        return MembershipVerdict("fails", lo, found[0])
    return MembershipVerdict("undetermined", lo, found[0])


def gram_perturbation_bound(psi_n, psi_ref, J0_size: int, c0: float) -> tuple[float, float]:
    """(eps_n, eps_n (1+c0)^2 |J0|): max entrywise gap and the Rayleigh-quotient loss bound."""
    A = as_gram(psi_n).psi
    B = as_gram(psi_ref).psi
    if A.shape != B.shape:
        raise InvalidInputError("Gram matrices have different dimensions")
    eps = float(np.abs(A - B).max())
    return eps, eps * (1.0 + c0) ** 2 * J0_size


class ProjectorCheck(NamedTuple):
    lhs: float
    holds_vs_kappa1: Optional[bool]
    holds_vs_kappa2: Optional[bool]
    lhs_kappa1: float


def _projected_norm(X: np.ndarray, J01: Sequence[int], delta: np.ndarray) -> float:
    cols = X[:, list(J01)]
    target = X @ delta
    coef, *_ = np.linalg.lstsq(cols, target, rcond=None)
    return float(np.linalg.norm(cols @ coef) / math.sqrt(X.shape[0]))


def projector_cone_check(design: DesignMatrix, J0: Sequence[int], m: int, delta, c0: float,
                         s: Optional[int] = None, kappa1: Optional[float] = None,
                         kappa2: Optional[float] = None, tol: float = 1e-10) -> ProjectorCheck:
    """Compare |P01 X delta|/sqrt(n) against kappa |delta_J01|_2.

    kappa1 is compared with J01 built from m = s, kappa2 with the given m.
    Constants not supplied are computed from the design with s = |J0| by default.
    """
    d = as_vector(delta)
    J0 = tuple(sorted(int(j) for j in J0))
    s = len(J0) if s is None else s
    if len(J0) > s:
        raise InvalidInputError("|J0| must not exceed s")
    if not cone_membership(d, J0, c0, tol=1e-12):
        raise PreconditionError("delta is not in the c0-cone of J0")
    X = design.entries
    if kappa1 is None and kappa2 is None:
        M = design.M
        kb = kappa_lower_bounds(design, s, c0,
                                m=m if (m >= s and s + m <= M and 2 * s <= M) else None)
        kappa1, kappa2 = kb.kappa1, kb.kappa2
    _, J01 = select_j01(d, J0, m)
    lhs = _projected_norm(X, J01, d)
    h2 = None
    if kappa2 is not None and kappa2 > 0:
        h2 = lhs >= kappa2 * np.linalg.norm(d[list(J01)]) - tol
    lhs1 = lhs
    h1 = None
    if kappa1 is not None and kappa1 > 0 and s + len(J0) <= design.M:
        _, J01s = select_j01(d, J0, s)
        lhs1 = _projected_norm(X, J01s, d)
        h1 = lhs1 >= kappa1 * np.linalg.norm(d[list(J01s)]) - tol
    return ProjectorCheck(lhs, h1, h2, lhs1)


class KernelCheck(NamedTuple):
    ok: bool
    worst_sigma_min: float
    exact: bool


def kernel_sparsity_check(design: DesignMatrix, s: int, enumeration_cap: int = DEFAULT_CAP,
                          samples: int = 2000, seed: int = 0, tol: float = 1e-10) -> KernelCheck:
    """Smallest singular value of X_J/sqrt(n) over all supports |J| = 2s."""
    X = design.entries
    n, M = X.shape
    k = 2 * s
    if s < 1 or k > M:
        raise InvalidInputError("kernel check needs 1 <= s and 2s <= M")
    if n < k:
        return KernelCheck(False, 0.0, True)
    exact = math.comb(M, k) <= enumeration_cap
    if exact:
        chunks = _iter_combos(M, k)
    else:
        rng = np.random.default_rng(seed)
        chunks = [np.sort(np.stack([rng.choice(M, k, replace=False) for _ in range(samples)]), axis=1)]
    worst = np.inf
    for idx in chunks:
        sub = np.transpose(X[:, idx], (1, 0, 2))
        sv = np.linalg.svd(sub, compute_uv=False)
        worst = min(worst, float(sv[:, -1].min()) / math.sqrt(n))
    return KernelCheck(bool(worst > tol * max(1.0, design.f_max)), worst, exact)


# ---------------------------------------------------------------------------
# report


@dataclass
class ReAnalysisReport:
    M: int
    s: int
    m: Optional[int]
    phi_min: dict[int, float] = field(default_factory=dict)
    phi_max: dict[int, float] = field(default_factory=dict)
    phi_exact: dict[int, bool] = field(default_factory=dict)
    theta: dict[tuple[int, int], float] = field(default_factory=dict)
    theta_exact: dict[tuple[int, int], bool] = field(default_factory=dict)
    per_c0: dict[float, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "M": self.M, "s": self.s, "m": self.m,
            "phi_min": [{"u": u, "value": v, "exact": self.phi_exact[u]} for u, v in self.phi_min.items()],
            "phi_max": [{"u": u, "value": v, "exact": self.phi_exact[u]} for u, v in self.phi_max.items()],
            "theta": [{"m1": k[0], "m2": k[1], "value": v, "exact": self.theta_exact[k]}
                      for k, v in self.theta.items()],
            "per_c0": [dict(c0=c0, **entry) for c0, entry in self.per_c0.items()],
        }


def analyze(design, s: int, c0_list: Sequence[float], m: Optional[int] = None,
            enumeration_cap: int = DEFAULT_CAP, search_budget: int = 64,
            iterations: int = 500, seed: int = 0) -> ReAnalysisReport:
    G = as_gram(design)
    M = G.M
    if s < 1 or s > M:
        raise InvalidInputError("s out of range")
    rep = ReAnalysisReport(M=M, s=s, m=m)
    top_u = min(M, max(2 * s, s + (m or 0), 1))
    for u in range(1, top_u + 1):
        ev = restricted_eigenvalues(G, u, enumeration_cap)
        rep.phi_min[u], rep.phi_max[u], rep.phi_exact[u] = ev.phi_min, ev.phi_max, ev.exact
    pairs = {(1, 1), (s, 1), (s, 2 * s)}
    if m is not None:
        pairs.add((s, m))
    for a, b in sorted(pairs):
        if a + b <= M:
            th = restricted_correlation(G, a, b, enumeration_cap=enumeration_cap)
            rep.theta[(a, b)], rep.theta_exact[(a, b)] = th.theta, th.exact
    for c0 in c0_list:
        entry: dict = {}
        verdicts = check_assumptions(G, s, c0, m=m, enumeration_cap=enumeration_cap)
        entry["assumptions"] = {str(k): {"holds": v.holds, "slack": v.slack, "exact": v.exact,
                                         "applicable": v.applicable} for k, v in verdicts.items()}
        km = m if (m is not None and m >= s and s + m <= M and 2 * s <= M) else None
        kb = kappa_lower_bounds(G, s, c0, m=km, enumeration_cap=enumeration_cap) if 2 * s <= M \
            else KappaBounds(None, None, True)
        entry["kappa1"], entry["kappa2"] = kb.kappa1, kb.kappa2
        est = estimate_kappa(G, s, c0, enumeration_cap=enumeration_cap,
                             search_budget=search_budget, iterations=iterations, seed=seed)
        entry["kappa_interval"] = {"lower": est.lower, "lower_source": est.lower_source,
                                   "upper": est.upper, "witness_J0": list(est.witness_J0),
                                   "witness": [float(x) for x in est.witness],
                                   "exact_enumeration": est.exact}
        if km is not None:
            estm = estimate_kappa(G, s, c0, m=km, enumeration_cap=enumeration_cap,
                                  search_budget=search_budget, iterations=iterations, seed=seed)
            entry["kappa_m_interval"] = {"lower": estm.lower, "lower_source": estm.lower_source,
                                         "upper": estm.upper, "exact_enumeration": estm.exact}
        rep.per_c0[float(c0)] = entry
    return rep
