"""Seeded Monte Carlo experiments: instance generation, noise events, per-trial
bound checks and coverage summaries."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import (BoundCheck, best_sparse_approx, dantzig_bounds, equivalence_bounds,
                     lasso_bounds, oracle_checks)
from .core import (CoefficientVector, DesignMatrix, InvalidInputError, PenaltyLevel,
                   RegressionInstance, SolverError, as_vector, cone_membership,
                   empirical_norm, event_probability, gram, penalty_level,
                   sparsity_and_support)
from .dantzig import DantzigConfig, dantzig_feasibility, fit_dantzig
from .lasso import LassoConfig, fit_lasso, lasso_kkt_check
from .re_analysis import DEFAULT_CAP, certified_kappa

DESIGN_KINDS = ("identity", "gaussian-iid", "equicorrelated", "ar1", "csv-file")
AMPLITUDE_SCHEMES = ("unit", "random-sign-uniform")
FAMILIES = ("th1", "th2", "th3", "th4", "th5")
CONE_TOL = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    design_kind: str = "identity"
    n: int = 64
    M: int = 64
    s: int = 4
    A: float = 4.0
    sigma: float = 1.0
    trials: int = 100
    seed: int = 0
    rho: float = 0.0
    design_path: Optional[str] = None
    normalize_columns: bool = True
    amplitude_scheme: str = "random-sign-uniform"
    amplitude_low: float = 1.0
    amplitude_high: float = 2.0
    misspecification: float = 0.0
    eps: float = 2.0
    c0_list: tuple[float, ...] = (1.0, 3.0, 5.0)
    m: Optional[int] = None
    p_list: tuple[float, ...] = (1.5, 2.0)
    families: tuple[str, ...] = FAMILIES
    enumeration_cap: int = DEFAULT_CAP
    oracle_cap: int = 10**5
    lasso_tol: float = 1e-10
    lp_tol: float = 1e-9
    max_pivots: int = 100_000
    sparsity_tol: float = 1e-10
    workers: int = 1

    def __post_init__(self):
        for name in ("c0_list", "p_list", "families"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.design_kind not in DESIGN_KINDS:
            raise InvalidInputError(f"design_kind must be one of {DESIGN_KINDS}")
        if self.amplitude_scheme not in AMPLITUDE_SCHEMES:
            raise InvalidInputError(f"amplitude_scheme must be one of {AMPLITUDE_SCHEMES}")
        if self.n < 1 or self.M < 2:
            raise InvalidInputError("need n >= 1 and M >= 2")
        if not 1 <= self.s <= self.M:
            raise InvalidInputError("need 1 <= s <= M")
        if self.trials < 0:
            raise InvalidInputError("trials must be nonnegative")
        if not -1.0 < self.rho < 1.0:
            raise InvalidInputError("rho must lie in (-1, 1)")
        if self.design_kind == "identity" and self.M != self.n:
            raise InvalidInputError("identity design needs M = n")
        if self.design_kind == "csv-file" and not self.design_path:
            raise InvalidInputError("csv-file design needs design_path")
        if self.A <= 0 or self.sigma < 0:
            raise InvalidInputError("need A > 0 and sigma >= 0")
        if self.eps <= 0:
            raise InvalidInputError("eps must be positive")
        if self.misspecification < 0:
            raise InvalidInputError("misspecification must be nonnegative")
        if not 0 <= self.amplitude_low <= self.amplitude_high:
            raise InvalidInputError("need 0 <= amplitude_low <= amplitude_high")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad:
            raise InvalidInputError(f"unknown bound families {bad}")
        if not self.normalize_columns and set(self.families) & {"th2", "th4", "th5"}:
            raise InvalidInputError("families th2, th4 and th5 require normalize_columns")
        if any(not 1 < p <= 2 for p in self.p_list):
            raise InvalidInputError("every p must lie in (1, 2]")
        if any(c <= 0 for c in self.c0_list):
            raise InvalidInputError("c0 values must be positive")
        if self.m is not None and (self.m < self.s or self.s + self.m > self.M):
            raise InvalidInputError("m must satisfy s <= m and s + m <= M")
        if self.workers < 1:
            raise InvalidInputError("workers must be at least 1")

    @property
    def m_eff(self) -> int:
        return self.s if self.m is None else self.m

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        for k in ("c0_list", "p_list", "families"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# random streams and instances


def _generator(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def trial_seed(master_seed: int, trial_id: int) -> int:
    """64-bit seed of trial ``trial_id``; independent of execution order."""
    ss = np.random.SeedSequence([master_seed, 1, trial_id])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _covariance(kind: str, M: int, rho: float) -> np.ndarray:
    if kind == "equicorrelated":
        return (1.0 - rho) * np.eye(M) + rho * np.ones((M, M))
    idx = np.arange(M)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def _normalize(X: np.ndarray) -> np.ndarray:
    norms = np.sqrt((X * X).mean(axis=0))
    if np.any(norms == 0):
        raise InvalidInputError("cannot normalize a zero column")
    return X / norms


def build_design(config: ExperimentConfig) -> DesignMatrix:
    """The fixed design of an experiment, drawn from the master seed."""
    n, M = config.n, config.M
    kind = config.design_kind
    if kind == "identity":
        return DesignMatrix(math.sqrt(n) * np.eye(n))
    if kind == "csv-file":
        X = read_matrix(config.design_path)
        if X.shape != (n, M):
            raise InvalidInputError(f"design file has shape {X.shape}, config says {(n, M)}")
    else:
        rng = _generator(config.seed, 0)
        if kind == "gaussian-iid":
            X = rng.standard_normal((n, M))
        else:
            try:
                L = np.linalg.cholesky(_covariance(kind, M, config.rho))
            except np.linalg.LinAlgError:
                raise InvalidInputError(f"{kind} covariance with rho={config.rho} is not positive definite")
            if n >= M:
                # orthonormal reference factor: X^T X / n equals the covariance exactly
                Q, R = np.linalg.qr(rng.standard_normal((n, M)))
                Q = Q * np.sign(np.diag(R))
                X = math.sqrt(n) * Q @ L.T
            else:
                X = rng.standard_normal((n, M)) @ L.T
    if config.normalize_columns:
        X = _normalize(X)
    return DesignMatrix(X)


_DESIGNS: dict[tuple, DesignMatrix] = {}


def _design_key(config: ExperimentConfig) -> tuple:
    return (config.design_kind, config.n, config.M, config.rho, config.seed,
            config.normalize_columns, config.design_path)


def design_for(config: ExperimentConfig) -> DesignMatrix:
    key = _design_key(config)
    if key not in _DESIGNS:
        _DESIGNS[key] = build_design(config)
    return _DESIGNS[key]


def generate_instance(config: ExperimentConfig, seed: int,
                      design: Optional[DesignMatrix] = None) -> RegressionInstance:
    """Draw beta*, the optional misspecification and the noise from ``seed``."""
    design = design_for(config) if design is None else design
    rng = _generator(seed)
    n, M, s = design.n, design.M, config.s
    support = np.sort(rng.choice(M, size=s, replace=False))
    beta = np.zeros(M)
    if config.amplitude_scheme == "unit":
        beta[support] = 1.0
    else:
        signs = rng.choice([-1.0, 1.0], size=s)
        beta[support] = signs * rng.uniform(config.amplitude_low, config.amplitude_high, size=s)
    f = design.entries @ beta
    if config.misspecification > 0:
        g = rng.standard_normal(n)
        f = f + config.misspecification * g / empirical_norm(g)
    w = config.sigma * rng.standard_normal(n)
    return RegressionInstance(design, f + w, sigma=config.sigma, f_true=f,
                              beta_star=CoefficientVector(beta), noise=w)


def detect_events(instance: RegressionInstance, penalty: PenaltyLevel) -> tuple[bool, bool, float]:
    """(event A, event B, max_j |V_j|/(r ||f_j||_n)) with V = X^T w / n."""
    if instance.noise is None:
        raise InvalidInputError("events need the noise vector")
    d = instance.design
    V = d.entries.T @ instance.noise / d.n
    scaled = np.abs(V) / d.column_norms
    top = float(scaled.max())
    r = penalty.r
    ratio = top / r if r > 0 else (0.0 if top == 0 else math.inf)
    event_A = bool(np.all(2.0 * np.abs(V) <= r * d.column_norms))
    event_B = bool(np.all(np.abs(V) <= r * d.column_norms))
    return event_A, event_B, ratio


# ---------------------------------------------------------------------------
# per-design constants


@dataclass
class DesignConstants:
    phi_max: float
    kappa: dict = field(default_factory=dict)  # (s, c0, m) -> (value or None, source)

    def get(self, G, s: int, c0: float, m: Optional[int], cap: int) -> Optional[float]:
        key = (s, float(c0), m)
        if key not in self.kappa:
            M = G.M
            if s < 1 or s > M or (m is not None and (m < s or s + m > M)):
                self.kappa[key] = (None, None)
            else:
                self.kappa[key] = certified_kappa(G, s, c0, m=m, enumeration_cap=cap)
        return self.kappa[key][0]


_CONSTANTS: dict[str, DesignConstants] = {}


def design_constants(design: DesignMatrix) -> DesignConstants:
    h = design.content_hash()
    if h not in _CONSTANTS:
        _CONSTANTS[h] = DesignConstants(phi_max=gram(design).phi_max)
    return _CONSTANTS[h]


# ---------------------------------------------------------------------------
# trials


@dataclass
class TrialRecord:
    trial_id: int
    seed: int
    event_A: Optional[bool] = None
    event_B: Optional[bool] = None
    max_scaled_V: float = float("nan")
    lasso_l1: float = float("nan")
    lasso_pred: float = float("nan")
    lasso_pred_unnorm: float = float("nan")
    lasso_lp: dict = field(default_factory=dict)
    lasso_sparsity: int = -1
    dantzig_l1: float = float("nan")
    dantzig_pred: float = float("nan")
    dantzig_pred_unnorm: float = float("nan")
    dantzig_lp: dict = field(default_factory=dict)
    dantzig_sparsity: int = -1
    l1_dominance: Optional[bool] = None
    lasso_kkt_ok: Optional[bool] = None
    lasso_dantzig_feasible: Optional[bool] = None
    cone_dantzig_vs_lasso: Optional[bool] = None
    cone_dantzig_vs_star: Optional[bool] = None
    cone_lasso_c3: Optional[bool] = None
    lasso_sparsity_bound: Optional[bool] = None
    lasso_converged: Optional[bool] = None
    lasso_sweeps: int = 0
    lasso_kkt_violation: float = float("nan")
    dantzig_feasible: Optional[bool] = None
    dantzig_pivots: int = 0
    error: str = ""
    checks: list = field(default_factory=list)

    def check(self, name: str) -> Optional[BoundCheck]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def event_holds(self, required: str) -> bool:
        if required == "none":
            return True
        if required == "A":
            return bool(self.event_A)
        if required == "B":
            return bool(self.event_B)
        return bool(self.event_A) and bool(self.event_B)


def _lp_losses(diff: np.ndarray, p_list) -> dict:
    return {p: float(np.sum(np.abs(diff) ** p)) for p in p_list}


def _weighted_cone(delta, J0, c0, weights) -> bool:
    return cone_membership(as_vector(delta) * weights, J0, c0, tol=CONE_TOL)


def run_trial(config: ExperimentConfig, trial_id: int) -> TrialRecord:
    seed = trial_seed(config.seed, trial_id)
    rec = TrialRecord(trial_id=trial_id, seed=seed)
    try:
        design = design_for(config)
        inst = generate_instance(config, seed, design)
        pen = penalty_level(config.A, config.sigma, design.n, design.M)
        lasso = fit_lasso(inst, LassoConfig(pen.r, tol=config.lasso_tol))
        dz = fit_dantzig(inst, DantzigConfig(pen.r, lp_tol=config.lp_tol,
                                             max_pivots=config.max_pivots))
    except (SolverError, InvalidInputError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec

    X = design.entries
    bL, bD, bs = lasso.beta_hat.beta, dz.beta_hat.beta, inst.beta_star.beta
    f = inst.f_true
    rec.event_A, rec.event_B, rec.max_scaled_V = detect_events(inst, pen)

    rec.lasso_converged, rec.lasso_sweeps = lasso.converged, lasso.sweeps_used
    rec.lasso_kkt_violation = lasso.kkt_violation
    rec.dantzig_feasible, rec.dantzig_pivots = dz.feasible, dz.pivots_used

    fitL, fitD = X @ bL, X @ bD
    dL, dD = bL - bs, bD - bs
    rec.lasso_l1, rec.dantzig_l1 = float(np.abs(dL).sum()), float(np.abs(dD).sum())
    rec.lasso_pred = empirical_norm(fitL - f) ** 2
    rec.dantzig_pred = empirical_norm(fitD - f) ** 2
    rec.lasso_pred_unnorm = float(np.sum((X @ dL) ** 2))
    rec.dantzig_pred_unnorm = float(np.sum((X @ dD) ** 2))
    rec.lasso_lp, rec.dantzig_lp = _lp_losses(dL, config.p_list), _lp_losses(dD, config.p_list)
    tol0 = config.sparsity_tol
    rec.lasso_sparsity, JL = sparsity_and_support(bL, tol0)
    rec.dantzig_sparsity, _ = sparsity_and_support(bD, tol0)
    Js = tuple(int(j) for j in np.flatnonzero(bs))

    rec.l1_dominance = bool(np.abs(bD).sum() <= np.abs(bL).sum() + 1e-8)
    kkt = lasso_kkt_check(inst, bL, pen.r, tol=1e-8)
    rec.lasso_kkt_ok = kkt.passes
    rec.lasso_dantzig_feasible = dantzig_feasibility(inst, bL, pen.r, tol=1e-8)[0]
    rec.cone_dantzig_vs_lasso = cone_membership(bD - bL, JL, 1.0, tol=CONE_TOL) \
        if JL else bool(np.abs(bD - bL).sum() <= CONE_TOL)
    rec.cone_dantzig_vs_star = cone_membership(dD, Js, 1.0, tol=CONE_TOL)
    rec.cone_lasso_c3 = _weighted_cone(dL, Js, 3.0, design.column_norms)
    if pen.r > 0:
        cap_L = 4.0 * design_constants(design).phi_max / design.f_min**2 * rec.lasso_pred / pen.r**2
        rec.lasso_sparsity_bound = bool(rec.lasso_sparsity <= cap_L * (1 + 1e-9) + 1e-9)

    rec.checks = _bound_checks(config, design, rec, pen, bL, bD, bs, f)
    return rec


def _bound_checks(config, design, rec, pen, bL, bD, bs, f) -> list[BoundCheck]:
    fam = set(config.families)
    G = gram(design)
    const = design_constants(design)
    cap = config.enumeration_cap
    s, m, M = config.s, config.m_eff, design.M
    unit = design.has_unit_norms()
    kap = lambda ss, c0, mm=None: const.get(G, ss, c0, mm, cap)  # noqa: E731
    checks: list[BoundCheck] = []
    if "th1" in fam or "th2" in fam:
        eq = equivalence_bounds(rec.lasso_pred, rec.dantzig_pred, rec.lasso_sparsity,
                                rec.dantzig_sparsity, s, kap(s, 1.0), kap(s, 5.0), pen,
                                design.f_max, unit)
        checks += [c for c in eq if c.name[:3] in fam]
    linear = config.misspecification == 0
    if "th4" in fam and linear:
        checks += dantzig_bounds(bD, bs, design, s, m, kap(s, 1.0), kap(s, 1.0, m), pen,
                                 config.p_list)
        # any Dantzig-feasible sparse vector may replace beta*; the Lasso solution is one
        sL = max(1, rec.lasso_sparsity)
        mL = sL if 2 * sL <= M else None
        checks += dantzig_bounds(bD, bL, design, rec.lasso_sparsity, sL, kap(sL, 1.0),
                                 kap(sL, 1.0, mL) if mL else None, pen, config.p_list,
                                 prefix="th4a", event="none")
    if "th5" in fam and linear:
        checks += lasso_bounds(bL, bs, design, s, m, kap(s, 3.0), kap(s, 3.0, m),
                               const.phi_max, pen, config.p_list, zero_tol=config.sparsity_tol)
    if "th3" in fam:
        total = sum(math.comb(M, k) for k in range(s + 1))
        if total > config.oracle_cap:
            note = f"oracle enumeration of {total} supports exceeds cap"
            checks += [BoundCheck(nm, pred, math.inf, float("nan"), "A", applicable=False, note=note)
                       for nm, pred in (("th3-oracle", rec.lasso_pred),
                                        ("prop1-oracle", rec.dantzig_pred))]
        else:
            oracle = _oracle_for(design, f, s)
            c0 = (3.0 + 4.0 / config.eps) * design.f_max / design.f_min
            checks += oracle_checks(rec.lasso_pred, rec.dantzig_pred, oracle, config.eps,
                                    kap(s, c0), lambda u: kap(u, c0), const.phi_max,
                                    design.f_max, design.f_min, pen, M)
    return checks


def _oracle_for(design, f, s):
    return best_sparse_approx(design, f, s, enumeration_cap=10**7)


def bound_names(config: ExperimentConfig) -> list[str]:
    fam = set(config.families)
    out = []
    if "th1" in fam:
        out.append("th1-equiv")
    if "th2" in fam:
        out.append("th2-equiv")
    ps = [f"p{p:g}" for p in config.p_list]
    if "th4" in fam:
        out += ["th43-l1", "th44-pred"] + [f"th42-{p}" for p in ps]
        out += ["th4a-l1", "th4a-pred"] + [f"th4a-{p}" for p in ps]
    if "th5" in fam:
        out += ["th53-l1", "th54-pred", "th55-sparsity"] + [f"th52-{p}" for p in ps]
    if "th3" in fam:
        out += ["th3-oracle", "prop1-oracle"]
    return out


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class CoverageSummary:
    config: dict
    trials: int
    errors: int
    event_A_frequency: float
    event_A_se: float
    event_B_frequency: float
    event_B_se: float
    event_A_crude: float
    event_A_refined: float
    event_B_crude: float
    event_B_refined: float
    bounds: dict
    invariants: dict
    wall_clock: float

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def _freq(k: int, t: int) -> tuple[float, float]:
    if t == 0:
        return float("nan"), float("nan")
    p = k / t
    return p, math.sqrt(p * (1 - p) / t)


def _rate(flags: list) -> dict:
    vals = [bool(v) for v in flags if v is not None]
    return {"trials": len(vals), "holds": sum(vals),
            "rate": (sum(vals) / len(vals)) if vals else None}


def summarize(config: ExperimentConfig, records: Sequence[TrialRecord],
              wall_clock: float = 0.0) -> CoverageSummary:
    ok = [r for r in records if not r.error]
    t = len(ok)
    fa, sa = _freq(sum(bool(r.event_A) for r in ok), t)
    fb, sb = _freq(sum(bool(r.event_B) for r in ok), t)
    bounds = {}
    for name in bound_names(config):
        on, held, vacuous, inapplicable = 0, 0, 0, 0
        for r in ok:
            c = r.check(name)
            if c is None:
                continue
            if not c.applicable:
                inapplicable += 1
                continue
            if not c.certified or c.vacuous:
                vacuous += 1
                continue
            if r.event_holds(c.event_required):
                on += 1
                held += c.holds
        bounds[name] = {"on_event_trials": on, "holds": held,
                        "rate": held / on if on else None,
                        "vacuous": vacuous, "inapplicable": inapplicable}
    invariants = {
        "l1_dominance": _rate([r.l1_dominance for r in ok]),
        "lasso_kkt": _rate([r.lasso_kkt_ok for r in ok if r.lasso_converged]),
        "lasso_dantzig_feasible": _rate([r.lasso_dantzig_feasible for r in ok if r.lasso_converged]),
        "cone_dantzig_vs_lasso": _rate([r.cone_dantzig_vs_lasso for r in ok]),
        "cone_dantzig_vs_star_on_B": _rate([r.cone_dantzig_vs_star for r in ok if r.event_B]),
        "cone_lasso_c3_on_A": _rate([r.cone_lasso_c3 for r in ok if r.event_A]),
        "lasso_sparsity_bound_on_A": _rate([r.lasso_sparsity_bound for r in ok if r.event_A]),
        "event_A_implies_B": _rate([(not r.event_A) or r.event_B for r in ok]),
    }
    A, M = config.A, config.M
    return CoverageSummary(
        config=config.to_json(), trials=len(records), errors=len(records) - t,
        event_A_frequency=fa, event_A_se=sa, event_B_frequency=fb, event_B_se=sb,
        event_A_crude=event_probability(A, M, "A", "crude"),
        event_A_refined=event_probability(A, M, "A", "refined"),
        event_B_crude=event_probability(A, M, "B", "crude"),
        event_B_refined=event_probability(A, M, "B", "refined"),
        bounds=bounds, invariants=invariants, wall_clock=wall_clock)


def _run_chunk(args) -> list[TrialRecord]:
    config, ids = args
    return [run_trial(config, i) for i in ids]


def run_montecarlo(config: ExperimentConfig) -> tuple[CoverageSummary, list[TrialRecord]]:
    start = time.perf_counter()
    ids = list(range(config.trials))
    if config.workers > 1 and len(ids) > 1:
        k = config.workers
        chunks = [ids[i::k] for i in range(k)]
        with ProcessPoolExecutor(max_workers=k) as pool:
            parts = list(pool.map(_run_chunk, [(config, c) for c in chunks if c]))
        records = sorted((r for part in parts for r in part), key=lambda r: r.trial_id)
    else:
        records = [run_trial(config, i) for i in ids]
    return summarize(config, records, time.perf_counter() - start), records


# ---------------------------------------------------------------------------
# reports


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def csv_header(config: ExperimentConfig) -> list[str]:
    cols = ["trial_id", "seed", "n", "M", "s", "A", "sigma", "design_kind",
            "event_A", "event_B", "max_scaled_V",
            "lasso_l1", "lasso_pred", "lasso_pred_unnorm", "lasso_sparsity",
            "dantzig_l1", "dantzig_pred", "dantzig_pred_unnorm", "dantzig_sparsity"]
    for p in config.p_list:
        cols += [f"lasso_lp_p{p:g}", f"dantzig_lp_p{p:g}"]
    cols += ["l1_dominance", "lasso_kkt_ok", "lasso_dantzig_feasible",
             "cone_dantzig_vs_lasso", "cone_dantzig_vs_star", "cone_lasso_c3",
             "lasso_sparsity_bound"]
    for name in bound_names(config):
        cols += [f"{name}_empirical", f"{name}_rhs", f"{name}_holds", f"{name}_kappa",
                 f"{name}_event"]
    cols += ["lasso_converged", "lasso_sweeps", "lasso_kkt_violation",
             "dantzig_feasible", "dantzig_pivots", "error"]
    return cols


def csv_row(config: ExperimentConfig, r: TrialRecord) -> list[str]:
    row = [r.trial_id, r.seed, config.n, config.M, config.s, config.A, config.sigma]
    out = [_fmt(v) for v in row] + [config.design_kind]
    failed = bool(r.error)
    vals = [r.event_A, r.event_B, r.max_scaled_V,
            r.lasso_l1, r.lasso_pred, r.lasso_pred_unnorm, r.lasso_sparsity,
            r.dantzig_l1, r.dantzig_pred, r.dantzig_pred_unnorm, r.dantzig_sparsity]
    for p in config.p_list:
        vals += [r.lasso_lp.get(p), r.dantzig_lp.get(p)]
    vals += [r.l1_dominance, r.lasso_kkt_ok, r.lasso_dantzig_feasible,
             r.cone_dantzig_vs_lasso, r.cone_dantzig_vs_star, r.cone_lasso_c3,
             r.lasso_sparsity_bound]
    out += ["" if failed else _fmt(v) for v in vals]
    for name in bound_names(config):
        c = r.check(name)
        if c is None or not c.applicable:
            out += ["", "", "", "", ""]
        else:
            out += [_fmt(c.empirical), _fmt(c.rhs), _fmt(c.holds), _fmt(c.kappa_used),
                    c.event_required]
    tail = [r.lasso_converged, r.lasso_sweeps, r.lasso_kkt_violation,
            r.dantzig_feasible, r.dantzig_pivots]
    out += ["" if failed else _fmt(v) for v in tail] + [r.error]
    return out


def records_csv(config: ExperimentConfig, records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(config))
    for r in sorted(records, key=lambda r: r.trial_id):
        w.writerow(csv_row(config, r))
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _clean(x):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dump_json(obj, path: Optional[str] = None) -> str:
    text = json.dumps(_clean(obj), indent=2, default=_json_default) + "\n"
    if path is not None:
        _write(path, text)
    return text


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_report(config: ExperimentConfig, records: Sequence[TrialRecord],
                summary: CoverageSummary, csv_path: str, summary_path: str) -> None:
    _write(csv_path, records_csv(config, records))
    dump_json(summary.to_json(), summary_path)


def read_matrix(path) -> np.ndarray:
    """Comma-separated numeric matrix; a non-numeric first row is treated as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise InvalidInputError(f"{path} is empty")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        X = np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric entry ({exc})") from exc
    if X.ndim != 2:
        raise InvalidInputError(f"{path}: rows have different lengths")
    return X


def read_vector(path) -> np.ndarray:
    X = read_matrix(path)
    if X.shape[0] == 1 or X.shape[1] == 1:
        return X.reshape(-1)
    raise InvalidInputError(f"{path} does not hold a single row or column")
