import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from lassodantzig.core import InvalidInputError, penalty_level
from lassodantzig.harness import (ExperimentConfig, bound_names, build_design, csv_header,
                                  detect_events, dump_json, emit_report, generate_instance,
                                  read_matrix, read_vector, records_csv, run_montecarlo,
                                  run_trial, summarize, trial_seed)
from lassodantzig.core import RegressionInstance

DATA = Path(__file__).parent / "data"


def small(**kw):
    base = dict(n=16, M=16, s=2, trials=5, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_trial_seed_is_deterministic_and_distinct():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    assert len({trial_seed(7, i) for i in range(100)}) == 100
    assert trial_seed(7, 3) != trial_seed(8, 3)


def test_instances_are_bit_identical():
    cfg = small(design_kind="gaussian-iid", n=12, M=20)
    a = generate_instance(cfg, trial_seed(cfg.seed, 4))
    b = generate_instance(cfg, trial_seed(cfg.seed, 4))
    assert a.y.tobytes() == b.y.tobytes()
    assert a.beta_star.beta.tobytes() == b.beta_star.beta.tobytes()
    c = generate_instance(cfg, trial_seed(cfg.seed, 5))
    assert a.y.tobytes() != c.y.tobytes()


def test_identity_noiseless_instance():
    cfg = small(sigma=0.0)
    inst = generate_instance(cfg, 11)
    assert np.array_equal(inst.y, math.sqrt(16) * inst.beta_star.beta)
    assert inst.beta_star.sparsity() == 2
    amps = np.abs(inst.beta_star.beta[inst.beta_star.beta != 0])
    assert np.all((amps >= 1) & (amps <= 2))


def test_gaussian_design_normalized():
    d = build_design(small(design_kind="gaussian-iid", n=10, M=30))
    assert np.allclose(d.column_norms, 1.0, atol=1e-12, rtol=0)


def test_correlated_design_has_exact_gram():
    d = build_design(small(design_kind="equicorrelated", n=32, M=16, rho=0.2))
    P = d.entries.T @ d.entries / 32
    assert np.allclose(P, 0.8 * np.eye(16) + 0.2, atol=1e-12)
    d = build_design(small(design_kind="ar1", n=20, M=8, rho=0.5))
    P = d.entries.T @ d.entries / 20
    assert P[0, 2] == pytest.approx(0.25, abs=1e-12)


def test_csv_design(tmp_path):
    X = np.random.default_rng(0).standard_normal((6, 4))
    path = tmp_path / "X.csv"
    np.savetxt(path, X, delimiter=",", header="a,b,c,d", comments="")
    cfg = small(design_kind="csv-file", design_path=str(path), n=6, M=4, s=1)
    assert np.allclose(build_design(cfg).column_norms, 1.0)
    bad = small(design_kind="csv-file", design_path=str(path), n=5, M=4, s=1)
    with pytest.raises(InvalidInputError):
        build_design(bad)


def test_config_errors():
    for kw in [dict(design_kind="identity", n=8, M=10), dict(s=0), dict(s=20),
               dict(p_list=(2.5,)), dict(families=("th9",)), dict(rho=1.0),
               dict(normalize_columns=False), dict(eps=0), dict(trials=-1),
               dict(design_kind="csv-file"), dict(m=1), dict(design_kind="nope")]:
        with pytest.raises(InvalidInputError):
            small(**kw)
    ok = small(normalize_columns=False, families=("th1", "th3"))
    assert ok.m_eff == 2


def test_config_json_round_trip():
    cfg = small(c0_list=(1.0, 2.0), families=("th1", "th5"))
    assert ExperimentConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    with pytest.raises(InvalidInputError):
        ExperimentConfig.from_json({"n": 8, "M": 8, "bogus": 1})


def test_event_threshold_sandwich():
    cfg = small(n=4, M=4)
    design = build_design(cfg)
    pen = penalty_level(cfg.A, 1.0, 4, 4)
    w = np.zeros(4)
    w[2] = 0.6 * pen.r * 4 / design.entries[2, 2]  # V_2 = 0.6 r
    inst = RegressionInstance(design, w, sigma=1.0, noise=w)
    A, B, ratio = detect_events(inst, pen)
    assert (A, B) == (False, True) and ratio == pytest.approx(0.6)
    zero = RegressionInstance(design, np.zeros(4), sigma=0.0, noise=np.zeros(4))
    assert detect_events(zero, pen)[:2] == (True, True)
    with pytest.raises(InvalidInputError):
        detect_events(RegressionInstance(design, np.zeros(4)), pen)


def soft(z, r):
    return np.sign(z) * np.maximum(np.abs(z) - r, 0)


def test_identity_trial_matches_closed_form():
    cfg = small(trials=1, seed=9)
    rec = run_trial(cfg, 0)
    inst = generate_instance(cfg, rec.seed)
    r = penalty_level(cfg.A, cfg.sigma, 16, 16).r
    z = inst.design.entries.T @ inst.y / 16
    bL = soft(z, r)
    assert rec.lasso_l1 == pytest.approx(np.abs(bL - inst.beta_star.beta).sum(), abs=1e-9)
    assert rec.dantzig_l1 == pytest.approx(rec.lasso_l1, abs=1e-8)
    assert rec.lasso_lp[2.0] == pytest.approx(np.sum((bL - inst.beta_star.beta) ** 2), abs=1e-9)
    assert rec.l1_dominance and rec.lasso_kkt_ok and rec.lasso_dantzig_feasible


def test_noiseless_exact_recovery():
    cfg = ExperimentConfig(design_kind="gaussian-iid", n=20, M=10, s=2, sigma=0.0, trials=1,
                           seed=4)
    rec = run_trial(cfg, 0)
    assert rec.error == ""
    assert rec.lasso_l1 == pytest.approx(0, abs=1e-8)
    assert rec.dantzig_l1 == pytest.approx(0, abs=1e-8)
    assert rec.lasso_pred == pytest.approx(0, abs=1e-15)


def test_solver_failure_is_recorded():
    cfg = small(trials=1, max_pivots=1, design_kind="gaussian-iid", n=12, M=20, A=1.5)
    rec = run_trial(cfg, 0)
    assert rec.error.startswith("PivotLimitError")
    row = records_csv(cfg, [rec]).splitlines()[1].split(",")
    assert row[-1].startswith("PivotLimitError")
    summ = summarize(cfg, [rec])
    assert summ.errors == 1 and math.isnan(summ.event_A_frequency)


def test_single_trial_montecarlo_equals_run_trial():
    cfg = small(trials=1)
    _, recs = run_montecarlo(cfg)
    assert records_csv(cfg, recs) == records_csv(cfg, [run_trial(cfg, 0)])


def test_golden_header():
    cfg = ExperimentConfig(n=8, M=8, s=1, trials=0, p_list=(2.0,), families=("th1", "th4"))
    golden = (DATA / "golden_header.csv").read_text().strip()
    assert ",".join(csv_header(cfg)) == golden


def test_zero_trials(tmp_path):
    cfg = small(trials=0)
    summ, recs = run_montecarlo(cfg)
    assert recs == [] and summ.trials == 0 and summ.errors == 0
    assert all(v["on_event_trials"] == 0 for v in summ.bounds.values())
    out, js = tmp_path / "o.csv", tmp_path / "s.json"
    emit_report(cfg, recs, summ, str(out), str(js))
    assert out.read_text().count("\n") == 1
    assert json.loads(js.read_text())["trials"] == 0


def test_csv_round_trip_of_holds_flags():
    cfg = small(trials=6, design_kind="equicorrelated", n=24, M=12, rho=0.05, s=2)
    _, recs = run_montecarlo(cfg)
    rows = list(csv.DictReader(io.StringIO(records_csv(cfg, recs))))
    assert len(rows) == 6
    checked = 0
    for row in rows:
        for name in bound_names(cfg):
            if row[f"{name}_holds"] == "":
                continue
            emp, rhs = float(row[f"{name}_empirical"]), float(row[f"{name}_rhs"])
            assert row[f"{name}_holds"] == ("1" if emp <= rhs + 1e-9 else "0")
            checked += 1
    assert checked > 0


def test_serial_and_parallel_identical():
    cfg = small(trials=8)
    _, a = run_montecarlo(cfg)
    _, b = run_montecarlo(ExperimentConfig(**{**cfg.to_json(), "workers": 3}))
    assert records_csv(cfg, a) == records_csv(cfg, b)


def test_summary_contents():
    cfg = small(trials=20, n=32, M=32, s=2)
    summ, recs = run_montecarlo(cfg)
    js = json.loads(dump_json(summ.to_json()))
    assert js["trials"] == 20 and js["errors"] == 0
    assert js["event_A_crude"] == pytest.approx(1 - 32 ** (1 - 16 / 8))
    assert js["event_A_refined"] >= js["event_A_crude"]
    assert js["invariants"]["l1_dominance"]["rate"] == 1.0
    for name, b in js["bounds"].items():
        if b["on_event_trials"]:
            assert b["rate"] == 1.0, name


def test_dump_json_non_finite():
    text = dump_json({"a": math.inf, "b": [math.nan, np.float64(1.5)], "c": np.bool_(True)})
    assert json.loads(text) == {"a": "inf", "b": ["nan", 1.5], "c": True}


def test_readers(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("1\n2\n3\n")
    assert np.array_equal(read_vector(p), [1, 2, 3])
    p.write_text("1,2\n3,x\n")
    with pytest.raises(InvalidInputError):
        read_matrix(p)
    p.write_text("1,2\n3,4\n")
    with pytest.raises(InvalidInputError):
        read_vector(p)
    with pytest.raises(OSError):
        read_matrix(tmp_path / "missing.csv")
