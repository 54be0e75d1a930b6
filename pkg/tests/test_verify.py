import json
import os

import numpy as np
import pytest

from divlab import KnotSet, corpus_lookup
from divlab.corpus import PowerModulus
from divlab.errors import ConfigError, DomainError, PreconditionError
from divlab.verify import (TrialConfig, check_lemma3, check_lemma4, config_from_dict,
                           interp_sides, load_baselines, load_configs, run_config, run_suite,
                           save_baselines, theorem_sides)
from divlab.verify.report import score
from divlab.verify.sampling import distinct_values, expand_identifier, trial_rng

SMALL = dict(trials=12, grid_x=128, grid_u=64)


def test_expand_identifier():
    assert expand_identifier("abs(0.37,{r}+0.5)", 3, 1) == "abs(0.37,1.5)"
    assert expand_identifier("x^{m}", 4, 0) == "x^4"


def test_trial_rng_is_per_index():
    a = trial_rng(5, 3).uniform()
    assert a == trial_rng(5, 3).uniform()
    assert a != trial_rng(5, 4).uniform()


@pytest.mark.parametrize("preset", ["uniform", "near-pair", "geometric"])
@pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
def test_distinct_values_respect_gap(preset, n):
    vals = distinct_values(np.random.default_rng(n), n, 1e-3, preset)
    assert len(vals) == n and np.all(np.diff(vals) > 0)
    if n > 1:
        assert np.min(np.diff(vals)) >= 1e-3 * (vals[-1] - vals[0])


def test_score():
    assert score(0.0, 0.0, 1e-9) == (0.0, False)
    assert score(1.0, 0.0, 1e-9) == (float("inf"), True)
    assert score(1.0, 4.0, 1e-9) == (0.25, False)


def test_config_validation():
    with pytest.raises(ConfigError):
        TrialConfig(m=1, r=2)
    with pytest.raises(ConfigError):
        config_from_dict({"m": 3, "r": 1, "typo": 1})
    with pytest.raises(ConfigError):
        TrialConfig(m=3, r=1, check="lemma3", k=3)


def test_load_configs_shapes(tmp_path):
    one = {"m": 3, "r": 1, "trials": 2}
    for doc in (one, [one], {"suite": [one]}):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(doc))
        assert load_configs(path)[0].m == 3


def test_empty_config_passes(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    reports, passed = run_suite(load_configs(path), baselines={})
    assert reports == [] and passed


@pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"main": {"2,0": -1}}',
                                  '{"main": {"2,0": "big"}}'])
def test_corrupted_baseline(tmp_path, text):
    path = tmp_path / "b.json"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_baselines(path)


def test_committed_baselines_load():
    table = load_baselines()
    assert "main" in table and "2,0" in table["main"]


def test_determinism(tmp_path):
    cfg = TrialConfig(m=3, r=1, seed=3, **SMALL)
    a = run_config(cfg, baselines={})[0]
    b = run_config(cfg, baselines={})[0]
    assert a.csv_text() == b.csv_text()
    assert a.summary(deterministic=True) == b.summary(deterministic=True)
    a.write(tmp_path / "a", deterministic=True)
    b.write(tmp_path / "b", deterministic=True)
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_threads_do_not_change_results(monkeypatch):
    cfg = TrialConfig(m=4, r=1, seed=8, **SMALL)
    serial = run_config(cfg, baselines={})[0].csv_text()
    monkeypatch.setenv("DIVLAB_THREADS", "2")
    assert run_config(cfg, baselines={})[0].csv_text() == serial


def test_missing_baseline_fails_with_note():
    rep = run_config(TrialConfig(m=2, r=0, **SMALL), baselines={})[0]
    assert not rep.passed
    assert "no committed baseline" in rep.notes


def test_baseline_roundtrip(tmp_path):
    cfg = TrialConfig(m=3, r=0, **SMALL)
    path = tmp_path / "b.json"
    reps = run_config(cfg, baselines={})
    save_baselines(reps, path)
    rep = run_config(cfg, baselines=load_baselines(path))[0]
    assert rep.passed and rep.limit == pytest.approx(1.05 * rep.max_ratio)


def test_theorem_sides_reject_high_multiplicity():
    with pytest.raises(DomainError):
        theorem_sides(KnotSet.parse("0,0,0,1"), corpus_lookup("exp"), 1)


def test_theorem_sides_on_polynomial_are_zero():
    lhs, rhs, _ = theorem_sides(KnotSet.parse("0,0.3,0.3,1"), corpus_lookup("x^2"), 1,
                                grid_x=256, grid_u=64)
    assert lhs == 0.0


def test_lemma3_single_instance():
    X = KnotSet.parse("0,0.2,0.5,0.9,1")
    lhs, rhs, ok = check_lemma3(X, 1, (0, 2), PowerModulus(0.8, declared_domain=8.0))
    assert ok and 0 < lhs <= rhs


def test_lemma3_rejects_wide_pair():
    with pytest.raises(DomainError):
        check_lemma3(KnotSet.parse("0,0.5,1"), 0, (0, 2), PowerModulus(1.0))


def test_lemma4_reflection_identity():
    X = KnotSet.parse("0,0.1,0.45,1")
    out = check_lemma4(X, 1, PowerModulus(1.3, declared_domain=8.0))
    assert out["reflection_error"] <= 1e-12


def test_cor55_worked_instance():
    # Z = {-1, 1} doubled, f = x^4, interpolant 2x^2 - 1, error 1 at the origin
    X = KnotSet.parse("-1,-1,1,1")
    s = interp_sides(X, corpus_lookup("x^4"), 1, np.array([0.0, -1.0, 1.0]), "full",
                     grid_x=256, grid_u=64)
    assert s["lhs"][0] == 1.0
    assert s["lhs"][1] == 0.0 and s["lhs"][2] == 0.0
    assert s["net"][0] <= 1.0
    assert s["knot_failures"] == 0


def test_interp_precondition_names_index():
    X = KnotSet.parse("0,0,0.5,1")
    with pytest.raises(PreconditionError, match="j=0"):
        interp_sides(X, corpus_lookup("exp"), 0, np.linspace(0, 1, 9), "pointwise")


def test_full_variant_needs_uniform_multiplicity():
    with pytest.raises(PreconditionError):
        interp_sides(KnotSet.parse("0,0,0.5,1,1"), corpus_lookup("exp"), 1,
                     np.linspace(0, 1, 9), "full")


def test_small_suite_every_check():
    cfgs = [
        TrialConfig(m=2, r=1, check="lemma_k1", **SMALL),
        TrialConfig(m=3, r=1, k=2, check="lemma3", **SMALL),
        TrialConfig(m=4, r=1, k=3, check="lemma4", **SMALL),
        TrialConfig(m=4, r=1, check="interp", variant="pointwise", **SMALL),
    ]
    for cfg in cfgs:
        for rep in run_config(cfg, baselines={}):
            assert not any(np.isinf(rep.ratios)), rep.name
