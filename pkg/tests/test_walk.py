import math
import random

import numpy as np
import pytest

from thurston import hypgeom as hg
from thurston import walk as wk
from thurston.construction import ThurstonRep
from thurston.errors import InputError
from thurston.words import ElementClass, parse_word

LOG_SILVER = math.log(3 + 2 * math.sqrt(2))


def measure(**atoms):
    return wk.MeasureSpec.from_mapping({k: v for k, v in atoms.items()})


def run(rep, spec, steps, traj=2, seed=0, stride=1):
    return wk.run_walk(rep, spec, wk.WalkConfig(steps, traj, seed, stride))


def test_validate_measure(rep9):
    spec, warns = wk.validate_measure(wk.uniform_measure(), rep9)
    assert warns == []
    assert wk.find_nonelementary_witness(spec, rep9) is not None
    _, warns = wk.validate_measure(measure(a=1.0), rep9)
    assert len(warns) == 1 and isinstance(warns[0], wk.NonElementarityUnverified)
    with pytest.raises(wk.BadProbabilitySum):
        wk.validate_measure(measure(a=0.5, b=0.4), rep9)
    with pytest.raises(wk.BadProbabilitySum):
        wk.validate_measure(measure(a=1.5, b=-0.5), rep9)
    with pytest.raises(wk.EmptySupport):
        wk.validate_measure(wk.MeasureSpec(()), rep9)


def test_validate_normalizes_within_tolerance(rep9):
    spec, _ = wk.validate_measure(measure(a=0.5, b=0.5 + 5e-10), rep9)
    assert math.fsum(spec.probs) == pytest.approx(1.0, abs=1e-15)


def test_measure_parsing(tmp_path):
    with pytest.raises(wk.UnreducedAtom):
        measure(aA=1.0)
    with pytest.raises(wk.ExplicitlyUnsupported):
        wk.MeasureSpec.from_dict({"atoms": {"a": 1.0}})
    with pytest.raises(InputError):
        wk.MeasureSpec.from_dict({"atoms": [{"word": "a"}]})
    with pytest.raises(InputError):
        wk.MeasureSpec.load(tmp_path / "missing.json")
    spec = wk.uniform_measure()
    assert wk.MeasureSpec.from_dict(spec.to_dict()) == spec


def test_walk_config_validation():
    with pytest.raises(InputError):
        wk.WalkConfig(0)
    with pytest.raises(InputError):
        wk.WalkConfig(10, seed=-1)
    assert wk.WalkConfig(10, record_stride=3).recorded_steps() == [3, 6, 9, 10]


def test_power_of_a_is_parabolic(rep9):
    spec = measure(a=1.0)
    config = wk.WalkConfig(5)
    assert wk.trajectory_words(rep9, spec, config, 0)[-1] == parse_word("aaaaa")
    recs = wk.sample_trajectory(rep9, spec, config, 0)
    assert [r.element_class for r in recs] == [ElementClass.CONJ_A] * 5
    assert all(r.log_lambda is None for r in recs)


def test_power_of_ab_at_mu_nine(rep9):
    recs = wk.sample_trajectory(rep9, measure(ab=1.0), wk.WalkConfig(3), 0)
    assert all(r.element_class is ElementClass.PSEUDO_ANOSOV for r in recs)
    assert recs[2].log_lambda == pytest.approx(3 * recs[0].log_lambda, rel=1e-12)


def test_determinism(rep4):
    spec = wk.uniform_measure()
    config = wk.WalkConfig(500, 3, 11, 7)
    assert wk.sample_trajectory(rep4, spec, config, 2) == wk.sample_trajectory(rep4, spec, config, 2)
    assert wk.sample_trajectory(rep4, spec, config, 1) != wk.sample_trajectory(rep4, spec, config, 2)


def test_threads_do_not_change_results(rep4):
    spec = wk.uniform_measure()
    config = wk.WalkConfig(300, 6, 5, 10)
    assert wk.run_walk(rep4, spec, config, threads=1) == wk.run_walk(rep4, spec, config, threads=3)


def test_deterministic_hyperbolic_drift(rep4):
    recs = run(rep4, measure(aB=1.0), 200, traj=3)
    d = wk.drift_estimate(recs)
    assert d.value == pytest.approx(LOG_SILVER, abs=1e-6)
    assert d.std_error == pytest.approx(0.0, abs=1e-12)
    fk = wk.fk_upper_bounds(recs)
    assert all(p.mean_n == pytest.approx(LOG_SILVER, abs=1e-6) for p in fk)
    rows = wk.spectral_report(recs, d.value)
    assert all(r.fraction_pa == 1.0 and r.mean_abs_deviation == pytest.approx(0.0, abs=1e-9) for r in rows)
    assert set(wk.last_non_pa_by_traj(recs).values()) == {0}


def test_parabolic_walk_has_sublinear_displacement(rep4):
    recs = run(rep4, measure(a=1.0), 10_000, traj=2, stride=100)
    fk = wk.fk_upper_bounds(recs)
    # d(o, a^n o) = log(n sqrt(mu)) + o(1)
    for p in fk:
        assert p.mean_n * p.n == pytest.approx(math.log(p.n * 2.0), abs=1e-3)
    assert fk[-1].mean_n < 1e-3
    mins = [p.running_min for p in fk]
    assert mins == sorted(mins, reverse=True)
    assert wk.drift_estimate(recs).value < 1e-3
    assert all(r.fraction_pa == 0.0 for r in wk.spectral_report(recs, 0.0))
    assert set(wk.last_non_pa_by_traj(recs).values()) == {10_000}


def test_uniform_walk_statistics(rep4):
    recs = run(rep4, wk.uniform_measure(), 1000, traj=200, seed=3, stride=50)
    d = wk.drift_estimate(recs)
    assert d.value > 3 * d.std_error
    assert wk.fk_upper_bounds(recs)[-1].running_min >= d.value - 3 * d.std_error


def test_record_invariants(rep4, rep9):
    for rep in (rep4, rep9):
        recs = run(rep, wk.uniform_measure(), 400, traj=5, seed=1)
        step = hg.teich_displacement(hg.rep_of_word(rep, parse_word("a")))
        by = {}
        for r in recs:
            by.setdefault(r.traj, []).append(r)
        for rows in by.values():
            prev = 0.0
            for r in rows:
                assert r.displacement <= prev + step + 1e-9
                prev = r.displacement
                assert r.cyclic_norm <= r.word_norm <= r.n
                if r.element_class is ElementClass.PSEUDO_ANOSOV and not r.near_parabolic:
                    assert r.log_lambda <= r.displacement + 1e-9
                    assert r.log_lambda >= 0.25 * math.log(r.cyclic_norm)


def test_records_are_coherent_with_matrices(rep9):
    spec = wk.uniform_measure()
    config = wk.WalkConfig(60, 1, 4)
    words = wk.trajectory_words(rep9, spec, config, 0)
    for r, w in zip(wk.sample_trajectory(rep9, spec, config, 0), words):
        hg.check_coherence(r.element_class, hg.rep_of_word(rep9, w))


def test_aggregation_is_order_independent(rep4):
    recs = run(rep4, wk.uniform_measure(), 300, traj=8, seed=2, stride=30)
    shuffled = recs[:]
    random.Random(0).shuffle(shuffled)
    assert wk.drift_estimate(recs) == wk.drift_estimate(shuffled)
    assert wk.fk_upper_bounds(recs) == wk.fk_upper_bounds(shuffled)
    assert wk.last_non_pa_by_traj(recs) == wk.last_non_pa_by_traj(shuffled)


def test_drift_needs_two_trajectories(rep4):
    with pytest.raises(wk.InsufficientTrajectories):
        wk.drift_estimate(run(rep4, wk.uniform_measure(), 10, traj=1))


def test_abelian_track(rep4):
    track = wk.abelian_track(wk.trajectory_words(rep4, measure(a=1.0), wk.WalkConfig(6), 0))
    assert track == [(n, 0) for n in range(1, 7)]
    track = wk.abelian_track(wk.trajectory_words(rep4, measure(abAB=0.5, BAba=0.5), wk.WalkConfig(20), 0))
    assert set(track) == {(0, 0)}


def test_abelian_track_matches_simple_random_walk(rep4):
    n, M = 100, 400
    config = wk.WalkConfig(n, M, 8, n)
    finals = np.array([
        wk.abelian_track(wk.trajectory_words(rep4, wk.uniform_measure(), config, t))[-1] for t in range(M)
    ])
    # each coordinate moves with probability 1/2 per step: mean 0, variance n/2
    for col in finals.T:
        assert abs(col.mean()) < 5 * math.sqrt(n / 2 / M)
        assert col.var(ddof=1) == pytest.approx(n / 2, rel=0.3)


def test_csv_roundtrip(tmp_path, rep4):
    recs = run(rep4, wk.uniform_measure(), 50, traj=2, seed=9, stride=5)
    recs += run(rep4, measure(a=1.0), 3, traj=2)
    path = tmp_path / "walk.csv"
    wk.write_walk_csv(path, recs)
    back = wk.read_walk_csv(path)
    assert [(r.traj, r.n, r.word_norm, r.cyclic_norm, r.element_class, r.log_lambda, r.displacement) for r in back] == [
        (r.traj, r.n, r.word_norm, r.cyclic_norm, r.element_class, r.log_lambda, r.displacement) for r in recs
    ]
    assert path.read_text().splitlines()[0] == ",".join(wk.CSV_HEADER)


def test_bers_ties_are_not_violations(rep4):
    # (a b^-1)^n is symmetric: displacement equals log lambda exactly
    spec = measure(aB=1.0)
    config = wk.WalkConfig(40, 2, 0)
    recs = wk.run_walk(rep4, spec, config)
    assert wk.bers_violations(rep4, spec, config, recs) == []
    fake = wk.StepRecord(0, 1, 2, 2, ElementClass.PSEUDO_ANOSOV, 5.0, 1.0)
    assert wk.bers_violations(rep4, spec, config, [fake]) == [fake]
    # a one-ulp excess is checked against the actual position word
    r = recs[0]
    nudged = wk.StepRecord(r.traj, r.n, r.word_norm, r.cyclic_norm, r.element_class,
                           math.nextafter(r.displacement, math.inf), r.displacement)
    assert wk.bers_violations(rep4, spec, config, [nudged]) == []
