import math

import numpy as np
import pytest

from dictpair.dictionaries import (
    build_dirac_fourier,
    build_mub_concat,
    build_random_pair,
)
from dictpair.probabilistic import (
    RandomSupportSpec,
    check_recovery_conditions,
    draw_coefficients,
    matched_gamma,
    randomized_recovery_experiment,
    sample_support,
    scaling_condition_report,
    sigma_min_tail_estimate,
    tail_bound_params,
    trial_seed,
    two_onb_robust_thresholds,
    wilson_interval,
)


def test_conditions_hand_value_mub5():
    pair = build_mub_concat(5, 1)
    rep = check_recovery_conditions(pair, 1, 1, s=1.0, gamma=0.5)
    expected = 6.0 * math.sqrt(2.0) * math.sqrt(math.log(30.0) / 5.0)
    assert rep.fixed_part_lhs == pytest.approx(expected, abs=1e-9)
    assert rep.fixed_part_rhs == pytest.approx(0.5 * math.exp(-0.25), abs=1e-15)
    assert not rep.fixed_part_ok  # stringent at desk scale
    assert not rep.in_force


def test_conditions_reject_zero_counts():
    pair = build_mub_concat(5, 1)
    with pytest.raises(ValueError):
        check_recovery_conditions(pair, 0, 1)
    with pytest.raises(ValueError):
        check_recovery_conditions(pair, 1, 1, s=0.5)
    with pytest.raises(ValueError):
        check_recovery_conditions(pair, 1, 1, gamma=1.5)


def test_sparsity_cap_boundary():
    # dirac-fourier with d=100 has coherence exactly 0.1: cap = mu^-2/2 = 50
    pair = build_dirac_fourier(100)
    ok = check_recovery_conditions(pair, 25, 25)
    assert ok.p0_sparsity_ok
    over = check_recovery_conditions(pair, 25, 26)
    assert not over.p0_sparsity_ok


def test_robust_thresholds_hand_value():
    mu = 1.0 / math.sqrt(64.0)
    p0, bp = two_onb_robust_thresholds(mu, 128, 1.0)
    expected = min(0.004212 * 64.0 / math.log(128.0), 32.0)
    assert p0 == pytest.approx(expected, abs=1e-12)
    assert p0 < 1.0  # the stated constant binds only at large scale
    assert bp <= p0


def test_robust_thresholds_ordering_and_domain():
    with pytest.raises(ValueError):
        two_onb_robust_thresholds(0.5, 2)
    rng = np.random.default_rng(2)
    for _ in range(50):
        mu = 0.05 + 0.9 * rng.random()
        n = int(rng.integers(3, 5000))
        s = 1.0 + 3.0 * rng.random()
        p0, bp = two_onb_robust_thresholds(mu, n, s)
        assert bp <= p0 + 1e-15


def test_robust_thresholds_log_scaling():
    # when the log-driven term binds, doubling sizes tracks mu^-2 / log N
    p0_small, _ = two_onb_robust_thresholds(1e-3, 10_000, 1.0)
    p0_big, _ = two_onb_robust_thresholds(1e-3 / math.sqrt(2.0), 20_000, 1.0)
    ratio = p0_big / p0_small
    expected = 2.0 * math.log(10_000.0) / math.log(20_000.0)
    assert ratio == pytest.approx(expected, rel=1e-9)


def test_sample_support_full_and_deterministic():
    spec = RandomSupportSpec(fixed_a=(0, 2), nb=25, seed=5)
    sup = sample_support(spec, 25)
    assert sup.in_b == tuple(range(25))
    assert sup.in_a == (0, 2)
    again = sample_support(spec, 25)
    assert sup == again
    other = sample_support(RandomSupportSpec((0, 2), 25, 6), 25)
    assert other == sup  # nb == N_b leaves nothing random


def test_sample_support_uniform_frequencies():
    counts = np.zeros(25)
    draws = 10_000
    for t in range(draws):
        spec = RandomSupportSpec(fixed_a=(), nb=1, seed=trial_seed(99, t))
        sup = sample_support(spec, 25)
        counts[sup.in_b[0]] += 1
    expected = draws / 25.0
    sd = math.sqrt(draws * (1.0 / 25.0) * (24.0 / 25.0))
    assert np.all(np.abs(counts - expected) <= 4.0 * sd)


def test_sigma_min_orthonormal_fixed_part():
    pair = build_mub_concat(5, 1)
    est = sigma_min_tail_estimate(pair, RandomSupportSpec((0, 1), 0, 3), 50)
    assert est.empirical_prob == 0.0
    assert np.all(est.sigma_mins == pytest.approx(1.0, abs=1e-12))
    assert not est.degenerate


def test_sigma_min_degenerate_flagged():
    pair = build_mub_concat(3, 1)
    est = sigma_min_tail_estimate(pair, RandomSupportSpec((0, 1, 2), 1, 3), 20)
    assert est.degenerate
    assert est.empirical_prob == 1.0  # more atoms than dimensions


def test_sigma_min_monotone_in_nb():
    pair = build_mub_concat(5, 1)
    probs = []
    for nb in range(1, 6):
        est = sigma_min_tail_estimate(pair, RandomSupportSpec((0,), nb, 11), 500)
        probs.append(est.empirical_prob)
    assert all(b >= a for a, b in zip(probs, probs[1:]))
    assert probs[0] == 0.0  # two atoms at coherence 1/sqrt(5) stay well-conditioned
    assert probs[-1] == 1.0  # six atoms in dimension five are dependent


def test_tail_bound_hand_values():
    pair = build_mub_concat(5, 1)
    tb = tail_bound_params(pair, 1, 1, s=1.0)
    assert tb.deviation == pytest.approx(math.sqrt(4.0 * math.log(30.0)), abs=1e-12)
    assert tb.failure_prob == pytest.approx(1.0 / 30.0, abs=1e-15)
    # na = 1 kills the fixed-part offset term
    expected_offset = 2.0 / 25.0 * 5.0 + math.sqrt(1.0 / 25.0) * 1.0 * math.sqrt(5.0)
    assert tb.offset == pytest.approx(expected_offset, abs=1e-9)
    assert not tb.within_half


def test_matched_gamma_equivalence_random_grid():
    rng = np.random.default_rng(17)
    pairs = [
        build_mub_concat(5, 1),
        build_mub_concat(7, 1),
        build_dirac_fourier(8),
        build_random_pair(6, 8, 10, seed=1),
    ]
    agreements = 0
    for k in range(120):
        pair = pairs[k % len(pairs)]
        na = int(rng.integers(1, 4))
        nb = int(rng.integers(1, 6))
        s = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        tb = tail_bound_params(pair, na, nb, s=s)
        gamma = matched_gamma(pair, na, nb, s=s)
        rep = check_recovery_conditions(pair, na, nb, s=s, gamma=gamma)
        lhs_sum = rep.fixed_part_lhs + rep.random_part_lhs
        if abs(lhs_sum - math.exp(-0.25)) <= 1e-12:
            continue  # razor edge
        assert rep.in_force == tb.within_half
        agreements += 1
    assert agreements >= 100


def test_scaling_report_mub_closed_forms():
    pair = build_mub_concat(5, 1)
    rep = scaling_condition_report(pair)
    logn = math.log(30.0)
    assert rep.r1 == pytest.approx(1.0, abs=1e-9)
    assert rep.r2 == pytest.approx(0.0, abs=1e-12)
    assert rep.r3 == pytest.approx(1.0 / logn, abs=1e-9)
    assert rep.r4 == pytest.approx(1.0, abs=1e-9)
    assert rep.r5 == pytest.approx(1.0 / logn, abs=1e-9)
    assert rep.r6 == pytest.approx(1.0 / logn, abs=1e-9)
    assert len(rep.rows()) == 6


def test_scaling_report_two_onb_trivial_parts():
    pair = build_dirac_fourier(9)
    rep = scaling_condition_report(pair)
    assert rep.r2 == pytest.approx(0.0, abs=1e-10)
    assert rep.r1 == pytest.approx(1.0, abs=1e-9)


def test_coefficient_models():
    rng = np.random.default_rng(0)
    g = draw_coefficients(rng, 1000, "gaussian")
    assert g.dtype == np.complex128
    u = draw_coefficients(rng, 1000, "unit-phase")
    assert np.allclose(np.abs(u), 1.0)
    with pytest.raises(ValueError):
        draw_coefficients(rng, 3, "bern")


def test_wilson_interval_sane():
    lo, hi = wilson_interval(90, 100)
    assert 0.8 < lo < 0.9 < hi < 0.97
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_experiment_single_atom_always_recovers():
    pair = build_dirac_fourier(8)
    result = randomized_recovery_experiment(
        pair, RandomSupportSpec((), 1, 21), trials=30
    )
    assert result.rates["bp"] == 1.0
    assert result.rates["omp"] == 1.0
    assert result.rates["p0"] == 1.0


def test_experiment_seeded_bit_for_bit():
    pair = build_mub_concat(3, 1)
    spec = RandomSupportSpec((0,), 1, 77)
    a = randomized_recovery_experiment(pair, spec, trials=25)
    b = randomized_recovery_experiment(pair, spec, trials=25, workers=4)
    assert a.records == b.records
    assert a.rates == b.rates


def test_experiment_below_condition_always_succeeds():
    pair = build_dirac_fourier(16)
    from dictpair.thresholds import bp_omp_condition
    assert bp_omp_condition(1, 2, pair.mu_b, pair.mu)
    result = randomized_recovery_experiment(
        pair, RandomSupportSpec((3,), 2, 5), trials=40, model="unit-phase"
    )
    assert result.rates["bp"] == 1.0
    assert result.rates["omp"] == 1.0


def test_experiment_csv_shape():
    pair = build_dirac_fourier(4)
    result = randomized_recovery_experiment(
        pair, RandomSupportSpec((), 1, 1), trials=5
    )
    lines = result.csv_lines()
    assert lines[0] == "trial,seed,na,nb,sigma_min,bp_success,omp_success,p0_success"
    assert len([ln for ln in lines if not ln.startswith("#")]) == 6
    assert any(ln.startswith("# bp_rate") for ln in lines)


def test_experiment_validates_inputs():
    pair = build_dirac_fourier(4)
    with pytest.raises(ValueError):
        randomized_recovery_experiment(pair, RandomSupportSpec((), 1, 1), trials=0)
    with pytest.raises(ValueError):
        randomized_recovery_experiment(
            pair, RandomSupportSpec((), 1, 1), trials=2, model="nope"
        )
