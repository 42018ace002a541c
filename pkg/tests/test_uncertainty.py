import numpy as np
import pytest

from dictpair.common import GuardExceeded
from dictpair.dictionaries import (
    Dictionary,
    build_dirac_fourier,
    build_random_pair,
    concatenate_pair,
)
from dictpair.thresholds import CoherenceTriple
from dictpair.uncertainty import (
    dual_representation,
    exhaustive_uncertainty_scan,
    scan_csv_lines,
    uncertainty_lower_bound,
    verify_representation,
)


def test_bound_orthonormal_parts():
    t = CoherenceTriple(0.0, 0.0, 0.5)
    assert uncertainty_lower_bound(2, 2, t) == pytest.approx(4.0, abs=1e-12)


def test_bound_trivial_case_excluded():
    t = CoherenceTriple(0.0, 0.0, 0.5)
    with pytest.raises(ValueError, match="trivial"):
        uncertainty_lower_bound(0, 0, t)


def test_bound_single_pair_at_full_coherence():
    t = CoherenceTriple(0.0, 0.0, 1.0)
    assert uncertainty_lower_bound(1, 1, t) == pytest.approx(1.0)


def test_bound_degenerate_na_zero():
    # with na = 0 the relation 0 >= rhs forces the positive part to vanish,
    # i.e. nb >= 1 + 1/mu_b = 3.5: three atoms infeasible, four feasible
    t = CoherenceTriple(0.1, 0.4, 0.5)
    assert uncertainty_lower_bound(0, 3, t) > 0.0
    assert uncertainty_lower_bound(0, 4, t) == 0.0


def comb_representation(d, spikes):
    """Spike comb on the Dirac side and its exact Fourier-side coefficients."""
    pair = build_dirac_fourier(d)
    p = np.zeros(d, dtype=complex)
    p[list(spikes)] = 1.0
    s = pair.part_a.entries @ p
    # Fourier side: solve exactly (unitary basis)
    q = pair.part_b.entries.conj().T @ s
    return pair, p, q


def test_comb_equality_case():
    pair, p, q = comb_representation(4, (0, 2))
    rep = dual_representation(pair, p, q)
    assert rep.na == 2 and rep.nb == 2
    t = CoherenceTriple(pair.mu_a, pair.mu_b, pair.mu)
    rhs = uncertainty_lower_bound(rep.na, rep.nb, t)
    assert rep.na * rep.nb == pytest.approx(rhs, abs=1e-9)
    assert verify_representation(pair, rep)


def test_random_representations_always_verify():
    # the relation is a theorem: any consistent representation satisfies it
    rng = np.random.default_rng(5)
    for seed in range(25):
        pair = build_random_pair(4, 6, 6, seed=seed)
        p = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        p[rng.permutation(6)[:3]] = 0.0
        s = pair.part_a.entries @ p
        q, *_ = np.linalg.lstsq(pair.part_b.entries, s, rcond=None)
        if np.linalg.norm(pair.part_b.entries @ q - s) > 1e-10:
            continue  # not representable on the B side; not a dual instance
        rep = dual_representation(pair, p, q)
        assert verify_representation(pair, rep)


def test_inconsistent_representation_rejected():
    pair = build_dirac_fourier(4)
    p = np.zeros(4, dtype=complex)
    p[0] = 1.0
    q = np.zeros(4, dtype=complex)
    q[1] = 5.0
    with pytest.raises(ValueError, match="disagree"):
        dual_representation(pair, p, q)


def test_null_space_representation_of_b():
    # three coplanar unit vectors: angles 0/60/120 degrees are dependent with
    # all three coefficients nonzero, witnessing the nb >= 1 + 1/mu_b branch
    ang = np.deg2rad([0.0, 60.0, 120.0])
    b = np.vstack([np.cos(ang), np.sin(ang)]).astype(complex)
    pair = concatenate_pair(
        Dictionary(np.eye(2, dtype=complex), "id2"),
        Dictionary(b, "coplanar"),
    )
    q = np.array([1.0, -1.0, 1.0], dtype=complex)
    assert np.linalg.norm(b @ q) < 1e-12
    rep = dual_representation(pair, np.zeros(2, dtype=complex), q)
    assert rep.na == 0 and rep.nb == 3
    assert np.all(rep.common == 0.0)
    assert rep.nb >= 1 + 1.0 / pair.mu_b - 1e-9
    assert verify_representation(pair, rep)


def test_scan_dirac_fourier_four():
    pair = build_dirac_fourier(4)
    rows = exhaustive_uncertainty_scan(pair, 2, 2)
    achieved = {(r.na, r.nb) for r in rows if r.achieved}
    assert achieved == {(2, 2)}
    assert all(not r.violates for r in rows)


def test_scan_dirac_fourier_nine():
    pair = build_dirac_fourier(9)
    rows = exhaustive_uncertainty_scan(pair, 3, 3)
    achieved = {(r.na, r.nb) for r in rows if r.achieved}
    assert achieved == {(3, 3)}
    assert all(r.na * r.nb >= 9 - 1e-9 for r in rows if r.achieved)
    assert all(not r.violates for r in rows)


def test_scan_random_pairs_no_violations():
    for seed in range(8):
        pair = build_random_pair(4, 6, 6, seed=100 + seed)
        rows = exhaustive_uncertainty_scan(pair, 3, 3)
        assert all(not r.violates for r in rows)


def test_scan_guard():
    pair = build_random_pair(6, 20, 20, seed=0)
    with pytest.raises(GuardExceeded):
        exhaustive_uncertainty_scan(pair, 10, 10)


def test_scan_rows_canonical_order_and_csv():
    pair = build_dirac_fourier(4)
    rows = exhaustive_uncertainty_scan(pair, 2, 3)
    assert [(r.na, r.nb) for r in rows] == [
        (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)
    ]
    lines = scan_csv_lines(rows)
    assert lines[0] == "na,nb,achieved,min_bound_rhs"
    assert lines[5].startswith("2,2,1,")
