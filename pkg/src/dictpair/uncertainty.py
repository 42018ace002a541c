"""Uncertainty relation for one signal represented in both halves of a pair.

If a vector s can be written with na atoms of A and, equivalently, nb atoms
of B, then

    na * nb >= (1 - mu_a (na-1))_+ (1 - mu_b (nb-1))_+ / mu^2

where (u)_+ = max(0, u). The degenerate readings na = 0 (s = 0, a kernel
vector of B) and nb = 0 follow from the same inequality.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .common import (
    SUPPORT_REL_TOL,
    check_combination_guard,
    nonzero_count,
)
from .dictionaries import ConcatDictionary
from .thresholds import CoherenceTriple

# ||A p - s|| allowed before a representation is rejected as inconsistent
REPRESENTATION_TOL = 1e-8

# null-space vector halves must carry at least this norm to witness a pair
HALF_NORM_TOL = 1e-6

# singular values at or below this count as zero in the intersection test
INTERSECTION_TOL = 1e-8

# slack when comparing na*nb against the bound (covers roundoff at equality)
BOUND_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DualRepresentation:
    """One signal written in both sub-dictionaries: common = A coeffs_a = B coeffs_b."""

    coeffs_a: np.ndarray
    coeffs_b: np.ndarray
    common: np.ndarray
    na: int
    nb: int


def dual_representation(pair: ConcatDictionary, coeffs_a, coeffs_b) -> DualRepresentation:
    """Validate coefficients and package them with their support sizes.

    Raises when A coeffs_a and B coeffs_b disagree beyond tolerance, when a
    zero support count comes with a nonzero signal, or when both counts are
    zero.
    """
    p = np.asarray(coeffs_a, dtype=np.complex128).reshape(-1)
    q = np.asarray(coeffs_b, dtype=np.complex128).reshape(-1)
    if p.size != pair.n_a or q.size != pair.n_b:
        raise ValueError("coefficient lengths must match the two parts")
    sa = pair.part_a.entries @ p
    sb = pair.part_b.entries @ q
    if np.linalg.norm(sa - sb) > REPRESENTATION_TOL:
        raise ValueError("A-side and B-side representations disagree")
    na = nonzero_count(p, SUPPORT_REL_TOL)
    nb = nonzero_count(q, SUPPORT_REL_TOL)
    if na == 0 and nb == 0:
        raise ValueError("trivial case excluded")
    common = 0.5 * (sa + sb)
    if na == 0 or nb == 0:
        if np.linalg.norm(common) > REPRESENTATION_TOL:
            raise ValueError("zero-support side must come with the zero signal")
        common = np.zeros_like(common)
    return DualRepresentation(p, q, common, na, nb)


def uncertainty_lower_bound(na: int, nb: int, t: CoherenceTriple) -> float:
    """Right-hand side (1-mu_a(na-1))_+ (1-mu_b(nb-1))_+ / mu^2."""
    if na < 0 or nb < 0:
        raise ValueError("support sizes must be nonnegative")
    if na == 0 and nb == 0:
        raise ValueError("trivial case excluded")
    pos_a = max(0.0, 1.0 - t.mu_a * (na - 1))
    pos_b = max(0.0, 1.0 - t.mu_b * (nb - 1))
    return pos_a * pos_b / (t.mu * t.mu)


def verify_representation(pair: ConcatDictionary, rep: DualRepresentation) -> bool:
    """True iff the representation's support sizes satisfy the relation."""
    sa = pair.part_a.entries @ rep.coeffs_a
    sb = pair.part_b.entries @ rep.coeffs_b
    if (np.linalg.norm(sa - rep.common) > REPRESENTATION_TOL
            or np.linalg.norm(sb - rep.common) > REPRESENTATION_TOL):
        raise ValueError("representation inconsistent with its common signal")
    triple = CoherenceTriple(pair.mu_a, pair.mu_b, pair.mu)
    rhs = uncertainty_lower_bound(rep.na, rep.nb, triple)
    return rep.na * rep.nb >= rhs - BOUND_SLACK


@dataclass(frozen=True)
class ScanRow:
    na: int
    nb: int
    achieved: bool
    bound_rhs: float

    @property
    def violates(self) -> bool:
        return self.achieved and self.na * self.nb < self.bound_rhs - BOUND_SLACK


SCAN_HEADER = "na,nb,achieved,min_bound_rhs"


def _nontrivial_intersection(a_cols: np.ndarray, b_cols: np.ndarray) -> bool:
    """Common nonzero signal test via the kernel of [A_S, -B_S].

    The kernel is nontrivial when the trailing singular value vanishes;
    a kernel basis whose A-half and B-half both carry norm above the cutoff
    certifies a shared signal (a combination of basis vectors keeps both
    halves nonzero whenever each half is nonzero somewhere in the kernel).
    """
    block = np.concatenate([a_cols, -b_cols], axis=1)
    d, m = block.shape
    _, svals, vh = np.linalg.svd(block)
    null_rows = [vh[k] for k in range(min(d, m), m)]
    null_rows.extend(vh[k] for k in range(min(d, m)) if svals[k] <= INTERSECTION_TOL)
    if not null_rows:
        return False
    basis = np.array(null_rows)
    na = a_cols.shape[1]
    a_mass = float(np.max(np.linalg.norm(basis[:, :na], axis=1)))
    b_mass = float(np.max(np.linalg.norm(basis[:, na:], axis=1)))
    return a_mass >= HALF_NORM_TOL and b_mass >= HALF_NORM_TOL


def exhaustive_uncertainty_scan(
    pair: ConcatDictionary, max_na: int, max_nb: int
) -> list[ScanRow]:
    """For every support-size pair (na, nb) up to the caps, report whether
    some support pair of those sizes shares a nonzero signal.

    Deduplicates by support size: achieved means at least one pair of
    supports admits a common signal. Support sizes upper-bound the sizes of
    minimal representations, which is the conservative direction for
    checking the relation.
    """
    if max_na < 1 or max_nb < 1:
        raise ValueError("size caps must be at least 1")
    max_na = min(max_na, pair.n_a)
    max_nb = min(max_nb, pair.n_b)
    check_combination_guard(
        math.comb(pair.n_a, max_na) * math.comb(pair.n_b, max_nb),
        "uncertainty scan",
    )
    a, b = pair.part_a.entries, pair.part_b.entries
    triple = CoherenceTriple(pair.mu_a, pair.mu_b, pair.mu)
    rows = []
    for na in range(1, max_na + 1):
        a_subsets = list(itertools.combinations(range(pair.n_a), na))
        for nb in range(1, max_nb + 1):
            found = False
            for sa in a_subsets:
                a_cols = a[:, sa]
                for sb in itertools.combinations(range(pair.n_b), nb):
                    if _nontrivial_intersection(a_cols, b[:, sb]):
                        found = True
                        break
                if found:
                    break
            rows.append(ScanRow(na, nb, found, uncertainty_lower_bound(na, nb, triple)))
    return rows


def scan_csv_lines(rows: list[ScanRow]) -> list[str]:
    lines = [SCAN_HEADER]
    for r in rows:
        lines.append(f"{r.na},{r.nb},{int(r.achieved)},{r.bound_rhs:.15g}")
    return lines
