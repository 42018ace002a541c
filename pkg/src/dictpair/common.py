"""Shared numerical conventions: rank decisions, support counting, enumeration guards.

A single pair of cutoffs is used everywhere so that "linearly dependent"
and "nonzero coefficient" mean the same thing in every module.
"""

from __future__ import annotations

import numpy as np

# sigma_min / sigma_max at or below this declares a column set rank-deficient
RANK_REL_TOL = 1e-8

# |x_i| above this fraction of max|x| counts as a nonzero coefficient
SUPPORT_REL_TOL = 1e-10

# hard ceiling on combinatorial enumerations
COMBINATION_GUARD = 10_000_000


class GuardExceeded(RuntimeError):
    """Raised when a brute-force enumeration would exceed the combination guard."""


def check_combination_guard(count: int, what: str) -> None:
    if count > COMBINATION_GUARD:
        raise GuardExceeded(
            f"{what}: {count} combinations exceed the guard of {COMBINATION_GUARD}"
        )


def as_complex_matrix(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array of dictionary entries")
    return m


def nonzero_indices(x, rel_tol: float = SUPPORT_REL_TOL) -> np.ndarray:
    """Indices of entries exceeding ``rel_tol * max|x|`` in magnitude."""
    x = np.asarray(x)
    mags = np.abs(x)
    peak = mags.max() if mags.size else 0.0
    if peak == 0.0:
        return np.empty(0, dtype=int)
    return np.flatnonzero(mags > rel_tol * peak)


def nonzero_count(x, rel_tol: float = SUPPORT_REL_TOL) -> int:
    return int(nonzero_indices(x, rel_tol).size)


def singular_values(m) -> np.ndarray:
    return np.linalg.svd(np.asarray(m, dtype=np.complex128), compute_uv=False)


def smallest_singular(m) -> float:
    s = singular_values(m)
    return float(s[-1]) if s.size else 0.0


def is_rank_deficient(m, rel_tol: float = RANK_REL_TOL) -> bool:
    """True when sigma_min <= rel_tol * sigma_max (columns linearly dependent)."""
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return True
    cols = np.shape(m)[1]
    if cols > np.shape(m)[0]:
        return True
    return bool(s[-1] <= rel_tol * s[0])
