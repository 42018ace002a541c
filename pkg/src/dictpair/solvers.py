"""Sparse recovery solvers: exhaustive P0, orthogonal matching pursuit, and
basis pursuit, plus the exact recovery condition with its analytic bound.

All solvers work over the complex field. Recovery success is judged against
a known planted vector with relative l2 error at most 1e-6, which at desk
scale separates exact recovery from failure by many orders of magnitude.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .common import (
    SUPPORT_REL_TOL,
    check_combination_guard,
    is_rank_deficient,
    nonzero_indices,
)
from .dictionaries import ConcatDictionary, Dictionary

SUCCESS_REL_TOL = 1e-6

# least-squares fit counts as exact below this times ||y||
P0_FIT_TOL = 1e-8

# singular values below this times sigma_max are dropped in pseudo-inverses
PINV_CUTOFF = 1e-10


def _entries_and_split(obj: Dictionary | ConcatDictionary) -> tuple[np.ndarray, int]:
    if isinstance(obj, ConcatDictionary):
        return obj.full_matrix(), obj.n_a
    return obj.entries, obj.n


@dataclass(frozen=True)
class Support:
    """Index sets into the two halves of a concatenated dictionary.

    For a plain dictionary everything lives in the A half.
    """

    in_a: tuple[int, ...]
    in_b: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.in_a) + len(self.in_b)

    def global_indices(self, split: int) -> tuple[int, ...]:
        return tuple(self.in_a) + tuple(split + j for j in self.in_b)


def support_from_global(indices, split: int) -> Support:
    idx = sorted(int(i) for i in indices)
    return Support(
        in_a=tuple(i for i in idx if i < split),
        in_b=tuple(i - split for i in idx if i >= split),
    )


def support_of(coefficients, split: int, rel_tol: float = SUPPORT_REL_TOL) -> Support:
    return support_from_global(nonzero_indices(coefficients, rel_tol), split)


@dataclass(frozen=True, eq=False)
class SparseSignal:
    coefficients: np.ndarray
    support: Support


def sparse_signal(coefficients, split: int) -> SparseSignal:
    c = np.asarray(coefficients, dtype=np.complex128).reshape(-1)
    return SparseSignal(c, support_of(c, split))


@dataclass(frozen=True, eq=False)
class RecoveryOutcome:
    solver: str
    recovered: np.ndarray
    success: bool
    iterations: int
    residual_norm: float


def exact_recovery(recovered, truth) -> bool:
    truth = np.asarray(truth)
    denom = np.linalg.norm(truth)
    if denom == 0.0:
        return bool(np.linalg.norm(recovered) == 0.0)
    return bool(np.linalg.norm(np.asarray(recovered) - truth) <= SUCCESS_REL_TOL * denom)


def _assess(solver, recovered, truth, iterations, residual, converged=True):
    ok = converged and truth is not None and exact_recovery(recovered, truth)
    return RecoveryOutcome(solver, recovered, ok, iterations, float(residual))


# ---------------------------------------------------------------------------
# P0 by enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class P0Result:
    """Sparsest representation found by enumeration.

    When several supports of the minimal size fit, the lexicographically
    first is returned and `unique` is False; `fits` counts them.
    """

    coefficients: np.ndarray
    support: Support
    unique: bool
    fits: int
    residual_norm: float
    solves: int


def _fit_residuals(entries, combos, y, ynorm):
    """Exact least-squares residual norms for a batch of column subsets.

    Stacked singular value decompositions give each subset's column span
    (rank-aware); the residual is formed by direct subtraction, which keeps
    full precision for near-exact fits.
    """
    batch = entries[:, combos].transpose(1, 0, 2)  # (m, d, k)
    u, s, _ = np.linalg.svd(batch, full_matrices=False)
    keep = s > PINV_CUTOFF * np.maximum(s[:, :1], 1e-300)
    proj = u.conj().transpose(0, 2, 1) @ y  # (m, k)
    y_hat = u @ np.where(keep, proj, 0.0)[..., None]  # (m, d, 1)
    return np.linalg.norm(y[None, :] - y_hat[:, :, 0], axis=1)


def p0_bruteforce(
    obj: Dictionary | ConcatDictionary, y, max_k: int
) -> P0Result:
    """Minimize the support size subject to fitting y, by subset search.

    Scans supports of ascending size; at the first size with any exact fit
    (residual <= 1e-8 ||y||) every support of that size is examined so
    non-uniqueness can be flagged.
    """
    entries, split = _entries_and_split(obj)
    d, n = entries.shape
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if y.size != d:
        raise ValueError("measurement length must match the dictionary rows")
    if max_k < 0:
        raise ValueError("max_k must be nonnegative")
    max_k = min(max_k, n)
    check_combination_guard(math.comb(n, max_k), "p0 enumeration")
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        coeffs = np.zeros(n, dtype=np.complex128)
        return P0Result(coeffs, Support((), ()), True, 1, 0.0, 0)
    examined = 0
    for size in range(1, max_k + 1):
        combos = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), size)),
            dtype=np.intp,
        ).reshape(-1, size)
        chunk = max(1, 400_000 // (d * size))
        hit_rows: list[int] = []
        resids = np.empty(combos.shape[0])
        for lo in range(0, combos.shape[0], chunk):
            part = combos[lo : lo + chunk]
            res = _fit_residuals(entries, part, y, ynorm)
            resids[lo : lo + len(part)] = res
            hit_rows.extend(lo + i for i in np.flatnonzero(res <= P0_FIT_TOL * ynorm))
        examined += combos.shape[0]
        if hit_rows:
            subset = tuple(int(i) for i in combos[hit_rows[0]])
            cols = entries[:, subset]
            sol, *_ = np.linalg.lstsq(cols, y, rcond=PINV_CUTOFF)
            coeffs = np.zeros(n, dtype=np.complex128)
            coeffs[list(subset)] = sol
            return P0Result(
                coeffs,
                support_from_global(subset, split),
                unique=len(hit_rows) == 1,
                fits=len(hit_rows),
                residual_norm=float(resids[hit_rows[0]]),
                solves=examined,
            )
    raise ValueError(f"no sparse representation within max_k={max_k}")


# ---------------------------------------------------------------------------
# orthogonal matching pursuit
# ---------------------------------------------------------------------------

def omp(
    obj: Dictionary | ConcatDictionary,
    y,
    max_iter: int | None = None,
    residual_tol: float = 1e-12,
    truth=None,
) -> RecoveryOutcome:
    """Greedy pursuit: pick the atom most correlated with the residual,
    refit by least squares on the enlarged support, repeat.

    Correlation ties go to the lowest index, making runs deterministic.
    """
    entries, _ = _entries_and_split(obj)
    d, n = entries.shape
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if max_iter is None:
        max_iter = d
    if not 1 <= max_iter <= d:
        raise ValueError("max_iter must lie in [1, d]")
    ynorm = float(np.linalg.norm(y))
    coeffs = np.zeros(n, dtype=np.complex128)
    if ynorm == 0.0:
        return _assess("OMP", coeffs, truth, 0, 0.0)
    residual = y.copy()
    chosen: list[int] = []
    iterations = 0
    for _ in range(max_iter):
        corr = np.abs(entries.conj().T @ residual)
        pick = int(np.argmax(corr))  # argmax takes the lowest index on ties
        if pick not in chosen:
            chosen.append(pick)
        cols = entries[:, chosen]
        sol, *_ = np.linalg.lstsq(cols, y, rcond=PINV_CUTOFF)
        residual = y - cols @ sol
        iterations += 1
        if np.linalg.norm(residual) <= residual_tol * ynorm:
            break
    coeffs[chosen] = sol
    return _assess("OMP", coeffs, truth, iterations, np.linalg.norm(residual))


# ---------------------------------------------------------------------------
# basis pursuit
# ---------------------------------------------------------------------------

def _shrink(z: np.ndarray, tau: float) -> np.ndarray:
    """Complex soft threshold z * max(0, 1 - tau/|z|)."""
    mags = np.abs(z)
    scale = np.maximum(0.0, 1.0 - tau / np.where(mags > 0.0, mags, 1.0))
    return z * scale


def basis_pursuit(
    obj: Dictionary | ConcatDictionary,
    y,
    tol: float = 1e-9,
    max_iter: int = 50_000,
    rho: float = 1.0,
    truth=None,
) -> RecoveryOutcome:
    """Minimum-l1 representation of y by operator splitting.

    Alternates projection onto the affine set {x : Dx = y} with complex
    soft-thresholding (penalty parameter rho). Converged when successive
    sparse iterates differ by at most tol in l2 and the constraint residual
    is at most tol ||y||. Non-convergence is reported through success=False
    rather than an exception.
    """
    entries, _ = _entries_and_split(obj)
    d, n = entries.shape
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return _assess("BP", np.zeros(n, dtype=np.complex128), truth, 0, 0.0)
    if is_rank_deficient(entries.conj().T):
        raise ValueError("basis pursuit needs a full-row-rank dictionary")
    pinv = np.linalg.pinv(entries, rcond=PINV_CUTOFF)
    particular = pinv @ y

    def project(v):
        return v - pinv @ (entries @ v) + particular

    sparse = np.zeros(n, dtype=np.complex128)
    dual = np.zeros(n, dtype=np.complex128)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        feasible = project(sparse - dual)
        new_sparse = _shrink(feasible + dual, 1.0 / rho)
        dual = dual + feasible - new_sparse
        step = float(np.linalg.norm(new_sparse - sparse))
        sparse = new_sparse
        if step <= tol:
            if np.linalg.norm(entries @ sparse - y) <= tol * ynorm:
                converged = True
                break
    residual = float(np.linalg.norm(entries @ sparse - y))
    return _assess("BP", sparse, truth, iterations, residual, converged=converged)


# ---------------------------------------------------------------------------
# exact recovery condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErcReport:
    """Worst-case l1 statistic max_i ||pinv(D_S) d_i||_1 over columns outside S.

    Below 1, both BP and OMP recover every signal supported on S. The
    analytic bound dominates the statistic whenever its Neumann-series
    premise holds; it is +inf when not applicable (na > nb or premise
    failing).
    """

    max_l1: float
    analytic_bound: float
    satisfied: bool


def erc_check(pair: ConcatDictionary, support: Support) -> ErcReport:
    entries = pair.full_matrix()
    idx = list(support.global_indices(pair.n_a))
    if not idx:
        raise ValueError("support must be nonempty")
    cols = entries[:, idx]
    if is_rank_deficient(cols):
        raise ValueError("ERC undefined: dependent support")
    pinv = np.linalg.pinv(cols, rcond=PINV_CUTOFF)
    others = [i for i in range(entries.shape[1]) if i not in set(idx)]
    max_l1 = 0.0
    for i in others:
        max_l1 = max(max_l1, float(np.sum(np.abs(pinv @ entries[:, i]))))
    na, nb = len(support.in_a), len(support.in_b)
    bound = math.inf
    if na <= nb and pair.mu * nb + pair.mu_b * (na - 1) < 1.0:
        bound = erc_analytic_bound(na, nb, pair.mu_b, pair.mu)
    return ErcReport(max_l1, bound, max_l1 < 1.0)


def erc_analytic_bound(na: int, nb: int, mu_b: float, mu: float) -> float:
    """Closed-form ceiling on the ERC statistic for na atoms of A and nb of B:

        (mu_b c_a na + mu c_b nb) / (1 - mu (c_a na + c_b nb))

    with c_a = 1/((mu-mu_b) na + 1 + mu_b) and c_b likewise for nb. Valid
    when na <= nb and mu nb + mu_b (na - 1) < 1; the value is below 1
    exactly when the BP/OMP pair condition holds.
    """
    if na > nb:
        raise ValueError("need na <= nb (swap the roles of the parts)")
    if na < 0 or nb < 1:
        raise ValueError("need na >= 0 and nb >= 1")
    if not 0.0 <= mu_b <= mu <= 1.0 or mu <= 0.0:
        raise ValueError("need 0 <= muB <= mu <= 1 with mu > 0")
    if mu * nb + mu_b * (na - 1) >= 1.0:
        raise ValueError("Neumann condition fails")
    c_a = 1.0 / ((mu - mu_b) * na + 1.0 + mu_b)
    c_b = 1.0 / ((mu - mu_b) * nb + 1.0 + mu_b)
    denom = 1.0 - mu * (c_a * na + c_b * nb)
    if denom <= 0.0:
        raise AssertionError("series denominator nonpositive despite premise")
    return (mu_b * c_a * na + mu * c_b * nb) / denom


# ---------------------------------------------------------------------------
# signal files
# ---------------------------------------------------------------------------
#
# Plain text: first line N, then N lines "re im", then one line of global
# support indices (blank for the zero signal).

def save_signal(path, signal: SparseSignal, split: int) -> None:
    lines = [str(signal.coefficients.size)]
    for v in signal.coefficients:
        lines.append(f"{v.real:.17g} {v.imag:.17g}")
    lines.append(" ".join(str(i) for i in signal.support.global_indices(split)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_signal(path, split: int | None = None) -> SparseSignal:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh.readlines()]
    if not lines:
        raise ValueError("empty signal file")
    n = int(lines[0])
    if len(lines) < n + 1:
        raise ValueError("signal file too short")
    vals = []
    for ln in lines[1 : n + 1]:
        re, im = ln.split()
        vals.append(complex(float(re), float(im)))
    coeffs = np.array(vals, dtype=np.complex128)
    declared = []
    if len(lines) > n + 1 and lines[n + 1]:
        declared = [int(t) for t in lines[n + 1].split()]
    if split is None:
        split = n
    sig = sparse_signal(coeffs, split)
    if declared and tuple(sorted(declared)) != sig.support.global_indices(split):
        raise ValueError("declared support disagrees with the nonzero pattern")
    return sig
