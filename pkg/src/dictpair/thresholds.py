"""Closed-form sparsity thresholds for general and concatenated-pair dictionaries.

All thresholds are returned as real numbers, never floored: a sparsity level
k guarantees recovery when k < value, matching the strict inequalities the
formulas come with. mu is the coherence of the full dictionary, mu_a and mu_b
the coherences of the two sub-dictionaries, ordered mu_a <= mu_b <= mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

ORDER_TIE_TOL = 1e-12

# measured sub-dictionary coherence at or below this counts as orthonormal
ORTHONORMAL_TOL = 1e-12

SQRT2 = math.sqrt(2.0)


def orthonormal_parts(t: "CoherenceTriple") -> bool:
    """True when both sub-dictionaries are orthonormal systems up to roundoff."""
    return t.mu_b <= ORTHONORMAL_TOL


def _check_mu(mu: float) -> None:
    if not 0.0 < mu <= 1.0:
        raise ValueError("coherence must lie in (0, 1]")


@dataclass(frozen=True)
class CoherenceTriple:
    """(mu_a, mu_b, mu) with 0 <= mu_a <= mu_b <= mu <= 1 and mu > 0.

    Ordering violations within 1e-12 are treated as ties and clipped so the
    stored values satisfy the ordering exactly.
    """

    mu_a: float
    mu_b: float
    mu: float

    def __post_init__(self):
        mu_a, mu_b, mu = float(self.mu_a), float(self.mu_b), float(self.mu)
        if not 0.0 < mu <= 1.0 + ORDER_TIE_TOL:
            raise ValueError("coherence mu must lie in (0, 1]")
        if mu_a < 0.0 or mu_b < 0.0:
            raise ValueError("sub-dictionary coherences must be nonnegative")
        if mu_a > mu_b + ORDER_TIE_TOL or mu_b > mu + ORDER_TIE_TOL:
            raise ValueError("need muA <= muB <= mu")
        mu = min(mu, 1.0)
        mu_b = min(mu_b, mu)
        mu_a = min(mu_a, mu_b)
        object.__setattr__(self, "mu_a", mu_a)
        object.__setattr__(self, "mu_b", mu_b)
        object.__setattr__(self, "mu", mu)

    @property
    def symmetric(self) -> bool:
        return self.mu_a == self.mu_b


def threshold_general_p0(mu: float) -> float:
    """(1 + 1/mu)/2: sparsity below this is uniquely recoverable in any
    dictionary of coherence mu, by any of the three solvers."""
    _check_mu(mu)
    return 0.5 * (1.0 + 1.0 / mu)


def threshold_two_onb(mu: float) -> tuple[float, float]:
    """Union-of-two-orthonormal-bases thresholds (p0, bp) = (1/mu, (sqrt2-0.5)/mu)."""
    _check_mu(mu)
    return 1.0 / mu, (SQRT2 - 0.5) / mu


def threshold_two_onb_refined(mu: float) -> float:
    """Two-ONB BP/OMP threshold that never drops below the general one.

    (sqrt2 - 0.5)/mu for mu < 1/sqrt2, else 1 + (1 - mu)/(2 mu^2).
    """
    _check_mu(mu)
    if mu < 1.0 / SQRT2:
        return (SQRT2 - 0.5) / mu
    return 1.0 + (1.0 - mu) / (2.0 * mu * mu)


@dataclass(frozen=True)
class PairP0Threshold:
    """Uniqueness threshold for a concatenated pair, with the minimizer data.

    The threshold is (f(x)+x)/2 minimized over the admissible interval;
    x_boundary solves f(x)=1, x_stationary is the stationary point of f(x)+x,
    and x_solution = min of the two is where the minimum is attained.
    """

    value: float
    x_boundary: float
    x_stationary: float
    x_solution: float


def threshold_pair_p0(t: CoherenceTriple) -> PairP0Threshold:
    """Sparsity threshold guaranteeing a unique sparsest representation in [A B].

    Reduces to (1 + 1/mu)/2 when mu_b = mu or mu = 1, and to 1/mu for a pair
    of orthonormal systems (mu_a = mu_b = 0); strictly better than the
    general threshold everywhere else.
    """
    mu_a, mu_b, mu = t.mu_a, t.mu_b, t.mu
    x_boundary = (1.0 + mu_b) / (mu_b + mu * mu)
    den = mu * mu - mu_a * mu_b
    if den == 0.0:
        # given the ordering this forces mu_a = mu_b = mu
        if not (mu_a == mu_b == mu):
            raise AssertionError("mu^2 == muA*muB away from the fully tied case")
        x_stationary = 1.0 / mu
    else:
        x_stationary = (
            mu * math.sqrt((1.0 + mu_a) * (1.0 + mu_b)) - mu_a * (1.0 + mu_b)
        ) / den
    x_solution = min(x_boundary, x_stationary)

    def f(x: float) -> float:
        return ((1.0 + mu_a) * (1.0 + mu_b) - x * mu_b * (1.0 + mu_a)) / (
            x * den + mu_a * (1.0 + mu_b)
        )

    value = 0.5 * (f(x_solution) + x_solution)
    return PairP0Threshold(value, x_boundary, x_stationary, x_solution)


def threshold_pair_symmetric(mu_b: float, mu: float) -> float:
    """(1 + mu_b)/(mu + mu_b): the pair threshold when both parts share mu_b."""
    _check_mu(mu)
    if not 0.0 <= mu_b <= mu + ORDER_TIE_TOL:
        raise ValueError("need 0 <= muB <= mu")
    mu_b = min(mu_b, mu)
    return (1.0 + mu_b) / (mu + mu_b)


def bp_omp_condition(na: int, nb: int, mu_b: float, mu: float) -> bool:
    """Sufficient condition for BP and OMP to recover a signal with na atoms
    in A and nb atoms in B:

        2 na (1+mu_b) mu_b + nb (1+mu_b)(mu+mu_b) + 2 na nb (mu^2-mu_b^2)
            < (1+mu_b)^2

    The roles of na and nb are swapped internally when na > nb.
    """
    _check_mu(mu)
    if na < 0 or nb < 0:
        raise ValueError("atom counts must be nonnegative")
    if not 0.0 <= mu_b <= mu + ORDER_TIE_TOL:
        raise ValueError("need 0 <= muB <= mu")
    mu_b = min(mu_b, mu)
    if na > nb:
        na, nb = nb, na
    one = 1.0 + mu_b
    lhs = (
        2.0 * na * one * mu_b
        + nb * one * (mu + mu_b)
        + 2.0 * na * nb * (mu * mu - mu_b * mu_b)
    )
    return lhs < one * one


@dataclass(frozen=True)
class PairBpOmpThreshold:
    """Two-branch BP/OMP threshold; the steeper branch is active when the
    case indicator exceeds 1 (infinite indicator flags the tied mu_b = mu
    case, which is routed to the flat branch analytically)."""

    value: float
    case_indicator: float


def threshold_pair_bp_omp(mu_b: float, mu: float) -> PairBpOmpThreshold:
    """Overall-sparsity threshold under which BP and OMP recover the unique
    sparsest representation in [A B]; depends on mu_b and mu only.

    With c1 = 2 sqrt(2) sqrt(mu (mu_b + mu)) the threshold is

        (1+mu_b) (c1 - (mu + 3 mu_b)) / (2 (mu^2 - mu_b^2))

    when mu_b < mu and the case indicator
    (1+mu_b)(c1 - 4 mu_b) / (4 (mu^2 - mu_b^2)) exceeds 1, and

        (1 + 2 mu^2 + 3 mu_b - mu (1+mu_b)) / (2 (mu^2 + mu_b))

    otherwise. At mu_b = mu both the indicator and the first branch are
    0/0; the second branch applies and equals (1 + 1/mu)/2 there.
    """
    _check_mu(mu)
    if not 0.0 <= mu_b <= mu + ORDER_TIE_TOL:
        raise ValueError("need 0 <= muB <= mu")
    mu_b = min(mu_b, mu)
    flat = (1.0 + 2.0 * mu * mu + 3.0 * mu_b - mu * (1.0 + mu_b)) / (
        2.0 * (mu * mu + mu_b)
    )
    if mu - mu_b <= ORDER_TIE_TOL:
        return PairBpOmpThreshold(flat, math.inf)
    c1 = 2.0 * SQRT2 * math.sqrt(mu * (mu_b + mu))
    gap = mu * mu - mu_b * mu_b
    indicator = (1.0 + mu_b) * (c1 - 4.0 * mu_b) / (4.0 * gap)
    if indicator > 1.0:
        value = (1.0 + mu_b) * (c1 - (mu + 3.0 * mu_b)) / (2.0 * gap)
    else:
        value = flat
    return PairBpOmpThreshold(value, indicator)


@dataclass(frozen=True)
class ThresholdReport:
    """Every closed-form threshold evaluated at one coherence triple."""

    triple: CoherenceTriple
    general_p0: float
    two_onb_p0: float
    two_onb_bp: float
    two_onb_refined: float
    pair_p0: float
    x_boundary: float
    x_stationary: float
    x_solution: float
    pair_symmetric_p0: float | None
    pair_bp_omp: float
    case_indicator: float


def threshold_report(t: CoherenceTriple) -> ThresholdReport:
    p0, bp = threshold_two_onb(t.mu)
    pair = threshold_pair_p0(t)
    bpomp = threshold_pair_bp_omp(t.mu_b, t.mu)
    sym = threshold_pair_symmetric(t.mu_b, t.mu) if t.symmetric else None
    return ThresholdReport(
        triple=t,
        general_p0=threshold_general_p0(t.mu),
        two_onb_p0=p0,
        two_onb_bp=bp,
        two_onb_refined=threshold_two_onb_refined(t.mu),
        pair_p0=pair.value,
        x_boundary=pair.x_boundary,
        x_stationary=pair.x_stationary,
        x_solution=pair.x_solution,
        pair_symmetric_p0=sym,
        pair_bp_omp=bpomp.value,
        case_indicator=bpomp.case_indicator,
    )


@dataclass(frozen=True)
class SweepRow:
    mu_b: float
    general_p0: float
    pair_p0_sym: float
    pair_bp_omp: float
    two_onb_p0: float
    two_onb_bp: float


SWEEP_HEADER = "mu_b,general_p0,pair_p0_sym,pair_bp_omp,two_onb_p0,two_onb_bp"


def threshold_sweep_table(mu: float, grid_size: int) -> list[SweepRow]:
    """Sweep mu_b over [0, mu] inclusive and tabulate the symmetric-pair
    thresholds against the general and two-ONB baselines."""
    _check_mu(mu)
    if grid_size < 2:
        raise ValueError("grid must have at least the two endpoints")
    gen = threshold_general_p0(mu)
    onb_p0, onb_bp = threshold_two_onb(mu)
    rows = []
    for i in range(grid_size):
        mu_b = mu * i / (grid_size - 1)
        if i == grid_size - 1:
            mu_b = mu
        rows.append(
            SweepRow(
                mu_b=mu_b,
                general_p0=gen,
                pair_p0_sym=threshold_pair_symmetric(mu_b, mu),
                pair_bp_omp=threshold_pair_bp_omp(mu_b, mu).value,
                two_onb_p0=onb_p0,
                two_onb_bp=onb_bp,
            )
        )
    return rows


def sweep_csv_lines(rows: list[SweepRow]) -> list[str]:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                f"{v:.15g}"
                for v in (r.mu_b, r.general_p0, r.pair_p0_sym, r.pair_bp_omp,
                          r.two_onb_p0, r.two_onb_bp)
            )
        )
    return lines
