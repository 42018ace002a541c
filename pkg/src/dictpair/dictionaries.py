"""Dictionaries, concatenated dictionary pairs, and their coherence measurements.

A dictionary is a d x N complex matrix whose columns (atoms) are unit-norm.
A concatenated pair [A B] carries three coherence parameters: the coherence
mu_a within A, mu_b within B, and the coherence mu of the full concatenation,
ordered mu_a <= mu_b <= mu by convention.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .common import RANK_REL_TOL, as_complex_matrix

# max |1 - ||column||_2| allowed on construction
NORM_TOL = 1e-10

# |mu_a - mu_b| at or below this counts as a tie (no reordering required)
COHERENCE_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Dictionary:
    """d x N complex matrix with unit-norm columns."""

    entries: np.ndarray
    label: str = "dict"

    def __post_init__(self):
        entries = as_complex_matrix(self.entries)
        d, n = entries.shape
        if d < 1 or n < 1:
            raise ValueError("dictionary must have at least one row and one column")
        norms = np.linalg.norm(entries, axis=0)
        err = float(np.max(np.abs(norms - 1.0)))
        if err > NORM_TOL:
            raise ValueError(f"columns must be unit norm; worst deviation {err:.3e}")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class ConcatDictionary:
    """Ordered pair of sub-dictionaries sharing the ambient dimension.

    Build through :func:`concatenate_pair`; the stored coherences are the
    measured ones and satisfy mu_a <= mu_b <= mu.
    """

    part_a: Dictionary
    part_b: Dictionary
    mu_a: float
    mu_b: float
    mu: float

    @property
    def d(self) -> int:
        return self.part_a.d

    @property
    def n_a(self) -> int:
        return self.part_a.n

    @property
    def n_b(self) -> int:
        return self.part_b.n

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    @property
    def label(self) -> str:
        return f"{self.part_a.label}+{self.part_b.label}"

    def full_matrix(self) -> np.ndarray:
        return np.concatenate([self.part_a.entries, self.part_b.entries], axis=1)


@dataclass(frozen=True)
class GramSummary:
    """Headline Gram-matrix statistics of one dictionary."""

    coherence: float
    welch_bound: float
    spectral_norm: float
    min_singular: float


def _gram(entries: np.ndarray) -> np.ndarray:
    return entries.conj().T @ entries


def _max_offdiag(gram: np.ndarray) -> float:
    g = np.abs(gram.copy())
    np.fill_diagonal(g, 0.0)
    return float(g.max())


def coherence(dic: Dictionary) -> float:
    """Largest |<d_i, d_j>| over distinct columns, clipped into [0, 1]."""
    if dic.n < 2:
        raise ValueError("coherence undefined for N<2")
    return min(1.0, _max_offdiag(_gram(dic.entries)))


def spectral_norm(dic: Dictionary) -> float:
    """Largest singular value; at least 1 for a unit-norm dictionary."""
    return float(np.linalg.norm(dic.entries, 2))


def welch_bound(d: int, n: int) -> float:
    """sqrt((N-d)/(d(N-1))), the universal coherence floor for N > d atoms."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if n <= d:
        raise ValueError("Welch bound applies to overcomplete case only")
    return math.sqrt((n - d) / (d * (n - 1)))


def gram_summary(dic: Dictionary) -> GramSummary:
    s = np.linalg.svd(dic.entries, compute_uv=False)
    wb = welch_bound(dic.d, dic.n) if dic.n > dic.d else 0.0
    return GramSummary(
        coherence=coherence(dic) if dic.n >= 2 else 0.0,
        welch_bound=wb,
        spectral_norm=float(s[0]),
        min_singular=float(s[-1]),
    )


def _pair_coherences(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float]:
    """(mu_a, mu_b, mu) measured from one Gram matrix of [A B].

    Computing all three from the same Gram matrix guarantees
    mu >= max(mu_a, mu_b) exactly, not just up to rounding.
    """
    n_a = a.shape[1]
    full = np.concatenate([a, b], axis=1)
    gram = _gram(full)
    mu_a = _max_offdiag(gram[:n_a, :n_a]) if n_a >= 2 else 0.0
    mu_b = _max_offdiag(gram[n_a:, n_a:]) if b.shape[1] >= 2 else 0.0
    mu = _max_offdiag(gram)
    return min(1.0, mu_a), min(1.0, mu_b), min(1.0, mu)


def concat_coherences(pair: ConcatDictionary) -> tuple[float, float, float]:
    """Re-measure (mu_a, mu_b, mu) from the entries of an existing pair."""
    mu_a, mu_b, mu = _pair_coherences(pair.part_a.entries, pair.part_b.entries)
    if mu_a > mu_b + COHERENCE_TIE_TOL:
        raise ValueError("order parts so that muA <= muB")
    return mu_a, mu_b, mu


def concatenate_pair(part_a: Dictionary, part_b: Dictionary) -> ConcatDictionary:
    """Validate and assemble a concatenated pair.

    Requires matching row counts, mu_a <= mu_b (ties within 1e-12 pass),
    mu > 0, and that the columns of [A B] span the ambient space.
    """
    if part_a.d != part_b.d:
        raise ValueError("sub-dictionaries must share the ambient dimension")
    mu_a, mu_b, mu = _pair_coherences(part_a.entries, part_b.entries)
    if mu_a > mu_b + COHERENCE_TIE_TOL:
        raise ValueError("order parts so that muA <= muB")
    mu_a = min(mu_a, mu_b)
    if mu <= 0.0:
        raise ValueError("concatenation has coherence 0; a single orthonormal "
                         "system needs no pair analysis")
    full = np.concatenate([part_a.entries, part_b.entries], axis=1)
    if full.shape[1] < part_a.d:
        raise ValueError("columns of [A B] must span the ambient space")
    s = np.linalg.svd(full, compute_uv=False)
    if s[-1] <= RANK_REL_TOL * s[0]:
        raise ValueError("columns of [A B] must span the ambient space")
    return ConcatDictionary(part_a, part_b, mu_a, mu_b, mu)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def fourier_basis(d: int) -> np.ndarray:
    """Unitary DFT matrix with unit-norm columns."""
    t = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(t, t) / d) / math.sqrt(d)


def build_dirac_fourier(d: int) -> ConcatDictionary:
    """Identity concatenated with the unitary DFT; coherence 1/sqrt(d)."""
    if d < 2:
        raise ValueError("need dimension >= 2")
    ident = Dictionary(np.eye(d, dtype=np.complex128), label=f"dirac{d}")
    four = Dictionary(fourier_basis(d), label=f"fourier{d}")
    return concatenate_pair(ident, four)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def mub_bases(p: int) -> list[np.ndarray]:
    """The p+1 mutually unbiased bases of prime dimension p.

    Basis 0 is the identity. For odd p, basis b+1 has columns
    v_{b,k}[t] = exp(2*pi*i*(b*t^2 + k*t)/p)/sqrt(p); every cross-basis
    inner product then has magnitude exactly 1/sqrt(p) (quadratic Gauss
    sum). The chirp family degenerates for p = 2, where the standard
    triple {identity, Hadamard, circular} is used instead.
    """
    if not _is_prime(p):
        raise ValueError("prime dimension required")
    bases = [np.eye(p, dtype=np.complex128)]
    if p == 2:
        h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
        y = np.array([[1, 1], [1j, -1j]], dtype=np.complex128) / math.sqrt(2)
        bases.extend([h, y])
        return bases
    t = np.arange(p)
    for b in range(p):
        phase = np.array([[cmath.exp(2j * cmath.pi * ((b * tt * tt + k * tt) % p) / p)
                           for k in range(p)] for tt in t])
        bases.append(phase / math.sqrt(p))
    return bases


def build_mub_concat(p: int, split_after: int) -> ConcatDictionary:
    """Concatenate the p+1 prime-dimension MUBs, split after `split_after` bases.

    Part A holds the first `split_after` bases, part B the rest. With
    split_after=1, A is a single orthonormal basis (mu_a = 0) and B is a
    tight frame of p bases with squared spectral norm p.
    """
    if not 1 <= split_after <= p:
        raise ValueError("split point must lie in [1, p]")
    bases = mub_bases(p)
    a = np.concatenate(bases[:split_after], axis=1)
    b = np.concatenate(bases[split_after:], axis=1)
    pair = concatenate_pair(
        Dictionary(a, label=f"mub{p}[:{split_after}]"),
        Dictionary(b, label=f"mub{p}[{split_after}:]"),
    )
    _check_mub_products(pair.full_matrix(), p)
    return pair


def _check_mub_products(full: np.ndarray, p: int) -> None:
    g = np.abs(_gram(full))
    np.fill_diagonal(g, 0.0)
    target = 1.0 / math.sqrt(p)
    bad = float(np.max(np.minimum(g, np.abs(g - target))))
    if bad > 1e-9:
        raise AssertionError(
            f"inner products stray from {{0, 1/sqrt(p)}} by {bad:.3e}"
        )


def build_random_pair(d: int, n_a: int, n_b: int, seed: int) -> ConcatDictionary:
    """Unit-normalized complex Gaussian atoms, deterministic per seed.

    Parts are ordered so mu_a <= mu_b (swapped when needed); rejects pairs
    whose concatenation fails to span the ambient space.
    """
    if n_a + n_b < d:
        raise ValueError("need at least d atoms in total")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((d, n_a + n_b)) + 1j * rng.standard_normal((d, n_a + n_b))
    m /= np.linalg.norm(m, axis=0)
    a, b = m[:, :n_a], m[:, n_a:]
    mu_a, mu_b, _ = _pair_coherences(a, b)
    if mu_a > mu_b + COHERENCE_TIE_TOL:
        a, b = b, a
        n_a, n_b = n_b, n_a
    return concatenate_pair(
        Dictionary(a, label=f"rand{d}x{n_a}(seed={seed})"),
        Dictionary(b, label=f"rand{d}x{n_b}(seed={seed})"),
    )


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------
#
# Plain text, line oriented: header "d N Na" (Na=0 means a plain dictionary),
# then d*N lines "re im" in row-major order with >= 15 significant digits.

def save_dictionary(path, obj: Dictionary | ConcatDictionary) -> None:
    if isinstance(obj, ConcatDictionary):
        full, n_a = obj.full_matrix(), obj.n_a
    else:
        full, n_a = obj.entries, 0
    d, n = full.shape
    lines = [f"{d} {n} {n_a}"]
    for row in full:
        for v in row:
            lines.append(f"{v.real:.17g} {v.imag:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dictionary(path) -> Dictionary | ConcatDictionary:
    """Parse a dictionary file; validates unit norms and the span invariant."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 3:
        raise ValueError("dictionary file too short")
    d, n, n_a = (int(t) for t in tokens[:3])
    body = tokens[3:]
    if len(body) != 2 * d * n:
        raise ValueError(
            f"expected {2 * d * n} numbers for a {d}x{n} dictionary, got {len(body)}"
        )
    vals = np.array([float(t) for t in body])
    full = (vals[0::2] + 1j * vals[1::2]).reshape(d, n)
    if not 0 <= n_a <= n:
        raise ValueError("invalid split column count")
    if n < d:
        raise ValueError("columns do not span the ambient space")
    s = np.linalg.svd(full, compute_uv=False)
    if s[-1] <= RANK_REL_TOL * s[0]:
        raise ValueError("columns do not span the ambient space")
    if n_a == 0:
        return Dictionary(full, label="file")
    return concatenate_pair(
        Dictionary(full[:, :n_a], label="file:A"),
        Dictionary(full[:, n_a:], label="file:B"),
    )
