"""Shared randomized-instance generators for the test suite.

The ensemble generator uses the isometry-mixing construction: if the columns
of A are the weighted eigenkets of W (so A A† = W), then for any isometry V
with V†V = I the matrix M = A V† also satisfies M M† = W, and its columns are
an ensemble for W.  Sweeping random isometries therefore sweeps random
ensembles averaging to the same density matrix — including ones larger than
the rank of W.
"""

from __future__ import annotations

import numpy as np

from steerlab.linalg import RANK_EPS, hermitian_eig, random_unitary
from steerlab.states import DensityMatrix, Ensemble, StateVector

_MIN_WEIGHT = 1e-6


def random_spectrum(rank: int, rng: np.random.Generator) -> np.ndarray:
    """Random nonnegative spectrum of the given rank summing to one, with a
    random amount of exact degeneracy (repeated eigenvalues)."""
    n_distinct = int(rng.integers(1, rank + 1))
    if n_distinct > 1:
        cuts = np.sort(
            rng.choice(np.arange(1, rank), size=n_distinct - 1, replace=False)
        )
    else:
        cuts = np.array([], dtype=int)
    parts = np.diff(np.concatenate(([0], cuts, [rank])))
    distinct = rng.dirichlet(np.ones(n_distinct)) + 0.05
    distinct /= distinct.sum()
    return np.concatenate(
        [np.full(m, v / m) for v, m in zip(distinct, parts)]
    )


def random_density(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Random density matrix of the given dimension and rank (default: random
    rank between 1 and dim), with possibly degenerate spectrum."""
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    values = np.zeros(dim)
    values[:rank] = random_spectrum(rank, rng)
    u = random_unitary(dim, rng)
    mat = (u * values) @ u.conj().T
    return DensityMatrix(0.5 * (mat + mat.conj().T))


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random rows x cols matrix with orthonormal columns (rows >= cols)."""
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ensemble_for(
    w: DensityMatrix, size: int, rng: np.random.Generator
) -> Ensemble:
    """Random ensemble of `size` states averaging exactly to w.

    Requires size >= rank(w).  Retries the isometry draw if any column lands
    with negligible weight (which Ensemble would reject).
    """
    eig = hermitian_eig(w.mat)
    rank = int(np.count_nonzero(eig.eigenvalues > RANK_EPS))
    if size < rank:
        raise ValueError(f"need size >= rank, got {size} < {rank}")
    a = eig.eigenvectors[:, :rank] * np.sqrt(eig.eigenvalues[:rank])
    for _ in range(50):
        v = random_isometry(size, rank, rng)
        m = a @ v.conj().T
        weights = np.einsum("ij,ij->j", m.conj(), m).real
        if weights.min() > _MIN_WEIGHT:
            break
    pairs = [
        (float(weights[mu]), StateVector(m[:, mu] / np.sqrt(weights[mu])))
        for mu in range(size)
    ]
    return Ensemble.from_pairs(pairs)


def random_steering_instance(rng: np.random.Generator) -> dict:
    """One randomized steering problem: a density matrix on Alice with two
    ensembles for it and a Bob dimension large enough for both.

    Every third draw forces a rank-deficient density matrix and every fourth
    a fully degenerate (maximally mixed on its support) one, so the awkward
    spectra always appear in a modest sweep.
    """
    dim_alice = int(rng.integers(2, 5))
    stamp = int(rng.integers(0, 12))
    if stamp % 3 == 0 and dim_alice > 1:
        rank = int(rng.integers(1, dim_alice))
    else:
        rank = int(rng.integers(1, dim_alice + 1))
    w = random_density(dim_alice, rng, rank=rank)
    if stamp % 4 == 0:
        values = np.zeros(dim_alice)
        values[:rank] = 1.0 / rank
        u = random_unitary(dim_alice, rng)
        mat = (u * values) @ u.conj().T
        w = DensityMatrix(0.5 * (mat + mat.conj().T))
    dim_bob = int(rng.integers(max(rank, 2), 7))
    sizes = rng.integers(rank, dim_bob + 1, size=2)
    return {
        "w": w,
        "rank": rank,
        "dim_alice": dim_alice,
        "dim_bob": dim_bob,
        "ensembles": [
            random_ensemble_for(w, int(s), rng) for s in sizes
        ],
    }
