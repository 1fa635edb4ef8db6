"""Dense complex linear algebra kept deliberately small and deterministic.

Everything in here operates on plain ``numpy`` arrays of ``complex128``.
The eigensolver is a cyclic Jacobi iteration for Hermitian matrices: for the
matrix sizes this package meets (dimension <= 64) it is plenty fast, it is
reproducible across platforms because the sweep order is fixed, and it keeps
the whole numerical core free of LAPACK behavioural differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatch,
    DomainError,
    NotHermitian,
    NotOrthonormal,
)

#: Default absolute tolerance for structural checks (hermiticity, unitarity,
#: normalization, reconstruction residuals).
DEFAULT_TOL = 1e-9

#: Threshold below which a weight / residual norm is treated as exactly zero
#: (rank decisions, support of a spectrum, keep/drop in basis completion).
RANK_EPS = 1e-10

_MAX_JACOBI_SWEEPS = 60


def _as_complex(a, name: str = "array") -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{name} contains NaN or Inf entries")
    return out


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with the left operand on the slow (leftmost) index."""
    return np.kron(_as_complex(a, "left factor"), _as_complex(b, "right factor"))


def tensor(*factors) -> np.ndarray:
    """Kronecker product of any number of factors, left to right."""
    if not factors:
        raise DimensionMismatch("tensor() needs at least one factor")
    out = _as_complex(factors[0], "factor 0")
    for i, f in enumerate(factors[1:], start=1):
        out = np.kron(out, _as_complex(f, f"factor {i}"))
    return out


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    Parameters
    ----------
    rho:
        Square matrix on the full product space; factor 0 is the leftmost
        (slowest) index, matching :func:`tensor_product`.
    dims:
        Dimension of each tensor factor, in order.
    keep:
        Indices of the factors to keep.  The result is ordered by ascending
        factor index regardless of the order given here.
    """
    rho = _as_complex(rho, "rho")
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise DimensionMismatch(f"factor dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(
            f"rho has shape {rho.shape}, expected ({total}, {total}) from dims {dims}"
        )
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise DimensionMismatch("keep must name at least one factor")
    if kept[0] < 0 or kept[-1] >= len(dims):
        raise DimensionMismatch(f"keep indices {kept} out of range for {len(dims)} factors")

    n = len(dims)
    reshaped = rho.reshape(dims + dims)
    row_sub = list(range(n))
    col_sub = [k if k not in kept else n + k for k in range(n)]
    out_sub = [k for k in kept] + [n + k for k in kept]
    reduced = np.einsum(reshaped, row_sub + col_sub, out_sub)
    d_keep = int(np.prod([dims[k] for k in kept]))
    return np.ascontiguousarray(reduced.reshape(d_keep, d_keep))


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` are real and sorted in descending order; column ``i`` of
    ``eigenvectors`` is the unit eigenvector for ``eigenvalues[i]``.  Equal
    eigenvalues keep the order the Jacobi iteration produced, so the output
    is deterministic — but inside a degenerate subspace the particular basis
    is an implementation detail callers must not rely on.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(h, tol: float = DEFAULT_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises :class:`NotHermitian` when ``‖h − h†‖_F > tol``.  Off-diagonal
    mass is annihilated in a fixed sweep order (p < q, row-major), which
    makes the result reproducible run to run for identical input bytes.
    """
    h = _as_complex(h, "h")
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    defect = np.linalg.norm(h - h.conj().T)
    if defect > tol:
        raise NotHermitian(f"matrix is not Hermitian: ‖h − h†‖_F = {defect:.3e} > {tol:.1e}")

    n = h.shape[0]
    a = ((h + h.conj().T) / 2.0).astype(np.complex128)
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return EigenDecomposition(np.array([a[0, 0].real]), v)

    scale = max(1.0, float(np.linalg.norm(a)))
    conv = 1e-14 * scale
    for _ in range(_MAX_JACOBI_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= conv:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m == 0.0:
                    continue
                phase = apq / m
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * m)
                sign = 1.0 if tau >= 0.0 else -1.0
                t = sign / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                se = s * phase
                sec = s * np.conj(phase)
                # a <- U† a U with U the rotation in the (p, q) plane
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - sec * cq
                a[:, q] = se * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - se * rq
                a[q, :] = sec * rp + c * rq
                a[p, p] = app * c * c + aqq * s * s - 2.0 * s * c * m
                a[q, q] = aqq * c * c + app * s * s + 2.0 * s * c * m
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sec * vq
                v[:, q] = se * vp + c * vq
    else:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {_MAX_JACOBI_SWEEPS} sweeps"
        )

    values = np.real(np.diag(a)).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], np.ascontiguousarray(v[:, order]))


def gram_schmidt_complete(partial, dim: int) -> np.ndarray:
    """Extend an orthonormal family to a full orthonormal basis of C^dim.

    ``partial`` is a sequence of vectors (or a 2-D array whose *rows* are the
    vectors).  The returned ``(dim, dim)`` array holds the basis as rows; the
    first ``len(partial)`` rows are the inputs unchanged.  Standard basis
    vectors are projected out in index order and kept whenever the residual
    norm exceeds :data:`RANK_EPS`, so the completion is deterministic.
    """
    vecs = [np.ascontiguousarray(p, dtype=np.complex128) for p in partial]
    dim = int(dim)
    if dim <= 0:
        raise DimensionMismatch("dim must be positive")
    for p in vecs:
        if p.shape != (dim,):
            raise DimensionMismatch(f"partial vector has shape {p.shape}, expected ({dim},)")
    if len(vecs) > dim:
        raise DimensionMismatch(f"{len(vecs)} vectors cannot be orthonormal in dimension {dim}")
    if vecs:
        g = np.array([[np.vdot(x, y) for y in vecs] for x in vecs])
        if np.linalg.norm(g - np.eye(len(vecs))) > DEFAULT_TOL:
            raise NotOrthonormal("partial family is not orthonormal within tolerance")

    basis = list(vecs)
    for j in range(dim):
        if len(basis) == dim:
            break
        cand = np.zeros(dim, dtype=np.complex128)
        cand[j] = 1.0
        for b in basis:
            cand = cand - b * np.vdot(b, cand)
        residual = np.linalg.norm(cand)
        if residual <= RANK_EPS:
            continue
        # second orthogonalization pass for numerical hygiene
        for b in basis:
            cand = cand - b * np.vdot(b, cand)
        basis.append(cand / np.linalg.norm(cand))
    if len(basis) != dim:
        raise ConvergenceError("failed to complete the basis (input nearly rank deficient)")
    return np.array(basis)


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    """True when ``u`` is square and ``‖u†u − I‖_F ≤ tol``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    n = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(n)) <= tol)


def is_hermitian(h, tol: float = DEFAULT_TOL) -> bool:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return bool(np.linalg.norm(h - h.conj().T) <= tol)


def is_density(w, tol: float = DEFAULT_TOL) -> bool:
    """True when ``w`` is Hermitian, unit trace and positive semidefinite
    (eigenvalues allowed to dip to ``−tol``)."""
    w = np.asarray(w, dtype=np.complex128)
    if not is_hermitian(w, tol):
        return False
    if abs(np.trace(w).real - 1.0) > tol or abs(np.trace(w).imag) > tol:
        return False
    eig = hermitian_eig(w, tol=max(tol, DEFAULT_TOL))
    return bool(eig.eigenvalues[-1] >= -tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary, via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
