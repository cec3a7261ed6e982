"""Principal-angle geometry between numeric subspaces of R^n or C^n.

The inner product is Hermitian and linear in the first argument:
<x, y> = sum_i x_i * conj(y_i). All distances are sines of angles, so they
live in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exterior
from .config import TOL


@dataclass(frozen=True)
class NumericSubspace:
    """A subspace of G^n carried as an n x dim matrix of orthonormal columns."""

    onb: np.ndarray
    tol: float = TOL.orth

    def __post_init__(self):
        q = np.asarray(self.onb)
        if q.ndim != 2 or q.shape[1] == 0 or q.shape[1] > q.shape[0]:
            raise ValueError(f"bad orthonormal basis shape {q.shape}")
        g = q.conj().T @ q
        if np.max(np.abs(g - np.eye(q.shape[1]))) > max(self.tol, 1e-9):
            raise ValueError("columns are not orthonormal within tolerance")
        object.__setattr__(self, "onb", q)

    @property
    def n(self) -> int:
        return self.onb.shape[0]

    @property
    def dim(self) -> int:
        return self.onb.shape[1]


def from_basis(rows_or_matrix, row_vectors=True) -> NumericSubspace:
    """Orthonormalize a (full-rank) basis into a NumericSubspace.

    By default the input holds basis vectors as rows.
    """
    a = np.asarray(rows_or_matrix, dtype=None)
    if a.ndim == 1:
        a = a[None, :]
    m = a.T if row_vectors else a
    if np.iscomplexobj(m) and np.max(np.abs(m.imag)) <= 1e-13 * max(1.0, np.max(np.abs(m))):
        m = m.real
    m = m.astype(complex) if np.iscomplexobj(m) else m.astype(float)
    q, r = np.linalg.qr(m)
    diag = np.abs(np.diag(r))
    scale = max(1.0, np.max(np.abs(m)))
    if np.any(diag <= TOL.rank * scale * max(m.shape)):
        raise ValueError("basis is numerically rank deficient")
    return NumericSubspace(q)


def span(*vectors) -> NumericSubspace:
    return from_basis(np.array(vectors))


def proj_dist(x, y) -> float:
    """Projective distance ||x ^ y|| / (||x|| ||y||) between nonzero vectors."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("projective distance of the zero vector")
    outer = np.outer(x, y)
    wedge = outer - outer.T  # entries x_i y_j - x_j y_i
    # each unordered pair contributes once to the squared norm
    val = np.sqrt(0.5) * np.linalg.norm(wedge) / (nx * ny)
    return min(1.0, float(val))


def dist_point_subspace(x, B: NumericSubspace) -> float:
    """sin of the angle from x to B: ||x - proj_B x|| / ||x||."""
    x = np.asarray(x, dtype=complex).ravel()
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("zero vector")
    resid = x - B.onb @ (B.onb.conj().T @ x)
    return min(1.0, float(np.linalg.norm(resid) / nx))


@dataclass(frozen=True)
class PrincipalData:
    """Aligned orthonormal bases and the principal quantities between them.

    lambdas descend, omegas = sqrt(1 - lambda^2) ascend; <X_i, Y_j> = delta_ij
    lambda_i for i, j up to f = min(d, e).
    """

    lambdas: np.ndarray
    omegas: np.ndarray
    X_basis: np.ndarray
    Y_basis: np.ndarray


def principal_data(A: NumericSubspace, B: NumericSubspace) -> PrincipalData:
    if A.n != B.n:
        raise ValueError("ambient dimension mismatch")
    M = A.onb.conj().T @ B.onb
    u, s, vh = np.linalg.svd(M)
    lam = np.clip(s, 0.0, 1.0)
    X = A.onb @ u
    Y = B.onb @ vh.conj().T
    f = min(A.dim, B.dim)
    om = np.sqrt(np.clip(1.0 - lam * lam, 0.0, None))
    # near lambda = 1 the sqrt cancels catastrophically; use the residual route
    for i in range(f):
        if lam[i] > 1.0 - TOL.near_one:
            resid = X[:, i] - B.onb @ (B.onb.conj().T @ X[:, i])
            om[i] = np.linalg.norm(resid)
    return PrincipalData(lam[:f], om[:f], X, Y)


def omega_i(A: NumericSubspace, B: NumericSubspace, i: int) -> float:
    """The i-th principal distance (1-based), ascending in i."""
    f = min(A.dim, B.dim)
    if not 1 <= i <= f:
        raise IndexError(f"index {i} out of range 1..{f}")
    return float(principal_data(A, B).omegas[i - 1])


def mu(A: NumericSubspace, B: NumericSubspace) -> float:
    """Product of all principal distances."""
    return float(np.prod(principal_data(A, B).omegas))


def mu_wedge(A_basis, B_basis) -> float:
    """mu via wedge norms of arbitrary bases; requires d + e <= n."""
    a = np.asarray(A_basis, dtype=complex)
    b = np.asarray(B_basis, dtype=complex)
    if a.ndim == 1:
        a = a[None, :]
    if b.ndim == 1:
        b = b[None, :]
    n = a.shape[1]
    if a.shape[0] + b.shape[0] > n:
        raise ValueError("mu_wedge requires d + e <= n")
    top = exterior.gen_det(np.vstack([a, b]), n)
    return top / (exterior.gen_det(a, n) * exterior.gen_det(b, n))


def orth_complement(B: NumericSubspace) -> NumericSubspace:
    """Hermitian orthogonal complement; defined for 0 < dim < n."""
    if B.dim >= B.n:
        raise ValueError("complement of the full space is empty")
    u, s, vh = np.linalg.svd(B.onb, full_matrices=True)
    return NumericSubspace(u[:, B.dim:])


def random_unitary(n: int, rng, complex_field=True) -> np.ndarray:
    a = rng.standard_normal((n, n))
    if complex_field:
        a = a + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))
