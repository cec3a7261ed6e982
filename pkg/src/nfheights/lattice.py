"""Lattices of integral points under the rho-embedding into E^{np}.

rho concatenates the real-coordinate blocks X^[1], ..., X^[p] of a vector
over K. Lattice points always carry exact integer coordinates relative to
a fixed exact generating set; floating data is derived from them and never
inverted back to exact form.

The module also provides LLL reduction with an exact unimodular transform,
and the constrained search for a nonzero lattice point inside the
three-part convex bodies used by the going-down construction (a box in the
span of a sublattice, absolute bounds against an orthonormal frame, and a
norm bound on the residual component). Minkowski's theorem is replaced by
reduction plus bounded enumeration with adaptive doubling of the residual
bound, which is where the nonconstructive "large enough constant" enters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import TOL
from .exact import integer_kernel, lcm_list
from .numberfield import FieldElement, NumberField
from .subspaces import SubspaceOverK, full_space, k_kernel


def rho(K: NumberField, vec) -> np.ndarray:
    """rho(X) = (X^[1], ..., X^[p]) in E^{np}, blocks indexed by embedding."""
    n = len(vec)
    coords = np.array([K.real_coords(x) for x in vec])  # n x p
    return coords.T.reshape(n * K.p)


class ReductionError(RuntimeError):
    pass


@dataclass
class EmbeddedLattice:
    """Rank-r sublattice of E^{np} with an exact generating set.

    The current basis is int_coords @ gens (unimodular int_coords); its
    rho-image rows are real_basis and gram = real_basis @ real_basis.T.
    """

    field: NumberField
    n: int
    gens: tuple                  # r exact generator vectors over K (tuples of FieldElement)
    gen_rho: np.ndarray          # r x (n p) floating rho-images of gens
    int_coords: np.ndarray       # r x r integer (object dtype) unimodular matrix

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def ambient(self) -> int:
        return self.n * self.field.p

    @property
    def real_basis(self) -> np.ndarray:
        return self.int_coords.astype(float) @ self.gen_rho

    @property
    def gram(self) -> np.ndarray:
        rb = self.real_basis
        return rb @ rb.T

    def point(self, coords) -> "LatticePoint":
        return LatticePoint(self, tuple(int(c) for c in coords))


@dataclass(frozen=True)
class LatticePoint:
    """A lattice point: exact integer coordinates relative to the generating set."""

    lattice: EmbeddedLattice
    coords: tuple                # length r, relative to lattice.gens

    def vector(self):
        """Exact vector over K."""
        lat = self.lattice
        K = lat.field
        out = [K.zero()] * lat.n
        for c, gen in zip(self.coords, lat.gens):
            if c:
                out = [a + c * g for a, g in zip(out, gen)]
        return out

    def rho_vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=float) @ self.lattice.gen_rho

    def is_zero(self) -> bool:
        return not any(self.coords)


def lattice_from_generators(K: NumberField, n: int, gens) -> EmbeddedLattice:
    gens = tuple(tuple(g) for g in gens)
    gen_rho = np.array([rho(K, g) for g in gens])
    r = len(gens)
    ident = np.array([[int(i == j) for j in range(r)] for i in range(r)], dtype=object)
    return EmbeddedLattice(K, n, gens, gen_rho, ident)


def full_lattice(K: NumberField, n: int) -> EmbeddedLattice:
    """rho(O_K^n), rank n*p: generators e_t * b_s in deterministic order."""
    gens = []
    basis = K.basis_elements()
    zero = K.zero()
    for t in range(n):
        for b in basis:
            vec = [zero] * n
            vec[t] = b
            gens.append(vec)
    return lattice_from_generators(K, n, gens)


def lattice_of_subspace(S: SubspaceOverK) -> EmbeddedLattice:
    """Lambda(S) = rho(O_K(S)): the integral points of S as a rank d*p lattice.

    O_K^n is identified with Z^{np} through the integral basis; the exact
    K-linear equations cutting out S become p scalar equations each, and the
    saturated integer kernel (Hermite-form transform) yields the generators.
    """
    K = S.field
    n, d, p = S.n, S.d, K.p
    basis = K.basis_elements()
    if d == n:
        return full_lattice(K, n)
    eq_rows = [list(r) for r in k_kernel([list(r) for r in S.basis], K, n)]
    # unknowns c_{t,s} (t ambient coordinate, s integral-basis index), t-major
    rat_rows = []
    for eq in eq_rows:
        cols = []
        for t in range(n):
            for s in range(p):
                prod = eq[t] * basis[s]
                cols.append(prod.coeffs)
        for k in range(p):
            rat_rows.append([cols[j][k] for j in range(n * p)])
    scale = lcm_list([c.denominator for row in rat_rows for c in row])
    int_rows = [[int(c * scale) for c in row] for row in rat_rows]
    kernel = integer_kernel(int_rows)
    if len(kernel) != d * p:
        raise RuntimeError(f"integral-point lattice has rank {len(kernel)}, expected {d * p}")
    gens = []
    for vec in kernel:
        out = []
        for t in range(n):
            c = vec[t * p:(t + 1) * p]
            out.append(sum((c[s] * basis[s] for s in range(p)), K.zero()))
        gens.append(out)
    return lattice_from_generators(K, n, gens)


def det_lattice(L: EmbeddedLattice | None) -> float:
    """Covolume sqrt(det Gram); 1 for the zero lattice."""
    if L is None or L.rank == 0:
        return 1.0
    s = np.linalg.svd(L.real_basis, compute_uv=False)
    return float(np.prod(s))


# -- LLL ---------------------------------------------------------------------------

def lll_transform(rows: np.ndarray, delta: float = 0.99, metric: np.ndarray | None = None,
                  metric_factor: np.ndarray | None = None):
    """Unimodular T (object ints) such that T @ rows is LLL-reduced.

    Reduction happens in the inner product induced by `metric` (identity by
    default), or by `metric_factor` F with <x, x> = ||F x||^2, which stays
    stable for extremely anisotropic forms. Gram-Schmidt data is floating;
    the transform stays exact.
    """
    rows = np.asarray(rows, dtype=float)
    r = rows.shape[0]
    if metric_factor is not None:
        work = rows @ np.asarray(metric_factor, dtype=float).T
    elif metric is not None:
        try:
            chol = np.linalg.cholesky(metric + 1e-12 * np.trace(metric) / len(metric) * np.eye(len(metric)))
        except np.linalg.LinAlgError as exc:
            raise ReductionError(f"metric not positive definite: {exc}") from exc
        work = rows @ chol
    else:
        work = rows.copy()
    T = np.array([[int(i == j) for j in range(r)] for i in range(r)], dtype=object)
    b = work.copy()

    def gso():
        q = np.zeros_like(b)
        mu = np.zeros((r, r))
        norms = np.zeros(r)
        for i in range(r):
            q[i] = b[i]
            for j in range(i):
                if norms[j] <= 0:
                    raise ReductionError("numerically singular Gram in LLL")
                mu[i, j] = (b[i] @ q[j]) / norms[j]
                q[i] = q[i] - mu[i, j] * q[j]
            norms[i] = q[i] @ q[i]
        return mu, norms

    mu, norms = gso()
    if np.any(norms <= 0):
        raise ReductionError("numerically singular Gram in LLL")
    k = 1
    guard = 0
    max_iters = 500 * r * r + 1000
    while k < r:
        guard += 1
        if guard > max_iters:
            raise ReductionError("LLL failed to converge")
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] -= q * b[j]
                T[k] = [x - q * y for x, y in zip(T[k], T[j])]
                mu, norms = gso()
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            T[[k - 1, k]] = T[[k, k - 1]]
            mu, norms = gso()
            k = max(k - 1, 1)
    return T


def lll_reduce(L: EmbeddedLattice, weights=None, delta: float = 0.99) -> EmbeddedLattice:
    """Same lattice with an LLL-reduced basis (exact unimodular transform).

    `weights` is an optional positive diagonal on the ambient coordinates.
    """
    if L.rank == 0:
        return L
    metric = None
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.ndim == 1:
            if np.any(w <= 0):
                raise ValueError("weights must be positive")
            metric = np.diag(w)
        else:
            metric = w
    T = lll_transform(L.real_basis, delta=delta, metric=metric)
    new_coords = _obj_matmul(T, L.int_coords)
    return replace(L, int_coords=new_coords)


def _obj_matmul(a, b):
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum(int(a[i, k]) * int(b[k, j]) for k in range(a.shape[1]))
    return out


# -- Fincke-Pohst enumeration --------------------------------------------------------

def enumerate_quadratic(gram: np.ndarray | None, bound: float,
                        max_nodes: int = 5_000_000,
                        factor: np.ndarray | None = None):
    """Integer vectors a != 0 with q(a) <= bound, one of each +-pair.

    The form is a^T G a for `gram`, or ||F a||^2 for `factor` (the factor
    route computes the Cholesky triangle by QR and survives condition
    numbers that destroy the normal-equations route). Yields
    (value, tuple(a)); the canonical representative has positive last
    nonzero coordinate. Deterministic recursion order.
    """
    if factor is not None:
        f = np.asarray(factor, dtype=float)
        r = f.shape[1]
        _, R = np.linalg.qr(f)
        sign = np.sign(np.diag(R))
        sign[sign == 0] = 1.0
        R = R * sign[:, None]
        if np.any(np.diag(R) <= 0):
            raise ReductionError("factor is numerically rank deficient")
    else:
        r = gram.shape[0]
        jitter = 1e-14 * max(np.min(np.diag(gram)), 1e-300)
        try:
            L = np.linalg.cholesky(gram + jitter * np.eye(r))
        except np.linalg.LinAlgError as exc:
            raise ReductionError(f"Gram not positive definite: {exc}") from exc
        R = L.T  # q(a) = ||R a||^2, R upper triangular
    a = [0] * r
    nodes = 0

    def rec(i, rem, partial):
        nonlocal nodes
        # partial[j] = sum_{k>i} R[j,k] a_k for j <= i
        rii = R[i, i]
        center = -partial[i] / rii
        half = np.sqrt(max(rem, 0.0)) / rii
        lo = int(np.ceil(center - half - 1e-12))
        hi = int(np.floor(center + half + 1e-12))
        for ai in range(lo, hi + 1):
            nodes += 1
            if nodes > max_nodes:
                raise ReductionError("enumeration node cap exceeded")
            t = rii * (ai - center)
            rem2 = rem - t * t
            if rem2 < -1e-9:
                continue
            a[i] = ai
            if i == 0:
                if any(a):
                    val = bound - max(rem2, 0.0)
                    yield (val, tuple(a))
            else:
                new_partial = partial + R[:, i] * ai
                yield from rec(i - 1, max(rem2, 0.0), new_partial)
        a[i] = 0

    yield from _canonical_half(rec(r - 1, bound, np.zeros(r)))


def _canonical_half(it):
    for val, a in it:
        # keep one representative per +-pair: last nonzero coordinate positive
        last = next((x for x in reversed(a) if x != 0), 0)
        if last > 0:
            yield val, a


# -- constrained body search ----------------------------------------------------------

@dataclass(frozen=True)
class BodySpec:
    """Three-part symmetric convex body in E^{np}.

    (i)   the projection onto span(box_basis) lies in the box of coefficients
          in [-1/2, 1/2] relative to box_basis rows, when box_basis is given;
    (ii)  |<x, frame_k>| <= frame_bounds[k] for the orthonormal frame rows;
    (iii) the residual component (orthogonal to both) has norm <= residual_bound.
    """

    ambient: int
    box_basis: np.ndarray | None = None
    frame: np.ndarray | None = None
    frame_bounds: np.ndarray | None = None
    residual_bound: float = 1.0

    def scaled(self, c: float) -> "BodySpec":
        return replace(self, residual_bound=self.residual_bound * c)


def body_decompose(x: np.ndarray, body: BodySpec):
    """Split x into (box coefficients, frame inner products, residual norm).

    Least-squares projections computed from scratch; used as the independent
    re-verification route for search results.
    """
    x = np.asarray(x, dtype=float)
    coeffs = np.zeros(0)
    x_star = np.zeros_like(x)
    if body.box_basis is not None and len(body.box_basis):
        bb = body.box_basis
        coeffs, *_ = np.linalg.lstsq(bb.T, x, rcond=None)
        x_star = coeffs @ bb
    frame_vals = np.zeros(0)
    x_t = np.zeros_like(x)
    if body.frame is not None and len(body.frame):
        frame_vals = body.frame @ x
        x_t = frame_vals @ body.frame
    resid = x - x_star - x_t
    return coeffs, frame_vals, float(np.linalg.norm(resid))


def body_decompose_orth(x: np.ndarray, body: BodySpec):
    """Independent decomposition route: SVD projectors plus a Gram solve.

    Used to re-verify search results without reusing the searcher's
    least-squares path.
    """
    x = np.asarray(x, dtype=float)
    coeffs = np.zeros(0)
    x_star = np.zeros_like(x)
    if body.box_basis is not None and len(body.box_basis):
        bb = body.box_basis
        u, s, vh = np.linalg.svd(bb, full_matrices=False)
        q = vh  # orthonormal rows spanning the box span
        x_star = (q @ x) @ q
        coeffs = np.linalg.solve(bb @ bb.T, bb @ x_star)
    frame_vals = np.zeros(0)
    x_t = np.zeros_like(x)
    if body.frame is not None and len(body.frame):
        frame_vals = body.frame @ x
        x_t = frame_vals @ body.frame
    resid = x - x_star - x_t
    return coeffs, frame_vals, float(np.linalg.norm(resid))


def body_contains(x: np.ndarray, body: BodySpec, slack: float = TOL.boundary,
                  decompose=body_decompose) -> bool:
    coeffs, frame_vals, resid = decompose(x, body)
    if len(coeffs) and np.max(np.abs(coeffs)) > 0.5 + slack:
        return False
    if len(frame_vals):
        bounds = np.asarray(body.frame_bounds, dtype=float)
        if np.any(np.abs(frame_vals) > bounds * (1 + slack) + 1e-300):
            return False
    return resid <= body.residual_bound * (1 + slack)


def _body_factor(body: BodySpec) -> tuple[np.ndarray, float]:
    """Factor F and radius^2 with body <= {x : ||F x||^2 <= R^2}.

    Stacks the scaled box-dual rows, frame rows and residual projector, so
    the enclosing ellipsoid is assembled without squaring the conditioning.
    """
    N = body.ambient
    blocks = []
    r2 = 1.0
    p_star = np.zeros((N, N))
    p_t = np.zeros((N, N))
    if body.box_basis is not None and len(body.box_basis):
        bb = body.box_basis
        g = bb @ bb.T
        d = np.linalg.solve(g, bb)        # dual rows: coeffs(x) = d @ x
        blocks.append(2.0 * d)
        p_star = bb.T @ d
        r2 += len(bb)
    if body.frame is not None and len(body.frame):
        fr = body.frame
        bounds = np.asarray(body.frame_bounds, dtype=float)
        blocks.append(fr / bounds[:, None])
        p_t = fr.T @ fr
        r2 += len(fr)
    p0 = np.eye(N) - p_star - p_t
    blocks.append(p0 / body.residual_bound)
    return np.vstack(blocks), r2


@dataclass
class SearchOutcome:
    point: LatticePoint | None
    residual_scale: float          # final multiplier applied to the residual bound
    doublings: int
    candidates: int
    body: BodySpec
    message: str = ""

    @property
    def found(self) -> bool:
        return self.point is not None


def find_point_in_body(L: EmbeddedLattice, body: BodySpec, *,
                       max_doublings: int = 12, reject=None,
                       max_nodes: int = 5_000_000) -> SearchOutcome:
    """Nonzero lattice point satisfying the body constraints, or NotFound.

    Strategy: LLL-reduce under the body-adapted metric, enumerate candidates
    by nondecreasing weighted norm (deterministic tie-break on the exact
    integer coordinates), verify membership against the original closed body,
    and double the residual bound on failure up to `max_doublings`.
    """
    checked = 0
    for doubling in range(max_doublings + 1):
        cur = body.scaled(2.0 ** doubling)
        fac, r2 = _body_factor(cur)
        try:
            T = lll_transform(L.real_basis, metric_factor=fac)
        except ReductionError as exc:
            return SearchOutcome(None, 2.0 ** doubling, doubling, checked, cur,
                                 f"reduction failed: {exc}")
        red = replace(L, int_coords=_obj_matmul(T, L.int_coords))
        V = red.real_basis
        cand = []
        try:
            for val, a in enumerate_quadratic(None, r2 * (1 + 1e-9),
                                              max_nodes=max_nodes, factor=fac @ V.T):
                arr = np.array(a, dtype=object)
                ic = tuple(int(v) for v in (arr @ red.int_coords))
                cand.append((round(float(val), 9), ic))
                neg = tuple(-v for v in ic)
                cand.append((round(float(val), 9), neg))
        except ReductionError as exc:
            return SearchOutcome(None, 2.0 ** doubling, doubling, checked, cur,
                                 f"enumeration capped: {exc}")
        cand.sort()
        for _, ic in cand:
            checked += 1
            pt = L.point(ic)
            if reject is not None and reject(pt):
                continue
            if body_contains(pt.rho_vector(), cur):
                return SearchOutcome(pt, 2.0 ** doubling, doubling, checked, cur)
    return SearchOutcome(None, 2.0 ** max_doublings, max_doublings, checked, body,
                         "no lattice point found; residual-bound cap reached")


def saturation_diagonal(L: EmbeddedLattice) -> list:
    """Smith diagonal of the integer matrix expressing basis points in O_K^n coordinates.

    All ones certifies that the computed module is saturated in Z^{np}.
    """
    from .exact import smith_diagonal
    K = L.field
    p = K.p
    rows = []
    for ic_row in L.int_coords:
        pt = LatticePoint(L, tuple(int(v) for v in ic_row))
        vec = pt.vector()
        row = []
        for x in vec:
            coords = [sum(K._ib_inv[i][k] * x.coeffs[k] for k in range(p)) for i in range(p)]
            if any(c.denominator != 1 for c in coords):
                raise RuntimeError("lattice point is not integral")
            row.extend(int(c) for c in coords)
        rows.append(row)
    return smith_diagonal(rows)
