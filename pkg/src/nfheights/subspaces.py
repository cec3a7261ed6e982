"""Subspaces of K^n with exact bases, and exact linear algebra over K.

Gaussian elimination pivots on the first nonzero exact entry, so no numeric
pivoting is ever involved and results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exterior
from .exact import format_rational, parse_rational
from .numberfield import FieldElement, NumberField


def _as_element(K: NumberField, x) -> FieldElement:
    if isinstance(x, FieldElement):
        if x.field is not K:
            raise ValueError("element belongs to a different field")
        return x
    if isinstance(x, (list, tuple)):
        return K.element(x)
    return K.from_rational(parse_rational(x))


def rref(rows):
    """Reduced row echelon form over K. Returns (rref_rows, pivot_columns).

    Input is a list of FieldElement rows; the input is not mutated.
    """
    a = [list(r) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if not a[i][col].is_zero()), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col].inv()
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and not a[i][col].is_zero():
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def k_rank(rows) -> int:
    return len(rref(rows)[0])


def k_kernel(rows, K: NumberField, n: int):
    """Basis of {x in K^n : sum_t rows[r][t] * x_t = 0 for all r}."""
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    zero, one = K.zero(), K.one()
    for fc in free:
        vec = [zero] * n
        vec[fc] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def in_row_space(rows, vec) -> bool:
    """Exact membership of vec in the row space of rows."""
    r0 = k_rank(rows)
    return k_rank(list(rows) + [list(vec)]) == r0


@dataclass(frozen=True)
class SubspaceOverK:
    """A d-dimensional subspace of K^n given by an exact basis.

    plucker is the wedge of the basis rows (exact, grade d); the projective
    normalization (first nonzero coordinate scaled to 1) is the canonical
    representative used for deduplication.
    """

    field: NumberField
    n: int
    d: int
    basis: tuple
    plucker: exterior.MultiVector = field(repr=False, compare=False, default=None)

    def plucker_normalized(self) -> exterior.MultiVector:
        mv = self.plucker
        lead = next(c for c in mv.coords if not c.is_zero())
        return mv.scale(lead.inv())

    def plucker_key(self):
        mv = self.plucker_normalized()
        return (self.n, self.d, tuple(c.coeffs for c in mv.coords))

    def plucker_str(self) -> str:
        mv = self.plucker_normalized()
        return ";".join(",".join(format_rational(q) for q in c.coeffs) for c in mv.coords)


def subspace(K: NumberField, rows, n=None) -> SubspaceOverK:
    """Build a SubspaceOverK from basis rows, checking exact full rank."""
    rows = [[_as_element(K, x) for x in row] for row in rows]
    if n is None:
        n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged basis")
    d = len(rows)
    if k_rank(rows) != d:
        raise ValueError("basis is rank deficient (exact check)")
    pl = exterior.wedge_rows(rows, n)
    return SubspaceOverK(K, n, d, tuple(tuple(r) for r in rows), pl)


def full_space(K: NumberField, n: int) -> SubspaceOverK:
    rows = []
    for t in range(n):
        row = [K.zero()] * n
        row[t] = K.one()
        rows.append(row)
    return subspace(K, rows, n)


def embed_basis(S: SubspaceOverK, j: int = 1) -> np.ndarray:
    """Basis rows embedded under sigma_j: a d x n complex matrix."""
    return np.array([[S.field.embed(x, j) for x in row] for row in S.basis])


def contains_vector(S: SubspaceOverK, vec) -> bool:
    vec = [_as_element(S.field, x) for x in vec]
    return in_row_space([list(r) for r in S.basis], vec)


def contains_subspace(S: SubspaceOverK, T: SubspaceOverK) -> bool:
    """Exact check that T is contained in S."""
    if S.field is not T.field or S.n != T.n:
        return False
    rows = [list(r) for r in S.basis]
    return all(in_row_space(rows, list(t)) for t in T.basis)


def same_subspace(S: SubspaceOverK, T: SubspaceOverK) -> bool:
    return S.d == T.d and contains_subspace(S, T)


def subspace_from_spec(spec, K: NumberField | None = None) -> SubspaceOverK:
    """Subspace spec: {"field": ..., "n": int, "basis": [[entry, ...], ...]}.

    Each basis entry is a vector of p rationals (power-basis coordinates),
    or a single rational for convenience.
    """
    from .numberfield import field_from_spec
    if K is None:
        K = field_from_spec(spec["field"])
    n = int(spec["n"])
    rows = []
    for row in spec["basis"]:
        out = []
        for entry in row:
            if isinstance(entry, (list, tuple)):
                out.append(K.element([parse_rational(v) for v in entry]))
            else:
                out.append(K.from_rational(parse_rational(entry)))
        rows.append(out)
    return subspace(K, rows, n)
