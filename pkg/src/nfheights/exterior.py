"""Dense exterior algebra over exact field scalars or complex floats.

Grade-m elements store one coefficient per strictly increasing m-subset of
{0..n-1}, in lexicographic order. The same implementation serves exact
scalars (FieldElement) and floating complex scalars; the inner product
conjugates the second argument for complex scalars and is plain bilinear
for exact ones. Ambient dimension is capped at 16 (desk scale).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb, sqrt

from .numberfield import FieldElement

MAX_AMBIENT = 16


@lru_cache(maxsize=None)
def index_sets(n: int, m: int):
    return tuple(combinations(range(n), m))


@lru_cache(maxsize=None)
def index_rank(n: int, m: int):
    return {s: i for i, s in enumerate(index_sets(n, m))}


class MultiVector:
    __slots__ = ("n", "m", "coords")

    def __init__(self, n: int, m: int, coords=None):
        if not 0 <= m <= n:
            raise ValueError(f"grade {m} invalid for ambient dimension {n}")
        if n > MAX_AMBIENT:
            raise ValueError(f"ambient dimension {n} exceeds cap {MAX_AMBIENT}")
        self.n = n
        self.m = m
        size = comb(n, m)
        if coords is None:
            coords = [0] * size
        if len(coords) != size:
            raise ValueError(f"expected {size} coordinates, got {len(coords)}")
        self.coords = list(coords)

    def items(self):
        sets = index_sets(self.n, self.m)
        for i, c in enumerate(self.coords):
            if not _is_zero(c):
                yield sets[i], c

    def __add__(self, other):
        _check_compat(self, other)
        return MultiVector(self.n, self.m,
                           [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        _check_compat(self, other)
        return MultiVector(self.n, self.m,
                           [a - b for a, b in zip(self.coords, other.coords)])

    def scale(self, s):
        return MultiVector(self.n, self.m, [c * s for c in self.coords])

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coords)

    def __repr__(self):
        terms = ", ".join(f"{I}: {c}" for I, c in self.items())
        return f"MultiVector(n={self.n}, m={self.m}, {{{terms}}})"


def _is_zero(c) -> bool:
    if isinstance(c, FieldElement):
        return c.is_zero()
    return c == 0


def _check_compat(u: MultiVector, v: MultiVector):
    if u.n != v.n:
        raise ValueError("ambient dimension mismatch")
    if u.m != v.m:
        raise ValueError("grade mismatch")


def from_vector(vec, n=None) -> MultiVector:
    vec = list(vec)
    if n is None:
        n = len(vec)
    return MultiVector(n, 1, vec)


def basis_vector(n: int, i: int) -> MultiVector:
    coords = [0] * n
    coords[i] = 1
    return MultiVector(n, 1, coords)


def _merge_sign(I, J):
    """Sign of sorting the concatenation of disjoint increasing tuples I, J."""
    inv = 0
    for i in I:
        # count elements of J smaller than i
        for j in J:
            if j < i:
                inv += 1
            else:
                break
    return -1 if inv % 2 else 1


def wedge(u: MultiVector, v: MultiVector) -> MultiVector:
    if u.n != v.n:
        raise ValueError("ambient dimension mismatch")
    m = u.m + v.m
    if m > u.n:
        raise ValueError(f"grade overflow: {u.m} + {v.m} > {u.n}")
    out = MultiVector(u.n, m)
    rank = index_rank(u.n, m)
    for I, cu in u.items():
        si = set(I)
        for J, cv in v.items():
            if si.isdisjoint(J):
                K = tuple(sorted(I + J))
                term = cu * cv
                if _merge_sign(I, J) < 0:
                    term = -term
                k = rank[K]
                out.coords[k] = out.coords[k] + term
    # keep the scalar kind uniform: untouched cells become exact zeros when
    # the inputs carry field elements
    sample = next((c for c in (*u.coords, *v.coords) if isinstance(c, FieldElement)), None)
    if sample is not None:
        zero = sample.field.zero()
        out.coords = [zero if (isinstance(c, int) and c == 0) else c for c in out.coords]
    return out


def wedge_rows(rows, n=None) -> MultiVector:
    """Wedge of a sequence of vectors (given as coordinate sequences)."""
    rows = [list(r) for r in rows]
    if n is None:
        n = len(rows[0])
    if not rows:
        raise ValueError("need at least one vector")
    out = from_vector(rows[0], n)
    for r in rows[1:]:
        out = wedge(out, from_vector(r, n))
    return out


def inner(u: MultiVector, v: MultiVector):
    """Coordinatewise inner product on the e_I basis.

    Conjugates the second argument for complex scalars (Hermitian, linear in
    the first slot); exact field scalars get the plain bilinear pairing.
    """
    _check_compat(u, v)
    total = 0
    for a, b in zip(u.coords, v.coords):
        if _is_zero(a) or _is_zero(b):
            continue
        if isinstance(b, FieldElement):
            total = total + a * b
        else:
            total = total + a * complex(b).conjugate()
    return total


def norm(u: MultiVector) -> float:
    """Euclidean norm; floating scalars only (embed exact coefficients first)."""
    total = 0.0
    for c in u.coords:
        if isinstance(c, FieldElement):
            raise TypeError("norm of an exact multivector: embed it first")
        z = complex(c)
        total += z.real * z.real + z.imag * z.imag
    return sqrt(total)


def gen_det(rows, n=None) -> float:
    """Generalized determinant ||X_1 ^ ... ^ X_m|| of floating vectors."""
    return norm(wedge_rows(rows, n))
