"""Exact arithmetic in a number field K, its complex embeddings, and ideal norms.

A field is described by a monic irreducible minimal polynomial of degree p
over Q, an integral basis (columns expressed in the power basis of theta),
and its discriminant. Embeddings are ordered with conjugate pairs first
(sigma_{j+1} = conjugate of sigma_j for odd j <= 2*r2 - 1) and real
embeddings last; sigma_1 is the distinguished embedding of K into C.

Elements carry exact rational coordinates in the power basis; all ring
arithmetic and ideal norms are exact. Only embeddings are floating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import TOL
from .exact import (frac_det, frac_inv, hnf_rows, lcm_list, parse_rational)

_ROOT_IMAG_TOL = 1e-10


class FieldElement:
    """Element of a NumberField with exact power-basis coordinates."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "NumberField", coeffs):
        self.field = field
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if len(self.coeffs) != field.p:
            raise ValueError(f"expected {field.p} coordinates, got {len(self.coeffs)}")

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.coeffs == other.coeffs
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(self, o.inv())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(o, self.inv())

    def inv(self) -> "FieldElement":
        return self.field._inv(self)

    def __repr__(self):
        return f"FieldElement({self.field.name}, {[str(c) for c in self.coeffs]})"


def _poly_divmod(num, den):
    """Quotient and remainder of Fraction coefficient polynomials (ascending order)."""
    num = list(num)
    qdeg = len(num) - len(den)
    if qdeg < 0:
        return [], num
    quot = [Fraction(0)] * (qdeg + 1)
    lead = den[-1]
    for k in range(qdeg, -1, -1):
        c = num[k + len(den) - 1] / lead
        quot[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    while num and not num[-1]:
        num.pop()
    return quot, num


class NumberField:
    """A number field with ordered embeddings and an integral basis.

    Parameters
    ----------
    name : display name.
    min_poly : monic minimal polynomial, ascending coefficients c0..cp (cp = 1).
    integral_basis : p x p rational matrix, columns = integral basis in the
        power basis of theta.
    disc : field discriminant (integer).
    roots : optional explicit root ordering (used for conjugate fields);
        when omitted roots are computed and ordered canonically.
    """

    def __init__(self, name, min_poly, integral_basis, disc, roots=None):
        self.name = name
        coeffs = [parse_rational(c) for c in min_poly]
        if coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.min_poly = tuple(coeffs)
        self.p = len(coeffs) - 1
        self.disc = int(disc)
        self.integral_basis = tuple(tuple(parse_rational(x) for x in row)
                                    for row in integral_basis)
        if len(self.integral_basis) != self.p or any(len(r) != self.p for r in self.integral_basis):
            raise ValueError("integral basis must be p x p")
        self._ib_inv = frac_inv([list(r) for r in self.integral_basis])

        if roots is None:
            roots = self._ordered_roots()
        self.roots = np.asarray(roots, dtype=complex)
        if len(self.roots) != self.p:
            raise ValueError("need p roots")
        self.r1 = int(np.sum(np.abs(self.roots.imag) <= _ROOT_IMAG_TOL))
        self.r2 = (self.p - self.r1) // 2
        self.delta_const = float(2.0 ** (-self.r2) * np.sqrt(abs(self.disc)))
        self.case_q = 1 if abs(self.roots[0].imag) <= _ROOT_IMAG_TOL else 2

        # theta^(p+k) in the power basis, for k = 0..p-2
        red0 = [-c for c in self.min_poly[:-1]]
        table = [red0]
        for _ in range(self.p - 2):
            prev = table[-1]
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            table.append([s + top * r for s, r in zip(shifted, red0)])
        self._red_table = table

        # Vandermonde powers of the roots, for embeddings
        self._emb = np.vander(self.roots, N=self.p, increasing=True)
        self._check_invariants()
        self._conjugate: "NumberField | None" = None

    # -- construction helpers -------------------------------------------------

    def _ordered_roots(self):
        poly = np.array([float(c) for c in self.min_poly[::-1]])
        rts = np.roots(poly)
        # one Newton polish step
        dpoly = np.polyder(poly)
        rts = rts - np.polyval(poly, rts) / np.polyval(dpoly, rts)
        real = sorted([r.real for r in rts if abs(r.imag) <= _ROOT_IMAG_TOL], reverse=True)
        upper = sorted([r for r in rts if r.imag > _ROOT_IMAG_TOL],
                       key=lambda z: (-z.real, -z.imag))
        ordered = []
        for z in upper:
            ordered.extend([z, z.conjugate()])
        ordered.extend(real)
        return ordered

    def _check_invariants(self):
        if self.p != self.r1 + 2 * self.r2:
            raise ValueError("signature does not match degree")
        for j in range(0, 2 * self.r2, 2):
            if abs(self.roots[j + 1] - np.conj(self.roots[j])) > 1e-8:
                raise ValueError("roots not ordered in conjugate pairs")
        for j in range(2 * self.r2, self.p):
            if abs(self.roots[j].imag) > _ROOT_IMAG_TOL:
                raise ValueError("real embeddings must come last")
        # |det(sigma_j(b_i))|^2 = |disc| cross-check
        emb_basis = np.array([[complex(self.embed(b, j + 1)) for b in self.basis_elements()]
                              for j in range(self.p)])
        det = abs(np.linalg.det(emb_basis)) ** 2
        if abs(det - abs(self.disc)) > 1e-6 * max(1.0, abs(self.disc)):
            raise ValueError(f"discriminant mismatch: |det|^2 = {det}, |disc| = {abs(self.disc)}")

    # -- element constructors --------------------------------------------------

    def element(self, coeffs) -> FieldElement:
        return FieldElement(self, [parse_rational(c) for c in coeffs])

    def from_rational(self, q) -> FieldElement:
        return FieldElement(self, [parse_rational(q)] + [0] * (self.p - 1))

    def zero(self) -> FieldElement:
        return self.from_rational(0)

    def one(self) -> FieldElement:
        return self.from_rational(1)

    def theta(self) -> FieldElement:
        if self.p == 1:
            return self.zero()
        return FieldElement(self, [0, 1] + [0] * (self.p - 2))

    def basis_elements(self):
        """Integral basis as FieldElements (columns of the basis matrix)."""
        return [FieldElement(self, [self.integral_basis[i][j] for i in range(self.p)])
                for j in range(self.p)]

    # -- exact ring arithmetic -------------------------------------------------

    def _mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        prod = [Fraction(0)] * (2 * p - 1)
        for i, ai in enumerate(a.coeffs):
            if ai:
                for j, bj in enumerate(b.coeffs):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:p]
        for k in range(p, 2 * p - 1):
            c = prod[k]
            if c:
                red = self._red_table[k - p]
                for i in range(p):
                    out[i] += c * red[i]
        return FieldElement(self, out)

    def _inv(self, a: FieldElement) -> FieldElement:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # extended Euclid in Q[x]: s*a + t*f = 1 modulo the minimal polynomial
        f = list(self.min_poly)
        g = list(a.coeffs)
        while g and not g[-1]:
            g.pop()
        r0, r1 = f, g
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            s = _poly_sub(s0, _poly_mul(q, s1))
            r0, s0 = r1, s1
            r1, s1 = r, s
            if not r1:
                raise ZeroDivisionError("element not invertible (reducible min_poly?)")
        c = r1[0]
        inv_coeffs = [x / c for x in s1]
        inv_coeffs += [Fraction(0)] * (self.p - len(inv_coeffs))
        return FieldElement(self, inv_coeffs[:self.p])

    def mult_matrix(self, x: FieldElement):
        """Matrix of multiplication by x on K in the power basis (columns = x*theta^k)."""
        cols = []
        cur = x
        theta = self.theta()
        for k in range(self.p):
            cols.append(cur.coeffs)
            if k + 1 < self.p:
                cur = self._mul(cur, theta) if self.p > 1 else cur
        return [[cols[j][i] for j in range(self.p)] for i in range(self.p)]

    # -- embeddings ------------------------------------------------------------

    def embed(self, x: FieldElement, i: int) -> complex:
        """Image of x under sigma_i (1-based index)."""
        if not 1 <= i <= self.p:
            raise IndexError(f"embedding index {i} out of range 1..{self.p}")
        row = self._emb[i - 1]
        return complex(sum(float(c) * row[k] for k, c in enumerate(x.coeffs) if c))

    def embed_all(self, x: FieldElement) -> np.ndarray:
        cf = np.array([float(c) for c in x.coeffs])
        return self._emb @ cf

    def real_coords(self, x: FieldElement) -> np.ndarray:
        """The vector (x^[1], ..., x^[p]): Re/Im on conjugate pairs, value on real embeddings."""
        emb = self.embed_all(x)
        out = np.empty(self.p)
        for i in range(self.p):
            if i < 2 * self.r2:
                out[i] = emb[i].real if i % 2 == 0 else emb[i].imag
            else:
                out[i] = emb[i].real
        return out

    # -- norms -----------------------------------------------------------------

    def norm_elem(self, x: FieldElement) -> Fraction:
        """Field norm N_{K/Q}(x), exact (determinant of the multiplication map)."""
        return frac_det(self.mult_matrix(x))

    def ideal_norm(self, gens) -> Fraction:
        """Norm of the fractional ideal generated by `gens` (exact, via HNF index).

        The generators are scaled to be integral, the Z-module spanned by
        {g * b_i} is written in integral-basis coordinates, and its index in
        O_K is the determinant of the Hermite normal form; the scaling is
        undone through its p-th power.
        """
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            raise ValueError("all generators are zero")
        basis = self.basis_elements()
        rows = []
        for g in gens:
            for b in basis:
                prod = self._mul(g, b)
                coords = [sum(self._ib_inv[i][k] * prod.coeffs[k] for k in range(self.p))
                          for i in range(self.p)]
                rows.append(coords)
        scale = lcm_list([c.denominator for row in rows for c in row])
        int_rows = [[int(c * scale) for c in row] for row in rows]
        h = hnf_rows(int_rows)
        if len(h) != self.p:
            raise ValueError("generated module has deficient rank")
        det = 1
        pivots = []
        col = 0
        for row in h:
            while col < self.p and row[col] == 0:
                col += 1
            pivots.append(row[col])
        for piv in pivots:
            det *= piv
        return Fraction(det, scale ** self.p)

    # -- conjugate field ---------------------------------------------------------

    def conjugate_field(self):
        """The complex conjugate field K' and the coefficient-transport map K -> K'.

        K' shares min_poly, integral basis and discriminant; its distinguished
        root is the conjugate of this field's, so transporting coefficients
        conjugates the sigma_1 image. For totally real fields (or a real
        distinguished embedding) K' is K and the map is the identity.
        """
        if self.case_q == 1:
            return self, lambda x: x
        if self._conjugate is None:
            conj = NumberField(self.name + "'", self.min_poly,
                               self.integral_basis, self.disc,
                               roots=np.conj(self.roots))
            conj._conjugate = self
            self._conjugate = conj
        kp = self._conjugate
        return kp, lambda x: FieldElement(kp, x.coeffs)

    def __repr__(self):
        return (f"NumberField({self.name}: p={self.p}, r1={self.r1}, r2={self.r2}, "
                f"disc={self.disc})")


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    while out and not out[-1]:
        out.pop()
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while out and not out[-1]:
        out.pop()
    return out


# -- built-in registry ------------------------------------------------------------

def _make_Q():
    return NumberField("Q", [0, 1], [[1]], 1)


def _make_Qi():
    return NumberField("Q(i)", [1, 0, 1], [[1, 0], [0, 1]], -4)


def _make_Qsqrtm2():
    return NumberField("Q(sqrt-2)", [2, 0, 1], [[1, 0], [0, 1]], -8)


def _make_Qzeta3():
    return NumberField("Q(zeta3)", [1, 1, 1], [[1, 0], [0, 1]], -3)


def _make_Qsqrt2():
    return NumberField("Q(sqrt2)", [-2, 0, 1], [[1, 0], [0, 1]], 8)


def _make_Qsqrt5():
    # theta = (1 + sqrt 5)/2, power basis is integral
    return NumberField("Q(sqrt5)", [-1, -1, 1], [[1, 0], [0, 1]], 5)


def _make_Qzeta5():
    return NumberField("Q(zeta5)", [1, 1, 1, 1, 1], np.eye(4, dtype=int).tolist(), 125)


_BUILTINS = {
    "Q": _make_Q,
    "Q(i)": _make_Qi,
    "Q(sqrt-2)": _make_Qsqrtm2,
    "Q(zeta3)": _make_Qzeta3,
    "Q(sqrt2)": _make_Qsqrt2,
    "Q(sqrt5)": _make_Qsqrt5,
    "Q(zeta5)": _make_Qzeta5,
}

_cache: dict[str, NumberField] = {}


def builtin_field_names():
    return sorted(_BUILTINS)


def get_field(name: str) -> NumberField:
    if name not in _BUILTINS:
        raise KeyError(f"unknown built-in field {name!r}; known: {builtin_field_names()}")
    if name not in _cache:
        _cache[name] = _BUILTINS[name]()
    return _cache[name]


def field_from_spec(spec) -> NumberField:
    """Field spec: {"builtin": name} or {"min_poly": [...], "integral_basis": [[...]], "disc": n}.

    Rationals may be given as ints or "num/den" strings.
    """
    if isinstance(spec, str):
        return get_field(spec)
    if "builtin" in spec:
        return get_field(spec["builtin"])
    return NumberField(spec.get("name", "user"),
                       [parse_rational(c) for c in spec["min_poly"]],
                       [[parse_rational(x) for x in row] for row in spec["integral_basis"]],
                       int(spec["disc"]))
