"""Exact integer and rational matrix routines: HNF, Smith form, kernels.

Everything works on plain Python ints / Fractions carried in lists of
lists; inputs are never mutated. Matrix sizes in this project stay small
(a few dozen rows), so clarity wins over asymptotic cleverness.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def parse_rational(x) -> Fraction:
    """Accept ints, Fractions, floats of integral value, or 'num/den' strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        if x != int(x):
            raise ValueError(f"non-integral float {x!r} is not an exact rational")
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def frac_rows(rows):
    return [[Fraction(x) for x in row] for row in rows]


def frac_det(rows) -> Fraction:
    """Determinant of a square matrix over Q by fraction Gaussian elimination."""
    a = frac_rows(rows)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def frac_inv(rows):
    """Inverse of a square matrix over Q (Gauss-Jordan). Raises on singular input."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def frac_matmul(a, b):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def hnf_with_transform(rows):
    """Row Hermite normal form: returns (H, U) with U unimodular and U @ A = H.

    Pivots are positive; entries above a pivot are reduced modulo it. Zero
    rows (if any) end up at the bottom.
    """
    h = [list(map(int, row)) for row in rows]
    r = len(h)
    c = len(h[0]) if r else 0
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    row = 0
    for col in range(c):
        if row >= r:
            break
        # chain gcd eliminations until at most one nonzero entry at/below `row`
        while True:
            nz = [i for i in range(row, r) if h[i][col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: (abs(h[i][col]), i))
            i0 = nz[0]
            for i in nz[1:]:
                q = h[i][col] // h[i0][col]
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[i0])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[i0])]
        nz = [i for i in range(row, r) if h[i][col] != 0]
        if not nz:
            continue
        i0 = nz[0]
        if i0 != row:
            h[row], h[i0] = h[i0], h[row]
            u[row], u[i0] = u[i0], u[row]
        if h[row][col] < 0:
            h[row] = [-x for x in h[row]]
            u[row] = [-x for x in u[row]]
        piv = h[row][col]
        for i in range(row):
            q = h[i][col] // piv
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[row])]
                u[i] = [x - q * y for x, y in zip(u[i], u[row])]
        row += 1
    return h, u


def hnf_rows(rows):
    """Nonzero rows of the row Hermite normal form of an integer matrix."""
    h, _ = hnf_with_transform(rows)
    return [row for row in h if any(row)]


def integer_kernel(rows):
    """Basis of the saturated integer kernel {x in Z^n : A @ x = 0}.

    A is given as a list of rows (k x n); the result is a list of length-n
    integer vectors forming a basis of the kernel lattice.
    """
    if not rows:
        raise ValueError("empty matrix")
    n = len(rows[0])
    m = [[rows[i][j] for i in range(len(rows))] for j in range(n)]  # transpose, n x k
    h, u = hnf_with_transform(m)
    return [u[i] for i in range(n) if not any(h[i])]


def smith_diagonal(rows):
    """Diagonal of the Smith normal form of an integer matrix (nonneg, sorted by position)."""
    a = [list(map(int, row)) for row in rows]
    r = len(a)
    c = len(a[0]) if r else 0
    diag = []
    top = 0
    while top < min(r, c):
        # find a nonzero pivot
        piv = None
        for i in range(top, r):
            for j in range(top, c):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        a[top], a[i] = a[i], a[top]
        for row in a:
            row[top], row[j] = row[j], row[top]
        while True:
            # clear column `top`
            done = True
            for i in range(top + 1, r):
                if a[i][top] != 0:
                    done = False
                    q = a[i][top] // a[top][top]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][top] != 0:
                        a[top], a[i] = a[i], a[top]
            # clear row `top`
            for j in range(top + 1, c):
                if a[top][j] != 0:
                    done = False
                    q = a[top][j] // a[top][top]
                    for row in a:
                        row[j] -= q * row[top]
                    if a[top][j] != 0:
                        for row in a:
                            row[top], row[j] = row[j], row[top]
            if done:
                break
        diag.append(abs(a[top][top]))
        top += 1
    return diag


def lcm_list(values) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
