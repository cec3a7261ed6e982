"""Heights of K-defined subspaces, phi-complements and duality identities.

Two height routes are provided: the ideal-norm formula
N(a)^{-1} * prod_j ||X_1^(j) ^ ... ^ X_d^(j)|| over all p embeddings, and
the lattice route Delta^{-d} * d(Lambda(S)). The exact part (the ideal
norm) and the floating archimedean factors are kept separate in
HeightParts for error analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exterior
from .numberfield import NumberField
from .subspaces import SubspaceOverK, k_kernel, subspace


@dataclass(frozen=True)
class HeightParts:
    ideal_norm: Fraction
    arch_norms: tuple          # per-embedding wedge norms, length p

    @property
    def value(self) -> float:
        out = 1.0 / float(self.ideal_norm)
        for a in self.arch_norms:
            out *= a
        return out


def height_breakdown(S: SubspaceOverK) -> HeightParts:
    K = S.field
    gens = [c for c in S.plucker.coords if not c.is_zero()]
    nrm = K.ideal_norm(gens)
    arch = []
    for j in range(1, K.p + 1):
        coords = np.array([K.embed(c, j) for c in S.plucker.coords])
        arch.append(float(np.linalg.norm(coords)))
    return HeightParts(nrm, tuple(arch))


def height_ideal(S: SubspaceOverK) -> float:
    return height_breakdown(S).value


def height_lattice(S: SubspaceOverK) -> float:
    """Delta^{-d} times the covolume of the lattice of integral points of S."""
    from .lattice import det_lattice, lattice_of_subspace
    lam = lattice_of_subspace(S)
    return S.field.delta_const ** (-S.d) * det_lattice(lam)


def phi_complement(S: SubspaceOverK) -> SubspaceOverK:
    """Orthogonal complement with respect to the bilinear form phi(x, y) = sum x_i y_i.

    Computed as the exact kernel over K of the rows of S; same field, height
    preserved (tested, not assumed).
    """
    if not 0 < S.d < S.n:
        raise ValueError("phi-complement needs 0 < d < n")
    rows = [list(r) for r in S.basis]
    ker = k_kernel(rows, S.field, S.n)
    return subspace(S.field, ker, S.n)


def conjugate_subspace(S: SubspaceOverK) -> SubspaceOverK:
    """Coefficientwise transport of S to the conjugate field K'."""
    kp, f = S.field.conjugate_field()
    if kp is S.field:
        return S
    rows = [[f(x) for x in row] for row in S.basis]
    return subspace(kp, rows, S.n)


def hermitian_complement(S: SubspaceOverK) -> SubspaceOverK:
    """Hermitian orthogonal complement, defined over K'.

    Its sigma_1 embedding is the <.,.>-orthogonal complement of the sigma_1
    embedding of S; equals the conjugate transport of the phi-complement.
    """
    return conjugate_subspace(phi_complement(S))
