"""Constructive going-down: build B^{e-1} inside B^e with a verifiable certificate.

Both hypothesis branches are implemented, with the real and complex cases
sharing one code path through the embedding type q (1 for a real
distinguished embedding, 2 otherwise). All existence constants are replaced
by measured ratios; the testable content is the scaling exponents.

Outline of a run:
  1.  The Hermitian complement of B is computed over the conjugate field K',
      along with the lattices Lambda(K'^n) and Lambda(B_perp).
  2.  Principal vectors Y_j between A and the embedded B give the frame
      vectors in E^{pn} (two per j when q = 2, one when q = 1).
  3.  A nonzero lattice point X = rho(W) is searched inside the three-part
      convex body; the residual bound starts at the volume threshold implied
      by the box/frame bounds and doubles on failure.
  4.  B^{e-1} is the exact kernel over K of the conjugated rows [W, Z_1..Z_m];
      heights, angles and the per-embedding decompositions W^(j) = U_j + V_j
      are measured and cross-verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .geometry import NumericSubspace, from_basis, principal_data
from .height import height_breakdown, height_ideal, hermitian_complement
from .lattice import (BodySpec, EmbeddedLattice, SearchOutcome, body_contains,
                      body_decompose_orth, det_lattice, find_point_in_body,
                      full_lattice, lattice_of_subspace, lll_reduce)
from .numberfield import NumberField
from .subspaces import (SubspaceOverK, contains_subspace, embed_basis, k_kernel,
                        k_rank, subspace)

FIRST = "first"
SECOND = "second"


@dataclass
class GoingDownInput:
    A: NumericSubspace
    B: SubspaceOverK
    h: int
    y: tuple
    H: float
    c: float = 1.0
    branch: str = FIRST
    H_prime: float | None = None     # second-branch target height

    def __post_init__(self):
        self.y = tuple(float(v) for v in self.y)


@dataclass
class GoingDownCertificate:
    W: tuple                        # exact vector over K'
    Bm1: SubspaceOverK
    branch: str
    q: int
    h: int
    y: tuple
    H: float
    c: float
    H_B: float
    H_Bm1: float
    H_prime: float
    omegas_B: np.ndarray            # omega_i(A, B), i = 1..min(d, e)
    omegas_Bm1: np.ndarray          # omega_i(A, B^{e-1})
    psc_YW: np.ndarray              # |<Y_j, W^(1)>| for j = 1..h
    V_norms: np.ndarray             # ||V_j|| for j = 1..p
    bound_ii: np.ndarray            # per-j frame bound of the final body
    bound_iii: float                # final residual bound (C included)
    residual_scale: float           # doubling factor applied by the search
    H1: float | None                # second-branch schedule value
    ratios: dict
    checks: dict
    warnings: list = field(default_factory=list)
    search: SearchOutcome | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def validate_input(inp: GoingDownInput, H_B: float, q: int) -> list:
    """Enforce the theorem's input invariants; returns hypothesis warnings."""
    d, e = inp.A.dim, inp.B.d
    f_prime = min(d, e - 1)
    if not 1 <= inp.h <= f_prime:
        raise ValueError(f"h={inp.h} outside 1..min(d, e-1)={f_prime}")
    if len(inp.y) != inp.h:
        raise ValueError("need one exponent y_i per i = 1..h")
    if any(inp.y[i] < inp.y[i + 1] - 1e-12 for i in range(inp.h - 1)):
        raise ValueError("y must be nonincreasing")
    if inp.y[-1] < 1.0 / (q * inp.h) - 1e-12:
        raise ValueError(f"y_h={inp.y[-1]} below (qh)^-1={1.0/(q*inp.h)}")
    if inp.c < 1.0:
        raise ValueError("c must be >= 1")
    if inp.H < 1.0:
        raise ValueError("H must be >= 1")
    if H_B > inp.H * (1 + 1e-9):
        raise ValueError(f"H(B)={H_B} exceeds H={inp.H}")
    if inp.branch == FIRST:
        ysum = sum(inp.y)
        for yi in inp.y:
            yp = yi * e / (q * ysum + e - 1)
            if yp < 1.0 / q - 1e-12:
                raise ValueError(f"y'={yp} below q^-1; hypothesis (first branch) not admissible")
    elif inp.branch == SECOND:
        if inp.H_prime is None:
            raise ValueError("second branch needs a target H_prime")
        if inp.H_prime < H_B * (1 - 1e-9):
            raise ValueError("H_prime below H(B); no room for B^{e-1}")
    else:
        raise ValueError(f"unknown branch {inp.branch!r}")
    return []


def build_frame(Y: np.ndarray, h: int, q: int, p: int, n: int) -> np.ndarray:
    """Frame vectors in E^{pn} attached to the principal vectors Y_1..Y_h.

    q = 2: per j the pair (Re Y_j, -Im Y_j, 0, ...) and (Im Y_j, Re Y_j, 0, ...),
    living in the first conjugate-pair block; q = 1: the single (Y_j, 0, ...).
    """
    rows = []
    for j in range(h):
        yj = Y[:, j]
        if q == 2:
            r1 = np.concatenate([yj.real, -yj.imag, np.zeros((p - 2) * n)])
            r2 = np.concatenate([yj.imag, yj.real, np.zeros((p - 2) * n)])
            rows.extend([r1, r2])
        else:
            if np.max(np.abs(yj.imag)) > 1e-9:
                raise ValueError("real case (q=1) with a non-real principal vector")
            rows.append(np.concatenate([yj.real, np.zeros((p - 1) * n)]))
    frame = np.array(rows)
    defect = np.max(np.abs(frame @ frame.T - np.eye(len(rows))))
    if defect > 1e-6:
        raise ValueError(f"T-frame orthonormality defect {defect}")
    return frame


def unit_ball_volume(l: int) -> float:
    return math.pi ** (l / 2) / math.gamma(l / 2 + 1)


def initial_residual_constant(box_vol: float, bound_ii: np.ndarray, base_iii: float,
                              q: int, p: int, n: int, e: int, h: int,
                              delta: float, margin: float = 1.05) -> float:
    """Smallest C such that the body volume clears the Minkowski threshold 2^{pn} Delta^n."""
    free_dim = p * e - q * h
    vol_frames = float(np.prod((2.0 * bound_ii) ** q))
    target = 2.0 ** (p * n) * delta ** n * margin
    base = box_vol * vol_frames * unit_ball_volume(free_dim) * base_iii ** free_dim
    return (target / base) ** (1.0 / free_dim)


def build_body(K_conj: NumberField, n: int, e: int, h: int, q: int,
               H: float, H_B: float, y: tuple, frame: np.ndarray,
               lat_perp: EmbeddedLattice | None, branch: str,
               H1: float | None = None):
    """Body bounds for the requested branch, at the volume-threshold constant.

    Returns (BodySpec, bound_ii array, base_iii, C_init).
    """
    p = K_conj.p
    ysum = sum(y)
    if branch == FIRST:
        bound_ii = np.array([H ** (-(yj - (q * ysum - 1) / (e * p))) * (H / H_B) ** (1.0 / (q * h))
                             for yj in y])
        base_iii = H ** ((q * ysum - 1) / (e * p))
    else:
        bound_ii = np.array([H1 ** (-(1.0 - q * h / (e * p)))] * h)
        base_iii = H1 ** (q * h / (e * p))
    if lat_perp is not None and lat_perp.rank:
        red = lll_reduce(lat_perp)
        box = red.real_basis
        box_vol = det_lattice(red)
    else:
        box = None
        box_vol = 1.0
    c_init = initial_residual_constant(box_vol, bound_ii, base_iii, q, p, n, e, h,
                                       K_conj.delta_const)
    frame_bounds = np.repeat(bound_ii, q)
    body = BodySpec(ambient=n * p, box_basis=box, frame=frame,
                    frame_bounds=frame_bounds, residual_bound=c_init * base_iii)
    return body, bound_ii, base_iii, c_init


def decompose_W(K_conj: NumberField, W, Zs, j: int):
    """Per-embedding orthogonal split W^(j) = U_j + V_j against span(Z^(j)).

    U_j lies in the span of the embedded Z-block; V_j is Hermitian-orthogonal
    to it. No conjugation crosses embeddings.
    """
    wj = np.array([K_conj.embed(x, j) for x in W])
    if not Zs:
        return np.zeros_like(wj), wj, float(np.linalg.norm(wj))
    zj = np.array([[K_conj.embed(x, j) for x in row] for row in Zs])
    qmat, _ = np.linalg.qr(zj.T)
    u = qmat @ (qmat.conj().T @ wj)
    v = wj - u
    return u, v, float(np.linalg.norm(v))


def assemble_Bm1(W, B: SubspaceOverK, Zs=None) -> SubspaceOverK:
    """B^{e-1} = <W, Z_1..Z_m>_perp realized as an exact kernel over K.

    The Hermitian conditions <x, W> = <x, Z_i> = 0 for x in K^n become
    phi(x, conj W) = phi(x, conj Z_i) = 0, and conjugation is the exact
    coefficient transport K' -> K.
    """
    K = B.field
    Kp = W[0].field
    if Zs is None:
        Zs = [list(r) for r in hermitian_complement(B).basis]
    back_field, back = Kp.conjugate_field()
    if back_field is not K:
        raise ValueError("W does not live over the conjugate field of B's field")
    rows = [[back(x) for x in W]] + [[back(x) for x in row] for row in Zs]
    if k_rank(rows) != len(rows):
        raise ValueError("W is dependent on the Z-basis; search must be retried")
    ker = k_kernel(rows, K, B.n)
    return subspace(K, ker, B.n)


def second_branch_schedule(H: float, H_prime: float, h: int, e: int,
                           measured_C: float, q: int = 2) -> float:
    """H1 >= 1 defined by H' = C * H * H1^(qh/e)."""
    if H_prime < measured_C * H * (1 - 1e-9):
        raise ValueError("H_prime below measured_C * H")
    return max(1.0, (H_prime / (measured_C * H)) ** (e / (q * h)))


def _exact_dependence_reject(Zs, Kp):
    z_rows = [list(r) for r in Zs]

    def reject(pt) -> bool:
        vec = pt.vector()
        return k_rank(z_rows + [list(vec)]) == len(z_rows)

    return reject if Zs else (lambda pt: False)


def going_down(inp: GoingDownInput, *, max_doublings: int = 12,
               second_retry_cap: int = 20) -> GoingDownCertificate:
    """Run the construction and return a fully measured certificate."""
    B = inp.B
    K = B.field
    q = K.case_q
    n, e = B.n, B.d
    m = n - e
    p = K.p
    warnings = []

    hb = height_breakdown(B)
    H_B = hb.value
    validate_input(inp, H_B, q)

    Bperp = hermitian_complement(B) if m else None
    Kp = Bperp.field if Bperp is not None else K.conjugate_field()[0]
    Zs = [list(r) for r in Bperp.basis] if Bperp is not None else []

    lat_full = full_lattice(Kp, n)
    lat_perp = lattice_of_subspace(Bperp) if Bperp is not None else None

    B_num = from_basis(embed_basis(B, 1))
    pd = principal_data(inp.A, B_num)
    omegas_B = pd.omegas
    Y = pd.Y_basis

    if inp.branch == FIRST:
        for i in range(inp.h):
            lhs = H_B * omegas_B[i] ** q
            rhs = inp.c ** q * inp.H ** (-(q * inp.y[i] - 1))
            if lhs > rhs * (1 + 1e-9):
                warnings.append(
                    f"hypothesis violated at i={i + 1}: H(B) w_i^q = {lhs:.6g} > {rhs:.6g}; "
                    "conclusions are not guaranteed")

    frame = build_frame(Y, inp.h, q, p, n)

    ysum = sum(inp.y)
    H_prime = (inp.H ** ((e + q * ysum - 1) / e) if inp.branch == FIRST
               else float(inp.H_prime))

    def run_once(H1):
        body, bound_ii, base_iii, c_init = build_body(
            Kp, n, e, inp.h, q, inp.H, H_B, inp.y, frame, lat_perp, inp.branch, H1)
        outcome = find_point_in_body(lat_full, body, max_doublings=max_doublings)
        if outcome.found:
            reject = _exact_dependence_reject(Zs, Kp)
            if reject(outcome.point):
                outcome = find_point_in_body(lat_full, body,
                                             max_doublings=max_doublings, reject=reject)
        if not outcome.found:
            raise RuntimeError(f"lattice search failed: {outcome.message} "
                               f"(C_init={c_init:.4g}, scale={outcome.residual_scale})")
        return body, bound_ii, base_iii, c_init, outcome

    H1 = None
    retries = 0
    if inp.branch == SECOND:
        H1 = second_branch_schedule(inp.H, H_prime, inp.h, e, 1.0, q)

    while True:
        body, bound_ii, base_iii, c_init, outcome = run_once(H1)
        W = tuple(outcome.point.vector())
        Bm1 = assemble_Bm1(W, B, Zs)
        H_Bm1 = height_ideal(Bm1)
        if inp.branch == FIRST or H_Bm1 <= H_prime * (1 + 1e-9):
            break
        retries += 1
        if retries > second_retry_cap:
            warnings.append(f"H(B^(e-1))={H_Bm1:.6g} still above H'={H_prime:.6g} "
                            f"after {second_retry_cap} retries")
            break
        H1 = max(1.0, H1 * 0.8)

    x_rho = outcome.point.rho_vector()
    final_body = outcome.body

    V_norms = np.array([decompose_W(Kp, W, Zs, j)[2] for j in range(1, p + 1)])

    w1 = np.array([Kp.embed(x, 1) for x in W])
    psc_YW = np.abs(Y[:, :inp.h].conj().T @ w1.astype(complex))

    Bm1_num = from_basis(embed_basis(Bm1, 1))
    omegas_Bm1 = principal_data(inp.A, Bm1_num).omegas

    # measured stand-ins for the existence constants
    exp_iii = (q * ysum - 1) / (e * p) if inp.branch == FIRST else q * inp.h / (e * p)
    v_ref = inp.H ** exp_iii if inp.branch == FIRST else H1 ** exp_iii
    ratios = {
        "C5": H_Bm1 / (H_B * inp.H ** ((q * ysum - 1) / e)) if inp.branch == FIRST else None,
        "C9": H_Bm1 / (inp.H * (H1 ** (q * inp.h / e))) if inp.branch == SECOND else None,
        "C14": float(np.max(V_norms) / v_ref),
        "search_C": c_init * outcome.residual_scale,
    }
    f_out = min(inp.A.dim, e - 1)
    if inp.branch == FIRST:
        ycur = [yi * e / (q * ysum + e - 1) for yi in inp.y]
        ratios["C7"] = [
            float(H_Bm1 * omegas_Bm1[i] ** q / (inp.c ** q * H_prime ** (-(q * ycur[i] - 1))))
            for i in range(min(inp.h, f_out))]
    else:
        y0p = e / (q * inp.h)
        ratios["C10"] = [
            float(H_Bm1 * omegas_Bm1[i] ** q
                  / (inp.H ** (q * y0p) * H_prime ** (-(q * y0p - 1))))
            for i in range(min(inp.h, f_out))]

    checks = _certificate_checks(inp, B, Bm1, W, Zs, Kp, x_rho, final_body,
                                 bound_ii, psc_YW, V_norms, H_Bm1, H_prime, q)

    return GoingDownCertificate(
        W=W, Bm1=Bm1, branch=inp.branch, q=q, h=inp.h, y=inp.y, H=inp.H, c=inp.c,
        H_B=H_B, H_Bm1=H_Bm1, H_prime=H_prime,
        omegas_B=omegas_B, omegas_Bm1=omegas_Bm1, psc_YW=psc_YW, V_norms=V_norms,
        bound_ii=bound_ii, bound_iii=final_body.residual_bound,
        residual_scale=outcome.residual_scale, H1=H1,
        ratios=ratios, checks=checks, warnings=warnings, search=outcome)


def _certificate_checks(inp, B, Bm1, W, Zs, Kp, x_rho, body, bound_ii,
                        psc_YW, V_norms, H_Bm1, H_prime, q) -> dict:
    checks = {}
    checks["dimension"] = Bm1.d == B.d - 1
    checks["defined_over_K"] = Bm1.field is B.field
    checks["containment_exact"] = contains_subspace(B, Bm1)
    z_rows = [list(r) for r in Zs]
    checks["w_independent"] = (k_rank(z_rows + [list(W)]) == len(Zs) + 1)
    checks["body_reverified"] = body_contains(x_rho, body, decompose=body_decompose_orth)
    checks["psc_bound"] = bool(np.all(psc_YW <= q * bound_ii * (1 + 1e-6) + 1e-12))

    # height factorization ||W^(i) ^ Z^(i)|| = ||V_i|| * ||Z^(i)|| per embedding
    from . import exterior
    ok = True
    for j in range(1, Kp.p + 1):
        zj = [[Kp.embed(x, j) for x in row] for row in Zs]
        wj = [Kp.embed(x, j) for x in W]
        lhs = exterior.gen_det([wj] + zj, B.n)
        rhs = V_norms[j - 1] * (exterior.gen_det(zj, B.n) if Zs else 1.0)
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs), abs(rhs)):
            ok = False
    checks["height_factorization"] = ok

    # N(b) >= N(a) for the ideals of the Z-matrix and the [W; Z]-matrix over K'
    from .exterior import wedge_rows
    if Zs:
        pl_a = wedge_rows(z_rows, B.n)
        na = Kp.ideal_norm([c for c in pl_a.coords if not c.is_zero()])
    else:
        na = 1
    pl_b = wedge_rows([list(W)] + z_rows, B.n)
    nb = Kp.ideal_norm([c for c in pl_b.coords if not c.is_zero()])
    checks["ideal_norm_growth"] = nb >= na

    if inp.branch == SECOND:
        checks["height_below_target"] = H_Bm1 <= H_prime * (1 + 1e-9)
    return checks
