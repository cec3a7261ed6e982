"""Approximation exponents by bounded-height enumeration of K-subspaces.

record_curve builds the Pareto frontier of (H(S), H(S) * omega_1^q(u, S))
over K-defined subspaces of a fixed dimension. Lines are enumerated
directly from the lattice rho(O_K^{n+1}); subspaces of codimension one go
through their Hermitian-complement lines over K' (same heights by duality);
intermediate dimensions fall back to spans of tuples of short vectors.

Enumeration completeness is heuristic: a subspace of height <= Q is sought
among vectors of rho-norm <= kappa * Q^(1/(dim*p)) (safety factor kappa),
processed in annuli of nondecreasing norm with a frontier-driven pruning
cut. The coverage report carries the bound actually used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .config import TOL
from .geometry import from_basis, proj_dist
from .height import height_breakdown, hermitian_complement
from .lattice import enumerate_quadratic, full_lattice
from .numberfield import NumberField
from .subspaces import SubspaceOverK, k_rank, subspace

INF = float("inf")


@dataclass(frozen=True)
class RecordPoint:
    H: float
    D: float                      # H * omega_1^q
    plucker: str
    subspace: SubspaceOverK | None = field(default=None, compare=False, repr=False)


@dataclass
class RecordCurve:
    j: int
    u: np.ndarray
    field_name: str
    q: int
    Qmax: float
    records: list
    exact_zero: bool
    coverage: dict


def _embedding_maps(K: NumberField, lat) -> list:
    """Complex matrices E_j mapping integer lattice coordinates to v^(j)."""
    p = K.p
    n1 = lat.n
    basis_emb = np.array([[K.embed(b, j + 1) for b in K.basis_elements()]
                          for j in range(p)])  # p x p
    maps = []
    for j in range(p):
        E = np.zeros((n1, n1 * p), dtype=complex)
        for t in range(n1):
            E[t, t * p:(t + 1) * p] = basis_emb[j]
        maps.append(E)
    return maps


def _vector_elements(K: NumberField, coords, n1: int):
    basis = K.basis_elements()
    p = K.p
    out = []
    for t in range(n1):
        c = coords[t * p:(t + 1) * p]
        out.append(sum((int(c[s]) * basis[s] for s in range(p)), K.zero()))
    return out


def _canonical_line_key(vec):
    lead = next(x for x in vec if not x.is_zero())
    inv = lead.inv()
    return tuple((x * inv).coeffs for x in vec)


def _line_height(K: NumberField, vec, emb_vs) -> float:
    nrm = K.ideal_norm([x for x in vec if not x.is_zero()])
    arch = 1.0
    for v in emb_vs:
        arch *= float(np.linalg.norm(v))
    return arch / float(nrm)


def _wedge_cut_threshold(p: int, q: int, dmin: float, slack: float, r_total: float) -> float:
    """Upper bound on the sigma_1 cut form for candidates that can still beat dmin.

    The cut form is ||u ^ v^(1)||^2 (or |<u, v^(1)>|^2 in the dual route).
    Derivations use N(a) >= 1 for integral vectors and coordinate-norm
    products >= 1; fields of higher degree get conservative radius-dependent
    factors (evaluated at the total radius, so the threshold only shrinks as
    the frontier improves and skipping already-covered annuli stays sound).
    """
    t = slack * dmin
    if p == 1:
        return t * t
    if q == 2:
        return t * r_total ** (p - 2)
    return (t * r_total ** (p - 1)) ** 2


def _line_candidate_stream(K: NumberField, n1: int, Qmax: float, kappa: float,
                           cut_factor: np.ndarray | None, cut_threshold,
                           max_nodes: int = 20_000_000):
    """Integer coordinate vectors in annuli of nondecreasing rho-norm.

    cut_factor holds real rows F with cut(c) = ||F c||^2; cut_threshold maps
    the current frontier minimum to a bound on the cut. Yields (coords, r_hi);
    the consumer sends back the frontier minimum through the generator
    protocol. Thresholds only shrink over time, so skipping the already
    covered inner ball stays sound.
    """
    from .lattice import lll_transform

    lat = full_lattice(K, n1)
    rho_rows = lat.gen_rho.T                        # ||rho(c)||^2 = ||rho_rows @ c||^2
    rank = rho_rows.shape[1]
    eye = np.eye(rank)
    r_total = kappa * Qmax ** (1.0 / K.p)
    r_lo = 0.0
    r_hi = min(2.0, r_total)
    dmin = INF
    while True:
        if cut_factor is not None and dmin < INF:
            thr = max(cut_threshold(dmin, r_hi), 1e-300)
            fac = np.vstack([rho_rows / r_hi, cut_factor / math.sqrt(thr)])
            bound = 2.0
        else:
            fac = rho_rows / r_hi
            bound = 1.0
        # align the working basis with the (possibly needle-shaped) ellipsoid
        T = lll_transform(eye, metric_factor=fac)
        Tf = T.astype(float)
        for val, b in enumerate_quadratic(None, bound * (1 + 1e-9),
                                          max_nodes=max_nodes, factor=fac @ Tf.T):
            c = np.array(b, dtype=object) @ T
            cf = c.astype(float)
            nrm2 = float(np.sum((rho_rows @ cf) ** 2))
            if nrm2 <= r_lo ** 2 * (1 - 1e-12):
                continue
            newmin = yield (c, r_hi)
            if newmin is not None and newmin < dmin:
                dmin = newmin
        if r_hi >= r_total:
            return
        r_lo, r_hi = r_hi, min(r_hi * 2.0, r_total)


def _pareto(points):
    """Pareto frontier of (H, D) pairs: heights ascending, D strictly decreasing."""
    pts = sorted(points, key=lambda r: (r[0], r[1]))
    out = []
    best = INF
    for rec in pts:
        if rec[1] < best:
            out.append(rec)
            best = rec[1]
    return out


def record_curve(target, K: NumberField, j: int, Qmax: float, *,
                 kappa: float = 4.0, prune_slack: float = 8.0,
                 exact_target=None, max_nodes: int = 20_000_000) -> RecordCurve:
    """Pareto frontier of (H(S), H(S) * omega_1^q(u, S)) over dim-(j+1) K-subspaces.

    `target` is the direction u (real or complex); `exact_target` optionally
    gives u as an exact K-vector, enabling exact detection of omega = infinity.
    """
    q = K.case_q
    u = np.asarray(target, dtype=complex).ravel()
    u = u / np.linalg.norm(u)
    n1 = len(u)
    dim = j + 1
    if not 1 <= dim <= n1 - 1:
        raise ValueError(f"dimension {dim} out of range for ambient {n1}")

    if dim == 1:
        return _record_curve_lines(u, K, j, Qmax, kappa, prune_slack,
                                   exact_target, max_nodes, dual=False)
    if dim == n1 - 1:
        return _record_curve_lines(u, K, j, Qmax, kappa, prune_slack,
                                   exact_target, max_nodes, dual=True)
    return _record_curve_generic(u, K, j, Qmax, kappa, exact_target)


def _record_curve_lines(u, K, j, Qmax, kappa, prune_slack, exact_target,
                        max_nodes, dual: bool) -> RecordCurve:
    q = K.case_q
    n1 = len(u)
    Kw = K.conjugate_field()[0] if dual else K       # enumeration field
    lat = full_lattice(Kw, n1)
    emaps = _embedding_maps(Kw, lat)
    E1 = emaps[0]
    if dual:
        crows = (u.conj()[None, :] @ E1)             # cut |<v, u>|^2
    else:
        # orthonormal complement of u: cut ||u ^ v||^2 = ||Q^H v||^2
        uu, *_ = np.linalg.svd(u.reshape(-1, 1), full_matrices=True)
        crows = uu[:, 1:].conj().T @ E1
    cut_factor = np.vstack([crows.real, crows.imag])

    exact_rows = [list(exact_target)] if (exact_target is not None and not dual) else None
    r_total = kappa * Qmax ** (1.0 / Kw.p)

    def threshold(dmin, _r_hi):
        return _wedge_cut_threshold(Kw.p, q, dmin, prune_slack, r_total)

    stream = _line_candidate_stream(Kw, n1, Qmax, kappa, cut_factor, threshold,
                                    max_nodes=max_nodes)
    seen = set()
    collected = []
    dmin = INF
    exact_zero = False
    vec_count = 0
    try:
        item = next(stream)
        while True:
            coords, r_hi = item
            vec_count += 1
            vec = _vector_elements(Kw, coords, n1)
            key = _canonical_line_key(vec)
            if key in seen:
                item = stream.send(dmin if dmin < INF else None)
                continue
            seen.add(key)
            emb_vs = [emaps[jj] @ coords.astype(float) for jj in range(Kw.p)]
            H = _line_height(Kw, vec, emb_vs)
            if H <= Qmax * (1 + 1e-9):
                v1 = emb_vs[0]
                if dual:
                    om = abs(np.vdot(u, v1)) / np.linalg.norm(v1)
                else:
                    om = proj_dist(u, v1)
                D = H * om ** q
                is_zero = False
                if exact_rows is not None:
                    if dual:
                        # u in S  <=>  phi(u, conj v) = 0 exactly
                        _, back = Kw.conjugate_field()
                        s = K.zero()
                        for ut, vt in zip(exact_target, vec):
                            s = s + ut * back(vt)
                        is_zero = s.is_zero()
                    else:
                        is_zero = k_rank(exact_rows + [vec]) == 1
                if is_zero:
                    D = 0.0
                    exact_zero = True
                collected.append((H, D, vec))
                if D < dmin:
                    dmin = D
            if exact_zero:
                break
            item = stream.send(dmin if dmin < INF else None)
    except StopIteration:
        pass

    frontier = _pareto(collected)
    records = []
    for H, D, vec in frontier:
        if dual:
            S = hermitian_complement(subspace(Kw, [vec], n1))
        else:
            S = subspace(K, [vec], n1)
        records.append(RecordPoint(H, D, S.plucker_str(), S))
    coverage = {"radius": kappa * Qmax ** (1.0 / Kw.p), "kappa": kappa,
                "prune_slack": prune_slack, "vectors_seen": vec_count,
                "route": "dual-lines" if dual else "lines",
                "note": "heuristic completeness: spans of vectors with rho-norm "
                        "<= kappa * Q^(1/p), frontier-pruned"}
    return RecordCurve(j, u, K.name, q, Qmax, records, exact_zero, coverage)


def _record_curve_generic(u, K, j, Qmax, kappa, exact_target) -> RecordCurve:
    q = K.case_q
    n1 = len(u)
    dim = j + 1
    records = []
    exact_zero = False
    count = 0
    for S in enumerate_subspaces(K, n1, dim, Qmax, kappa=kappa):
        count += 1
        H = height_breakdown(S).value
        om = 1.0
        onb = from_basis(np.array([[complex(K.embed(x, 1)) for x in row] for row in S.basis]))
        resid = u - onb.onb @ (onb.onb.conj().T @ u)
        om = float(np.linalg.norm(resid))
        D = H * om ** q
        if exact_target is not None and k_rank([list(r) for r in S.basis] + [list(exact_target)]) == dim:
            D = 0.0
            exact_zero = True
        records.append((H, D, S))
    frontier = _pareto(records)
    pts = [RecordPoint(H, D, S.plucker_str(), S) for H, D, S in frontier]
    coverage = {"radius": kappa * Qmax ** (1.0 / (dim * K.p)), "kappa": kappa,
                "subspaces_seen": count, "route": "tuple-spans",
                "note": "heuristic completeness"}
    return RecordCurve(j, u, K.name, q, Qmax, pts, exact_zero, coverage)


def enumerate_subspaces(K: NumberField, n_plus_1: int, dim: int, Qmax: float, *,
                        kappa: float = 4.0, max_nodes: int = 20_000_000):
    """Stream of distinct K-subspaces of the given dimension with H <= Qmax (1 + slack).

    dim = 1 streams primitive projective representatives of lattice points by
    nondecreasing rho-norm; dim >= 2 streams spans of tuples of the
    enumerated short vectors. Deduplication is exact, by the projectively
    normalized Plucker coordinates (which also quotients by the unit group).
    """
    n1 = n_plus_1
    if not 1 <= dim <= n1 - 1:
        raise ValueError("dimension out of range")
    lat = full_lattice(K, n1)
    gram = lat.gram
    radius = kappa * Qmax ** (1.0 / (dim * K.p))
    cands = []
    for val, a in enumerate_quadratic(gram / radius ** 2, 1.0 + 1e-9, max_nodes=max_nodes):
        cands.append((round(float(val), 12), a))
    cands.sort()
    vecs = []
    seen_lines = set()
    for _, a in cands:
        coords = np.array(a)
        vec = _vector_elements(K, coords, n1)
        key = _canonical_line_key(vec)
        if key in seen_lines:
            continue
        seen_lines.add(key)
        vecs.append(vec)
    if dim == 1:
        for vec in vecs:
            S = subspace(K, [vec], n1)
            if height_breakdown(S).value <= Qmax * (1 + 1e-9):
                yield S
        return
    seen = set()
    for tup in combinations(range(len(vecs)), dim):
        rows = [vecs[i] for i in tup]
        if k_rank(rows) != dim:
            continue
        S = subspace(K, rows, n1)
        key = S.plucker_key()
        if key in seen:
            continue
        seen.add(key)
        if height_breakdown(S).value <= Qmax * (1 + 1e-9):
            yield S


def estimate_exponents(curve: RecordCurve, *, window_decades: float | None = None,
                       min_records: int = 5):
    """(omega_est, omega_hat_est, diagnostics) from a record curve.

    omega_est: max over frontier points of -log(D)/log(H) inside the top
    window (limsup surrogate). omega_hat_est: min over the staircase's upper
    envelope, evaluating each record at the next record's height (liminf
    surrogate). Infinite as soon as an exact zero was recorded.
    """
    if window_decades is None:
        window_decades = TOL.slope_window_decades
    diag = {"window_decades": window_decades, "n_records": len(curve.records)}
    if curve.exact_zero:
        diag["exact_zero"] = True
        return INF, INF, diag
    if len(curve.records) < min_records:
        raise ValueError(f"need >= {min_records} records, have {len(curve.records)}")
    recs = [(r.H, r.D) for r in curve.records if r.H > 1.0 + 1e-9]
    floor = curve.Qmax / 10.0 ** window_decades

    point_exps = [(-math.log(D) / math.log(H), H) for H, D in recs if D > 0]
    in_window = [e for e, H in point_exps if H >= floor]
    omega_est = max(in_window) if in_window else max(e for e, _ in point_exps)

    envelope = []
    for (H1, D1), (H2, _) in zip(recs, recs[1:]):
        if H2 >= floor and D1 > 0:
            envelope.append(-math.log(D1) / math.log(H2))
    lastH, lastD = recs[-1]
    if lastD > 0 and curve.Qmax > lastH:
        envelope.append(-math.log(lastD) / math.log(curve.Qmax))
    omega_hat_est = min(envelope) if envelope else omega_est

    # decade-stability diagnostics
    per_decade = {}
    for e, H in point_exps:
        dec = int(math.floor(math.log10(max(H, 1.0 + 1e-12))))
        per_decade.setdefault(dec, []).append(e)
    decade_max = {d: max(v) for d, v in sorted(per_decade.items())}
    deltas = [b - a for a, b in zip(list(decade_max.values()), list(decade_max.values())[1:])]
    diag.update({"decade_max": decade_max, "decade_deltas": deltas,
                 "two_decade_estimate": max((e for e, H in point_exps
                                             if H >= curve.Qmax / 100.0), default=omega_est)})
    return omega_est, omega_hat_est, diag


def check_chain(estimates: dict, n: int, *, noise: float = 0.0) -> dict:
    """Evaluate the transference inequality chain on per-j exponent estimates.

    For j = 1..n-1:  j w_j / (w_j + j + 1) <= w_{j-1} <= ((n-j) w_j - 1)/(n-j+1),
    the left ratio read as j when w_j is infinite; also w_0 >= 1/n.
    """
    rows = []
    w0 = estimates.get(0)
    base_ok = w0 is not None and (w0 >= 1.0 / n - noise)
    for j in range(1, n):
        wj = estimates.get(j)
        wjm1 = estimates.get(j - 1)
        if wj is None or wjm1 is None:
            continue
        lower = float(j) if math.isinf(wj) else j * wj / (wj + j + 1)
        upper = INF if math.isinf(wj) else ((n - j) * wj - 1) / (n - j + 1)
        ok_left = wjm1 >= lower - noise
        ok_right = math.isinf(upper) or wjm1 <= upper + noise
        rows.append({"j": j, "lower": lower, "value": wjm1, "upper": upper,
                     "ok_left": ok_left, "ok_right": ok_right,
                     "margin_left": (wjm1 - lower) if not math.isinf(wjm1) else INF,
                     "margin_right": (upper - wjm1) if not (math.isinf(upper) or math.isinf(wjm1)) else INF})
    return {"omega0_lower_ok": base_ok, "omega0": w0, "omega0_bound": 1.0 / n,
            "rows": rows, "all_ok": base_ok and all(r["ok_left"] and r["ok_right"] for r in rows)}


@dataclass
class TransferParams:
    y1: float
    Q_grid: tuple
    c: float = 1.0
    slack: float = 0.1


def transfer_experiment(target, K: NumberField, j: int, params: TransferParams,
                        exact_target=None) -> dict:
    """Apply going-down to record witnesses and verify the transferred records.

    For each Q in the grid, the best record with H <= Q must witness
    H(S) w_1^q <= Q^{-(q y1 - 1)}; going-down with d = i = h = 1, e = j + 1
    then produces S' of dimension j, and the report checks the decay of
    H(S') w_1^q against Q'^{-(q y'_1 - 1)} with y'_1 = y1 (j+1)/(q y1 + j).
    """
    from .goingdown import GoingDownInput, going_down

    q = K.case_q
    u = np.asarray(target, dtype=complex).ravel()
    u = u / np.linalg.norm(u)
    y1 = params.y1
    y1p = y1 * (j + 1) / (q * y1 + j)

    curve = record_curve(u, K, j, max(params.Q_grid), exact_target=exact_target)
    report = {"j": j, "q": q, "y1": y1, "y1_prime": y1p, "pairs": [],
              "witness_failures": [], "trivial": False}

    if curve.exact_zero:
        rec = next(r for r in curve.records if r.D == 0.0)
        S = rec.subspace
        rows = [list(exact_target)] + [list(r) for r in S.basis]
        red = _first_independent_rows(rows, j)
        Sp = subspace(K, red, S.n)
        report["trivial"] = True
        report["pairs"].append({"Q": rec.H, "H_before": rec.H, "D_before": 0.0,
                                "H_after": height_breakdown(Sp).value, "D_after": 0.0})
        report["slope"] = INF
        report["passed"] = True
        return report

    A = from_basis(u)
    logs = []
    for Q in params.Q_grid:
        usable = [r for r in curve.records if r.H <= Q]
        if not usable:
            report["witness_failures"].append({"Q": Q, "reason": "no record below Q"})
            continue
        best = min(usable, key=lambda r: r.D)
        if best.D > Q ** (-(q * y1 - 1)) * (1 + 1e-9):
            report["witness_failures"].append(
                {"Q": Q, "reason": f"record D={best.D:.4g} above Q^-(qy1-1)={Q ** (-(q * y1 - 1)):.4g}"})
            continue
        cert = going_down(GoingDownInput(A=A, B=best.subspace, h=1, y=(y1,),
                                         H=float(Q), c=params.c, branch="first"))
        Qp = Q ** ((q * y1 + j) / (j + 1))
        D_after = cert.H_Bm1 * float(cert.omegas_Bm1[0]) ** q
        report["pairs"].append({"Q": Q, "H_before": best.H, "D_before": best.D,
                                "Q_prime": Qp, "H_after": cert.H_Bm1,
                                "D_after": D_after, "cert_ok": cert.ok})
        logs.append((math.log(Qp), math.log(max(D_after, 1e-300))))
    if len(logs) >= 2:
        xs = np.array([x for x, _ in logs])
        ys = np.array([y for _, y in logs])
        b = np.polyfit(xs, ys, 1)[0]
        report["slope"] = float(-b)
    elif logs:
        x, yv = logs[0]
        report["slope"] = float(-yv / x)
    else:
        report["slope"] = float("nan")
    report["passed"] = (report["slope"] >= q * y1p - 1 - params.slack
                        if not math.isnan(report["slope"]) else False)
    return report


def _first_independent_rows(rows, count: int):
    """First `count` rows of `rows` that are exactly independent (greedy)."""
    out = []
    for r in rows:
        if k_rank(out + [r]) == len(out) + 1:
            out.append(r)
        if len(out) == count:
            return out
    raise ValueError("not enough independent rows")
