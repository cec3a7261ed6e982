"""Command-line front end: field inspection, heights, angles, going-down runs,
exponent estimation, and the verification suite.

Structured inputs are JSON, curves are CSV, and every numeric output is
serialized with 12 digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import geometry, goingdown, height
from .exponents import estimate_exponents, record_curve
from .numberfield import field_from_spec, get_field
from .subspaces import subspace_from_spec
from .verify import run_verify


def f12(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{float(x):.12f}"


def g12(x) -> float:
    """Round-trip a float through 12 significant digits (stable JSON payloads)."""
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return x
    return float(f"{float(x):.12g}")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read JSON input {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _numeric_matrix(rows):
    def entry(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return complex(v)
    return np.array([[entry(v) for v in row] for row in rows])


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_field(args):
    K = field_from_spec(_load_json(args.input) if args.input else args.field)
    lines = [
        f"name {K.name}",
        f"degree {K.p}",
        f"signature {K.r1} {K.r2}",
        f"disc {K.disc}",
        f"delta {f12(K.delta_const)}",
        f"q {K.case_q}",
    ]
    for i, r in enumerate(K.roots):
        lines.append(f"root_{i + 1} {f12(r.real)} {f12(r.imag)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_height(args):
    spec = _load_json(args.input)
    try:
        S = subspace_from_spec(spec)
    except (KeyError, ValueError) as exc:
        print(f"error: bad subspace spec in {args.input}: {exc}", file=sys.stderr)
        return 2
    h1 = height.height_ideal(S)
    h2 = height.height_lattice(S)
    _emit(f"{f12(h1)}\n{f12(h2)}\n", args.out)
    return 0


def cmd_angles(args):
    spec = _load_json(args.input)
    A = geometry.from_basis(_numeric_matrix(spec["A"]))
    B = geometry.from_basis(_numeric_matrix(spec["B"]))
    pd = geometry.principal_data(A, B)
    lines = [f"omega_{i + 1} {f12(v)}" for i, v in enumerate(pd.omegas)]
    lines += [f"lambda_{i + 1} {f12(v)}" for i, v in enumerate(pd.lambdas)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_mu(args):
    spec = _load_json(args.input)
    a = _numeric_matrix(spec["A"])
    b = _numeric_matrix(spec["B"])
    m1 = geometry.mu(geometry.from_basis(a), geometry.from_basis(b))
    lines = [f"mu_product {f12(m1)}"]
    if a.shape[0] + b.shape[0] <= a.shape[1]:
        lines.append(f"mu_wedge {f12(geometry.mu_wedge(a, b))}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _certificate_payload(cert) -> dict:
    return {
        "branch": cert.branch,
        "q": cert.q,
        "h": cert.h,
        "y": [g12(v) for v in cert.y],
        "H": g12(cert.H),
        "H_prime": g12(cert.H_prime),
        "H1": g12(cert.H1) if cert.H1 is not None else None,
        "H_B": g12(cert.H_B),
        "H_Bm1": g12(cert.H_Bm1),
        "W": [[str(c) for c in x.coeffs] for x in cert.W],
        "Bm1_basis": [[[str(c) for c in x.coeffs] for x in row] for row in cert.Bm1.basis],
        "omegas_B": [g12(v) for v in cert.omegas_B],
        "omegas_Bm1": [g12(v) for v in cert.omegas_Bm1],
        "psc_YW": [g12(v) for v in cert.psc_YW],
        "V_norms": [g12(v) for v in cert.V_norms],
        "bound_ii": [g12(v) for v in cert.bound_ii],
        "bound_iii": g12(cert.bound_iii),
        "residual_scale": g12(cert.residual_scale),
        "ratios": {k: ([g12(x) for x in v] if isinstance(v, list) else g12(v))
                   for k, v in cert.ratios.items() if v is not None},
        "checks": cert.checks,
        "warnings": cert.warnings,
        "ok": cert.ok,
    }


def cmd_goingdown(args):
    spec = _load_json(args.input)
    try:
        K = field_from_spec(spec["field"])
        B = subspace_from_spec({"field": spec["field"], "n": spec["n"],
                                "basis": spec["B"]["basis"]}, K)
        A = geometry.from_basis(_numeric_matrix(spec["A"]))
        inp = goingdown.GoingDownInput(
            A=A, B=B, h=int(spec["h"]), y=tuple(spec["y"]), H=float(spec["H"]),
            c=float(spec.get("c", 1.0)), branch=spec.get("branch", "first"),
            H_prime=spec.get("H_prime"))
    except (KeyError, ValueError) as exc:
        print(f"error: bad going-down instance in {args.input}: {exc}", file=sys.stderr)
        return 2
    cert = goingdown.going_down(inp)
    payload = _certificate_payload(cert)
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0 if cert.ok else 1


def _parse_target(args, K, n1):
    if args.target.startswith("@"):
        spec = _load_json(args.target[1:])
        exact = [K.element([v for v in entry]) for entry in spec["exact"]]
        u = np.array([complex(K.embed(x, 1)) for x in exact])
        return u, exact
    vals = [float(v) for v in args.target.split(",")]
    if len(vals) == n1:
        return np.array(vals, dtype=complex), None
    if len(vals) == 2 * n1:
        return np.array([complex(a, b) for a, b in zip(vals[::2], vals[1::2])]), None
    print(f"error: target needs {n1} floats (or {2 * n1} for complex parts)", file=sys.stderr)
    raise SystemExit(2)


def cmd_exponents(args):
    K = get_field(args.field)
    n1 = args.n + 1
    u, exact = _parse_target(args, K, n1)
    curve = record_curve(u, K, args.j, float(args.qmax), exact_target=exact)
    om, omh, diag = estimate_exponents(curve)
    rows = ["H,H_omega_q,plucker"]
    for r in curve.records:
        rows.append(f"{g12(r.H)},{g12(r.D)},{r.plucker}")
    _emit("\n".join(rows) + "\n", args.out)
    print(f"omega_est {f12(om) if not math.isinf(om) else 'inf'}")
    print(f"omega_hat_est {f12(omh) if not math.isinf(omh) else 'inf'}")
    print(f"records {len(curve.records)}")
    print(f"coverage_radius {f12(curve.coverage['radius'])}")
    return 0


def cmd_verify(args):
    report, ok = run_verify(parallel=args.parallel)
    _emit(report, args.out)
    return 0 if ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="nfheights")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="inspect a number field")
    p.add_argument("--field", default="Q", help="built-in field name")
    p.add_argument("--input", help="JSON field spec file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_field)

    p = sub.add_parser("height", help="height of a K-subspace, both definitions")
    p.add_argument("--input", required=True, help="JSON subspace spec")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_height)

    p = sub.add_parser("angles", help="principal angle sines between numeric subspaces")
    p.add_argument("--input", required=True, help='JSON {"A": [[...]], "B": [[...]]}')
    p.add_argument("--out")
    p.set_defaults(fn=cmd_angles)

    p = sub.add_parser("mu", help="product of principal distances, both routes")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_mu)

    p = sub.add_parser("goingdown", help="run the going-down construction")
    p.add_argument("--input", required=True, help="JSON instance file")
    p.add_argument("--out", help="certificate JSON output")
    p.set_defaults(fn=cmd_goingdown)

    p = sub.add_parser("exponents", help="record curve and exponent estimates")
    p.add_argument("--field", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--qmax", type=float, required=True)
    p.add_argument("--target", required=True,
                   help='comma-separated floats, or "@file.json" with {"exact": [[...]]}')
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(fn=cmd_exponents)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
