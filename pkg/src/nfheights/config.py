"""Numeric tolerance configuration.

All floating comparisons in the package funnel through a Tolerances
instance so the SH_PRECISION environment variable can widen or tighten
the whole family at once.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-9          # default relative tolerance family
    orth: float = 1e-9         # orthonormality defects
    rank: float = 1e-11        # numeric rank cutoff (scaled by matrix norm)
    boundary: float = 1e-9     # slack on closed convex-body boundaries
    near_one: float = 1e-6     # lambda > 1 - near_one switches omega to the residual route
    slope_window_decades: float = 1.0   # top window used by exponent estimators
    noise_margin: float = 0.15          # additive margin quoted by exponent checks


def default_tolerances() -> Tolerances:
    env = os.environ.get("SH_PRECISION")
    if env:
        base = float(env)
        return Tolerances(rel=base, orth=base, rank=base * 1e-2, boundary=base)
    return Tolerances()


TOL = default_tolerances()
