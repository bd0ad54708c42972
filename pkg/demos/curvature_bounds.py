#!/usr/bin/env python3
"""Bound formulas for u = ||A||^2 and where the hyperbolic family sits in them.

The two-parameter family with curvature H = -2(a^2+b^2) has u = -2H and
parallel cubic form, so it must pin or meet every closed-form bound; the
conformal torus family then exercises the Laplacian sandwich with
genuinely varying fields (n = 2 forces equality in both directions).
"""

import numpy as np

from codazzi.bounds import (
    calabi_sup_bound,
    discrete_max_probe,
    inf_u_dichotomy,
    parallel_cubic_band,
    simons_sandwich_check,
    sup_u_bounds,
    surface_u_bounds,
)
from codazzi.charts import squared_norm_field
from codazzi.generators import GeneratorSpec, generate


def main():
    a, b = 1.0, 0.0
    s = a * a + b * b
    h_curv = -2.0 * s
    u = 4.0 * s
    print(f"Hyperbolic family (a={a}, b={b}): H = {h_curv:g}, u = {u:g}")
    print(f"  Calabi sup bound n(n-1)(-H)       = {calabi_sup_bound(2, h_curv):g}"
          f"   attained: {abs(calabi_sup_bound(2, h_curv) - u) < 1e-12}")
    band = parallel_cubic_band(2, h_curv)
    print(f"  parallel-cubic band               = [{band.lo:g}, {band.hi:g}]"
          f"   single point at u: {band.lo == band.hi == u}")
    d = inf_u_dichotomy(2, h_curv, 0.0)
    print(f"  inf-u dichotomy branches          = ({d.lo:g}, {d.hi:g})"
          f"   family at upper branch: {abs(d.hi - u) < 1e-12}")
    rep = sup_u_bounds(2, h_curv, 0.0)
    lo, hi = rep.intervals["sup_u"]
    print(f"  sup-u interval                    = [{lo:g}, {hi:g}]"
          f"   family at upper endpoint: {abs(hi - u) < 1e-12}")
    rep2 = surface_u_bounds(h_curv, h_curv, 0.0, 0.0)
    lo2, hi2 = rep2.intervals["sup_u"]
    print(f"  surface (n=2) sup-u interval      = [{lo2:g}, {hi2:g}]"
          f"   contains u: {lo2 - 1e-12 <= u <= hi2 + 1e-12}")

    print("\nLaplacian sandwich on the conformal torus (n = 2: equality)")
    conf = generate(GeneratorSpec(
        "G5-periodic-trig", seed=2, params={"variant": "conformal", "amp": 0.35}))
    worst = 0.0
    for x in np.array([[1.1, 2.3], [0.4, 0.9], [3.3, 5.1], [5.0, 0.7]]):
        lo_gap, hi_gap = simons_sandwich_check(conf, x)
        worst = max(worst, abs(lo_gap), abs(hi_gap))
        print(f"  x = ({x[0]:.1f}, {x[1]:.1f}):  lower gap {lo_gap:+.2e},  upper gap {hi_gap:+.2e}")
    print(f"  worst |gap| = {worst:.2e}  {'PASS' if worst < 4e-4 else 'FAIL'}")

    print("\nMaximum-principle surrogate on the torus")
    argmax, lap = discrete_max_probe(conf, squared_norm_field(conf, conf.a_field),
                                     lattice_points=48)
    print(f"  argmax of u at ({argmax[0]:.3f}, {argmax[1]:.3f}), Laplacian there {lap:+.3e}")
    print(f"  nonpositive at the maximum: {'PASS' if lap <= 1e-2 else 'FAIL'}")


if __name__ == "__main__":
    main()
