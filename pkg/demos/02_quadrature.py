"""Adaptive quadrature with embedded error estimates.

The engine is a 15-point Kronrod rule with the 7-point Gauss rule embedded
for the error estimate; adaptivity bisects whichever panel (or rectangle)
currently carries the largest estimate.
"""

from quasiconv import (
    Box2,
    Interval,
    QuadConfig,
    integrate_1d,
    integrate_2d,
    integrate_abs_difference,
    parse,
)

# Smooth 1D integrals converge on the initial panels.
q = integrate_1d(parse("x^2", 1), Interval(0, 1))
print(f"int x^2 dx on [0,1]  = {q.value:.15f}  (err <= {q.abs_error_estimate:.1e}, "
      f"{q.subdivisions} panels)")

# A kink is no problem for the adaptive splitter.
q = integrate_1d(parse("abs(1 - 2*x)", 1), Interval(0, 1))
print(f"int |1-2x| dx        = {q.value:.15f}  ({q.subdivisions} panels)")

# 2D integration bisects the axis with the larger error component.
q = integrate_2d(parse("x^2 + y^2", 2), Box2.from_bounds(0, 1, 0, 1))
print(f"int x^2+y^2 over box = {q.value:.15f}  (err <= {q.abs_error_estimate:.1e}, "
      f"{q.subdivisions} rectangles)")

# Integrands of the form |g - h| get their sign changes located first on a
# uniform scan, each root bisected to 1e-12, and the pieces integrated
# separately; this is the workhorse behind the chord correction terms.
g = parse("1 - 2*x", 1)
h = parse("0*x", 1)
q = integrate_abs_difference(g, h, Interval(0, 1))
print(f"kink-split |g - h|   = {q.value:.15f}")

# A starved budget still returns the estimate, flagged as not converged.
tight = QuadConfig(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=8)
q = integrate_1d(parse("floor(100*x)", 1), Interval(0, 1), tight)
print(f"starved budget: value ~ {q.value:.3f}, converged = {q.converged}")
