"""Every Hadamard-type bound as a term-by-term report.

Each operation lists the named terms of one inequality chain, the slack of
every link, the quadrature error estimates, and whether each link holds at
the 1e-6 verification tolerance.
"""

from quasiconv import (
    Box2,
    Interval,
    coord_convex_chain,
    hadamard_1d,
    jqc_bound_1d,
    max_identity,
    parse,
    thm_jqc_coord,
    thm_wqc_coord,
    wqc_bound_1d,
)

iv = Interval(0, 1)
box = Box2.from_bounds(0, 1, 0, 1)

# The classic double bound for a convex function.
print(hadamard_1d(parse("x^2", 1), iv).describe())
print()

# For a J-quasi-convex function the integral mean needs the chord
# correction I: half the integral of |f(ta+(1-t)b) - f((1-t)a+tb)|.
print(jqc_bound_1d(parse("x", 1), iv).describe())
print()

# Wright-quasi-convex: the mean is bounded by the larger endpoint value.
print(wqc_bound_1d(parse("x^2", 1), iv).describe())
print()

# The five-term chain for co-ordinate-wise convex functions; affine
# functions make the whole chain collapse to equality (sharpness).
print(coord_convex_chain(parse("x^2 + y^2", 2), box).describe())
print()
print(coord_convex_chain(parse("x + y", 2), box).describe())
print()

# The rectangle bound with the correction H: two chord-difference double
# integrals, inner parameter integral kink-split per outer value.
print(thm_jqc_coord(parse("x + y", 2), box).describe())
print()

# The edge-mean bound for co-ordinate-wise Wright-quasi-convex functions.
print(thm_wqc_coord(parse("x^2 + y^2", 2), box).describe())
print()

# The max identity behind the inclusion proofs, exact even where the naive
# float evaluation would overflow.
print("max_identity(3, 5) =", max_identity(3, 5))
print("max_identity(1e308, -1e308) =", max_identity(1e308, -1e308))
