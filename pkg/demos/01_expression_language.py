"""Tour of the expression language: parsing, evaluation, slicing, errors.

Candidate functions are written over ``x`` (1D) or ``x`` and ``y`` (2D) with
the usual arithmetic, ``^`` for powers, and the calls abs, sqrt, exp, log,
sin, cos, floor, min, max.
"""

from quasiconv import Axis, DomainError, ExprSyntaxError, parse, restrict

# Parsing declares the arity up front; a 1D function may only use x.
f = parse("x^2 + y^2", 2)
print("f(1, 2) =", f(1, 2))

g = parse("max(x, min(y, 0.5))", 2)
print("g(0.3, 0.7) =", g(0.3, 0.7))

# ^ binds tighter than unary minus, so -x^2 is -(x^2).
h = parse("-x^2", 1)
print("h(3) =", h(3.0))

# Partial mappings: freeze one co-ordinate and get the 1D slice.
# The slice evaluates bit-identically to the original at matching points.
slice_at_half = restrict(f, Axis.X, 0.5)
print("slice text:", slice_at_half.text)
print("slice(1.0) =", slice_at_half(1.0), "== f(0.5, 1.0) =", f(0.5, 1.0))

# Syntax errors carry the offending offset.
try:
    parse("x +* y", 2)
except ExprSyntaxError as err:
    print("parse failure:", err)

# Evaluation outside the real domain raises DomainError with the point;
# callers treat it as "f is undefined here", never as a value to skip.
try:
    parse("sqrt(x)", 1)(-1.0)
except DomainError as err:
    print("domain failure:", err)

# The variable t is reserved for the convexity parameter in reports.
try:
    parse("t + 1", 1)
except ExprSyntaxError as err:
    print("reserved variable:", err)
