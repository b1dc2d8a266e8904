"""Hadamard-type inequality reports: every term, every slack, pass/fail.

Each operation computes the named terms of one inequality chain with the
quadrature engine, lists the consecutive slacks, and marks a link as holding
when its slack is at least ``-VERIFY_TOL``.  Quadrature runs two to three
orders tighter than that tolerance so integration error cannot flip a
verdict; a non-converged integral is surfaced in the report instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .domains import Box2, Interval
from .expressions import Axis, Expr, chord_substitution, restrict
from .quadrature import (
    QuadConfig,
    QuadResult,
    integrate_1d,
    integrate_2d,
    integrate_abs_difference,
)

__all__ = [
    "VERIFY_TOL",
    "InequalityReport",
    "OneSided",
    "coord_convex_chain",
    "hadamard_1d",
    "jqc_bound_1d",
    "max_identity",
    "thm_jqc_coord",
    "thm_wqc_coord",
]

VERIFY_TOL = 1e-6

_UNIT = Interval(0.0, 1.0)

# The doubly-nested chord corrections run at 1e-8, two orders below the
# verification tolerance, with the inner pass another order tighter; plain
# single integrals keep the (tighter) engine defaults.
_INNER_CFG = QuadConfig(rel_tol=1e-9, abs_tol=1e-11, max_subdivisions=1024)
_OUTER_CFG = QuadConfig(rel_tol=1e-8, abs_tol=1e-9, max_subdivisions=384)


@dataclass(frozen=True)
class OneSided:
    """A single lhs <= rhs statement reported alongside a chain."""

    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -VERIFY_TOL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class InequalityReport:
    inequality_id: str
    terms: tuple[tuple[str, float], ...]
    slacks: tuple[float, ...]
    holds: tuple[bool, ...]
    quad_errors: tuple[float, ...]
    converged: bool
    components: dict[str, float] = field(default_factory=dict)
    side_inequalities: tuple[OneSided, ...] = ()

    @property
    def all_hold(self) -> bool:
        return all(self.holds) and all(s.holds for s in self.side_inequalities)

    def term_values(self) -> list[float]:
        return [v for _, v in self.terms]

    def describe(self) -> str:
        lines = [f"{self.inequality_id}:"]
        for i, (name, value) in enumerate(self.terms):
            lines.append(f"  {name} = {value!r}")
            if i < len(self.slacks):
                status = "holds" if self.holds[i] else "FAILS"
                lines.append(f"    <=  (slack {self.slacks[i]:+.3e}, {status})")
        for s in self.side_inequalities:
            status = "holds" if s.holds else "FAILS"
            lines.append(
                f"  {s.name}: {s.lhs!r} <= {s.rhs!r} (slack {s.slack:+.3e}, {status})"
            )
        if self.components:
            for name, value in self.components.items():
                lines.append(f"  [{name} = {value!r}]")
        lines.append(f"  quadrature errors: {[f'{e:.2e}' for e in self.quad_errors]}")
        if not self.converged:
            lines.append("  WARNING: quadrature budget exhausted; values are estimates")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "terms": [[n, v] for n, v in self.terms],
            "slacks": list(self.slacks),
            "holds": list(self.holds),
            "quad_errors": list(self.quad_errors),
            "converged": self.converged,
            "components": dict(self.components),
            "side_inequalities": [s.to_dict() for s in self.side_inequalities],
            "all_hold": self.all_hold,
        }


def _report(
    inequality_id: str,
    terms: list[tuple[str, float]],
    quad_errors: list[float],
    converged: bool,
    components: Optional[dict] = None,
    sides: tuple[OneSided, ...] = (),
) -> InequalityReport:
    values = [v for _, v in terms]
    slacks = tuple(values[i + 1] - values[i] for i in range(len(values) - 1))
    holds = tuple(s >= -VERIFY_TOL for s in slacks)
    return InequalityReport(
        inequality_id=inequality_id,
        terms=tuple(terms),
        slacks=slacks,
        holds=holds,
        quad_errors=tuple(quad_errors),
        converged=converged,
        components=components or {},
        side_inequalities=sides,
    )


Fn1 = Union[Expr, Callable[[float], float]]
Fn2 = Union[Expr, Callable[[float, float], float]]


def _eval1(f: Fn1, x: float) -> float:
    return float(f(x))


def _eval2(f: Fn2, x: float, y: float) -> float:
    return float(f(x, y))


def _slice_fn(f: Fn2, axis: Axis, value: float) -> Fn1:
    """Partial mapping with one co-ordinate frozen."""
    if isinstance(f, Expr):
        return restrict(f, axis, value)
    if axis is Axis.X:
        return lambda v: f(value, v)
    return lambda u: f(u, value)


def _chord_pair(f: Fn1, a: float, b: float) -> tuple[Fn1, Fn1]:
    """The two chord evaluations t -> f(t a + (1-t) b) and t -> f((1-t) a + t b)."""
    if isinstance(f, Expr):
        return (
            chord_substitution(f, Axis.X, a, b),
            chord_substitution(f, Axis.X, a, b, reverse=True),
        )
    return (
        lambda t: f(t * a + (1.0 - t) * b),
        lambda t: f((1.0 - t) * a + t * b),
    )


# ---------------------------------------------------------------------------
# 1D bounds


def hadamard_1d(f: Fn1, iv: Interval, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Midpoint value <= integral mean <= endpoint average (for convex f)."""
    mid_val = _eval1(f, iv.midpoint)
    q = integrate_1d(f, iv, cfg)
    mean = q.value / iv.length
    ends = 0.5 * (_eval1(f, iv.lo) + _eval1(f, iv.hi))
    return _report(
        "HH1D",
        [("f(midpoint)", mid_val), ("integral mean", mean), ("endpoint average", ends)],
        [q.abs_error_estimate / iv.length],
        q.converged,
    )


def jqc_bound_1d(f: Fn1, iv: Interval, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Midpoint value <= integral mean + chord correction (for J-quasi-convex f).

    The correction is half the integral over t in [0,1] of the absolute
    difference of the two chord evaluations of f between the endpoints.
    """
    mid_val = _eval1(f, iv.midpoint)
    q = integrate_1d(f, iv, cfg)
    mean = q.value / iv.length
    g, h = _chord_pair(f, iv.lo, iv.hi)
    qI = integrate_abs_difference(g, h, _UNIT, cfg or _INNER_CFG)
    correction = 0.5 * qI.value
    rhs = mean + correction
    return _report(
        "JQC1D",
        [("f(midpoint)", mid_val), ("mean + chord correction", rhs)],
        [q.abs_error_estimate / iv.length, 0.5 * qI.abs_error_estimate],
        q.converged and qI.converged,
        components={"integral mean": mean, "chord correction I": correction},
    )


def wqc_bound_1d(f: Fn1, iv: Interval, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Integral mean <= max of the endpoint values (for Wright-quasi-convex f)."""
    q = integrate_1d(f, iv, cfg)
    mean = q.value / iv.length
    fa = _eval1(f, iv.lo)
    fb = _eval1(f, iv.hi)
    return _report(
        "WQC1D",
        [("integral mean", mean), ("max endpoint value", max(fa, fb))],
        [q.abs_error_estimate / iv.length],
        q.converged,
        components={"f(lo)": fa, "f(hi)": fb},
    )


# ---------------------------------------------------------------------------
# Rectangle chains


def _line_means(
    f: Fn2, box: Box2, cfg: Optional[QuadConfig]
) -> tuple[dict[str, QuadResult], dict[str, float]]:
    """Means of f along the two midlines and the four edges of the rectangle."""
    a, b, c, d = box.bounds
    results: dict[str, QuadResult] = {}
    means: dict[str, float] = {}

    def add(name: str, fn: Fn1, iv: Interval) -> None:
        q = integrate_1d(fn, iv, cfg)
        results[name] = q
        means[name] = q.value / iv.length

    add("horizontal midline", _slice_fn(f, Axis.Y, box.y.midpoint), box.x)
    add("vertical midline", _slice_fn(f, Axis.X, box.x.midpoint), box.y)
    add("bottom edge", _slice_fn(f, Axis.Y, c), box.x)
    add("top edge", _slice_fn(f, Axis.Y, d), box.x)
    add("left edge", _slice_fn(f, Axis.X, a), box.y)
    add("right edge", _slice_fn(f, Axis.X, b), box.y)
    return results, means


def coord_convex_chain(f: Fn2, box: Box2, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Five-term chain for co-ordinate-wise convex f: centre value, averaged
    midline means, double integral mean, averaged edge means, corner average.
    The chain is sharp for functions affine in each variable."""
    a, b, c, d = box.bounds
    t1 = _eval2(f, box.x.midpoint, box.y.midpoint)
    line_results, line_means = _line_means(f, box, cfg)
    t2 = 0.5 * (line_means["horizontal midline"] + line_means["vertical midline"])
    q2 = integrate_2d(f, box, cfg)
    t3 = q2.value / box.area
    t4 = 0.25 * (
        line_means["bottom edge"]
        + line_means["top edge"]
        + line_means["left edge"]
        + line_means["right edge"]
    )
    t5 = 0.25 * (
        _eval2(f, a, c) + _eval2(f, b, c) + _eval2(f, a, d) + _eval2(f, b, d)
    )
    quad_errors = [
        line_results["horizontal midline"].abs_error_estimate / box.x.length,
        line_results["vertical midline"].abs_error_estimate / box.y.length,
        q2.abs_error_estimate / box.area,
        line_results["bottom edge"].abs_error_estimate / box.x.length,
        line_results["top edge"].abs_error_estimate / box.x.length,
        line_results["left edge"].abs_error_estimate / box.y.length,
        line_results["right edge"].abs_error_estimate / box.y.length,
    ]
    converged = q2.converged and all(r.converged for r in line_results.values())
    return _report(
        "CHAIN1_6",
        [
            ("f(centre)", t1),
            ("average of midline means", t2),
            ("double integral mean", t3),
            ("average of edge means", t4),
            ("corner average", t5),
        ],
        quad_errors,
        converged,
        components=dict(line_means),
    )


def _chord_correction_2d(
    f: Fn2, box: Box2, along: Axis
) -> tuple[float, float, bool]:
    """Outer integral (over the other axis) of the inner chord-difference
    integral along ``along``; returns (value, error estimate, converged).

    The inner t-integral locates its kinks per outer value, which is why the
    outer loop is the adaptive one.
    """
    a, b, c, d = box.bounds
    if along is Axis.X:
        lo, hi = a, b
        outer_iv = box.y
        outer_axis = Axis.Y
    else:
        lo, hi = c, d
        outer_iv = box.x
        outer_axis = Axis.X
    if isinstance(f, Expr):
        chord_fwd = chord_substitution(f, along, lo, hi)
        chord_rev = chord_substitution(f, along, lo, hi, reverse=True)

        def make_pair(v: float) -> tuple[Fn1, Fn1]:
            return (
                restrict(chord_fwd, outer_axis, v),
                restrict(chord_rev, outer_axis, v),
            )

    else:

        def make_pair(v: float) -> tuple[Fn1, Fn1]:
            if along is Axis.X:
                return (
                    lambda t: f(t * lo + (1.0 - t) * hi, v),
                    lambda t: f((1.0 - t) * lo + t * hi, v),
                )
            return (
                lambda t: f(v, t * lo + (1.0 - t) * hi),
                lambda t: f(v, (1.0 - t) * lo + t * hi),
            )

    inner_state = {"max_err": 0.0, "converged": True}

    def inner(v: float) -> float:
        g, h = make_pair(v)
        q = integrate_abs_difference(g, h, _UNIT, _INNER_CFG)
        if q.abs_error_estimate > inner_state["max_err"]:
            inner_state["max_err"] = q.abs_error_estimate
        inner_state["converged"] = inner_state["converged"] and q.converged
        return q.value

    q = integrate_1d(inner, outer_iv, _OUTER_CFG)
    err = q.abs_error_estimate + outer_iv.length * inner_state["max_err"]
    return q.value, err, q.converged and inner_state["converged"]


def thm_jqc_coord(f: Fn2, box: Box2, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Midline-mean average <= double integral mean + H, for f J-quasi-convex
    on the co-ordinates.  H sums the two chord-difference double integrals
    with prefactors 1/(4 (d-c)) and 1/(4 (b-a)); it depends only on the
    rectangle, both inner variables being integrated out."""
    cfg = cfg or QuadConfig()
    a, b, c, d = box.bounds
    line_results, line_means = _line_means(f, box, cfg)
    mean_h = line_means["horizontal midline"]
    mean_v = line_means["vertical midline"]
    lhs = 0.5 * (mean_h + mean_v)
    q2 = integrate_2d(f, box, cfg)
    double_mean = q2.value / box.area
    hx, hx_err, hx_conv = _chord_correction_2d(f, box, Axis.X)
    hy, hy_err, hy_conv = _chord_correction_2d(f, box, Axis.Y)
    h_term = hx / (4.0 * box.y.length) + hy / (4.0 * box.x.length)
    rhs = double_mean + h_term
    sides = (
        OneSided(
            "vertical midline mean <= double mean + x-chord correction",
            mean_v,
            double_mean + hx / (2.0 * box.y.length),
        ),
        OneSided(
            "horizontal midline mean <= double mean + y-chord correction",
            mean_h,
            double_mean + hy / (2.0 * box.x.length),
        ),
    )
    quad_errors = [
        line_results["horizontal midline"].abs_error_estimate / box.x.length,
        line_results["vertical midline"].abs_error_estimate / box.y.length,
        q2.abs_error_estimate / box.area,
        hx_err / (4.0 * box.y.length),
        hy_err / (4.0 * box.x.length),
    ]
    converged = (
        q2.converged
        and hx_conv
        and hy_conv
        and line_results["horizontal midline"].converged
        and line_results["vertical midline"].converged
    )
    return _report(
        "THM_2_1",
        [("average of midline means", lhs), ("double mean + H", rhs)],
        quad_errors,
        converged,
        components={
            "double integral mean": double_mean,
            "H": h_term,
            "x-chord double integral": hx,
            "y-chord double integral": hy,
        },
        sides=sides,
    )


def thm_wqc_coord(f: Fn2, box: Box2, cfg: Optional[QuadConfig] = None) -> InequalityReport:
    """Double integral mean <= half-sum of the two maxima of opposite edge
    means, for f Wright-quasi-convex on the co-ordinates."""
    cfg = cfg or QuadConfig()
    line_results, line_means = _line_means(f, box, cfg)
    q2 = integrate_2d(f, box, cfg)
    double_mean = q2.value / box.area
    max_x_edges = max(line_means["bottom edge"], line_means["top edge"])
    max_y_edges = max(line_means["left edge"], line_means["right edge"])
    rhs = 0.5 * (max_x_edges + max_y_edges)
    sides = (
        OneSided(
            "double mean <= max of left/right edge means", double_mean, max_y_edges
        ),
        OneSided(
            "double mean <= max of bottom/top edge means", double_mean, max_x_edges
        ),
    )
    quad_errors = [
        q2.abs_error_estimate / box.area,
        line_results["bottom edge"].abs_error_estimate / box.x.length,
        line_results["top edge"].abs_error_estimate / box.x.length,
        line_results["left edge"].abs_error_estimate / box.y.length,
        line_results["right edge"].abs_error_estimate / box.y.length,
    ]
    edge_names = ("bottom edge", "top edge", "left edge", "right edge")
    converged = q2.converged and all(line_results[n].converged for n in edge_names)
    return _report(
        "THM_2_4",
        [("double integral mean", double_mean), ("half-sum of edge maxima", rhs)],
        quad_errors,
        converged,
        components={
            name: line_means[name] for name in edge_names
        },
        sides=sides,
    )


# ---------------------------------------------------------------------------
# max identity


def max_identity(u: float, v: float) -> float:
    """(u + v + |u - v|) / 2, evaluated so it equals the builtin max bit-exactly
    on finite doubles.

    The float formula is used only when both intermediate sums are provably
    exact; otherwise the expression is evaluated in exact rational arithmetic
    and rounded once (the true value is max(u, v), which is representable, so
    that single rounding is the identity).  Naive float evaluation fails both
    near overflow (u + v -> inf) and under absorption (a tiny max vanishes
    against a huge opposite-signed partner).
    """
    u, v = float(u), float(v)
    if u == v:
        return u  # builtin max keeps the first of two equal arguments
    s = u + v
    d = u - v
    if (
        math.isfinite(s)
        and math.isfinite(d)
        and s - v == u
        and s - u == v
        and d + v == u
        and u - d == v
    ):
        t = s + abs(d)  # exactly 2*max when both pieces are exact
        if math.isfinite(t):
            return 0.5 * t
    exact = Fraction(u) + Fraction(v) + abs(Fraction(u) - Fraction(v))
    return float(exact / 2)
