import itertools
import math

import numpy as np
import pytest

from quasiconv import (
    Box2,
    ClassId,
    NotApplicableError,
    SearchBudget,
    check_membership,
    coordinate_check,
    defining_inequality,
    lift_witness,
    make_witness,
    parse,
    strengthen_witness,
    violation_tolerance,
)
from quasiconv.expressions import _Binary, _Const, _Unary, _Var, Expr, unparse

BOX = Box2.from_bounds(-1, 1, -1, 1)
FAST = SearchBudget(grid_n=9, halton_count=256, slices=5)


def brute_force_qc2_violation(fn, lo, hi, n=9, nlam=9):
    """Independent oracle: exhaustive scan of the joint quasi-convexity
    inequality over a tensor grid, written with plain loops."""
    pts = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    lams = [k / (nlam - 1) for k in range(nlam)]
    worst = None
    for x1, y1, x2, y2 in itertools.product(pts, repeat=4):
        if (x1, y1) == (x2, y2):
            continue
        fmax = max(fn(x1, y1), fn(x2, y2))
        for lam in lams:
            mx = lam * x1 + (1 - lam) * x2
            my = lam * y1 + (1 - lam) * y2
            gap = fn(mx, my) - fmax
            if worst is None or gap > worst[0]:
                worst = (gap, (x1, y1), (x2, y2), lam)
    return worst


def random_pwl_2d(rng, ridges=3):
    """Signed absolute-ridge sums: piecewise-linear and rich in violations."""
    root = _Const(float(rng.uniform(-1, 1)))
    root = _Binary(
        "+", root, _Binary("*", _Const(float(rng.uniform(-1, 1))), _Var("x"))
    )
    root = _Binary(
        "+", root, _Binary("*", _Const(float(rng.uniform(-1, 1))), _Var("y"))
    )
    for _ in range(ridges):
        a, b, d = (float(v) for v in rng.uniform(-1, 1, 3))
        c = float(rng.uniform(-2, 2))
        ridge = _Unary(
            "abs",
            _Binary(
                "+",
                _Binary(
                    "+",
                    _Binary("*", _Const(a), _Var("x")),
                    _Binary("*", _Const(b), _Var("y")),
                ),
                _Const(d),
            ),
        )
        root = _Binary("+", root, _Binary("*", _Const(c), ridge))
    return Expr(root, 2, unparse(root))


class TestDefiningInequality:
    def test_qc2_hand_evaluation(self):
        f = parse("x^2+y^2", 2)
        lhs, rhs = defining_inequality(
            ClassId.QC2, f, (0, 0), (1, 1), {"lam": 0.5}
        )
        assert lhs == 0.5
        assert rhs == 2.0

    def test_jqc2_sign_flip(self):
        f = parse("-(x^2)", 2)
        lhs, rhs = defining_inequality(ClassId.JQC2, f, (-1, 0), (1, 0))
        assert lhs == 0.0
        assert rhs == -1.0

    def test_w2_affine_equality(self):
        f = parse("x+y", 2)
        rng = np.random.default_rng(5)
        for _ in range(50):
            p1 = tuple(rng.uniform(-1, 1, 2))
            p2 = tuple(rng.uniform(-1, 1, 2))
            t, s = rng.uniform(0, 1, 2)
            lhs, rhs = defining_inequality(
                ClassId.W2, f, p1, p2, {"t": float(t), "s": float(s)}
            )
            assert abs(lhs - rhs) <= 1e-12

    def test_coordinate_ids_rejected(self):
        with pytest.raises(ValueError):
            defining_inequality(ClassId.COORD_QC2, parse("x", 2), (0, 0), (1, 1))

    def test_c1_template(self):
        f = parse("x^2", 1)
        lhs, rhs = defining_inequality(ClassId.C1, f, 0.0, 1.0, {"lam": 0.25})
        assert lhs == 0.75 ** 2
        assert rhs == 0.75

    def test_affine_fixed_point(self):
        # C/J/W templates are equalities for affine functions
        rng = np.random.default_rng(42)
        f2 = parse("0.7*x - 1.3*y + 0.2", 2)
        f1 = parse("1.1*x - 0.4", 1)
        for _ in range(1000):
            p1 = tuple(rng.uniform(-2, 2, 2))
            p2 = tuple(rng.uniform(-2, 2, 2))
            lam, s = (float(v) for v in rng.uniform(0, 1, 2))
            for cid, params in (
                (ClassId.C2, {"lam": lam}),
                (ClassId.J2, {}),
                (ClassId.W2, {"t": lam, "s": s}),
            ):
                lhs, rhs = defining_inequality(cid, f2, p1, p2, params)
                assert abs(lhs - rhs) <= 1e-12
            x1, x2 = float(p1[0]), float(p2[0])
            for cid, params in (
                (ClassId.C1, {"lam": lam}),
                (ClassId.J1, {}),
                (ClassId.W1, {"t": lam}),
            ):
                lhs, rhs = defining_inequality(cid, f1, x1, x2, params)
                assert abs(lhs - rhs) <= 1e-12


class TestCheckMembership:
    def test_paraboloid_qc2_matches_brute_force(self):
        f = parse("x^2+y^2", 2)
        worst = brute_force_qc2_violation(lambda x, y: x * x + y * y, -1.0, 1.0)
        assert worst[0] <= 0.0  # the oracle confirms no grid pair violates
        verdict = check_membership(f, BOX, ClassId.QC2, budget=FAST)
        assert verdict.no_violation_found
        assert "no violation found at resolution" in verdict.describe()

    def test_negative_paraboloid_jqc2(self):
        verdict = check_membership(parse("-(x^2)", 2), BOX, ClassId.JQC2)
        assert verdict.violated
        assert verdict.witness.margin == pytest.approx(1.0, abs=1e-12)

    def test_sqrt_ridge_convexity_fails(self):
        # hand evaluation: f(.5, 0) = sqrt(.5) > .5 = average of 0 and 1
        verdict = check_membership(
            parse("sqrt(abs(x))", 2), BOX, ClassId.C2, budget=FAST
        )
        assert verdict.violated
        assert verdict.witness.margin >= math.sqrt(0.5) - 0.5 - 1e-9

    def test_saddle_matches_brute_force(self):
        worst = brute_force_qc2_violation(lambda x, y: x * y, -1.0, 1.0)
        assert worst[0] > 0  # oracle finds the joint violation
        verdict = check_membership(parse("x*y", 2), BOX, ClassId.QC2, budget=FAST)
        assert verdict.violated
        assert verdict.witness.margin >= worst[0] - 1e-12

    def test_undefined_third_verdict(self):
        verdict = check_membership(parse("log(x)", 2), BOX, ClassId.QC2, budget=FAST)
        assert verdict.undefined
        assert verdict.point is not None
        assert not verdict.violated and not verdict.no_violation_found

    def test_1d_class_domain_mismatch(self):
        with pytest.raises(ValueError):
            check_membership(parse("x^2", 1), BOX, ClassId.QC1)

    def test_determinism(self):
        f = parse("x*y", 2)
        v1 = check_membership(f, BOX, ClassId.JQC2, budget=FAST)
        v2 = check_membership(f, BOX, ClassId.JQC2, budget=FAST)
        assert v1.witness == v2.witness

    def test_witness_params_in_range(self):
        verdict = check_membership(parse("sin(x)", 2), Box2.from_bounds(-1.5, 1.5, -1, 1), ClassId.W2, budget=FAST)
        assert verdict.violated
        w = verdict.witness
        assert 0.0 <= w.params["t"] <= 1.0
        assert 0.0 <= w.params["s"] <= 1.0


class TestWitnessSoundness:
    def test_random_pwl_witnesses_reproduce_bit_exactly(self):
        rng = np.random.default_rng(2718)
        found = 0
        for _ in range(200):
            f = random_pwl_2d(rng)
            verdict = check_membership(f, BOX, ClassId.JQC2, budget=FAST)
            if not verdict.violated:
                continue
            found += 1
            w = verdict.witness
            lhs, rhs = defining_inequality(w.class_id, f, w.p1, w.p2, w.params)
            assert lhs == w.lhs and rhs == w.rhs
            assert w.margin > violation_tolerance(w.lhs, w.rhs)
        assert found > 50  # the family must actually generate violations

    def test_scale_covariance_power_of_two(self):
        # scaling by powers of two is exact in floats, so quasi-class margins
        # scale exactly and the winning grid candidate is unchanged
        base = "abs(x - 0.3) - 2*abs(y + 0.4) + 0.5*x"
        f1 = parse(base, 2)
        for c in (2.0, 4.0, 0.5):
            fc = parse(f"{c}*({base})", 2)
            v1 = check_membership(f1, BOX, ClassId.JQC2, budget=FAST)
            vc = check_membership(fc, BOX, ClassId.JQC2, budget=FAST)
            assert v1.violated and vc.violated
            assert vc.witness.p1 == v1.witness.p1
            assert vc.witness.p2 == v1.witness.p2
            assert vc.witness.margin == c * v1.witness.margin


class TestStrengthen:
    def test_jqc_to_wqc_identical_margin(self):
        f = parse("-(x^2)", 2)
        w = check_membership(f, BOX, ClassId.JQC2, budget=FAST).witness
        w2 = strengthen_witness(w)
        assert w2.class_id is ClassId.WQC2
        assert w2.params == {"t": 0.5}
        assert w2.margin == w.margin
        lhs, rhs = defining_inequality(ClassId.WQC2, f, w2.p1, w2.p2, w2.params)
        assert lhs == w2.lhs and rhs == w2.rhs

    def test_wqc_to_qc_pigeonhole(self):
        # terms 3 and 1 against rhs 1.5: the larger chord term wins
        w = make_witness(
            ClassId.WQC2,
            lambda x, y: 3.0 if (x, y) == (0.25, 0.25) else (1.0 if (x, y) == (0.75, 0.75) else 1.5),
            (1.0, 1.0),
            (0.0, 0.0),
            {"t": 0.25},
        )
        assert w.lhs == 2.0 and w.rhs == 1.5
        wq = strengthen_witness(w)
        assert wq.class_id is ClassId.QC2
        assert wq.lhs == 3.0
        assert wq.margin == 1.5
        assert wq.margin >= w.margin

    def test_qc_not_applicable(self):
        f = parse("-(x^2)", 2)
        w = check_membership(f, BOX, ClassId.QC2, budget=FAST).witness
        with pytest.raises(NotApplicableError):
            strengthen_witness(w)

    def test_chain_on_random_pwl(self):
        # violating the largest class propagates down the whole chain
        rng = np.random.default_rng(99)
        checked = 0
        for _ in range(200):
            f = random_pwl_2d(rng)
            verdict = check_membership(f, BOX, ClassId.JQC2, budget=FAST)
            if not verdict.violated:
                continue
            checked += 1
            w = verdict.witness
            w_wqc = strengthen_witness(w)
            lhs, rhs = defining_inequality(ClassId.WQC2, f, w_wqc.p1, w_wqc.p2, w_wqc.params)
            assert lhs == w_wqc.lhs and rhs == w_wqc.rhs
            assert w_wqc.margin >= w.margin
            w_qc = strengthen_witness(w_wqc, f)
            lhs, rhs = defining_inequality(ClassId.QC2, f, w_qc.p1, w_qc.p2, w_qc.params)
            assert lhs == w_qc.lhs and rhs == w_qc.rhs
            assert w_qc.margin >= w_wqc.margin
        assert checked > 50


class TestCoordinate:
    def test_paraboloid_qc1_slices(self):
        verdict = coordinate_check(parse("x^2+y^2", 2), BOX, ClassId.QC1, slices=9)
        assert verdict.no_violation_found

    def test_saddle_slices_convex_but_global_fails(self):
        f = parse("x*y", 2)
        coord = coordinate_check(f, BOX, ClassId.C1, slices=9)
        assert coord.no_violation_found
        glob = check_membership(f, BOX, ClassId.C2, budget=FAST)
        assert glob.violated

    def test_negative_parabola_every_slice(self):
        f = parse("-(x^2)", 2)
        verdict = coordinate_check(f, BOX, ClassId.JQC1, slices=5)
        assert verdict.violated
        assert verdict.witness.frozen_axis in ("x", "y")

    def test_lift_jqc_witness(self):
        f = parse("-(x^2)", 2)
        w = coordinate_check(f, BOX, ClassId.JQC1, slices=5).witness
        lifted = lift_witness(w)
        assert lifted.class_id is ClassId.JQC2
        lhs, rhs = defining_inequality(ClassId.JQC2, f, lifted.p1, lifted.p2, lifted.params)
        assert lhs == lifted.lhs == w.lhs
        assert rhs == lifted.rhs == w.rhs
        assert lifted.margin == w.margin

    def test_lift_qc_preserves_lambda(self):
        f = parse("-abs(x - 0.2)", 2)
        w = coordinate_check(f, BOX, ClassId.QC1, slices=5).witness
        lifted = lift_witness(w)
        assert lifted.class_id is ClassId.QC2
        assert lifted.params["lam"] == w.params["lam"]
        lhs, rhs = defining_inequality(ClassId.QC2, f, lifted.p1, lifted.p2, lifted.params)
        assert lhs == lifted.lhs and rhs == lifted.rhs

    def test_lift_w1_delta_parameterisation(self):
        # concave slices break the Wright increments in both directions
        f = parse("-(y^2) - x^2", 2)
        w = coordinate_check(f, BOX, ClassId.W1, slices=5).witness
        assert "delta" in w.params or w.params["t"] in (0.0, 1.0)
        lifted = lift_witness(w)
        assert lifted.class_id is ClassId.W2
        assert lifted.params["s"] == lifted.params["t"]
        lhs, rhs = defining_inequality(ClassId.W2, f, lifted.p1, lifted.p2, lifted.params)
        assert lhs == lifted.lhs and rhs == lifted.rhs
        assert lifted.margin == w.margin

    def test_coord_dispatch_through_check_membership(self):
        f = parse("x*y", 2)
        v = check_membership(f, BOX, ClassId.COORD_C2, budget=FAST)
        assert v.no_violation_found

    def test_undefined_slice_point_is_2d(self):
        v = coordinate_check(parse("sqrt(x)", 2), BOX, ClassId.QC1, slices=3)
        assert v.undefined
        assert len(v.point) == 2


class TestSearchPhases:
    def test_halton_phase_catches_off_grid_spike(self):
        # the spike clears every tensor-grid midpoint but not the
        # low-discrepancy batch
        f = parse("max(0, 1 - 125*abs(x - 0.39))", 2)
        box = Box2.from_bounds(0, 1, 0, 1)
        grid_only = SearchBudget(grid_n=17, halton_count=0)
        assert check_membership(f, box, ClassId.JQC2, budget=grid_only).no_violation_found
        both = check_membership(f, box, ClassId.JQC2, budget=SearchBudget())
        assert both.violated
        assert both.witness.margin > 0.5

    def test_every_class_returns_sound_witnesses(self):
        # one concave bump violates all twelve global classes; each witness
        # must reproduce through its own template
        f = parse("-(x^2) - y^2", 2)
        f1 = parse("-(x^2)", 1)
        for cid in ClassId:
            if cid.is_coordinate:
                g, dom = f, BOX
            elif cid.arity == 2:
                g, dom = f, BOX
            else:
                g, dom = f1, Interval(-1.0, 1.0)
            verdict = check_membership(g, dom, cid, budget=FAST)
            assert verdict.violated, cid.value
            w = verdict.witness
            if w.frozen_axis is not None:
                from quasiconv import Axis, restrict

                sliced = restrict(g, Axis(w.frozen_axis), w.frozen_value)
                lhs, rhs = defining_inequality(w.class_id, sliced, w.p1, w.p2, w.params)
            else:
                lhs, rhs = defining_inequality(w.class_id, g, w.p1, w.p2, w.params)
            assert lhs == w.lhs and rhs == w.rhs, cid.value
            assert w.margin > violation_tolerance(w.lhs, w.rhs)


class TestW2Readings:
    def test_ordered_variant_smaller_candidate_set(self):
        f = parse("max(x, y)", 2)
        both = check_membership(f, BOX, ClassId.W2, budget=FAST)
        ordered = check_membership(f, BOX, ClassId.W2_ORDERED, budget=FAST)
        # max(x,y) violates the independent-parameter condition even on
        # componentwise-ordered pairs (opposite corners of a square)
        assert both.violated and ordered.violated
        w = ordered.witness
        assert w.p1[0] <= w.p2[0] and w.p1[1] <= w.p2[1]

    def test_separable_function_in_both(self):
        f = parse("x^2+y^2", 2)
        small = SearchBudget(grid_n=7, halton_count=128)
        assert check_membership(f, BOX, ClassId.W2, budget=small).no_violation_found
        assert check_membership(
            f, BOX, ClassId.W2_ORDERED, budget=small
        ).no_violation_found
