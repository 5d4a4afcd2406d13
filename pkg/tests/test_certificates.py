"""Certified operations: emission, refutation witnesses, the order
calculus, and independent re-verification."""

from fractions import Fraction

import pytest

from cinf.certificates import (
    cert_equal, cert_invertible, cert_order, cert_square,
    order_scale, order_shift, order_transitive_compose, sample_points,
    sign_of_unit, sos_unit, verify_certificate,
)
from cinf.errors import (
    NotASquare, NotEqual, NotInvertibleOnZeroset, OrderRefuted,
    PatternMismatch, UnknownVerdict,
)
from cinf.regions import Box
from cinf.skeleton import skeleton_is_zero
from cinf.smooth_ring import Ideal, SmoothRing, ZERO_IDEAL
from cinf.terms import Const, DISCHARGED, REGISTRY, ZERO, exp, sin, var

x, y = var("x"), var("y")
R1 = Box.uniform(["x"], -2, 2)
R2 = Box.uniform(["x", "y"], -2, 2)


# ---------------------------------------------------------------------------
# invertibility

def test_invertible_positive_shortcut():
    c = cert_invertible(x * x + 1, ZERO_IDEAL, R1)
    assert c.parts == ()
    assert skeleton_is_zero(c.residual())
    assert REGISTRY.status(c.obligations[0]) == DISCHARGED
    assert verify_certificate(c, samples=50)


def test_invertible_on_zeroset_general_route():
    # exp(y) - 2 is nonzero on Z(x^2 + y^2) = {(0,0)} (value -1 there)
    f = exp(y) - 2
    ideal = Ideal((x, y))
    c = cert_invertible(f, ideal, R2)
    assert c.hypotheses and c.parts
    assert skeleton_is_zero(c.residual())
    assert verify_certificate(c, samples=50)


def test_invertible_refuted_with_witness():
    with pytest.raises(NotInvertibleOnZeroset) as e:
        cert_invertible(x, Ideal((x,)), R1)
    assert e.value.witness == {"x": Fraction(0)}


def test_sos_unit():
    c = sos_unit([x, sin(y)])
    assert skeleton_is_zero(c.residual())
    assert verify_certificate(c, samples=50)


def test_sign_of_unit():
    assert sign_of_unit(exp(x), ZERO_IDEAL, R1) == 1
    assert sign_of_unit(Const(-2) - x * x, ZERO_IDEAL, R1) == -1
    with pytest.raises(UnknownVerdict):
        sign_of_unit(x, Ideal((x,)), R1)  # x is 0 on its own zeroset


# ---------------------------------------------------------------------------
# order

def test_order_on_zero_ideal():
    c = cert_order(ZERO, exp(x), ZERO_IDEAL, R1)
    assert c.parts == ()
    assert skeleton_is_zero(c.residual())
    assert verify_certificate(c, samples=50)


def test_order_region_scoped_unit():
    # sin(x) + 3/2 is positive on the region but not structurally positive
    c = cert_order(ZERO, sin(x) + Fraction(3, 2), ZERO_IDEAL, R1)
    assert skeleton_is_zero(c.residual())
    ob = REGISTRY.get(c.obligations[0])
    assert ob.status == DISCHARGED and ob.scope == "on-region"
    assert verify_certificate(c, samples=50)


def test_order_tietze_route():
    # on Z(x^2 + y^2) = {(0,0)}: exp(x+y) > 1/2
    ideal = Ideal((x, y))
    c = cert_order(Const(Fraction(1, 2)), exp(x + y), ideal, R2)
    assert c.parts and c.hypotheses
    assert skeleton_is_zero(c.residual())
    for oid in c.obligations:
        assert REGISTRY.status(oid) == DISCHARGED
    assert verify_certificate(c, samples=50)


def test_order_refuted_with_witness():
    f = exp(x + y) - 1
    with pytest.raises(OrderRefuted) as e:
        cert_order(ZERO, f, ZERO_IDEAL, R2)
    assert e.value.witness == {"x": Fraction(-1), "y": Fraction(0)}
    with pytest.raises(OrderRefuted) as e2:
        cert_order(f, ZERO, ZERO_IDEAL, R2)
    assert e2.value.witness == {"x": Fraction(1), "y": Fraction(0)}


def test_irreflexivity_never_certifies():
    for t in (x, exp(x), x * x - 2):
        with pytest.raises((OrderRefuted, UnknownVerdict)):
            cert_order(t, t, Ideal((x,)), R1)


def test_square_certificate():
    c = cert_square(exp(x) + 1, ZERO_IDEAL, R1)
    assert skeleton_is_zero(c.residual())
    # strictly negative somewhere: refuted with a witness
    with pytest.raises(NotASquare) as e:
        cert_square(Const(-1) - x * x, ZERO_IDEAL, R1)
    assert e.value.witness == {"x": Fraction(0)}
    # zero on the zeroset: not a square of a unit, but no strict witness
    # exists, so the honest outcome is undecided
    with pytest.raises(UnknownVerdict):
        cert_square(x, Ideal((x,)), R1)


# ---------------------------------------------------------------------------
# order calculus

def test_transitive_composition():
    ideal = Ideal((x, y))
    c1 = cert_order(ZERO, Const(1), ideal, R2)
    c2 = cert_order(Const(1), exp(x + y) + 2, ideal, R2)
    c = order_transitive_compose(c1, c2)
    assert c.lower == ZERO and c.upper == exp(x + y) + 2
    assert skeleton_is_zero(c.residual())
    assert verify_certificate(c, samples=50)


def test_composition_requires_chaining():
    c1 = cert_order(ZERO, Const(1), ZERO_IDEAL, R1)
    c2 = cert_order(Const(2), Const(3), ZERO_IDEAL, R1)
    with pytest.raises(PatternMismatch):
        order_transitive_compose(c1, c2)


def test_order_shift():
    c = cert_order(ZERO, Const(1), ZERO_IDEAL, R1)
    shifted = order_shift(c, sin(x))
    assert skeleton_is_zero(shifted.residual())
    assert verify_certificate(shifted, samples=50)


def test_order_scale():
    ideal = Ideal((x,))
    c = cert_order(ZERO, x + 2, ideal, R1)          # 0 < x + 2 on Z(x)
    d = cert_order(ZERO, exp(x), ideal, R1)         # 0 < exp(x)
    scaled = order_scale(c, d)
    assert skeleton_is_zero(scaled.residual())
    assert verify_certificate(scaled, samples=50)
    shifted = cert_order(Const(1), Const(2), ideal, R1)
    with pytest.raises(PatternMismatch):
        order_scale(c, shifted)  # the scaling factor must bound 0 < d


# ---------------------------------------------------------------------------
# equality

def test_equal_by_cofactors():
    ideal = Ideal((x - y,))
    c = cert_equal(exp(y) * x, exp(y) * y, ideal, R2,
                   cofactors=(exp(y),))
    assert c.route == "cofactors"
    assert skeleton_is_zero(c.residual())
    assert verify_certificate(c, samples=50)


def test_equal_by_radical_route():
    ideal = Ideal((x, y))
    c = cert_equal(sin(x) * exp(y), ZERO, ideal, R2)
    assert c.route == "radical"
    assert verify_certificate(c, samples=10)


def test_equal_refuted():
    with pytest.raises(NotEqual) as e:
        cert_equal(x, x + 1, Ideal((x,)), R1)
    assert e.value.witness == {"x": Fraction(0)}


def test_equal_wrong_cofactors_rejected():
    with pytest.raises(PatternMismatch):
        cert_equal(x, y, Ideal((x - y,)), R2, cofactors=(Const(2),))


# ---------------------------------------------------------------------------
# serialization and sampling

def test_certificate_json():
    c = cert_order(ZERO, exp(x), ZERO_IDEAL, R1)
    rec = c.to_json()
    assert rec["v"] == 1 and rec["kind"] == "order"
    assert rec["lower"] == "0" and rec["upper"] == "(exp x)"
    assert rec["verdict"]["outcome"] == "proved"
    assert isinstance(rec["obligations"], list)


def test_sample_points_deterministic():
    a = sample_points(R2, 10)
    b = sample_points(R2, 10)
    assert a == b
    assert all(R2.contains(p) for p in a)


def test_counterexample_timing():
    import time
    f3 = exp(var("x1") + var("x2") + var("x3")) - 1
    box = Box.uniform(["x1", "x2", "x3"], -2, 2)
    t0 = time.monotonic()
    with pytest.raises(OrderRefuted):
        cert_order(ZERO, f3, ZERO_IDEAL, box)
    with pytest.raises(OrderRefuted):
        cert_order(f3, ZERO, ZERO_IDEAL, box)
    assert time.monotonic() - t0 < 1.0
