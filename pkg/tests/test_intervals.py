from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from cinf.intervals import Interval, interval_context, to_fraction

IC53 = interval_context(53)
IC256 = interval_context(256)


def _ref(fn_name: str, q: Fraction) -> mpfr:
    # independent reference: straight 300-bit round-to-nearest evaluation
    ctx = gmpy2.context(precision=300)
    x = ctx.add(mpfr(0), gmpy2.mpq(q.numerator, q.denominator))
    return getattr(ctx, fn_name)(x)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=10**6)


def test_interval_rejects_nan_and_inversion():
    with pytest.raises(ValueError):
        Interval(mpfr('nan'), mpfr(0))
    with pytest.raises(ValueError):
        Interval(mpfr(1), mpfr(0))


def test_const_brackets_exactly():
    iv = IC53.const(Fraction(1, 3))
    assert iv.lo < Fraction(1, 3) < iv.hi
    assert to_fraction(iv.hi) - to_fraction(iv.lo) < Fraction(1, 10**15)
    # representable rationals are exact
    half = IC53.const(Fraction(1, 2))
    assert half.lo == half.hi == 0.5


@given(a=rationals, b=rationals, c=rationals, d=rationals)
@settings(max_examples=60, deadline=None)
def test_ring_ops_contain_exact_results(a, b, c, d):
    xlo, xhi = min(a, b), max(a, b)
    ylo, yhi = min(c, d), max(c, d)
    X = IC53.from_endpoints(xlo, xhi)
    Y = IC53.from_endpoints(ylo, yhi)
    for px in (xlo, xhi, (xlo + xhi) / 2):
        for py in (ylo, yhi, (ylo + yhi) / 2):
            assert IC53.add(X, Y).contains(px + py)
            assert IC53.sub(X, Y).contains(px - py)
            assert IC53.mul(X, Y).contains(px * py)
            assert IC53.square(X).contains(px * px)
            assert IC53.pow_nat(X, 3).contains(px**3)
            assert IC53.pow_nat(X, 4).contains(px**4)


@given(q=rationals, fn=st.sampled_from(["exp", "atan", "tanh", "sin", "cos"]))
@settings(max_examples=80, deadline=None)
def test_transcendental_point_enclosures_contain_reference(q, fn):
    iv = IC53.const(q)
    out = getattr(IC53, fn)(iv)
    r = _ref(fn, q)
    assert out.lo <= r <= out.hi


@given(q=rationals, fn=st.sampled_from(["exp", "atan", "tanh", "sin", "cos"]))
@settings(max_examples=40, deadline=None)
def test_higher_precision_nests(q, fn):
    lo_prec = getattr(IC53, fn)(IC53.const(q))
    hi_prec = getattr(IC256, fn)(IC256.const(q))
    assert lo_prec.lo <= hi_prec.lo and hi_prec.hi <= lo_prec.hi


def test_exp_unit_interval_is_tight():
    iv = IC53.exp(IC53.from_endpoints(Fraction(0), Fraction(1)))
    e_hi = gmpy2.context(precision=300, round=gmpy2.RoundUp).exp(mpfr(1))
    assert iv.lo <= 1 and iv.hi >= e_hi
    assert to_fraction(iv.hi) - to_fraction(e_hi) < Fraction(1, 10**9)
    assert 1 - to_fraction(iv.lo) < Fraction(1, 10**9)


def test_sin_cos_critical_points():
    # sin has a minimum (-1) at 3*pi/2 ~ 4.712 in [4, 5]
    s = IC53.sin(IC53.from_endpoints(Fraction(4), Fraction(5)))
    assert s.lo == -1 and s.hi < 0
    # and a maximum at pi/2 ~ 1.5708 in [1, 2]
    s2 = IC53.sin(IC53.from_endpoints(Fraction(1), Fraction(2)))
    assert s2.hi == 1 and s2.lo > 0
    # cos dips to -1 at pi ~ 3.1416 in [3, 4]
    c = IC53.cos(IC53.from_endpoints(Fraction(3), Fraction(4)))
    assert c.lo == -1
    # no critical point in [1/10, 2/10]: tight monotone window
    s3 = IC53.sin(IC53.from_endpoints(Fraction(1, 10), Fraction(2, 10)))
    assert to_fraction(IC53.width(s3)) < Fraction(11, 100)
    # a window wider than a period collapses to [-1, 1]
    s4 = IC53.sin(IC53.from_endpoints(Fraction(-10), Fraction(10)))
    assert s4.lo == -1 and s4.hi == 1


def test_sin_whole_period_contains_extremes():
    s = IC53.sin(IC53.from_endpoints(Fraction(0), Fraction(7)))
    assert s.lo == -1 and s.hi == 1


def test_zero_times_infinity_is_zero():
    pos_ray = Interval(mpfr(2), mpfr('inf'))
    assert IC53.mul(IC53.const(0), pos_ray).is_exact_zero()
    mixed = IC53.mul(IC53.from_endpoints(Fraction(0), Fraction(1)), pos_ray)
    assert mixed.lo == 0 and mixed.hi == mpfr('inf')
    both = IC53.mul(IC53.from_endpoints(Fraction(-1), Fraction(1)), pos_ray)
    assert both.lo == mpfr('-inf') and both.hi == mpfr('inf')


def test_guarded_reciprocal_and_sqrt():
    pos = IC53.from_endpoints(Fraction(1, 2), Fraction(2))
    r = IC53.recip_pos(pos)
    assert r.contains(Fraction(1, 2)) and r.contains(Fraction(2))
    straddle = IC53.from_endpoints(Fraction(-1), Fraction(2))
    r2 = IC53.recip_pos(straddle)
    assert r2.lo <= Fraction(1, 2) and r2.hi == mpfr('inf')
    s = IC53.sqrt_pos(straddle)
    assert s.lo == 0 and s.hi >= Fraction(141421, 100000)
    with pytest.raises(ValueError):
        IC53.recip_pos(IC53.from_endpoints(Fraction(-2), Fraction(-1)))
    with pytest.raises(ValueError):
        IC53.sqrt_pos(IC53.from_endpoints(Fraction(-2), Fraction(0)))


def test_pow_with_negative_base():
    iv = IC53.from_endpoints(Fraction(-2), Fraction(-1))
    odd = IC53.pow_nat(iv, 3)
    assert odd.contains(Fraction(-8)) and odd.contains(Fraction(-1)) and odd.hi <= -1
    even = IC53.pow_nat(iv, 2)
    assert even.lo == 1 and even.hi == 4
    straddle = IC53.pow_nat(IC53.from_endpoints(Fraction(-3), Fraction(2)), 2)
    assert straddle.lo == 0 and straddle.hi == 9


def test_pi_enclosure():
    p = IC53.pi()
    assert p.lo < p.hi
    assert p.contains(Fraction(314159265358979323846, 10**20))
    assert to_fraction(p.hi) - to_fraction(p.lo) < Fraction(1, 10**14)


def test_midpoint_and_hull():
    a = IC53.from_endpoints(Fraction(0), Fraction(1))
    b = IC53.from_endpoints(Fraction(3), Fraction(4))
    h = IC53.hull(a, b)
    assert h.lo == 0 and h.hi == 4
    assert IC53.midpoint(a) == Fraction(1, 2)
