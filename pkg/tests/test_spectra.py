import time
from fractions import Fraction

import gmpy2
import pytest

from cinf.errors import FilterNotPrime, NoSignChange, RegularityUnknown
from cinf.galois_spectra import (
    AdjunctionResult, RootEnclosure, ZerosetFilter, adjunction_check,
    certified_sign, check_ideal, closure_check, filter_meet, filter_member,
    hat, ivt_root, point_spectra, prime_filter_split, product_ideal,
    product_intersection_mismatches, radical_product_vs_intersection,
    splitting_identity_holds, unique_ordering_at_support,
)
from cinf.regions import Box
from cinf.smooth_ring import Ideal
from cinf.terms import Const, Exp, Sin, Var, ZERO
from cinf.verifier import PROVED, REFUTED

x, y = Var("x"), Var("y")
R1 = Box.make({"x": (-2, 2)})
R2 = Box.make({"x": (-2, 2), "y": (-2, 2)})


def oracle_bisect(fn, lo, hi, tol):
    """Independent float-free bisection oracle on a python callable over
    Fractions, using 200-bit arithmetic for the sign test."""
    with gmpy2.context(precision=200):
        flo = fn(lo)
        assert fn(hi) * flo < 0
        while hi - lo > tol:
            mid = (lo + hi) / 2
            fm = fn(mid)
            if fm == 0:
                return mid, mid
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# filters and the adjunction


def test_hat_is_principal_at_sigma():
    ideal = Ideal((x, y))
    filt = hat(ideal)
    assert filt.b == ideal.sigma
    assert check_ideal(filt).generators == (ideal.sigma,)


def test_hat_zero_ideal_and_unit_generator():
    assert hat(Ideal(())).b == ZERO
    improper = hat(Ideal((Const(1),)))
    # empty base zeroset: every zeroset inclusion out of it holds vacuously
    assert filter_member(x - Const(1), improper, R1).outcome == PROVED


def test_filter_member_proved_and_refuted():
    filt = hat(Ideal((x,)))
    v = filter_member(x * Exp(x), filt, R1)
    assert v.outcome == PROVED
    w = filter_member(x - Const(1), filt, R1)
    assert w.outcome == REFUTED
    assert w.witness_point() == {"x": Fraction(0)}


def test_filter_meet_base():
    a, b = ZerosetFilter(x), ZerosetFilter(y)
    m = filter_meet(a, b)
    # Z(x^2 + y^2) = {(0,0)}: x*y vanishes there, x - 1 does not
    assert filter_member(x * y, m, R2).outcome == PROVED
    assert filter_member(x - Const(1), m, R2).outcome == REFUTED


def test_adjunction_both_hold():
    res = adjunction_check(Ideal((x, y)), ZerosetFilter(x * x + y * y), R2)
    assert isinstance(res, AdjunctionResult)
    assert res.outcome == "both-hold"
    assert res.violations == ()


def test_adjunction_both_fail():
    # Z(x) is the y-axis, not contained in the origin's filter, and
    # x is not a member of the origin's radical
    res = adjunction_check(Ideal((x * x + y * y,)), ZerosetFilter(x), R2)
    assert res.outcome == "both-fail"
    assert res.violations == ()


def test_adjunction_zero_ideal_trivial():
    res = adjunction_check(Ideal(()), ZerosetFilter(x), R1)
    assert res.outcome == "both-hold"
    assert res.right == ()


def test_closure_check_round_trip():
    fwd, rev = closure_check(ZerosetFilter(x), R1)
    assert fwd.outcome == PROVED and rev.outcome == PROVED


def test_product_vs_intersection_common_filter():
    a, b = Ideal((x,)), Ideal((y,))
    common = radical_product_vs_intersection(a, b)
    assert common.b == a.sigma * b.sigma
    # Z(x^2 * y^2) = union of the axes; x*y vanishes on it
    assert filter_member(x * y, common, R2).outcome == PROVED
    assert filter_member(x, common, R2).outcome == REFUTED


def test_product_vs_intersection_no_mismatches():
    a, b = Ideal((x,)), Ideal((x - Const(1),))
    pool = [x * (x - Const(1)), x, x - Const(1), Const(1),
            x * x * (x - Const(1))]
    assert product_intersection_mismatches(a, b, pool, R1) == []
    assert product_ideal(a, b).generators == (x * (x - Const(1)),)


def test_prime_split_left_right():
    filt = hat(Ideal((x,)))  # principal filter of the point x = 0
    assert prime_filter_split(filt, x, x - Const(1), R1) == "left"
    assert prime_filter_split(filt, x - Const(1), x, R1) == "right"
    assert prime_filter_split(filt, x, x * Exp(x), R1) == "both"


def test_prime_split_not_prime():
    # the filter of Z(x(x-1)) = {0, 1} is not prime: neither factor's
    # zeroset contains both points
    filt = ZerosetFilter(x * (x - Const(1)))
    with pytest.raises(FilterNotPrime):
        prime_filter_split(filt, x, x - Const(1), R1)


# ---------------------------------------------------------------------------
# pointwise spectra


def test_certified_sign_cases():
    p = {"x": Fraction(0)}
    assert certified_sign(Sin(x), p) == "zero"
    assert certified_sign(Exp(x), p) == "positive"
    assert certified_sign(x - Const(1), p) == "negative"
    assert certified_sign(Sin(x) * Exp(x), {"x": Fraction(1, 3)}) == "positive"


def test_point_spectra_records():
    rec = point_spectra({"x": Fraction(0)}, Exp(x) - Const(2))
    assert rec["sign"] == "negative"
    assert rec["in_D_inf"] == PROVED
    assert rec["in_H_inf_plus"] == REFUTED
    assert rec["in_H_inf_minus"] == PROVED
    rec2 = point_spectra({"x": Fraction(0)}, x)
    assert rec2["in_D_inf"] == REFUTED
    assert rec2["in_H_inf_plus"] == REFUTED
    rec3 = point_spectra({"x": Fraction(1, 2)}, x * x + Const(1))
    assert rec3["in_D_inf"] == PROVED and rec3["in_H_inf_plus"] == PROVED
    assert rec3["point"] == {"x": "1/2"}


def test_point_spectra_requires_coverage():
    with pytest.raises(ValueError):
        point_spectra({"x": Fraction(0)}, x + y)


def test_splitting_identity_on_decided_records():
    p = {"x": Fraction(1, 7)}
    for t in (x, -x, x * x, Sin(x), Exp(x) - Const(1), ZERO):
        assert splitting_identity_holds(point_spectra(p, t))


def test_unique_ordering_buckets():
    p = {"x": Fraction(0)}
    trials = [Sin(x), x, Exp(x), Const(-3), x * x + Const(1)]
    buckets = unique_ordering_at_support(p, trials)
    assert buckets["supp"] == [Sin(x), x]
    assert buckets["positive"] == [Exp(x), x * x + Const(1)]
    assert buckets["negative"] == [Const(-3)]
    assert buckets["unknown"] == []


# ---------------------------------------------------------------------------
# certified root localization


def test_ivt_root_sin_reaches_pi_over_6():
    t0 = time.perf_counter()
    enc = ivt_root(Sin(x) - Const(Fraction(1, 2)), 0, 1,
                   tol=Fraction(1, 10 ** 10))
    elapsed = time.perf_counter() - t0
    assert enc.width <= Fraction(1, 10 ** 10)
    assert enc.regularity.outcome == PROVED
    lo, hi = oracle_bisect(
        lambda q: gmpy2.sin(gmpy2.mpq(q)) - gmpy2.mpq(1, 2),
        Fraction(0), Fraction(1), Fraction(1, 10 ** 12))
    assert enc.lo <= hi and lo <= enc.hi  # oracle enclosure overlaps
    assert abs(float(enc.midpoint()) - 0.5235987755982988) < 1e-9
    assert elapsed < 1.0


def test_ivt_root_cube_root_of_two():
    enc = ivt_root(x ** 3 - Const(2), 1, 2, tol=Fraction(1, 10 ** 10))
    assert enc.width <= Fraction(1, 10 ** 10)
    lo, hi = oracle_bisect(lambda q: q * q * q - 2,
                           Fraction(1), Fraction(2), Fraction(1, 10 ** 12))
    assert enc.lo <= hi and lo <= enc.hi
    assert abs(float(enc.midpoint()) - 1.2599210498948732) < 1e-9


def test_ivt_root_exact_rational_root():
    # 3/4 is the second dyadic midpoint of [0, 1]: the exact-zero path fires
    enc = ivt_root(x - Const(Fraction(3, 4)), 0, 1)
    assert enc.lo == enc.hi == Fraction(3, 4)
    assert enc.width == 0
    assert enc.iterations == 2


def test_ivt_root_endpoint_root():
    enc = ivt_root(Sin(x), 0, 1)
    assert enc.lo == enc.hi == Fraction(0)


def test_ivt_root_no_sign_change():
    with pytest.raises(NoSignChange):
        ivt_root(x * x + Const(1), -1, 1)


def test_ivt_root_regularity_blocks_flat_zero():
    # x^2 on [-1, 1]: f and f' vanish together at 0
    with pytest.raises(RegularityUnknown):
        ivt_root(x * x, -1, 1)


def test_ivt_root_rejects_multivariate():
    with pytest.raises(ValueError):
        ivt_root(x + y, 0, 1)


def test_root_enclosure_json():
    enc = ivt_root(x - Const(Fraction(1, 2)), 0, 1, tol=Fraction(1, 4))
    rec = enc.to_json()
    assert rec["v"] == 1
    assert rec["variable"] == "x"
    assert rec["enclosure"] == ["1/2", "1/2"]
    assert isinstance(enc, RootEnclosure)
