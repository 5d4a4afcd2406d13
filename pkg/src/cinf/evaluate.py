"""Interval and reference evaluation of terms over rational boxes.

``eval_interval`` returns a sound enclosure of the term's value range over
a box, at a given working precision, rounding outward at every operation.
Guarded nodes consult the obligation registry:

* discharged or assumed guards use the clamped semantics of
  :meth:`cinf.intervals.IntervalContext.recip_pos` / ``sqrt_pos`` — sound
  because the guard asserts the true argument is strictly positive;
* a pending guard is first re-checked on the spot (argument enclosure
  strictly positive over the box counts as discharged-here); failing that,
  the box corners and center are probed, and a point where the argument is
  provably <= 0 raises :class:`cinf.errors.ObligationViolated`; an
  undecided pending guard raises :class:`cinf.errors.PendingObligation`.

A separate straight-line evaluator ``eval_reference`` computes a plain
round-to-nearest MPFR value at a rational point.  It shares no code with
the interval path on purpose: it is the independent oracle that the
enclosure tests compare against.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

import gmpy2
from gmpy2 import mpfr

from .errors import ObligationViolated, PendingObligation
from .intervals import Interval, IntervalContext, PRECISION_LADDER, interval_context
from .normalize import normalize
from .regions import Box
from .terms import (
    Add, Atan, Bump, Const, Cos, Exp, Mul, Neg, PInv, PowNat, PSqrt, Sin,
    Sub, Tanh, Term, Var, ZERO, PENDING, REGISTRY, ObligationRegistry,
    substitute, support,
)

_MAX_PROBE_DIM = 6


def eval_interval(t: Term, region: Union[Box, Mapping[str, Interval]],
                  prec: int = 53,
                  registry: ObligationRegistry = REGISTRY) -> Interval:
    ic = interval_context(prec)
    if isinstance(region, Box):
        env = {n: ic.from_endpoints(lo, hi) for n, lo, hi in region.bounds}
        box = region
    else:
        env = dict(region)
        box = None
    memo: dict = {}
    return _ev(t, env, ic, registry, box, prec, memo)


def eval_point(t: Term, point: Mapping[str, Fraction], prec: int = 53,
               registry: ObligationRegistry = REGISTRY) -> Interval:
    box = Box.make({n: (q, q) for n, q in point.items()})
    return eval_interval(t, box, prec, registry)


def _ev(t, env, ic: IntervalContext, reg, box, prec, memo) -> Interval:
    got = memo.get(t)
    if got is not None:
        return got
    out = _ev_raw(t, env, ic, reg, box, prec, memo)
    memo[t] = out
    return out


def _ev_raw(t, env, ic: IntervalContext, reg, box, prec, memo) -> Interval:
    if isinstance(t, Const):
        return ic.const(t.value)
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise ValueError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Add):
        out = ic.zero_iv
        for c in t.terms:
            out = ic.add(out, _ev(c, env, ic, reg, box, prec, memo))
        return out
    if isinstance(t, Sub):
        return ic.sub(_ev(t.a, env, ic, reg, box, prec, memo),
                      _ev(t.b, env, ic, reg, box, prec, memo))
    if isinstance(t, Mul):
        out = ic.one_iv
        for c in t.terms:
            out = ic.mul(out, _ev(c, env, ic, reg, box, prec, memo))
        return out
    if isinstance(t, Neg):
        return ic.neg(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, PowNat):
        return ic.pow_nat(_ev(t.base, env, ic, reg, box, prec, memo),
                          t.exponent)
    if isinstance(t, Exp):
        return ic.exp(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, Sin):
        return ic.sin(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, Cos):
        return ic.cos(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, Atan):
        return ic.atan(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, Tanh):
        return ic.tanh(_ev(t.arg, env, ic, reg, box, prec, memo))
    if isinstance(t, (PSqrt, PInv)):
        a = _ev(t.arg, env, ic, reg, box, prec, memo)
        _check_guard(t, a, reg, box, prec)
        if a.hi <= 0:
            raise ObligationViolated(
                "guarded argument is nonpositive over the whole region")
        return ic.sqrt_pos(a) if isinstance(t, PSqrt) else ic.recip_pos(a)
    if isinstance(t, Bump):
        v = env.get(t.var)
        if v is None:
            raise ValueError(f"unbound variable {t.var!r}")
        return _bump_enclosure(ic, t, v)
    raise TypeError(f"unknown node {t!r}")


def _check_guard(node, arg_iv: Interval, reg, box, prec):
    if node.oid < 0:
        raise PendingObligation("guarded node without a registered guard")
    status = reg.status(node.oid)
    if status != PENDING:
        return
    if arg_iv.lo > 0:
        return  # positive over this region: settled on the spot
    if box is not None:
        for pt in _probe_points(box):
            try:
                iv = eval_point(node.arg, pt, prec, reg)
            except (PendingObligation, ObligationViolated):
                continue
            if iv.hi <= 0:
                raise ObligationViolated(
                    f"guard argument is <= 0 at {_fmt_point(pt)}")
    raise PendingObligation(
        "pending positivity guard could not be settled on this region")


def _probe_points(box: Box):
    pts = [box.center()]
    if len(box.bounds) <= _MAX_PROBE_DIM:
        pts.extend(box.corners())
    return pts


def _fmt_point(pt):
    return "(" + ", ".join(f"{n}={pt[n]}" for n in sorted(pt)) + ")"


def _bump_enclosure(ic: IntervalContext, b: Bump, v: Interval) -> Interval:
    """Range of h**(-order) * exp(-1/h), h = r2 - (v-mid)**2, on v's trace.

    As a function of h on (0, r2] the value g(h) is increasing up to
    h = 1/order and decreasing after, with limit 0 at h -> 0+; so the
    enclosure is [min at the h-endpoints or 0, max at the clamped mode].
    """
    lo_q, hi_q = ic.const(b.lo), ic.const(b.hi)
    if v.hi <= lo_q.lo or v.lo >= hi_q.hi:
        return ic.zero_iv
    inside = v.lo > lo_q.hi and v.hi < hi_q.lo
    mid = ic.const(b.mid)
    r2 = ic.const(b.radius_sq)
    d2 = ic.square(ic.sub(v, mid))
    h = ic.sub(r2, d2)
    h_lo = max(h.lo, ic.zero_iv.lo)
    h_hi = min(h.hi, r2.hi)
    if h_hi <= 0:
        return ic.zero_iv
    # g is unimodal in h with mode 1/order, so the sup over [h_lo, h_hi] is
    # attained at an endpoint or, if the mode falls inside, at the mode,
    # where g(1/k) = k**k * exp(-k) exactly.
    cands_hi = [_bump_g(ic, h_hi, b.order, up=True)]
    if h_lo > 0:
        cands_hi.append(_bump_g(ic, h_lo, b.order, up=True))
    if b.order > 0:
        mode = gmpy2.mpq(1, b.order)
        if h_lo < mode < h_hi:
            up_c = ic._up
            cands_hi.append(up_c.mul(up_c.pow(mpfr(b.order), b.order),
                                     up_c.exp(mpfr(-b.order))))
    hi = max(cands_hi)
    if not inside or h_lo <= 0:
        return Interval(ic.zero_iv.lo, hi)
    lo = min(_bump_g(ic, h_lo, b.order, up=False),
             _bump_g(ic, h_hi, b.order, up=False))
    return Interval(lo, hi)


def _bump_g(ic: IntervalContext, h: mpfr, order: int, up: bool) -> mpfr:
    if h <= 0:
        return ic.zero_iv.lo
    dn_c, up_c = ic._dn, ic._up
    if up:
        e = up_c.exp(up_c.minus(dn_c.div(mpfr(1), h)))
        if order == 0:
            return e
        return up_c.div(e, dn_c.pow(h, order))
    e = dn_c.exp(dn_c.minus(up_c.div(mpfr(1), h)))
    if order == 0:
        return e
    return dn_c.div(e, up_c.pow(h, order))


# ---------------------------------------------------------------------------
# reference evaluation (independent oracle path)

def eval_reference(t: Term, point: Mapping[str, Fraction],
                   prec: int = 256) -> mpfr:
    """Plain round-to-nearest MPFR evaluation at an exact rational point."""
    ctx = gmpy2.context(precision=prec)
    vals = {n: ctx.add(mpfr(0), gmpy2.mpq(q.numerator, q.denominator))
            for n, q in point.items()}
    return _ref(t, vals, ctx)


def _ref(t, vals, ctx):
    if isinstance(t, Const):
        return ctx.add(mpfr(0), gmpy2.mpq(t.value.numerator,
                                          t.value.denominator))
    if isinstance(t, Var):
        return vals[t.name]
    if isinstance(t, Add):
        out = mpfr(0)
        for c in t.terms:
            out = ctx.add(out, _ref(c, vals, ctx))
        return out
    if isinstance(t, Sub):
        return ctx.sub(_ref(t.a, vals, ctx), _ref(t.b, vals, ctx))
    if isinstance(t, Mul):
        out = mpfr(1)
        for c in t.terms:
            out = ctx.mul(out, _ref(c, vals, ctx))
        return out
    if isinstance(t, Neg):
        return ctx.minus(_ref(t.arg, vals, ctx))
    if isinstance(t, PowNat):
        return ctx.pow(_ref(t.base, vals, ctx), t.exponent)
    if isinstance(t, Exp):
        return ctx.exp(_ref(t.arg, vals, ctx))
    if isinstance(t, Sin):
        return ctx.sin(_ref(t.arg, vals, ctx))
    if isinstance(t, Cos):
        return ctx.cos(_ref(t.arg, vals, ctx))
    if isinstance(t, Atan):
        return ctx.atan(_ref(t.arg, vals, ctx))
    if isinstance(t, Tanh):
        return ctx.tanh(_ref(t.arg, vals, ctx))
    if isinstance(t, PSqrt):
        x = _ref(t.arg, vals, ctx)
        if x < 0:
            raise ObligationViolated("reference sqrt of a negative value")
        return ctx.sqrt(x)
    if isinstance(t, PInv):
        x = _ref(t.arg, vals, ctx)
        if x == 0:
            raise ObligationViolated("reference reciprocal of zero")
        return ctx.div(mpfr(1), x)
    if isinstance(t, Bump):
        x = vals[t.var]
        lo, hi = t.lo, t.hi
        if not (lo < x < hi):
            return mpfr(0)
        mid = ctx.add(mpfr(0), gmpy2.mpq(t.mid.numerator, t.mid.denominator))
        r2 = ctx.add(mpfr(0), gmpy2.mpq(t.radius_sq.numerator,
                                        t.radius_sq.denominator))
        h = ctx.sub(r2, ctx.square(ctx.sub(x, mid)))
        if h <= 0:
            return mpfr(0)
        val = ctx.exp(ctx.minus(ctx.div(mpfr(1), h)))
        if t.order:
            val = ctx.div(val, ctx.pow(h, t.order))
        return val
    raise TypeError(f"unknown node {t!r}")


# ---------------------------------------------------------------------------
# exact vanishing at a rational point

YES, NO, UNKNOWN = "yes", "no", "unknown"


def exact_zero_at(t: Term, point: Mapping[str, Fraction],
                  registry: ObligationRegistry = REGISTRY,
                  schedule=PRECISION_LADDER) -> str:
    """Does t vanish exactly at the rational point?

    Yes is decided symbolically (substitute and normalize to the literal
    zero); No by an interval enclosure excluding zero at some precision of
    the schedule; anything else is Unknown.
    """
    missing = support(t) - set(point)
    if missing:
        raise ValueError(f"point does not cover variables {sorted(missing)}")
    nf = normalize(substitute(t, dict(point)))
    if nf == ZERO:
        return YES
    if isinstance(nf, Const):
        return NO
    for prec in schedule:
        iv = eval_point(t, point, prec, registry)
        if iv.excludes_zero():
            return NO
        if iv.is_exact_zero():
            return YES
    return UNKNOWN
