from fractions import Fraction

import pytest
from hypothesis import given, settings

from cinf.normalize import is_zero_term, normalize
from cinf.positivity import (
    discharge_global_positivity, hyp_nonzero, hyp_positive,
    structurally_positive, tietze_extension,
)
from cinf.skeleton import skeleton_is_zero
from cinf.terms import (
    Add, Const, DISCHARGED, Mul, Neg, PENDING, PowNat, PSqrt, REGISTRY, Sub,
    Var, bump, const, exp, pinv, psqrt, sin, substitute, support, var,
)

from gen import term_strategy

x, y = var("x"), var("y")


def test_operator_sugar_and_support():
    t = (x + y) * x - 2
    assert isinstance(t, Sub)
    assert support(t) == {"x", "y"}
    assert support(exp(const(1))) == frozenset()
    assert support(bump("z", -1, 1)) == {"z"}


def test_substitute_folds_bumps():
    b = bump("x", -1, 1)
    assert substitute(b, {"x": Fraction(2)}) == Const(Fraction(0))
    inside = substitute(b, {"x": Fraction(0)})
    # h = 1 at the center: value is exp(-1)
    assert inside == exp(const(-1))
    t = substitute(x + y, {"x": Fraction(1, 2)})
    assert t == Add((Const(Fraction(1, 2)), y))


def test_normalize_basic_identities():
    assert normalize(x - x) == Const(Fraction(0))
    assert normalize(x + y) == normalize(y + x)
    assert normalize(Mul((x, pinv(x)))) == Const(Fraction(1))
    assert normalize(PowNat(psqrt(x), 2)) == x
    assert normalize(exp(const(0))) == Const(Fraction(1))
    assert normalize(sin(const(0))) == Const(Fraction(0))
    assert normalize(pinv(const(4))) == Const(Fraction(1, 4))
    assert normalize(psqrt(const(Fraction(9, 4)))) == Const(Fraction(3, 2))
    assert normalize(pinv(pinv(x))) == x
    assert is_zero_term(2 * x - x - x)


def test_normalize_collects_like_terms():
    t = normalize(x * y + y * x + x * y)
    assert t == Mul((Const(Fraction(3)), x, y))
    assert normalize(PowNat(Mul((x, y)), 2)) == Mul((PowNat(x, 2),
                                                     PowNat(y, 2)))
    # sums are not distributed
    kept = normalize(Mul(((x + y), x)))
    assert any(isinstance(f, Add) for f in kept.terms)


@given(t=term_strategy())
@settings(max_examples=60, deadline=None)
def test_normalize_idempotent(t):
    nf = normalize(t)
    assert normalize(nf) == nf


@given(t=term_strategy())
@settings(max_examples=40, deadline=None)
def test_skeleton_agrees_on_plain_zero(t):
    assert skeleton_is_zero(t - t)
    assert skeleton_is_zero(Sub(Mul((t, t)), PowNat(t, 2)))


def test_skeleton_inverse_residual():
    f, phi = x, x - 1
    s = f**2 + phi**2
    g = Mul((f, pinv(s)))
    q = Neg(Mul((phi, pinv(s))))
    residual = Mul((f, g)) - 1 - Mul((phi, q))
    assert skeleton_is_zero(residual)
    assert not skeleton_is_zero(Mul((f, g)) - 1)


def test_skeleton_order_residual():
    f, g_t, phi = const(0), exp(x), x - 1
    m = g_t - f
    mt = tietze_extension(m, phi)
    u = psqrt(mt, assume=True)
    q = Neg(Mul((PowNat(phi, 3), pinv(Mul((const(4), mt)), assume=True))))
    residual = Sub(m, PowNat(u, 2)) - Mul((phi, q))
    assert skeleton_is_zero(residual)


def test_structural_positivity():
    assert structurally_positive(const(3))
    assert structurally_positive(exp(x * y))
    assert structurally_positive(1 + x**2)
    assert structurally_positive(Mul((exp(x), const(2))))
    assert structurally_positive(psqrt(1 + x**2))
    assert structurally_positive(pinv(1 + x**2))
    assert structurally_positive(x**2 + exp(y)) is not None
    assert structurally_positive(x) is None
    assert structurally_positive(x**2) is None  # vanishes at 0
    assert structurally_positive(bump("x", 0, 1)) is None
    assert structurally_positive(bump("x", 0, 1) + exp(x))
    assert structurally_positive(const(0)) is None
    assert structurally_positive(Neg(exp(x))) is None


def test_guard_autodischarge_at_construction():
    node = pinv(1 + x**2)
    assert REGISTRY.status(node.oid) == DISCHARGED
    pending = pinv(x)
    assert REGISTRY.status(pending.oid) == PENDING
    assert discharge_global_positivity(1 + pending.arg**2)


def test_conditional_hypotheses():
    f, phi = x, x - 1
    s = f**2 + phi**2
    assert structurally_positive(s) is None
    hyps = frozenset([hyp_nonzero(f, phi)])
    assert structurally_positive(s, hypotheses=hyps)
    m, psi = y, x
    mt = tietze_extension(m, psi)
    assert structurally_positive(mt) is None
    hyps2 = frozenset([hyp_positive(m, psi)])
    assert structurally_positive(mt, hypotheses=hyps2)
    inner = mt.terms[1].terms[1]
    assert isinstance(inner, PSqrt)
    assert REGISTRY.status(inner.oid) == DISCHARGED


def test_obligation_ids_do_not_affect_equality():
    a, b = pinv(x), pinv(x)
    assert a.oid != b.oid
    assert a == b and hash(a) == hash(b)
    assert normalize(Mul((a, pinv(pinv(x))))) == normalize(Mul((b, x)))


def test_registry_transitions():
    node = psqrt(x)
    REGISTRY.assume(node.oid, "test")
    REGISTRY.discharge(node.oid, "test")
    with pytest.raises(ValueError):
        REGISTRY.set_status(node.oid, "assumed")
    with pytest.raises(ValueError):
        REGISTRY.set_status(node.oid, "pending")
