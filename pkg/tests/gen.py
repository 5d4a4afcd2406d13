"""Shared hypothesis strategies and deterministic random generators."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from cinf.terms import (
    Add, Atan, Cos, Exp, Mul, Neg, PowNat, Sin, Sub, Tanh, Const, Var,
    pinv, psqrt,
)

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=16)


def leaf_strategy(names):
    return st.one_of(
        st.sampled_from([Var(n) for n in names]),
        small_rationals.map(lambda q: Const(q)),
    )


def term_strategy(names=("x", "y"), allow_guarded=False):
    def extend(children):
        unary = st.one_of(
            children.map(Neg),
            children.map(Exp),
            children.map(Sin),
            children.map(Cos),
            children.map(Atan),
            children.map(Tanh),
            children.map(lambda t: PowNat(t, 2)),
            children.map(lambda t: PowNat(t, 3)),
        )
        binary = st.one_of(
            st.tuples(children, children).map(lambda ab: Add(ab)),
            st.tuples(children, children).map(lambda ab: Sub(*ab)),
            st.tuples(children, children).map(lambda ab: Mul(ab)),
        )
        if allow_guarded:
            # guards that discharge structurally, so the terms are total
            guarded = st.one_of(
                children.map(lambda t: pinv(Add((Const(Fraction(1)),
                                                 PowNat(t, 2))))),
                children.map(lambda t: psqrt(Add((Const(Fraction(1)),
                                                  PowNat(t, 2))))),
            )
            return st.one_of(unary, binary, guarded)
        return st.one_of(unary, binary)

    return st.recursive(leaf_strategy(names), extend, max_leaves=6)


def dyadic_points(names, lo=-2, hi=2):
    def build(draw_vals):
        return dict(zip(names, draw_vals))
    coord = st.integers(min_value=lo * 16, max_value=hi * 16).map(
        lambda k: Fraction(k, 16))
    return st.tuples(*[coord for _ in names]).map(build)


def random_point(rng: random.Random, names, lo=-2, hi=2, denom=64):
    return {n: Fraction(rng.randint(int(lo * denom), int(hi * denom)), denom)
            for n in names}


def random_term(rng: random.Random, names=("x", "y"), depth=3):
    """Deterministic small random term, used by the seeded test pools."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var(rng.choice(list(names)))
        return Const(Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])))
    op = rng.randrange(8)
    if op == 0:
        return Add((random_term(rng, names, depth - 1),
                    random_term(rng, names, depth - 1)))
    if op == 1:
        return Sub(random_term(rng, names, depth - 1),
                   random_term(rng, names, depth - 1))
    if op == 2:
        return Mul((random_term(rng, names, depth - 1),
                    random_term(rng, names, depth - 1)))
    if op == 3:
        return Neg(random_term(rng, names, depth - 1))
    if op == 4:
        return Sin(random_term(rng, names, depth - 1))
    if op == 5:
        return Cos(random_term(rng, names, depth - 1))
    if op == 6:
        return PowNat(random_term(rng, names, depth - 1), 2)
    return Exp(random_term(rng, names, depth - 1))
