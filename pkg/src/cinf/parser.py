"""Term text syntax: s-expressions and infix, printing and parsing.

Two surface syntaxes are accepted:

* s-expressions — ``(- (exp (+ x y)) 1)`` — the canonical form; printing a
  term with :func:`print_sexpr` and parsing it back is the structural
  identity (obligation ids are re-registered, never serialized);
* infix — ``exp(x+y) - 1`` — with ``+ - * ^``, unary minus, function
  application ``exp/sin/cos/atan/tanh/psqrt/pinv``, exact rational literals
  (``3``, ``5/4``, ``0.25`` — decimals are exact), and bump literals
  ``bump[x:-1,1]`` (named) or ``bump[-1,1;0,2]`` (positional, binding
  variables x1..xn; an ``order:k`` slot selects a derivative-order bump).

There is no division operator: reciprocals are explicit ``pinv`` nodes with
their positivity guard.  ``p/q`` is a single rational token, so ``1/2``
parses but ``x/2`` is a syntax error.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .terms import (
    Add, Atan, Bump, Const, Cos, Exp, Mul, Neg, PInv, PowNat, PSqrt, Sin,
    Sub, Tanh, Term, Var, ObligationRegistry, REGISTRY, pinv, psqrt,
)

_FUNCS = {"exp": Exp, "sin": Sin, "cos": Cos, "atan": Atan, "tanh": Tanh}
_HEADS = {"+", "-", "*", "^", "neg", "exp", "sin", "cos", "atan", "tanh",
          "psqrt", "pinv", "bump"}


# ---------------------------------------------------------------------------
# printing

def _rat(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def print_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return _rat(t.value)
    if isinstance(t, Add):
        return "(+ " + " ".join(print_sexpr(c) for c in t.terms) + ")"
    if isinstance(t, Mul):
        return "(* " + " ".join(print_sexpr(c) for c in t.terms) + ")"
    if isinstance(t, Sub):
        return f"(- {print_sexpr(t.a)} {print_sexpr(t.b)})"
    if isinstance(t, Neg):
        return f"(neg {print_sexpr(t.arg)})"
    if isinstance(t, PowNat):
        return f"(^ {print_sexpr(t.base)} {t.exponent})"
    if isinstance(t, Exp):
        return f"(exp {print_sexpr(t.arg)})"
    if isinstance(t, Sin):
        return f"(sin {print_sexpr(t.arg)})"
    if isinstance(t, Cos):
        return f"(cos {print_sexpr(t.arg)})"
    if isinstance(t, Atan):
        return f"(atan {print_sexpr(t.arg)})"
    if isinstance(t, Tanh):
        return f"(tanh {print_sexpr(t.arg)})"
    if isinstance(t, PSqrt):
        return f"(psqrt {print_sexpr(t.arg)})"
    if isinstance(t, PInv):
        return f"(pinv {print_sexpr(t.arg)})"
    if isinstance(t, Bump):
        tail = f" {t.order}" if t.order else ""
        return f"(bump {t.var} {_rat(t.lo)} {_rat(t.hi)}{tail})"
    raise TypeError(f"unknown node {t!r}")


_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def print_infix(t: Term) -> str:
    return _infix(t, 0)


def _infix(t: Term, outer: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        s = _rat(t.value)
        return _wrap(s, _PREC_ATOM if t.value >= 0 else _PREC_ADD, outer)
    if isinstance(t, Add):
        parts = [_infix(t.terms[0], _PREC_ADD)]
        for c in t.terms[1:]:
            if isinstance(c, Neg):
                parts.append(" - " + _infix(c.arg, _PREC_MUL))
            elif isinstance(c, Const) and c.value < 0:
                parts.append(" - " + _rat(-c.value))
            else:
                parts.append(" + " + _infix(c, _PREC_ADD))
        return _wrap("".join(parts), _PREC_ADD, outer)
    if isinstance(t, Sub):
        return _wrap(_infix(t.a, _PREC_ADD) + " - " + _infix(t.b, _PREC_MUL),
                     _PREC_ADD, outer)
    if isinstance(t, Neg):
        return _wrap("-" + _infix(t.arg, _PREC_MUL), _PREC_ADD, outer)
    if isinstance(t, Mul):
        body = "*".join(_infix(c, _PREC_MUL) for c in t.terms)
        return _wrap(body, _PREC_MUL, outer)
    if isinstance(t, PowNat):
        body = _infix(t.base, _PREC_ATOM) + f"^{t.exponent}"
        return _wrap(body, _PREC_POW, outer)
    if isinstance(t, Exp):
        return f"exp({_infix(t.arg, 0)})"
    if isinstance(t, Sin):
        return f"sin({_infix(t.arg, 0)})"
    if isinstance(t, Cos):
        return f"cos({_infix(t.arg, 0)})"
    if isinstance(t, Atan):
        return f"atan({_infix(t.arg, 0)})"
    if isinstance(t, Tanh):
        return f"tanh({_infix(t.arg, 0)})"
    if isinstance(t, PSqrt):
        return f"psqrt({_infix(t.arg, 0)})"
    if isinstance(t, PInv):
        return f"pinv({_infix(t.arg, 0)})"
    if isinstance(t, Bump):
        spec = f"{t.var}:{_rat(t.lo)},{_rat(t.hi)}"
        if t.order:
            spec += f";order:{t.order}"
        return f"bump[{spec}]"
    raise TypeError(f"unknown node {t!r}")


def _wrap(s: str, prec: int, outer: int) -> str:
    return f"({s})" if prec < outer else s


# ---------------------------------------------------------------------------
# tokenizing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[()\[\]+\-*^:;,=])
""", re.VERBOSE)


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


def _number(tok: str) -> Fraction:
    if "/" in tok:
        n, d = tok.split("/")
        if "." in n or "." in d:
            raise ParseError(f"malformed rational {tok!r}")
        return Fraction(int(n), int(d))
    return Fraction(tok)  # decimal strings convert exactly


# ---------------------------------------------------------------------------
# parsing

_SEXPR_HINT = re.compile(
    r"^\(\s*([+\-*^]|neg|exp|sin|cos|atan|tanh|psqrt|pinv|bump)[\s()]")


def parse(text: str, registry: ObligationRegistry = REGISTRY) -> Term:
    """Parse either syntax; s-expressions are recognized by their head."""
    stripped = text.strip()
    if _SEXPR_HINT.match(stripped):
        try:
            return parse_sexpr(stripped, registry)
        except ParseError:
            return parse_infix(stripped, registry)
    return parse_infix(stripped, registry)


def parse_sexpr(text: str, registry: ObligationRegistry = REGISTRY) -> Term:
    toks = _tokenize(text)
    term, idx = _sexpr(toks, 0, registry)
    if toks[idx][0] != "eof":
        raise ParseError("trailing input after s-expression", toks[idx][2])
    return term


def _sexpr(toks, i, reg):
    kind, val, pos = toks[i]
    if kind == "num":
        return Const(_number(val)), i + 1
    if kind == "name":
        return Var(val), i + 1
    if kind == "op" and val == "-" and toks[i + 1][0] == "num":
        # a negative literal like -3 or -1/2
        return Const(-_number(toks[i + 1][1])), i + 2
    if kind != "op" or val != "(":
        raise ParseError(f"unexpected token {val!r}", pos)
    head_kind, head, head_pos = toks[i + 1]
    if head not in _HEADS:
        raise ParseError(f"unknown operator {head!r}", head_pos)
    i += 2
    args = []
    while not (toks[i][0] == "op" and toks[i][1] == ")"):
        if toks[i][0] == "eof":
            raise ParseError("unclosed s-expression", toks[i][2])
        a, i = _sexpr(toks, i, reg)
        args.append(a)
    i += 1  # the closing paren

    def need(n):
        if len(args) != n:
            raise ParseError(f"{head} takes {n} argument(s)", head_pos)

    if head == "+":
        if not args:
            raise ParseError("+ needs at least one argument", head_pos)
        return (args[0] if len(args) == 1 else Add(tuple(args))), i
    if head == "*":
        if not args:
            raise ParseError("* needs at least one argument", head_pos)
        return (args[0] if len(args) == 1 else Mul(tuple(args))), i
    if head == "-":
        need(2)
        return Sub(args[0], args[1]), i
    if head == "neg":
        need(1)
        return Neg(args[0]), i
    if head == "^":
        need(2)
        base, e = args
        if not isinstance(e, Const) or e.value.denominator != 1 or e.value < 0:
            raise ParseError("^ needs a natural-number exponent", head_pos)
        return PowNat(base, int(e.value)), i
    if head in _FUNCS:
        need(1)
        return _FUNCS[head](args[0]), i
    if head == "psqrt":
        need(1)
        return psqrt(args[0], registry=reg), i
    if head == "pinv":
        need(1)
        return pinv(args[0], registry=reg), i
    if head == "bump":
        if len(args) not in (3, 4):
            raise ParseError("bump takes (bump var lo hi [order])", head_pos)
        v, lo, hi = args[0], args[1], args[2]
        if not isinstance(v, Var):
            raise ParseError("bump variable must be a name", head_pos)
        if not (isinstance(lo, Const) and isinstance(hi, Const)):
            raise ParseError("bump bounds must be rationals", head_pos)
        order = 0
        if len(args) == 4:
            o = args[3]
            if not isinstance(o, Const) or o.value.denominator != 1:
                raise ParseError("bump order must be an integer", head_pos)
            order = int(o.value)
        return Bump(v.name, lo.value, hi.value, order), i
    raise ParseError(f"unknown operator {head!r}", head_pos)


def parse_infix(text: str, registry: ObligationRegistry = REGISTRY) -> Term:
    p = _Infix(_tokenize(text), registry)
    t = p.expr()
    p.expect_eof()
    return t


def parse_prefix(text: str, registry: ObligationRegistry = REGISTRY):
    """Parse one leading infix expression; return (term, unconsumed tail).

    Used by the command language, where an expression is followed by
    keyword clauses: the expression ends at the first token that cannot
    extend it.
    """
    p = _Infix(_tokenize(text), registry)
    t = p.expr()
    return t, text[p.peek()[2]:]


class _Infix:
    def __init__(self, toks, registry):
        self.toks = toks
        self.i = 0
        self.reg = registry

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        kind, v, pos = self.next()
        if v != val:
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}",
                             pos)

    def expect_eof(self):
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"trailing input {v!r}", pos)

    def expr(self) -> Term:
        t = self.term()
        while True:
            kind, v, pos = self.peek()
            if v == "+":
                self.next()
                t = Add((t, self.term()))
            elif v == "-":
                self.next()
                t = Sub(t, self.term())
            else:
                return t

    def term(self) -> Term:
        t = self.factor()
        while self.peek()[1] == "*":
            self.next()
            t = Mul((t, self.factor()))
        return t

    def factor(self) -> Term:
        # unary minus binds looser than ^ : -x^2 is -(x^2)
        if self.peek()[1] == "-":
            self.next()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.power()

    def power(self) -> Term:
        t = self.primary()
        if self.peek()[1] == "^":
            self.next()
            kind, v, pos = self.next()
            if kind != "num" or "/" in v or "." in v:
                raise ParseError("exponent must be a natural number", pos)
            t = PowNat(t, int(v))
            if self.peek()[1] == "^":
                raise ParseError("chained ^ needs parentheses",
                                 self.peek()[2])
        return t

    def primary(self) -> Term:
        kind, v, pos = self.next()
        if kind == "num":
            return Const(_number(v))
        if kind == "name":
            if v == "bump" and self.peek()[1] == "[":
                return self.bump_literal()
            if self.peek()[1] == "(":
                self.next()
                arg = self.expr()
                self.expect(")")
                if v in _FUNCS:
                    return _FUNCS[v](arg)
                if v == "psqrt":
                    return psqrt(arg, registry=self.reg)
                if v == "pinv":
                    return pinv(arg, registry=self.reg)
                raise ParseError(f"unknown function {v!r}", pos)
            return Var(v)
        if v == "(":
            t = self.expr()
            self.expect(")")
            return t
        raise ParseError(f"unexpected token {v or 'end of input'!r}", pos)

    def rational(self) -> Fraction:
        sign = 1
        if self.peek()[1] == "-":
            self.next()
            sign = -1
        kind, v, pos = self.next()
        if kind != "num":
            raise ParseError("expected a rational number", pos)
        return sign * _number(v)

    def bump_literal(self) -> Term:
        self.expect("[")
        named: dict = {}
        positional = []
        order = 0
        first = True
        while True:
            if self.peek()[0] == "name":
                name = self.next()[1]
                self.expect(":")
                if name == "order":
                    kind, v, pos = self.next()
                    if kind != "num" or "/" in v or "." in v:
                        raise ParseError("order must be an integer", pos)
                    order = int(v)
                else:
                    lo = self.rational()
                    self.expect(",")
                    hi = self.rational()
                    named[name] = (lo, hi)
            else:
                lo = self.rational()
                self.expect(",")
                hi = self.rational()
                positional.append((lo, hi))
            first = False
            kind, v, pos = self.peek()
            if v == ";":
                self.next()
                continue
            self.expect("]")
            break
        if named and positional:
            raise ParseError("bump cannot mix named and positional bounds",
                             self.peek()[2])
        if positional:
            named = {f"x{i+1}": b for i, b in enumerate(positional)}
        if not named:
            raise ParseError("empty bump literal", self.peek()[2])
        factors = [Bump(n, lo, hi, order) for n, (lo, hi) in sorted(named.items())]
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))


# ---------------------------------------------------------------------------
# region and point literals (used by the command line and verdict records)

def parse_box(text: str, names=None):
    """Parse ``[-2,2]`` (uniform over *names*) or ``[x:-2,2; y:0,1]``.

    The uniform form needs *names*; the named form ignores it.
    """
    from .regions import Box

    p = _Infix(_tokenize(text.strip()), REGISTRY)
    p.expect("[")
    if p.peek()[0] == "name" and p.toks[p.i + 1][1] == ":":
        bounds = {}
        while True:
            name = p.next()[1]
            p.expect(":")
            lo = p.rational()
            p.expect(",")
            hi = p.rational()
            if name in bounds:
                raise ParseError(f"duplicate variable {name!r} in box")
            bounds[name] = (lo, hi)
            if p.peek()[1] == ";":
                p.next()
                continue
            p.expect("]")
            break
        p.expect_eof()
        return Box.make(bounds)
    lo = p.rational()
    p.expect(",")
    hi = p.rational()
    p.expect("]")
    p.expect_eof()
    if not names:
        raise ParseError("uniform box needs variable names")
    return Box.uniform(names, lo, hi)


def parse_point(text: str, names=None) -> dict:
    """Parse ``x=0, y=1/2`` (named) or ``0, 1/2`` (positional over *names*,
    taken in sorted order)."""
    p = _Infix(_tokenize(text.strip()), REGISTRY)
    if p.peek()[0] == "name" and p.toks[p.i + 1][1] == "=":
        point = {}
        while True:
            name = p.next()[1]
            p.expect("=")
            point[name] = p.rational()
            if p.peek()[1] == ",":
                p.next()
                continue
            p.expect_eof()
            return point
    values = [p.rational()]
    while p.peek()[1] == ",":
        p.next()
        values.append(p.rational())
    p.expect_eof()
    if names is None or len(values) != len(names):
        raise ParseError("positional point does not match the variable list")
    return dict(zip(sorted(names), values))
