"""Text front end: field expressions, weight expressions and operator words.

Field grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    atom   := NUMBER | 'r' | 'x1'..'x9' | 'log(r)' | '(' expr ')'
    exponent := INT | '(' '-'? INT ('/' INT)? ')' | '-' INT

Only ``r`` takes negative or fractional exponents; division is allowed by
nonzero constants and powers of ``r``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import ParseError
from .exact import H0, RationalFunction, as_ratfunc, format_rational

__all__ = [
    "parse_field_expr",
    "format_field",
    "parse_weight_expr",
    "parse_word",
]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],]))"
)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, value) -> bool:
        kind, v, _ = self.peek()
        if kind == "op" and v == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        kind, v, pos = self.peek()
        if kind == "op" and v == value:
            self.i += 1
            return
        raise self.error(f"expected {value!r}", pos)

    def error(self, message, pos=None):
        if pos is None:
            pos = self.peek()[2]
        return ParseError(message, self.text, pos)

    def finish(self):
        kind, v, pos = self.peek()
        if kind != "end":
            raise self.error(f"unexpected {v!r}", pos)

    def integer(self) -> int:
        kind, v, pos = self.next()
        if kind != "num":
            raise self.error("expected an integer", pos)
        return int(v)


# -- field expressions ---------------------------------------------------------


class _FieldParser(_Parser):
    def __init__(self, text, n, weight, signature):
        super().__init__(text)
        self.n = n
        self.weight = weight
        self.signature = signature

    def field(self, e=0, log=0, mono=None, c=1):
        from .model import DensityField

        mono = tuple(mono) if mono is not None else (0,) * self.n
        return DensityField(self.n, 0, {(Fraction(e), log, 0, 0, mono): c}, self.signature)

    def expr(self):
        out = self.term()
        while True:
            if self.accept("+"):
                out = out + self.term().with_weight(out.weight)
            elif self.accept("-"):
                out = out - self.term().with_weight(out.weight)
            else:
                return out

    def term(self):
        out = self.unary()
        while True:
            if self.accept("*"):
                out = (out * self.unary()).with_weight(0)
            elif self.peek()[:2] == ("op", "/"):
                pos = self.next()[2]
                den = self.unary()
                out = (out * self._inverse(den, pos)).with_weight(0)
            else:
                return out

    def _inverse(self, f, pos):
        terms = list(f.terms.items())
        if len(terms) != 1:
            raise self.error("can only divide by a constant or a power of r", pos)
        (e, l, a, b, mono), c = terms[0]
        if l or a or b or any(mono):
            raise self.error("can only divide by a constant or a power of r", pos)
        return self.field(-e, c=1 / c)

    def unary(self):
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        kind, v, pos = self.peek()
        base, what = self.atom()
        if not self.accept("^"):
            return base
        epos = self.peek()[2]
        exp = self.exponent()
        if what == "r":
            return self.field(exp)
        if exp.denominator != 1 or exp < 0:
            raise self.error("only r may carry negative or fractional exponents", epos)
        k = int(exp)
        if what == "log":
            return self.field(0, k)
        if what and what.startswith("x"):
            mono = [0] * self.n
            mono[int(what[1:]) - 1] = k
            return self.field(0, 0, mono)
        return base ** k

    def exponent(self) -> Fraction:
        if self.accept("("):
            sign = -1 if self.accept("-") else 1
            num = self.integer()
            den = 1
            if self.accept("/"):
                pos = self.peek()[2]
                den = self.integer()
                if den == 0:
                    raise self.error("zero denominator", pos)
            self.expect(")")
            return Fraction(sign * num, den)
        if self.accept("-"):
            return Fraction(-self.integer())
        kind, v, pos = self.peek()
        if kind != "num":
            raise self.error("expected an exponent", pos)
        return Fraction(self.integer())

    def atom(self):
        kind, v, pos = self.next()
        if kind == "num":
            # allow p/q literal to be handled by the term-level division
            return self.field(0, c=int(v)), None
        if kind == "name":
            if v == "r":
                return self.field(1), "r"
            if v == "log":
                self.expect("(")
                k2, v2, p2 = self.next()
                if v2 != "r":
                    raise self.error("log() only accepts r", p2)
                self.expect(")")
                return self.field(0, 1), "log"
            m = re.fullmatch(r"x([1-9])", v)
            if m:
                i = int(m.group(1))
                if i > self.n:
                    raise self.error(f"unknown variable {v!r} (boundary dimension {self.n})", pos)
                mono = [0] * self.n
                mono[i - 1] = 1
                return self.field(0, 0, mono), v
            raise self.error(f"unknown variable {v!r}", pos)
        if kind == "op" and v == "(":
            inner = self.expr()
            self.expect(")")
            return inner, None
        if kind == "end":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected {v!r}", pos)


def parse_field_expr(text: str, n: int, weight=0, signature=None):
    """Parse a field expression into a canonical :class:`DensityField`."""
    if not text.strip():
        raise ParseError("empty expression", text, 0)
    p = _FieldParser(text, n, Fraction(weight), signature)
    out = p.expr()
    p.finish()
    return out.with_weight(Fraction(weight))


def _exp_text(e: Fraction) -> str:
    if e.denominator == 1 and e >= 0:
        return str(e.numerator)
    return f"({format_rational(e)})"


def _term_key(key):
    e, l, a, b, mono = key
    return (e, l, a, b, -sum(mono), tuple(-p for p in mono))


def format_field(f) -> str:
    """Canonical text; ``parse_field_expr(format_field(f))`` gives ``f`` back."""
    if not f.terms:
        return "0"
    parts = []
    for key in sorted(f.terms, key=_term_key):
        c = f.terms[key]
        e, l, a, b, mono = key
        factors = []
        if e:
            factors.append("r" if e == 1 else f"r^{_exp_text(e)}")
        if l:
            factors.append("log(r)" if l == 1 else f"log(r)^{l}")
        if a:
            factors.append("Ls" if a == 1 else f"Ls^{a}")
        if b:
            factors.append("Lt" if b == 1 else f"Lt^{b}")
        for i, p in enumerate(mono):
            if p:
                factors.append(f"x{i + 1}" if p == 1 else f"x{i + 1}^{p}")
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else format_rational(mag) + "*" + "*".join(factors)
        else:
            body = format_rational(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# -- weight expressions --------------------------------------------------------


class _WeightParser(_Parser):
    def expr(self) -> RationalFunction:
        out = self.term()
        while True:
            if self.accept("+"):
                out = out + self.term()
            elif self.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self):
        out = self.unary()
        while True:
            if self.accept("*"):
                out = out * self.unary()
            elif self.peek()[:2] == ("op", "/"):
                pos = self.next()[2]
                den = self.unary()
                if den.is_zero():
                    raise self.error("division by zero", pos)
                out = out / den
            else:
                return out

    def unary(self):
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            neg = self.accept("-")
            k = self.integer()
            return base ** (-k if neg else k)
        return base

    def atom(self):
        kind, v, pos = self.next()
        if kind == "num":
            return as_ratfunc(int(v))
        if kind == "name" and v == "h0":
            return H0
        if kind == "op" and v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(f"unexpected {v!r}" if v else "unexpected end of input", pos)


def parse_weight_expr(text: str) -> RationalFunction:
    """Parse a rational function of ``h0`` such as ``"h0-1"`` or ``"(h0+1)/h0^2"``."""
    if text.strip() == "generic":
        return H0
    p = _WeightParser(text)
    out = p.expr()
    p.finish()
    return out


# -- operator words ------------------------------------------------------------

BLOCK_NAMES = ("K", "G", "F", "HH", "O", "Obar", "W")


def parse_word(text: str, h0=None, order: int = 10):
    """Parse a space-separated operator word into an :class:`OperatorExpr`.

    Letters: ``x``, ``y``, ``h``, ``logx``, ``logtau``, ``x^(expr)``,
    ``y^k``; blocks ``K``/``K[h0]``, ``G``, ``F``, ``HH`` (``:z^h0 H:``),
    ``O``, ``Obar`` and ``W`` (the Weyl block), built at weight ``h0`` and
    series order ``order``.
    """
    from . import algebra as alg
    from .series import (
        assemble_log_operator,
        f_polynomial,
        g_series,
        h_series,
        k_series,
        resolve_weight,
    )

    w = resolve_weight(h0)
    p = _Parser(text)
    expr = alg.OperatorExpr.identity()
    while p.peek()[0] != "end":
        kind, v, pos = p.next()
        if kind != "name":
            raise p.error(f"unexpected {v!r}", pos)
        if v in ("x", "y") and p.accept("^"):
            if p.accept("("):
                depth, start = 1, p.peek()[2]
                while depth:
                    k2, v2, p2 = p.next()
                    if k2 == "end":
                        raise p.error("unbalanced parenthesis", p2)
                    depth += (v2 == "(") - (v2 == ")")
                exp = parse_weight_expr(text[start:p2]).substitute(w)
            else:
                exp = as_ratfunc(p.integer())
            if v == "x":
                gens = (alg.xpow(exp),)
            else:
                if not exp.is_constant() or exp.constant_value().denominator != 1 or exp.constant_value() < 0:
                    raise p.error("powers of y must be nonnegative integers", pos)
                gens = (alg.Y,) * int(exp.constant_value())
            expr = expr @ alg.OperatorExpr.word(gens)
            continue
        simple = {"x": alg.X, "y": alg.Y, "h": alg.H, "logx": alg.LOGX, "logtau": alg.LOGTAU}
        if v in simple:
            expr = expr @ alg.OperatorExpr.word((simple[v],))
            continue
        if v == "K":
            if p.accept("["):
                k2, v2, p2 = p.next()
                if v2 != "h0":
                    raise p.error("only K[h0] is supported", p2)
                p.expect("]")
            expr = expr @ alg.OperatorExpr.series(k_series(w, order), "K")
        elif v == "G":
            expr = expr @ alg.OperatorExpr.series(g_series(w, order), "G")
        elif v in ("F", "HH", "O", "Obar", "W"):
            if not w.is_constant():
                raise p.error(f"block {v} needs an integer h0", pos)
            hv = w.constant_value()
            if v == "F":
                expr = expr @ alg.OperatorExpr.series(f_polynomial(hv), "F")
            elif v == "HH":
                expr = expr @ alg.OperatorExpr.series(assemble_log_operator(hv, order).blocks["ZH"], "zH")
            elif v == "W":
                expr = expr @ alg.OperatorExpr.word((alg.weyl(int(hv) - 1),))
            else:
                spec = assemble_log_operator(hv, order)
                if (v == "Obar") != (spec.m == 0):
                    raise p.error(f"{v} is the operator for h0 {'= 1' if v == 'Obar' else '>= 2'}", pos)
                expr = expr @ spec.operator()
        else:
            raise p.error(f"unknown generator {v!r}", pos)
    return expr
