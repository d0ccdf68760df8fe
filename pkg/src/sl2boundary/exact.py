"""Exact coefficient arithmetic in the formal weight parameter ``h0``.

Rationals are :class:`fractions.Fraction`.  On top of them this module
provides univariate polynomials in ``h0`` and normalized rational
functions, which serve as the coefficient field for every generic-weight
computation in the package.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce as _fold
from math import gcd, lcm
from typing import Iterable, Union

from .errors import MalformedInputError, PoleError

__all__ = [
    "Fraction",
    "WeightPolynomial",
    "RationalFunction",
    "H0",
    "as_ratfunc",
    "pochhammer",
    "ratfunc_reduce",
    "ratfunc_eval",
    "format_rational",
    "parse_rational",
]

Number = Union[int, Fraction]


def format_rational(q: Number) -> str:
    """Canonical ``p/q`` text (``p`` alone when the denominator is 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInputError(f"not a rational literal: {text!r}") from exc


class WeightPolynomial:
    """Polynomial in ``h0`` with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def constant(cls, c: Number) -> "WeightPolynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeightPolynomial.constant(other)
        if not isinstance(other, WeightPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("WP", self.coeffs))
        return self._hash

    def __add__(self, other):
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return WeightPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return WeightPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeightPolynomial(c * other for c in self.coeffs)
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return WeightPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return WeightPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = WeightPolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "WeightPolynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        if len(rem) - 1 < dq:
            return WeightPolynomial(), self
        quo = [Fraction(0)] * (len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c:
                q = c / lead
                quo[i - dq] = q
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= q * b
        return WeightPolynomial(quo), WeightPolynomial(rem[:dq])

    def monic(self) -> "WeightPolynomial":
        if self.is_zero():
            return self
        lead = self.lead
        if lead == 1:
            return self
        return WeightPolynomial(c / lead for c in self.coeffs)

    def gcd(self, other: "WeightPolynomial") -> "WeightPolynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __call__(self, value: Number):
        acc = Fraction(0) if not isinstance(value, RationalFunction) else RationalFunction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def derivative(self) -> "WeightPolynomial":
        return WeightPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def integer_form(self):
        """Return ``(scale, ints)`` with ``self == ints / scale``, ints coprime."""
        if not self.coeffs:
            return Fraction(1), (0,)
        den = _fold(lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = _fold(gcd, ints, 0) or 1
        ints = [i // g for i in ints]
        return Fraction(den, g), tuple(ints)

    def to_text(self, var: str = "h0") -> str:
        return _poly_text(self.coeffs, var)

    def __repr__(self):
        return f"WeightPolynomial({self.to_text()})"


def _poly_text(coeffs, var: str) -> str:
    if not coeffs:
        return "0"
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = format_rational(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def _as_poly(x) -> WeightPolynomial:
    if isinstance(x, WeightPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return WeightPolynomial.constant(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to WeightPolynomial")


_ONE_POLY = WeightPolynomial.constant(1)


class RationalFunction:
    """Normalized ratio ``num/den`` of polynomials in ``h0``.

    The denominator is monic and coprime to the numerator, so equality of
    rational functions is equality of their representatives.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=None, *, _reduce: bool = True):
        num = _as_poly(num)
        den = _ONE_POLY if den is None else _as_poly(den)
        if den.is_zero():
            raise MalformedInputError("rational function with zero denominator")
        if _reduce:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def unreduced(cls, num, den) -> "RationalFunction":
        """Build without normalizing; pair with :func:`ratfunc_reduce`."""
        return cls(num, den, _reduce=False)

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise MalformedInputError(f"{self} depends on h0")
        return (self.num.coeffs[0] if self.num.coeffs else Fraction(0)) / self.den.coeffs[0]

    def __bool__(self):
        return not self.num.is_zero()

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = as_ratfunc(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RationalFunction.__new__(RationalFunction)
        out.num, out.den, out._hash = -self.num, self.den, None
        return out

    def __sub__(self, other):
        return self + (-as_ratfunc(other))

    def __rsub__(self, other):
        return as_ratfunc(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFunction(0)
            out = RationalFunction.__new__(RationalFunction)
            out.num, out.den, out._hash = self.num * Fraction(other), self.den, None
            return out
        other = as_ratfunc(other)
        if self.is_constant() and self.den.degree == 0:
            return other * self.constant_value()
        if other.is_constant():
            return self * other.constant_value()
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        return self * as_ratfunc(other).inverse()

    def __rtruediv__(self, other):
        return as_ratfunc(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k, _reduce=False)

    # -- comparison / hashing --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    # -- evaluation --------------------------------------------------------
    def __call__(self, h0: Number) -> Fraction:
        return ratfunc_eval(self, h0)

    def substitute(self, value) -> "RationalFunction":
        """Compose with ``h0 -> value`` (value a RationalFunction or number)."""
        value = as_ratfunc(value)
        return as_ratfunc(self.num(value)) / as_ratfunc(self.den(value))

    def to_text(self) -> str:
        """``p/q`` for constants, otherwise ``(poly)/(poly)`` with integer coefficients."""
        if self.is_constant():
            return format_rational(self.constant_value())
        ns, ni = self.num.integer_form()
        ds, di = self.den.integer_form()
        # num/den = (ni/ns)/(di/ds) = (ni*ds)/(di*ns)
        a, b = ds.numerator * ns.denominator, ds.denominator * ns.numerator
        ni = tuple(c * a for c in ni)
        di = tuple(c * b for c in di)
        g = _fold(gcd, ni + di, 0) or 1
        ni = tuple(Fraction(c // g) for c in ni)
        di = tuple(Fraction(c // g) for c in di)
        if di[-1] < 0:
            ni = tuple(-c for c in ni)
            di = tuple(-c for c in di)
        num_text = _poly_text(ni, "h0")
        if di == (1,):
            return f"({num_text})"
        return f"({num_text})/({_poly_text(di, 'h0')})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RationalFunction({self.to_text()})"


def _normalize(num: WeightPolynomial, den: WeightPolynomial):
    if num.is_zero():
        return num, _ONE_POLY
    if den.degree > 0 and num.degree >= 0:
        g = num.gcd(den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
    lead = den.lead
    if lead != 1:
        num = num * (1 / lead)
        den = den * (1 / lead)
    return num, den


def as_ratfunc(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)):
        out = RationalFunction.__new__(RationalFunction)
        out.num, out.den, out._hash = WeightPolynomial.constant(x), _ONE_POLY, None
        return out
    if isinstance(x, WeightPolynomial):
        return RationalFunction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunction")


H0 = RationalFunction(WeightPolynomial((0, 1)))


def ratfunc_reduce(f: RationalFunction) -> RationalFunction:
    """Return the normalized representative (gcd cancelled, monic denominator)."""
    return RationalFunction(f.num, f.den)


def ratfunc_eval(f: RationalFunction, h0: Number) -> Fraction:
    """Evaluate at a rational weight; raise :class:`PoleError` at a pole."""
    h0 = Fraction(h0)
    d = f.den(h0)
    if d == 0:
        raise PoleError(h0)
    return f.num(h0) / d


def pochhammer(k, l: int):
    """Falling factorial ``k (k-1) ... (k-l+1)``, with ``(k)_0 = 1``."""
    if l < 0:
        raise MalformedInputError("pochhammer length must be nonnegative")
    if isinstance(k, RationalFunction):
        out = as_ratfunc(1)
        for i in range(l):
            out = out * (k - i)
        return out
    out = Fraction(1) if isinstance(k, Fraction) else 1
    for i in range(l):
        out *= k - i
    return out
