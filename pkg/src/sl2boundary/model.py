"""The calculus realized on the flat-boundary hyperbolic half-space.

Here ``sigma`` is represented by the coordinate ``r``, the boundary is
``R^n`` with coordinates ``x1..xn`` (a signature tuple allows Lorentzian
boundaries) and ``I^2 = 1``, so that on a density of weight ``w``

    I.D f = -r (d_r^2 + sum eps_i d_i^2) f + (d + 2w - 2) d_r f,    d = n + 1.

Besides honest functions (``log r`` allowed), fields may carry two formal
log-density symbols: ``Ls`` (log sigma, represented by ``log r``) and ``Lt``
(log tau, represented by a weight-0 polynomial ``t``).  On those the
weight operator has a nilpotent part ``N = d/dLs + d/dLt`` and

    I.D F = -r Lap F + d_r[(d + 2w - 2) F + 2 N F].

Substituting ``Ls -> log r`` and ``Lt -> t`` gives the representative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DomainError,
    ExceptionalWeightError,
    MalformedInputError,
    ModelError,
    NoSolutionError,
    WeightMismatchError,
)
from .exact import as_ratfunc, format_rational, pochhammer

Key = Tuple[Fraction, int, int, int, Tuple[int, ...]]  # (r-exponent, log r, Ls, Lt, x-monomial)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _odd_double_factorial(k: int) -> int:
    out = 1
    for i in range(k, 0, -2):
        out *= i
    return out


class DensityField:
    """Polynomial field in ``x``, Laurent in ``r`` with one rational exponent class.

    ``terms`` maps ``(e, l, a, b, mono)`` to a rational coefficient for the
    monomial ``r^e (log r)^l Ls^a Lt^b x^mono``.  ``alpha`` and ``body``
    give the normalized view ``r^alpha * sum c r^j ...`` with ``min j = 0``.
    """

    __slots__ = ("n", "weight", "terms", "signature", "logtau")

    def __init__(self, n: int, weight=0, terms=None, signature=None, logtau=None):
        if n < 1:
            raise MalformedInputError("boundary dimension must be positive")
        self.n = n
        self.weight = _frac(weight)
        self.signature = tuple(signature) if signature is not None else (1,) * n
        if len(self.signature) != n or any(s not in (1, -1) for s in self.signature):
            raise MalformedInputError("signature must be n entries of +1/-1")
        clean = {}
        for key, c in (terms or {}).items():
            c = _frac(c)
            if c:
                e, l, a, b, mono = key
                if len(mono) != n or any(p < 0 for p in mono) or min(l, a, b) < 0:
                    raise MalformedInputError(f"bad field term {key!r}")
                clean[(_frac(e), l, a, b, tuple(mono))] = c
        if clean:
            exps = {k[0] for k in clean}
            base = min(exps)
            if any((e - base).denominator != 1 for e in exps):
                raise DomainError("field mixes r-exponents that differ by non-integers")
        self.terms = clean
        self.logtau = logtau

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, n, c, weight=0, **kw) -> "DensityField":
        return cls(n, weight, {(Fraction(0), 0, 0, 0, (0,) * n): c}, **kw)

    @classmethod
    def zero(cls, n, weight=0, **kw) -> "DensityField":
        return cls(n, weight, {}, **kw)

    @classmethod
    def monomial(cls, n, mono=None, c=1, r=0, weight=0, log=0, **kw) -> "DensityField":
        mono = tuple(mono) if mono is not None else (0,) * n
        return cls(n, weight, {(_frac(r), log, 0, 0, mono): c}, **kw)

    def _like(self, terms, weight=None) -> "DensityField":
        return DensityField(
            self.n,
            self.weight if weight is None else weight,
            terms,
            self.signature,
            self.logtau,
        )

    def with_weight(self, weight) -> "DensityField":
        return self._like(self.terms, _frac(weight))

    def with_logtau(self, logtau: Optional["DensityField"]) -> "DensityField":
        return DensityField(self.n, self.weight, self.terms, self.signature, logtau)

    # -- views -------------------------------------------------------------
    @property
    def alpha(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return min(k[0] for k in self.terms)

    @property
    def body(self) -> Dict[tuple, Fraction]:
        """Terms keyed by ``(j, log r power, mono)`` relative to ``r^alpha``."""
        a = self.alpha
        return {(int(k[0] - a), k[1], k[4]): c for k, c in self.terms.items() if not (k[2] or k[3])}

    def is_zero(self) -> bool:
        return not self.terms

    def has_symbols(self) -> bool:
        return any(k[2] or k[3] for k in self.terms)

    def has_log(self) -> bool:
        return any(k[1] or k[2] or k[3] for k in self.terms)

    def r_exponents(self) -> List[Fraction]:
        return sorted({k[0] for k in self.terms})

    def min_r_power(self) -> Optional[Fraction]:
        return min((k[0] for k in self.terms), default=None)

    def coefficient(self, e, log: int = 0) -> "DensityField":
        """x-polynomial multiplying ``r^e (log r)^log`` (symbols must be absent)."""
        e = _frac(e)
        out = {}
        for (ee, l, a, b, mono), c in self.terms.items():
            if a or b:
                raise DomainError("coefficient extraction needs a field without log-density symbols")
            if ee == e and l == log:
                out[(Fraction(0), 0, 0, 0, mono)] = c
        return self._like(out, self.weight - e)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "DensityField"):
        if not isinstance(other, DensityField):
            raise TypeError("expected DensityField")
        if other.n != self.n or other.signature != self.signature:
            raise MalformedInputError("fields live on different boundaries")

    def _merge_logtau(self, other):
        if self.logtau is None:
            return other.logtau
        if other.logtau is not None and other.logtau != self.logtau:
            raise MalformedInputError("fields use different log tau representatives")
        return self.logtau

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DensityField.constant(self.n, other, self.weight, signature=self.signature)
        self._check(other)
        if self.terms and other.terms and other.weight != self.weight:
            raise WeightMismatchError(f"adding weights {self.weight} and {other.weight}")
        weight = self.weight if self.terms or not other.terms else other.weight
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return DensityField(self.n, weight, out, self.signature, self._merge_logtau(other))

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DensityField":
        c = _frac(c)
        return self._like({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = {}
        for (e1, l1, a1, b1, m1), c1 in self.terms.items():
            for (e2, l2, a2, b2, m2), c2 in other.terms.items():
                key = (e1 + e2, l1 + l2, a1 + a2, b1 + b2, tuple(p + q for p, q in zip(m1, m2)))
                out[key] = out.get(key, 0) + c1 * c2
        return DensityField(self.n, self.weight + other.weight, out, self.signature, self._merge_logtau(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise MalformedInputError("field powers must be nonnegative integers")
        out = DensityField.constant(self.n, 1, 0, signature=self.signature, logtau=self.logtau)
        for _ in range(k):
            out = out * self
        return out

    def mul_r(self, alpha) -> "DensityField":
        """Multiplication by ``r^alpha``; raises the weight by ``alpha``."""
        alpha = _frac(alpha)
        return self._like(
            {(e + alpha, l, a, b, m): c for (e, l, a, b, m), c in self.terms.items()},
            self.weight + alpha,
        )

    def mul_log_sigma(self, k: int = 1) -> "DensityField":
        return self._like({(e, l, a + k, b, m): c for (e, l, a, b, m), c in self.terms.items()})

    def mul_log_tau(self, k: int = 1) -> "DensityField":
        return self._like({(e, l, a, b + k, m): c for (e, l, a, b, m), c in self.terms.items()})

    # -- calculus ----------------------------------------------------------
    def _tau(self) -> Optional["DensityField"]:
        t = self.logtau
        if t is None or t.is_zero():
            return None
        return t

    def d_r(self) -> "DensityField":
        out = {}
        tau = self._tau()
        dt = tau.d_r() if tau is not None else None

        def add(k, c):
            if c:
                out[k] = out.get(k, 0) + c

        for (e, l, a, b, m), c in self.terms.items():
            add((e - 1, l, a, b, m), c * e)
            if l:
                add((e - 1, l - 1, a, b, m), c * l)
            if a:
                add((e - 1, l, a - 1, b, m), c * a)
            if b and dt is not None:
                for (e2, l2, a2, b2, m2), c2 in dt.terms.items():
                    add((e + e2, l + l2, a + a2, b - 1 + b2, tuple(p + q for p, q in zip(m, m2))), c * b * c2)
        return self._like(out)

    def d_x(self, i: int) -> "DensityField":
        out = {}
        tau = self._tau()
        dt = tau.d_x(i) if tau is not None else None

        def add(k, c):
            if c:
                out[k] = out.get(k, 0) + c

        for (e, l, a, b, m), c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                add((e, l, a, b, tuple(mm)), c * m[i])
            if b and dt is not None:
                for (e2, l2, a2, b2, m2), c2 in dt.terms.items():
                    add((e + e2, l + l2, a + a2, b - 1 + b2, tuple(p + q for p, q in zip(m, m2))), c * b * c2)
        return self._like(out)

    def nilpotent(self) -> "DensityField":
        """``N = d/dLs + d/dLt``, the non-diagonal part of the weight operator."""
        out = {}
        for (e, l, a, b, m), c in self.terms.items():
            if a:
                k = (e, l, a - 1, b, m)
                out[k] = out.get(k, 0) + c * a
            if b:
                k = (e, l, a, b - 1, m)
                out[k] = out.get(k, 0) + c * b
        return self._like(out)

    def laplacian(self) -> "DensityField":
        out = self.d_r().d_r()
        for i, s in enumerate(self.signature):
            term = self.d_x(i).d_x(i)
            out = out + (term if s == 1 else -term)
        return out

    def boundary_laplacian(self) -> "DensityField":
        out = self._like({})
        for i, s in enumerate(self.signature):
            term = self.d_x(i).d_x(i)
            out = out + (term if s == 1 else -term)
        return out

    # -- restriction and representatives ------------------------------------
    def finalize(self) -> "DensityField":
        """Substitute ``Ls -> log r`` and ``Lt -> t``; the result has no symbols."""
        if not self.has_symbols():
            return self.with_logtau(None)
        tau = self._tau()
        out = DensityField.zero(self.n, self.weight, signature=self.signature)
        for (e, l, a, b, m), c in self.terms.items():
            base = DensityField(self.n, self.weight, {(e, l + a, 0, 0, m): c}, self.signature)
            if b:
                if tau is None:
                    continue
                tb = tau.finalize() ** b
                base = base * tb.with_weight(0)
            out = out + base
        return out

    def restrict(self) -> "BoundaryField":
        for e, l, a, b, _ in self.terms:
            if l or a or b:
                raise DomainError("cannot restrict a field with log terms to r = 0")
            if e < 0:
                raise DomainError("cannot restrict a field with negative powers of r to r = 0")
            if e.denominator != 1:
                raise DomainError("cannot restrict a field with a fractional power of r to r = 0")
        poly = {k[4]: c for k, c in self.terms.items() if k[0] == 0}
        return BoundaryField(self.n, self.weight, poly, self.signature)

    # -- comparison and printing ------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, DensityField):
            return NotImplemented
        return (
            self.n == other.n
            and self.signature == other.signature
            and self.terms == other.terms
            and (self.weight == other.weight or not self.terms)
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def to_text(self) -> str:
        from .parsing import format_field

        return format_field(self)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"DensityField({self.to_text()!r}, w={format_rational(self.weight)})"


class BoundaryField:
    """Polynomial in ``x1..xn`` tagged with a weight."""

    __slots__ = ("n", "weight", "poly", "signature")

    def __init__(self, n, weight=0, poly=None, signature=None):
        self.n = n
        self.weight = _frac(weight)
        self.signature = tuple(signature) if signature is not None else (1,) * n
        self.poly = {tuple(m): _frac(c) for m, c in (poly or {}).items() if c}

    def is_zero(self) -> bool:
        return not self.poly

    def extend(self) -> DensityField:
        """The ``r``-independent extension."""
        return DensityField(
            self.n,
            self.weight,
            {(Fraction(0), 0, 0, 0, m): c for m, c in self.poly.items()},
            self.signature,
        )

    def laplacian(self) -> "BoundaryField":
        return self.extend().boundary_laplacian().restrict().with_weight(self.weight - 2)

    def with_weight(self, w) -> "BoundaryField":
        return BoundaryField(self.n, w, self.poly, self.signature)

    def scale(self, c) -> "BoundaryField":
        return BoundaryField(self.n, self.weight, {m: v * c for m, v in self.poly.items()}, self.signature)

    def __add__(self, other):
        out = dict(self.poly)
        for m, c in other.poly.items():
            out[m] = out.get(m, 0) + c
        return BoundaryField(self.n, self.weight, out, self.signature)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, BoundaryField):
            return NotImplemented
        return self.n == other.n and self.poly == other.poly

    def __hash__(self):
        return hash((self.n, frozenset(self.poly.items())))

    def ratio_to(self, other: "BoundaryField") -> Optional[Fraction]:
        """``c`` with ``self == c * other``, or ``None`` if not proportional."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        m0, c0 = next(iter(sorted(other.poly.items())))
        c = self.poly.get(m0, Fraction(0)) / c0
        return c if self == other.scale(c) else None

    def to_text(self) -> str:
        return self.extend().to_text()

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"BoundaryField({self.to_text()!r}, w={format_rational(self.weight)})"


# -- the degenerate Laplacian --------------------------------------------------


def _check_dim(f: DensityField, d: int):
    if d != f.n + 1:
        raise MalformedInputError(f"d = {d} does not match boundary dimension n = {f.n}")


def idotd_apply(f: DensityField, d: int, log_density: bool = False) -> DensityField:
    """``I.D`` on a weight-``w`` field (``I^2 = 1``); the result has weight ``w - 1``.

    With ``log_density=True`` the input is the representative of a log
    density and ``-r Lap U + (d - 2) d_r U`` is returned.
    """
    _check_dim(f, d)
    if log_density:
        out = -(f.laplacian().mul_r(1).with_weight(f.weight)) + f.d_r().scale(d - 2)
        return out.with_weight(-1)
    inner = f.scale(d + 2 * f.weight - 2)
    if f.has_symbols():
        inner = inner + f.nilpotent().scale(2)
    out = -(f.laplacian().mul_r(1).with_weight(f.weight)) + inner.d_r()
    return out.with_weight(f.weight - 1)


def y_apply(f: DensityField, d: int) -> DensityField:
    """``y = -I.D`` in the model."""
    return -idotd_apply(f, d)


def h_apply(f: DensityField, d: int) -> DensityField:
    """``h = d + 2w``, with the nilpotent part on log-density symbols."""
    out = f.scale(d + 2 * f.weight)
    if f.has_symbols():
        out = out + f.nilpotent().scale(2)
    return out


# -- linear differential operators ---------------------------------------------


class LinDiffOp:
    """``sum c * r^e * d_r^k0 d_1^k1 ... d_n^kn`` with rational ``c`` and integer ``e >= 0``."""

    __slots__ = ("n", "terms", "signature")

    def __init__(self, n, terms=None, signature=None):
        self.n = n
        self.signature = tuple(signature) if signature is not None else (1,) * n
        self.terms = {(int(e), tuple(k)): _frac(c) for (e, k), c in (terms or {}).items() if c}

    @classmethod
    def identity(cls, n, signature=None):
        return cls(n, {(0, (0,) * (n + 1)): 1}, signature)

    @classmethod
    def idotd(cls, n, w, signature=None) -> "LinDiffOp":
        """``I.D`` at weight ``w`` as an explicit operator."""
        sig = tuple(signature) if signature is not None else (1,) * n
        d = n + 1
        terms = {}
        z = (0,) * (n + 1)

        def unit(i, k):
            t = list(z)
            t[i] = k
            return tuple(t)

        terms[(1, unit(0, 2))] = -1
        for i, s in enumerate(sig):
            terms[(1, unit(i + 1, 2))] = -s
        terms[(0, unit(0, 1))] = d + 2 * _frac(w) - 2
        return cls(n, terms, sig)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LinDiffOp(self.n, out, self.signature)

    def scale(self, c):
        return LinDiffOp(self.n, {k: v * c for k, v in self.terms.items()}, self.signature)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "LinDiffOp") -> "LinDiffOp":
        """Composition ``self o other`` via Leibniz in ``r``."""
        out = {}
        for (e1, k1), c1 in self.terms.items():
            kr = k1[0]
            for (e2, k2), c2 in other.terms.items():
                for i in range(min(kr, e2) + 1):
                    coeff = c1 * c2 * comb(kr, i) * pochhammer(e2, i)
                    if not coeff:
                        continue
                    e = e1 + e2 - i
                    k = (kr - i + k2[0],) + tuple(a + b for a, b in zip(k1[1:], k2[1:]))
                    out[(e, k)] = out.get((e, k), 0) + coeff
        return LinDiffOp(self.n, out, self.signature)

    def commutator(self, other: "LinDiffOp") -> "LinDiffOp":
        return self @ other - other @ self

    def apply(self, f: DensityField) -> DensityField:
        out = None
        cache = {(0,) * (self.n + 1): f}

        def deriv(k):
            hit = cache.get(k)
            if hit is None:
                i = next(j for j in range(len(k) - 1, -1, -1) if k[j])
                parent = deriv(k[:i] + (k[i] - 1,) + k[i + 1 :])
                hit = parent.d_r() if i == 0 else parent.d_x(i - 1)
                cache[k] = hit
            return hit

        for (e, k), c in self.terms.items():
            g = deriv(k)
            if g.is_zero():
                continue
            g = g.mul_r(e).scale(c)
            out = g if out is None else out + g.with_weight(out.weight)
        if out is None:
            return DensityField.zero(f.n, f.weight, signature=f.signature)
        return out

    def boundary_part(self) -> "LinDiffOp":
        """Terms surviving at ``r = 0`` on ``r``-independent data."""
        return LinDiffOp(
            self.n,
            {(e, k): c for (e, k), c in self.terms.items() if e == 0 and k[0] == 0},
            self.signature,
        )

    def is_tangential(self) -> bool:
        """No ``r^0 d_r^j`` term with ``j >= 1``, i.e. ``P(r g)`` is divisible by ``r``."""
        return not any(e == 0 and k[0] >= 1 for (e, k) in self.terms)

    def __eq__(self, other):
        return isinstance(other, LinDiffOp) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, k), c in sorted(self.terms.items()):
            factors = [format_rational(c)]
            if e:
                factors.append("r" if e == 1 else f"r^{e}")
            names = ["r"] + [f"x{i + 1}" for i in range(self.n)]
            for name, p in zip(names, k):
                if p:
                    factors.append(f"d_{name}" if p == 1 else f"d_{name}^{p}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            {"coefficient": format_rational(c), "r_power": e, "derivatives": list(k)}
            for (e, k), c in sorted(self.terms.items())
        ]


def p_k_build(k: int, d: int, signature=None) -> LinDiffOp:
    """``P_k = y^k`` on weight ``(k - n)/2`` as an explicit operator."""
    if not isinstance(k, int) or k < 1:
        raise DomainError("P_k needs k >= 1")
    n = d - 1
    w0 = Fraction(k - n, 2)
    op = LinDiffOp.identity(n, signature)
    for j in range(k):
        op = (-LinDiffOp.idotd(n, w0 - j, signature)) @ op
    return op


# -- random data --------------------------------------------------------------


def random_field(rng: random.Random, n: int, weight=0, degree=3, r_degree=2, n_terms=4, signature=None, coeff_range=5) -> DensityField:
    """Random polynomial field with small integer-over-small-denominator coefficients."""
    terms = {}
    for _ in range(n_terms):
        mono = [0] * n
        for _ in range(rng.randint(0, degree)):
            mono[rng.randrange(n)] += 1
        e = rng.randint(0, r_degree)
        c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 3))
        key = (Fraction(e), 0, 0, 0, tuple(mono))
        terms[key] = terms.get(key, 0) + c
    return DensityField(n, weight, terms, signature)


def random_boundary_field(rng, n, weight=0, degree=4, n_terms=4, signature=None) -> BoundaryField:
    f = random_field(rng, n, weight, degree, 0, n_terms, signature)
    return f.restrict()


# -- sl(2) realization -------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    passed: bool
    checks: int = 0
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "checks": self.checks, "failures": self.failures}


def sl2_realization_check(d: int, samples: int = 20, seed: int = 0, kmax: int = 8, signature=None) -> CheckReport:
    """Check the sl(2) relations and their power identities on random fields."""
    if d < 3:
        raise DomainError("the model needs d >= 3")
    n = d - 1
    rng = random.Random(seed)
    report = CheckReport(f"sl2 realization d={d}", True)

    def x(f):
        return f.mul_r(1)

    def y(f):
        return y_apply(f, d)

    def h(f):
        return h_apply(f, d)

    def check(name, lhs, rhs, f):
        report.checks += 1
        if lhs != rhs:
            report.passed = False
            report.failures.append({"identity": name, "witness": f.to_text(), "weight": format_rational(f.weight)})

    for _ in range(samples):
        w = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
        f = random_field(rng, n, w, signature=signature)
        hw = d + 2 * w
        check("[x,y]=h", x(y(f)) - y(x(f)), f.scale(hw), f)
        check("[h,x]=2x", h(x(f)) - x(h(f)), x(f).scale(2), f)
        check("[h,y]=-2y", h(y(f)) - y(h(f)), y(f).scale(-2), f)
        for k in range(1, kmax + 1):
            lhs = y(f).mul_r(k) - y(f.mul_r(k))
            check(f"[x^{k},y]", lhs, f.mul_r(k - 1).scale(k * (hw + k - 1)), f)
            yk = f
            for _ in range(k - 1):
                yk = y(yk)
            lhs2 = x(y(yk)) - _y_power(x(f), k, d)
            check(f"[x,y^{k}]", lhs2, yk.scale(k * (hw - k + 1)), f)
    return report


def _y_power(f, k, d):
    for _ in range(k):
        f = y_apply(f, d)
    return f


def realize_form(form, sections: Dict[str, DensityField], d: int, logtau: Optional[DensityField] = None) -> DensityField:
    """Evaluate a canonical form of the abstract engine on concrete fields.

    Each term ``c x^a (log x)^l tail f`` becomes ``c r^a Ls^l tail(f)`` with
    ``y -> -I.D`` and ``log tau -> Lt``.  Coefficients and exponents must be
    numeric (specialize generic forms first).
    """
    cache = {}

    def tail_field(tail, label):
        key = (tail, label)
        if key in cache:
            return cache[key]
        if not tail:
            base = sections[label]
            if logtau is not None:
                base = base.with_logtau(logtau)
            cache[key] = base
            return base
        g, rest = tail[0], tail[1:]
        inner = tail_field(rest, label)
        if g.kind == "Y":
            out = y_apply(inner, d)
        elif g.kind == "LOGTAU":
            out = inner.mul_log_tau()
        else:
            raise MalformedInputError(f"cannot realize tail letter {g.text()}")
        cache[key] = out
        return out

    total = None
    for (a, l, tail, sec), c in form.sorted_items():
        if not (a.is_constant() and c.is_constant()):
            raise MalformedInputError("realize_form needs a specialized canonical form")
        term = tail_field(tail, sec.label).mul_log_sigma(l).mul_r(a.constant_value()).scale(c.constant_value())
        total = term if total is None else total + term.with_weight(total.weight)
    if total is None:
        first = next(iter(sections.values()))
        return DensityField.zero(first.n, first.weight, signature=first.signature)
    return total


# -- tangential operators, GJMS and Q ----------------------------------------


def boundary_value_of_power(f: DensityField, k: int, d: int) -> BoundaryField:
    """``(y^k f)|_{r=0}`` by repeated application."""
    return _y_power(f, k, d).restrict()


@dataclass
class GjmsReport:
    k: int
    d: int
    constant: Optional[Fraction]
    expected_abs: int
    consistent: bool
    zero_restriction: bool
    tangential: bool
    cases: int
    operator: LinDiffOp = None

    @property
    def sign(self) -> int:
        if not self.constant:
            return 0
        return 1 if self.constant > 0 else -1

    @property
    def passed(self) -> bool:
        if self.k % 2:
            return self.zero_restriction and self.tangential
        return self.consistent and self.tangential and self.constant is not None and abs(self.constant) == self.expected_abs

    def to_json(self):
        return {
            "k": self.k,
            "d": self.d,
            "constant": None if self.constant is None else format_rational(self.constant),
            "abs_expected": self.expected_abs,
            "sign": self.sign,
            "consistent": self.consistent,
            "zero_restriction": self.zero_restriction,
            "tangential": self.tangential,
            "cases": self.cases,
            "passed": self.passed,
        }


def _monomials(n, max_degree):
    if n == 0:
        yield ()
        return
    for p in range(max_degree + 1):
        for rest in _monomials(n - 1, max_degree - p):
            yield (p,) + rest


def gjms_constant(k: int, d: int, trials: int = 10, seed: int = 0, signature=None, max_degree=None) -> GjmsReport:
    """Measure ``c`` in ``P_k f| = c Lap^{k/2} f|`` over monomials and random extensions.

    The monomials span all polynomials of degree ``<= max_degree`` (default ``k``);
    the random data adds ``r``-dependent extensions of higher degree.
    """
    if k < 1:
        raise DomainError("k must be positive")
    n = d - 1
    w0 = Fraction(k - n, 2)
    op = p_k_build(k, d, signature)
    bop = op.boundary_part()
    rng = random.Random(seed)
    ratios = set()
    consistent = True
    zero = True
    cases = 0
    data = [
        DensityField(n, w0, {(Fraction(0), 0, 0, 0, m): 1}, signature)
        for m in _monomials(n, k if max_degree is None else max_degree)
    ]
    for _ in range(trials):
        g = random_field(rng, n, w0 - 1, degree=k + 2, signature=signature)
        base = random_field(rng, n, w0, degree=k + 2, r_degree=0, signature=signature)
        data.append(base + g.mul_r(1))
    for f in data:
        cases += 1
        got = op.apply(f).restrict()
        direct = boundary_value_of_power(f, k, d)
        if got != direct:
            raise ModelError("explicit P_k disagrees with repeated I.D")
        if got != bop.apply(f.restrict().extend()).restrict():
            consistent = False
        if not got.is_zero():
            zero = False
        if k % 2 == 0:
            lap = f.restrict()
            for _ in range(k // 2):
                lap = lap.laplacian()
            r = got.ratio_to(lap)
            if r is None:
                consistent = False
            elif not lap.is_zero():
                ratios.add(r)
    if len(ratios) > 1:
        consistent = False
    c = next(iter(ratios)) if len(ratios) == 1 else None
    return GjmsReport(
        k=k,
        d=d,
        constant=c if k % 2 == 0 else Fraction(0),
        expected_abs=_odd_double_factorial(k - 1) ** 2,
        consistent=consistent,
        zero_restriction=zero,
        tangential=op.is_tangential(),
        cases=cases,
        operator=op,
    )


def q_holographic(omega: DensityField, n: Optional[int] = None, allow_odd: bool = False) -> BoundaryField:
    """``Q = (y^n omega)|_{r=0} / ((n-1)!!)^2`` with ``omega`` the log of the extended scale.

    The first ``y`` uses the log-density rule, the remaining ones the
    density rule.  Odd ``n`` is refused unless ``allow_odd`` asks for the
    (non-critical) generalized quantity.
    """
    n = omega.n if n is None else n
    if n != omega.n:
        raise MalformedInputError("n does not match the field's boundary dimension")
    if n % 2 and not allow_odd:
        raise DomainError("holographic Q-curvature needs even n")
    d = n + 1
    f = -idotd_apply(omega, d, log_density=True)
    for _ in range(n - 1):
        f = y_apply(f, d)
    q = f.restrict()
    c = Fraction(1, _odd_double_factorial(n - 1) ** 2)
    return q.scale(c).with_weight(-n)


# -- boundary expansions -----------------------------------------------------


def _integer(q: Fraction) -> Optional[int]:
    return int(q) if q.denominator == 1 else None


def _sigma_text(e: Fraction):
    return int(e) if e.denominator == 1 else format_rational(e)


@dataclass
class ExpansionSolution:
    """A truncated boundary expansion and its metadata.

    ``smooth[m]`` multiplies ``r^(alpha + m)``; ``log[j]`` multiplies
    ``r^(h0 - 1 + j) log r``.  For first- and second-kind solutions the
    m-th field is the structural coefficient carrying exactly ``m``
    applications of ``I.D`` (it may itself depend on ``r``).
    """

    kind: str
    d: int
    w0: Fraction
    N: int
    smooth: List[DensityField]
    log: Optional[List[DensityField]] = None
    alpha: Fraction = Fraction(0)
    logtau: Optional[DensityField] = None
    exact: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def h0(self) -> Fraction:
        return self.d + 2 * self.w0

    @property
    def n(self) -> int:
        return self.d - 1

    def assembled(self) -> DensityField:
        out = DensityField.zero(self.n, self.w0)
        sig = self.smooth[0].signature if self.smooth else None
        if sig is not None:
            out = DensityField.zero(self.n, self.w0, signature=sig)
        for m, f in enumerate(self.smooth):
            out = out + f.mul_r(self.alpha + m).with_weight(self.w0)
        for j, f in enumerate(self.log or []):
            out = out + DensityField(
                self.n,
                self.w0,
                {(e + self.h0 - 1 + j, l + 1, a, b, mono): c for (e, l, a, b, mono), c in f.terms.items()},
                f.signature,
            )
        return out

    def residual(self) -> DensityField:
        return idotd_apply(self.assembled(), self.d)

    def residual_order(self) -> Optional[Fraction]:
        """Lowest power of ``r`` in the residual; ``None`` when it vanishes identically."""
        return self.residual().min_r_power()

    def pieces(self):
        """``(r-exponent, log power, x-polynomial field)`` of the assembled field."""
        f = self.assembled()
        keys = sorted({(k[0], k[1]) for k in f.terms})
        return [(e, l, f.coefficient(e, l)) for e, l in keys]

    def log_coefficient(self) -> BoundaryField:
        """Coefficient of ``r^(h0-1) log r`` at ``r = 0``."""
        if not self.log:
            return BoundaryField(self.n, self.w0 - self.h0 + 1)
        return self.log[0].restrict()

    def has_log_terms(self) -> bool:
        return any(not f.is_zero() for f in self.log or [])

    def to_json(self) -> dict:
        order = self.residual_order()
        return {
            "kind": self.kind,
            "d": self.d,
            "w0": format_rational(self.w0),
            "N": self.N,
            "terms": [
                {"sigma_power": _sigma_text(e), "log": bool(l), "field": g.to_text()}
                for e, l, g in self.pieces()
            ],
            "residual_order": "inf" if order is None else _sigma_text(order),
        }


def _first_kind_fields(f0: DensityField, d: int, N: int, h0: Fraction):
    fields = []
    cur = f0
    for m in range(N + 1):
        if m and cur.is_zero():
            break
        denom = factorial(m) * pochhammer(Fraction(m + 1) - h0, m)
        fields.append(cur.scale(Fraction(1) / denom) if m else cur)
        cur = idotd_apply(cur, d)
    return fields, cur.is_zero()


def solve_first_kind(f0: DensityField, d: int, N: int = 10) -> ExpansionSolution:
    """``f = sum_m r^m (I.D)^m f0 / (m! (m+1-h0)_m)`` truncated at ``m <= N``.

    At an exceptional weight ``h0 in {2, ..., N+1}`` the recursion stops at
    ``l = h0 - 2`` and :class:`ExceptionalWeightError` reports the obstruction.
    """
    _check_dim(f0, d)
    if f0.has_log():
        raise DomainError("first-kind data must be free of log terms")
    h0 = d + 2 * f0.weight
    hi = _integer(h0)
    if hi is not None and 2 <= hi <= N + 1:
        raise _exceptional(f0, d, hi)
    fields, terminated = _first_kind_fields(f0, d, N, h0)
    return ExpansionSolution("FIRST", d, f0.weight, N, fields, exact=terminated)


def _exceptional(f0, d, h0: int) -> ExceptionalWeightError:
    ell = h0 - 2
    fields, _ = _first_kind_fields(f0, d, ell, Fraction(h0))
    partial = ExpansionSolution("FIRST", d, f0.weight, ell, fields).assembled()
    res = idotd_apply(partial, d)
    # y f^(l) = O(r^l); its r^l coefficient on the boundary is the obstruction
    obstruction = (-res).mul_r(-ell).restrict()
    tangential = obstruction_field(f0, d, h0)
    multiple = obstruction.ratio_to(tangential) if not tangential.is_zero() else None
    return ExceptionalWeightError(h0, ell, obstruction, tangential, multiple)


def obstruction_field(f0, d, h0):
    return boundary_value_of_power(f0, h0 - 1, d)


def obstruction(f0: DensityField, d: int) -> BoundaryField:
    """``P_{h0-1} f0|_{r=0}``; zero means the first-kind expansion continues."""
    _check_dim(f0, d)
    h0 = d + 2 * f0.weight
    hi = _integer(h0)
    if hi is None or hi < 2:
        raise DomainError(f"obstruction needs an integer h0 >= 2, got {format_rational(h0)}")
    return obstruction_field(f0, d, hi)


def solve_second_kind(fbar0: DensityField, d: int, w0, N: int = 10, alpha=None) -> ExpansionSolution:
    """``f = r^(h0-1) sum_m r^m (I.D)^m fbar0 / (m! (m-1+h0)_m)`` for data of weight ``w0 - h0 + 1``.

    ``alpha`` is the requested leading exponent: ``0`` hands the data to the
    first-kind solver, anything other than ``0`` or ``h0 - 1`` has no solution.
    """
    _check_dim(fbar0, d)
    w0 = _frac(w0)
    h0 = d + 2 * w0
    if alpha is not None:
        alpha = _frac(alpha)
        if alpha == 0:
            return solve_first_kind(fbar0.with_weight(w0) if fbar0.weight != w0 else fbar0, d, N)
        if alpha != h0 - 1:
            raise NoSolutionError(
                f"leading exponent {format_rational(alpha)} is neither 0 nor h0 - 1 = {format_rational(h0 - 1)}"
            )
    if fbar0.weight != w0 - h0 + 1:
        raise WeightMismatchError(
            f"second-kind data must have weight {format_rational(w0 - h0 + 1)}, got {format_rational(fbar0.weight)}"
        )
    if fbar0.has_log():
        raise DomainError("second-kind data must be free of log terms")
    hi = _integer(h0)
    if hi is not None and hi <= 0:
        raise DomainError(f"second-kind expansion undefined at h0 = {hi}")
    fields = []
    cur = fbar0
    terminated = False
    for m in range(N + 1):
        if m and cur.is_zero():
            terminated = True
            break
        denom = factorial(m) * pochhammer(Fraction(m - 1) + h0, m)
        fields.append(cur.scale(Fraction(1) / denom) if m else cur)
        cur = idotd_apply(cur, d)
    else:
        terminated = cur.is_zero()
    return ExpansionSolution("SECOND", d, w0, N, fields, alpha=h0 - 1, exact=terminated)


def _log_solution(kind, target_field: DensityField, d: int, h0: int, w0: Fraction, N: int, logtau, label: str):
    from .algebra import Engine, FormalSection
    from .series import assemble_log_operator

    spec = assemble_log_operator(h0, N + 2, log_density=(kind == "LOGDENSITY"))
    op = spec.operator()
    form = op.apply(FormalSection(label, h0), Engine(), max_degree=N)
    symbolic = realize_form(form, {label: target_field}, d, logtau)
    defect = symbolic.nilpotent()
    field_ = symbolic.finalize().with_weight(w0)
    smooth, log = [], []
    top = max((k[0] for k in field_.terms), default=Fraction(0))
    for e in range(int(top) + 1):
        smooth.append(field_.coefficient(e, 0))
    for j in range(int(top) - (h0 - 1) + 1):
        log.append(field_.coefficient(h0 - 1 + j, 1))
    for k in field_.terms:
        if k[1] > 1 or k[0].denominator != 1:
            raise ModelError("log solution left the expected shape")
    sol = ExpansionSolution(kind, d, w0, N, smooth, log, logtau=logtau)
    # a density solution is N-free; a log-density solution has N U = 1
    expected = 1 if kind == "LOGDENSITY" else 0
    sol.extra["nilpotent_part_ok"] = (defect - expected).is_zero() if expected else defect.is_zero()
    sol.extra["abstract_terms"] = len(form.terms)
    return sol


def _tau_field(logtau, n, signature):
    if logtau is None:
        return None
    if logtau.has_log() or logtau.n != n:
        raise MalformedInputError("log tau must be a polynomial field on the same boundary")
    return logtau.with_weight(0)


def solve_log_kind(f0: DensityField, d: int, N: int = 10, logtau: Optional[DensityField] = None) -> ExpansionSolution:
    """Canonical log-type solution at integer ``h0 >= 1``.

    For ``h0 = 1`` the input is the log coefficient itself (weight ``(1-d)/2``).
    """
    _check_dim(f0, d)
    if f0.has_log():
        raise DomainError("log-type data must be free of log terms")
    h0 = d + 2 * f0.weight
    hi = _integer(h0)
    if hi is None or hi < 1:
        raise DomainError(f"log-type solutions need an integer h0 >= 1, got {format_rational(h0)}")
    tau = _tau_field(logtau, f0.n, f0.signature)
    label = "fbar0" if hi == 1 else "f0"
    return _log_solution("LOG", f0, d, hi, f0.weight, N, tau, label)


def solve_log_density(U0: DensityField, d: int, N: int = 10, logtau: Optional[DensityField] = None) -> ExpansionSolution:
    """Log-density extension problem: the log-type operator at ``h0 = d``.

    ``U0`` represents a log density; in the flat trivialization it is fed to
    the operator as ``Lt + (U0 - t)`` so the first ``I.D`` uses the log rule.
    """
    _check_dim(U0, d)
    if U0.has_log():
        raise DomainError("log-density data must be a polynomial representative")
    tau = _tau_field(logtau, U0.n, U0.signature)
    n = U0.n
    lt = DensityField(n, 0, {(Fraction(0), 0, 0, 1, (0,) * n): 1}, U0.signature)
    target = lt + U0.with_weight(0)
    if tau is not None:
        target = target - tau
    sol = _log_solution("LOGDENSITY", target, d, d, Fraction(0), N, tau, "U0")
    return sol


# -- interior-scale dictionary -----------------------------------------------


@dataclass
class InteriorScaleForm:
    """``f = r^(n-s) F + r^s G`` (plus ``r^s log r Fbar`` and ``r^(s+1) H`` with logs).

    In the interior scale a density of weight ``w0`` becomes ``r^(-w0) f`` so
    the exponent pair is ``(n - s, s)`` with ``s = w0 + n``; the blocks are
    the boundary-scale coefficients split at ``r^(h0-1)``.
    """

    s: Fraction
    n: int
    h0: Fraction
    F: DensityField
    G: DensityField
    Fbar: Optional[DensityField]
    H: Optional[DensityField]
    certificate: dict

    @property
    def exponents(self):
        return (self.n - self.s, self.s)

    def reassemble(self) -> DensityField:
        out = self.F + self.G.mul_r(self.h0 - 1).with_weight(self.F.weight)
        if self.H is not None:
            out = out + self.H.mul_r(self.h0).with_weight(self.F.weight)
        if self.Fbar is not None:
            fb = self.Fbar.mul_r(self.h0 - 1)
            out = out + DensityField(
                self.n, out.weight, {(e, l + 1, a, b, m): c for (e, l, a, b, m), c in fb.terms.items()}, fb.signature
            )
        return out


def normal_form_certificate(d: int, w0, samples: int = 5, seed: int = 0) -> dict:
    """Compare ``-(r d_r - 2s + n + 1) d_r - r Lap_x`` with ``I.D`` on weight ``w0``."""
    w0 = _frac(w0)
    n = d - 1
    s = w0 + n
    coeff_idotd = d + 2 * w0 - 2
    coeff_normal = 2 * s - n - 1
    rng = random.Random(seed)
    agree = coeff_idotd == coeff_normal
    for _ in range(samples):
        f = random_field(rng, n, w0)
        rlap = (f.d_r().d_r() + f.boundary_laplacian()).mul_r(1).with_weight(w0)
        normal = -rlap + f.d_r().scale(coeff_normal)
        if normal.with_weight(w0 - 1) != idotd_apply(f, d):
            agree = False
    return {
        "s": format_rational(s),
        "d+2w-2": format_rational(coeff_idotd),
        "2s-n-1": format_rational(coeff_normal),
        "agree": agree,
    }


def interior_scale_form(sol: ExpansionSolution, s) -> InteriorScaleForm:
    s = _frac(s)
    n = sol.n
    if s != sol.w0 + n:
        raise DomainError(f"s = {format_rational(s)} is inconsistent with w0 + n = {format_rational(sol.w0 + n)}")
    f = sol.assembled()
    h0 = sol.h0
    cert = normal_form_certificate(sol.d, sol.w0)
    if sol.kind == "SECOND":
        G = f.mul_r(-(h0 - 1)).with_weight(sol.w0 - h0 + 1)
        F = DensityField.zero(n, sol.w0, signature=f.signature)
        return InteriorScaleForm(s, n, h0, F, G, None, None, cert)
    if sol.kind == "FIRST":
        return InteriorScaleForm(s, n, h0, f, DensityField.zero(n, sol.w0 - h0 + 1, signature=f.signature), None, None, cert)
    hi = int(h0)
    F = DensityField(n, sol.w0, {k: c for k, c in f.terms.items() if k[1] == 0 and k[0] < hi - 1}, f.signature)
    G = f.coefficient(hi - 1, 0)
    Hterms = {(k[0] - hi, 0, 0, 0, k[4]): c for k, c in f.terms.items() if k[1] == 0 and k[0] >= hi}
    H = DensityField(n, sol.w0 - hi, Hterms, f.signature)
    fb = {(k[0] - (hi - 1), 0, 0, 0, k[4]): c for k, c in f.terms.items() if k[1] == 1}
    Fbar = DensityField(n, sol.w0 - hi + 1, fb, f.signature)
    return InteriorScaleForm(s, n, h0, F, G.with_weight(sol.w0 - hi + 1), Fbar, H, cert)
