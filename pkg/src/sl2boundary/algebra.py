"""Normal-ordering engine for the operator algebra generated by x, y, h, log x, log tau.

Operators act on formal sections of definite weight.  Every result is a
:class:`CanonicalForm`: a sum of terms ``c * x^a (log x)^l * tail * f`` where
the tail is an irreducible word over ``y``, ``log tau`` and opaque weighted
multipliers.  ``h`` never survives: it is evaluated on the weight of
whatever it acts on.

The rewriting uses only

    [h, x] = 2x, [h, y] = -2y, [x^a, y] = a x^(a-1) (h + a - 1),
    [h, log x] = 2, [y, log x] = -x^(-1) (h - 1),
    [h, log tau] = 2, [x, log tau] = [log x, log tau] = 0,

and, for the Weyl-ordered block ``(log tau y^m)_W``, the extra rule
``W x f1 = x W f1 + (1 - h0) y^(m-1) f1`` at weight ``m - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import DomainError, MalformedInputError, PoleError
from .exact import H0, RationalFunction, as_ratfunc, format_rational
from .series import (
    FormalSeries,
    SolutionOperatorSpec,
    assemble_log_operator,
    g_series,
    k_series,
    resolve_weight,
)

__all__ = [
    "Generator",
    "X",
    "Y",
    "H",
    "LOGX",
    "LOGTAU",
    "xpow",
    "weyl",
    "multiplier",
    "FormalSection",
    "CanonicalForm",
    "SeriesFactor",
    "OperatorExpr",
    "Engine",
    "reduce",
    "commutator",
    "apply_series_operator",
    "build_operator",
    "VerificationReport",
    "verify_zero",
    "STANDARD_EXPRESSIONS",
]

ZERO = as_ratfunc(0)
ONE = as_ratfunc(1)


@dataclass(frozen=True)
class Generator:
    """One letter of an operator word.

    ``kind`` is one of ``XPOW`` (multiplication by ``x^alpha``), ``Y``,
    ``H``, ``LOGX``, ``LOGTAU``, ``MUL`` (multiplication by an opaque
    section ``label`` of weight ``shift``) and ``WEYL`` (the block
    ``(log tau y^m + y^m log tau)/2``).
    """

    kind: str
    alpha: Optional[RationalFunction] = None
    label: Optional[str] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("XPOW", "Y", "H", "LOGX", "LOGTAU", "MUL", "WEYL"):
            raise MalformedInputError(f"unknown generator kind {self.kind!r}")
        if self.kind in ("XPOW", "MUL") and self.alpha is None:
            raise MalformedInputError(f"{self.kind} needs an exponent/weight")
        if self.kind == "WEYL" and (not isinstance(self.m, int) or self.m < 0):
            raise MalformedInputError("Weyl block needs an integer m >= 0")

    @property
    def shift(self) -> RationalFunction:
        """Change of h-weight caused by this letter (log tau has none)."""
        if self.kind == "XPOW":
            return self.alpha * 2
        if self.kind == "Y":
            return as_ratfunc(-2)
        if self.kind == "MUL":
            return self.alpha
        if self.kind == "WEYL":
            return as_ratfunc(-2 * self.m)
        return ZERO

    def text(self) -> str:
        if self.kind == "XPOW":
            if self.alpha == 1:
                return "x"
            return f"x^({self.alpha.to_text()})" if not self.alpha.is_constant() else f"x^{format_rational(self.alpha.constant_value())}"
        if self.kind == "MUL":
            return self.label
        if self.kind == "WEYL":
            return f"W{self.m}"
        return {"Y": "y", "H": "h", "LOGX": "logx", "LOGTAU": "logtau"}[self.kind]

    def __repr__(self):
        return f"Generator({self.text()})"


def xpow(alpha) -> Generator:
    return Generator("XPOW", alpha=as_ratfunc(alpha))


def weyl(m: int) -> Generator:
    return Generator("WEYL", m=m)


def multiplier(label: str, weight) -> Generator:
    """Multiplication by an opaque section ``label`` whose weight is ``weight``.

    It commutes with ``x``, ``log x`` and ``log tau`` and is irreducible
    against ``y``.  The weight here is the h-shift, i.e. ``2 * w``.
    """
    return Generator("MUL", alpha=as_ratfunc(weight), label=label)


X = xpow(1)
Y = Generator("Y")
H = Generator("H")
LOGX = Generator("LOGX")
LOGTAU = Generator("LOGTAU")


@dataclass(frozen=True)
class FormalSection:
    """A section with label and h-eigenvalue ``weight``."""

    label: str
    weight: RationalFunction

    def __init__(self, label: str, weight=None):
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "weight", resolve_weight(weight))


def _degree(a: RationalFunction) -> Fraction:
    """x-degree of ``x^a``: the exponent with ``h0 - 1`` counted as zero."""
    if a.is_constant():
        return a.constant_value()
    return a.num(1) / a.den(1)


def _tail_text(tail) -> str:
    return " ".join(g.text() if isinstance(g, Generator) else g for g in tail)


class CanonicalForm:
    """Sum of normal-ordered terms keyed by ``(exponent, logdeg, tail, section)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def of(cls, section: FormalSection) -> "CanonicalForm":
        return cls({(ZERO, 0, (), section): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return CanonicalForm(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "CanonicalForm":
        c = as_ratfunc(c)
        if not c:
            return CanonicalForm()
        return CanonicalForm({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @staticmethod
    def sort_key(key):
        a, l, tail, sec = key
        return (
            _degree(a),
            a.to_text(),
            l,
            tuple(g.text() if isinstance(g, Generator) else g for g in tail),
            sec.label,
        )

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: self.sort_key(kv[0]))

    def first_term(self):
        items = self.sorted_items()
        return items[0] if items else None

    def min_degree(self) -> Optional[Fraction]:
        return min((_degree(k[0]) for k in self.terms), default=None)

    def truncate(self, max_degree) -> "CanonicalForm":
        if max_degree is None:
            return self
        return CanonicalForm({k: v for k, v in self.terms.items() if _degree(k[0]) <= max_degree})

    def substitute(self, h0) -> "CanonicalForm":
        """Specialize every coefficient, exponent and section weight at ``h0``."""
        value = resolve_weight(h0)
        out = {}
        for (a, l, tail, sec), c in self.terms.items():
            tail2 = tuple(
                multiplier(g.label, g.alpha.substitute(value))
                if isinstance(g, Generator) and g.kind == "MUL"
                else g
                for g in tail
            )
            key = (a.substitute(value), l, tail2, FormalSection(sec.label, sec.weight.substitute(value)))
            out[key] = out.get(key, ZERO) + c.substitute(value)
        return CanonicalForm(out)

    @staticmethod
    def term_text(key, coeff) -> str:
        a, l, tail, sec = key
        parts = []
        if a != 0:
            parts.append("x" if a == 1 else (f"x^{format_rational(a.constant_value())}" if a.is_constant() else f"x^({a.to_text()})"))
        if l:
            parts.append("logx" if l == 1 else f"logx^{l}")
        if tail:
            parts.append(_tail_text(tail))
        parts.append(sec.label)
        c = coeff.to_text()
        return f"{c}*" + " ".join(parts)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(self.term_text(k, v) for k, v in self.sorted_items())

    def to_json(self) -> list:
        out = []
        for (a, l, tail, sec), c in self.sorted_items():
            out.append(
                {
                    "coefficient": c.to_text(),
                    "x_power": a.to_text(),
                    "logx": l,
                    "tail": _tail_text(tail),
                    "section": sec.label,
                }
            )
        return out

    def __repr__(self):
        return f"CanonicalForm({self.to_text()})"


# Terms are manipulated as plain dicts inside the engine.


def _acc(out: dict, key, c):
    if c:
        v = out.get(key)
        out[key] = c if v is None else v + c


def _shift_x(form: dict, alpha, out: dict, c=ONE):
    for (a, l, t, f), v in form.items():
        _acc(out, (a + alpha, l, t, f), v * c)


def _mul_logx(form: dict, out: dict, c=ONE):
    for (a, l, t, f), v in form.items():
        _acc(out, (a, l + 1, t, f), v * c)


def _add_into(out: dict, form: dict, c=ONE):
    for k, v in form.items():
        _acc(out, k, v * c)


def _tail_weight(tail, section: FormalSection) -> RationalFunction:
    w = section.weight
    for g in tail:
        w = w + g.shift
    return w


_Y_TAIL = Y
_LOGTAU_TAIL = LOGTAU


class Engine:
    """Applies generators to canonical forms.

    ``contraction=True`` selects the I^2 = 0 contraction in which every
    commutator of ``y`` with ``x``, ``x^a`` and ``log x`` vanishes while
    the ``h`` relations are unchanged.
    """

    def __init__(self, contraction: bool = False):
        self.contraction = contraction
        self._ycache = {}

    # -- single-term rules ---------------------------------------------
    def h_term(self, key) -> dict:
        a, l, tail, f = key
        out = {}
        _acc(out, key, _tail_weight(tail, f) + a * 2)
        if l:
            _acc(out, (a, l - 1, tail, f), as_ratfunc(2 * l))
        for i, g in enumerate(tail):
            if g is LOGTAU or g == LOGTAU:
                _acc(out, (a, l, tail[:i] + tail[i + 1 :], f), as_ratfunc(2))
        return out

    def h_form(self, form: dict) -> dict:
        out = {}
        for k, v in form.items():
            _add_into(out, self.h_term(k), v)
        return out

    def y_term(self, key) -> dict:
        hit = self._ycache.get(key)
        if hit is not None:
            return hit
        a, l, tail, f = key
        out = {}
        if self.contraction or (a == 0 and l == 0):
            out[(a, l, (Y,) + tail, f)] = ONE
        elif a != 0:
            inner = {(ZERO, l, tail, f): ONE}
            _shift_x(self.y_form(inner), a, out)
            hv = self.h_form(inner)
            _add_into(hv, inner, a - 1)
            _shift_x(hv, a - 1, out, -a)
        else:
            inner = {(ZERO, l - 1, tail, f): ONE}
            _mul_logx(self.y_form(inner), out)
            hv = self.h_form(inner)
            _add_into(hv, inner, -1)
            _shift_x(hv, -1, out, -1)
        out = {k: v for k, v in out.items() if v}
        self._ycache[key] = out
        return out

    def y_form(self, form: dict) -> dict:
        out = {}
        for k, v in form.items():
            _add_into(out, self.y_term(k), v)
        return out

    def weyl_term(self, key, m: int, rule: bool = True) -> dict:
        a, l, tail, f = key
        out = {}
        if (
            rule
            and a == 1
            and l == 0
            and LOGTAU not in tail
            and _tail_weight(tail, f) == m - 1
        ):
            inner = {(ZERO, 0, tail, f): ONE}
            _shift_x(self.weyl_form(inner, m), 1, out)
            ym1 = inner
            for _ in range(m - 1):
                ym1 = self.y_form(ym1)
            if m >= 1:
                _add_into(out, ym1, as_ratfunc(-m))
            return {k: v for k, v in out.items() if v}
        single = {key: ONE}
        ym = single
        for _ in range(m):
            ym = self.y_form(ym)
        _add_into(out, self.apply_gen(LOGTAU, ym), Fraction(1, 2))
        lt = self.apply_gen(LOGTAU, single)
        for _ in range(m):
            lt = self.y_form(lt)
        _add_into(out, lt, Fraction(1, 2))
        return {k: v for k, v in out.items() if v}

    def weyl_form(self, form: dict, m: int, rule: bool = True) -> dict:
        out = {}
        for k, v in form.items():
            _add_into(out, self.weyl_term(k, m, rule), v)
        return out

    # -- generators and series ----------------------------------------
    def apply_gen(self, g: Generator, form: dict) -> dict:
        kind = g.kind
        if kind == "XPOW":
            out = {}
            _shift_x(form, g.alpha, out)
            return out
        if kind == "Y":
            return self.y_form(form)
        if kind == "H":
            return self.h_form(form)
        if kind == "LOGX":
            out = {}
            _mul_logx(form, out)
            return out
        if kind in ("LOGTAU", "MUL"):
            return {(a, l, (g,) + t, f): v for (a, l, t, f), v in form.items()}
        if kind == "WEYL":
            return self.weyl_form(form, g.m)
        raise MalformedInputError(f"cannot apply {g!r}")

    def apply_series(self, series: FormalSeries, form: dict, max_degree=None) -> dict:
        """``sum_k c_k x^k y^k`` applied to ``form``."""
        out = {}
        cur = form
        for k, c in enumerate(series.coeffs):
            if k:
                cur = self.y_form(cur)
                if max_degree is not None and k > max_degree and _plain(cur):
                    break
            if c:
                _shift_x(cur, as_ratfunc(k), out, c)
        return {k: v for k, v in out.items() if v}


def _plain(form: dict) -> bool:
    """All terms have a nonnegative integer x-power and no log x."""
    for a, l, _, _ in form:
        if l or not a.is_constant():
            return False
        v = a.constant_value()
        if v < 0 or v.denominator != 1:
            return False
    return True


@dataclass(frozen=True)
class SeriesFactor:
    """The normal-ordered series ``:S(z): = sum_k c_k x^k y^k``."""

    series: FormalSeries
    name: str = ""

    def text(self) -> str:
        return f":{self.name or self.series.name or 'S'}:"


Factor = Union[Generator, SeriesFactor]


def _lowering(f: Factor) -> Fraction:
    """Largest possible drop in x-degree caused by one factor."""
    if isinstance(f, SeriesFactor):
        return Fraction(0)
    if f.kind == "Y":
        return Fraction(1)
    if f.kind == "WEYL":
        return Fraction(f.m)
    if f.kind == "XPOW":
        return max(Fraction(0), -_degree(f.alpha))
    return Fraction(0)


class OperatorExpr:
    """Finite linear combination of words; the leftmost factor acts last."""

    __slots__ = ("words",)

    def __init__(self, words=None):
        merged = {}
        for c, factors in words or []:
            factors = tuple(factors)
            merged[factors] = merged.get(factors, ZERO) + as_ratfunc(c)
        self.words = [(c, f) for f, c in merged.items() if c]

    @classmethod
    def word(cls, factors: Iterable[Factor], coeff=1) -> "OperatorExpr":
        return cls([(coeff, tuple(factors))])

    @classmethod
    def identity(cls) -> "OperatorExpr":
        return cls.word(())

    @classmethod
    def series(cls, s: FormalSeries, name: str = "") -> "OperatorExpr":
        return cls.word((SeriesFactor(s, name or s.name),))

    def __add__(self, other):
        return OperatorExpr(self.words + _as_expr(other).words)

    def __sub__(self, other):
        return self + _as_expr(other).scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "OperatorExpr":
        c = as_ratfunc(c)
        return OperatorExpr([(w * c, f) for w, f in self.words])

    def __matmul__(self, other):
        """Composition ``self o other``."""
        other = _as_expr(other)
        return OperatorExpr(
            [(c1 * c2, f1 + f2) for c1, f1 in self.words for c2, f2 in other.words]
        )

    def __rmatmul__(self, other):
        return _as_expr(other) @ self

    def substitute(self, gen: Generator, replacement: "OperatorExpr") -> "OperatorExpr":
        """Replace every occurrence of ``gen`` (Weyl blocks are expanded first)."""
        out = OperatorExpr.identity().scale(0)
        for c, factors in self.expand_weyl().words:
            term = OperatorExpr.identity().scale(c)
            for f in factors:
                term = term @ (replacement if f == gen else OperatorExpr.word((f,)))
            out = out + term
        return out

    def expand_weyl(self, averaged: bool = True) -> "OperatorExpr":
        """Rewrite each Weyl block as its defining words.

        With ``averaged=False`` the block becomes the plain word ``log tau y^m``.
        """
        out = []
        for c, factors in self.words:
            parts = [[(ONE, ())]]
            for f in factors:
                if isinstance(f, Generator) and f.kind == "WEYL":
                    ym = (Y,) * f.m
                    if averaged:
                        choices = [(as_ratfunc(Fraction(1, 2)), (LOGTAU,) + ym), (as_ratfunc(Fraction(1, 2)), ym + (LOGTAU,))]
                    else:
                        choices = [(ONE, (LOGTAU,) + ym)]
                else:
                    choices = [(ONE, (f,))]
                parts.append(choices)
            words = [(ONE, ())]
            for choices in parts[1:]:
                words = [(c1 * c2, w1 + w2) for c1, w1 in words for c2, w2 in choices]
            out.extend((c * c1, w) for c1, w in words)
        return OperatorExpr(out)

    def apply(self, target, engine: Optional[Engine] = None, max_degree=None) -> CanonicalForm:
        engine = engine or Engine()
        if isinstance(target, FormalSection):
            start = {(ZERO, 0, (), target): ONE}
        elif isinstance(target, CanonicalForm):
            start = dict(target.terms)
        else:
            raise MalformedInputError("target must be a FormalSection or CanonicalForm")
        total = {}
        for c, factors in self.words:
            form = start
            slack = [Fraction(0)] * (len(factors) + 1)
            # slack[i] = total lowering of factors[0:i], the ones acting after factor i
            for i in range(1, len(factors) + 1):
                slack[i] = slack[i - 1] + _lowering(factors[i - 1])
            for i in range(len(factors) - 1, -1, -1):
                f = factors[i]
                bound = None if max_degree is None else max_degree + slack[i]
                if isinstance(f, SeriesFactor):
                    form = engine.apply_series(f.series, form, bound)
                else:
                    form = engine.apply_gen(f, form)
                if bound is not None:
                    form = {k: v for k, v in form.items() if _degree(k[0]) <= bound}
                if not form:
                    break
            _add_into(total, form, c)
        return CanonicalForm(total).truncate(max_degree)

    def to_text(self) -> str:
        if not self.words:
            return "0"
        parts = []
        for c, factors in self.words:
            body = " ".join(f.text() for f in factors) or "1"
            parts.append(f"{c.to_text()}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"OperatorExpr({self.to_text()})"


def _as_expr(x) -> OperatorExpr:
    if isinstance(x, OperatorExpr):
        return x
    if isinstance(x, (Generator, SeriesFactor)):
        return OperatorExpr.word((x,))
    if isinstance(x, (list, tuple)):
        return OperatorExpr.word(x)
    if isinstance(x, (int, Fraction, RationalFunction)):
        return OperatorExpr.identity().scale(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an operator")


def reduce(word, target, contraction: bool = False, engine: Optional[Engine] = None) -> CanonicalForm:
    """Normal-order ``word`` (a sequence of generators or an OperatorExpr) on ``target``."""
    engine = engine or Engine(contraction)
    return _as_expr(word).apply(target, engine)


def commutator(a, b, target, contraction: bool = False, engine: Optional[Engine] = None) -> CanonicalForm:
    """``reduce(ab) - reduce(ba)``."""
    engine = engine or Engine(contraction)
    a, b = _as_expr(a), _as_expr(b)
    return (a @ b).apply(target, engine) - (b @ a).apply(target, engine)


def apply_series_operator(series: FormalSeries, target, order: int, engine: Optional[Engine] = None) -> CanonicalForm:
    """``:S(z):`` applied to ``target``, keeping x-degree below ``order``."""
    if series.order < order - 1:
        raise MalformedInputError(
            f"series of order {series.order} cannot resolve x-degree {order - 1}"
        )
    return OperatorExpr.series(series).apply(target, engine, max_degree=order - 1)


def build_operator(spec: SolutionOperatorSpec, *, averaged: bool = True) -> OperatorExpr:
    """Turn a :class:`SolutionOperatorSpec` into an operator expression.

    ``averaged=False`` replaces the Weyl block by the plain word ``log tau y^m``.
    """
    kind = spec.kind
    b = spec.blocks
    if kind == "FIRST":
        return OperatorExpr.series(b["K"], "K")
    if kind == "SECOND":
        return OperatorExpr.word((xpow(spec.h0 - 1),)) @ OperatorExpr.series(b["G"], "G")
    if kind not in ("LOG", "LOGDENSITY"):
        raise MalformedInputError(f"unknown operator kind {kind!r}")
    kbar = OperatorExpr.series(b["KBAR"], "Kbar")
    zh = OperatorExpr.series(b["ZH"], "zH")
    if spec.m == 0:
        return OperatorExpr.word((LOGX,)) @ kbar - kbar @ OperatorExpr.word((LOGTAU,)) + zh
    m = spec.m
    xm = OperatorExpr.word((xpow(m),))
    ym = OperatorExpr.word((Y,) * m)
    w = OperatorExpr.word((weyl(m),)) if averaged else OperatorExpr.word((LOGTAU,) + (Y,) * m)
    inv_c = Fraction(1) / spec.constant
    log_block = xm @ OperatorExpr.word((LOGX,)) @ kbar @ ym - xm @ kbar @ w
    return OperatorExpr.series(b["F"], "F") - zh.scale(inv_c) - log_block.scale(inv_c)


def first_kind_spec(h0, N: int) -> SolutionOperatorSpec:
    w = resolve_weight(h0)
    return SolutionOperatorSpec(kind="FIRST", h0=w, order=N, blocks={"K": k_series(w, N)})


def second_kind_spec(h0, N: int) -> SolutionOperatorSpec:
    w = resolve_weight(h0)
    return SolutionOperatorSpec(kind="SECOND", h0=w, order=N, blocks={"G": g_series(w, N)})


# -- verification ------------------------------------------------------


@dataclass
class WeightResult:
    weight: str
    zero: bool
    n_terms: int
    first_offending: Optional[str] = None
    error: Optional[str] = None


@dataclass
class VerificationReport:
    name: str
    order: int
    results: list

    @property
    def passed(self) -> bool:
        return all(r.zero and r.error is None for r in self.results)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "passed": self.passed,
            "results": [r.__dict__ for r in self.results],
        }


Builder = Callable[[RationalFunction, int], tuple]


def verify_zero(builder: Builder, order: int, weights: Sequence = (None,), name: str = "", engine_factory=Engine) -> VerificationReport:
    """Check that ``expr(h0)`` applied to its target vanishes up to x-degree ``order``.

    ``builder(h0, order)`` returns ``(OperatorExpr, target)``; ``target`` is a
    section or a canonical form, and optionally a third element ``expected``
    whose difference with the result is checked instead.
    """
    results = []
    for w in weights:
        h0 = resolve_weight(w)
        label = "generic" if not h0.is_constant() else format_rational(h0.constant_value())
        try:
            built = builder(h0, order)
            expr, target = built[0], built[1]
            got = expr.apply(target, engine_factory(), max_degree=order)
            if len(built) > 2 and built[2] is not None:
                got = got - built[2].truncate(order)
        except PoleError as exc:
            results.append(WeightResult(label, False, 0, error=f"pole at h0 = {label}: {exc}"))
            continue
        first = got.first_term()
        results.append(
            WeightResult(
                label,
                got.is_zero(),
                len(got.terms),
                None if first is None else CanonicalForm.term_text(*first),
            )
        )
    return VerificationReport(name, order, results)


def _log_spec(h0: RationalFunction, order: int) -> SolutionOperatorSpec:
    if not h0.is_constant():
        raise MalformedInputError("log-type operators need an integer weight")
    return assemble_log_operator(h0.constant_value(), order + 2)


def _y_K_f0(h0, N):
    return OperatorExpr.word((Y,)) @ build_operator(first_kind_spec(h0, N + 2)), FormalSection("f0", h0)


def _K_x_f1(h0, N):
    return build_operator(first_kind_spec(h0, N + 2)) @ OperatorExpr.word((X,)), FormalSection("f1", h0 - 2)


def _y_second(h0, N):
    return OperatorExpr.word((Y,)) @ build_operator(second_kind_spec(h0, N + 2)), FormalSection("fbar0", 2 - h0)


def _y_O_f0(h0, N):
    spec = _log_spec(h0, N)
    label = "fbar0" if spec.m == 0 else "f0"
    return OperatorExpr.word((Y,)) @ spec.operator(), FormalSection(label, h0)


def _O_x_f1(h0, N):
    return _log_spec(h0, N).operator() @ OperatorExpr.word((X,)), FormalSection("f1", h0 - 2)


def leftover_residue(h0: RationalFunction, N: int) -> CanonicalForm:
    """``x^(h0-1) :Kbar: y^(h0-2) f1 / ((h0-2)!)^2``, the price of the naive ordering."""
    spec = _log_spec(h0, N)
    m = spec.m
    if m < 1:
        raise DomainError("the naive ordering only differs from the Weyl block for h0 >= 2")
    expr = OperatorExpr.word((xpow(m),)) @ OperatorExpr.series(spec.blocks["KBAR"]) @ OperatorExpr.word((Y,) * (m - 1))
    c = Fraction(1, factorial(m - 1) ** 2)
    return expr.apply(FormalSection("f1", h0 - 2), max_degree=N).scale(c)


def _O_unaveraged_x_f1(h0, N):
    spec = _log_spec(h0, N)
    return build_operator(spec, averaged=False) @ OperatorExpr.word((X,)), FormalSection("f1", h0 - 2)


def _O_unaveraged_minus_leftover(h0, N):
    expr, target = _O_unaveraged_x_f1(h0, N)
    return expr, target, leftover_residue(h0, N)


def _tau_shift(h0, N):
    """Difference of the log-type operator under ``log tau -> log tau + x t1``."""
    spec = _log_spec(h0, N)
    op = spec.operator()
    t1 = multiplier("t1", -2)
    shifted = op.substitute(LOGTAU, OperatorExpr.word((LOGTAU,)) + OperatorExpr.word((X, t1)))
    label = "fbar0" if spec.m == 0 else "f0"
    return shifted - op, FormalSection(label, h0)


STANDARD_EXPRESSIONS = {
    "y_K_f0": _y_K_f0,
    "K_x_f1": _K_x_f1,
    "y_second_fbar0": _y_second,
    "y_O_f0": _y_O_f0,
    "O_x_f1": _O_x_f1,
    "O_unaveraged_x_f1": _O_unaveraged_x_f1,
    "O_unaveraged_minus_leftover": _O_unaveraged_minus_leftover,
    "O_tau_shift": _tau_shift,
}
