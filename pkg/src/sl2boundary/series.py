"""Formal power series blocks of the solution operators.

Every series here lives in ``Q(h0)[[z]]`` truncated at an explicit order.
``K`` solves the Bessel-type recursion for first-kind solutions, ``G`` is
its counterpart at the dual weight ``2 - h0``, ``F`` is the polynomial
partial sum used below an exceptional weight and ``H`` is the particular
solution of the inhomogeneous equation that appears with log terms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence, Union

from .errors import DomainError, MalformedInputError, PoleError
from .exact import H0, RationalFunction, as_ratfunc, pochhammer

__all__ = [
    "FormalSeries",
    "resolve_weight",
    "k_series",
    "g_series",
    "f_polynomial",
    "h_series",
    "h_series_closed_form",
    "ode_residual",
    "SolutionOperatorSpec",
    "assemble_log_operator",
    "series_table",
]

Weight = Union[None, str, int, Fraction, RationalFunction]


def resolve_weight(h0: Weight) -> RationalFunction:
    """Map ``None``/``"generic"`` to the symbol ``h0``, numbers to constants."""
    if h0 is None or (isinstance(h0, str) and h0.strip() == "generic"):
        return H0
    if isinstance(h0, str):
        try:
            h0 = Fraction(h0.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"bad weight {h0!r}") from exc
    return as_ratfunc(h0 if isinstance(h0, RationalFunction) else Fraction(h0))


def _is_generic(h0: RationalFunction) -> bool:
    return not h0.is_constant()


class FormalSeries:
    """Truncated power series ``c_0 + c_1 z + ... + c_N z^N``.

    The truncation order is part of the value: binary operations between
    series of different order raise rather than silently truncate.
    """

    __slots__ = ("coeffs", "order", "h0", "name")

    def __init__(self, coeffs: Sequence, order: Optional[int] = None, *, h0=None, name=""):
        cs = [as_ratfunc(c) if not isinstance(c, RationalFunction) else c for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise MalformedInputError("series order must be nonnegative")
        if len(cs) > order + 1:
            cs = cs[: order + 1]
        cs += [as_ratfunc(0)] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order
        self.h0 = h0
        self.name = name

    @classmethod
    def one(cls, order: int, **kw) -> "FormalSeries":
        return cls([1], order, **kw)

    def __getitem__(self, k: int) -> RationalFunction:
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: "FormalSeries"):
        if not isinstance(other, FormalSeries):
            raise TypeError("expected FormalSeries")
        if other.order != self.order:
            raise MalformedInputError(
                f"series order mismatch: {self.order} vs {other.order}"
            )

    def __add__(self, other):
        self._check(other)
        return FormalSeries([a + b for a, b in zip(self, other)], self.order, h0=self.h0)

    def __sub__(self, other):
        self._check(other)
        return FormalSeries([a - b for a, b in zip(self, other)], self.order, h0=self.h0)

    def __neg__(self):
        return FormalSeries([-a for a in self], self.order, h0=self.h0)

    def scale(self, c) -> "FormalSeries":
        c = as_ratfunc(c)
        return FormalSeries([a * c for a in self], self.order, h0=self.h0)

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        self._check(other)
        out = [as_ratfunc(0)] * (self.order + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.order + 1 - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] = out[i + j] + a * b
        return FormalSeries(out, self.order, h0=self.h0)

    __rmul__ = scale

    def euler(self) -> "FormalSeries":
        """``E = z d/dz``."""
        return FormalSeries([c * k for k, c in enumerate(self)], self.order, h0=self.h0)

    def derivative(self) -> "FormalSeries":
        """``d/dz``; the result is known through order ``N - 1``."""
        if self.order == 0:
            return FormalSeries([0], 0, h0=self.h0)
        return FormalSeries(
            [c * k for k, c in enumerate(self) if k], self.order - 1, h0=self.h0
        )

    def shift(self, j: int = 1) -> "FormalSeries":
        """Multiply by ``z^j``; exact, so the order grows by ``j``."""
        return FormalSeries([0] * j + list(self.coeffs), self.order + j, h0=self.h0)

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.order:
            raise MalformedInputError(f"cannot extend series of order {self.order} to {order}")
        return FormalSeries(self.coeffs[: order + 1], order, h0=self.h0, name=self.name)

    def substitute(self, h0) -> "FormalSeries":
        """Specialize (or re-parametrize) the coefficients at ``h0``."""
        value = resolve_weight(h0)
        out = []
        for k, c in enumerate(self):
            try:
                out.append(c.substitute(value) if not c.is_constant() else c)
            except ZeroDivisionError as exc:
                raise PoleError(value.constant_value() if value.is_constant() else value, k) from exc
        return FormalSeries(out, self.order, h0=value, name=self.name)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        body = ", ".join(c.to_text() for c in self.coeffs)
        return f"FormalSeries([{body}], order={self.order})"


def _check_order(N: int):
    if not isinstance(N, int) or N < 0:
        raise MalformedInputError(f"truncation order must be a nonnegative integer, got {N!r}")


def _pole(h0: RationalFunction, k: int, factor: RationalFunction):
    if factor.is_zero():
        raise PoleError(h0.constant_value() if h0.is_constant() else h0, k)


def k_series(h0: Weight = None, N: int = 10) -> FormalSeries:
    """First-kind series from ``k (k - h0 + 1) a_k + a_{k-1} = 0``, ``a_0 = 1``."""
    _check_order(N)
    w = resolve_weight(h0)
    coeffs = [as_ratfunc(1)]
    for k in range(1, N + 1):
        factor = (w * -1 + (k + 1)) * k
        _pole(w, k, factor)
        coeffs.append(-coeffs[-1] / factor)
    return FormalSeries(coeffs, N, h0=w, name="K")


def g_series(h0: Weight = None, N: int = 10) -> FormalSeries:
    """Second-kind series from ``k (k + h0 - 1) b_k + b_{k-1} = 0``, ``b_0 = 1``."""
    _check_order(N)
    w = resolve_weight(h0)
    coeffs = [as_ratfunc(1)]
    for k in range(1, N + 1):
        factor = (w + (k - 1)) * k
        _pole(w, k, factor)
        coeffs.append(-coeffs[-1] / factor)
    return FormalSeries(coeffs, N, h0=w, name="G")


def _integer_weight(h0, minimum: int, what: str) -> int:
    try:
        q = Fraction(h0.constant_value() if isinstance(h0, RationalFunction) else h0)
    except (TypeError, ValueError, MalformedInputError) as exc:
        raise DomainError(f"{what} needs an integer h0 >= {minimum}") from exc
    if q.denominator != 1 or q < minimum:
        raise DomainError(f"{what} needs an integer h0 >= {minimum}, got {q}")
    return int(q)


def f_polynomial(h0) -> FormalSeries:
    """Polynomial partial sum of ``K`` through ``z^(h0-2)`` for integer ``h0 >= 2``."""
    n = _integer_weight(h0, 2, "f_polynomial")
    s = k_series(n, n - 2)
    return FormalSeries(s.coeffs, n - 2, h0=s.h0, name="F")


def h_series(h0: Weight = None, N: int = 10) -> FormalSeries:
    """Coefficients of ``H(z)`` from the gamma recurrence.

    gamma_0 = (h0+1)/h0^2,
    gamma_k = -[gamma_{k-1} + (-1)^(k+1) (h0+2k+1) / ((k+1)! (h0+k)_(k+1))] / ((k+1)(h0+k)).
    """
    _check_order(N)
    w = resolve_weight(h0)
    _pole(w, 0, w)
    coeffs = [(w + 1) / (w * w)]
    for k in range(1, N + 1):
        poch = pochhammer(w + k, k + 1)
        _pole(w, k, poch)
        sign = 1 if (k + 1) % 2 == 0 else -1
        inhom = (w + (2 * k + 1)) * Fraction(sign, factorial(k + 1)) / poch
        coeffs.append(-(coeffs[-1] + inhom) / ((w + k) * (k + 1)))
    return FormalSeries(coeffs, N, h0=w, name="H")


def h_series_closed_form(h0: int, k: int) -> Fraction:
    """Closed form of ``gamma_k`` at integer ``h0 >= 1`` (factorials need integers)."""
    h = _integer_weight(h0, 1, "h_series_closed_form")
    if not isinstance(k, int) or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    s = sum((Fraction(h + 2 * j + 3, (j + 2) * (h + j + 1)) for j in range(k)), Fraction(0))
    num = (-1) ** k * (h * s + h + 1) * factorial(h - 1)
    return num / (h * factorial(h + k) * factorial(k + 1))


def ode_residual(series: FormalSeries, kind: str, h0: Weight = None) -> FormalSeries:
    """Residual of the defining ODE of a series block.

    ``FIRST``: ``(E(E - h0 + 1) + z) K``.  ``SECOND``: ``(E(E + h0 - 1) + z) G``.
    ``INHOM``: ``(E(E + h0 - 1) + z)[z H] + (2E + h0 - 1)[G - 1]`` with ``G``
    built at order ``N + 1``; the result is checked through order ``N``.
    """
    w = resolve_weight(series.h0 if h0 is None else h0)
    kind = kind.upper()
    if kind in ("FIRST", "SECOND"):
        shift = -w + 1 if kind == "FIRST" else w - 1
        e = series.euler()
        lhs = e.euler() + e.scale(shift)
        zk = series.shift(1).truncate(series.order)
        return lhs + zk
    if kind == "INHOM":
        N = series.order
        zh = series.shift(1)  # order N + 1, exact
        e = zh.euler()
        lhs = e.euler() + e.scale(w - 1) + zh.shift(1).truncate(N + 1)
        g = g_series(w, N + 1)
        gm1 = g - FormalSeries.one(N + 1)
        rhs = gm1.euler().scale(2) + gm1.scale(w - 1)
        return (lhs + rhs).truncate(N)
    raise MalformedInputError(f"unknown ODE kind {kind!r}")


@dataclass(frozen=True)
class SolutionOperatorSpec:
    """Structural description of a solution operator at a fixed weight.

    ``blocks`` maps block names to series: ``F`` (polynomial part), ``ZH``
    (the series ``z^{h0} H(z)`` or ``z H(z)`` when ``h0 = 1``), ``KBAR``
    (``K`` at the dual weight).  ``constant`` is ``(h0-1)!(h0-2)!`` and
    ``m = h0 - 1`` is the power of ``x`` and ``y`` flanking the log block.
    """

    kind: str
    h0: RationalFunction
    order: int
    blocks: dict = field(default_factory=dict)
    m: Optional[int] = None
    constant: Optional[Fraction] = None
    log_coefficient_law: str = ""

    def operator(self):
        """The operator as an :class:`~sl2boundary.algebra.OperatorExpr`."""
        from .algebra import build_operator

        return build_operator(self)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "h0": self.h0.to_text(),
            "order": self.order,
            "m": self.m,
            "constant": None if self.constant is None else str(self.constant),
            "blocks": {
                name: [c.to_text() for c in s.coeffs] for name, s in sorted(self.blocks.items())
            },
            "log_coefficient_law": self.log_coefficient_law,
        }


def assemble_log_operator(h0, N: int, *, log_density: bool = False) -> SolutionOperatorSpec:
    """Blocks of the log-type solution operator at integer ``h0 >= 1``.

    For ``h0 >= 2`` the operator is
    ``:F: - :z^h0 H:/C - [x^m log x :Kbar: y^m - x^m :Kbar: (log tau y^m)_W]/C``
    with ``m = h0 - 1`` and ``C = (h0-1)!(h0-2)!``; for ``h0 = 1`` it is
    ``log x :J0: - :J0: log tau + :z H:``.  ``N`` is the order of every
    series block in ``z``.
    """
    h = _integer_weight(h0, 1, "assemble_log_operator")
    _check_order(N)
    w = as_ratfunc(h)
    kbar = g_series(h, N)  # K at the dual weight 2 - h0
    kind = "LOGDENSITY" if log_density else "LOG"
    if h == 1:
        H = h_series(1, max(N - 1, 0))
        zh = H.shift(1).truncate(N) if N >= 1 else FormalSeries([0], 0)
        return SolutionOperatorSpec(
            kind=kind,
            h0=w,
            order=N,
            blocks={"KBAR": kbar, "ZH": zh},
            m=0,
            constant=None,
            log_coefficient_law="initial data is fbar0 itself",
        )
    C = Fraction(factorial(h - 1) * factorial(h - 2))
    F = f_polynomial(h)
    if N >= h:
        H = h_series(h, N - h)
        zh = H.shift(h)
    else:
        zh = FormalSeries([0], N)
    fpad = FormalSeries(F.coeffs, max(F.order, N)).truncate(N) if N >= F.order else F.truncate(N)
    return SolutionOperatorSpec(
        kind=kind,
        h0=w,
        order=N,
        blocks={"F": fpad, "ZH": zh, "KBAR": kbar},
        m=h - 1,
        constant=C,
        log_coefficient_law=f"fbar0 = -y^{h - 1} f0 / {C}",
    )


def series_table(kind: str, h0: Weight, N: int) -> dict:
    """JSON-ready coefficient table for one of ``K``, ``G``, ``F``, ``H``."""
    kind = kind.upper()
    if kind == "K":
        s = k_series(h0, N)
    elif kind == "G":
        s = g_series(h0, N)
    elif kind == "H":
        s = h_series(h0, N)
    elif kind == "F":
        s = f_polynomial(resolve_weight(h0))
    else:
        raise MalformedInputError(f"unknown series kind {kind!r}")
    w = resolve_weight(h0)
    return {
        "series": kind,
        "h0": "generic" if _is_generic(w) else w.to_text(),
        "order": s.order,
        "coefficients": [{"k": k, "value": c.to_text()} for k, c in enumerate(s.coeffs)],
    }


def dumps_table(table: dict) -> str:
    return json.dumps(table, sort_keys=True, separators=(",", ":"))
