"""Verification suites: each returns a :class:`Report` of exact checks."""

from __future__ import annotations

import random
from fractions import Fraction

from . import algebra as alg
from .exact import H0
from .model import (
    DensityField,
    gjms_constant,
    interior_scale_form,
    normal_form_certificate,
    obstruction,
    q_holographic,
    random_field,
    realize_form,
    sl2_realization_check,
    solve_first_kind,
    solve_log_density,
    solve_log_kind,
    solve_second_kind,
    y_apply,
)
from .parsing import parse_field_expr
from .report import Report, Timer
from .series import (
    f_polynomial,
    g_series,
    h_series,
    h_series_closed_form,
    k_series,
    ode_residual,
)

SUITES = ("sl2", "series", "logops", "model")


def _text(x):
    return x.to_text() if hasattr(x, "to_text") else str(x)


def suite_sl2(order: int = 12) -> Report:
    rep = Report()
    f0 = alg.FormalSection("f0", None)
    rep.add("reduce y x", "(-h0)*f0 + 1*x y f0", alg.reduce([alg.Y, alg.X], f0).to_text(), "TRIVIAL")
    rep.add("reduce y x x", "(-2*h0 - 2)*x f0 + 1*x^2 y f0", alg.reduce([alg.Y, alg.X, alg.X], f0).to_text(), "DERIVED")
    fb = alg.FormalSection("fbar0", 2 - H0)
    rep.add("reduce y logx", "(h0 - 1)*x^-1 fbar0 + 1*logx y fbar0", alg.reduce([alg.Y, alg.LOGX], fb).to_text(), "REFERENCE")
    rep.add("[x,y]", "(h0)*f0", alg.commutator([alg.X], [alg.Y], f0).to_text(), "REFERENCE")
    rep.add("[h,logx]", "2*f0", alg.commutator([alg.H], [alg.LOGX], f0).to_text(), "REFERENCE")
    rep.add("[x,logtau]", "0", alg.commutator([alg.X], [alg.LOGTAU], f0).to_text(), "TRIVIAL")
    engine = alg.Engine()
    for k in range(1, order + 1):
        got = alg.commutator([alg.xpow(k)], [alg.Y], f0, engine=engine)
        want = alg.reduce([alg.xpow(k - 1)], f0).scale(H0 * k + k * (k - 1))
        rep.add(f"[x^{k},y]", want.to_text(), got.to_text(), "REFERENCE")
        got = alg.commutator([alg.X], [alg.Y] * k, f0, engine=engine)
        want = alg.reduce([alg.Y] * (k - 1), f0).scale(H0 * k - k * (k - 1))
        rep.add(f"[x,y^{k}]", want.to_text(), got.to_text(), "REFERENCE")
    rng = random.Random(7)
    gens = [alg.X, alg.Y, alg.H]
    for i in range(10):
        w = alg.FormalSection("f", Fraction(rng.randint(-9, 9), rng.randint(1, 3)))
        a, b, c = (rng.choice(gens) for _ in range(3))
        A, B, C = (alg.OperatorExpr.word((g,)) for g in (a, b, c))

        def br(P, Q):
            return P @ Q - Q @ P

        jac = br(A, br(B, C)) + br(B, br(C, A)) + br(C, br(A, B))
        rep.add(f"jacobi {i} {a.text()}{b.text()}{c.text()}", "0", jac.apply(w, engine).to_text(), "PROPERTY")
    for i in range(10):
        word = [rng.choice([alg.X, alg.Y, alg.H, alg.LOGX, alg.LOGTAU]) for _ in range(rng.randint(2, 7))]
        cut = rng.randint(0, len(word))
        whole = alg.reduce(word, f0)
        split = alg.OperatorExpr.word(word[:cut]).apply(alg.reduce(word[cut:], f0, engine=alg.Engine()), alg.Engine())
        rep.add(f"confluence {i}", whole.to_text(), split.to_text(), "PROPERTY")
    con = alg.Engine(contraction=True)
    rep.add("contraction [x,y]", "0", alg.commutator([alg.X], [alg.Y], f0, engine=con).to_text(), "REFERENCE")
    rep.add("contraction [h,x]", "2*x f0", alg.commutator([alg.H], [alg.X], f0, engine=con).to_text(), "REFERENCE")
    rep.add("contraction [h,y]", "-2*y f0", alg.commutator([alg.H], [alg.Y], f0, engine=con).to_text(), "REFERENCE")
    for m in range(1, 6):
        f1 = alg.FormalSection("f1", m - 1)
        rule = alg.reduce([alg.weyl(m), alg.X], f1, engine=alg.Engine())
        expanded = alg.OperatorExpr.word((alg.weyl(m), alg.X)).expand_weyl().apply(f1, alg.Engine())
        rep.add(f"weyl rule agrees with expansion m={m}", expanded.to_text(), rule.to_text(), "DERIVED")
    return rep


def suite_series(order: int = 20, samples: int = 50) -> Report:
    rep = Report()
    k = k_series(None, 2)
    rep.add("K generic N=2", "[1, (1)/(h0 - 2), (1)/(2*h0^2 - 10*h0 + 12)]", "[" + ", ".join(c.to_text() for c in k) + "]", "REFERENCE")
    rep.add("K h0=5 N=2", "[1, 1/3, 1/12]", "[" + ", ".join(c.to_text() for c in k_series(5, 2)) + "]", "DERIVED")
    rep.add("G generic N=1", "[1, (-1)/(h0)]", "[" + ", ".join(c.to_text() for c in g_series(None, 1)) + "]", "DERIVED")
    rep.add("G h0=1 N=2", "[1, -1, 1/4]", "[" + ", ".join(c.to_text() for c in g_series(1, 2)) + "]", "DERIVED")
    for h, want in ((2, "[1]"), (3, "[1, 1]"), (4, "[1, 1/2, 1/4]")):
        rep.add(f"F h0={h}", want, "[" + ", ".join(c.to_text() for c in f_polynomial(h)) + "]", "DERIVED")
    H = h_series(None, 3)
    printed = [
        (H0 + 1) / (H0 * H0),
        -(H0 + 2) * (H0 * 3 + 1) / ((H0 * H0 * 4) * (H0 + 1) ** 2),
        (H0 + 3) * (H0 * H0 * 11 + H0 * 18 + 4) / (H0 * H0 * 36 * (H0 + 1) ** 2 * (H0 + 2) ** 2),
        -(H0 + 4) * (H0 ** 3 * 25 + H0 * H0 * 98 + H0 * 99 + 18) / (H0 * H0 * 288 * (H0 + 1) ** 2 * (H0 + 2) ** 2 * (H0 + 3) ** 2),
    ]
    for i, want in enumerate(printed):
        rep.add(f"gamma_{i} generic", want.to_text(), H[i].to_text(), "REFERENCE")
    for h in range(1, 11):
        s = h_series(h, order)
        bad = [j for j in range(order + 1) if s[j] != h_series_closed_form(h, j)]
        rep.add(f"H closed form h0={h}", "[]", str(bad), "REFERENCE")
    for kind, s in (("FIRST", k_series(None, order)), ("SECOND", g_series(None, order)), ("INHOM", h_series(None, order))):
        rep.add(f"ODE {kind} generic", "True", str(ode_residual(s, kind).is_zero()), "REFERENCE")
    rng = random.Random(11)
    fails = []
    for _ in range(samples):
        q = Fraction(rng.randint(-40, 40), rng.randint(2, 7))
        if q.denominator == 1:
            continue
        for kind, s in (("FIRST", k_series(q, order)), ("SECOND", g_series(q, order)), ("INHOM", h_series(q, order))):
            if not ode_residual(s, kind).is_zero():
                fails.append((kind, str(q)))
    rep.add("ODE random weights", "[]", str(fails), "PROPERTY")
    dual = [c.substitute(2 - H0) for c in k_series(None, order)]
    rep.add("K(2-h0) = G", "True", str(dual == list(g_series(None, order).coeffs)), "REFERENCE")
    for h in range(2, 9):
        full = k_series(None, h - 2).substitute(h)
        rep.add(f"F is the partial sum of K h0={h}", "True", str(list(full.coeffs) == list(f_polynomial(h).coeffs)), "REFERENCE")
    return rep


def suite_logops(order: int = 12, weights=range(2, 9)) -> Report:
    rep = Report()
    ex = alg.STANDARD_EXPRESSIONS

    def check(name, key, ws, order, provenance, want=True):
        r = alg.verify_zero(ex[key], order, ws, name=name)
        for res in r.results:
            witness = None if res.zero else {"weight": res.weight, "order": order, "first": res.first_offending}
            rep.add(
                f"{name} h0={res.weight}",
                "zero" if want else "nonzero",
                "zero" if res.zero else f"nonzero ({res.first_offending})",
                provenance,
                passed=(res.zero == want and res.error is None),
                witness=witness,
            )

    check("y K f0", "y_K_f0", [None], order, "REFERENCE")
    check("K x f1", "K_x_f1", [None], order, "REFERENCE")
    check("y x^(h0-1) G fbar0", "y_second_fbar0", [None], order, "REFERENCE")
    check("y O f0", "y_O_f0", list(weights) + [1], order, "REFERENCE")
    check("O x f1", "O_x_f1", list(weights) + [1], order, "REFERENCE")
    check("naive ordering O x f1", "O_unaveraged_x_f1", list(weights), order, "DERIVED", want=False)
    check("naive ordering residue", "O_unaveraged_minus_leftover", list(weights), order, "DERIVED")
    check("log tau shift", "O_tau_shift", list(weights) + [1], order, "REFERENCE")
    return rep


def _field(text, n, w=0):
    return parse_field_expr(text, n, Fraction(w))


def suite_model(samples: int = 20) -> Report:
    rep = Report()
    for d in (3, 4, 5, 6):
        r = sl2_realization_check(d, samples, seed=d)
        rep.add(f"sl2 realization d={d}", "True", str(r.passed), "REFERENCE", witness=(r.failures[0] if r.failures else None))
    lor = sl2_realization_check(4, 5, seed=1, signature=(1, 1, -1))
    rep.add("sl2 realization lorentzian", "True", str(lor.passed), "REFERENCE")
    for k, d in ((2, 4), (4, 6), (1, 4), (3, 4), (5, 6)):
        g = gjms_constant(k, d, trials=3)
        rep.add(f"gjms k={k} d={d}", "True", str(g.passed), "REFERENCE", witness=g.to_json())
    om = _field("x1^2 + 3*x1*x2 + x2^2", 2)
    rep.add("Q flat scale", "0", q_holographic(DensityField.zero(2)).to_text(), "TRIVIAL")
    rep.add("Q n=2 quadratic", "4", q_holographic(om).to_text(), "DERIVED")
    rng = random.Random(5)
    for n in (2, 4):
        c = gjms_constant(n, n + 1, trials=0).constant
        ok = True
        for _ in range(5):
            w = random_field(rng, n, 0, degree=n + 2, r_degree=0)
            lap = w.restrict()
            for _ in range(n // 2):
                lap = lap.laplacian()
            dbl = 1
            for i in range(n - 1, 0, -2):
                dbl *= i
            if q_holographic(w) != lap.scale(c / dbl ** 2).with_weight(-n):
                ok = False
        rep.add(f"Q transformation law n={n}", "True", str(ok), "REFERENCE")
    f = solve_first_kind(_field("x1^2", 3, Fraction(-1, 4)), 4, 6)
    rep.add("first kind exact", "x1^2 + 2*r^2 / inf", f"{f.assembled().to_text()} / {f.residual_order() or 'inf'}", "DERIVED")
    f = solve_first_kind(_field("x1^2", 3, Fraction(-1, 4)), 4, 1)
    rep.add("first kind N=1 residual", "-2/3*r", f.residual().to_text(), "DERIVED")
    s = solve_second_kind(_field("1", 3, Fraction(-11, 4)), 4, Fraction(-1, 4), 6)
    rep.add("second kind exact", "r^(5/2) / inf", f"{s.assembled().to_text()} / {s.residual_order() or 'inf'}", "DERIVED")
    rep.add("obstruction h0=3", "2", obstruction(_field("x1^2", 3, Fraction(-1, 2)), 4).to_text(), "DERIVED")
    rep.add("obstruction h0=2", "0", obstruction(_field("x1^2", 3, -1), 4).to_text(), "DERIVED")
    lk = solve_log_kind(_field("x1^2", 3, 0), 4, 8)
    rep.add("log kind even h0 has no log", "False", str(lk.has_log_terms()), "REFERENCE")
    lk = solve_log_kind(_field("x1^2", 3, Fraction(-1, 2)), 4, 8)
    rep.add("log kind h0=3 log coefficient", "-1", lk.log_coefficient().to_text(), "DERIVED")
    ld = solve_log_density(-om, 3, 6)
    q = q_holographic(om)
    rep.add("log density n=2 coefficient", q.scale(Fraction(1, 2)).to_text(), ld.log_coefficient().to_text(), "REFERENCE")
    ld3 = solve_log_density(-_field("x1^4 + x2^3*x1 - x3^2", 3), 4, 6)
    rep.add("log density n=3 smooth", "False", str(ld3.has_log_terms()), "REFERENCE")
    cert = normal_form_certificate(4, Fraction(-1, 4))
    rep.add("normal form certificate", "3/2 3/2 True", f"{cert['d+2w-2']} {cert['2s-n-1']} {cert['agree']}", "DERIVED")
    ex = solve_first_kind(_field("x1^2", 3, Fraction(-1, 4)), 4, 6)
    isf = interior_scale_form(ex, Fraction(11, 4))
    rep.add("interior form first kind", "x1^2 + 2*r^2 | 0", f"{isf.F.to_text()} | {isf.G.to_text()}", "DERIVED")
    isf = interior_scale_form(s, Fraction(11, 4))
    rep.add("interior form second kind", "0 | 1", f"{isf.F.to_text()} | {isf.G.to_text()}", "DERIVED")
    # abstract engine against the model on random words
    for i in range(samples // 2):
        d = rng.choice((3, 4, 5))
        w = Fraction(rng.randint(-6, 6), rng.randint(1, 2))
        f = random_field(rng, d - 1, w)
        word = [rng.choice([alg.X, alg.Y]) for _ in range(rng.randint(1, 6))]
        form = alg.reduce(word, alg.FormalSection("f", d + 2 * w))
        got = realize_form(form, {"f": f}, d)
        direct = f
        for g in reversed(word):
            direct = direct.mul_r(1) if g is alg.X else y_apply(direct, d)
        rep.add(f"model vs engine {i}", direct.to_text(), got.to_text(), "PROPERTY")
    return rep


def run_suite(name: str = "all") -> Report:
    if name == "all":
        names = SUITES
    elif name in SUITES:
        names = (name,)
    else:
        raise ValueError(f"unknown suite {name!r}")
    rep = Report()
    with Timer() as t:
        for n in names:
            part = globals()[f"suite_{n}"]()
            for c in part.cases:
                c.name = f"{n}: {c.name}"
            rep.extend(part)
    rep.elapsed = t.elapsed
    return rep
