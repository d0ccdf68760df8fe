"""Independent Gauss-curvature oracle built from the Riemann tensor with sympy."""


def to_sympy(text, n):
    import sympy

    names = {f"x{i}": sympy.Symbol(f"x{i}") for i in range(1, n + 1)}
    names["r"] = sympy.Symbol("r")
    return sympy.sympify(text.replace("^", "**"), locals=names)


def gauss_curvature(metric, coords):
    """Gauss curvature R/2 of a 2-d metric via Christoffel symbols."""
    import sympy

    g = sympy.Matrix(metric)
    ginv = g.inv()
    dim = len(coords)
    # gamma[k][i][j] = Gamma^k_{ij}
    gamma = [
        [
            [
                sum(
                    ginv[k, l] * (sympy.diff(g[l, i], coords[j]) + sympy.diff(g[l, j], coords[i]) - sympy.diff(g[i, j], coords[l]))
                    for l in range(dim)
                )
                / 2
                for j in range(dim)
            ]
            for i in range(dim)
        ]
        for k in range(dim)
    ]

    def riemann(a, b, c, d):
        # R^a_{bcd}
        out = sympy.diff(gamma[a][d][b], coords[c]) - sympy.diff(gamma[a][c][b], coords[d])
        out += sum(gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b] for e in range(dim))
        return out

    ricci = sympy.Matrix(dim, dim, lambda b, d: sum(riemann(a, b, a, d) for a in range(dim)))
    scalar = sum(ginv[b, d] * ricci[b, d] for b in range(dim) for d in range(dim))
    return sympy.simplify(scalar / 2)


def flat_scale_gauss_curvature(omega):
    """Curvature of exp(-2 omega) delta, rescaled to the flat scale as a weight -2 density."""
    import sympy

    x1, x2 = sympy.symbols("x1 x2")
    conf = sympy.exp(-2 * omega)
    K = gauss_curvature([[conf, 0], [0, conf]], [x1, x2])
    return sympy.simplify(K * conf)
