"""Independent classical Bernstein/Bezier helpers used as test oracles.

Everything here is written from the textbook binomial formulas, deliberately
sharing no code with the package under test.
"""

import math

import numpy as np


def bernstein_value(degree, i, a, b, x):
    """Classical Bernstein polynomial value on [a, b]."""
    u = (np.asarray(x, dtype=float) - a) / (b - a)
    return math.comb(degree, i) * u ** i * (1 - u) ** (degree - i)


def bernstein_derivative(degree, i, a, b, x, order):
    """Derivative via the difference recursion on lower-degree polynomials."""
    if order == 0:
        return bernstein_value(degree, i, a, b, x)
    scale = degree / (b - a)
    lower = 0.0
    if i - 1 >= 0:
        lower = bernstein_derivative(degree - 1, i - 1, a, b, x, order - 1)
    upper = 0.0
    if i <= degree - 1:
        upper = bernstein_derivative(degree - 1, i, a, b, x, order - 1)
    return scale * (lower - upper)


def bezier_to_poly(coeffs, a, b):
    """Univariate Bezier coefficients -> numpy Polynomial on [a, b]."""
    from numpy.polynomial import Polynomial

    degree = len(coeffs) - 1
    total = Polynomial([0.0])
    u = Polynomial([-a / (b - a), 1.0 / (b - a)])
    for i, c in enumerate(coeffs):
        total += c * math.comb(degree, i) * u ** i * (1 - u) ** (degree - i)
    return total


def bnet_to_poly2d(net, rect):
    """Tensor Bezier net -> bivariate coefficient array (power basis).

    Returns C with p(x, y) = sum C[i, j] x^i y^j.
    """
    x0, x1, y0, y1 = rect
    n1, n2 = net.shape
    out = np.zeros((n1, n2))
    for i in range(n1):
        px = bezier_to_poly(np.eye(n1)[i], x0, x1).coef
        for j in range(n2):
            py = bezier_to_poly(np.eye(n2)[j], y0, y1).coef
            out[: len(px), : len(py)] += net[i, j] * np.outer(px, py)
    return out


def poly2d_eval(coef, x, y, dx=0, dy=0):
    """Evaluate a mixed derivative of a power-basis bivariate polynomial."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float),
                               np.asarray(y, dtype=float))
    c = coef.copy()
    for _ in range(dx):
        c = c[1:, :] * np.arange(1, c.shape[0])[:, None]
        if c.shape[0] == 0:
            return np.zeros_like(x)
    for _ in range(dy):
        c = c[:, 1:] * np.arange(1, c.shape[1])[None, :]
        if c.shape[1] == 0:
            return np.zeros_like(x)
    return np.polynomial.polynomial.polyval2d(x, y, c)


def poly_bnet(coef, rect, n1, n2):
    """Power-basis bivariate polynomial -> tensor Bezier net by collocation."""
    x0, x1, y0, y1 = rect
    xs = np.linspace(x0, x1, n1)
    ys = np.linspace(y0, y1, n2)
    ms = np.array([[bernstein_value(n1 - 1, i, x0, x1, x) for i in range(n1)]
                   for x in xs])
    mt = np.array([[bernstein_value(n2 - 1, j, y0, y1, y) for j in range(n2)]
                   for y in ys])
    vals = poly2d_eval(coef, xs[:, None], ys[None, :])
    return np.linalg.solve(ms, np.linalg.solve(mt, vals.T).T)


def random_poly2d(rng, deg_x, deg_y):
    return rng.uniform(-1, 1, (deg_x + 1, deg_y + 1))
