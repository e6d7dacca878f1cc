"""Registry of test functions with closed-form mixed derivatives.

The local interpolant consumes mixed derivatives of the target function at a
point; convergence experiments need those values exact, so the registry maps
names to closed-form derivative rules instead of parsing expressions or
differencing numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class TestFunction:
    """A named function together with its exact mixed derivatives."""

    name: str
    description: str
    _deriv: Callable

    def deriv(self, i: int, j: int, s, t):
        """D_s^i D_t^j f at (s, t); broadcasts over array inputs."""
        return self._deriv(i, j, np.asarray(s, dtype=float),
                           np.asarray(t, dtype=float))

    def __call__(self, s, t):
        return self.deriv(0, 0, s, t)


def _sin_shift(x, order):
    return np.sin(x + order * np.pi / 2)


def _cosh_d(x, order):
    return np.cosh(x) if order % 2 == 0 else np.sinh(x)


def _sinh_d(x, order):
    return np.sinh(x) if order % 2 == 0 else np.cosh(x)


def _poly_d(x, power, order):
    if order > power:
        return np.zeros_like(x)
    return float(math.perm(power, order)) * x ** (power - order)


_REGISTRY: dict[str, TestFunction] = {}


def _add(name, description, rule):
    _REGISTRY[name] = TestFunction(name, description, rule)


_add("sin2s_plus_t", "sin(2s + t); smooth, outside every catalogued space",
     lambda i, j, s, t: 2.0 ** i * _sin_shift(2 * s + t, i + j))

_add("sin_s_sin_t", "sin(s) sin(t); member of unit-rate trigonometric spaces",
     lambda i, j, s, t: _sin_shift(s, i) * _sin_shift(t, j))

_add("cos_s_sin_t", "cos(s) sin(t); member of unit-rate trigonometric spaces",
     lambda i, j, s, t: _sin_shift(s, i + 1) * _sin_shift(t, j))

_add("cosh_s_sinh_t", "cosh(s) sinh(t); member of unit-rate hyperbolic spaces",
     lambda i, j, s, t: _cosh_d(s, i) * _sinh_d(t, j))

_add("sin_s_cosh_t", "sin(s) cosh(t); member of mixed trig/hyperbolic spaces",
     lambda i, j, s, t: _sin_shift(s, i) * _cosh_d(t, j))

_add("exp_s_plus_2t", "exp(s + 2t)",
     lambda i, j, s, t: 2.0 ** j * np.exp(s + 2 * t))

_add("cubic_cubic", "s^3 t^3",
     lambda i, j, s, t: _poly_d(s, 3, i) * _poly_d(t, 3, j))

_add("gauss_bump", "exp(-s - t^2/2); mildly anisotropic smooth bump",
     lambda i, j, s, t: (-1.0) ** i * np.exp(-s) * _hermite_gauss(t, j))


def _hermite_gauss(t, order):
    # d^k/dt^k exp(-t^2/2) = (-1)^k He_k(t) exp(-t^2/2) with probabilist Hermite He
    he = np.polynomial.hermite_e.hermeval(t, [0.0] * order + [1.0])
    return (-1.0) ** order * he * np.exp(-t * t / 2)


def get_test_function(name: str) -> TestFunction:
    if name not in _REGISTRY:
        known = ", ".join(sorted(_REGISTRY))
        raise ValidationError(f"unknown test function {name!r}; known: {known}")
    return _REGISTRY[name]


def test_function_names() -> list[str]:
    return sorted(_REGISTRY)
