"""Scalar rational functions used in the exchange relations and Bethe equations."""

from __future__ import annotations

from typing import Callable

from .boundary import ModelParams, fn_c, k_minus, k_plus, lambda_vacuum
from .vertex import PoleError, fn_b

POLE_EPS = 1e-13


def _div(num: complex, den: complex, where: str) -> complex:
    if abs(den) < POLE_EPS:
        raise PoleError(f"pole in {where}")
    return num / den


class ScalarFunctions:
    """Evaluators bound to one parameter set.

    ``k_ex`` is the exchange coefficient k(u, v) and ``m_fn`` the kernel
    m(u, v); the single-letter names are kept elsewhere to match the
    relations they appear in.
    """

    def __init__(self, p: ModelParams):
        self.params = p
        self.q = p.q

    # one-variable
    def b(self, u):
        return fn_b(u, self.q)

    def c(self, u):
        return fn_c(u)

    def phi(self, u):
        q = self.q
        return _div(fn_b(q * q * u * u, q), fn_b(q * u * u, q), "phi: b(q u^2)")

    def k_minus(self, u):
        return k_minus(u, self.params.right)

    def k_plus(self, u):
        return k_plus(u, self.params.left)

    def big_lambda(self, u):
        return lambda_vacuum(u, self.params)

    def psi(self, u):
        return self.phi(u) * self.k_plus(u) * self.k_minus(u) * self.big_lambda(u)

    def cross(self, u):
        """The involution u -> 1/(q u)."""
        return 1 / (self.q * u)

    # two-variable
    def m_fn(self, u, v):
        b, q = self.b, self.q
        return _div(1.0, b(u / v) * b(q * u * v), "m: b(u/v) b(quv)")

    def F(self, u, v):
        q = self.q
        return self.m_fn(u, v) * _div(self.b(q * q * u * u), self.phi(v), "F: phi(v)")

    def f(self, u, v):
        b, q = self.b, self.q
        return _div(b(q * v / u) * b(u * v), b(v / u) * b(q * u * v), "f: b(v/u) b(quv)")

    def g(self, u, v):
        return _div(self.phi(self.cross(v)), self.b(u / v), "g: b(u/v)")

    def w(self, u, v):
        return _div(-1.0, self.b(self.q * u * v), "w: b(quv)")

    def h(self, u, v):
        b, q = self.b, self.q
        return _div(b(q * q * u * v) * b(q * u / v), b(q * u * v) * b(u / v), "h: b(quv) b(u/v)")

    def k_ex(self, u, v):
        return _div(self.phi(u), self.b(v / u), "k: b(v/u)")

    def n(self, u, v):
        return _div(self.phi(u) * self.phi(self.cross(v)), self.b(self.q * u * v), "n: b(quv)")

    def s(self, u, v):
        b, q = self.b, self.q
        return _div(self.phi(self.cross(u)), b(v / u) * b(q * v * v), "s: b(v/u) b(qv^2)")

    def x(self, u, v):
        b, q = self.b, self.q
        return _div(self.phi(self.cross(u)) * b(q * u / v), b(u / v) * b(q * u * v), "x: b(u/v) b(quv)")

    def y(self, u, v):
        b, q = self.b, self.q
        return _div(-1.0, b(q * v * v) * b(q * u * v), "y: b(qv^2) b(quv)")

    def r(self, u, v):
        return _div(self.phi(self.cross(u)), self.b(v / u), "r: b(v/u)")

    def p_fn(self, u, v):
        b, q = self.b, self.q
        return _div(b(u * v), b(u / v) * b(q * u * v), "p: b(u/v) b(quv)")

    # products over sets
    def prod(self, name: str, u, vs) -> complex:
        fn = self.lookup(name)
        out = 1.0 + 0j
        for v in vs:
            out *= fn(u, v)
        return out

    _ALIASES = {"k": "k_ex", "m": "m_fn", "p": "p_fn", "lambda": "big_lambda"}

    def lookup(self, name: str) -> Callable:
        attr = self._ALIASES.get(name, name)
        fn = getattr(self, attr, None)
        if fn is None or name.startswith("_") or not callable(fn):
            raise KeyError(f"unknown function {name!r}")
        return fn


FUNCTION_NAMES = (
    "b", "c", "phi", "k_minus", "k_plus", "f", "g", "w", "h", "k_ex",
    "n", "F", "m_fn", "s", "x", "y", "r", "p_fn",
)


def eval_fn(name: str, args, p: ModelParams) -> complex:
    """Evaluate a named scalar function, e.g. ``eval_fn("f", (u, v), p)``."""
    return complex(ScalarFunctions(p).lookup(name)(*args))


def id_uwt_residuals(u, v, p: ModelParams) -> dict[str, float]:
    """Residuals of the two scalar identities for k = k+ and k = k-."""
    fx = ScalarFunctions(p)
    out = {}
    for label, kfn in (("plus", fx.k_plus), ("minus", fx.k_minus)):
        w = fx.cross(u)
        lhs1 = fx.g(u, v) * fx.phi(u) * kfn(u) + fx.n(u, v) * kfn(w)
        rhs1 = fx.F(u, v) * fx.phi(fx.cross(v)) * fx.phi(v) * kfn(v)
        lhs2 = fx.k_ex(u, v) * kfn(w) + fx.w(u, v) * fx.phi(u) * kfn(u)
        rhs2 = -fx.F(u, v) * fx.phi(v) * kfn(fx.cross(v))
        out[f"uwt1_{label}"] = _rel(lhs1, rhs1)
        out[f"uwt2_{label}"] = _rel(lhs2, rhs2)
    return out


def crossing_residuals(u, v, p: ModelParams) -> dict[str, float]:
    """f, h, m invariance under v -> 1/(qv), and f(1/(qu), v) = h(u, v)."""
    fx = ScalarFunctions(p)
    vb = fx.cross(v)
    return {
        "f_cross": _rel(fx.f(u, vb), fx.f(u, v)),
        "h_cross": _rel(fx.h(u, vb), fx.h(u, v)),
        "m_cross": _rel(fx.m_fn(u, vb), fx.m_fn(u, v)),
        "f_to_h": _rel(fx.f(fx.cross(u), v), fx.h(u, v)),
    }


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0
