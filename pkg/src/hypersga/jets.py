"""Truncated multivariate Taylor arithmetic (jets) up to second order.

A :class:`Jet` carries a value, its gradient with respect to ``n`` seed
variables and, optionally, the Hessian.  Arithmetic propagates all three
exactly, so derivatives of composed expressions carry no truncation error.
Plain Python/NumPy scalars are accepted everywhere a jet is, which lets the
same observable code run on floats or on jets.
"""

from __future__ import annotations

import cmath
import math
from numbers import Number

import numpy as np


class Jet:
    """Value with exact first (and optionally second) derivatives."""

    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 1000

    def __init__(self, val, grad, hess=None):
        self.val = val
        self.grad = grad
        self.hess = hess

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r}, order={self.order}, nvars={self.nvars})"

    # -- binary arithmetic -------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            hess = None
            if self.hess is not None and other.hess is not None:
                hess = self.hess + other.hess
            return Jet(self.val + other.val, self.grad + other.grad, hess)
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            grad = a.val * b.grad + b.val * a.grad
            hess = None
            if a.hess is not None and b.hess is not None:
                cross = np.outer(a.grad, b.grad)
                hess = a.val * b.hess + b.val * a.hess + cross + cross.T
            return Jet(a.val * b.val, grad, hess)
        return Jet(
            self.val * other,
            self.grad * other,
            None if self.hess is None else self.hess * other,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        if isinstance(exponent, int) and exponent >= 0:
            out = 1.0
            base = self
            e = exponent
            while e:
                if e & 1:
                    out = base * out
                base = base * base
                e >>= 1
            return out
        v = self.val
        p = _pow_scalar(v, exponent)
        d1 = exponent * _pow_scalar(v, exponent - 1)
        d2 = exponent * (exponent - 1) * _pow_scalar(v, exponent - 2)
        return self._chain(p, d1, d2)

    def _reciprocal(self):
        v = self.val
        if v == 0:
            raise ZeroDivisionError("jet reciprocal of zero value")
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def _chain(self, f0, f1, f2):
        grad = f1 * self.grad
        hess = None
        if self.hess is not None:
            hess = f1 * self.hess + f2 * np.outer(self.grad, self.grad)
        return Jet(f0, grad, hess)

    # comparisons act on the value only (used for branch decisions)
    def __lt__(self, other):
        return self.val < _value(other)

    def __gt__(self, other):
        return self.val > _value(other)

    def __le__(self, other):
        return self.val <= _value(other)

    def __ge__(self, other):
        return self.val >= _value(other)


def _value(x):
    return x.val if isinstance(x, Jet) else x


def _pow_scalar(v, e):
    if isinstance(v, complex) or isinstance(e, complex) or v < 0:
        return complex(v) ** e
    return v**e


def value(x):
    """Value part of a jet, or ``x`` itself for plain numbers."""
    return _value(x)


def seed(point, order: int = 1, dtype=float) -> list[Jet]:
    """Independent-variable jets at ``point`` (identity gradient)."""
    point = np.asarray(point)
    n = point.shape[0]
    eye = np.eye(n, dtype=dtype)
    out = []
    for i in range(n):
        hess = np.zeros((n, n), dtype=dtype) if order >= 2 else None
        out.append(Jet(point[i].item(), eye[i].copy(), hess))
    return out


def lift_constant(c, nvars: int, order: int = 1, dtype=float) -> Jet:
    hess = np.zeros((nvars, nvars), dtype=dtype) if order >= 2 else None
    return Jet(c, np.zeros(nvars, dtype=dtype), hess)


def sqrt(x):
    if isinstance(x, Jet):
        v = x.val
        if isinstance(v, complex):
            r = cmath.sqrt(v)
        else:
            if v <= 0:
                raise ValueError(f"sqrt of non-positive jet value {v}")
            r = math.sqrt(v)
        return x._chain(r, 0.5 / r, -0.25 / (r * v))
    if isinstance(x, complex):
        return cmath.sqrt(x)
    return math.sqrt(x)


def exp(x):
    if isinstance(x, Jet):
        e = cmath.exp(x.val) if isinstance(x.val, complex) else math.exp(x.val)
        return x._chain(e, e, e)
    return cmath.exp(x) if isinstance(x, complex) else math.exp(x)


def log(x):
    """Principal logarithm; real inputs must be positive."""
    if isinstance(x, Jet):
        v = x.val
        lv = cmath.log(v) if isinstance(v, complex) else math.log(v)
        return x._chain(lv, 1.0 / v, -1.0 / v**2)
    return cmath.log(x) if isinstance(x, complex) else math.log(x)


def is_number(x) -> bool:
    return isinstance(x, Number)
