"""Truncated Taylor (jet) arithmetic in the three chart variables (x, y, t).

A `Jet` of order ``n <= 4`` stores the Taylor coefficients ``d^a f / a!`` of a
scalar function at a base point, indexed by multi-indices ``a = (i, j, k)``
with ``i + j + k <= n``.  The public carrier is the full order-4 jet with
C(7,3) = 35 coefficients; lower orders arise internally from formal
differentiation, which drops one order per derivative.

All arithmetic is generic over the coefficient ring: coefficients are floats
in normal use, but may themselves be jets (nested towers), which is how
derived quantities defined through derivative extraction are re-expanded.
"""

from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import DegenerateJet, DomainError

MAX_ORDER = 4
NVARS = 3

# multi-indices sorted by total degree, then lexicographically; the first
# SIZE[n] entries are exactly the indices of degree <= n
MULTI_INDICES = sorted(
    ((i, j, k) for i in range(MAX_ORDER + 1)
     for j in range(MAX_ORDER + 1)
     for k in range(MAX_ORDER + 1)
     if i + j + k <= MAX_ORDER),
    key=lambda a: (sum(a), a),
)
INDEX_OF = {a: p for p, a in enumerate(MULTI_INDICES)}
SIZE = [sum(1 for a in MULTI_INDICES if sum(a) <= n) for n in range(MAX_ORDER + 1)]


def _build_mul_table(n):
    ia, ib, ic = [], [], []
    for pa, a in enumerate(MULTI_INDICES[:SIZE[n]]):
        for pb, b in enumerate(MULTI_INDICES[:SIZE[n]]):
            s = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            if sum(s) <= n:
                ia.append(pa)
                ib.append(pb)
                ic.append(INDEX_OF[s])
    return np.asarray(ia), np.asarray(ib), np.asarray(ic)


_MUL = [_build_mul_table(n) for n in range(MAX_ORDER + 1)]


def _build_deriv_table(axis):
    # target coefficient at a equals (a[axis]+1) * source coefficient at a+e
    src, mult = [], []
    for a in MULTI_INDICES[:SIZE[MAX_ORDER - 1]]:
        up = list(a)
        up[axis] += 1
        src.append(INDEX_OF[tuple(up)])
        mult.append(float(a[axis] + 1))
    return np.asarray(src), np.asarray(mult)


_DERIV = [_build_deriv_table(axis) for axis in range(NVARS)]

_FACT = [math.factorial(i) for i in range(MAX_ORDER + 1)]


def _is_scalar(v):
    return isinstance(v, (numbers.Real, np.floating, np.integer))


class Jet:
    """Order-``n`` truncated Taylor expansion at a base point of R^3."""

    __slots__ = ("c", "n", "base")

    def __init__(self, coeffs, order=MAX_ORDER, base=None):
        if order < 0 or order > MAX_ORDER:
            raise ValueError(f"jet order must be in [0, {MAX_ORDER}], got {order}")
        c = np.asarray(coeffs)
        if c.shape != (SIZE[order],):
            raise ValueError(
                f"order-{order} jet needs exactly {SIZE[order]} coefficients, got {c.shape}")
        self.c = c
        self.n = order
        self.base = base

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, value, order=MAX_ORDER, base=None):
        if isinstance(value, Jet):
            c = np.empty(SIZE[order], dtype=object)
            c[:] = 0.0
            c[0] = value
        else:
            c = np.zeros(SIZE[order])
            c[0] = value
        return cls(c, order, base)

    def new_const(self, value):
        """Constant jet in the same ring/order/base as self."""
        return Jet.const(value, self.n, self.base)

    # -- inspection ---------------------------------------------------------

    def value(self):
        return self.c[0]

    def partial(self, i, j=None, k=None):
        """Mixed partial derivative d_x^i d_y^j d_t^k f at the base point."""
        if j is None:
            i, j, k = i
        if i + j + k > self.n:
            raise ValueError(f"partial {(i, j, k)} exceeds jet order {self.n}")
        return self.c[INDEX_OF[(i, j, k)]] * (_FACT[i] * _FACT[j] * _FACT[k])

    def deriv(self, axis):
        """Formal partial derivative; the result is one order lower."""
        if self.n == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, mult = _DERIV[axis]
        m = SIZE[self.n - 1]
        return Jet(self.c[src[:m]] * mult[:m], self.n - 1, self.base)

    def truncate(self, order):
        if order >= self.n:
            return self
        return Jet(self.c[:SIZE[order]], order, self.base)

    def __repr__(self):
        return f"Jet(order={self.n}, value={self.c[0]!r})"

    # -- ring arithmetic ----------------------------------------------------

    def _join_base(self, other):
        if self.base is None:
            return other.base
        if other.base is not None and other.base != self.base:
            raise ValueError(f"jet base points differ: {self.base} vs {other.base}")
        return self.base

    def __add__(self, other):
        if isinstance(other, Jet):
            n = min(self.n, other.n)
            m = SIZE[n]
            return Jet(self.c[:m] + other.c[:m], n, self._join_base(other))
        if _is_scalar(other):
            c = self.c.copy()
            c[0] = c[0] + other
            return Jet(c, self.n, self.base)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.n, self.base)

    def __sub__(self, other):
        if isinstance(other, Jet):
            n = min(self.n, other.n)
            m = SIZE[n]
            return Jet(self.c[:m] - other.c[:m], n, self._join_base(other))
        if _is_scalar(other):
            c = self.c.copy()
            c[0] = c[0] - other
            return Jet(c, self.n, self.base)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = min(self.n, other.n)
            ia, ib, ic = _MUL[n]
            base = self._join_base(other)
            if self.c.dtype == np.float64 and other.c.dtype == np.float64:
                out = np.bincount(ic, weights=self.c[ia] * other.c[ib],
                                  minlength=SIZE[n])
                return Jet(out, n, base)
            out = np.empty(SIZE[n], dtype=object)
            out[:] = 0.0
            for pa, pb, pc in zip(ia, ib, ic):
                out[pc] = out[pc] + self.c[pa] * other.c[pb]
            return Jet(out, n, base)
        if _is_scalar(other):
            return Jet(self.c * other, self.n, self.base)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse, by the truncated geometric series."""
        v = self.c[0]
        if isinstance(v, Jet):
            inv0 = v.inverse()
        else:
            if v == 0.0:
                raise DegenerateJet("division by a jet with zero constant term")
            inv0 = 1.0 / v
        # 1/b = inv0 * sum_k (1 - b*inv0)^k, and (1 - b*inv0) has no constant term
        x = self.new_const(1.0) - self * inv0
        acc = self.new_const(1.0)
        for _ in range(self.n):
            acc = acc * x + 1.0
        return acc * inv0

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        if _is_scalar(other):
            return Jet(self.c / other, self.n, self.base)
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, exponent):
        return powr(self, exponent)


def seed(point, order=MAX_ORDER):
    """Coordinate jets (x, y, t) at `point`, for evaluating fields as jets."""
    x0, y0, t0 = point
    base = (float(x0), float(y0), float(t0))
    out = []
    for axis, v in enumerate(base):
        c = np.zeros(SIZE[order])
        c[0] = v
        if order >= 1:
            c[INDEX_OF[tuple(1 if a == axis else 0 for a in range(NVARS))]] = 1.0
        out.append(Jet(c, order, base))
    return tuple(out)


def constant(value, order=MAX_ORDER, base=None):
    return Jet.const(value, order, base)


# -- elementary functions, generic over float / Jet -------------------------


def deep_value(v):
    while isinstance(v, Jet):
        v = v.value()
    return float(v)


def _compose(a, coeffs):
    """Evaluate sum_k coeffs[k] * (a - a0)^k, truncated to a's order."""
    atilde = a - a.new_const(a.value())
    acc = a.new_const(coeffs[a.n])
    for k in range(a.n - 1, -1, -1):
        acc = acc * atilde + a.new_const(coeffs[k])
    return acc


def exp(v):
    if not isinstance(v, Jet):
        return math.exp(v)
    e0 = exp(v.value()) if isinstance(v.value(), Jet) else math.exp(v.value())
    coeffs = [e0 * (1.0 / _FACT[k]) for k in range(v.n + 1)]
    return _compose(v, coeffs)


def log(v):
    if not isinstance(v, Jet):
        if v <= 0.0:
            raise DomainError(f"log of non-positive value {v}", value=v)
        return math.log(v)
    a0 = v.value()
    if deep_value(a0) <= 0.0:
        raise DomainError(f"log of non-positive value {deep_value(a0)}",
                          value=deep_value(a0))
    if isinstance(a0, Jet):
        l0, r0 = log(a0), a0.inverse()
    else:
        l0, r0 = math.log(a0), 1.0 / a0
    coeffs = [l0]
    p = 1.0
    for k in range(1, v.n + 1):
        p = p * r0
        coeffs.append(p * ((-1.0) ** (k - 1) / k))
    return _compose(v, coeffs)


def sin(v):
    if not isinstance(v, Jet):
        return math.sin(v)
    a0 = v.value()
    s0 = sin(a0) if isinstance(a0, Jet) else math.sin(a0)
    c0 = cos(a0) if isinstance(a0, Jet) else math.cos(a0)
    cycle = [s0, c0, -s0, -c0]
    coeffs = [cycle[k % 4] * (1.0 / _FACT[k]) for k in range(v.n + 1)]
    return _compose(v, coeffs)


def cos(v):
    if not isinstance(v, Jet):
        return math.cos(v)
    a0 = v.value()
    s0 = sin(a0) if isinstance(a0, Jet) else math.sin(a0)
    c0 = cos(a0) if isinstance(a0, Jet) else math.cos(a0)
    cycle = [c0, -s0, -c0, s0]
    coeffs = [cycle[k % 4] * (1.0 / _FACT[k]) for k in range(v.n + 1)]
    return _compose(v, coeffs)


def sqrt(v):
    if not isinstance(v, Jet):
        if v <= 0.0:
            raise DomainError(f"sqrt of non-positive value {v}", value=v)
        return math.sqrt(v)
    a0 = v.value()
    if deep_value(a0) <= 0.0:
        raise DomainError(f"sqrt of non-positive value {deep_value(a0)}",
                          value=deep_value(a0))
    if isinstance(a0, Jet):
        s0, r0 = sqrt(a0), a0.inverse()
    else:
        s0, r0 = math.sqrt(a0), 1.0 / a0
    coeffs = [s0]
    for k in range(1, v.n + 1):
        coeffs.append(coeffs[-1] * ((1.5 - k) / k) * r0)
    return _compose(v, coeffs)


def absval(v):
    if not isinstance(v, Jet):
        return abs(v)
    s = deep_value(v.value())
    if s == 0.0:
        raise DomainError("abs is not differentiable at zero", value=0.0)
    return v if s > 0.0 else -v


def powr(v, r):
    """v ** r for constant real r; integer exponents work for any base value."""
    if not isinstance(v, Jet):
        return float(v) ** r
    if isinstance(r, Jet):
        raise TypeError("exponent must be a constant")
    if float(r).is_integer():
        m = int(r)
        if m == 0:
            return v.new_const(1.0)
        b = v if m > 0 else v.inverse()
        m = abs(m)
        acc = None
        while m:
            if m & 1:
                acc = b if acc is None else acc * b
            b = b * b
            m >>= 1
        return acc
    # non-integer exponent: requires a positive base, via exp(r * log v)
    return exp(log(v) * r)


# -- finite-difference oracle ------------------------------------------------


def finite_diff(fn, point, index, h):
    """Central-difference estimate of the partial derivative `index` of `fn`.

    `fn` maps (x, y, t) to a float.  Only |index| <= 2 is supported; this is a
    cross-validation oracle for jet-extracted derivatives, accurate to O(h^2).
    """
    if sum(index) > 2:
        raise ValueError("finite_diff supports derivative orders <= 2 only")
    if h <= 0.0:
        raise ValueError("step h must be positive")
    p = np.asarray(point, dtype=float)

    def at(*offsets):
        q = p.copy()
        for axis, mult in offsets:
            q[axis] += mult * h
        return fn(*q)

    axes = [axis for axis, m in enumerate(index) for _ in range(m)]
    if len(axes) == 0:
        return at()
    if len(axes) == 1:
        (a,) = axes
        return (at((a, 1)) - at((a, -1))) / (2.0 * h)
    a, b = axes
    if a == b:
        return (at((a, 1)) - 2.0 * at() + at((a, -1))) / (h * h)
    return (at((a, 1), (b, 1)) - at((a, 1), (b, -1))
            - at((a, -1), (b, 1)) + at((a, -1), (b, -1))) / (4.0 * h * h)
