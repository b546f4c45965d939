"""Truncated trivariate Taylor arithmetic.

A MultiJet holds the normalized Taylor coefficients T_alpha = d^alpha f / alpha!
of a scalar function of three chart variables at a point, densely over all
multi-indices |alpha| <= order.  Storing normalized coefficients makes the
product a plain truncated convolution and keeps magnitudes tame.

Monomials are listed in graded order (degree first), so the coefficient array
of a lower-order jet is a prefix of a higher-order one; truncation is a slice.

All tables (monomial lists, product index pairs, division pairs, derivative
maps) are built once per order and cached.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError, OrderError, SingularJet

NVARS = 3
MAX_ORDER = 5


def ncoef(order: int) -> int:
    """Number of trivariate monomials of total degree <= order."""
    return (order + 1) * (order + 2) * (order + 3) // 6


@lru_cache(maxsize=None)
def _monomials(order: int):
    monos = []
    for deg in range(order + 1):
        for a in range(deg, -1, -1):
            for b in range(deg - a, -1, -1):
                monos.append((a, b, deg - a - b))
    return tuple(monos)


@lru_cache(maxsize=None)
def _positions(order: int):
    return {m: i for i, m in enumerate(_monomials(order))}


@lru_cache(maxsize=None)
def _mul_table(order: int):
    monos = _monomials(order)
    pos = _positions(order)
    ia, ib, iout = [], [], []
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            s = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            if s[0] + s[1] + s[2] <= order:
                ia.append(i)
                ib.append(j)
                iout.append(pos[s])
    return (np.asarray(ia, dtype=np.intp),
            np.asarray(ib, dtype=np.intp),
            np.asarray(iout, dtype=np.intp))


@lru_cache(maxsize=None)
def _div_pairs(order: int):
    # For each target monomial g, the pairs (beta, delta) with beta + delta = g
    # and beta != 0.  Every delta has strictly lower degree than g, hence a
    # smaller index, so a single increasing sweep solves b*q = a.
    monos = _monomials(order)
    pos = _positions(order)
    out = []
    for g in monos:
        ib, iq = [], []
        for b0 in range(g[0] + 1):
            for b1 in range(g[1] + 1):
                for b2 in range(g[2] + 1):
                    if b0 == b1 == b2 == 0:
                        continue
                    ib.append(pos[(b0, b1, b2)])
                    iq.append(pos[(g[0] - b0, g[1] - b1, g[2] - b2)])
        out.append((np.asarray(ib, dtype=np.intp), np.asarray(iq, dtype=np.intp)))
    return tuple(out)


@lru_cache(maxsize=None)
def _deriv_table(order: int, var: int):
    # var is 0-based here.  dst indices land inside the order-1 prefix.
    monos = _monomials(order)
    pos = _positions(order)
    src, dst, fac = [], [], []
    for i, a in enumerate(monos):
        if a[var] == 0:
            continue
        b = list(a)
        b[var] -= 1
        src.append(i)
        dst.append(pos[tuple(b)])
        fac.append(float(a[var]))
    return (np.asarray(src, dtype=np.intp),
            np.asarray(dst, dtype=np.intp),
            np.asarray(fac, dtype=float))


def _check_order(order: int) -> None:
    if not isinstance(order, int) or order < 0 or order > MAX_ORDER:
        raise OrderError(f"jet order must be an integer in [0, {MAX_ORDER}], got {order!r}")


class MultiJet:
    """Dense truncated Taylor expansion in three variables."""

    __slots__ = ("order", "c")

    def __init__(self, order: int, coeffs: np.ndarray):
        _check_order(order)
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (ncoef(order),):
            raise OrderError(
                f"coefficient array has length {c.shape}, expected ({ncoef(order)},) for order {order}")
        self.order = order
        self.c = c

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(value: float, order: int) -> "MultiJet":
        _check_order(order)
        c = np.zeros(ncoef(order))
        c[0] = value
        return MultiJet(order, c)

    # -- basics --------------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.c[0])

    def coeff(self, alpha) -> float:
        """Normalized coefficient T_alpha."""
        a = tuple(int(k) for k in alpha)
        if len(a) != NVARS or min(a) < 0:
            raise OrderError(f"bad multi-index {alpha!r}")
        if sum(a) > self.order:
            raise OrderError(f"multi-index {a} exceeds jet order {self.order}")
        return float(self.c[_positions(self.order)[a]])

    def truncate(self, order: int) -> "MultiJet":
        if order == self.order:
            return self
        if order > self.order:
            raise OrderError(f"cannot raise jet order {self.order} to {order}")
        _check_order(order)
        return MultiJet(order, self.c[: ncoef(order)].copy())

    def __repr__(self) -> str:
        return f"MultiJet(order={self.order}, value={self.c[0]:.6g})"

    # -- ring operations ------------------------------------------------------
    # Mixed orders truncate to the lower order; the strict same-order contract
    # lives in jet_arith.

    def _coerce(self, other):
        if isinstance(other, MultiJet):
            k = min(self.order, other.order)
            return self.truncate(k), other.truncate(k)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return MultiJet(a.order, a.c + b.c)
        if isinstance(other, (int, float)):
            c = self.c.copy()
            c[0] += other
            return MultiJet(self.order, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return MultiJet(self.order, -self.c)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return MultiJet(a.order, a.c - b.c)
        if isinstance(other, (int, float)):
            c = self.c.copy()
            c[0] -= other
            return MultiJet(self.order, c)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            c = -self.c
            c[0] += other
            return MultiJet(self.order, c)
        return NotImplemented

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            ia, ib, iout = _mul_table(a.order)
            prod = np.bincount(iout, weights=a.c[ia] * b.c[ib], minlength=ncoef(a.order))
            return MultiJet(a.order, prod)
        if isinstance(other, (int, float)):
            return MultiJet(self.order, self.c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return _jet_div(a, b)
        if isinstance(other, (int, float)):
            return MultiJet(self.order, self.c / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return _jet_div(MultiJet.constant(float(other), self.order), self)
        return NotImplemented

    def __pow__(self, k):
        if isinstance(k, int):
            return powi(self, k)
        return NotImplemented


def _jet_div(a: MultiJet, b: MultiJet) -> MultiJet:
    """Solve b*q = a coefficient-wise by increasing degree."""
    if b.c[0] == 0.0:
        raise SingularJet("division by a jet with zero constant term")
    pairs = _div_pairs(a.order)
    n = ncoef(a.order)
    q = np.empty(n)
    bc = b.c
    b0 = bc[0]
    ac = a.c
    for i in range(n):
        ib, iq = pairs[i]
        acc = ac[i]
        if ib.size:
            acc -= float(np.dot(bc[ib], q[iq]))
        q[i] = acc / b0
    return MultiJet(a.order, q)


# ---------------------------------------------------------------------------
# public operations


def jet_seed(var_index: int, value: float, order: int) -> MultiJet:
    """Jet of the coordinate function u_{var_index} (1-based) at the point."""
    _check_order(order)
    if var_index not in (1, 2, 3):
        raise OrderError(f"var_index must be 1, 2, or 3, got {var_index!r}")
    c = np.zeros(ncoef(order))
    c[0] = value
    if order >= 1:
        e = [0, 0, 0]
        e[var_index - 1] = 1
        c[_positions(order)[tuple(e)]] = 1.0
    return MultiJet(order, c)


def jet_arith(a: MultiJet, b: MultiJet, op: str) -> MultiJet:
    """Strict arithmetic: operands must share the same truncation order."""
    if a.order != b.order:
        raise OrderError(f"operand orders differ: {a.order} vs {b.order}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise OrderError(f"unknown op {op!r}")


def _compose(a: MultiJet, series: list) -> MultiJet:
    """Horner evaluation of sum_k series[k] * (a - a0)^k, truncated."""
    abar_c = a.c.copy()
    abar_c[0] = 0.0
    abar = MultiJet(a.order, abar_c)
    r = MultiJet.constant(series[-1], a.order)
    for k in range(len(series) - 2, -1, -1):
        r = r * abar + series[k]
    return r


def jet_elementary(a: MultiJet, fn: str, exponent: int | None = None) -> MultiJet:
    """Composition with an elementary function: sqrt, sin, cos, exp, pow."""
    n = a.order
    a0 = float(a.c[0])
    if fn == "sqrt":
        if a0 <= 0.0:
            raise DomainError(f"sqrt of jet with non-positive constant term {a0}")
        series = [math.sqrt(a0)]
        for k in range(1, n + 1):
            series.append(series[-1] * (0.5 - (k - 1)) / (k * a0))
        return _compose(a, series)
    if fn == "exp":
        series = [math.exp(a0)]
        for k in range(1, n + 1):
            series.append(series[-1] / k)
        return _compose(a, series)
    if fn == "sin" or fn == "cos":
        s, co = math.sin(a0), math.cos(a0)
        cycle = (s, co, -s, -co) if fn == "sin" else (co, -s, -co, s)
        fact = 1.0
        series = []
        for k in range(n + 1):
            if k > 0:
                fact *= k
            series.append(cycle[k % 4] / fact)
        return _compose(a, series)
    if fn == "pow":
        if exponent is None or not isinstance(exponent, int):
            raise OrderError("pow requires an integer exponent")
        return powi(a, exponent)
    raise OrderError(f"unknown elementary function {fn!r}")


def derivative(a: MultiJet, var_index: int) -> MultiJet:
    """Partial derivative with respect to u_{var_index}; drops one order."""
    if var_index not in (1, 2, 3):
        raise OrderError(f"var_index must be 1, 2, or 3, got {var_index!r}")
    if a.order == 0:
        raise OrderError("cannot differentiate an order-0 jet")
    src, dst, fac = _deriv_table(a.order, var_index - 1)
    out = np.zeros(ncoef(a.order - 1))
    out[dst] = fac * a.c[src]
    return MultiJet(a.order - 1, out)


def extract_derivative(a: MultiJet, alpha) -> float:
    """Raw partial derivative d^alpha f at the basepoint (coefficient times alpha!)."""
    t = tuple(int(k) for k in alpha)
    fac = 1.0
    for k in t:
        fac *= math.factorial(k)
    return a.coeff(t) * fac


# ---------------------------------------------------------------------------
# scalar-polymorphic helpers: work on MultiJet and on plain floats, so an
# expression tree or a built-in evaluator runs unchanged over either.


def _binpow(x, k: int):
    """x**k for k >= 1 by binary exponentiation.  Uses the identical
    multiplication tree for floats and jets so constant terms match bitwise."""
    result = None
    base = x
    while True:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if not k:
            return result
        base = base * base


def powi(x, k: int):
    if not isinstance(k, int):
        raise OrderError(f"integer exponent required, got {k!r}")
    if k == 0:
        return MultiJet.constant(1.0, x.order) if isinstance(x, MultiJet) else 1.0
    if k < 0:
        p = _binpow(x, -k)
        if isinstance(p, MultiJet):
            if p.c[0] == 0.0:
                raise SingularJet("negative power of a jet with zero constant term")
            return 1.0 / p
        return 1.0 / p
    return _binpow(x, k)


def sin(x):
    return jet_elementary(x, "sin") if isinstance(x, MultiJet) else math.sin(x)


def cos(x):
    return jet_elementary(x, "cos") if isinstance(x, MultiJet) else math.cos(x)


def exp(x):
    return jet_elementary(x, "exp") if isinstance(x, MultiJet) else math.exp(x)


def sqrt(x):
    if isinstance(x, MultiJet):
        return jet_elementary(x, "sqrt")
    if x < 0.0:
        raise DomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def value_of(x) -> float:
    """Constant term of a jet, or the float itself."""
    return x.value if isinstance(x, MultiJet) else float(x)
