"""Truncated Laurent expansions with G2, 7x7 or scalar coefficients.

Every jet carries a validity window [lo, hi]: its coefficients are exact for
all orders in the window and unknown outside.  Products narrow the window to
what the inputs determine; orders inside the window but absent from the
coefficient map are zero.
"""
from __future__ import annotations

from .exact import ZERO, Q, QSqrt2Matrix, fmt
from .g2 import G2Element, bracket, embed, project


class EmptyWindow(ValueError):
    pass


class OrderOutsideWindow(KeyError):
    pass


def _product_window(x, y) -> tuple[int, int]:
    lo = x.lo + y.lo
    hi = min(x.hi + y.lo, y.hi + x.lo)
    if hi < lo:
        raise EmptyWindow(f"product window [{lo}, {hi}] is empty")
    return lo, hi


class _Jet:
    zero = None

    def __init__(self, coeffs=None, lo: int = -2, hi: int = 3):
        if hi < lo:
            raise EmptyWindow(f"window [{lo}, {hi}] is empty")
        self.lo, self.hi = int(lo), int(hi)
        self.coeffs = {}
        for n, c in (coeffs or {}).items():
            n = int(n)
            if not self.lo <= n <= self.hi:
                raise OrderOutsideWindow(f"order {n} outside [{self.lo}, {self.hi}]")
            if not self._is_zero(c):
                self.coeffs[n] = c

    @staticmethod
    def _is_zero(c) -> bool:
        return not c

    def __getitem__(self, n: int):
        if not self.lo <= n <= self.hi:
            raise OrderOutsideWindow(f"order {n} outside [{self.lo}, {self.hi}]")
        return self.coeffs.get(n, self.zero())

    @property
    def window(self) -> tuple[int, int]:
        return self.lo, self.hi

    def orders(self):
        return range(self.lo, self.hi + 1)

    def restrict(self, lo: int, hi: int):
        if lo < self.lo or hi > self.hi:
            raise OrderOutsideWindow(f"[{lo}, {hi}] not inside [{self.lo}, {self.hi}]")
        return type(self)({n: c for n, c in self.coeffs.items() if lo <= n <= hi}, lo, hi)

    def is_zero(self) -> bool:
        return not self.coeffs

    def lowest_order(self):
        return min(self.coeffs) if self.coeffs else None

    def _binary(self, other, op):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return type(self)({n: op(self[n], other[n]) for n in range(lo, hi + 1)}, lo, hi)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.window == other.window and all(self[n] == other[n] for n in self.orders())

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(window=[{self.lo}, {self.hi}], orders={sorted(self.coeffs)})"


class MatrixJet(_Jet):
    """Laurent jet with G2Element coefficients; default window [-2, 3]."""

    zero = staticmethod(G2Element.zero)

    @staticmethod
    def _is_zero(c) -> bool:
        return c.is_zero()

    @property
    def trunc(self) -> int:
        return self.hi

    def scale(self, c) -> "MatrixJet":
        return MatrixJet({n: v.scale(c) for n, v in self.coeffs.items()}, self.lo, self.hi)

    def __neg__(self):
        return self.scale(-1)

    def to_json(self) -> dict:
        d = {"trunc": self.hi, "coeffs": {str(n): c.to_json() for n, c in sorted(self.coeffs.items())}}
        if self.lo != -2:
            d["lo"] = self.lo
        return d

    @classmethod
    def from_json(cls, d) -> "MatrixJet":
        coeffs = {int(n): G2Element.from_json(c) for n, c in d["coeffs"].items()}
        return cls(coeffs, int(d.get("lo", -2)), int(d["trunc"]))


class EmbeddedJet(_Jet):
    """Jet with 7x7 coefficients over Q(sqrt 2) (products of embedded jets)."""

    zero = staticmethod(lambda: QSqrt2Matrix.zeros(7))

    @staticmethod
    def _is_zero(c) -> bool:
        return c.is_zero()

    @classmethod
    def of(cls, x: MatrixJet) -> "EmbeddedJet":
        return cls({n: embed(c) for n, c in x.coeffs.items()}, x.lo, x.hi)

    def project(self) -> MatrixJet:
        return MatrixJet({n: project(c) for n, c in self.coeffs.items()}, self.lo, self.hi)


class ScalarJet(_Jet):
    zero = staticmethod(lambda: ZERO)

    def __init__(self, coeffs=None, lo: int = -2, hi: int = 3):
        super().__init__({n: Q(c) for n, c in (coeffs or {}).items()}, lo, hi)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi,
                "coeffs": {str(n): fmt(c) for n, c in sorted(self.coeffs.items())}}


def _convolve(x, y, mul, zero):
    lo, hi = _product_window(x, y)
    out = {}
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            n = i + j
            if n <= hi:
                out[n] = mul(a, b) if n not in out else out[n] + mul(a, b)
    return out, lo, hi


def _as_embedded(x) -> EmbeddedJet:
    return EmbeddedJet.of(x) if isinstance(x, MatrixJet) else x


def jet_product(x, y) -> EmbeddedJet:
    """Coefficient n is sum over i + j = n of embed(x_i) embed(y_j)."""
    x, y = _as_embedded(x), _as_embedded(y)
    out, lo, hi = _convolve(x, y, lambda a, b: a @ b, None)
    return EmbeddedJet(out, lo, hi)


def jet_commutator(x: MatrixJet, y: MatrixJet) -> MatrixJet:
    out, lo, hi = _convolve(x, y, bracket, None)
    return MatrixJet(out, lo, hi)


def jet_derivative(x: MatrixJet) -> MatrixJet:
    """d/dz; order n maps to order n - 1 with factor n."""
    return MatrixJet({n - 1: c.scale(n) for n, c in x.coeffs.items() if n}, x.lo - 1, x.hi - 1)


def trace_jet(x: EmbeddedJet) -> ScalarJet:
    out = {}
    for n, c in x.coeffs.items():
        t = c.trace()
        if t.s != 0:
            raise ArithmeticError(f"sqrt2 part survived in the trace at order {n}")
        out[n] = t.r
    return ScalarJet(out, x.lo, x.hi)


def residue(s: ScalarJet):
    if not s.lo <= -1 <= s.hi:
        raise OrderOutsideWindow(f"order -1 outside [{s.lo}, {s.hi}]")
    return s[-1]
