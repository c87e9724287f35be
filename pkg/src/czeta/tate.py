"""Bi-truncated elements of the Tate algebra: t-polynomials with graded coefficients.

A :class:`TateSeries` stores the t^0..t^{tdeg-1} coefficients of a power
series in t.  All coefficients share one grading ``(-theta)^g``, so only
their Laurent mantissas are kept.  ``tail`` is an optional certified lower
bound on ``val(coeff_i) - i`` for every omitted index ``i >= tdeg``; it lets
evaluation at ``t = theta`` report an honest precision.
"""

from __future__ import annotations

from fractions import Fraction
import math

from .errors import ContextMismatchError, ConvergenceError, DomainError
from .ffq import FieldCtx, field
from .poly import ThetaRational
from .series import GradedSeries, LaurentSeries

_BIG = 1 << 60


def _lb(s: LaurentSeries) -> int:
    """Lower bound on the valuation of a stored coefficient."""
    if s.is_zero():
        return _BIG if s.prec is None else s.prec
    return s.val


class TateSeries:
    __slots__ = ("ctx", "g", "coeffs", "tail")

    def __init__(self, ctx: FieldCtx, g, coeffs, tail: int | None = None):
        g = Fraction(g)
        if not 0 <= g < 1:
            # fold the integer part into every mantissa
            folded = [GradedSeries(g, c) for c in coeffs]
            k = math.floor(g)
            g = folded[0].g if folded else g - k
            coeffs = [f.mantissa for f in folded]
            if tail is not None:
                tail -= k
        for c in coeffs:
            if c.ctx is not ctx:
                raise ContextMismatchError(f"coefficient in {c.ctx}, expected {ctx}")
        if tail is not None and tail >= _BIG // 2:
            tail = _BIG
        self.ctx = ctx
        self.g = g
        self.coeffs = list(coeffs)
        self.tail = tail

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx, tdeg: int, g=0) -> "TateSeries":
        return cls(ctx, g, [LaurentSeries.zero(ctx) for _ in range(tdeg)], _BIG)

    @classmethod
    def constant(cls, value, tdeg: int) -> "TateSeries":
        """A t-constant; value is a GradedSeries, LaurentSeries or ThetaRational."""
        if isinstance(value, GradedSeries):
            g, mant = value.g, value.mantissa
        elif isinstance(value, LaurentSeries):
            g, mant = 0, value
        else:
            raise DomainError("constant TateSeries needs a series value")
        ctx = mant.ctx
        coeffs = [mant] + [LaurentSeries.zero(ctx) for _ in range(tdeg - 1)]
        return cls(ctx, g, coeffs, _BIG)

    @classmethod
    def from_tpoly(cls, ctx: FieldCtx, tcoeffs, tdeg: int, prec: int | None = None) -> "TateSeries":
        """A polynomial in t whose coefficients are ThetaRational / LaurentSeries."""
        coeffs = []
        for i in range(tdeg):
            c = tcoeffs[i] if i < len(tcoeffs) else None
            if c is None:
                coeffs.append(LaurentSeries.zero(ctx))
            elif isinstance(c, ThetaRational):
                coeffs.append(LaurentSeries.from_rational(c, None if c.is_polynomial() else prec))
            else:
                coeffs.append(c)
        return cls(ctx, 0, coeffs, _BIG)

    # -- queries --------------------------------------------------------------

    @property
    def tdeg(self) -> int:
        return len(self.coeffs)

    def coeff(self, i: int) -> GradedSeries:
        return GradedSeries(self.g, self.coeffs[i])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def lower_bounds(self):
        return [_lb(c) - i for i, c in enumerate(self.coeffs)]

    def max_residual_order(self):
        """Smallest nonzero u-exponent among mantissas, or None if zero to precision."""
        vals = [c.val for c in self.coeffs if not c.is_zero()]
        return min(vals) if vals else None

    def _check(self, other) -> "TateSeries":
        if not isinstance(other, TateSeries):
            raise DomainError("expected a TateSeries")
        if other.ctx is not self.ctx:
            raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
        return other

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        if self.g != other.g:
            if other.is_zero():
                other = TateSeries(self.ctx, self.g, other.coeffs, other.tail)
            elif self.is_zero():
                return other + TateSeries(other.ctx, other.g, self.coeffs, self.tail)
            else:
                raise DomainError(f"cannot add gradings {self.g} and {other.g}")
        n = min(self.tdeg, other.tdeg)
        coeffs = [self.coeffs[i] + other.coeffs[i] for i in range(n)]
        tail = _merge_tail(self, other, n)
        return TateSeries(self.ctx, self.g, coeffs, tail)

    def __neg__(self):
        return TateSeries(self.ctx, self.g, [-c for c in self.coeffs], self.tail)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        if isinstance(other, TateSeries):
            return self._mul_series(self._check(other))
        return self.scalar_mul(other)

    __rmul__ = __mul__

    def _mul_series(self, other: "TateSeries") -> "TateSeries":
        n = min(self.tdeg, other.tdeg)
        coeffs = []
        for k in range(n):
            acc = None
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a.is_exact and a.is_zero() or b.is_exact and b.is_zero():
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            coeffs.append(acc if acc is not None else LaurentSeries.zero(self.ctx))
        tail = _product_tail(self, other, n)
        return TateSeries(self.ctx, self.g + other.g, coeffs, tail)

    def scalar_mul(self, c) -> "TateSeries":
        if isinstance(c, GradedSeries):
            g, mant = c.g, c.mantissa
        elif isinstance(c, LaurentSeries):
            g, mant = 0, c
        elif isinstance(c, ThetaRational):
            prec = max((x.prec for x in self.coeffs if x.prec is not None), default=None)
            g, mant = 0, LaurentSeries.from_rational(c, None if c.is_polynomial() else prec)
        else:
            g, mant = 0, LaurentSeries.monomial(self.ctx, 0, c)
        coeffs = [x * mant for x in self.coeffs]
        tail = None
        if self.tail is not None and not mant.is_zero():
            tail = self.tail + mant.val
        elif mant.is_zero():
            tail = _BIG
        return TateSeries(self.ctx, self.g + g, coeffs, tail)

    def pow(self, n: int) -> "TateSeries":
        if n < 0:
            raise DomainError("negative powers of Tate series are not supported")
        result = TateSeries.constant(LaurentSeries.one(self.ctx), self.tdeg)
        for _ in range(n):
            result = result * self
        return result

    def twist_forward(self, m: int, cap: int | None = None) -> "TateSeries":
        """t fixed, every coefficient raised to the p^m (precision scales by p^m)."""
        if m == 0:
            return self if cap is None else self.truncate(cap)
        twisted = [GradedSeries(self.g, c).twist_forward(m, cap) for c in self.coeffs]
        step = self.ctx.p ** m
        k = math.floor(self.g * step)
        g = twisted[0].g if twisted else (self.g * step - k)
        tail = None if self.tail is None else (_BIG if self.tail >= _BIG else self.tail * step - k)
        return TateSeries(self.ctx, g, [t.mantissa for t in twisted], tail)

    def truncate(self, prec: int | None = None, tdeg: int | None = None) -> "TateSeries":
        coeffs = self.coeffs if tdeg is None else self.coeffs[:tdeg]
        tail = self.tail
        if tdeg is not None and tdeg < self.tdeg:
            bounds = self.lower_bounds()[tdeg:]
            tail = None if tail is None else min([tail] + bounds)
        if prec is not None:
            coeffs = [c.truncate(prec) for c in coeffs]
        return TateSeries(self.ctx, self.g, coeffs, tail)

    def embed(self, target: FieldCtx) -> "TateSeries":
        return TateSeries(target, self.g, [c.embed(target) for c in self.coeffs], self.tail)

    def agrees(self, other: "TateSeries") -> bool:
        diff = self - other
        return diff.is_zero()

    def eval_at_theta(self, tail_floor=None):
        """Sum of coeff_i * theta^i; returns (GradedSeries, certified precision).

        Refuses unless every stored index satisfies
        ``val(coeff_i) - i >= tail_floor(i)``.  The default floor is
        ``i + min(0, val(coeff_0))``: linear growth from the constant term's level.
        Exact t-polynomials (nothing omitted) skip the check.
        """
        bounds = self.lower_bounds()
        if tail_floor is None and self.tail == _BIG:
            # a genuine t-polynomial: nothing omitted, nothing to witness
            tail_floor = lambda i: -_BIG  # noqa: E731
        elif tail_floor is None:
            base = min(0, bounds[0]) if bounds else 0
            tail_floor = lambda i: i + base  # noqa: E731
        for i, b in enumerate(bounds):
            if b < tail_floor(i):
                raise ConvergenceError(
                    f"convergence witness fails at t^{i}: val - i = {b} < {tail_floor(i)}")
        precs = [c.prec - i for i, c in enumerate(self.coeffs) if c.prec is not None]
        tail = self.tail if self.tail is not None else tail_floor(self.tdeg)
        certified = min(precs + [tail])
        if certified >= _BIG // 2:
            certified = None
        acc = LaurentSeries.zero(self.ctx, certified)
        for i, c in enumerate(self.coeffs):
            if c.is_zero() and c.is_exact:
                continue
            acc = acc + c.shift(-i)
        if certified is not None:
            acc = acc.truncate(certified)
        return GradedSeries(self.g, acc), certified

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {"tdeg": self.tdeg, "coeffs": [self.coeff(i).to_json() for i in range(self.tdeg)]}

    @classmethod
    def from_json(cls, obj: dict) -> "TateSeries":
        graded = [GradedSeries.from_json(c) for c in obj["coeffs"]]
        if not graded:
            raise DomainError("empty TateSeries")
        ctx = field(obj["coeffs"][0]["p"], obj["coeffs"][0]["r"])
        g = graded[0].g
        if any(x.g != g for x in graded):
            raise DomainError("TateSeries coefficients must share one grading")
        return cls(ctx, g, [x.mantissa for x in graded])

    def __repr__(self):
        return f"TateSeries(tdeg={self.tdeg}, g={self.g}, F_{self.ctx.q})"


def _merge_tail(a: TateSeries, b: TateSeries, n: int):
    parts = []
    for s in (a, b):
        if s.tail is None:
            return None
        parts.append(s.tail)
        parts.extend(s.lower_bounds()[n:])
    return min(parts)


def _product_tail(a: TateSeries, b: TateSeries, n: int):
    if a.tail is None or b.tail is None:
        return None
    la, lbb = a.lower_bounds(), b.lower_bounds()
    min_a = min(la + [a.tail])
    min_b = min(lbb + [b.tail])
    best = min(a.tail + min_b, b.tail + min_a)
    for i, x in enumerate(la):
        for j in range(max(0, n - i), len(lbb)):
            best = min(best, x + lbb[j])
    return min(best, _BIG)


def ts_arith(op: str, a: TateSeries, b) -> TateSeries:
    """Dispatch add, mul or scalar_mul."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scalar_mul":
        return a.scalar_mul(b)
    raise DomainError(f"unknown Tate series operation {op!r}")


def ts_twist_forward(a: TateSeries, m: int) -> TateSeries:
    return a.twist_forward(m)


def ts_eval_at_theta(a: TateSeries, tail_floor=None):
    return a.eval_at_theta(tail_floor)
