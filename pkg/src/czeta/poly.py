"""Polynomials and rational functions in theta over F_{p^r}.

``ThetaPoly`` stores an ``(r, deg + 1)`` digit array, little-endian in theta.
``ThetaRational`` keeps numerator and monic denominator coprime, so equality
is structural.
"""

from __future__ import annotations

import numpy as np

from .errors import ContextMismatchError, DomainError, NotInvertibleError
from .ffq import FieldCtx, FqElem, embed_array


def _strip(data: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(data.any(axis=0))
    if len(nz) == 0:
        return data[:, :0]
    return data[:, : nz[-1] + 1]


class ThetaPoly:
    __slots__ = ("ctx", "data")

    def __init__(self, ctx: FieldCtx, data: np.ndarray):
        self.ctx = ctx
        self.data = _strip(np.asarray(data, dtype=np.int64) % ctx.p)

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_coeffs(cls, ctx: FieldCtx, coeffs) -> "ThetaPoly":
        cols = [ctx.elem(c).coeffs for c in coeffs]
        if not cols:
            return cls(ctx, np.zeros((ctx.r, 0), dtype=np.int64))
        return cls(ctx, np.array(cols, dtype=np.int64).T)

    @classmethod
    def monomial(cls, ctx: FieldCtx, k: int, c=1) -> "ThetaPoly":
        data = np.zeros((ctx.r, k + 1), dtype=np.int64)
        data[:, k] = ctx.elem(c).coeffs
        return cls(ctx, data)

    @classmethod
    def constant(cls, ctx: FieldCtx, c=1) -> "ThetaPoly":
        return cls.monomial(ctx, 0, c)

    @classmethod
    def theta(cls, ctx: FieldCtx) -> "ThetaPoly":
        return cls.monomial(ctx, 1)

    # -- queries -------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.data.shape[1] - 1

    def is_zero(self) -> bool:
        return self.data.shape[1] == 0

    def coeff(self, k: int) -> FqElem:
        if k < 0 or k > self.degree:
            return self.ctx.zero
        return self.ctx.elem_at(self.data, k)

    def coeffs(self) -> list:
        return [self.coeff(k) for k in range(self.degree + 1)]

    @property
    def lead(self) -> FqElem:
        if self.is_zero():
            return self.ctx.zero
        return self.coeff(self.degree)

    def is_monic(self) -> bool:
        return not self.is_zero() and self.lead == self.ctx.one

    def _check(self, other) -> "ThetaPoly":
        if isinstance(other, ThetaPoly):
            if other.ctx is not self.ctx:
                raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
            return other
        return ThetaPoly.constant(self.ctx, other)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        n = max(self.data.shape[1], other.data.shape[1])
        out = np.zeros((self.ctx.r, n), dtype=np.int64)
        out[:, : self.data.shape[1]] += self.data
        out[:, : other.data.shape[1]] += other.data
        return ThetaPoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return ThetaPoly(self.ctx, -self.data)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, FqElem):
            return ThetaPoly(self.ctx, self.ctx.scale(other, self.data))
        other = self._check(other)
        return ThetaPoly(self.ctx, self.ctx.conv(self.data, other.data))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative power of a polynomial")
        result, base = ThetaPoly.constant(self.ctx), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise NotInvertibleError("polynomial division by zero")
        ctx = self.ctx
        a = self.data.copy()
        db = other.degree
        if self.degree < db:
            return ThetaPoly(ctx, np.zeros((ctx.r, 0))), self
        inv_lead = other.lead.inverse()
        qdata = np.zeros((ctx.r, self.degree - db + 1), dtype=np.int64)
        b = other.data
        for k in range(self.degree, db - 1, -1):
            col = a[:, k]
            if not col.any():
                continue
            c = FqElem(ctx, tuple(int(x) for x in col)) * inv_lead
            qdata[:, k - db] = c.coeffs
            a[:, k - db: k + 1] = (a[:, k - db: k + 1] - ctx.scale(c, b)) % ctx.p
        return ThetaPoly(ctx, qdata), ThetaPoly(ctx, a[:, :db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "ThetaPoly":
        if self.is_zero():
            return self
        return self * self.lead.inverse()

    def gcd(self, other) -> "ThetaPoly":
        a, b = self, self._check(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def twist(self, m: int) -> "ThetaPoly":
        """The forward twist c(theta) -> c^{(m)}: coefficients to the p^m, theta to theta^{p^m}."""
        if m < 0:
            raise DomainError("only forward twists are representable")
        if m == 0 or self.is_zero():
            return self
        ctx = self.ctx
        step = ctx.p ** m
        out = np.zeros((ctx.r, self.degree * step + 1), dtype=np.int64)
        out[:, ::step] = ctx.frobenius_array(self.data, m)
        return ThetaPoly(ctx, out)

    def embed(self, target: FieldCtx) -> "ThetaPoly":
        return ThetaPoly(target, embed_array(self.data, self.ctx, target))

    def __call__(self, x: FqElem) -> FqElem:
        acc = self.ctx.zero
        for c in reversed(self.coeffs()):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, ThetaPoly):
            if isinstance(other, (int, FqElem)):
                other = ThetaPoly.constant(self.ctx, other)
            else:
                return NotImplemented
        return self.ctx is other.ctx and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.r, self.data.tobytes()))

    def to_json(self) -> list:
        return [c.text() for c in self.coeffs()]

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj) -> "ThetaPoly":
        return cls.from_coeffs(ctx, [ctx.from_text(s) for s in obj])

    def __repr__(self):
        return f"ThetaPoly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeff(k)
            if c.is_zero():
                continue
            cs = str(c)
            if " " in cs:
                cs = f"({cs})"
            mono = "" if k == 0 else ("theta" if k == 1 else f"theta^{k}")
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            else:
                terms.append(f"{cs}*{mono}")
        return " + ".join(terms)


class ThetaRational:
    """An element of F_{p^r}(theta) in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _normalized=False):
        if not isinstance(num, ThetaPoly):
            raise DomainError("numerator must be a ThetaPoly")
        if den is None:
            den = ThetaPoly.constant(num.ctx)
        if den.ctx is not num.ctx:
            raise ContextMismatchError("numerator and denominator fields differ")
        if den.is_zero():
            raise NotInvertibleError("zero denominator")
        if not _normalized:
            if num.is_zero():
                den = ThetaPoly.constant(num.ctx)
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num, den = num // g, den // g
                lead_inv = den.lead.inverse()
                num, den = num * lead_inv, den * lead_inv
        self.num = num
        self.den = den

    @property
    def ctx(self) -> FieldCtx:
        return self.num.ctx

    @classmethod
    def from_int(cls, ctx: FieldCtx, c) -> "ThetaRational":
        return cls(ThetaPoly.constant(ctx, c))

    @classmethod
    def theta_power(cls, ctx: FieldCtx, k: int) -> "ThetaRational":
        if k >= 0:
            return cls(ThetaPoly.monomial(ctx, k))
        return cls(ThetaPoly.constant(ctx), ThetaPoly.monomial(ctx, -k))

    def _check(self, other) -> "ThetaRational":
        if isinstance(other, ThetaRational):
            if other.ctx is not self.ctx:
                raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, ThetaPoly):
            return ThetaRational(self._poly(other))
        return ThetaRational(ThetaPoly.constant(self.ctx, other))

    def _poly(self, other: ThetaPoly) -> ThetaPoly:
        if other.ctx is not self.ctx:
            raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
        return other

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __add__(self, other):
        other = self._check(other)
        if self.den == other.den:
            return ThetaRational(self.num + other.num, self.den)
        return ThetaRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ThetaRational(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return ThetaRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "ThetaRational":
        if self.is_zero():
            raise NotInvertibleError("inverse of the zero rational function")
        return ThetaRational(self.den, self.num)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return ThetaRational(self.num ** k, self.den ** k, _normalized=True)

    def twist(self, m: int) -> "ThetaRational":
        """Forward twist x -> x^{p^m}, applied to numerator and denominator."""
        return ThetaRational(self.num.twist(m), self.den.twist(m), _normalized=True)

    def embed(self, target: FieldCtx) -> "ThetaRational":
        return ThetaRational(self.num.embed(target), self.den.embed(target), _normalized=True)

    def to_series(self, prec: int):
        """Expansion in u = 1/theta, known mod u^prec."""
        from .series import LaurentSeries
        return LaurentSeries.from_rational(self, prec)

    def valuation(self) -> int:
        """u-adic valuation, i.e. deg(den) - deg(num); None for zero."""
        if self.is_zero():
            return None
        return self.den.degree - self.num.degree

    def __eq__(self, other):
        if isinstance(other, (int, FqElem, ThetaPoly)):
            other = self._check(other)
        if not isinstance(other, ThetaRational):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj) -> "ThetaRational":
        return cls(ThetaPoly.from_json(ctx, obj["num"]), ThetaPoly.from_json(ctx, obj["den"]))

    def __repr__(self):
        return f"ThetaRational({self})"

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num})/({self.den})"


def parse_theta_poly(ctx: FieldCtx, text: str) -> ThetaRational:
    """Parse a small expression such as ``"theta^2 + 2*theta + 1"`` over F_p.

    Only integer coefficients and non-negative powers of theta are accepted.
    """
    expr = text.replace(" ", "").replace("-", "+-")
    if not expr or expr.endswith("+") or "++" in expr.lstrip("+"):
        _bad(text)
    total = ThetaPoly(ctx, np.zeros((ctx.r, 0)))
    for term in filter(None, expr.split("+")):
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        coef, power = 1, 0
        for factor in term.split("*"):
            if factor.startswith("theta"):
                rest = factor[5:]
                if rest.startswith("^") and rest[1:].isdigit():
                    power += int(rest[1:])
                elif rest:
                    _bad(text)
                else:
                    power += 1
            elif factor.isdigit():
                coef *= int(factor)
            else:
                _bad(text)
        total = total + ThetaPoly.monomial(ctx, power, sign * coef)
    return ThetaRational(total)


def _bad(text):
    raise DomainError(f"cannot parse {text!r} as a polynomial in theta")
