"""Truncated Laurent series in u = 1/theta over F_{p^r}.

A :class:`LaurentSeries` is either *truncated* (known modulo ``u**prec``) or
*exact* (``prec is None``: finitely many nonzero coefficients, e.g. a
polynomial in theta).  Precision is part of the value and every operation
returns the precision that the inputs actually justify.

A :class:`GradedSeries` multiplies a Laurent series by a formal power
``(-theta)**g`` with ``0 <= g < 1`` and ``g * (q - 1)`` integral; this is how
fundamental periods and their relatives are carried without leaving exact
arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
import math

import numpy as np

from .errors import ContextMismatchError, DomainError, NotInvertibleError, PrecisionError
from .ffq import FieldCtx, FqElem, embed_array, field
from .linalg import nullspace_mod_p
from .poly import ThetaPoly, ThetaRational


def _min_prec(*precs):
    finite = [x for x in precs if x is not None]
    return min(finite) if finite else None


class LaurentSeries:
    __slots__ = ("ctx", "val", "prec", "data")

    def __init__(self, ctx: FieldCtx, val: int, data, prec: int | None):
        data = np.asarray(data, dtype=np.int64)
        if data.ndim == 1:
            data = data.reshape(ctx.r, -1) if ctx.r > 1 else data.reshape(1, -1)
        data = data % ctx.p
        if prec is not None:
            n = prec - val
            if n <= 0:
                data = data[:, :0]
                val = prec
            elif data.shape[1] > n:
                data = data[:, :n]
            elif data.shape[1] < n:
                data = np.concatenate([data, np.zeros((ctx.r, n - data.shape[1]), dtype=np.int64)], axis=1)
        nz = np.flatnonzero(data.any(axis=0)) if data.shape[1] else np.array([], dtype=np.int64)
        if len(nz) == 0:
            data = data[:, :0]
            val = prec if prec is not None else 0
        else:
            first = int(nz[0])
            if prec is None:
                data = data[:, first: int(nz[-1]) + 1]
            else:
                data = data[:, first:]
            val += first
        self.ctx = ctx
        self.val = val
        self.prec = prec
        self.data = data

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx, prec: int | None = None) -> "LaurentSeries":
        return cls(ctx, 0 if prec is None else prec, np.zeros((ctx.r, 0)), prec)

    @classmethod
    def monomial(cls, ctx: FieldCtx, k: int, c=1, prec: int | None = None) -> "LaurentSeries":
        """c * u^k (so k = -1 is theta)."""
        col = np.array(ctx.elem(c).coeffs, dtype=np.int64).reshape(ctx.r, 1)
        return cls(ctx, k, col, prec)

    @classmethod
    def one(cls, ctx: FieldCtx, prec: int | None = None) -> "LaurentSeries":
        return cls.monomial(ctx, 0, 1, prec)

    @classmethod
    def theta(cls, ctx: FieldCtx) -> "LaurentSeries":
        return cls.monomial(ctx, -1)

    @classmethod
    def from_coeffs(cls, ctx: FieldCtx, val: int, coeffs, prec: int | None) -> "LaurentSeries":
        cols = [ctx.elem(c).coeffs for c in coeffs]
        data = np.array(cols, dtype=np.int64).T if cols else np.zeros((ctx.r, 0), dtype=np.int64)
        return cls(ctx, val, data, prec)

    @classmethod
    def from_poly(cls, poly: ThetaPoly) -> "LaurentSeries":
        """Exact series of a polynomial in theta."""
        if poly.is_zero():
            return cls.zero(poly.ctx)
        return cls(poly.ctx, -poly.degree, poly.data[:, ::-1], None)

    @classmethod
    def from_rational(cls, x: ThetaRational, prec: int) -> "LaurentSeries":
        num = cls.from_poly(x.num)
        if x.is_polynomial():
            out = num * x.den.lead.inverse()
            return out if prec is None else out.truncate(prec)
        if prec is None:
            raise PrecisionError("a non-polynomial rational needs a target precision")
        den = cls.from_poly(x.den)
        # num * den^{-1} known mod u^prec needs den^{-1} mod u^{prec + deg num}
        return (num * den.inv(prec + x.num.degree)).truncate(prec)

    # -- queries -------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def nstored(self) -> int:
        return self.data.shape[1]

    @property
    def rel_prec(self):
        return None if self.prec is None else self.prec - self.val

    def is_zero(self) -> bool:
        """True when the series vanishes to its known precision."""
        return self.data.shape[1] == 0

    def valuation(self):
        """Index of the first nonzero coefficient, or None if zero to precision."""
        return None if self.is_zero() else self.val

    def coeff(self, k: int) -> FqElem:
        if self.prec is not None and k >= self.prec:
            raise PrecisionError(f"coefficient u^{k} is beyond precision {self.prec}")
        j = k - self.val
        if j < 0 or j >= self.data.shape[1]:
            return self.ctx.zero
        return self.ctx.elem_at(self.data, j)

    def coeffs(self, start: int, stop: int) -> list:
        return [self.coeff(k) for k in range(start, stop)]

    def window(self, start: int, stop: int) -> np.ndarray:
        """Digit array for exponents start..stop-1 (zeros outside storage)."""
        n = stop - start
        out = np.zeros((self.ctx.r, max(n, 0)), dtype=np.int64)
        if n <= 0 or self.is_zero():
            return out
        lo = max(start, self.val)
        hi = min(stop, self.val + self.data.shape[1])
        if hi > lo:
            out[:, lo - start: hi - start] = self.data[:, lo - self.val: hi - self.val]
        return out

    def _check(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.ctx is not self.ctx:
                raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, ThetaRational):
            if other.is_polynomial():
                return LaurentSeries.from_poly(other.num) * other.den.lead.inverse()
            if self.prec is None:
                raise PrecisionError("rational operand needs a finite target precision")
            return other.to_series(self.prec + max(0, -self.val) + other.num.degree)
        if isinstance(other, ThetaPoly):
            return LaurentSeries.from_poly(other)
        return LaurentSeries.monomial(self.ctx, 0, other)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        prec = _min_prec(self.prec, other.prec)
        if self.is_zero() and other.is_zero():
            return LaurentSeries.zero(self.ctx, prec)
        vals = [s.val for s in (self, other) if not s.is_zero()]
        lo = min(vals)
        if prec is None:
            hi = max(s.val + s.nstored for s in (self, other))
        else:
            hi = prec
        if hi <= lo:
            return LaurentSeries.zero(self.ctx, prec)
        out = self.window(lo, hi) + other.window(lo, hi)
        return LaurentSeries(self.ctx, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.ctx, self.val, -self.data, self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, FqElem):
            if other.ctx is not self.ctx:
                raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
            return LaurentSeries(self.ctx, self.val, self.ctx.scale(other, self.data), self.prec)
        if isinstance(other, (int, np.integer)):
            return LaurentSeries(self.ctx, self.val, self.data * int(other), self.prec)
        other = self._check(other)
        a, b = self, other
        if a.is_exact and a.is_zero() or b.is_exact and b.is_zero():
            return LaurentSeries.zero(self.ctx, None)
        val = a.val + b.val
        if a.prec is None and b.prec is None:
            prec = None
        elif a.prec is None:
            prec = a.val + b.prec
        elif b.prec is None:
            prec = b.val + a.prec
        else:
            prec = min(a.val + b.prec, b.val + a.prec)
        if a.is_zero() or b.is_zero():
            return LaurentSeries.zero(self.ctx, prec)
        n = None if prec is None else prec - val
        if n is not None and n <= 0:
            return LaurentSeries.zero(self.ctx, prec)
        return LaurentSeries(self.ctx, val, self.ctx.conv(a.data, b.data, n), prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by u^k."""
        prec = None if self.prec is None else self.prec + k
        return LaurentSeries(self.ctx, self.val + k, self.data, prec)

    def truncate(self, prec: int) -> "LaurentSeries":
        """Forget everything from u^prec on (never raises precision)."""
        if self.prec is not None and prec >= self.prec:
            return self
        return LaurentSeries(self.ctx, min(self.val, prec), self.window(min(self.val, prec), prec), prec)

    def inv(self, prec: int | None = None) -> "LaurentSeries":
        """Multiplicative inverse.

        For a truncated input the result is known mod u^{-val + (prec - val)};
        ``prec`` may lower that.  Exact non-monomial inputs need ``prec``.
        """
        if self.is_zero():
            raise NotInvertibleError(
                f"inverse of a series that is zero mod u^{self.prec}", prec=self.prec)
        v = self.val
        if self.prec is None:
            if self.nstored == 1:
                c = self.ctx.elem_at(self.data, 0).inverse()
                out = LaurentSeries.monomial(self.ctx, -v, c)
                return out if prec is None else out.truncate(prec)
            if prec is None:
                raise PrecisionError("inverse of an exact non-monomial series needs a precision")
            target = prec
        else:
            target = -v + self.rel_prec
            if prec is not None:
                target = min(target, prec)
        n = target + v
        if n <= 0:
            return LaurentSeries.zero(self.ctx, target)
        unit = self.data[:, :n]
        return LaurentSeries(self.ctx, -v, _inverse_unit(self.ctx, unit, n), target)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inv()

    def __pow__(self, k: int):
        return self.pow(k)

    def pow(self, k: int, prec: int | None = None) -> "LaurentSeries":
        """Integer power, assembled from p-power digits of |k|."""
        if k < 0:
            base = self.inv(prec if self.prec is None and self.nstored > 1 else None)
            return base.pow(-k, prec)
        result = LaurentSeries.one(self.ctx)
        p = self.ctx.p
        m = 0
        while k:
            k, digit = divmod(k, p)
            if digit:
                term = self.char_p_power(m)
                for _ in range(digit):
                    result = result * term
                    if prec is not None:
                        result = result.truncate(prec)
            m += 1
        return result if prec is None else result.truncate(prec)

    def char_p_power(self, m: int, cap: int | None = None) -> "LaurentSeries":
        """The series raised to p^m: coefficients Frobenius-twisted, exponents scaled.

        Known mod u^{p^m * prec}; ``cap`` truncates the result early.
        """
        if m < 0:
            raise DomainError("char_p_power needs m >= 0")
        if m == 0:
            return self if cap is None else self.truncate(cap)
        step = self.ctx.p ** m
        prec = None if self.prec is None else self.prec * step
        if self.is_zero():
            z = LaurentSeries.zero(self.ctx, prec)
            return z if cap is None else z.truncate(cap)
        val = self.val * step
        if cap is not None:
            prec = cap if prec is None else min(prec, cap)
        stored = self.data
        if prec is not None:
            keep = max(0, -(-(prec - val) // step))
            stored = stored[:, :keep]
        if stored.shape[1] == 0:
            return LaurentSeries.zero(self.ctx, prec)
        out = np.zeros((self.ctx.r, (stored.shape[1] - 1) * step + 1), dtype=np.int64)
        out[:, ::step] = self.ctx.frobenius_array(stored, m)
        return LaurentSeries(self.ctx, val, out, prec)

    def frobenius_coeffs(self, m: int) -> "LaurentSeries":
        """Apply x -> x^{p^m} to each coefficient only (exponents fixed)."""
        return LaurentSeries(self.ctx, self.val, self.ctx.frobenius_array(self.data, m), self.prec)

    def agrees(self, other) -> bool:
        """Equality up to the smaller of the two precisions."""
        return (self - self._check(other)).is_zero()

    def embed(self, target: FieldCtx) -> "LaurentSeries":
        return LaurentSeries(target, self.val, embed_array(self.data, self.ctx, target), self.prec)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.ctx is other.ctx and self.val == other.val and self.prec == other.prec
                and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.r, self.val, self.prec, self.data.tobytes()))

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "r": self.ctx.r,
            "val": self.val,
            "prec": self.prec,
            "coeffs": [self.ctx.elem_at(self.data, j).text() for j in range(self.nstored)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentSeries":
        ctx = field(obj["p"], obj["r"])
        coeffs = [ctx.from_text(s) for s in obj["coeffs"]]
        return cls.from_coeffs(ctx, obj["val"], coeffs, obj["prec"])

    def __repr__(self):
        return f"LaurentSeries({self}, F_{self.ctx.q})"

    def __str__(self):
        if self.is_zero():
            return "0" if self.prec is None else f"O(u^{self.prec})"
        terms = []
        for j in range(min(self.nstored, 8)):
            c = self.ctx.elem_at(self.data, j)
            if c.is_zero():
                continue
            k = self.val + j
            cs = str(c)
            if " " in cs:
                cs = f"({cs})"
            mono = "" if k == 0 else f"u^{k}"
            terms.append(cs if not mono else (mono if cs == "1" else f"{cs}*{mono}"))
        if self.nstored > 8:
            terms.append("...")
        if self.prec is not None:
            terms.append(f"O(u^{self.prec})")
        return " + ".join(terms)


def _inverse_unit(ctx: FieldCtx, unit: np.ndarray, n: int) -> np.ndarray:
    """Inverse of c0 + c1 u + ... (c0 != 0) mod u^n by Newton iteration."""
    c0 = ctx.elem_at(unit, 0).inverse()
    b = np.array(c0.coeffs, dtype=np.int64).reshape(ctx.r, 1)
    k = 1
    while k < n:
        k = min(2 * k, n)
        e = ctx.conv(unit[:, :k], b, k)
        e = (-e) % ctx.p
        e[0, 0] = (e[0, 0] + 2) % ctx.p
        b = ctx.conv(b, e, k)
    return b


def ls_arith(op: str, a: LaurentSeries, b=None) -> LaurentSeries:
    """Dispatch add, mul, inv or pow (b an integer exponent)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    if op == "pow":
        return a.pow(b)
    raise DomainError(f"unknown series operation {op!r}")


def ls_char_p_power(a: LaurentSeries, m: int) -> LaurentSeries:
    return a.char_p_power(m)


# -- graded series -----------------------------------------------------------


class GradedSeries:
    """(-theta)^g * mantissa with 0 <= g < 1 and g*(q-1) an integer."""

    __slots__ = ("g", "mantissa")

    def __init__(self, g, mantissa: LaurentSeries):
        g = Fraction(g)
        k = math.floor(g)
        if k:
            # (-theta)^k = (-1)^k u^{-k}
            mantissa = mantissa.shift(-k)
            if k % 2:
                mantissa = -mantissa
            g -= k
        q = mantissa.ctx.q
        if (q - 1) % g.denominator:
            raise AssertionError(f"grading {g} has denominator not dividing {q - 1}")
        self.g = g
        self.mantissa = mantissa

    @property
    def ctx(self) -> FieldCtx:
        return self.mantissa.ctx

    @property
    def prec(self):
        return self.mantissa.prec

    def is_grading_free(self) -> bool:
        return self.g == 0

    def normalize(self) -> "GradedSeries":
        return GradedSeries(self.g, self.mantissa)

    def __mul__(self, other):
        if isinstance(other, GradedSeries):
            return GradedSeries(self.g + other.g, self.mantissa * other.mantissa)
        return GradedSeries(self.g, self.mantissa * other)

    __rmul__ = __mul__

    def _same_grade(self, other) -> "GradedSeries":
        if not isinstance(other, GradedSeries):
            other = GradedSeries(0, self.mantissa._check(other))
        if other.g != self.g:
            if other.mantissa.is_zero():
                return GradedSeries(self.g, LaurentSeries.zero(self.ctx, other.prec))
            if self.mantissa.is_zero():
                return other
            raise DomainError(f"cannot add gradings {self.g} and {other.g}")
        return other

    def __add__(self, other):
        other = self._same_grade(other)
        if self.g != other.g:
            return GradedSeries(other.g, other.mantissa + LaurentSeries.zero(self.ctx, self.prec))
        return GradedSeries(self.g, self.mantissa + other.mantissa)

    __radd__ = __add__

    def __neg__(self):
        return GradedSeries(self.g, -self.mantissa)

    def __sub__(self, other):
        return self + (-other)

    def pow(self, n: int, prec: int | None = None) -> "GradedSeries":
        return GradedSeries(self.g * n, self.mantissa.pow(n, prec))

    __pow__ = pow

    def inv(self) -> "GradedSeries":
        return GradedSeries(-self.g, self.mantissa.inv())

    def twist_forward(self, m: int, cap: int | None = None) -> "GradedSeries":
        """Raise to the p^m: grading g -> p^m g, mantissa -> mantissa^{p^m}."""
        step = self.ctx.p ** m
        G = self.g * step
        k = math.floor(G)
        # the folded (-theta)^k lowers absolute precision by k; widen the cap
        inner_cap = None if cap is None else cap + k
        return GradedSeries(G, self.mantissa.char_p_power(m, cap=inner_cap))

    def truncate(self, prec: int) -> "GradedSeries":
        return GradedSeries(self.g, self.mantissa.truncate(prec))

    def agrees(self, other: "GradedSeries") -> bool:
        return self.g == other.g and self.mantissa.agrees(other.mantissa)

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.g == other.g and self.mantissa == other.mantissa

    def __hash__(self):
        return hash((self.g, self.mantissa))

    def embed(self, target: FieldCtx) -> "GradedSeries":
        return GradedSeries(self.g, self.mantissa.embed(target))

    def to_json(self) -> dict:
        out = self.mantissa.to_json()
        out["g_num"] = self.g.numerator
        out["g_den"] = self.g.denominator
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GradedSeries":
        return cls(Fraction(obj["g_num"], obj["g_den"]), LaurentSeries.from_json(obj))

    def __repr__(self):
        return f"GradedSeries((-theta)^({self.g}) * [{self.mantissa}])"


def graded_ops(op: str, *args):
    """Dispatch normalize, mul, pow, twist_forward, eq on graded series."""
    if op == "normalize":
        return args[0].normalize()
    if op == "mul":
        return args[0] * args[1]
    if op == "pow":
        return args[0].pow(args[1])
    if op == "twist_forward":
        return args[0].twist_forward(args[1])
    if op == "eq":
        return args[0].agrees(args[1])
    raise DomainError(f"unknown graded operation {op!r}")


# -- rational reconstruction -------------------------------------------------

RECONSTRUCTION_MARGIN = 8


def ls_rational_reconstruct(a: LaurentSeries, deg_bound: int, margin: int = RECONSTRUCTION_MARGIN):
    """Recover N/D in F_{p^r}(theta) with deg N, deg D <= deg_bound from a truncation.

    Returns a :class:`ThetaRational`, or ``None`` when no such fraction matches
    the stored coefficients.  Raises :class:`PrecisionError` when the relative
    precision is below ``2*deg_bound + 2 + margin``.
    """
    if a.prec is None:
        raise PrecisionError("reconstruction expects a truncated series")
    ctx = a.ctx
    need = 2 * deg_bound + 2 + margin
    if a.rel_prec < need:
        raise PrecisionError(f"relative precision {a.rel_prec} < {need} needed for degree {deg_bound}")
    if a.is_zero():
        return ThetaRational.from_int(ctx, 0)
    B = deg_bound
    v, P = a.val, a.prec
    # D(theta)*a = sum_j d_j u^{-j} a; the coefficient at u^k is sum_j d_j a_{k+j}.
    # Require it to vanish for k >= 1 (no fractional part) and for k < -B (deg N <= B).
    full_hi = P - 1 - B
    disc_hi = full_hi - margin
    for e in range(B + 1):
        ks = list(range(v - e, -B)) + list(range(1, disc_hi + 1))
        d = _solve_denominator(a, e, ks)
        if d is None:
            continue
        den = ThetaPoly.from_coeffs(ctx, d)
        if den.degree != e:
            continue
        den = den.monic()
        prod = a * LaurentSeries.from_poly(den)
        check = list(range(v - e, -B)) + list(range(1, full_hi + 1))
        if any(not prod.coeff(k).is_zero() for k in check if k < prod.prec):
            return None
        num_coeffs = [prod.coeff(-j) for j in range(B + 1)]
        num = ThetaPoly.from_coeffs(ctx, num_coeffs)
        cand = ThetaRational(num, den)
        if cand.num.degree > B or cand.den.degree > B:
            return None
        if not cand.to_series(P).agrees(a):
            return None
        return cand
    return None


def _solve_denominator(a: LaurentSeries, e: int, ks):
    ctx = a.ctx
    p, r = ctx.p, ctx.r
    if not ks:
        return [ctx.one] + [ctx.zero] * e if e == 0 else None
    basis = [ctx.elem(tuple(int(i == b) for i in range(r))) for b in range(r)]
    lo, hi = min(ks), max(ks) + e + 1
    win = a.window(lo, hi)
    mats = [ctx.scalar_matrix(x) for x in basis]
    # columns: unknown digit b of d_j -> contribution x^b * a_{k+j}
    cols = []
    for j in range(e + 1):
        seg = win[:, [k + j - lo for k in ks]]
        for b in range(r):
            cols.append(((mats[b] @ seg) % p).T.reshape(-1))
    mat = np.array(cols, dtype=np.int64).T
    ns = nullspace_mod_p(mat, p)
    if len(ns) == 0:
        return None
    # prefer a solution with nonzero top coefficient
    for vec in ns[::-1]:
        d = [ctx.elem(tuple(int(x) for x in vec[j * r:(j + 1) * r])) for j in range(e + 1)]
        if not d[e].is_zero():
            return d
    vec = ns[0]
    return [ctx.elem(tuple(int(x) for x in vec[j * r:(j + 1) * r])) for j in range(e + 1)]
