"""Carlitz module special functions and values over F_q[theta], q = p^r.

Everything is expanded in u = 1/theta.  Products such as
``L_i = prod_{j=1}^{i} (theta - theta^{q^j})`` are written as a monomial times a
unit ``prod (1 - u^e)`` so they can be formed to any *relative* precision with
a handful of shifted subtractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
import itertools
import math

import numpy as np

from .errors import ConvergenceError, DomainError
from .ffq import FieldCtx, field
from .poly import ThetaPoly, ThetaRational
from .series import GradedSeries, LaurentSeries
from .tate import TateSeries

DEFAULT_P = 200
DEFAULT_T = 16
BERNOULLI_ORDER_BOUND = 64


def _q_sum(q: int, i: int) -> int:
    """q + q^2 + ... + q^i."""
    return sum(q ** j for j in range(1, i + 1))


def base_digits(n: int, base: int) -> list:
    digits = []
    while n:
        n, d = divmod(n, base)
        digits.append(d)
    return digits


# -- array kernels (F_p digits, exponents 0..R-1) -----------------------------

def _unit_product(exps, R: int, inverse=()) -> np.ndarray:
    """prod (1 - u^e) over ``exps`` times prod (1 - u^e)^{-1} over ``inverse``, mod u^R."""
    a = np.zeros(max(R, 0), dtype=np.int64)
    if R <= 0:
        return a
    a[0] = 1
    for e in exps:
        if 0 < e < R:
            a[e:] -= a[:R - e].copy()
    for e in inverse:
        if 0 < e < R:
            # 1/(1 - u^e): each block picks up the previous one
            for start in range(e, R, e):
                stop = min(start + e, R)
                a[start:stop] += a[start - e:stop - e]
    return a


def _tpoly_product(factors, T: int, R: int) -> np.ndarray:
    """Coefficients of prod (1 - t u^e)^m as a (T, R) digit array, mod (t^T, u^R)."""
    c = np.zeros((T, max(R, 0)), dtype=np.int64)
    if R <= 0:
        return c
    c[0, 0] = 1
    for e, m in factors:
        if e >= R:
            continue
        if m > 0:
            for _ in range(m):
                for k in range(T - 1, 0, -1):
                    c[k, e:] -= c[k - 1, :R - e]
        else:
            for _ in range(-m):
                for k in range(1, T):
                    c[k, e:] += c[k - 1, :R - e]
    return c


def _min_exponent_sum(q: int, n: int, k: int) -> int:
    """Least sum of k exponents drawn from q, q^2, ... with each used at most n times."""
    full, rest = divmod(k, n)
    return n * sum(q ** j for j in range(1, full + 1)) + rest * q ** (full + 1)


def _from_digits(ctx: FieldCtx, val: int, digits: np.ndarray, prec) -> LaurentSeries:
    """Embed an F_p digit row as a series with coefficients in the prime field."""
    data = np.zeros((ctx.r, len(digits)), dtype=np.int64)
    data[0] = digits
    return LaurentSeries(ctx, val, data, prec)


# -- the context -------------------------------------------------------------

@dataclass
class CarlitzCtx:
    """The Carlitz module over F_{p^r} together with working precisions."""

    p: int
    r: int = 1
    P: int = DEFAULT_P
    T: int = DEFAULT_T
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.P < 1 or self.T < 1:
            raise DomainError("precisions P and T must be at least 1")
        self.ctx = field(self.p, self.r)
        self.q = self.ctx.q

    def with_precision(self, P: int | None = None, T: int | None = None) -> "CarlitzCtx":
        return CarlitzCtx(self.p, self.r, P or self.P, T or self.T)

    # -- exact polynomials ---------------------------------------------------

    def D(self, i: int) -> ThetaPoly:
        if i < 0:
            raise DomainError("D_i needs i >= 0")
        key = ("D", i)
        if key not in self._cache:
            th = ThetaPoly.theta(self.ctx)
            out = ThetaPoly.constant(self.ctx)
            for j in range(i):
                out = out * (th ** (self.q ** i) - th ** (self.q ** j))
            self._cache[key] = out
        return self._cache[key]

    def L(self, i: int) -> ThetaPoly:
        if i < 0:
            raise DomainError("L_i needs i >= 0")
        key = ("L", i)
        if key not in self._cache:
            th = ThetaPoly.theta(self.ctx)
            out = ThetaPoly.constant(self.ctx)
            for j in range(1, i + 1):
                out = out * (th - th ** (self.q ** j))
            self._cache[key] = out
        return self._cache[key]

    def gamma(self, n: int) -> ThetaPoly:
        """Carlitz factorial Gamma_{n+1} = prod D_i^{n_i} over base-q digits of n."""
        if n < 0:
            raise DomainError("Gamma needs n >= 0")
        out = ThetaPoly.constant(self.ctx)
        for i, d in enumerate(base_digits(n, self.q)):
            if d:
                out = out * self.D(i) ** d
        return out

    def d_l_gamma(self, kind: str, i: int) -> ThetaRational:
        table = {"D": self.D, "L": self.L, "Gamma": self.gamma}
        if kind not in table:
            raise DomainError(f"kind must be one of D, L, Gamma (got {kind!r})")
        return ThetaRational(table[kind](i))

    # -- series forms of D_i and L_i --------------------------------------------

    def L_series(self, i: int, rel: int) -> LaurentSeries:
        """L_i = (-1)^i u^{-Q_i} prod_{m=1}^{i} (1 - u^{q^m - 1}), relative precision ``rel``."""
        q = self.q
        unit = _unit_product([q ** m - 1 for m in range(1, i + 1)], rel)
        s = _from_digits(self.ctx, -_q_sum(q, i), unit, -_q_sum(q, i) + rel)
        return -s if i % 2 else s

    def D_series(self, i: int, rel: int) -> LaurentSeries:
        """D_i = u^{-i q^i} prod_{j<i} (1 - u^{q^i - q^j}), relative precision ``rel``."""
        q = self.q
        v = -i * q ** i
        unit = _unit_product([q ** i - q ** j for j in range(i)], rel)
        return _from_digits(self.ctx, v, unit, v + rel)

    # -- exp / log ---------------------------------------------------------------

    def _check_series(self, z: LaurentSeries) -> LaurentSeries:
        if not isinstance(z, LaurentSeries):
            raise DomainError("expected a LaurentSeries")
        if z.ctx is not self.ctx:
            z = z.embed(self.ctx) if self.ctx.r % z.ctx.r == 0 and z.ctx.p == self.p else None
            if z is None:
                raise DomainError("series lives over an incompatible field")
        return z

    def exp(self, z: LaurentSeries) -> LaurentSeries:
        z = self._check_series(z)
        P, q = self.P, self.q
        if z.is_zero():
            return LaurentSeries.zero(self.ctx, P)
        v = z.val
        acc = LaurentSeries.zero(self.ctx, P)
        i = 0
        while True:
            tv = q ** i * (v + i)
            if tv >= P and v + i >= 0:
                break
            if tv < P:
                rel = P - tv
                term = z.char_p_power(self.r * i, cap=P - i * q ** i) * self.D_series(i, rel).inv()
                acc = acc + term.truncate(P)
            i += 1
        return acc

    def log(self, z: LaurentSeries) -> LaurentSeries:
        z = self._check_series(z)
        P, q = self.P, self.q
        if z.is_zero():
            return LaurentSeries.zero(self.ctx, P)
        v = z.val
        if v * (q - 1) <= -q:
            raise ConvergenceError(f"log needs val(z)*(q-1) > -q, got val(z) = {v}")
        acc = LaurentSeries.zero(self.ctx, P)
        i = 0
        while True:
            tv = q ** i * v + _q_sum(q, i)
            if tv >= P:
                break
            rel = P - tv
            term = z.char_p_power(self.r * i, cap=P - _q_sum(q, i)) * self.L_series(i, rel).inv()
            acc = acc + term.truncate(P)
            i += 1
        return acc

    def carlitz_exp_log(self, kind: str, z: LaurentSeries) -> LaurentSeries:
        if kind == "exp":
            return self.exp(z)
        if kind == "log":
            return self.log(z)
        raise DomainError(f"kind must be exp or log (got {kind!r})")

    # -- Bernoulli-Carlitz numbers -------------------------------------------------

    def _z_over_exp(self, n: int) -> list:
        """Coefficients c_0..c_n of z / exp(z), computed formally in z."""
        cs = self._cache.setdefault("z/exp", [ThetaRational.from_int(self.ctx, 1)])
        zero = ThetaRational.from_int(self.ctx, 0)
        q = self.q
        while len(cs) <= n:
            m = len(cs)
            acc = zero
            i = 1
            while q ** i - 1 <= m:
                prev = cs[m - (q ** i - 1)]
                if not prev.is_zero():
                    acc = acc - prev / ThetaRational(self.D(i))
                i += 1
            cs.append(acc)
        return cs

    def bernoulli_carlitz(self, n: int) -> ThetaRational:
        """B_n with z/exp(z) = sum (B_n / Gamma_{n+1}) z^n."""
        if n < 0:
            raise DomainError("Bernoulli-Carlitz index must be >= 0")
        if n >= BERNOULLI_ORDER_BOUND:
            raise DomainError(f"n must be below the formal order bound {BERNOULLI_ORDER_BOUND}")
        c = self._z_over_exp(n)[n]
        return c * ThetaRational(self.gamma(n))

    # -- zeta values ---------------------------------------------------------------

    def zeta_block(self, d: int, n: int) -> LaurentSeries:
        """S_d(n) = sum of a^{-n} over monic a of degree d, mod u^P.

        Uses the generating function sum_n S_d(n) z^{n-1} = 1/(L_d - E_d(z)) where
        E_d(z) = z + sum_{i=1}^{d} beta_i z^{q^i} and beta_i = L_d / (D_i L_{d-i}^{q^i}).
        """
        if d == 0:
            return LaurentSeries.one(self.ctx, self.P)
        P, q = self.P, self.q
        Qd = _q_sum(q, d)
        if max(n * d, Qd) >= P:
            return LaurentSeries.zero(self.ctx, P)
        R = P - Qd
        Ld = self.L_series(d, R)
        Lc_inv = Ld.inv()
        betas = {}
        i = 1
        while i <= d and q ** i <= n - 1:
            den = self.D_series(i, R) * self.L_series(d - i, R).char_p_power(self.r * i)
            betas[q ** i] = (Ld * den.inv()).truncate(P)
            i += 1
        c = [Lc_inv.truncate(P)]
        for k in range(1, n):
            s = c[k - 1]
            for e, b in betas.items():
                if e <= k:
                    s = s + b * c[k - e]
            c.append((s * Lc_inv).truncate(P))
        return c[n - 1]

    def zeta_block_enumerate(self, d: int, n: int) -> LaurentSeries:
        """The same block by summing over every monic polynomial (small cases only)."""
        P = self.P
        acc = LaurentSeries.zero(self.ctx, P)
        for low in itertools.product(self.ctx.elements(), repeat=d):
            a = ThetaPoly.from_coeffs(self.ctx, list(low) + [self.ctx.one])
            acc = acc + LaurentSeries.from_poly(a ** n).inv(P)
        return acc

    def zeta(self, n: int) -> LaurentSeries:
        if n < 1:
            raise DomainError("zeta needs n >= 1")
        key = ("zeta", n)
        if key not in self._cache:
            acc = LaurentSeries.zero(self.ctx, self.P)
            d = 0
            while max(n * d, _q_sum(self.q, d)) < self.P:
                acc = acc + self.zeta_block(d, n)
                d += 1
            self._cache[key] = acc
        return self._cache[key]

    # -- periods -------------------------------------------------------------------

    def pi_tilde(self) -> GradedSeries:
        """theta (-theta)^{1/(q-1)} prod_{i>=1} (1 - u^{q^i - 1})^{-1}."""
        q, P = self.q, self.P
        g = Fraction(1, q - 1)
        k = math.floor(g)
        R = P + 1 + k
        exps = []
        while q ** (len(exps) + 1) - 1 < R:
            exps.append(q ** (len(exps) + 1) - 1)
        unit = _unit_product([], R, inverse=exps)
        mant = _from_digits(self.ctx, -1, unit, -1 + R)
        return GradedSeries(g, mant).truncate(P)

    def pi_tilde_power(self, n: int) -> GradedSeries:
        """pi~^n with the mantissa still certified mod u^P."""
        # each factor has valuation >= -2, so n factors cost at most 2(n-1) digits
        W = self.with_precision(P=self.P + 2 * max(n - 1, 0))
        return W.pi_tilde().pow(n).truncate(self.P)

    def omega_power(self, n: int = 1) -> TateSeries:
        """Omega^n = (-theta)^{-nq/(q-1)} prod_{i>=1} (1 - t u^{q^i})^n to (T, P)."""
        q, P, T = self.q, self.P, self.T
        G = Fraction(-n * q, q - 1)
        k = math.floor(G)
        R = P + k
        facs = []
        while q ** (len(facs) + 1) < R:
            facs.append((q ** (len(facs) + 1), n))
        rows = _tpoly_product(facs, T, R)
        coeffs = [_from_digits(self.ctx, 0, rows[j], R) for j in range(T)]
        tail = _min_exponent_sum(q, n, T) - T - k
        return TateSeries(self.ctx, G, coeffs, tail).truncate(P)

    def omega(self) -> TateSeries:
        return self.omega_power(1)

    # -- polylogarithms -------------------------------------------------------------

    def _alpha(self, alpha) -> ThetaRational:
        if isinstance(alpha, int):
            alpha = ThetaRational.from_int(self.ctx, alpha)
        if not isinstance(alpha, ThetaRational):
            raise DomainError("alpha must be a ThetaRational")
        if alpha.ctx is not self.ctx:
            alpha = alpha.embed(self.ctx)
        return alpha

    def _check_plog_domain(self, n: int, alpha: ThetaRational):
        if n < 1:
            raise DomainError("polylog weight n must be >= 1")
        v = alpha.valuation()
        if v * (self.q - 1) <= -n * self.q:
            raise ConvergenceError(
                f"polylog of weight {n} needs val(alpha)*(q-1) > -n q, got val = {v}")
        return v

    def plog(self, n: int, alpha) -> LaurentSeries:
        """sum_i alpha^{q^i} / L_i^n, mod u^P."""
        alpha = self._alpha(alpha)
        P, q = self.P, self.q
        if alpha.is_zero():
            return LaurentSeries.zero(self.ctx, P)
        v = self._check_plog_domain(n, alpha)
        a = alpha.to_series(P)
        acc = LaurentSeries.zero(self.ctx, P)
        i = 0
        while True:
            tv = q ** i * v + n * _q_sum(q, i)
            if tv >= P:
                break
            rel = P - tv
            Li = self.L_series(i, rel).pow(n).inv()
            term = a.char_p_power(self.r * i, cap=P - n * _q_sum(q, i)) * Li
            acc = acc + term.truncate(P)
            i += 1
        return acc

    def l_alpha_series(self, n: int, alpha) -> TateSeries:
        """alpha + sum_{i>=1} alpha^{q^i} / prod_{j=1}^{i} (t - theta^{q^j})^n to (T, P)."""
        alpha = self._alpha(alpha)
        P, q, T = self.P, self.q, self.T
        if alpha.is_zero():
            return TateSeries.zero(self.ctx, T)
        v = self._check_plog_domain(n, alpha)
        a = alpha.to_series(P)
        coeffs = [a] + [LaurentSeries.zero(self.ctx, P) for _ in range(T - 1)]
        i = 1
        while True:
            Qi = _q_sum(q, i)
            tv = q ** i * v + n * Qi
            if tv >= P:
                break
            R = P - tv
            # (t - theta^{q^j})^{-n} = (-1)^n u^{n q^j} (1 - t u^{q^j})^{-n}
            rows = _tpoly_product([(q ** j, -n) for j in range(1, i + 1)], T, R)
            ai = a.char_p_power(self.r * i, cap=P - n * Qi).shift(n * Qi)
            if (n * i) % 2:
                ai = -ai
            for k in range(T):
                if rows[k].any():
                    coeffs[k] = coeffs[k] + (ai * _from_digits(self.ctx, 0, rows[k], R)).truncate(P)
            i += 1
        tail = q * (v + n) + T * (q - 1)
        return TateSeries(self.ctx, 0, coeffs, tail)


def carlitz_ctx(p: int, r: int = 1, P: int = DEFAULT_P, T: int = DEFAULT_T) -> CarlitzCtx:
    return CarlitzCtx(p, r, P, T)


def d_l_gamma(C: CarlitzCtx, kind: str, i: int) -> ThetaRational:
    return C.d_l_gamma(kind, i)


def carlitz_exp_log(C: CarlitzCtx, kind: str, z: LaurentSeries) -> LaurentSeries:
    return C.carlitz_exp_log(kind, z)


def bernoulli_carlitz(C: CarlitzCtx, n: int) -> ThetaRational:
    return C.bernoulli_carlitz(n)


def zeta(C: CarlitzCtx, n: int) -> LaurentSeries:
    return C.zeta(n)


def pi_tilde(C: CarlitzCtx) -> GradedSeries:
    return C.pi_tilde()


def omega(C: CarlitzCtx) -> TateSeries:
    return C.omega()


def plog(C: CarlitzCtx, n: int, alpha) -> LaurentSeries:
    return C.plog(n, alpha)


def l_alpha_series(C: CarlitzCtx, n: int, alpha) -> TateSeries:
    return C.l_alpha_series(n, alpha)
