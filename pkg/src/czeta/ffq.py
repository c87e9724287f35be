"""Finite fields F_{p^r} in a fixed polynomial basis over F_p.

An element is a vector of ``r`` digits in ``[0, p)``, little-endian in the
generator ``u`` (the class of ``x`` modulo the defining polynomial).  Besides
the scalar type :class:`FqElem`, the context exposes vectorised kernels that
act on ``(r, n)`` digit arrays; the series and polynomial layers store their
coefficients that way so that products reduce to integer convolutions.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import ContextMismatchError, EmbeddingError, NotInvertibleError, DomainError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- dense F_p[x] helpers (lists, little-endian); used only at construction --

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, m, p)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(f, p: int) -> bool:
    """Irreducibility of a polynomial over F_p given as little-endian coefficients.

    Uses gcd(x^{p^i} - x, f) = 1 for every i <= deg(f)/2.
    """
    f = _trim(list(f))
    deg = len(f) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    xp = [0, 1]
    for _ in range(deg // 2):
        # xp <- xp^p mod f
        acc = [1]
        for _ in range(p):
            acc = _pmulmod(acc, xp, f, p)
        xp = acc
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


def least_irreducible(p: int, r: int) -> tuple:
    """Lexicographically least monic irreducible of degree r over F_p.

    Returned as the tuple (c_0, ..., c_{r-1}) of non-leading coefficients;
    candidates are ordered lexicographically on that tuple.
    """
    for low in itertools.product(range(p), repeat=r):
        if is_irreducible(list(low) + [1], p):
            return tuple(low)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldCtx:
    """The field F_{p^r} together with its vectorised arithmetic kernels.

    Build instances through :func:`field`, which caches one context per (p, r)
    so that identity comparison is enough to detect mismatched operands.
    """

    def __init__(self, p: int, r: int):
        if not is_prime(p):
            raise DomainError(f"p={p} is not prime")
        if r < 1:
            raise DomainError(f"r={r} must be positive")
        self.p = p
        self.r = r
        self.q = p ** r
        self.modulus = least_irreducible(p, r)
        if not is_irreducible(list(self.modulus) + [1], p):
            raise AssertionError("modulus is reducible")  # pragma: no cover
        # x^r = -sum c_j x^j
        self._red = np.array([(-c) % p for c in self.modulus], dtype=np.int64)
        self._frob = {}
        self.zero = FqElem(self, (0,) * r)
        self.one = FqElem(self, (1,) + (0,) * (r - 1))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, r={self.r})"

    def __reduce__(self):
        return (field, (self.p, self.r))

    # -- element constructors ------------------------------------------------

    def elem(self, value) -> "FqElem":
        """Build an element from an int (F_p scalar), a digit sequence or text."""
        if isinstance(value, FqElem):
            if value.ctx is not self:
                raise ContextMismatchError("element belongs to another field")
            return value
        if isinstance(value, (int, np.integer)):
            return FqElem(self, (int(value) % self.p,) + (0,) * (self.r - 1))
        if isinstance(value, str):
            return self.from_text(value)
        digits = [int(c) % self.p for c in value]
        if len(digits) > self.r:
            raise DomainError(f"too many digits for F_{self.q}")
        return FqElem(self, tuple(digits) + (0,) * (self.r - len(digits)))

    def from_index(self, k: int) -> "FqElem":
        digits = []
        for _ in range(self.r):
            k, d = divmod(k, self.p)
            digits.append(d)
        return FqElem(self, tuple(digits))

    def from_text(self, text: str) -> "FqElem":
        parts = [int(s) for s in text.split(",")]
        if len(parts) != self.r or any(not 0 <= d < self.p for d in parts):
            raise DomainError(f"bad element text {text!r} for F_{self.q}")
        return FqElem(self, tuple(parts))

    def elements(self):
        """All field elements, ordered by index (base-p digits, little-endian)."""
        return [self.from_index(k) for k in range(self.q)]

    @property
    def gen(self) -> "FqElem":
        if self.r == 1:
            return self.elem(-self.modulus[0])
        return FqElem(self, (0, 1) + (0,) * (self.r - 2))

    # -- kernels on (r, n) digit arrays ----------------------------------------

    def reduce(self, c: np.ndarray) -> np.ndarray:
        """Reduce a (k, n) array of polynomial-in-u digit rows to (r, n)."""
        p, r = self.p, self.r
        c = c % p
        k = c.shape[0]
        if k <= r:
            if k == r:
                return c
            out = np.zeros((r, c.shape[1]), dtype=np.int64)
            out[:k] = c
            return out
        c = c.copy()
        for top in range(k - 1, r - 1, -1):
            row = c[top]
            if row.any():
                base = top - r
                c[base:top] = (c[base:top] + np.outer(self._red, row)) % p
        return c[:r]

    def conv(self, a: np.ndarray, b: np.ndarray, n: int | None = None) -> np.ndarray:
        """Product of two coefficient arrays, truncated to n columns."""
        la, lb = a.shape[1], b.shape[1]
        if la == 0 or lb == 0:
            return np.zeros((self.r, 0 if n is None else n), dtype=np.int64)
        full = la + lb - 1
        if n is None:
            n = full
        a = a[:, :n]
        b = b[:, :n]
        p, r = self.p, self.r
        if r == 1:
            out = _convolve(a[0], b[0], n) % p
            return out.reshape(1, -1)
        acc = np.zeros((2 * r - 1, n), dtype=np.int64)
        for i in range(r):
            if not a[i].any():
                continue
            for j in range(r):
                if b[j].any():
                    acc[i + j] += _convolve(a[i], b[j], n)
            acc %= p
        return self.reduce(acc)

    def scalar_matrix(self, x: "FqElem") -> np.ndarray:
        """Matrix of multiplication by x acting on digit columns."""
        cols = []
        e = self.one
        for _ in range(self.r):
            cols.append((x * e).coeffs)
            e = e * self.gen if self.r > 1 else e
        return np.array(cols, dtype=np.int64).T

    def scale(self, x: "FqElem", a: np.ndarray) -> np.ndarray:
        if self.r == 1:
            return (a * x.coeffs[0]) % self.p
        return (self.scalar_matrix(x) @ a) % self.p

    def frobenius_matrix(self, m: int) -> np.ndarray:
        """Matrix of x -> x^{p^m} on digit columns (m taken modulo r)."""
        m %= self.r
        if m not in self._frob:
            basis = [FqElem(self, tuple(int(i == j) for i in range(self.r))) for j in range(self.r)]
            cols = [fq_frobenius(e, m).coeffs for e in basis]
            self._frob[m] = np.array(cols, dtype=np.int64).T
        return self._frob[m]

    def frobenius_array(self, a: np.ndarray, m: int) -> np.ndarray:
        if self.r == 1 or m % self.r == 0:
            return a
        return (self.frobenius_matrix(m) @ a) % self.p

    def column(self, x: "FqElem") -> np.ndarray:
        return np.array(x.coeffs, dtype=np.int64).reshape(self.r, 1)

    def elem_at(self, a: np.ndarray, j: int) -> "FqElem":
        return FqElem(self, tuple(int(d) for d in a[:, j]))


def _convolve(x, y, n):
    # np.convolve is exact on int64; inputs are digits < p so sums stay tiny
    if len(x) > n:
        x = x[:n]
    if len(y) > n:
        y = y[:n]
    out = np.convolve(x, y)
    if len(out) >= n:
        return out[:n]
    return np.concatenate([out, np.zeros(n - len(out), dtype=np.int64)])


@lru_cache(maxsize=None)
def field(p: int, r: int = 1) -> FieldCtx:
    """The (cached) context for F_{p^r}."""
    return FieldCtx(p, r)


class FqElem:
    """An element of F_{p^r}; immutable, hashable."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, FqElem):
            other = self.ctx.elem(other)
        if other.ctx is not self.ctx:
            raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.ctx.p
        return FqElem(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FqElem(self.ctx, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        ctx = self.ctx
        p, r = ctx.p, ctx.r
        if r == 1:
            return FqElem(ctx, ((self.coeffs[0] * other.coeffs[0]) % p,))
        prod = [0] * (2 * r - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        red = ctx._red
        for top in range(2 * r - 2, r - 1, -1):
            c = prod[top] % p
            if c:
                for j in range(r):
                    prod[top - r + j] += c * int(red[j])
        return FqElem(ctx, tuple(x % p for x in prod[:r]))

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if not any(self.coeffs):
            raise NotInvertibleError("inverse of zero in F_%d" % self.ctx.q)
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.ctx.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.ctx.elem(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.r, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def index(self) -> int:
        k = 0
        for d in reversed(self.coeffs):
            k = k * self.ctx.p + d
        return k

    def text(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self):
        return f"FqElem({self.text()} in F_{self.ctx.q})"

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                mono = "" if j == 0 else ("u" if j == 1 else f"u^{j}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(terms) if terms else "0"

    def frobenius(self, m: int = 1) -> "FqElem":
        return fq_frobenius(self, m)


def fq_arith(op: str, x: FqElem, y: FqElem | None = None) -> FqElem:
    """Dispatch one of add, mul, inv, neg."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "neg":
        return -x
    raise DomainError(f"unknown field operation {op!r}")


def fq_frobenius(x: FqElem, m: int) -> FqElem:
    """x^{p^m}; negative m inverts Frobenius using its order r."""
    ctx = x.ctx
    m %= ctx.r
    return x ** (ctx.p ** m) if m else x


@lru_cache(maxsize=None)
def _embedding(p: int, r: int, ell: int):
    src, dst = field(p, r), field(p, ell)
    if ell % r:
        raise EmbeddingError(f"F_{p}^{r} does not embed in F_{p}^{ell}")
    if r == ell:
        return np.eye(r, dtype=np.int64)
    modulus = list(src.modulus) + [1]
    best = None
    for digits in itertools.product(range(p), repeat=ell):
        z = FqElem(dst, digits)
        acc = dst.zero
        for c in reversed(modulus):
            acc = acc * z + c
        if acc.is_zero():
            best = z
            break
    if best is None:
        raise EmbeddingError(f"no root of the F_{p}^{r} modulus in F_{p}^{ell}")  # pragma: no cover
    cols = []
    power = dst.one
    for _ in range(r):
        cols.append(power.coeffs)
        power = power * best
    return np.array(cols, dtype=np.int64).T


def embedding_matrix(src: FieldCtx, dst: FieldCtx) -> np.ndarray:
    """(ell x r) matrix sending source digit columns to target digit columns."""
    if src.p != dst.p:
        raise EmbeddingError("different characteristics")
    if dst.r % src.r:
        raise EmbeddingError(f"degree {src.r} does not divide {dst.r}")
    return _embedding(src.p, src.r, dst.r)


def fq_embed(x: FqElem, target: FieldCtx) -> FqElem:
    """Image of x under the fixed embedding F_{p^r} -> F_{p^ell}."""
    mat = embedding_matrix(x.ctx, target)
    col = (mat @ np.array(x.coeffs, dtype=np.int64)) % target.p
    return FqElem(target, tuple(int(c) for c in col))


def embed_array(a: np.ndarray, src: FieldCtx, dst: FieldCtx) -> np.ndarray:
    if src is dst:
        return a
    return (embedding_matrix(src, dst) @ a) % dst.p
