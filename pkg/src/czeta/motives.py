"""Difference-equation blocks (Phi, Psi) and their verification in forward form.

A block encodes Psi^{(-s)} = Phi Psi.  Inverse twists leave F_q(theta), so the
identity is always checked as Psi = Phi^{(s)} Psi^{(s)}.  Entries of Phi are
kept symbolically as sums of products of *factors* ``(obj, shift)`` meaning
``obj^{(shift)}`` where ``obj`` is a ThetaRational or a t-polynomial (tuple of
ThetaRational coefficients).  Shifts may be negative; a matrix is only turned
into numbers once every shift is >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
import math

from .carlitz import CarlitzCtx
from .errors import DomainError, EmbeddingError, PrecisionError
from .ffq import FieldCtx, field
from .poly import ThetaRational
from .series import LaurentSeries
from .tate import TateSeries


# -- symbolic Phi entries ---------------------------------------------------------

def _tpoly_mul(a: tuple, b: tuple) -> tuple:
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            term = x * y
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return tuple(out)


def _tpoly_add(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        if i >= len(a):
            out.append(b[i])
        elif i >= len(b):
            out.append(a[i])
        else:
            out.append(a[i] + b[i])
    return tuple(out)


class PhiEntry:
    """A sum of products of twisted factors; the empty sum is a structural zero."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms = tuple(tuple(t) for t in terms)

    @classmethod
    def factor(cls, obj, shift: int = 0) -> "PhiEntry":
        return cls([[(obj, shift)]])

    @classmethod
    def product(cls, *factors) -> "PhiEntry":
        return cls([list(factors)])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PhiEntry") -> "PhiEntry":
        return PhiEntry(self.terms + other.terms)

    def __mul__(self, other: "PhiEntry") -> "PhiEntry":
        return PhiEntry([a + b for a in self.terms for b in other.terms])

    def twist(self, m: int) -> "PhiEntry":
        return PhiEntry([[(obj, s + m) for obj, s in term] for term in self.terms])

    def embed(self, target: FieldCtx) -> "PhiEntry":
        def emb(obj):
            if isinstance(obj, ThetaRational):
                return obj.embed(target)
            return tuple(c.embed(target) for c in obj)
        return PhiEntry([[(emb(obj), s) for obj, s in term] for term in self.terms])

    def min_shift(self) -> int | None:
        shifts = [s for term in self.terms for _, s in term]
        return min(shifts) if shifts else None

    def materialize(self, ctx: FieldCtx) -> tuple:
        """t-polynomial (tuple of ThetaRational) once all shifts are >= 0."""
        total = None
        for term in self.terms:
            acc = (ThetaRational.from_int(ctx, 1),)
            for obj, s in term:
                if s < 0:
                    raise DomainError(f"cannot materialize an inverse twist (shift {s})")
                if isinstance(obj, ThetaRational):
                    acc = tuple(c * obj.twist(s) for c in acc)
                else:
                    acc = _tpoly_mul(acc, tuple(c.twist(s) for c in obj))
            total = acc if total is None else _tpoly_add(total, acc)
        if total is None:
            return ()
        return total


def sym_matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = PhiEntry()
            for x in range(k):
                if A[i][x].is_zero() or B[x][j].is_zero():
                    continue
                acc = acc + A[i][x] * B[x][j]
            row.append(acc)
        out.append(row)
    return out


def sym_twist(A, m: int):
    return [[e.twist(m) for e in row] for row in A]


def materialize(A, ctx: FieldCtx):
    return [[e.materialize(ctx) for e in row] for row in A]


def _t_minus(ctx: FieldCtx, k: int = 1) -> tuple:
    """The t-polynomial t - theta^k."""
    return (-ThetaRational.theta_power(ctx, k), ThetaRational.from_int(ctx, 1))


def _tpoly_pow(a: tuple, n: int) -> tuple:
    out = (ThetaRational.from_int(a[0].ctx, 1),)
    for _ in range(n):
        out = _tpoly_mul(out, a)
    return out


# -- blocks --------------------------------------------------------------------

@dataclass
class MotiveBlock:
    """Psi^{(-step)} = Phi Psi with Phi symbolic and Psi a matrix of TateSeries (None = 0)."""

    ctx: FieldCtx
    step: int
    phi: list
    psi: list
    labels: dict = dc_field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.phi)

    def forward_phi(self):
        """Phi^{(step)} as a matrix of t-polynomials with ThetaRational coefficients."""
        return materialize(sym_twist(self.phi, self.step), self.ctx)

    def det_phi(self, forward: bool = False) -> tuple:
        """Determinant of Phi (triangular blocks only), as a t-polynomial.

        With ``forward`` the determinant of Phi^{(step)} is returned instead; it
        is nonzero exactly when det Phi is, and exists even when Phi carries
        inverse twists (derived blocks).
        """
        n = self.size
        for i in range(n):
            for j in range(i + 1, n):
                if not self.phi[i][j].is_zero():
                    raise DomainError("det_phi is only implemented for lower-triangular Phi")
        diag = PhiEntry.factor(ThetaRational.from_int(self.ctx, 1))
        for i in range(n):
            diag = diag * self.phi[i][i]
        if forward:
            diag = diag.twist(self.step)
        if diag.min_shift() is not None and diag.min_shift() < 0:
            raise DomainError("diagonal entries carry inverse twists; use forward=True")
        return diag.materialize(self.ctx)

    def with_psi(self, psi) -> "MotiveBlock":
        return MotiveBlock(self.ctx, self.step, self.phi, psi, dict(self.labels))


def _one_ts(ctx, T, P):
    return TateSeries.constant(LaurentSeries.one(ctx, P), T)


def carlitz_motive(C: CarlitzCtx) -> MotiveBlock:
    ctx = C.ctx
    phi = [[PhiEntry.factor(_t_minus(ctx))]]
    psi = [[C.omega()]]
    return MotiveBlock(ctx, C.r, phi, psi, {"kind": "carlitz", "p": C.p, "r": C.r, "n": 1, "alphas": []})


def build_block(C: CarlitzCtx, n: int, alphas) -> MotiveBlock:
    """The polylog block: first column (t-theta)^n, alpha_i^{(-r)} (t-theta)^n; identity elsewhere."""
    ctx = C.ctx
    alphas = [C._alpha(a) for a in alphas]
    if n < 1:
        raise DomainError("block weight n must be >= 1")
    labels = {"kind": "polylog", "p": C.p, "r": C.r, "n": n, "alphas": [str(a) for a in alphas]}
    if C.p == 2 and C.r == 1:
        block = carlitz_motive(C)
        block.labels.update(labels, kind="carlitz-degenerate")
        return block
    vmin = min([a.valuation() for a in alphas if not a.is_zero()] + [0])
    for a in alphas:
        if not a.is_zero():
            C._check_plog_domain(n, a)
    # a little headroom so that Omega^n * L_alpha still reaches P
    W = C.with_precision(P=C.P + max(0, -vmin) * C.q + 2)
    m = len(alphas)
    base = PhiEntry.factor(_tpoly_pow(_t_minus(ctx), n))
    zero = PhiEntry()
    phi = [[base] + [zero] * m]
    for i, a in enumerate(alphas):
        row = [PhiEntry.product((a, -C.r), (_tpoly_pow(_t_minus(ctx), n), 0))]
        row += [PhiEntry.factor(ThetaRational.from_int(ctx, 1)) if j == i else zero for j in range(m)]
        phi.append(row)
    om = W.omega_power(n)
    psi = [[om.truncate(C.P)] + [None] * m]
    for i, a in enumerate(alphas):
        row = [(om * W.l_alpha_series(n, a)).truncate(C.P)]
        row += [_one_ts(ctx, C.T, C.P) if j == i else None for j in range(m)]
        psi.append(row)
    return MotiveBlock(ctx, C.r, phi, psi, labels)


def derived_forward_phi(block: MotiveBlock, ell: int):
    """Phi'^{(ell)} = Phi^{(s)} Phi^{(2s)} ... Phi^{(ell)}, materialized."""
    return materialize(sym_twist(derived_phi(block, ell), ell), block.ctx)


def derived_phi(block: MotiveBlock, ell: int):
    """The symbolic derived matrix Phi' = Phi^{(-(ell-s))} ... Phi^{(-s)} Phi."""
    s = block.step
    if ell % s:
        raise DomainError(f"step {s} does not divide {ell}")
    out = block.phi
    for k in range(1, ell // s):
        out = sym_matmul(sym_twist(block.phi, -k * s), out)
    return out


def derived_block(block: MotiveBlock, ell: int) -> MotiveBlock:
    labels = dict(block.labels, derived_step=ell)
    return MotiveBlock(block.ctx, ell, derived_phi(block, ell), block.psi, labels)


def direct_sum(blocks) -> MotiveBlock:
    if not blocks:
        raise DomainError("direct_sum needs at least one block")
    p = blocks[0].ctx.p
    if any(b.ctx.p != p for b in blocks):
        raise EmbeddingError("blocks live in different characteristics")
    ell = math.lcm(*[b.step for b in blocks])
    target = field(p, ell)
    for b in blocks:
        if ell % b.ctx.r:
            raise EmbeddingError(f"F_{b.ctx.q} does not embed in F_{target.q}")
    n = sum(b.size for b in blocks)
    phi = [[PhiEntry() for _ in range(n)] for _ in range(n)]
    psi = [[None] * n for _ in range(n)]
    off = 0
    for b in blocks:
        d = derived_phi(b, ell)
        for i in range(b.size):
            for j in range(b.size):
                phi[off + i][off + j] = d[i][j].embed(target)
                e = b.psi[i][j]
                psi[off + i][off + j] = None if e is None else e.embed(target)
        off += b.size
    labels = {"kind": "direct-sum", "step": ell, "summands": [b.labels for b in blocks]}
    return MotiveBlock(target, ell, phi, psi, labels)


# -- verification ------------------------------------------------------------------

@dataclass
class VerificationReport:
    identity: str
    T: int
    P: int
    passed: bool
    entries: list = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)

    @property
    def residual(self):
        """Smallest nonzero residual order over all entries, or None if all vanish."""
        orders = [e["residual_order"] for e in self.entries if e["residual_order"] is not None]
        return min(orders) if orders else None

    def to_json(self) -> dict:
        out = {"identity": self.identity, "T": self.T, "P": self.P, "pass": self.passed,
               "entries": self.entries}
        if self.details:
            out["details"] = self.details
        return out


def _theta_degree(tpoly: tuple) -> int:
    degs = [-c.valuation() for c in tpoly if not c.is_zero()]
    return max(degs + [0])


def verify_sigma_equation(block: MotiveBlock, T: int | None = None, P: int | None = None,
                          identity: str | None = None) -> VerificationReport:
    """Residual Psi - Phi^{(s)} Psi^{(s)} entrywise, compared mod (t^T, u^P)."""
    n = block.size
    if len(block.psi) != n or any(len(row) != n for row in block.psi) or any(len(row) != n for row in block.phi):
        raise DomainError("Phi and Psi shapes do not match")
    ctx = block.ctx
    present = [e for row in block.psi for e in row if e is not None]
    if not present:
        raise DomainError("Psi has no entries")
    if T is None:
        T = min(e.tdeg for e in present)
    if P is None:
        P = min(c.prec for e in present for c in e.coeffs if c.prec is not None)
    fphi = block.forward_phi()
    cap = P + max(_theta_degree(x) for row in fphi for x in row)
    twisted = [[None if e is None else e.twist_forward(block.step, cap=cap) for e in row]
               for row in block.psi]
    entries = []
    ok = True
    for i in range(n):
        for j in range(n):
            acc = block.psi[i][j]
            acc = TateSeries.zero(ctx, T) if acc is None else acc.truncate(P, T)
            for k in range(n):
                if not fphi[i][k] or twisted[k][j] is None:
                    continue
                f = TateSeries.from_tpoly(ctx, list(fphi[i][k]), T, cap)
                acc = acc - f * twisted[k][j]
            acc = acc.truncate(P, T)
            certified = min([c.prec for c in acc.coeffs if c.prec is not None] + [P])
            order = acc.max_residual_order()
            entry_ok = order is None and certified >= P
            ok = ok and entry_ok
            entries.append({"i": i, "j": j, "residual_order": order, "certified": certified})
    name = identity or f"sigma-equation[{block.labels.get('kind', 'block')}]"
    return VerificationReport(name, T, P, ok, entries, {"labels": block.labels, "step": block.step})


def corrupt_psi(block: MotiveBlock, i: int, j: int, tpow: int, order: int) -> MotiveBlock:
    """A copy of the block with u^order added to the t^tpow coefficient of Psi[i][j]."""
    psi = [list(row) for row in block.psi]
    e = psi[i][j]
    if e is None:
        raise DomainError("cannot corrupt a structural zero")
    coeffs = list(e.coeffs)
    bump = LaurentSeries.monomial(block.ctx, order, 1, coeffs[tpow].prec)
    if bump.is_zero():
        raise PrecisionError("perturbation lies beyond the stored precision")
    coeffs[tpow] = coeffs[tpow] + bump
    psi[i][j] = TateSeries(block.ctx, e.g, coeffs, e.tail)
    return block.with_psi(psi)
