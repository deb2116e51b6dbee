"""Complete and partial exponential sums over finite fields.

Provides naive O(q) reference evaluation of Kloosterman sums
K(a,b) = sum_{x != 0} psi(ax + b/x), Birch sums B(a,b) = sum_x psi(ax + bx^3)
and Salie sums T(a,b) = sum_{x != 0} (x|p) psi(ax + b/x), together with
batch table construction.  Prime-field tables go through length-p discrete
Fourier transforms (numpy's pocketfft handles arbitrary lengths in
O(p log p) via Bluestein), so full tables stay cheap up to p ~ 10^5;
extension fields fall back to vectorized naive evaluation.

Conventions: K and B are real; T is purely imaginary for (a, b) != (0, 0)
when p = 3 (mod 4).  For b = 0 the Salie sum degenerates to a quadratic
Gauss sum, T(a, 0) = (a|p) i sqrt(p); this is forced by the definition as
a Legendre-weighted sum and is what the closed-form evaluator returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadCongruence, BadParameter, NotPrimeField, SizeExceeded
from .ffield import (
    FieldElement,
    FiniteField,
    legendre_table,
    make_field,
    sqrt_table,
)
from .sidon import kt_range_bound

MAX_NAIVE_TABLE_Q = 1 << 12


def _code(field: FiniteField, x) -> int:
    if isinstance(x, FieldElement):
        if x.field is not field:
            raise BadParameter("element from a different field")
        return x.code
    return int(x) % field.q if field.n == 1 else int(x)


def _as_prime_field(p) -> FiniteField:
    field = p if isinstance(p, FiniteField) else make_field(int(p))
    if field.n != 1:
        raise NotPrimeField("this sum is only defined over prime fields")
    return field


# ---------------------------------------------------------------------------
# naive scalar evaluators
# ---------------------------------------------------------------------------

def kloosterman(a, b, field: FiniteField) -> complex:
    """K(a, b) = sum over x in k^x of psi(a x + b x^{-1})."""
    ca, cb = _code(field, a), _code(field, b)
    xs = np.arange(1, field.q, dtype=np.int64)
    inv = field.inv_v(xs)
    arg = field.add_v(field.mul_v(np.full_like(xs, ca), xs),
                      field.mul_v(np.full_like(xs, cb), inv))
    return complex(field.psi_v(arg).sum())


def birch(a, b, field: FiniteField) -> complex:
    """B(a, b) = sum over all x in k of psi(a x + b x^3)."""
    ca, cb = _code(field, a), _code(field, b)
    xs = np.arange(field.q, dtype=np.int64)
    cubes = field.mul_v(field.mul_v(xs, xs), xs)
    arg = field.add_v(field.mul_v(np.full_like(xs, ca), xs),
                      field.mul_v(np.full_like(xs, cb), cubes))
    return complex(field.psi_v(arg).sum())


def salie(a, b, p) -> complex:
    """T(a, b) = sum over x in F_p^x of (x|p) psi(a x + b x^{-1})."""
    field = _as_prime_field(p)
    ca, cb = _code(field, a), _code(field, b)
    xs = np.arange(1, field.p, dtype=np.int64)
    inv = field.inv_v(xs)
    leg = legendre_table(field.p)[xs]
    arg = (ca * xs + cb * inv) % field.p
    return complex((leg * field.psi_v(arg)).sum())


def salie_closed_form(a, b, p) -> complex:
    """Closed-form Salie evaluation for p = 3 (mod 4), (a, b) != (0, 0):
    0 at non-residue products, 2 i sqrt(p) (b|p) cos(4 pi y / p) when
    ab = y^2 != 0, and the Gauss-sum value (.|p) i sqrt(p) on the axes."""
    field = _as_prime_field(p)
    pp = field.p
    if pp % 4 != 3:
        raise BadCongruence(f"closed form requires p = 3 mod 4, got {pp}")
    ca, cb = _code(field, a), _code(field, b)
    if ca == 0 and cb == 0:
        return 0j
    leg = legendre_table(pp)
    root_p = math.sqrt(pp)
    if ca == 0 or cb == 0:
        sym = leg[cb] if ca == 0 else leg[ca]
        return complex(0, sym * root_p)
    m = (ca * cb) % pp
    if leg[m] == -1:
        return 0j
    y = int(sqrt_table(pp)[m])
    return complex(0, 2 * root_p * leg[cb] * math.cos(4 * math.pi * y / pp))


def partial_kloosterman(a, b, p, t: float) -> complex:
    """Sum of psi(a x + b x^{-1}) over integer representatives
    1 <= x <= floor(t (p - 1))."""
    field = _as_prime_field(p)
    if not 0 < t <= 1:
        raise BadParameter(f"t must lie in (0, 1], got {t}")
    ca, cb = _code(field, a), _code(field, b)
    m = kt_range_bound(field.p, t)
    xs = np.arange(1, m + 1, dtype=np.int64)
    if len(xs) == 0:
        return 0j
    inv = field.inv_v(xs)
    arg = (ca * xs + cb * inv) % field.p
    return complex(field.psi_v(arg).sum())


# ---------------------------------------------------------------------------
# batch tables
# ---------------------------------------------------------------------------

@dataclass
class SumTable:
    """Dense table of an exponential-sum family over one field.

    Kloosterman and Salie tables are stored in reduced form: a single
    column indexed by the product m = a b determines every entry.  Birch
    and partial-hyperbola tables store the full (q, q) grid.
    """

    field: FiniteField
    kind: str  # "K" | "B" | "T" | "Kt"
    t: Optional[float] = None
    _col: Optional[np.ndarray] = None
    _grid: Optional[np.ndarray] = None

    def value(self, a, b) -> complex:
        ca, cb = _code(self.field, a), _code(self.field, b)
        if self._grid is not None:
            return complex(self._grid[ca, cb])
        q = self.field.q
        if self.kind == "K":
            if ca == 0 and cb == 0:
                return complex(q - 1)
            return complex(self._col[self.field.mul_code(ca, cb)])
        if self.kind == "T":
            leg = legendre_table(self.field.p)
            if ca == 0 and cb == 0:
                return 0j
            if cb == 0:  # T(a, 0): Gauss sum, equals (a|p) * T(0,1) by symmetry
                return complex(int(leg[ca]) * self._col[0])
            return complex(int(leg[cb]) * self._col[(ca * cb) % q])
        raise BadParameter(f"unknown table kind {self.kind}")

    def reduced_column(self) -> np.ndarray:
        if self._col is None:
            raise BadParameter(f"{self.kind} tables are not column-reduced")
        return self._col

    def grid(self) -> np.ndarray:
        """Materialize the full (q, q) array of values."""
        if self._grid is not None:
            return self._grid
        q = self.field.q
        codes = np.arange(q, dtype=np.int64)
        if self.kind == "K":
            prod = self.field.mul_v(codes[:, None], codes[None, :])
            out = self._col[prod]
            out[0, 0] = q - 1
            return out
        if self.kind == "T":
            leg = legendre_table(self.field.p)
            prod = (codes[:, None] * codes[None, :]) % q
            out = leg[None, :] * self._col[prod]
            # b = 0 column: Gauss sums (a|p) i sqrt(p); a = b = 0 entry is 0
            out[:, 0] = leg * complex(self._col[0])
            out[0, 0] = 0
            return out
        raise BadParameter(f"unknown table kind {self.kind}")

    def max_abs_nontrivial(self) -> float:
        """max |value| over (a, b) != (0, 0)."""
        if self._grid is not None:
            g = np.abs(self._grid).copy()
            g[0, 0] = 0.0
            return float(g.max())
        if self.kind == "K":
            return float(np.abs(self._col).max())
        if self.kind == "T":
            return float(np.abs(self._col).max())
        raise BadParameter(f"unknown table kind {self.kind}")

    def csv_rows(self, reduced: bool = False):
        """Yield CSV rows 'a,b,re,im' (or 'm,re,im' for reduced columns)."""
        if reduced:
            col = self.reduced_column()
            for m, z in enumerate(col):
                yield f"{m},{z.real!r},{z.imag!r}"
            return
        g = self.grid()
        q = self.field.q
        for a in range(q):
            for b in range(q):
                z = g[a, b]
                yield f"{a},{b},{z.real!r},{z.imag!r}"


def kloosterman_table(field: FiniteField) -> SumTable:
    """All Kloosterman sums of a field at once.

    Prime fields: one length-p inverse DFT of x -> psi(x^{-1}) (zero at
    x = 0) yields the reduced column m -> K(m, 1); the multiplicative
    reduction K(a, b) = K(ab, 1) then determines the grid.  Extension
    fields (q <= 2^12): vectorized naive evaluation of the column.
    """
    q = field.q
    if field.n == 1:
        f = np.zeros(q, dtype=np.complex128)
        xs = np.arange(1, q, dtype=np.int64)
        f[xs] = field.psi_v(field.inv_v(xs))
        col = q * np.fft.ifft(f)
        return SumTable(field, "K", _col=col)
    if q > MAX_NAIVE_TABLE_Q:
        raise SizeExceeded(f"naive extension-field table capped at q = {MAX_NAIVE_TABLE_Q}")
    xs = np.arange(1, q, dtype=np.int64)
    inv = field.inv_v(xs)
    ms = np.arange(q, dtype=np.int64)
    prod = field.mul_v(ms[:, None], xs[None, :])
    arg = field.add_v(prod, inv[None, :])
    col = field.psi_v(arg).sum(axis=1)
    return SumTable(field, "K", _col=col)


def birch_table(field: FiniteField) -> SumTable:
    """All Birch sums of a field.  Prime fields: one batched inverse DFT
    per column b of x -> psi(b x^3) (all columns in a single call);
    extension fields: vectorized naive evaluation (q <= 2^12)."""
    q = field.q
    if field.n == 1:
        xs = np.arange(q, dtype=np.int64)
        cubes = (xs * xs % q) * xs % q
        bs = np.arange(q, dtype=np.int64)
        g = field.psi_v((cubes[:, None] * bs[None, :]) % q)  # g[x, b]
        grid_t = q * np.fft.ifft(g, axis=0)  # [a, b]
        return SumTable(field, "B", _grid=grid_t)
    if q > MAX_NAIVE_TABLE_Q:
        raise SizeExceeded(f"naive extension-field table capped at q = {MAX_NAIVE_TABLE_Q}")
    xs = np.arange(q, dtype=np.int64)
    cubes = field.mul_v(field.mul_v(xs, xs), xs)
    codes = np.arange(q, dtype=np.int64)
    ax = field.mul_v(codes[:, None], xs[None, :])  # [a, x]
    grid = np.empty((q, q), dtype=np.complex128)
    for b in range(q):
        bx3 = field.mul_v(np.full(q, b, dtype=np.int64), cubes)
        grid[:, b] = field.psi_v(field.add_v(ax, bx3[None, :])).sum(axis=1)
    return SumTable(field, "B", _grid=grid)


def salie_table(p) -> SumTable:
    """All Salie sums mod p via one length-p inverse DFT of the
    Legendre-weighted kernel; T(a, b) = (b|p) T(ab, 1) for b != 0."""
    field = _as_prime_field(p)
    q = field.p
    h = np.zeros(q, dtype=np.complex128)
    xs = np.arange(1, q, dtype=np.int64)
    h[xs] = legendre_table(q)[xs] * field.psi_v(field.inv_v(xs))
    col = q * np.fft.ifft(h)  # col[m] = T(m, 1); col[0] = T(0, 1) = Gauss sum
    return SumTable(field, "T", _col=col)


def partial_kloosterman_table(p, t: float) -> SumTable:
    """Full grid of partial Kloosterman sums: one inverse DFT per column b
    of the truncated kernel x -> psi(b x^{-1}) on 1 <= x <= floor(t(p-1))."""
    field = _as_prime_field(p)
    if not 0 < t <= 1:
        raise BadParameter(f"t must lie in (0, 1], got {t}")
    q = field.p
    m = kt_range_bound(q, t)
    xs = np.arange(1, m + 1, dtype=np.int64)
    inv = field.inv_v(xs) if len(xs) else xs
    bs = np.arange(q, dtype=np.int64)
    g = np.zeros((q, q), dtype=np.complex128)  # g[x, b]
    g[xs[:, None], np.broadcast_to(bs, (len(xs), q))] = field.psi_v(
        (inv[:, None] * bs[None, :]) % q
    )
    grid_t = q * np.fft.ifft(g, axis=0)
    return SumTable(field, "Kt", t=t, _grid=grid_t)
