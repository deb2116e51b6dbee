"""Exact arithmetic in small finite fields F_{p^n}, with trace maps,
additive characters and Legendre symbols.

Elements are encoded canonically as integers in [0, q): the little-endian
base-p digits of the encoding are the coefficients of the element in the
power basis of the modulus polynomial.  For n = 1 the encoding is just the
residue itself.  All per-element tables (digits, negation, inverses,
discrete logs, traces) are built lazily, so large prime fields stay cheap
and extension-field tables are only paid for when used.

Scalar work goes through :class:`FieldElement`; bulk work goes through the
``*_v`` methods of :class:`FiniteField`, which operate on numpy arrays of
element encodings.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import (
    BadParameter,
    CompositeModulus,
    FieldMismatch,
    NotPrimeField,
    SizeExceeded,
    ZeroInverse,
)

MAX_FIELD_SIZE = 1 << 20


def is_prime(m: int) -> bool:
    """Deterministic trial-division primality check (fine for m <= 2**20)."""
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (little-endian coefficient tuples)
# ---------------------------------------------------------------------------

def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1] % p
        if lead:
            shift = len(a) - 1 - dm
            for j in range(dm + 1):
                a[shift + j] = (a[shift + j] - lead * m[j]) % p
        a.pop()
    return _poly_trim(a)


def _poly_gcd(a, b, p):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        # make b monic before reducing
        inv_lead = pow(b[-1], p - 2, p)
        bm = tuple((c * inv_lead) % p for c in b)
        a, b = b, _poly_mod(a, bm, p)
    return a


def _poly_powmod_xq(d_steps, modulus, p):
    """Compute X^(p^d_steps) mod modulus by repeated p-th powers."""
    x = (0, 1)
    cur = _poly_mod(x, modulus, p)
    for _ in range(d_steps):
        cur = _poly_powmod(cur, p, modulus, p)
    return cur


def _poly_powmod(base, e, modulus, p):
    result = (1,)
    b = _poly_mod(base, modulus, p)
    while e > 0:
        if e & 1:
            result = _poly_mod(_poly_mul(result, b, p), modulus, p)
        b = _poly_mod(_poly_mul(b, b, p), modulus, p)
        e >>= 1
    return result


def _poly_sub(a, b, p):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return _poly_trim(out)


def _is_irreducible(poly, p):
    """Exhaustive-style irreducibility test: a monic polynomial of degree n
    is irreducible over F_p iff it shares no factor with X^(p^d) - X for any
    d <= n/2 (that product covers all irreducibles of degree <= d)."""
    n = len(poly) - 1
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        xpd = _poly_powmod_xq(d, poly, p)
        g = _poly_gcd(poly, _poly_sub(xpd, (0, 1), p), p)
        if len(g) - 1 >= 1:
            return False
    return True


def _smallest_irreducible(p: int, n: int):
    """Monic irreducible of degree n over F_p with the smallest integer
    encoding of its non-leading coefficients (c_0 + c_1 p + ...)."""
    if n == 1:
        return (0, 1)  # X
    for code in range(p ** n):
        coeffs = []
        c = code
        for _ in range(n):
            coeffs.append(c % p)
            c //= p
        poly = tuple(coeffs) + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise RuntimeError("no irreducible polynomial found (unreachable)")


# ---------------------------------------------------------------------------
# fields and elements
# ---------------------------------------------------------------------------

class FieldElement:
    """An element of a :class:`FiniteField`, identified by its encoding."""

    __slots__ = ("field", "code")

    def __init__(self, field: "FiniteField", code: int):
        self.field = field
        self.code = code

    def coeffs(self) -> tuple[int, ...]:
        """Little-endian coefficients in the power basis."""
        return self.field.decode(self.code)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(
                f"elements of F_{self.field.q} and F_{other.field.q} cannot be mixed"
            )

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.add_code(self.code, other.code))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.sub_code(self.code, other.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_code(self.code))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.mul_code(self.code, other.code))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_code(self.code, e))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv_code(self.code))

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and other.field is self.field
            and other.code == self.code
        )

    def __hash__(self):
        return hash((id(self.field), self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        if self.field.n == 1:
            return f"F{self.field.p}({self.code})"
        return f"F{self.field.q}({self.code}={list(self.coeffs())})"


class FiniteField:
    """F_q with q = p^n, q <= 2**20, over a deterministic modulus polynomial.

    Immutable after construction; lazily built lookup tables are cached on
    the instance and are safe to share across threads (numpy arrays are
    written once).
    """

    def __init__(self, p: int, n: int = 1):
        if n < 1:
            raise BadParameter(f"extension degree must be >= 1, got {n}")
        if not is_prime(p):
            raise CompositeModulus(f"{p} is not prime")
        q = p ** n
        if q > MAX_FIELD_SIZE:
            raise SizeExceeded(f"q = {p}^{n} = {q} exceeds the cap {MAX_FIELD_SIZE}")
        self.p = p
        self.n = n
        self.q = q
        self.modulus = _smallest_irreducible(p, n)
        # lazy tables
        self._digits = None
        self._neg_table = None
        self._inv_table = None
        self._trace_table = None
        self._psi_table = None
        self._exp = None
        self._log = None
        self._basis_traces = self._compute_basis_traces()

    # -- identity / representation ------------------------------------------------

    def __repr__(self):
        return f"FiniteField(p={self.p}, n={self.n})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and other.p == self.p
            and other.n == self.n
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def descriptor(self) -> dict:
        """JSON-ready field descriptor, including the modulus for reproducibility."""
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    # -- encoding ------------------------------------------------------------------

    def decode(self, code: int) -> tuple[int, ...]:
        coeffs = []
        for _ in range(self.n):
            coeffs.append(code % self.p)
            code //= self.p
        return tuple(coeffs)

    def encode(self, coeffs) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + (c % self.p)
        return code

    def element(self, value) -> FieldElement:
        """Make an element from an encoding int, coefficient sequence, or element."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldMismatch("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            if self.n == 1:
                return FieldElement(self, int(value) % self.p)
            if not 0 <= value < self.q:
                raise BadParameter(f"encoding {value} out of range [0, {self.q})")
            return FieldElement(self, int(value))
        return FieldElement(self, self.encode(value))

    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    # -- scalar arithmetic on encodings ---------------------------------------------

    def add_code(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        da, db = self.decode(a), self.decode(b)
        return self.encode((x + y) % self.p for x, y in zip(da, db))

    def sub_code(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a - b) % self.p
        da, db = self.decode(a), self.decode(b)
        return self.encode((x - y) % self.p for x, y in zip(da, db))

    def neg_code(self, a: int) -> int:
        if self.n == 1:
            return (-a) % self.p
        return self.encode((-x) % self.p for x in self.decode(a))

    def mul_code(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return int(self._exp[(int(self._log[a]) + int(self._log[b])) % (self.q - 1)])
        prod = _poly_mul(self.decode(a), self.decode(b), self.p)
        return self.encode(_poly_mod(prod, self.modulus, self.p) + (0,) * self.n)

    def pow_code(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroInverse("0 has no inverse")
            return 1 if e == 0 else 0
        e_red = e % (self.q - 1)
        if self.n == 1:
            return pow(a, e_red, self.p)
        result, base = 1, a
        while e_red > 0:
            if e_red & 1:
                result = self.mul_code(result, base)
            base = self.mul_code(base, base)
            e_red >>= 1
        return result

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return self.pow_code(a, self.q - 2)

    def trace_code(self, a: int) -> int:
        if self.n == 1:
            return a
        return int(sum(c * t for c, t in zip(self.decode(a), self._basis_traces)) % self.p)

    # -- vector arithmetic on numpy arrays of encodings -----------------------------

    @property
    def digits(self) -> np.ndarray:
        """(q, n) int64 array: little-endian base-p digits of every encoding."""
        if self._digits is None:
            codes = np.arange(self.q, dtype=np.int64)
            d = np.empty((self.q, self.n), dtype=np.int64)
            for i in range(self.n):
                d[:, i] = codes % self.p
                codes = codes // self.p
            self._digits = d
        return self._digits

    @property
    def _pows(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    def add_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a + b) % self.p
        return ((self.digits[a] + self.digits[b]) % self.p) @ self._pows

    def sub_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a - b) % self.p
        return ((self.digits[a] - self.digits[b]) % self.p) @ self._pows

    def neg_v(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (-a) % self.p
        if self._neg_table is None:
            self._neg_table = ((-self.digits[np.arange(self.q)]) % self.p) @ self._pows
        return self._neg_table[a]

    def mul_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a * b) % self.p
        exp, log = self._discrete_log_tables()
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_v(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroInverse("0 has no inverse")
        if self.n == 1:
            if self._inv_table is None:
                inv = np.zeros(self.p, dtype=np.int64)
                if self.p > 1:
                    inv[1] = 1
                for i in range(2, self.p):
                    inv[i] = (-(self.p // i) * inv[self.p % i]) % self.p
                self._inv_table = inv
            return self._inv_table[a]
        exp, log = self._discrete_log_tables()
        return exp[(-log[a]) % (self.q - 1)]

    def trace_v(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return a
        if self._trace_table is None:
            tr = np.array(self._basis_traces, dtype=np.int64)
            self._trace_table = (self.digits @ tr) % self.p
        return self._trace_table[a]

    def psi_v(self, a: np.ndarray) -> np.ndarray:
        """Additive character values exp(2*pi*i*Tr(a)/p), vectorized."""
        a = np.asarray(a, dtype=np.int64)
        if self._psi_table is None:
            roots = np.exp(2j * np.pi * np.arange(self.p) / self.p)
            if self.n == 1:
                self._psi_table = roots
            else:
                self._psi_table = roots[self.trace_v(np.arange(self.q))]
        return self._psi_table[a]

    def _discrete_log_tables(self):
        if self._exp is None:
            g = self._find_generator()
            exp = np.zeros(self.q - 1, dtype=np.int64)
            log = np.zeros(self.q, dtype=np.int64)
            cur = 1
            for k in range(self.q - 1):
                exp[k] = cur
                log[cur] = k
                cur = self._mul_code_poly(cur, g)
            self._log = log
            self._exp = exp
        return self._exp, self._log

    def _mul_code_poly(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        prod = _poly_mul(self.decode(a), self.decode(b), self.p)
        red = _poly_mod(prod, self.modulus, self.p)
        return self.encode(red + (0,) * (self.n - len(red)))

    def _find_generator(self) -> int:
        order = self.q - 1
        prime_factors = []
        m = order
        d = 2
        while d * d <= m:
            if m % d == 0:
                prime_factors.append(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            prime_factors.append(m)
        for g in range(2, self.q):
            if all(self.pow_code(g, order // ell) != 1 for ell in prime_factors):
                return g
        return 1  # q = 2: the unit group is trivial

    # -- trace precomputation --------------------------------------------------------

    def _compute_basis_traces(self):
        """Tr(X^i) for i < n, via Frobenius powers of the basis elements."""
        if self.n == 1:
            return (1,)
        traces = []
        for i in range(self.n):
            xi = self.encode((0,) * i + (1,) + (0,) * (self.n - i - 1))
            total = 0
            cur = xi
            for _ in range(self.n):
                total = self.add_code(total, cur)
                cur = self.pow_code(cur, self.p)
            # total lies in the prime subfield: constant coefficient only
            coeffs = self.decode(total)
            assert all(c == 0 for c in coeffs[1:]), "trace landed outside F_p"
            traces.append(coeffs[0])
        return tuple(traces)


_FIELD_CACHE: dict[tuple[int, int], FiniteField] = {}


def make_field(p: int, n: int = 1) -> FiniteField:
    """Return the field F_{p^n}, cached so repeated calls share tables."""
    key = (int(p), int(n))
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FiniteField(*key)
    return _FIELD_CACHE[key]


# ---------------------------------------------------------------------------
# module-level operations on elements
# ---------------------------------------------------------------------------

def trace(x: FieldElement) -> int:
    """Absolute trace Tr_{F_q/F_p}(x) = sum of x^(p^i), as an int in [0, p)."""
    return x.field.trace_code(x.code)


def psi(x: FieldElement) -> complex:
    """Additive character e(Tr(x)/p) where e(z) = exp(2*pi*i*z)."""
    return cmath.exp(2j * math.pi * trace(x) / x.field.p)


def legendre(x: FieldElement) -> int:
    """Legendre symbol on a prime field: 0, +1 (nonzero square) or -1."""
    f = x.field
    if f.n != 1:
        raise NotPrimeField("the Legendre symbol is only defined on prime fields here")
    if f.p == 2:
        return 0 if x.code == 0 else 1
    if x.code == 0:
        return 0
    r = pow(x.code, (f.p - 1) // 2, f.p)
    return 1 if r == 1 else -1


def legendre_table(p: int) -> np.ndarray:
    """Array of Legendre symbols for all residues mod p (index = residue)."""
    if not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    table = np.full(p, -1, dtype=np.int64)
    table[(np.arange(p, dtype=np.int64) ** 2) % p] = 1
    table[0] = 0
    return table


def sqrt_table(p: int) -> np.ndarray:
    """For each quadratic residue r mod p, a fixed square root (the smaller
    of the two); -1 at non-residues and index 0 maps to 0."""
    table = np.full(p, -1, dtype=np.int64)
    ys = np.arange((p - 1) // 2, 0, -1, dtype=np.int64)
    table[(ys * ys) % p] = ys  # ascending y wins: last write is the smallest
    table[0] = 0
    return table


def enumerate_elements(field: FiniteField) -> list[FieldElement]:
    """All q elements in coefficient-lexicographic (encoding) order."""
    return [FieldElement(field, c) for c in range(field.q)]


def int_embedding(x: FieldElement) -> int:
    """The canonical bijection F_p -> {0, ..., p-1} (prime fields only)."""
    if x.field.n != 1:
        raise NotPrimeField("integer embedding is only defined on prime fields")
    return x.code


def element_from_int(field: FiniteField, i: int) -> FieldElement:
    """Inverse of :func:`int_embedding`."""
    if field.n != 1:
        raise NotPrimeField("integer embedding is only defined on prime fields")
    if not 0 <= i < field.p:
        raise BadParameter(f"{i} is not in [0, {field.p})")
    return FieldElement(field, i)
