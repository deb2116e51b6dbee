"""Limit laws, empirical measures, Wasserstein-1 distances, moment checks
and seeded samplers for spectral comparisons.

W1 between a step CDF and an analytic law is computed exactly per segment
from the law's CDF antiderivative, splitting each segment at the crossing
point F(x*) = c; W1 between two discrete measures is the CDF-difference
integral over merged atoms.  All samplers draw from one seeded PCG64
generator with one spawned substream per sampled variable index, so output
is reproducible bit for bit and independent of chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BadParameter, EmptySet, NotPrimeField, BadCongruence
from .expsum import kloosterman_table, salie_table
from .ffield import FiniteField, legendre_table, make_field, sqrt_table
from .spectrum import SpectralMeasure

_GRID_SIZE = 1 << 16


# ---------------------------------------------------------------------------
# empirical measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalMeasure:
    """Sorted atoms with raw counts; weights normalize to total mass 1."""

    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.values) == 0:
            raise EmptySet("empirical measure needs at least one atom")

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @staticmethod
    def from_samples(samples: np.ndarray) -> "EmpiricalMeasure":
        values, counts = np.unique(np.asarray(samples, dtype=np.float64),
                                   return_counts=True)
        return EmpiricalMeasure(values, counts.astype(np.float64))

    @staticmethod
    def from_atoms(values, counts) -> "EmpiricalMeasure":
        values = np.asarray(values, dtype=np.float64)
        counts = np.asarray(counts, dtype=np.float64)
        if np.any(counts <= 0):
            raise BadParameter("atom counts must be positive")
        order = np.argsort(values)
        return EmpiricalMeasure(values[order], counts[order])

    def mean_abs(self) -> float:
        return float(np.sum(np.abs(self.values) * self.weights))

    def expand(self) -> np.ndarray:
        """All atoms repeated by (integral) counts, ascending."""
        return np.repeat(self.values, np.rint(self.counts).astype(np.int64))

    def csv_rows(self):
        yield "value,weight"
        w = self.weights
        for v, wi in zip(self.values, w):
            yield f"{v!r},{wi!r}"


def spectral_to_empirical(measure: SpectralMeasure, exclude_trivial: bool = True) -> EmpiricalMeasure:
    """Eigenvalue measure with weights proportional to multiplicities,
    optionally dropping one copy of the trivial eigenvalue (a no-op when
    the measure already had it removed)."""
    values = measure.values
    counts = measure.mults.astype(np.float64)
    if exclude_trivial and not measure.trivial_excluded:
        i = int(np.argmin(np.abs(values - measure.trivial_value)))
        counts = counts.copy()
        counts[i] -= 1
        keep = counts > 0
        values, counts = values[keep], counts[keep]
    return EmpiricalMeasure(values, counts)


# ---------------------------------------------------------------------------
# limit laws
# ---------------------------------------------------------------------------

class LimitLaw:
    """A probability law on a compact interval, exposing a vectorized CDF
    and/or a seeded sampler.  Subclasses may provide an analytic CDF
    antiderivative; otherwise it is built from a cached cumulative grid."""

    kind: str = "abstract"
    support: tuple[float, float] = (-1.0, 1.0)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} exposes no CDF")

    def density(self, x: np.ndarray) -> Optional[np.ndarray]:
        return None

    def sample(self, size: int, seed: int) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} exposes no sampler")

    def has_cdf(self) -> bool:
        try:
            self.cdf(np.array([self.support[0]]))
            return True
        except NotImplementedError:
            return False

    # -- generic machinery ------------------------------------------------------

    def cdf_antideriv(self, x: np.ndarray) -> np.ndarray:
        """G(x) = int_{lo}^{x} F(t) dt, extended by G(x) = G(hi) + (x - hi)
        above the support; grid-based trapezoid fallback (error ~ (dx)^2)."""
        lo, hi = self.support
        if not hasattr(self, "_grid_G"):
            xs = np.linspace(lo, hi, _GRID_SIZE + 1)
            fs = self.cdf(xs)
            G = np.concatenate([[0.0], np.cumsum((fs[1:] + fs[:-1]) / 2 * np.diff(xs))])
            self._grid_x, self._grid_G = xs, G
        x = np.asarray(x, dtype=np.float64)
        inside = np.interp(np.clip(x, lo, hi), self._grid_x, self._grid_G)
        return inside + np.maximum(x - hi, 0.0)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Generalized inverse CDF by vectorized bisection on the support."""
        u = np.asarray(u, dtype=np.float64)
        lo = np.full(u.shape, self.support[0])
        hi = np.full(u.shape, self.support[1])
        for _ in range(80):
            mid = (lo + hi) / 2
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return (lo + hi) / 2

    def discretize(self, m: int) -> EmpiricalMeasure:
        """m-atom quantile discretization (for two-route W1 cross-checks)."""
        u = (np.arange(m) + 0.5) / m
        return EmpiricalMeasure.from_samples(self.quantile(u))


def semicircle_cdf(x) -> np.ndarray:
    """CDF of the semicircle law (1/pi) sqrt(1 - x^2/4) dx on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    return 0.5 + x * np.sqrt(4.0 - x * x) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi


class SemicircleLaw(LimitLaw):
    kind = "semicircle"
    support = (-2.0, 2.0)

    def cdf(self, x):
        return semicircle_cdf(x)

    def density(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        inside = np.abs(x) <= 2.0
        out[inside] = np.sqrt(1.0 - (x[inside] / 2.0) ** 2) / np.pi
        return out

    def cdf_antideriv(self, x):
        x = np.asarray(x, dtype=np.float64)
        xc = np.clip(x, -2.0, 2.0)
        G = (xc / 2.0
             - (4.0 - xc * xc) ** 1.5 / (12.0 * np.pi)
             + (xc * np.arcsin(xc / 2.0) + np.sqrt(4.0 - xc * xc)) / np.pi)
        return G + np.maximum(x - 2.0, 0.0)

    def sample(self, size, seed):
        return sample_semicircle(size, seed).expand()


def kesten_mckay_density(d: int, x) -> np.ndarray:
    """Density d(d-1) sqrt(4 - x^2) / (2 pi (d^2 - (d-1) x^2)) on [-2, 2]
    (the degree-d tree-graph law, rescaled to the fixed support)."""
    if d < 2:
        raise BadParameter(f"degree must be >= 2, got {d}")
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) <= 2.0
    xi = x[inside]
    out[inside] = d * (d - 1) * np.sqrt(4.0 - xi * xi) / (2 * np.pi * (d * d - (d - 1) * xi * xi))
    return out


class KestenMcKayLaw(LimitLaw):
    kind = "kesten-mckay"
    support = (-2.0, 2.0)

    def __init__(self, d: int):
        if d < 2:
            raise BadParameter(f"degree must be >= 2, got {d}")
        self.d = d

    def density(self, x):
        return kesten_mckay_density(self.d, x)

    def cdf(self, x):
        if not hasattr(self, "_cdf_x"):
            xs = np.linspace(-2.0, 2.0, _GRID_SIZE + 1)
            fs = self.density(xs)
            c = np.concatenate([[0.0], np.cumsum((fs[1:] + fs[:-1]) / 2 * np.diff(xs))])
            c /= c[-1]  # kill residual quadrature mass error (~1e-10)
            self._cdf_x, self._cdf_c = xs, c
        x = np.asarray(x, dtype=np.float64)
        return np.interp(np.clip(x, -2.0, 2.0), self._cdf_x, self._cdf_c)


class SalieModulusLaw(LimitLaw):
    """Law of |SA|: an atom of mass 1/2 at 0 plus the modulus pushforward
    of 2 cos(4 pi x) on [0, 1]."""

    kind = "salie-modulus"
    support = (0.0, 2.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 2.0)
        return 0.5 + (1.0 / np.pi) * np.arcsin(x / 2.0)

    def density(self, x):
        # density away from the atom at 0
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        inside = (x > 0) & (x < 2.0)
        out[inside] = 1.0 / (np.pi * np.sqrt(4.0 - x[inside] ** 2))
        return out

    def sample(self, size, seed):
        rng = np.random.default_rng(seed)
        zero = rng.random(size) < 0.5
        vals = np.abs(2.0 * np.cos(4.0 * np.pi * rng.random(size)))
        return np.where(zero, 0.0, vals)


class KtSeriesLaw(LimitLaw):
    """Signed modulus of the truncated random Fourier series
    sqrt(t) X_0 + (1/sqrt(t)) sum_{0<|h|<=H} (e(ht)-1)/(2 pi i h) X_h
    with independent semicircle coefficients; sampler only."""

    kind = "kt-series"

    def __init__(self, t: float, trunc: Optional[int] = None):
        if not 0 < t <= 1:
            raise BadParameter(f"t must lie in (0, 1], got {t}")
        self.t = t
        self.trunc = trunc if trunc is not None else default_series_truncation(t)
        self.support = (-2.2, 2.2)  # loose; tail controlled by tail_std

    @property
    def tail_std(self) -> float:
        return math.sqrt(2.0 / (math.pi ** 2 * self.trunc * self.t))

    def sample(self, size, seed):
        return sample_kt_limit(self.t, self.trunc, size, seed).expand()


class ScPlusSaLaw(LimitLaw):
    """Signed modulus of SC + SA (independent semicircle and Salie-type
    coordinates), normalized to unit second moment; sampler only."""

    kind = "sc-plus-sa"
    support = (-2.0, 2.0)

    def sample(self, size, seed):
        return sample_sc_plus_sa(size, seed).expand()


def default_series_truncation(t: float, cap: int = 1 << 16) -> int:
    """Truncation making the tail standard deviation about 0.01."""
    return min(cap, int(math.ceil(2e4 / t)))


def make_law(kind: str, **kwargs) -> LimitLaw:
    if kind == "semicircle":
        return SemicircleLaw()
    if kind == "kesten-mckay":
        return KestenMcKayLaw(kwargs["d"])
    if kind == "salie-modulus":
        return SalieModulusLaw()
    if kind == "kt-series":
        return KtSeriesLaw(kwargs["t"], kwargs.get("trunc"))
    if kind == "sc-plus-sa":
        return ScPlusSaLaw()
    raise BadParameter(f"unknown law {kind!r}")


# ---------------------------------------------------------------------------
# Wasserstein distances
# ---------------------------------------------------------------------------

def w1_vs_law(emp: EmpiricalMeasure, law: LimitLaw) -> float:
    """Integral of |F_emp - F_law| over an interval containing both
    supports, evaluated segment-exactly from the law's CDF antiderivative
    (each inter-atom segment split at the crossing F(x*) = c)."""
    lo = min(float(emp.values[0]), law.support[0]) - 1e-12
    hi = max(float(emp.values[-1]), law.support[1]) + 1e-12
    xs = np.concatenate([[lo], emp.values, [hi]])
    cum = np.concatenate([[0.0], np.cumsum(emp.weights)])
    cum[-1] = 1.0
    # segment i spans [xs[i], xs[i+1]] where F_emp = cum[i]
    a, b = xs[:-1], xs[1:]
    c = cum
    Fa, Fb = law.cdf(a), law.cdf(b)
    Ga, Gb = law.cdf_antideriv(a), law.cdf_antideriv(b)
    below = Fb <= c    # law CDF entirely below the step: int = c len - (Gb-Ga)
    above = Fa >= c    # law CDF entirely above the step
    mid = ~(below | above)
    out = np.where(below, c * (b - a) - (Gb - Ga), 0.0)
    out = np.where(above, (Gb - Ga) - c * (b - a), out)
    if np.any(mid):
        xstar = np.clip(law.quantile(c[mid]), a[mid], b[mid])
        Gs = law.cdf_antideriv(xstar)
        left = c[mid] * (xstar - a[mid]) - (Gs - Ga[mid])
        right = (Gb[mid] - Gs) - c[mid] * (b[mid] - xstar)
        out[mid] = left + right
    return float(np.abs(out).sum())


def w1_two_sample(emp1: EmpiricalMeasure, emp2: EmpiricalMeasure) -> float:
    """Integral of |F_1 - F_2| for two discrete measures via merged atoms
    (equals the mean sorted-sample deviation for equal unit-weight sizes)."""
    xs = np.concatenate([emp1.values, emp2.values])
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    w = np.concatenate([emp1.weights, np.zeros(len(emp2.values))])[order]
    v = np.concatenate([np.zeros(len(emp1.values)), emp2.weights])[order]
    f1 = np.cumsum(w)[:-1]
    f2 = np.cumsum(v)[:-1]
    return float(np.sum(np.abs(f1 - f2) * np.diff(xs)))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def moment(emp: EmpiricalMeasure, r: int) -> float:
    """r-th raw moment sum w_i x_i^r."""
    if r < 0:
        raise BadParameter("moment order must be >= 0")
    return float(np.sum(emp.weights * emp.values ** r))


def chebyshev_U(alpha: int, x):
    """U_0 = 1, U_1 = x, U_{a+1} = x U_a - U_{a-1}: the polynomials
    orthonormal for the semicircle law (symmetric-power characters)."""
    if alpha < 0:
        raise BadParameter("alpha must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if alpha == 0:
        return prev
    cur = x.copy()
    for _ in range(alpha - 1):
        prev, cur = cur, x * cur - prev
    return cur


def m4_check(field: FiniteField) -> float:
    """Empirical fourth moment of normalized hyperbola sums over the
    (k^x)^2 grid; equals the class-reduced average since each product
    class m = ab carries exactly q - 1 pairs."""
    if field.n != 1:
        raise NotPrimeField("the fourth-moment check runs on prime fields")
    col = kloosterman_table(field).reduced_column()
    q = field.q
    vals = (col[1:].real / math.sqrt(q)) ** 4
    return float(vals.mean())


def mixed_moment_check(p: int, alpha: int, beta: int) -> tuple[complex, complex]:
    """Grid average of U_alpha(K(a,b)/sqrt p) * (T(a,b)/sqrt p)^beta over
    (a, b) in (F_p^x)^2, returned with the predicted independent limit
    E(U_alpha(SC)) E(SA^beta)."""
    if alpha < 0 or beta < 0:
        raise BadParameter("moment orders must be >= 0")
    field = make_field(int(p))
    if field.p % 4 != 3:
        raise BadCongruence(f"p = {field.p} must be 3 mod 4")
    pp = field.p
    kcol = kloosterman_table(field).reduced_column().real / math.sqrt(pp)
    tcol = salie_table(field).reduced_column() / math.sqrt(pp)
    leg = legendre_table(pp)
    codes = np.arange(1, pp, dtype=np.int64)
    prod = (codes[:, None] * codes[None, :]) % pp
    u_vals = chebyshev_U(alpha, kcol)[prod]
    t_vals = (leg[None, 1:] * tcol[prod]) ** beta
    value = complex((u_vals * t_vals).mean())

    e_u = 1.0 if alpha == 0 else 0.0
    if beta == 0:
        e_sa = complex(1.0)
    elif beta % 2 == 1:
        e_sa = complex(0.0)
    else:
        e_sa = 0.5 * (2j) ** beta * math.comb(beta, beta // 2) / 2 ** beta
    return value, e_u * complex(e_sa)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _semicircle_draws(rng: np.random.Generator, size: int) -> np.ndarray:
    """Rejection sampling from the uniform envelope on [-2, 2]
    (acceptance rate pi/4)."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = int((size - filled) * 1.35) + 16
        x = 4.0 * rng.random(m) - 2.0
        u = rng.random(m)
        acc = x[u * u <= 1.0 - x * x / 4.0]
        take = min(len(acc), size - filled)
        out[filled:filled + take] = acc[:take]
        filled += take
    return out


def sample_semicircle(n: int, seed: int) -> EmpiricalMeasure:
    """n i.i.d. semicircle draws, deterministic in the seed."""
    if n < 1:
        raise BadParameter("need at least one sample")
    rng = np.random.default_rng(seed)
    return EmpiricalMeasure.from_samples(_semicircle_draws(rng, n))


def series_coefficient(h: int, t: float) -> complex:
    """(e(ht) - 1) / (2 pi i h), exactly zero when h t is an integer."""
    if h == 0:
        raise BadParameter("h = 0 has no series coefficient")
    ht = h * t
    if ht == round(ht):
        return 0j
    return (np.exp(2j * np.pi * ht) - 1.0) / (2j * np.pi * h)


def sample_kt_limit(t: float, trunc: int, n: int, seed: int) -> EmpiricalMeasure:
    """n draws of the signed modulus of the truncated series
    sqrt(t) X_0 + (1/sqrt t) sum_{0<|h|<=trunc} c_h X_h with independent
    semicircle X_h and a fair sign; one substream per variable index
    (order: sign, X_0, X_1, X_{-1}, X_2, ...).  The neglected tail has
    variance at most 2 / (pi^2 trunc t)."""
    if not 0 < t <= 1:
        raise BadParameter(f"t must lie in (0, 1], got {t}")
    if trunc < 1:
        raise BadParameter("truncation must be >= 1")
    if n < 1:
        raise BadParameter("need at least one sample")
    streams = np.random.default_rng(seed).spawn(2 + 2 * trunc)
    eps = np.where(streams[0].random(n) < 0.5, -1.0, 1.0)
    acc = np.zeros(n, dtype=np.complex128)
    acc += math.sqrt(t) * _semicircle_draws(streams[1], n)
    scale = 1.0 / math.sqrt(t)
    for h in range(1, trunc + 1):
        c = series_coefficient(h, t)
        if c == 0:
            continue  # substream indices stay tied to h regardless
        acc += (scale * c) * _semicircle_draws(streams[2 * h], n)
        acc += (scale * np.conj(c)) * _semicircle_draws(streams[2 * h + 1], n)
    return EmpiricalMeasure.from_samples(eps * np.abs(acc))


def sample_sc_plus_sa(n: int, seed: int) -> EmpiricalMeasure:
    """n draws of eps * sqrt((SC^2 + |SA|^2) / 2): the signed modulus of
    SC + SA with SC semicircle and SA zero half the time, else a point of
    modulus |2 cos(4 pi U)| on the imaginary axis.  The 1/sqrt(2) brings
    the second moment to 1, matching spectra normalized by sqrt(|S|)
    (whose mean squared eigenvalue is exactly 1)."""
    if n < 1:
        raise BadParameter("need at least one sample")
    streams = np.random.default_rng(seed).spawn(4)
    eps = np.where(streams[0].random(n) < 0.5, -1.0, 1.0)
    sc = _semicircle_draws(streams[1], n)
    sa_zero = streams[2].random(n) < 0.5
    sa_mod = np.abs(2.0 * np.cos(4.0 * np.pi * streams[3].random(n)))
    sa_mod = np.where(sa_zero, 0.0, sa_mod)
    return EmpiricalMeasure.from_samples(eps * np.sqrt((sc * sc + sa_mod * sa_mod) / 2.0))
