"""Exact spectra of Cayley sum graphs from additive character sums.

For an abelian group G and connection set S, each real character chi
contributes the eigenvalue sum_{s in S} chi(s), and each conjugate pair of
non-real characters contributes +|S(chi)| and -|S(chi)|.  Over G = k x k
the full table of character sums is an inverse FFT of the 0/1 indicator of
S over the additive group (a 2D transform for prime fields, a
(p, ..., p)-shaped transform for extensions; the extension-field labels
differ from the (a, b) parametrization by an invertible relabeling that
preserves the trivial character, realness and conjugation, hence the
spectrum).  A dense numeric eigensolver provides an independent oracle for
small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BadParameter, EmptySet, SizeExceeded, WrongFamily
from .expsum import kloosterman_table
from .ffield import FiniteField
from .sidon import FAMILY_KLOOSTERMAN, SumSet
from .cayley import CayleySumGraph

MAX_SPECTRUM_ENTRIES = 1 << 22
MAX_DENSE_ORACLE = 4096


@dataclass(frozen=True)
class SpectralMeasure:
    """Aggregated eigenvalues of one graph: ascending distinct values with
    integer multiplicities summing to q^2 (minus one if the trivial
    eigenvalue was excluded).  `norm` records the divisor already applied
    to the values (1.0 for a raw spectrum)."""

    values: np.ndarray
    mults: np.ndarray
    trivial_value: float
    field: FiniteField
    family: str
    sum_size: int
    loops: int
    norm: float = 1.0
    trivial_excluded: bool = False

    @property
    def total_mass(self) -> int:
        return int(self.mults.sum())

    def power_sum(self, r: int) -> float:
        return float(np.sum(self.mults * self.values ** r))

    def max_nontrivial_abs(self) -> float:
        """Largest |eigenvalue| after discounting one copy of the trivial one."""
        vals, mults = self.values, self.mults
        if self.trivial_excluded:
            return float(np.abs(vals).max())
        best = 0.0
        idx_triv = int(np.argmin(np.abs(vals - self.trivial_value)))
        for i in range(len(vals)):
            m = mults[i] - (1 if i == idx_triv else 0)
            if m > 0:
                best = max(best, abs(float(vals[i])))
        return best

    def expand(self) -> np.ndarray:
        """All eigenvalues with multiplicity, ascending."""
        return np.repeat(self.values, self.mults)

    def csv_rows(self):
        label = "normalized" if self.norm != 1.0 else "eigenvalue"
        yield f"{label},multiplicity"
        for v, m in zip(self.values, self.mults):
            yield f"{v!r},{int(m)}"

    def meta(self) -> dict:
        return {
            "family": self.family,
            "field": self.field.descriptor(),
            "q": self.field.q,
            "sum_size": self.sum_size,
            "loops": self.loops,
            "trivial": self.trivial_value,
            "trivial_excluded": self.trivial_excluded,
            "norm": self.norm,
            "distinct_values": int(len(self.values)),
        }


def _aggregate(values: np.ndarray, mults: np.ndarray, tol: float):
    """Group sorted values closer than tol, multiplicity-weighted means."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    m = mults[order]
    if len(v) == 0:
        return v, m
    starts = np.concatenate([[0], np.nonzero(np.diff(v) > tol)[0] + 1])
    out_m = np.add.reduceat(m, starts)
    out_v = np.add.reduceat(v * m, starts) / out_m
    return out_v, out_m.astype(np.int64)


def character_sum_table(sum_set: SumSet) -> np.ndarray:
    """Flat array of the q^2 character sums S(chi), indexed by character
    labels compatible with the encoding group structure: label 0 is the
    trivial character and label negation is character conjugation."""
    field = sum_set.field
    q = field.q
    if q * q > MAX_SPECTRUM_ENTRIES:
        raise SizeExceeded(f"q^2 = {q * q} exceeds the spectrum cap")
    ind = np.zeros(q * q, dtype=np.float64)
    ind[sum_set.u_codes() * q + sum_set.v_codes()] = 1.0
    if field.n == 1:
        table = (q * q) * np.fft.ifft2(ind.reshape(q, q))
    else:
        shape = (field.p,) * (2 * field.n)
        table = (q * q) * np.fft.ifftn(ind.reshape(shape))
    return table.ravel()


def spectrum_from_characters(sum_set: SumSet) -> SpectralMeasure:
    """Exact spectrum of the Cayley sum graph of S via character sums."""
    field = sum_set.field
    q = field.q
    table = character_sum_table(sum_set)
    size = len(sum_set)
    tol = 1e-7 * max(1.0, np.sqrt(q))

    codes = np.arange(q, dtype=np.int64)
    neg = field.neg_v(codes)
    neg_flat = (neg[:, None] * q + neg[None, :]).ravel()
    idx = np.arange(q * q, dtype=np.int64)

    if field.p == 2:
        real_mask = np.ones(q * q, dtype=bool)
    else:
        real_mask = idx == neg_flat

    # non-real conjugate pairs, one representative each
    rep_mask = (~real_mask) & (idx < neg_flat)
    pair_abs = np.abs(table[rep_mask])
    imag_bound = 1e-9 * max(1.0, np.sqrt(q)) * max(1, size)
    real_vals = table[real_mask]
    if np.abs(real_vals.imag).max(initial=0.0) > imag_bound:
        raise BadParameter("real-character sums acquired a large imaginary part")

    pos_v, pos_m = _aggregate(pair_abs, np.ones(len(pair_abs), dtype=np.int64), tol)
    # exact +/- mirror for conjugate pairs keeps the trace cancellation exact
    vals = np.concatenate([-pos_v[::-1], pos_v, real_vals.real])
    mults = np.concatenate([pos_m[::-1], pos_m, np.ones(len(real_vals), dtype=np.int64)])
    out_v, out_m = _aggregate(vals, mults, tol)

    graph = CayleySumGraph(sum_set)
    return SpectralMeasure(
        values=out_v,
        mults=out_m,
        trivial_value=float(size),
        field=field,
        family=sum_set.family,
        sum_size=size,
        loops=graph.loop_count(),
    )


def spectrum_dense_oracle(graph: CayleySumGraph) -> np.ndarray:
    """Sorted eigenvalues of the materialized adjacency matrix (an
    independent numeric check of the character route; n <= 4096)."""
    if graph.n > MAX_DENSE_ORACLE:
        raise SizeExceeded(f"dense oracle capped at {MAX_DENSE_ORACLE} vertices")
    return np.linalg.eigvalsh(graph.adjacency_matrix())


def normalized_spectrum(measure: SpectralMeasure, exclude_trivial: bool = True) -> SpectralMeasure:
    """Divide all eigenvalues by sqrt(|S|), optionally removing one copy
    of the trivial eigenvalue."""
    if measure.sum_size == 0:
        raise EmptySet("cannot normalize the spectrum of an empty connection set")
    if measure.norm != 1.0:
        raise BadParameter("spectrum is already normalized")
    c = float(np.sqrt(measure.sum_size))
    values = measure.values / c
    mults = measure.mults.copy()
    trivial = measure.trivial_value / c
    excluded = measure.trivial_excluded
    if exclude_trivial and not excluded:
        i = int(np.argmin(np.abs(values - trivial)))
        if mults[i] <= 0:
            raise BadParameter("trivial eigenvalue not present")
        mults[i] -= 1
        if mults[i] == 0:
            values = np.delete(values, i)
            mults = np.delete(mults, i)
        excluded = True
    return replace(measure, values=values, mults=mults, trivial_value=trivial,
                   norm=c, trivial_excluded=excluded)


@dataclass(frozen=True)
class ClassMultiplicity:
    m_code: int
    value: float  # |K(m,1)| / norm
    mult_plus: int
    mult_minus: int

    @property
    def combined(self) -> int:
        return self.mult_plus + self.mult_minus


def multiplicity_by_product_class(measure: SpectralMeasure) -> list[ClassMultiplicity]:
    """Per product class m = ab of the hyperbola family, the measured
    multiplicities of the eigenvalues +-|K(m, 1)|; each signed value
    carries at least (q-1)/2 and each class at least q-1 combined."""
    if measure.family != FAMILY_KLOOSTERMAN:
        raise WrongFamily(f"product classes need the hyperbola family, got {measure.family}")
    field = measure.field
    if field.q % 2 == 0:
        raise WrongFamily("product-class report requires odd q")
    col = kloosterman_table(field).reduced_column()
    tol = 1e-6 * max(1.0, np.sqrt(field.q))
    out = []
    for m in range(1, field.q):
        target = abs(col[m]) / measure.norm
        plus = int(measure.mults[np.abs(measure.values - target) <= tol].sum())
        minus = int(measure.mults[np.abs(measure.values + target) <= tol].sum())
        out.append(ClassMultiplicity(m, float(target), plus, minus))
    return out


def delocalization_check(sum_set: SumSet) -> float:
    """Max sup-norm over an explicit orthonormal eigenbasis built from
    characters: real characters give flat vectors of sup-norm 1/sqrt(n);
    each non-real pair gives (chi + theta * conj(chi)) / sqrt(2n) with
    |theta| = 1, of sup-norm at most sqrt(2/n)."""
    field = sum_set.field
    q = field.q
    if q > 64:
        raise SizeExceeded("delocalization check constructs explicit vectors; q <= 64")
    n = q * q
    table = character_sum_table(sum_set)
    codes = np.arange(q, dtype=np.int64)
    neg = field.neg_v(codes)
    neg_flat = (neg[:, None] * q + neg[None, :]).ravel()
    idx = np.arange(n, dtype=np.int64)
    psi_row = field.psi_v(codes)

    worst = 0.0
    if field.p == 2:
        # all characters real: the characters themselves are the eigenbasis
        return 1.0 / np.sqrt(n)
    rep_idx = np.nonzero((idx != neg_flat) & (idx < neg_flat))[0]
    for e in rep_idx.tolist():
        a, b = divmod(e, q)
        s_chi = table[e]
        chi = np.kron(field.psi_v(field.mul_v(np.full(q, a), codes)),
                      field.psi_v(field.mul_v(np.full(q, b), codes)))
        if abs(s_chi) < 1e-12:
            # degenerate pair: chi and conj(chi) are themselves eigenvectors
            worst = max(worst, float(np.abs(chi / np.sqrt(n)).max()))
            continue
        theta = s_chi / abs(s_chi)
        for sign in (1.0, -1.0):
            vec = (chi + sign * theta * np.conj(chi)) / np.sqrt(2 * n)
            worst = max(worst, float(np.abs(vec).max()))
    worst = max(worst, 1.0 / np.sqrt(n))  # the real (trivial) character
    return worst
