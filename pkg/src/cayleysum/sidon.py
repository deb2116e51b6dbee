"""Connection sets in k x k (hyperbola, cubic curve, partial and
quadratic-residue hyperbolas) and exhaustive Sidon-type verification.

A set S is Sidon when a+b = c+d over S^4 forces a in {c, d}; it is a
partial symmetric Sidon set with center a0 when the only other solutions
have a+b = c+d = a0; it is a symmetric Sidon set when additionally
S = a0 - S.  Points are stored as pairs of element encodings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import BadCongruence, BadParameter, NotPrimeField, SizeExceeded
from .ffield import FieldElement, FiniteField, is_prime, legendre_table, make_field

MAX_SIDON_SCAN = 4096

Point = tuple[int, int]  # pair of element encodings

FAMILY_KLOOSTERMAN = "kloosterman"
FAMILY_BIRCH = "birch"
FAMILY_PARTIAL_HYPERBOLA = "kt"
FAMILY_QR_HYPERBOLA = "kplus"
FAMILY_CUSTOM = "custom"


@dataclass(frozen=True)
class SumSet:
    """A subset of the additive group k x k used as a graph connection set."""

    field: FiniteField
    family: str
    points: tuple[Point, ...]
    center: Optional[Point] = (0, 0)
    t: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "_pset", frozenset(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, pt: Point) -> bool:
        return pt in self._pset

    def point_set(self) -> frozenset:
        return self._pset

    def u_codes(self) -> np.ndarray:
        return np.array([u for u, _ in self.points], dtype=np.int64)

    def v_codes(self) -> np.ndarray:
        return np.array([v for _, v in self.points], dtype=np.int64)

    def elements(self) -> list[tuple[FieldElement, FieldElement]]:
        f = self.field
        return [(f.element(u), f.element(v)) for u, v in self.points]

    def add_points(self, a: Point, b: Point) -> Point:
        f = self.field
        return (f.add_code(a[0], b[0]), f.add_code(a[1], b[1]))

    def sub_points(self, a: Point, b: Point) -> Point:
        f = self.field
        return (f.sub_code(a[0], b[0]), f.sub_code(a[1], b[1]))

    def neg_point(self, a: Point) -> Point:
        f = self.field
        return (f.neg_code(a[0]), f.neg_code(a[1]))

    def to_json_dict(self) -> dict:
        return {
            "field": self.field.descriptor(),
            "family": self.family,
            "points": [[int(u), int(v)] for u, v in self.points],
        }


@dataclass(frozen=True)
class SidonVerdict:
    """Outcome of a Sidon-type scan; a failing scan carries a witness
    4-tuple (alpha, beta, gamma, delta) of points with alpha+beta =
    gamma+delta and alpha not in {gamma, delta}."""

    holds: bool
    witness: Optional[tuple[Point, Point, Point, Point]] = None


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def make_K(field: FiniteField) -> SumSet:
    """Hyperbola {(x, 1/x) : x != 0}; q - 1 points."""
    q = field.q
    xs = np.arange(1, q, dtype=np.int64)
    ys = field.inv_v(xs)
    pts = tuple(sorted((int(x), int(y)) for x, y in zip(xs, ys)))
    return SumSet(field, FAMILY_KLOOSTERMAN, pts)


def make_B(field: FiniteField) -> SumSet:
    """Cubic curve {(x, x^3)}; q points.  Constructible in any
    characteristic; Sidon-type claims require characteristic != 3."""
    q = field.q
    xs = np.arange(q, dtype=np.int64)
    ys = field.mul_v(field.mul_v(xs, xs), xs)
    pts = tuple(sorted((int(x), int(y)) for x, y in zip(xs, ys)))
    return SumSet(field, FAMILY_BIRCH, pts)


def kt_range_bound(p: int, t: float) -> int:
    """floor(t * (p - 1)), with a 1e-9 nudge so that decimal-intent inputs
    like t = 0.3 (stored as 0.29999...) hit the intended integer."""
    return int(math.floor(t * (p - 1) + 1e-9))


def make_Kt(p, t: float) -> SumSet:
    """Partial hyperbola: (x, 1/x) for integer representatives
    1 <= x <= floor(t(p-1)), on a prime field."""
    field = p if isinstance(p, FiniteField) else make_field(int(p))
    if field.n != 1:
        raise NotPrimeField("the partial hyperbola is defined over prime fields")
    if not 0 < t <= 1:
        raise BadParameter(f"t must lie in (0, 1], got {t}")
    m = kt_range_bound(field.p, t)
    xs = np.arange(1, m + 1, dtype=np.int64)
    ys = field.inv_v(xs) if len(xs) else xs
    pts = tuple(sorted((int(x), int(y)) for x, y in zip(xs, ys)))
    return SumSet(field, FAMILY_PARTIAL_HYPERBOLA, pts, t=t)


def make_Kplus(p) -> SumSet:
    """Quadratic-residue hyperbola: (x, 1/x) with x a nonzero square,
    for primes p = 3 (mod 4); (p-1)/2 points."""
    field = p if isinstance(p, FiniteField) else make_field(int(p))
    if field.n != 1:
        raise NotPrimeField("the residue hyperbola is defined over prime fields")
    if field.p % 4 != 3:
        raise BadCongruence(f"p = {field.p} is not 3 mod 4")
    leg = legendre_table(field.p)
    xs = np.nonzero(leg == 1)[0].astype(np.int64)
    ys = field.inv_v(xs)
    pts = tuple(sorted((int(x), int(y)) for x, y in zip(xs, ys)))
    return SumSet(field, FAMILY_QR_HYPERBOLA, pts)


def custom_sum_set(field: FiniteField, points: Iterable) -> SumSet:
    """Wrap an arbitrary collection of points (encoding pairs or element
    pairs) as a deduplicated custom SumSet."""
    norm = set()
    for u, v in points:
        cu = u.code if isinstance(u, FieldElement) else int(u)
        cv = v.code if isinstance(v, FieldElement) else int(v)
        norm.add((cu % field.q, cv % field.q))
    return SumSet(field, FAMILY_CUSTOM, tuple(sorted(norm)))


# ---------------------------------------------------------------------------
# Sidon scans
# ---------------------------------------------------------------------------

def _collision_groups(s: SumSet) -> dict[Point, list[Point]]:
    """Map sum -> sorted list of distinct points appearing in some unordered
    pair with that sum (pairs (a, a) included)."""
    sums: dict[Point, set[Point]] = {}
    pts = s.points
    npts = len(pts)
    for i in range(npts):
        a = pts[i]
        for j in range(i, npts):
            b = pts[j]
            sig = s.add_points(a, b)
            grp = sums.setdefault(sig, set())
            grp.add(a)
            grp.add(b)
    return {k: sorted(v) for k, v in sums.items()}


def _min_witness_in_group(s: SumSet, sig: Point, members: list[Point]):
    """Lexicographically smallest violating tuple with alpha+beta = sig,
    or None if the group holds only one unordered pair."""
    best = None
    for alpha in members:
        beta = s.sub_points(sig, alpha)
        if beta not in s:
            continue
        # gamma must avoid alpha and beta (delta = alpha would violate nothing new)
        for gamma in members:
            if gamma == alpha or gamma == beta:
                continue
            delta = s.sub_points(sig, gamma)
            if delta not in s:
                continue
            cand = (alpha, beta, gamma, delta)
            if best is None or cand < best:
                best = cand
            break  # members sorted: first valid gamma is minimal for this alpha
        if best is not None and best[0] == alpha:
            break  # members sorted: later alphas only give larger tuples
    return best


def _sidon_scan(s: SumSet, exempt_sum: Optional[Point]) -> SidonVerdict:
    if len(s) > MAX_SIDON_SCAN:
        raise SizeExceeded(f"|S| = {len(s)} exceeds the scan cap {MAX_SIDON_SCAN}")
    groups = _collision_groups(s)
    best = None
    for sig, members in groups.items():
        if exempt_sum is not None and sig == exempt_sum:
            continue
        if len(members) < 3:
            # one unordered pair at most: {a, b} or {a} from (a, a)
            continue
        w = _min_witness_in_group(s, sig, members)
        if w is not None and (best is None or w < best):
            best = w
    if best is None:
        return SidonVerdict(True, None)
    return SidonVerdict(False, best)


def is_sidon(s: SumSet) -> SidonVerdict:
    """Exhaustively decide whether S is a Sidon set; on failure return the
    lexicographically smallest violating tuple under the encoding order."""
    return _sidon_scan(s, exempt_sum=None)


def is_partial_symmetric_sidon(s: SumSet, a0) -> SidonVerdict:
    """Like :func:`is_sidon`, but tuples with alpha+beta = a0 are exempt."""
    return _sidon_scan(s, exempt_sum=_norm_point(s.field, a0))


def is_symmetric_sidon(s: SumSet, a0) -> SidonVerdict:
    """Partial symmetric Sidon with center a0 together with S = a0 - S."""
    a0 = _norm_point(s.field, a0)
    mirrored = {s.sub_points(a0, pt) for pt in s.points}
    if mirrored != set(s.points):
        # not symmetric; report a point whose mirror is missing as a soft witness
        return SidonVerdict(False, None)
    return _sidon_scan(s, exempt_sum=a0)


def verify_witness(s: SumSet, verdict: SidonVerdict, exempt_sum=None) -> bool:
    """Independently re-check a failing verdict's witness from raw tuples."""
    if verdict.holds or verdict.witness is None:
        return False
    alpha, beta, gamma, delta = verdict.witness
    if not all(pt in s for pt in verdict.witness):
        return False
    lhs = s.add_points(alpha, beta)
    rhs = s.add_points(gamma, delta)
    if lhs != rhs or alpha in (gamma, delta):
        return False
    if exempt_sum is not None and lhs == _norm_point(s.field, exempt_sum):
        return False
    return True


def restrict(s: SumSet, predicate: Callable[[Point], bool]) -> tuple[SumSet, bool]:
    """Keep the points satisfying the predicate; also certify that the
    retained set R meets -R trivially (so a partial symmetric Sidon input
    with center 0 restricts to a Sidon set)."""
    kept = tuple(pt for pt in s.points if predicate(pt))
    restricted = SumSet(s.field, FAMILY_CUSTOM, kept, center=s.center)
    kept_set = set(kept)
    certificate = all(restricted.neg_point(pt) not in kept_set for pt in kept)
    return restricted, certificate


def _norm_point(field: FiniteField, pt) -> Point:
    u, v = pt
    cu = u.code if isinstance(u, FieldElement) else int(u) % field.q
    cv = v.code if isinstance(v, FieldElement) else int(v) % field.q
    return (cu, cv)
