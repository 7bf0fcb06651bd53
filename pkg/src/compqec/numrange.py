"""Higher-rank numerical ranges and the projections that realize them.

``Lambda_k(A)`` is the set of scalars ``lam`` for which some rank-``k``
projection ``P`` satisfies ``P A P = lam P``. This module computes it for
Hermitian operators (an interval between two ordered eigenvalues) and for
4x4 unitaries (a point or a segment), tests the convex-hull bound for normal
operators, and builds explicit projections by eigenvalue pairing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadRank,
    CombinatorialBlowup,
    DegenerateChords,
    NotUnitary,
    NumericalFailure,
    ValueOutsideRange,
    WrongDimension,
)
from .matcore import (
    DEFAULT_TOLERANCES,
    Cluster,
    Projection,
    Spectrum,
    ToleranceConfig,
    as_square,
    cluster_eigenvalues,
    fro,
    hermitian_eigendecomposition,
    is_unitary,
    normal_eigendecomposition,
    principal_argument,
    projection_from_vectors,
)

EMPTY = "empty"
POINT = "point"
INTERVAL = "interval"
SEGMENT = "segment"

DEFAULT_HULL_CAP = 10**6


@dataclass(frozen=True)
class RangeResult:
    """A higher-rank numerical range: empty, a point, a real interval or a segment."""

    kind: str
    point: complex | None = None
    lo: float | None = None
    hi: float | None = None
    endpoints: tuple[complex, complex] | None = None
    case_label: str | None = None

    @classmethod
    def empty(cls, case_label=None):
        return cls(EMPTY, case_label=case_label)

    @classmethod
    def at(cls, value, case_label=None):
        return cls(POINT, point=complex(value), case_label=case_label)

    @classmethod
    def interval(cls, lo, hi, eps: float = DEFAULT_TOLERANCES.eps_degenerate):
        if hi - lo <= eps:
            return cls.at(0.5 * (lo + hi))
        return cls(INTERVAL, lo=float(lo), hi=float(hi))

    @classmethod
    def segment(cls, z, w, case_label=None):
        if z == w:
            return cls.at(z, case_label)
        return cls(SEGMENT, endpoints=(complex(z), complex(w)), case_label=case_label)

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY

    def distance(self, lam: complex) -> float:
        """Euclidean distance from ``lam`` to the set (``inf`` when empty)."""
        lam = complex(lam)
        if self.kind == EMPTY:
            return math.inf
        if self.kind == POINT:
            return abs(lam - self.point)
        if self.kind == INTERVAL:
            return abs(lam - complex(min(max(lam.real, self.lo), self.hi), 0.0))
        return _segment_distance(lam, *self.endpoints)

    def contains(self, lam: complex, tol: float = DEFAULT_TOLERANCES.eps_scalar) -> bool:
        return self.distance(lam) <= tol

    def sample(self, n: int) -> list[complex]:
        """``n`` evenly spaced members (a single value for a point)."""
        if self.kind == EMPTY:
            return []
        if self.kind == POINT:
            return [self.point]
        if self.kind == INTERVAL:
            a, b = complex(self.lo), complex(self.hi)
        else:
            a, b = self.endpoints
        if n == 1:
            return [0.5 * (a + b)]
        return [a + t * (b - a) for t in np.linspace(0.0, 1.0, n)]

    def includes(self, other: "RangeResult", tol: float = DEFAULT_TOLERANCES.eps_scalar) -> bool:
        """Set inclusion ``other`` within ``self`` (convex sets, so endpoints suffice)."""
        if other.kind == EMPTY:
            return True
        if other.kind == POINT:
            pts = [other.point]
        elif other.kind == INTERVAL:
            pts = [complex(other.lo), complex(other.hi)]
        else:
            pts = list(other.endpoints)
        return all(self.contains(p, tol) for p in pts)


def _segment_distance(lam: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(lam - a)
    t = ((lam - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(lam - (a + t * d))


def _check_rank(n: int, k: int) -> None:
    if not (1 <= k <= n):
        raise BadRank(f"rank k={k} outside [1, {n}]")


# --- Hermitian operators -----------------------------------------------------


def hermitian_range(h, k: int, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> RangeResult:
    """``Lambda_k(H) = [a_k, a_{N-k+1}]`` for ascending eigenvalues ``a``."""
    spec = hermitian_eigendecomposition(h, tol)
    n = len(spec)
    _check_rank(n, k)
    a = spec.eigenvalues.real
    lo, hi = a[k - 1], a[n - k]
    if hi - lo > tol.eps_degenerate:
        return RangeResult(INTERVAL, lo=float(lo), hi=float(hi))
    if abs(hi - lo) <= tol.eps_degenerate:
        return RangeResult.at(0.5 * (lo + hi))
    return RangeResult.empty()


def _pair(u: np.ndarray, v: np.ndarray, weight_u: float) -> np.ndarray:
    """``cos(t) u + sin(t) v`` with ``cos(t)**2 = weight_u``."""
    weight_u = min(1.0, max(0.0, weight_u))
    return math.sqrt(weight_u) * u + math.sqrt(1.0 - weight_u) * v


def _real_weight(lam: complex, z_first: complex, z_second: complex, tol: float) -> float:
    """Weight ``a`` with ``lam = a z_first + (1 - a) z_second``.

    Solved as ``(lam - z_second) / (z_first - z_second)``; the imaginary part
    must vanish because ``lam`` lies on the chord.
    """
    length = abs(z_first - z_second)
    if length <= tol:
        return 1.0
    ratio = (lam - z_second) / (z_first - z_second)
    slack = tol / length
    if abs(ratio.imag) > slack:
        raise ValueOutsideRange(f"value {lam} is not on the chord [{z_first}, {z_second}]")
    if not (-slack <= ratio.real <= 1.0 + slack):
        raise ValueOutsideRange(f"value {lam} is outside the chord [{z_first}, {z_second}]")
    return min(1.0, max(0.0, ratio.real))


def hermitian_range_projection(
    h, k: int, lam: float, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> Projection:
    """Rank-``k`` projection with ``P H P = lam P``, by eigenvalue pairing.

    For ``2k <= N`` the ``j``-th code vector mixes the eigenvectors of
    ``a_j`` and ``a_{N-k+j}``. For ``2k > N`` the range is at most the single
    value ``a_k``; its ``2k-N`` eigenvectors are used directly and the
    remaining ``N-k`` lower/upper eigenvectors are paired.
    """
    spec = hermitian_eigendecomposition(h, tol)
    n = len(spec)
    _check_rank(n, k)
    lam = complex(lam)
    if abs(lam.imag) > tol.eps_scalar:
        raise ValueOutsideRange(f"Hermitian compression values are real, got {lam}")
    lam = lam.real
    rng = hermitian_range(h, k, tol)
    if not rng.contains(lam, tol.eps_scalar):
        if 2 * k > n:
            raise BadRank(f"no rank-{k} compression to {lam}: range is {rng.kind}")
        raise ValueOutsideRange(f"{lam} not in the rank-{k} numerical range")

    a = spec.eigenvalues.real
    vecs = []
    if 2 * k <= n:
        pairs = [(j, n - k + j) for j in range(k)]
    else:
        vecs = [spec.vector(j) for j in range(n - k, k)]
        pairs = [(j, k + j) for j in range(n - k)]
    for lo_idx, hi_idx in pairs:
        a_lo, a_hi = a[lo_idx], a[hi_idx]
        weight = 1.0 if a_hi - a_lo <= 0.0 else (a_hi - lam) / (a_hi - a_lo)
        vecs.append(_pair(spec.vector(lo_idx), spec.vector(hi_idx), weight))
    return projection_from_vectors(vecs, tol)


# --- Unitary and normal operators --------------------------------------------


def _arg_increasing(points: Sequence[complex], tol: float) -> bool:
    theta = principal_argument(points, tol)
    return bool(np.all(np.diff(theta) > 0.0))


def chord_intersection(
    z1: complex, z2: complex, z3: complex, z4: complex,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> complex:
    """Crossing point of the chords ``z1 z3`` and ``z2 z4``.

    The four unimodular points must be distinct and in strictly increasing
    argument order, so the chords interleave and cross inside the disk.
    """
    pts = [complex(z) for z in (z1, z2, z3, z4)]
    for z in pts:
        if abs(abs(z) - 1.0) > 1e-6:
            raise DegenerateChords(f"point {z} is not on the unit circle")
    for p, q in itertools.combinations(pts, 2):
        if abs(p - q) <= tol.eps_degenerate:
            raise DegenerateChords("chord endpoints are not distinct")
    if not _arg_increasing(pts, tol.eps_degenerate):
        raise DegenerateChords("points are not in increasing argument order")

    d13 = pts[2] - pts[0]
    d24 = pts[3] - pts[1]
    rhs = pts[1] - pts[0]
    # z1 + s d13 = z2 + t d24  =>  [d13, -d24] (s, t) = z2 - z1
    m = np.array([[d13.real, -d24.real], [d13.imag, -d24.imag]])
    det = np.linalg.det(m)
    if abs(det) <= tol.eps_scalar:
        raise NumericalFailure(f"chords are nearly parallel (det {det:.3g})")
    s, _ = np.linalg.solve(m, [rhs.real, rhs.imag])
    return pts[0] + s * d13


def _unitary_spectrum(u, tol: ToleranceConfig) -> tuple[Spectrum, list[Cluster]]:
    u = as_square(u, "U")
    if not is_unitary(u, tol.eps_proj * math.sqrt(u.shape[0])):
        raise NotUnitary("operator is not unitary within tolerance")
    spec = normal_eigendecomposition(u, tol, ordering="ascending-argument")
    return spec, cluster_eigenvalues(spec, tol.eps_degenerate)


def _by_argument(clusters: list[Cluster], tol: float) -> list[Cluster]:
    theta = principal_argument([c.value for c in clusters], tol)
    return [clusters[i] for i in np.argsort(theta, kind="stable")]


def _classify4(clusters: list[Cluster]) -> str:
    mults = sorted((c.multiplicity for c in clusters), reverse=True)
    return {
        (1, 1, 1, 1): "a",
        (2, 1, 1): "b",
        (2, 2): "c",
        (3, 1): "d",
        (4,): "e",
    }[tuple(mults)]


def unitary4_rank2_range(u, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> RangeResult:
    """``Lambda_2`` of a 4x4 unitary, labelled with its degeneracy case a-e."""
    u = as_square(u, "U")
    if u.shape != (4, 4):
        raise WrongDimension(f"expected a 4x4 unitary, got {u.shape}")
    _, clusters = _unitary_spectrum(u, tol)
    case = _classify4(clusters)
    clusters = _by_argument(clusters, tol.eps_degenerate)
    if case == "a":
        z = [c.value for c in clusters]
        return RangeResult.at(chord_intersection(*z, tol=tol), "a")
    if case == "c":
        return RangeResult.segment(clusters[0].value, clusters[1].value, "c")
    top = max(clusters, key=lambda c: c.multiplicity)
    return RangeResult.at(top.value, case)


def unitary4_rank2_projection(
    u, lam: complex, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> Projection:
    """Rank-2 projection ``P`` with ``P U P = lam P`` for a 4x4 unitary."""
    u = as_square(u, "U")
    rng = unitary4_rank2_range(u, tol)
    lam = complex(lam)
    if not rng.contains(lam, tol.eps_scalar):
        raise ValueOutsideRange(f"{lam} is not in Lambda_2(U) ({rng.kind}, case {rng.case_label})")
    spec, clusters = _unitary_spectrum(u, tol)
    clusters = _by_argument(clusters, tol.eps_degenerate)
    case = rng.case_label

    if case == "a":
        psi = [spec.vector(c.members[0]) for c in clusters]
        z = [c.value for c in clusters]
        weight_a = _real_weight(lam, z[0], z[2], tol.eps_scalar)
        weight_c = _real_weight(lam, z[1], z[3], tol.eps_scalar)
        vecs = [_pair(psi[0], psi[2], weight_a), _pair(psi[1], psi[3], weight_c)]
    elif case == "c":
        zc, wc = clusters
        weight = _real_weight(lam, zc.value, wc.value, tol.eps_scalar)
        vecs = [
            _pair(spec.vector(zc.members[i]), spec.vector(wc.members[i]), weight)
            for i in range(2)
        ]
    elif case in ("b", "d"):
        top = max(clusters, key=lambda c: c.multiplicity)
        vecs = [spec.vector(top.members[0]), spec.vector(top.members[1])]
    else:
        vecs = list(np.eye(4, dtype=np.complex128)[:2])
    return projection_from_vectors(vecs, tol)


@dataclass(frozen=True)
class ShapeConstraint:
    """Structural restriction on ``Lambda_k`` for an ``N``-dimensional operator."""

    kind: str
    min_geometric_multiplicity: int | None = None


def range_shape_constraints(n: int, k: int) -> ShapeConstraint:
    """Constraints that hold for every operator of size ``n``.

    ``2k <= n`` leaves the range unconstrained; ``2k > n`` forces it to be
    empty or a single eigenvalue of geometric multiplicity at least ``2k-n``;
    ``k == n`` makes it non-empty only for scalar operators.
    """
    _check_rank(n, k)
    if k == n:
        return ShapeConstraint("scalar-only", n)
    if 2 * k > n:
        return ShapeConstraint("empty-or-singleton", 2 * k - n)
    return ShapeConstraint("unconstrained")


@dataclass(frozen=True)
class HullBound:
    """Convex hulls of all ``(N+1-k)``-point sub-multisets of a spectrum."""

    k: int
    spectrum: tuple[complex, ...]
    subset_size: int = field(init=False)

    def __post_init__(self):
        n = len(self.spectrum)
        _check_rank(n, self.k)
        object.__setattr__(self, "subset_size", n + 1 - self.k)

    def subsets(self):
        return itertools.combinations(self.spectrum, self.subset_size)


def _cross(o: complex, a: complex, b: complex) -> float:
    return ((a - o).conjugate() * (b - o)).imag


def convex_hull(points: Sequence[complex], tol: float = 1e-14) -> list[complex]:
    """Counter-clockwise hull vertices (monotone chain); collinear points dropped."""
    pts = sorted(set(complex(p) for p in points), key=lambda z: (z.real, z.imag))
    if len(pts) <= 2:
        return pts

    def chain(seq):
        out: list[complex] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    return lower[:-1] + upper[:-1]


def hull_distance(lam: complex, points: Sequence[complex]) -> float:
    """Distance from ``lam`` to the convex hull of ``points`` (0 inside)."""
    hull = convex_hull(points)
    lam = complex(lam)
    if len(hull) == 1:
        return abs(lam - hull[0])
    if len(hull) == 2:
        return _segment_distance(lam, hull[0], hull[1])
    edges = list(zip(hull, hull[1:] + hull[:1]))
    if all(_cross(a, b, lam) >= 0.0 for a, b in edges):
        return 0.0
    return min(_segment_distance(lam, a, b) for a, b in edges)


def normal_hull_membership(
    a,
    k: int,
    lam: complex,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    cap: int = DEFAULT_HULL_CAP,
) -> bool:
    """Necessary condition for ``lam`` in ``Lambda_k`` of a normal operator.

    ``lam`` must lie in the convex hull of every ``(N+1-k)``-point
    sub-multiset of the spectrum. ``False`` proves ``lam`` is not a
    compression-value; ``True`` does not prove that it is.
    """
    spec = normal_eigendecomposition(a, tol)
    n = len(spec)
    _check_rank(n, k)
    if math.comb(n, k - 1) > cap:
        raise CombinatorialBlowup(f"C({n}, {k - 1}) subsets exceed the cap {cap}")
    bound = HullBound(k, tuple(complex(z) for z in spec.eigenvalues))
    return all(hull_distance(lam, g) <= tol.eps_scalar for g in bound.subsets())


def _chord_sine(z: Sequence[complex]) -> float:
    d1, d2 = z[2] - z[0], z[3] - z[1]
    return abs((d1.conjugate() * d2).imag) / (abs(d1) * abs(d2))


def _choose_quadruple(clusters: list[Cluster], tol: float) -> list[Cluster]:
    m = len(clusters)
    if m <= 12:
        candidates = itertools.combinations(range(m), 4)
    else:
        theta = principal_argument([c.value for c in clusters], tol)
        picks = []
        for q in (0.0, 0.25, 0.5, 0.75):
            target = q * 2 * np.pi
            gap = np.abs(np.angle(np.exp(1j * (theta - target))))
            for i in np.argsort(gap, kind="stable"):
                if i not in picks:
                    picks.append(int(i))
                    break
        candidates = [tuple(sorted(picks))]
    best, best_sine = None, -1.0
    for idx in candidates:
        sine = _chord_sine([clusters[i].value for i in idx])
        if sine > best_sine:
            best, best_sine = idx, sine
    return [clusters[i] for i in best]


def unitary_rank2_any_dim(
    u, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[complex, Projection]:
    """A compression-value of rank 2 and its projection for a unitary, ``N >= 4``.

    A repeated eigenvalue gives a rank-2 piece of its eigenspace directly.
    Otherwise four eigenvalues are chosen (best-conditioned chord crossing)
    and paired inside their eigenvectors' span.
    """
    u = as_square(u, "U")
    n = u.shape[0]
    if n < 4:
        raise WrongDimension(f"need dimension >= 4, got {n}")
    if n == 4:
        rng = unitary4_rank2_range(u, tol)
        lam = rng.point if rng.kind == POINT else rng.endpoints[0]
        return lam, unitary4_rank2_projection(u, lam, tol)

    spec, clusters = _unitary_spectrum(u, tol)
    for c in clusters:
        if c.multiplicity >= 2:
            p = projection_from_vectors([spec.vector(c.members[0]), spec.vector(c.members[1])], tol)
            return c.value, p

    quad = _by_argument(_choose_quadruple(clusters, tol.eps_degenerate), tol.eps_degenerate)
    z = [c.value for c in quad]
    psi = [spec.vector(c.members[0]) for c in quad]
    lam = chord_intersection(*z, tol=tol)
    vecs = [
        _pair(psi[0], psi[2], _real_weight(lam, z[0], z[2], tol.eps_scalar)),
        _pair(psi[1], psi[3], _real_weight(lam, z[1], z[3], tol.eps_scalar)),
    ]
    return lam, projection_from_vectors(vecs, tol)


def unitary_plot_data(u, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> dict:
    """Spectrum points, pairing chords and ``Lambda_2`` of a 4x4 unitary."""
    rng = unitary4_rank2_range(u, tol)
    spec, clusters = _unitary_spectrum(u, tol)
    clusters = _by_argument(clusters, tol.eps_degenerate)
    chords = []
    if rng.case_label == "a":
        z = [c.value for c in clusters]
        chords = [(z[0], z[2]), (z[1], z[3])]
    return {
        "eigenvalues": [complex(z) for z in spec.eigenvalues],
        "chords": chords,
        "range": rng,
    }
