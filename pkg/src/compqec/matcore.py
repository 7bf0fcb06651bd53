"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; scalars are
Python ``complex``. The helpers here add the contracts the rest of the
package relies on: deterministic eigenvalue ordering, canonical eigenvector
phases, orthonormality checks and scalar-compression testing.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    NotHermitian,
    NotNormal,
    NumericalFailure,
    PreconditionError,
)

TWO_PI = 2.0 * np.pi

ASCENDING_REAL = "ascending-real"
ASCENDING_ARGUMENT = "ascending-argument"


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used throughout the package."""

    eps_scalar: float = 1e-9
    eps_degenerate: float = 1e-8
    eps_recon: float = 1e-10
    eps_proj: float = 1e-10
    eps_ortho: float = 1e-10
    eps_tp: float = 1e-10

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (0.0 < value < 1e-3):
                raise PreconditionError(
                    f"tolerance {field.name}={value!r} must lie in (0, 1e-3)"
                )

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOLERANCES = ToleranceConfig()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (copying when needed)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PreconditionError(f"{name} contains NaN or Inf entries")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def fro(a) -> float:
    return float(np.linalg.norm(a))


def hermitian_defect(a: np.ndarray) -> float:
    return fro(a - dagger(a))


def normality_defect(a: np.ndarray) -> float:
    return fro(a @ dagger(a) - dagger(a) @ a)


def unitarity_defect(a: np.ndarray) -> float:
    return fro(dagger(a) @ a - np.eye(a.shape[0]))


def is_hermitian(a: np.ndarray, tol: float) -> bool:
    return hermitian_defect(a) <= tol * max(1.0, fro(a))


def is_unitary(a: np.ndarray, tol: float) -> bool:
    return a.shape[0] == a.shape[1] and unitarity_defect(a) <= tol


def is_scalar_matrix(a: np.ndarray, tol: float) -> bool:
    n = a.shape[0]
    return fro(a - np.trace(a) / n * np.eye(n)) <= tol * max(1.0, fro(a))


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive.

    Ties within a relative 1e-12 of the maximum go to the lowest index.
    """
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v
    idx = int(np.flatnonzero(mags >= top * (1.0 - 1e-12))[0])
    return v * (abs(v[idx]) / v[idx])


def principal_argument(z, snap: float = 0.0) -> np.ndarray:
    """Arguments in ``[0, 2*pi)``; values within ``snap`` of ``2*pi`` wrap to 0."""
    theta = np.mod(np.angle(np.asarray(z)), TWO_PI)
    return np.where(theta >= TWO_PI - snap, 0.0, theta)


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs ``(eigenvalues[j], eigenvectors[:, j])`` in a fixed order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    ordering: str

    def __len__(self):
        return len(self.eigenvalues)

    def vector(self, j: int) -> np.ndarray:
        return self.eigenvectors[:, j]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def gram_defect(self) -> float:
        v = self.eigenvectors
        return fro(dagger(v) @ v - np.eye(v.shape[1]))


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection with its rank."""

    matrix: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def basis(self) -> np.ndarray:
        """Orthonormal basis (as columns) of the projection's range."""
        w, v = np.linalg.eigh(self.matrix)
        cols = v[:, np.argsort(w)[::-1][: self.rank]]
        return np.column_stack([canonical_phase(cols[:, j]) for j in range(self.rank)])

    def defects(self) -> tuple[float, float, float]:
        p = self.matrix
        return (
            hermitian_defect(p),
            fro(p @ p - p),
            abs(np.trace(p).real - self.rank),
        )

    def is_valid(self, tol: float = DEFAULT_TOLERANCES.eps_proj) -> bool:
        return max(self.defects()) <= tol

    @classmethod
    def from_matrix(cls, p, tol: float = 1e-8) -> "Projection":
        """Wrap a matrix that should already be an orthogonal projection."""
        m = as_square(p, "projection")
        rank = int(round(np.trace(m).real))
        proj = cls(m, rank)
        if rank < 1 or not proj.is_valid(tol):
            raise PreconditionError(
                "matrix is not a nonzero orthogonal projection "
                f"(defects {tuple(float(f'{d:.3g}') for d in proj.defects())})"
            )
        return proj


def _check_decomposition(a: np.ndarray, spec: Spectrum, tol: ToleranceConfig) -> None:
    scale = max(1.0, fro(a))
    if spec.gram_defect() > tol.eps_ortho:
        raise NumericalFailure(f"eigenbasis not orthonormal (defect {spec.gram_defect():.3g})")
    recon = fro(spec.reconstruct() - a)
    if recon > tol.eps_recon * scale:
        raise NumericalFailure(f"eigendecomposition reconstruction error {recon:.3g}")


def hermitian_eigendecomposition(h, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_square(h, "H")
    if hermitian_defect(h) > tol.eps_proj * max(1.0, fro(h)):
        raise NotHermitian(f"matrix is not Hermitian (defect {hermitian_defect(h):.3g})")
    h = 0.5 * (h + dagger(h))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    v = np.column_stack([canonical_phase(v[:, j]) for j in range(v.shape[1])])
    spec = Spectrum(w.astype(np.complex128), v, ASCENDING_REAL)
    _check_decomposition(h, spec, tol)
    return spec


def normal_eigendecomposition(
    a,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    ordering: str | None = None,
) -> Spectrum:
    """Eigendecomposition of a normal matrix via the complex Schur form.

    For a normal matrix the Schur factor is diagonal and the Schur vectors are
    an orthonormal eigenbasis, including inside degenerate eigenspaces.

    Unless ``ordering`` is given, unitary input is sorted by principal
    argument, non-unitary Hermitian input by real part, and anything else by
    argument (ties by modulus).
    """
    a = as_square(a, "A")
    scale = max(1.0, fro(a))
    if normality_defect(a) > tol.eps_proj * scale**2:
        raise NotNormal(f"matrix is not normal (defect {normality_defect(a):.3g})")
    try:
        t, q = scipy.linalg.schur(a, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(str(exc)) from exc
    z = np.diag(t).copy()

    if ordering is None:
        if is_unitary(a, tol.eps_proj * np.sqrt(a.shape[0])):
            ordering = ASCENDING_ARGUMENT
        elif hermitian_defect(a) <= tol.eps_proj * scale:
            ordering = ASCENDING_REAL
        else:
            ordering = ASCENDING_ARGUMENT
    if ordering == ASCENDING_REAL:
        z = z.real.astype(np.complex128) if hermitian_defect(a) <= tol.eps_proj * scale else z
        order = np.lexsort((z.imag, z.real))
    elif ordering == ASCENDING_ARGUMENT:
        order = np.lexsort((np.abs(z), principal_argument(z, tol.eps_degenerate)))
    else:
        raise ValueError(f"unknown ordering {ordering!r}")

    vecs = np.column_stack([canonical_phase(q[:, j]) for j in order])
    spec = Spectrum(z[order], vecs, ordering)
    _check_decomposition(a, spec, tol)
    return spec


def scalar_compression_check(
    a, p: Projection, tol: float = DEFAULT_TOLERANCES.eps_scalar
) -> complex | None:
    """Return ``lam`` if ``P A P = lam P`` within tolerance, else ``None``.

    ``lam`` is estimated as ``trace(PAP) / rank(P)``; the residual
    ``||PAP - lam P||_F`` is accepted when at most ``tol * max(1, ||A||_F)``.
    """
    a = as_square(a, "A")
    pm = p.matrix
    if pm.shape != a.shape:
        raise DimensionMismatch(f"operator {a.shape} and projection {pm.shape} differ in size")
    pap = pm @ a @ pm
    lam = complex(np.trace(pap) / p.rank)
    if fro(pap - lam * pm) <= tol * max(1.0, fro(a)):
        return lam
    return None


def compression_residual(a: np.ndarray, p: Projection) -> tuple[complex, float]:
    """``(lam, ||PAP - lam P||_F)`` with the trace estimator for ``lam``."""
    pm = p.matrix
    pap = pm @ a @ pm
    lam = complex(np.trace(pap) / p.rank)
    return lam, fro(pap - lam * pm)


def projection_from_vectors(
    vectors: Sequence[np.ndarray] | np.ndarray,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Projection:
    """Orthogonal projection onto the span of linearly independent vectors.

    ``vectors`` is a sequence of 1-D arrays or a 2-D array whose columns are
    the vectors.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = vectors.astype(np.complex128)
    else:
        vs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
        if not vs:
            raise DegenerateInput("need at least one vector")
        if len({v.shape for v in vs}) != 1:
            raise DimensionMismatch("vectors have different lengths")
        cols = np.column_stack(vs)
    if not np.all(np.isfinite(cols)):
        raise DegenerateInput("vectors contain NaN or Inf")
    norms = np.linalg.norm(cols, axis=0)
    if np.any(norms == 0.0):
        raise DegenerateInput("zero vector in input")
    unit = cols / norms
    gram_min = np.linalg.eigvalsh(dagger(unit) @ unit).min()
    if gram_min < tol.eps_ortho:
        raise DegenerateInput(f"vectors are numerically dependent (Gram eigenvalue {gram_min:.3g})")
    q, _ = np.linalg.qr(unit)
    pm = q @ dagger(q)
    pm = 0.5 * (pm + dagger(pm))
    return Projection(pm, cols.shape[1])


@dataclass(frozen=True)
class Cluster:
    value: complex
    multiplicity: int
    members: tuple[int, ...]


def cluster_eigenvalues(spec: Spectrum | Iterable[complex], tol: float) -> list[Cluster]:
    """Group eigenvalues whose pairwise distance chains below ``tol``.

    Clusters are the connected components of the graph joining values closer
    than ``tol``; each is represented by its mean and listed in order of its
    first member index.
    """
    values = np.asarray(spec.eigenvalues if isinstance(spec, Spectrum) else list(spec), dtype=np.complex128)
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(values[:, None] - values[None, :])
    for i, j in zip(*np.nonzero(np.triu(dist < tol, k=1))):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = [
        Cluster(complex(values[m].mean()), len(m), tuple(m))
        for m in groups.values()
    ]
    clusters.sort(key=lambda c: c.members[0])
    return clusters
