"""Quantum channels in operator-sum form.

Kraus weights are folded into the operators: a bi-unitary channel with
probability ``p`` has Kraus list ``[sqrt(p) V, sqrt(1-p) W]``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadProbability,
    DimensionMismatch,
    NotTracePreserving,
    NotUnitary,
    PreconditionError,
)
from .matcore import (
    DEFAULT_TOLERANCES,
    ToleranceConfig,
    as_square,
    dagger,
    fro,
    hermitian_defect,
    is_unitary,
)


@dataclass(frozen=True)
class KrausChannel:
    """Trace-preserving channel ``rho -> sum_a E_a rho E_a^dagger``."""

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_square(e, "Kraus operator") for e in self.kraus_ops)
        if not ops:
            raise PreconditionError("a channel needs at least one Kraus operator")
        if len({e.shape for e in ops}) != 1:
            raise DimensionMismatch("Kraus operators have different shapes")
        object.__setattr__(self, "kraus_ops", ops)

    @classmethod
    def checked(cls, ops: Sequence, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> "KrausChannel":
        ch = cls(tuple(ops))
        defect = ch.tp_defect()
        if defect > tol.eps_tp:
            raise NotTracePreserving(f"sum E_a^dagger E_a differs from identity by {defect:.3g}")
        return ch

    @property
    def dimension(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __len__(self):
        return len(self.kraus_ops)

    def tp_defect(self) -> float:
        total = sum(dagger(e) @ e for e in self.kraus_ops)
        return fro(total - np.eye(self.dimension))

    def padded(self, length: int) -> "KrausChannel":
        """Same channel with zero operators appended up to ``length``."""
        extra = max(0, length - len(self))
        zeros = tuple(np.zeros_like(self.kraus_ops[0]) for _ in range(extra))
        return KrausChannel(self.kraus_ops + zeros)

    def mixed(self, u: np.ndarray) -> "KrausChannel":
        """Equivalent channel with operators ``F_b = sum_a u[a, b] E_a``."""
        ops = np.asarray(self.kraus_ops)
        return KrausChannel(tuple(np.einsum("ab,aij->bij", u, ops)))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for e in self.kraus_ops:
            h.update(np.ascontiguousarray(e + 0.0).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class BiUnitaryChannel:
    """``rho -> p V rho V^dagger + (1-p) W rho W^dagger``."""

    V: np.ndarray
    W: np.ndarray
    p: float

    @property
    def dimension(self) -> int:
        return self.V.shape[0]

    def kraus(self) -> KrausChannel:
        return KrausChannel((math.sqrt(self.p) * self.V, math.sqrt(1.0 - self.p) * self.W))


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    @classmethod
    def checked(cls, m, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> "DensityMatrix":
        m = as_square(m, "density matrix")
        if hermitian_defect(m) > tol.eps_proj:
            raise PreconditionError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > tol.eps_proj:
            raise PreconditionError(f"density matrix trace {np.trace(m).real:.6g} != 1")
        if np.linalg.eigvalsh(0.5 * (m + dagger(m))).min() < -tol.eps_proj:
            raise PreconditionError("density matrix has a negative eigenvalue")
        return cls(m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def make_buc(V, W, p: float, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> BiUnitaryChannel:
    V = as_square(V, "V")
    W = as_square(W, "W")
    if V.shape != W.shape:
        raise DimensionMismatch(f"V {V.shape} and W {W.shape} differ in size")
    if not (0.0 < p < 1.0):
        raise BadProbability(f"p must lie strictly between 0 and 1, got {p}")
    unit_tol = tol.eps_proj * math.sqrt(V.shape[0])
    for name, m in (("V", V), ("W", W)):
        if not is_unitary(m, unit_tol):
            raise NotUnitary(f"{name} is not unitary")
    return BiUnitaryChannel(V, W, float(p))


def buc_reduce(ch: BiUnitaryChannel) -> np.ndarray:
    """``V^dagger W``: the channel ``{V, W}`` has the same codes as ``{1, V^dagger W}``."""
    return dagger(ch.V) @ ch.W


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_square(rho, "rho")
    if m.shape != (ch.dimension, ch.dimension):
        raise DimensionMismatch(f"state {m.shape} does not match channel dimension {ch.dimension}")
    out = sum(e @ m @ dagger(e) for e in ch.kraus_ops)
    return DensityMatrix(out)


def unitary_mixture(unitaries: Sequence, weights: Sequence[float] | None = None) -> KrausChannel:
    """Randomized unitary channel ``sum_k p_k U_k rho U_k^dagger``."""
    us = [as_square(u, "U") for u in unitaries]
    if weights is None:
        weights = [1.0 / len(us)] * len(us)
    if len(weights) != len(us) or any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
        raise BadProbability("weights must be a probability vector matching the unitaries")
    return KrausChannel(tuple(math.sqrt(w) * u for w, u in zip(weights, us)))


# --- Pauli operators -----------------------------------------------------------

IDENTITY2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def tensor(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for op in ops:
        out = np.kron(out, op)
    return out


def pauli_z() -> np.ndarray:
    return PAULI_Z.copy()


def z1(n: int) -> np.ndarray:
    """``Z`` on the first of ``n`` qubits."""
    if n < 1:
        raise PreconditionError("need at least one qubit")
    return tensor(PAULI_Z, np.eye(2 ** (n - 1)))


def zz() -> np.ndarray:
    return tensor(PAULI_Z, PAULI_Z)


def pauli_builders() -> dict:
    return {"Z": pauli_z, "Z1": z1, "ZZ": zz, "tensor": tensor}


# --- random objects --------------------------------------------------------------


def random_unitary(n: int, seed) -> np.ndarray:
    """Haar-random ``n x n`` unitary (QR of a complex Ginibre matrix, phases fixed)."""
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(n: int, seed, rank: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = n if rank is None else rank
    g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_hermitian(n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + dagger(a)


def random_kraus_channel(n: int, m: int, seed) -> KrausChannel:
    """Channel with ``m`` Kraus operators cut from a Haar-random isometry."""
    u = random_unitary(n * m, seed)[:, :n]
    return KrausChannel(tuple(u[a * n:(a + 1) * n, :] for a in range(m)))


def random_projection_matrix(n: int, k: int, seed) -> np.ndarray:
    q = random_unitary(n, seed)[:, :k]
    return q @ dagger(q)
