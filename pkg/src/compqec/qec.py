"""Knill-Laflamme verification and recovery synthesis.

A code with projection ``P`` is correctable for ``{E_a}`` exactly when
``P E_a^dagger E_b P = lambda_ab P`` for every pair; the scalars form the
matrix ``Lambda``. Recovery is built by diagonalizing ``Lambda``, which turns
the errors into ones that map the code to mutually orthogonal copies, and
undoing each copy with the adjoint of its isometry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channel import KrausChannel, apply
from .errors import DimensionMismatch, NotCorrectable, NumericalFailure, RankDeficiency
from .matcore import (
    DEFAULT_TOLERANCES,
    Projection,
    ToleranceConfig,
    as_square,
    canonical_phase,
    compression_residual,
    dagger,
    fro,
)


@dataclass(frozen=True)
class LambdaMatrix:
    entries: np.ndarray

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class VerificationReport:
    correctable: bool
    lambda_matrix: LambdaMatrix | None
    max_residual: float
    per_pair_residuals: np.ndarray
    estimates: np.ndarray


def _check_dims(ch: KrausChannel, p: Projection) -> None:
    if p.matrix.shape != (ch.dimension, ch.dimension):
        raise DimensionMismatch(
            f"projection {p.matrix.shape} does not match channel dimension {ch.dimension}"
        )


def kl_verify(ch: KrausChannel, p: Projection, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> VerificationReport:
    _check_dims(ch, p)
    m = len(ch)
    lam = np.zeros((m, m), dtype=np.complex128)
    res = np.zeros((m, m))
    for a, b in itertools.product(range(m), repeat=2):
        op = dagger(ch.kraus_ops[a]) @ ch.kraus_ops[b]
        lam[a, b], res[a, b] = compression_residual(op, p)
    max_res = float(res.max())
    correctable = max_res <= tol.eps_scalar
    return VerificationReport(
        correctable=correctable,
        lambda_matrix=LambdaMatrix(lam) if correctable else None,
        max_residual=max_res,
        per_pair_residuals=res,
        estimates=lam,
    )


def lambda_density_check(lam, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> tuple[bool, dict]:
    """Whether ``Lambda`` is a density matrix, with the numbers behind the verdict."""
    m = as_square(lam.entries if isinstance(lam, LambdaMatrix) else lam, "Lambda")
    herm = fro(m - dagger(m))
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + dagger(m))).min())
    trace = complex(np.trace(m))
    ok = herm <= tol.eps_proj and min_eig >= -tol.eps_proj and abs(trace - 1.0) <= tol.eps_tp
    return ok, {"hermitian_defect": herm, "min_eigenvalue": min_eig, "trace": trace}


def hermitian_family(ch: KrausChannel) -> list[np.ndarray]:
    """``E_a^dagger E_a`` for every ``a``, then ``T+_ab`` and ``T-_ab`` for ``a < b``."""
    ops = ch.kraus_ops
    family = [dagger(e) @ e for e in ops]
    for a, b in itertools.combinations(range(len(ops)), 2):
        x = dagger(ops[a]) @ ops[b]
        family.append(x + dagger(x))
        family.append(1j * (x - dagger(x)))
    return family


def family_verify(
    ch: KrausChannel, p: Projection, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[bool, float]:
    """Correctability judged from scalar compressions of :func:`hermitian_family`."""
    _check_dims(ch, p)
    worst = max(compression_residual(x, p)[1] for x in hermitian_family(ch))
    return worst <= tol.eps_scalar, worst


def error_block_matrix(ch: KrausChannel) -> np.ndarray:
    """The ``mN x mN`` matrix whose ``(i, j)`` block is ``E_i^dagger E_j``."""
    row = np.hstack(ch.kraus_ops)
    return dagger(row) @ row


def block_e_positivity(
    ch: KrausChannel, p: Projection, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[np.ndarray, float]:
    """Build the error block matrix and measure ``||P~ E P~ - Lambda (x) P||_F``.

    ``P~`` is ``P`` repeated on the block diagonal. The block matrix is a Gram
    matrix and must be positive semidefinite; a violation beyond
    ``eps_proj * ||E||_F`` signals numerical breakdown.
    """
    _check_dims(ch, p)
    e = error_block_matrix(ch)
    min_eig = float(np.linalg.eigvalsh(e).min())
    if min_eig < -tol.eps_proj * max(1.0, fro(e)):
        raise NumericalFailure(f"error block matrix has eigenvalue {min_eig:.3g}")
    m = len(ch)
    pt = np.kron(np.eye(m), p.matrix)
    lam = kl_verify(ch, p, tol).estimates
    return e, fro(pt @ e @ pt - np.kron(lam, p.matrix))


@dataclass(frozen=True)
class RecoveryChannel:
    channel: KrausChannel
    code: Projection


def build_recovery(
    ch: KrausChannel, p: Projection, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> RecoveryChannel:
    report = kl_verify(ch, p, tol)
    if not report.correctable:
        raise NotCorrectable(f"code fails the KL condition (residual {report.max_residual:.3g})")
    lam = report.lambda_matrix.entries
    d, mvec = np.linalg.eigh(0.5 * (lam + dagger(lam)))
    order = np.argsort(d, kind="stable")[::-1]
    d, mvec = d[order], mvec[:, order]
    rotated = ch.mixed(mvec).kraus_ops

    q = p.basis()
    n = ch.dimension
    recovery = []
    covered = np.zeros((n, n), dtype=np.complex128)
    for db, fb in zip(d, rotated):
        if db <= tol.eps_scalar:
            continue
        w, s, vh = np.linalg.svd(fb @ q, full_matrices=False)
        if s.min() <= tol.eps_scalar:
            raise RankDeficiency(
                f"F_b P has singular value {s.min():.3g} while its weight is {db:.3g}"
            )
        iso = w @ vh
        iso = iso * _phase_fix(iso[:, 0])
        recovery.append(q @ dagger(iso))
        covered += iso @ dagger(iso)
    recovery.append(np.eye(n) - covered)
    return RecoveryChannel(KrausChannel(tuple(recovery)), p)


def _phase_fix(col: np.ndarray) -> complex:
    """Phase making the largest-magnitude entry of ``col`` real positive."""
    ref = canonical_phase(col)
    idx = int(np.argmax(np.abs(col)))
    return ref[idx] / col[idx] if col[idx] != 0 else 1.0


def code_states(p: Projection, n_samples: int, seed) -> Iterable[np.ndarray]:
    """Seeded random density matrices supported on the code."""
    q = p.basis()
    k = p.rank
    for i in range(n_samples):
        rng = np.random.default_rng([int(seed), i])
        g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        rho = g @ dagger(g)
        rho /= np.trace(rho).real
        yield q @ rho @ dagger(q)


def verify_recovery(
    ch: KrausChannel, r: RecoveryChannel, p: Projection, n_samples: int = 20, seed: int = 0
) -> float:
    """Largest ``||R(E(sigma)) - sigma||_F`` over random code states."""
    _check_dims(ch, p)
    if r.channel.dimension != ch.dimension:
        raise DimensionMismatch("recovery and channel dimensions differ")
    worst = 0.0
    for sigma in code_states(p, n_samples, seed):
        out = apply(r.channel, apply(ch, sigma)).matrix
        worst = max(worst, fro(out - sigma))
    return worst
