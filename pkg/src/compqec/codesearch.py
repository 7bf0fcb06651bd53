"""Finding correctable codes from compression-values.

For a channel ``{V, W}`` on two qubits the codes are exactly the rank-2
projections compressing ``U = V^dagger W`` to a scalar in ``Lambda_2(U)``.
:func:`find_codes_buc4` enumerates those values, builds the pairing
projection for each, and in the generic case samples the full solution
family with :func:`twoqubit_generic_solve`. :func:`multi_unitary_common_code`
searches for a code shared by several unitary errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize

from .channel import KrausChannel, buc_reduce, make_buc, unitary_mixture, z1, zz
from .errors import (
    BadParameter,
    BadRank,
    BadSupport,
    DegenerateSpectrum,
    DimensionMismatch,
    EmptySweep,
    NotOrthonormal,
    NotUnitary,
    WrongDimension,
)
from .matcore import (
    DEFAULT_TOLERANCES,
    Projection,
    ToleranceConfig,
    as_square,
    dagger,
    fro,
    is_scalar_matrix,
    is_unitary,
    normal_eigendecomposition,
    principal_argument,
    projection_from_vectors,
)
from .numrange import (
    RangeResult,
    hermitian_range,
    unitary4_rank2_projection,
    unitary4_rank2_range,
    unitary_rank2_any_dim,
)
from .qec import LambdaMatrix, hermitian_family, kl_verify

DEFAULT_SEGMENT_GRID = 11
DEFAULT_SOLVER_SWEEP = 10_000
DEFAULT_FAMILY_SWEEP = 16


@dataclass(frozen=True)
class CodeProjection:
    """A code projection and its compression values ``lambda_ab`` per Kraus pair."""

    projection: Projection
    compression_values: dict


@dataclass
class CodeFamily:
    channel_fingerprint: str
    codes: list = field(default_factory=list)
    exhaustive: bool = False
    notes: str = ""
    compression_range: RangeResult | None = None


@dataclass(frozen=True)
class TwoQubitCodeParams:
    """Angles describing one code vector in the eigenbasis of ``U``."""

    alpha: tuple[float, float]
    beta: tuple[float, float]
    gamma: tuple[float, float]
    theta: tuple[tuple[float, float, float], tuple[float, float, float]]

    def coefficients(self, k: int) -> np.ndarray:
        a, b, g = self.alpha[k], self.beta[k], self.gamma[k]
        t2, t3, t4 = self.theta[k]
        return np.array([
            math.cos(a) * math.cos(b),
            np.exp(1j * t2) * math.sin(a) * math.cos(g),
            np.exp(1j * t3) * math.cos(a) * math.sin(b),
            np.exp(1j * t4) * math.sin(a) * math.sin(g),
        ])


def _pair_values(values: np.ndarray) -> dict:
    m = values.shape[0]
    return {(a, b): complex(values[a, b]) for a in range(m) for b in range(m)}


def _unit_pair_values(lam: complex) -> dict:
    """Compression values for the Kraus list ``[1, A]`` with ``PAP = lam P``."""
    lam = complex(lam)
    return {(0, 0): 1.0 + 0j, (0, 1): lam, (1, 0): lam.conjugate(), (1, 1): 1.0 + 0j}


def code_for_channel(
    ch: KrausChannel, p: Projection, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[CodeProjection, LambdaMatrix] | None:
    """Verified ``(code, Lambda)`` for ``ch``, or ``None`` when KL fails."""
    report = kl_verify(ch, p, tol)
    if not report.correctable:
        return None
    return CodeProjection(p, _pair_values(report.estimates)), report.lambda_matrix


# --- Pauli examples ------------------------------------------------------------


def zz_code(a: float) -> CodeProjection:
    """Code ``span{sqrt(a)|00> + sqrt(1-a)|01>, sqrt(a)|11> + sqrt(1-a)|10>}``.

    Both vectors carry the same weight so that ``P ZZ P = (2a - 1) P``.
    Compression values refer to the Kraus list ``[1, ZZ]``.
    """
    if not (0.0 <= a <= 1.0):
        raise BadParameter(f"a must lie in [0, 1], got {a}")
    s, c = math.sqrt(a), math.sqrt(1.0 - a)
    psi1 = np.array([s, c, 0.0, 0.0], dtype=np.complex128)
    psi2 = np.array([0.0, 0.0, c, s], dtype=np.complex128)
    pm = np.outer(psi1, psi1.conj()) + np.outer(psi2, psi2.conj())
    return CodeProjection(Projection(pm, 2), _unit_pair_values(2.0 * a - 1.0))


def z1_code(psi_plus, phi_plus, psi_minus, phi_minus, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> CodeProjection:
    """Code ``span{psi+ + psi-, phi+ + phi-}`` compressing ``Z x 1`` to zero.

    ``psi+, phi+`` must be orthonormal in ``span{|00>, |01>}`` and
    ``psi-, phi-`` orthonormal in ``span{|10>, |11>}``. Compression values
    refer to the Kraus list ``[1, Z1]``.
    """
    plus = np.diag([1.0, 1.0, 0.0, 0.0])
    minus = np.eye(4) - plus
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in (psi_plus, phi_plus, psi_minus, phi_minus)]
    if any(v.shape != (4,) for v in vecs):
        raise DimensionMismatch("vectors must live in a two-qubit space")
    for (u, v), sector in (((vecs[0], vecs[1]), minus), ((vecs[2], vecs[3]), plus)):
        gram = np.array([[np.vdot(x, y) for y in (u, v)] for x in (u, v)])
        if fro(gram - np.eye(2)) > tol.eps_ortho * 10:
            raise NotOrthonormal("each eigenspace pair must be orthonormal")
        if max(np.linalg.norm(sector @ u), np.linalg.norm(sector @ v)) > tol.eps_ortho * 10:
            raise BadSupport("vector leaks outside its Z1 eigenspace")
    p = projection_from_vectors([vecs[0] + vecs[2], vecs[1] + vecs[3]], tol)
    return CodeProjection(p, _unit_pair_values(0.0))


# --- generic two-qubit solution family ---------------------------------------------


def _canonical_rotation(z: np.ndarray) -> int:
    """Start index for a cyclic order that does not depend on a global phase.

    The eigenvalue following the widest angular gap comes first.
    """
    theta = principal_argument(z)
    gaps = np.diff(np.append(theta, theta[0] + 2 * np.pi))
    return int((np.argmax(gaps) + 1) % len(z))


def _isotropic_in_plane(basis: np.ndarray, d: np.ndarray, phase: float) -> np.ndarray | None:
    """Unit vector ``x`` in ``span(basis)`` with ``<x|D|x> = 0``.

    Works in the eigenbasis of one Hermitian part of the compressed operator;
    the free relative phase is taken closest to ``phase``.
    """
    b = dagger(basis) @ d @ basis
    h1 = 0.5 * (b + dagger(b))
    h2 = -0.5j * (b - dagger(b))
    if np.ptp(np.linalg.eigvalsh(h2)) > np.ptp(np.linalg.eigvalsh(h1)):
        h1, h2 = h2, h1
    w, v = np.linalg.eigh(h1)
    lo, hi = w
    if lo > 1e-12 or hi < -1e-12:
        return None
    cos2 = 0.5 if hi - lo < 1e-14 else min(1.0, max(0.0, hi / (hi - lo)))
    ct, st = math.sqrt(cos2), math.sqrt(1.0 - cos2)
    g = dagger(v) @ h2 @ v
    diag_part = cos2 * g[0, 0].real + (1.0 - cos2) * g[1, 1].real
    cross = 2.0 * ct * st
    g12 = g[0, 1]
    if cross * abs(g12) < 1e-12:
        if abs(diag_part) > 1e-10:
            return None
        phi = phase
    else:
        target = -diag_part / (cross * abs(g12))
        if abs(target) > 1.0 + 1e-12:
            return None
        base = math.acos(min(1.0, max(-1.0, target)))
        shift = -np.angle(g12)
        roots = [base + shift, -base + shift]
        phi = min(roots, key=lambda r: abs(np.angle(np.exp(1j * (r - phase)))))
    x = v @ np.array([ct, np.exp(1j * phi) * st])
    return basis @ x


def _coordinate_partner(xi1: np.ndarray, point: np.ndarray, weights) -> np.ndarray | None:
    """Second code vector when ``xi1`` lies in the plane of one eigenvalue pair.

    The partner takes the same form on the other pair, with the sweep phase
    ``xi1`` does not use.
    """
    cb, sb, cg, sg = weights
    support = tuple(np.flatnonzero(np.abs(xi1) > 1e-12))
    if support == (0, 2):
        return np.array([0.0, cg, 0.0, np.exp(1j * point[3]) * sg])
    if support == (1, 3):
        return np.array([cb, 0.0, np.exp(1j * point[2]) * sb, 0.0])
    return None


def _sweep_points(sweep, seed) -> np.ndarray:
    if isinstance(sweep, (int, np.integer)):
        if sweep <= 0:
            raise EmptySweep("sweep must contain at least one point")
        rng = np.random.default_rng(seed)
        pts = np.empty((int(sweep), 4))
        pts[:, 0] = rng.uniform(0.0, 0.5 * np.pi, int(sweep))
        pts[:, 1:] = rng.uniform(0.0, 2 * np.pi, (int(sweep), 3))
        return pts
    pts = np.atleast_2d(np.asarray(sweep, dtype=float))
    if pts.size == 0:
        raise EmptySweep("sweep must contain at least one point")
    if pts.shape[1] != 4:
        raise BadParameter("explicit sweep points are rows (alpha, theta2, theta3, theta4)")
    return pts


def twoqubit_generic_solve(
    u,
    sweep=DEFAULT_SOLVER_SWEEP,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> list[CodeProjection]:
    """Sample the rank-2 codes of ``{1, U}`` for a non-degenerate 4x4 unitary.

    Work with ``D = U - lam`` where ``lam`` is the unique compression-value,
    expressed in the eigenbasis of ``U``. Each sweep point
    ``(alpha, theta2, theta3, theta4)`` fixes a first code vector

        xi1 = (cos a cos b, e^{i t2} sin a cos g, e^{i t3} cos a sin b, e^{i t4} sin a sin g)

    whose angles ``b`` and ``g`` are pinned by requiring ``<xi1|D|xi1> = 0``.
    The second vector must be orthogonal to ``xi1``, ``D xi1`` and
    ``D^dagger xi1``; it is accepted when ``<xi2|D|xi2>`` also vanishes.
    Passing an ``(n, 4)`` array as ``sweep`` gives explicit points.
    """
    u = as_square(u, "U")
    if u.shape != (4, 4):
        raise WrongDimension(f"expected a 4x4 unitary, got {u.shape}")
    rng_result = unitary4_rank2_range(u, tol)
    if rng_result.case_label != "a":
        raise DegenerateSpectrum(f"spectrum is degenerate (case {rng_result.case_label})")
    lam = rng_result.point
    points = _sweep_points(sweep, seed)

    spec = normal_eigendecomposition(u, tol, ordering="ascending-argument")
    start = _canonical_rotation(spec.eigenvalues)
    order = [(start + j) % 4 for j in range(4)]
    z = spec.eigenvalues[order]
    psi = spec.eigenvectors[:, order]
    zs = z - lam
    d = np.diag(zs)
    cos2_beta = abs(zs[2]) / (abs(zs[0]) + abs(zs[2]))
    cos2_gamma = abs(zs[3]) / (abs(zs[1]) + abs(zs[3]))
    cb, sb = math.sqrt(cos2_beta), math.sqrt(1.0 - cos2_beta)
    cg, sg = math.sqrt(cos2_gamma), math.sqrt(1.0 - cos2_gamma)

    alpha = points[:, 0]
    xi1 = np.stack([
        np.cos(alpha) * cb + 0j,
        np.exp(1j * points[:, 1]) * np.sin(alpha) * cg,
        np.exp(1j * points[:, 2]) * np.cos(alpha) * sb,
        np.exp(1j * points[:, 3]) * np.sin(alpha) * sg,
    ], axis=1)
    span = np.stack([xi1, xi1 * zs, xi1 * zs.conj()], axis=2)
    left, sv, _ = np.linalg.svd(span, full_matrices=True)

    scale = max(1.0, fro(u))
    codes = []
    for i in range(len(points)):
        if sv[i, 2] > 1e-6:
            xi2 = left[i, :, 3]
        else:
            xi2 = _coordinate_partner(xi1[i], points[i], (cb, sb, cg, sg))
            if xi2 is None:
                xi2 = _isotropic_in_plane(left[i, :, 2:4], d, points[i, 3])
            if xi2 is None:
                continue
        xi2 = xi2 - np.vdot(xi1[i], xi2) * xi1[i]
        xi2 = xi2 / np.linalg.norm(xi2)
        if abs(np.vdot(xi2, zs * xi2)) > tol.eps_scalar:
            continue
        vecs = psi @ np.column_stack([xi1[i], xi2])
        pm = vecs @ dagger(vecs)
        p = Projection(0.5 * (pm + dagger(pm)), 2)
        if fro(pm @ u @ pm - lam * pm) > tol.eps_scalar * scale:
            continue
        codes.append(CodeProjection(p, _unit_pair_values(lam)))
    return codes


# --- bi-unitary channels on two qubits ----------------------------------------------

_CASE_NOTES = {
    "a": "non-degenerate spectrum: single compression-value at the chord crossing",
    "b": "one doubly degenerate eigenvalue: codes from its eigenspace",
    "c": "two doubly degenerate eigenvalues: compression-values fill a segment",
    "d": "triple eigenvalue: every rank-2 subspace of its eigenspace is correctable",
    "e": "scalar error: all rank-2 subspaces correctable",
}


def _dedupe(codes: list, tol: float = 1e-8) -> list:
    out = []
    for item in codes:
        pm = item[0].projection.matrix
        if all(fro(pm - other[0].projection.matrix) > tol for other in out):
            out.append(item)
    return out


def find_codes_buc4(
    V,
    W,
    p: float,
    grid: int = DEFAULT_SEGMENT_GRID,
    sweep=DEFAULT_FAMILY_SWEEP,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CodeFamily:
    """Rank-2 correctable codes for the two-qubit channel ``{V, W}``."""
    ch = make_buc(V, W, p, tol)
    if ch.dimension != 4:
        raise WrongDimension(f"two-qubit search needs 4x4 unitaries, got {ch.dimension}")
    kraus = ch.kraus()
    u = buc_reduce(ch)
    rng = unitary4_rank2_range(u, tol)
    values = rng.sample(grid) if rng.kind != "point" else [rng.point]

    candidates = [unitary4_rank2_projection(u, lam, tol) for lam in values]
    if rng.case_label == "a" and sweep:
        candidates += [c.projection for c in twoqubit_generic_solve(u, sweep, seed, tol)]

    verified = [code_for_channel(kraus, cand, tol) for cand in candidates]
    codes = _dedupe([v for v in verified if v is not None])
    rejected = sum(v is None for v in verified)
    notes = _CASE_NOTES[rng.case_label]
    if rejected:
        notes += f"; {rejected} candidate(s) failed verification"
    return CodeFamily(
        channel_fingerprint=kraus.fingerprint(),
        codes=codes,
        exhaustive=rng.case_label in ("d", "e"),
        notes=notes,
        compression_range=rng,
    )


def pauli_demo_channel(model: str, p: float):
    """Bi-unitary channel ``{1, ZZ}`` or ``{1, Z1}`` on two qubits."""
    ops = {"ZZ": zz, "Z1": lambda: z1(2)}
    if model not in ops:
        raise BadParameter(f"unknown Pauli model {model!r}")
    return make_buc(np.eye(4), ops[model](), p)


# --- several unitary errors ---------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    random_trials: int = 100_000
    refine_starts: int = 4
    batch: int = 20_000
    max_nfev: int = 400


@dataclass(frozen=True)
class CommonCodeResult:
    code: CodeProjection | None
    proven_empty: bool = False
    best_residual: float = math.inf
    notes: str = ""

    @property
    def found(self) -> bool:
        return self.code is not None


def _scalar_defects(q: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """``Q^dagger A Q - (tr/k) 1`` for a batch of isometries ``q`` (T, N, k)."""
    k = q.shape[-1]
    qh = np.swapaxes(q.conj(), -1, -2)[:, None]
    comp = qh @ (ops[None] @ q[:, None])
    tr = np.trace(comp, axis1=2, axis2=3) / k
    return comp - tr[..., None, None] * np.eye(k)


def _isometry(x: np.ndarray, n: int, k: int) -> np.ndarray:
    """Orthonormalized ``n x k`` matrix from real parameters (batched over leading axes)."""
    nk = n * k
    m = x[..., :nk].reshape(x.shape[:-1] + (n, k)) + 1j * x[..., nk:].reshape(x.shape[:-1] + (n, k))
    q, _ = np.linalg.qr(m)
    return q


def _stacked_residuals(x: np.ndarray, ops: np.ndarray, n: int, k: int) -> np.ndarray:
    dev = _scalar_defects(_isometry(x, n, k), ops)
    flat = dev.reshape(dev.shape[0], -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def _refine(q0: np.ndarray, ops: np.ndarray, max_nfev: int) -> tuple[np.ndarray, float]:
    n, k = q0.shape
    step = np.sqrt(np.finfo(float).eps)

    def residuals(x):
        return _stacked_residuals(x[None], ops, n, k)[0]

    def jacobian(x):
        # forward differences, all directions evaluated as one stack
        h = step * np.maximum(1.0, np.abs(x))
        pts = np.vstack([x, x + np.diag(h)])
        r = _stacked_residuals(pts, ops, n, k)
        return ((r[1:] - r[0]) / h[:, None]).T

    x0 = np.concatenate([q0.real.ravel(), q0.imag.ravel()])
    sol = scipy.optimize.least_squares(
        residuals, x0, jac=jacobian, xtol=1e-12, ftol=1e-10, gtol=1e-12, max_nfev=max_nfev
    )
    q = _isometry(sol.x, n, k)
    worst = float(np.linalg.norm(_scalar_defects(q[None], ops)[0], axis=(1, 2)).max())
    return q, worst


def multi_unitary_common_code(
    unitaries: Sequence,
    k: int = 2,
    budget: SearchBudget = SearchBudget(),
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CommonCodeResult:
    """Search for one rank-``k`` code correcting every unitary error at once.

    The code must compress each product ``U_i^dagger U_j`` to a scalar.
    Random isometries are screened by the summed squared defect, then the
    best few (plus pairing codes of each product) are polished by nonlinear
    least squares. Failing to find a code is a search outcome; the result is
    flagged ``proven_empty`` only when some Hermitian combination of the
    errors has an empty rank-``k`` range.
    """
    us = [as_square(x, "U") for x in unitaries]
    if not us:
        raise BadParameter("need at least one unitary")
    n = us[0].shape[0]
    if any(x.shape != (n, n) for x in us):
        raise DimensionMismatch("unitaries differ in size")
    if not (2 <= k <= n):
        raise BadRank(f"code rank must lie in [2, {n}], got {k}")
    for x in us:
        if not is_unitary(x, tol.eps_proj * math.sqrt(n)):
            raise NotUnitary("every error operator must be unitary")
    ch = unitary_mixture(us)

    ops = []
    for i in range(len(us)):
        for j in range(i + 1, len(us)):
            prod = dagger(us[i]) @ us[j]
            if not is_scalar_matrix(prod, tol.eps_scalar):
                ops.append(prod)

    if not ops:
        p = Projection(np.diag([1.0] * k + [0.0] * (n - k)).astype(np.complex128), k)
        verified = code_for_channel(ch, p, tol)
        return CommonCodeResult(verified[0], best_residual=0.0, notes="all errors act as scalars")

    for x in hermitian_family(ch):
        if hermitian_range(x, k, tol).is_empty:
            return CommonCodeResult(None, proven_empty=True, notes=f"a Hermitian error combination has empty rank-{k} range")

    stack = np.asarray(ops)
    rng = np.random.default_rng(seed)
    best_q: list[tuple[float, np.ndarray]] = []
    remaining = budget.random_trials
    while remaining > 0:
        t = min(budget.batch, remaining)
        remaining -= t
        g = rng.standard_normal((t, n, k)) + 1j * rng.standard_normal((t, n, k))
        q, _ = np.linalg.qr(g)
        score = (np.abs(_scalar_defects(q, stack)) ** 2).sum(axis=(1, 2, 3))
        for idx in np.argsort(score)[: budget.refine_starts]:
            best_q.append((float(score[idx]), q[idx]))
        best_q = sorted(best_q, key=lambda item: item[0])[: budget.refine_starts]

    starts = [q for _, q in best_q]
    if k == 2 and n >= 4:
        for op in ops:
            _, p = unitary_rank2_any_dim(op, tol)
            starts.append(p.basis())

    best = math.inf
    for q0 in starts:
        q, worst = _refine(q0, stack, budget.max_nfev)
        best = min(best, worst)
        if worst <= tol.eps_scalar:
            pm = q @ dagger(q)
            verified = code_for_channel(ch, Projection(0.5 * (pm + dagger(pm)), k), tol)
            if verified is not None:
                return CommonCodeResult(verified[0], best_residual=worst, notes="common code found")
    return CommonCodeResult(None, best_residual=best, notes="no common code found within the search budget")
