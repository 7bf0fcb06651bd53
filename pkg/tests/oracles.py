"""Reference computations that do not reuse the package's own algorithms."""

import numpy as np
from scipy.spatial import Delaunay


def compress(a, q):
    """``Q^dagger A Q`` for an isometry ``Q`` (columns span the code)."""
    return q.conj().T @ a @ q


def scalar_part(m):
    """Best scalar approximation of a square matrix and the Frobenius distance to it."""
    lam = np.trace(m) / m.shape[0]
    return lam, float(np.linalg.norm(m - lam * np.eye(m.shape[0])))


def basis_of(p, rank):
    w, v = np.linalg.eigh(p)
    return v[:, np.argsort(w)[::-1][:rank]]


def kl_residual(kraus, p, rank):
    """Largest distance of ``Q^dagger E_a^dagger E_b Q`` from a scalar."""
    q = basis_of(p, rank)
    worst = 0.0
    for ea in kraus:
        for eb in kraus:
            worst = max(worst, scalar_part(compress(ea.conj().T @ eb, q))[1])
    return worst


def lines_cross(z1, z2, z3, z4):
    """Intersection of line z1-z3 with line z2-z4 via the determinant formula."""
    x1, y1, x2, y2 = z1.real, z1.imag, z3.real, z3.imag
    x3, y3, x4, y4 = z2.real, z2.imag, z4.real, z4.imag
    den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    a = x1 * y2 - y1 * x2
    b = x3 * y4 - y3 * x4
    return complex((a * (x3 - x4) - (x1 - x2) * b) / den, (a * (y3 - y4) - (y1 - y2) * b) / den)


def in_hull(points, z, slack=1e-9):
    """Membership in the convex hull of 2-D points using a Delaunay triangulation."""
    pts = np.array([[p.real, p.imag] for p in points])
    target = np.array([z.real, z.imag])
    if len(pts) < 3 or np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-12) < 2:
        d = pts[np.argmax(np.linalg.norm(pts - pts[0], axis=1))] - pts[0]
        if not d.any():
            return np.linalg.norm(target - pts[0]) <= slack
        t = np.clip(np.dot(target - pts[0], d) / np.dot(d, d), 0, 1)
        return np.linalg.norm(pts[0] + t * d - target) <= slack
    tri = Delaunay(pts)
    if tri.find_simplex(target) >= 0:
        return True
    # points sitting on the hull boundary up to rounding
    for dx, dy in ((slack, 0), (-slack, 0), (0, slack), (0, -slack)):
        if tri.find_simplex(target + [dx, dy]) >= 0:
            return True
    return False


def apply_channel(kraus, rho):
    return sum(e @ rho @ e.conj().T for e in kraus)
