"""Static SVG diagrams of spectra and rank-2 numerical ranges.

Output is deterministic: no timestamps and a fixed SVG id salt, so identical
inputs give identical files.
"""

from __future__ import annotations

import os
import tempfile

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .numrange import RangeResult, convex_hull  # noqa: E402

_STYLE = {
    "svg.hashsalt": "compqec",
    "svg.fonttype": "none",
    "font.size": 10,
}


def _save(fig, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(suffix=".svg", dir=directory)
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    finally:
        plt.close(fig)


def _draw_range(ax, rng: RangeResult) -> None:
    if rng.kind == "point":
        ax.plot([rng.point.real], [rng.point.imag], marker="*", ms=14, color="C3",
                ls="none", label=r"$\Lambda_2$")
    elif rng.kind == "segment":
        a, b = rng.endpoints
        ax.plot([a.real, b.real], [a.imag, b.imag], lw=3, color="C3", label=r"$\Lambda_2$")


def plot_unitary(data: dict, path: str) -> None:
    """Unit circle, eigenvalues, pairing chords and ``Lambda_2``.

    ``data`` is the dictionary returned by
    :func:`compqec.numrange.unitary_plot_data`.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        t = np.linspace(0.0, 2 * np.pi, 361)
        ax.plot(np.cos(t), np.sin(t), color="0.6", lw=1)
        for a, b in data["chords"]:
            ax.plot([a.real, b.real], [a.imag, b.imag], color="C0", lw=1)
        z = np.asarray(data["eigenvalues"])
        ax.plot(z.real, z.imag, "o", color="C0", label="eigenvalues")
        _draw_range(ax, data["range"])
        ax.set_aspect("equal")
        ax.set_xlim(-1.2, 1.2)
        ax.set_ylim(-1.2, 1.2)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.legend(loc="upper right", frameon=False)
        _save(fig, path)


def plot_hermitian(eigenvalues, rng: RangeResult, k: int, path: str) -> None:
    """Eigenvalues on a number line with ``Lambda_k`` highlighted."""
    a = np.sort(np.asarray(eigenvalues, dtype=float))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6, 1.8))
        span = max(a[-1] - a[0], 1.0)
        ax.axhline(0.0, color="0.6", lw=1)
        ax.plot(a, np.zeros_like(a), "o", color="C0", label="eigenvalues")
        if rng.kind == "interval":
            ax.plot([rng.lo, rng.hi], [0.0, 0.0], lw=5, color="C3", alpha=0.7,
                    label=rf"$\Lambda_{{{k}}}$")
        elif rng.kind == "point":
            ax.plot([rng.point.real], [0.0], "*", ms=14, color="C3", label=rf"$\Lambda_{{{k}}}$")
        ax.set_xlim(a[0] - 0.1 * span, a[-1] + 0.1 * span)
        ax.set_yticks([])
        ax.legend(loc="upper right", frameon=False, ncol=2)
        _save(fig, path)


def plot_normal(eigenvalues, point: complex, inside: bool, path: str) -> None:
    """Spectrum hull with the tested point marked."""
    z = np.asarray(eigenvalues, dtype=np.complex128)
    hull = convex_hull(list(z))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        if len(hull) >= 2:
            loop = hull + hull[:1]
            ax.plot([h.real for h in loop], [h.imag for h in loop], color="0.6", lw=1)
        ax.plot(z.real, z.imag, "o", color="C0", label="eigenvalues")
        ax.plot([point.real], [point.imag], "x", ms=10, color="C2" if inside else "C3",
                label="passes hull test" if inside else "fails hull test")
        ax.set_aspect("equal")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.legend(loc="upper right", frameon=False)
        _save(fig, path)
