"""Eigendecomposition of real symmetric tridiagonal matrices.

Implicit-shift QL with Wilkinson-type shifts and accumulated Givens
rotations (the imtql2 scheme of Martin & Wilkinson / Dubrulle). The hot loop
is compiled with numba; the wrapper does validation, sorting and gauge
fixing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from tcbattery.errors import ConvergenceError
from tcbattery.model import TridiagonalHamiltonian

MAX_ITERATIONS = 50
# components below this magnitude are skipped when fixing the eigenvector sign
GAUGE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column k belongs to eigenvalue k

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def initial_overlaps(self) -> np.ndarray:
        """``U^T e_1``: overlap of every eigenvector with basis state 0."""
        return self.eigenvectors[0]

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


@numba.njit(cache=True)
def _imtql2(d, e, zt, max_iter):
    # d: diagonal (overwritten by eigenvalues), e: off-diagonal padded to n,
    # zt: identity on entry, row i ends up as eigenvector i.
    # Returns -1 on success, otherwise the index that failed to converge.
    n = d.size
    eps = np.finfo(np.float64).eps
    # off-diagonals below sqrt(tiny) are dropped: products of two such
    # entries underflow and the sweep would stall (input is at unit scale)
    floor = math.sqrt(np.finfo(np.float64).tiny)
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m + 1 < n:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])) or abs(e[m]) < floor:
                    break
                m += 1
            if m == l:
                break
            if it >= max_iter:
                return l
            it += 1

            p = d[l]
            g = (d[l + 1] - p) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - p + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for w in range(n):
                    zf = zt[i + 1, w]
                    zi = zt[i, w]
                    zt[i + 1, w] = s * zi + c * zf
                    zt[i, w] = c * zi - s * zf
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def decompose(h: TridiagonalHamiltonian, max_iter: int = MAX_ITERATIONS) -> EigenDecomposition:
    """Full spectrum and eigenvectors of ``h``.

    Eigenvalues come back ascending. Each eigenvector is normalised so that
    its first component exceeding ``GAUGE_THRESHOLD`` in magnitude is
    positive, which makes the output reproducible.

    Raises ConvergenceError if some eigenvalue needs more than ``max_iter``
    QL sweeps.
    """
    n = h.dim
    d = np.array(h.diagonal, dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    e[: n - 1] = h.off_diagonal
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise ValueError("tridiagonal matrix has non-finite entries")
    # work at unit scale so tiny or huge inputs do not under/overflow
    scale = max(np.max(np.abs(d)), np.max(np.abs(e)))
    if scale > 0:
        d /= scale
        e /= scale
    zt = np.eye(n)
    failed = _imtql2(d, e, zt, max_iter)
    if failed >= 0:
        raise ConvergenceError(n, int(failed), max_iter)

    order = np.argsort(d, kind="stable")
    values = d[order] * scale if scale > 0 else d[order]
    vectors = zt[order].T.copy()
    for k in range(n):
        col = vectors[:, k]
        big = np.flatnonzero(np.abs(col) > GAUGE_THRESHOLD)
        if big.size and col[big[0]] < 0:
            vectors[:, k] = -col
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values, vectors)
