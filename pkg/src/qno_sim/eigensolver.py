"""Dense real-symmetric eigendecomposition.

Householder reduction to tridiagonal form followed by the implicit-shift QL
iteration with eigenvector accumulation.  The kernels are compiled with
numba and release the GIL, so independent decompositions can run on
separate threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import OperatorMatrix
from .errors import ContractError, DomainError, EigenError, NumericalError

MAX_SWEEPS = 50
ORTHO_TOL = 1e-10
FLUSH = 1e-200


@numba.njit(cache=True, nogil=True)
def _tred2(a, d, e):
    # on exit a holds the orthogonal reduction matrix, d the diagonal, e the subdiagonal in e[1:]
    n = a.shape[0]
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            scale = 0.0
            for k in range(l + 1):
                scale += abs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    a[j, i] = a[i, j] / h
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, l + 1):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = a[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        if d[i] != 0.0:
            for j in range(i):
                g = 0.0
                for k in range(i):
                    g += a[i, k] * a[k, j]
                for k in range(i):
                    a[k, j] -= g * a[k, i]
        d[i] = a[i, i]
        a[i, i] = 1.0
        for j in range(i):
            a[j, i] = 0.0
            a[i, j] = 0.0


@numba.njit(cache=True, nogil=True)
def _tqli(d, e, z, max_sweeps):
    # returns 0 on success, otherwise 1 + index of the eigenvalue that failed
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                return l + 1
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues, column eigenvectors and the worst residual norm."""

    values: np.ndarray
    vectors: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def lowest(self, k: int) -> np.ndarray:
        return self.values[:k]

    def state(self, index: int) -> np.ndarray:
        return self.vectors[:, index]


def _as_symmetric(h):
    if isinstance(h, OperatorMatrix):
        if h.symmetry != "symmetric":
            raise ContractError(f"eigh needs a symmetric operator, got {h.symmetry}")
        return np.array(h.data, dtype=np.float64)
    return np.array(OperatorMatrix(h, "symmetric").data, dtype=np.float64)


def eigh(h, tol: float = 1e-9) -> SpectrumResult:
    """Full eigendecomposition of a real symmetric matrix.

    Eigenvector signs are fixed so that the largest-magnitude component of
    each column is positive (ties go to the lowest index).  Raises
    EigenError if the QL iteration needs more than 50 sweeps for some
    eigenvalue or if the result misses the residual bound
    ``tol * (1 + max|lambda|)``.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    a = _as_symmetric(h)
    n = a.shape[0]
    # exact power-of-two rescale to unit size; entries far below the norm would
    # underflow inside the Householder step, so they are flushed to zero
    size = float(np.max(np.abs(a), initial=0.0))
    unit = 2.0 ** np.frexp(size)[1] if size > 0 else 1.0
    work = a / unit
    work[np.abs(work) < FLUSH] = 0.0
    work = np.ascontiguousarray(work)
    d = np.zeros(n)
    e = np.zeros(n)
    if n == 1:
        return SpectrumResult(a[0].copy(), np.ones((1, 1)), 0.0)
    _tred2(work, d, e)
    status = _tqli(d, e, work, MAX_SWEEPS)
    if status:
        raise EigenError(
            f"QL iteration exceeded {MAX_SWEEPS} sweeps at eigenvalue {status - 1}",
            achieved=float(np.max(np.abs(e))),
        )
    d *= unit
    order = np.argsort(d, kind="stable")
    values = d[order]
    vectors = work[:, order]
    peak = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[peak, np.arange(n)])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    scaled = a / unit
    residual = unit * float(np.max(np.linalg.norm(scaled @ vectors - vectors * (values / unit), axis=0)))
    scale = 1.0 + float(np.max(np.abs(values)))
    if residual >= tol * scale:
        raise EigenError(f"eigen-residual {residual:.3e} exceeds tolerance", achieved=residual)
    ortho = float(np.max(np.abs(vectors.T @ vectors - np.eye(n))))
    if ortho >= ORTHO_TOL:
        raise EigenError(f"eigenvectors not orthonormal ({ortho:.3e})", achieved=ortho)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectrumResult(values, vectors, residual)


def convergence_sweep(make, k: int, n_start: int, n_step: int = 10, tol: float = 1e-8, n_max: int = 200):
    """Grow the truncation until the lowest ``k`` eigenvalues settle.

    ``make(N)`` returns the Hamiltonian for truncation N.  Returns the
    smallest swept N whose lowest ``k`` eigenvalues move by less than ``tol``
    when N grows by ``n_step``, together with the spectrum at that N.  If the
    next N cannot be built (DomainError, e.g. the MPT guard) or exceeds
    ``n_max``, NumericalError is raised with the best change achieved.
    """
    if k < 1 or n_step < 1 or n_start < 1:
        raise ValueError("k, n_start and n_step must be positive")
    n = n_start
    current = eigh(make(n))
    best = np.inf
    while True:
        nxt = n + n_step
        if nxt > n_max:
            break
        try:
            h = make(nxt)
        except DomainError:
            break
        following = eigh(h)
        kk = min(k, current.dim)
        delta = float(np.max(np.abs(following.values[:kk] - current.values[:kk])))
        if delta < tol:
            return n, current
        best = min(best, delta)
        n, current = nxt, following
    raise NumericalError(
        f"lowest {k} eigenvalues not converged to {tol:g} by N = {n} (best change {best:.3e})",
        achieved=best,
    )
