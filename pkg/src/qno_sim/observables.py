"""Reduced states and ground-state observables of the composite system.

States are real vectors of length 2N in the e-block-first order, so a
state reshaped to (2, N) has the qubit as row index and the oscillator
level as column index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import OperatorMatrix
from .eigensolver import eigh
from .errors import ContractError
from .pt_exact import PtBasis, support_radius, wavefunction_table
from .quadrature import integrate

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-8
ENTROPY_FLOOR = 1e-14
WIGNER_ATOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    """Real symmetric, unit-trace, positive semidefinite matrix."""

    data: np.ndarray

    def __post_init__(self):
        rho = np.array(self.data, dtype=float)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ContractError(f"density matrix must be square, got {rho.shape}")
        asym = np.max(np.abs(rho - rho.T), initial=0.0)
        if asym > 1e-12:
            raise ContractError(f"density matrix not symmetric ({asym:.3e})")
        rho = 0.5 * (rho + rho.T)
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractError(f"density matrix trace {tr:.12f} differs from 1")
        low = eigh(rho).values[0]
        if low < -PSD_TOL:
            raise ContractError(f"density matrix has negative eigenvalue {low:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "data", rho)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return eigh(self.data).values


def _split(state, fock_dim=None):
    v = np.asarray(state, dtype=float).ravel()
    if v.size % 2:
        raise ContractError("composite state must have even length 2N")
    if fock_dim is not None and v.size != 2 * fock_dim:
        raise ContractError(f"state length {v.size} does not match 2N = {2 * fock_dim}")
    dev = abs(np.linalg.norm(v) - 1.0)
    if dev > NORM_TOL:
        raise ContractError(f"state norm deviates from 1 by {dev:.3e}")
    return v.reshape(2, -1)


def reduce_qubit(state) -> DensityMatrix:
    """2 x 2 qubit density, oscillator traced out; index 0 is |e>."""
    psi = _split(state)
    return DensityMatrix(psi @ psi.T)


def reduce_oscillator(state) -> DensityMatrix:
    """N x N oscillator density, qubit traced out."""
    psi = _split(state)
    return DensityMatrix(psi.T @ psi)


def mean_excitation(rho: DensityMatrix) -> float:
    """<n> = sum_n n rho[n, n]."""
    return float(np.arange(rho.dim) @ np.diag(rho.data))


def momentum_variance(rho: DensityMatrix, m) -> float:
    """<p~^2> - <p~>^2 with p~ = i M.

    For a real symmetric rho, Tr(rho M) vanishes identically, so <p~> = 0.
    """
    m = m.data if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=float)
    if m.shape != rho.data.shape:
        raise ContractError(f"momentum operator {m.shape} does not match density {rho.data.shape}")
    mean_im = float(np.sum(rho.data * m.T))  # Tr(rho M), so <p~> = i * mean_im
    second = -float(np.sum((rho.data @ m) * m.T))
    return second + mean_im**2


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits; eigenvalues below 1e-14 count as zero."""
    lam = rho.eigenvalues()
    lam = np.minimum(lam[lam > ENTROPY_FLOOR], 1.0)  # rounding can push a pure state past 1
    return float(-np.sum(lam * np.log2(lam)) + 0.0)


@dataclass(frozen=True)
class GridSpec:
    """Uniform phase-space grid in the dimensionless x~, p~."""

    x_min: float = -6.0
    x_max: float = 6.0
    nx: int = 121
    p_min: float = -6.0
    p_max: float = 6.0
    np_: int = 121

    def __post_init__(self):
        if self.nx < 2 or self.np_ < 2:
            raise ValueError("grid needs at least 2 points per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must be increasing")

    def axes(self):
        return np.linspace(self.x_min, self.x_max, self.nx), np.linspace(self.p_min, self.p_max, self.np_)


@dataclass(frozen=True)
class WignerGrid:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # values[i, j] = W(x_i, p_j)
    norm_estimate: float

    def position_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, self.p_axis, axis=1)


def _significant_levels(rho, basis):
    diag = np.abs(np.diag(rho.data))
    big = np.nonzero(diag > 1e-10)[0]
    k = int(big[-1]) + 1 if big.size else 1
    if k > basis.n_levels:
        raise ContractError(
            f"density populates level {k - 1} but the exact basis stops at {basis.n_levels - 1}"
        )
    return k


def wigner(rho: DensityMatrix, basis: PtBasis, grid: GridSpec = GridSpec()) -> WignerGrid:
    """W(x, p) = (1/2pi) int rho(x + y/2, x - y/2) cos(p y) dy on the grid.

    The Fock index of ``rho`` is read as the level index of ``basis``.  The
    y integral runs over the range where both arguments lie inside the
    support of the occupied levels.
    """
    k = _significant_levels(rho, basis)
    r = rho.data[:k, :k]
    reach = support_radius(basis, k)
    xs, ps = grid.axes()
    values = np.zeros((xs.size, ps.size))
    for i, x in enumerate(xs):
        span = 2.0 * (reach - abs(x))
        if span <= 0:
            continue

        def integrand(y, x=x):
            plus = wavefunction_table(basis, k, x + 0.5 * y)
            minus = wavefunction_table(basis, k, x - 0.5 * y)
            corr = np.einsum("iy,ij,jy->y", plus, r, minus)
            return corr[None, :] * np.cos(np.outer(ps, y))

        # the correlation is even in y
        values[i] = integrate(integrand, 0.0, span, atol=WIGNER_ATOL * np.pi) / np.pi
    norm = float(np.trapezoid(np.trapezoid(values, ps, axis=1), xs))
    values.setflags(write=False)
    return WignerGrid(xs, ps, values, norm)


def position_density(rho: DensityMatrix, basis: PtBasis, xt) -> np.ndarray:
    """rho(x~, x~) on the given points."""
    k = _significant_levels(rho, basis)
    phi = wavefunction_table(basis, k, xt)
    return np.einsum("iy,ij,jy->y", phi, rho.data[:k, :k], phi)


def local_maxima_along_p0(w: WignerGrid):
    """Strict local maxima of W(x, 0) exceeding 10% of the global maximum, by x."""
    hits = np.nonzero(np.isclose(w.p_axis, 0.0, atol=1e-12))[0]
    if hits.size == 0:
        raise ContractError("Wigner grid has no p = 0 row")
    row = w.values[:, hits[0]]
    floor = 0.1 * float(np.max(w.values))
    out = []
    for i in range(1, row.size - 1):
        if row[i] > row[i - 1] and row[i] > row[i + 1] and row[i] > floor:
            out.append((float(w.x_axis[i]), float(row[i])))
    return out
