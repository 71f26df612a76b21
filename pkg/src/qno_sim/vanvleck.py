"""Second-order Van Vleck treatment of the one-quantum qubit-oscillator model.

The effective Hamiltonian is block diagonal over the doublets
{|e,n>, |g,n+1>} plus the isolated ground state |g,0>.  Everything here uses
the one-quantum interaction K1 A + A^dagger K1 whatever ``model.variant`` is
(the bare ladder, K1 = 1, for the vibron variant).

The S-matrices follow the closed forms for <i|iS1|j>, <i|iS2|j> and
<i|iS1 iS1|j> in the composite basis (e-block first).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import _f2, k1_weights, level_spacing
from .errors import ContractError, NumericalError
from .hamiltonian import CoupledModel


@dataclass(frozen=True)
class VvCoefficients:
    """Delta_n, W1_n and W0_n for the requested levels (W_n := 0 at n = 0)."""

    n: np.ndarray
    delta: np.ndarray
    w1: np.ndarray
    w0: np.ndarray


@dataclass(frozen=True)
class VvBlockResult:
    n: int
    eta: float
    delta_small: float
    alpha: float
    offdiag: float
    E_lower: float
    E_upper: float

    @property
    def splitting(self) -> float:
        return self.E_upper - self.E_lower


@dataclass(frozen=True)
class SMatrices:
    is1: np.ndarray
    is2: np.ndarray
    is1is1: np.ndarray


@dataclass(frozen=True)
class Doublet:
    """Selects the lower (E_{2n+1}) or upper (E_{2n+2}) member of doublet n."""

    n: int
    branch: str = "lower"

    def __post_init__(self):
        if self.branch not in ("lower", "upper"):
            raise ValueError("branch must be 'lower' or 'upper'")
        if self.n < 0:
            raise ValueError("doublet index must be >= 0")


GROUND = "ground"
Which = Union[str, Doublet]


@dataclass(frozen=True)
class VvState:
    vector: np.ndarray
    norm_deviation: float


def _k1(model, n):
    n = np.asarray(n, dtype=float)
    if not model.variant.weighted:
        return np.ones_like(n)
    return k1_weights(model.osc.kind, model.osc.lambda_inv, n)


def _f(model, n):
    return np.sqrt(_f2(model.osc.sign, model.osc.lambda_inv, n))


def _omega_n(model, n):
    return level_spacing(model.osc, n)


def _omega_mn(model, m, n):
    spec = model.osc
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return spec.omega * (m - n) * (1.0 + spec.sign * (m + n) * spec.lambda_inv / 2.0)


def vv_coefficients(model: CoupledModel, n) -> VvCoefficients:
    """Closed-form Delta_n, W1_n and W0_n at level(s) n."""
    q = model.qubit
    g = model.gbar
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    if np.any(n_arr < 0):
        raise ValueError("levels must be >= 0")
    delta = -g * q.gap_weight * _k1(model, n_arr) * _f(model, n_arr + 1)
    w1 = np.zeros(n_arr.shape)
    w0 = np.zeros(n_arr.shape)
    pos = n_arr > 0
    if np.any(pos):
        npos = n_arr[pos]
        om = _omega_n(model, npos - 1)
        if np.any(om == 0) or np.any(q.delta_q + om == 0):
            raise NumericalError("vanishing energy denominator in W coefficients")
        common = (_k1(model, npos - 1) ** 2) * _f2(model.osc.sign, model.osc.lambda_inv, npos) * g**2 / q.delta_q**2
        w1[pos] = -common * q.epsilon**2 / om
        w0[pos] = -common * q.delta0**2 / (q.delta_q + om)
    if np.ndim(n) == 0:
        return VvCoefficients(n_arr[0], delta[0], w1[0], w0[0])
    return VvCoefficients(n_arr, delta, w1, w0)


def vv_block(model: CoupledModel, n: int) -> VvBlockResult:
    """2x2 doublet {|e,n>, |g,n+1>}: eigenvalues and mixing angle."""
    n = int(n)
    c = vv_coefficients(model, np.array([n, n + 1, n + 2]))
    w_n = c.w1[0] + c.w0[0]
    w_n2 = c.w1[2] + c.w0[2]
    dw_plus = (n + 2) * w_n2 + n * w_n
    dw_minus = (n + 2) * w_n2 - n * w_n
    om_n = float(_omega_n(model, n))
    f2_next = float(_f2(model.osc.sign, model.osc.lambda_inv, n + 1))
    eta = om_n + 2.0 * model.osc.omega * n * f2_next + dw_minus
    dsmall = model.qubit.delta_q - om_n + 2.0 * (n + 1) * c.w1[1] - dw_plus
    off = np.sqrt(n + 1.0) * c.delta[0]
    root = np.hypot(dsmall, 2.0 * off)
    # off <= 0, so the angle lies in [0, pi]; + 0.0 turns -0.0 into +0.0 for the gbar = 0 branch
    alpha = float(np.arctan2(-2.0 * off + 0.0, dsmall))
    return VvBlockResult(n, float(eta), float(dsmall), alpha, float(off),
                         float(0.5 * (eta - root)), float(0.5 * (eta + root)))


def vv_ground_energy(model: CoupledModel) -> float:
    """E0 = -Delta_Q/2 + W1_1 + W0_1."""
    c = vv_coefficients(model, 1)
    return float(-0.5 * model.qubit.delta_q + c.w1 + c.w0)


def splitting_estimate(model: CoupledModel, n: int) -> float:
    """2 K1_n f(n+1) sqrt(n+1) gbar, valid near the tuned resonance."""
    return float(2.0 * _k1(model, n) * _f(model, n + 1) * np.sqrt(n + 1.0) * model.gbar)


def vv_spectrum(model: CoupledModel, count: int = 9) -> np.ndarray:
    """Lowest ``count`` Van Vleck levels (ground plus doublets), ascending."""
    if count < 1:
        raise ValueError("count must be >= 1")
    levels = [vv_ground_energy(model)]
    for n in range(count + 1):
        b = vv_block(model, n)
        levels.extend((b.E_lower, b.E_upper))
    return np.sort(np.array(levels))[:count]


def effective_hamiltonian(model: CoupledModel, fock_dim=None) -> np.ndarray:
    """Block-diagonal effective Hamiltonian in the composite basis.

    Doublets n = 0 .. N-2 fill their 2x2 blocks, |g,0> carries E0, and the
    unpaired |e,N-1> keeps its bare energy.
    """
    n_dim = model.osc.fock_dim if fock_dim is None else int(fock_dim)
    spec = model.osc
    q = model.qubit
    h = np.zeros((2 * n_dim, 2 * n_dim))
    h[n_dim, n_dim] = vv_ground_energy(model)
    for n in range(n_dim - 1):
        b = vv_block(model, n)
        e, g = n, n_dim + n + 1
        h[e, e] = 0.5 * (b.eta + b.delta_small)
        h[g, g] = 0.5 * (b.eta - b.delta_small)
        h[e, g] = h[g, e] = b.offdiag
    top = n_dim - 1
    h[top, top] = 0.5 * q.delta_q + spec.omega * (top + spec.sign * top**2 * spec.lambda_inv / 2.0)
    return h


def s_matrices(model: CoupledModel, fock_dim=None) -> SMatrices:
    """iS1, iS2 and iS1 iS1 as real 2N x 2N matrices (e-block first).

    iS1 and iS2 are antisymmetric, iS1 iS1 symmetric.  Entries whose level
    index would leave 0..N-1 are dropped.  The closed forms carry no
    diagonal (m = n) part inside the gg and ee blocks of iS1 iS1; those
    entries are filled with the exact -sum_k |<k|iS1|n>|^2 so that the
    second-order expansion of exp(-iS) stays norm preserving to O(gbar^3).
    """
    n_dim = model.osc.fock_dim if fock_dim is None else int(fock_dim)
    q = model.qubit
    eps, d0, dq, g = q.epsilon, q.delta0, q.delta_q, model.gbar
    levels = np.arange(n_dim)
    kk = _k1(model, levels)
    K = lambda j: kk[j]
    # numpy scalars so that a resonant denominator yields inf instead of raising
    f = lambda j: np.float64(_f(model, j))
    f2 = lambda j: np.float64(_f2(model.osc.sign, model.osc.lambda_inv, j))
    Om = lambda j: np.float64(_omega_n(model, j))
    Omn = lambda a, b: np.float64(_omega_mn(model, a, b))

    s1_gg = np.zeros((n_dim, n_dim))
    s1_eg = np.zeros((n_dim, n_dim))
    s2_gg = np.zeros((n_dim, n_dim))
    s2_ee = np.zeros((n_dim, n_dim))
    s2_eg = np.zeros((n_dim, n_dim))
    p_gg = np.zeros((n_dim, n_dim))
    p_eg = np.zeros((n_dim, n_dim))

    with np.errstate(divide="ignore", invalid="ignore"):
        for n in range(n_dim):
            up1 = n + 1 < n_dim
            up2 = n + 2 < n_dim
            dn1 = n >= 1
            dn2 = n >= 2
            if dn1:
                m = n - 1
                s1_gg[m, n] = K(n - 1) * f(n) * np.sqrt(n) * eps * g / (dq * Omn(m, n))
            if up1:
                m = n + 1
                x = K(n) * f(n + 1) * np.sqrt(n + 1.0)
                s1_gg[m, n] = x * eps * g / (dq * Omn(m, n))
                s1_eg[m, n] = -(d0 / dq) * x * g / (dq + Omn(m, n))

            lower2 = K(n - 1) * K(n - 2) * f(n) * f(n - 1) * np.sqrt(n * (n - 1.0)) if dn2 else 0.0
            upper2 = K(n) * K(n + 1) * f(n + 1) * f(n + 2) * np.sqrt((n + 1.0) * (n + 2.0)) if up2 else 0.0

            if dn2:
                m = n - 2
                a, b = Omn(m, n), Omn(m, n - 1)
                ratio = eps**2 * (2.0 * b - a) / (2.0 * Om(n - 1) * b)
                s2_gg[m, n] = -lower2 / (dq**2 * a) * (-ratio + d0**2 / (dq - b)) * g**2
                s2_ee[m, n] = lower2 / (dq**2 * a) * (ratio + d0**2 / (dq + Om(n - 1))) * g**2
                s2_eg[m, n] = (
                    -eps * d0 / dq**2 * lower2 / (dq + a) * ((b - Om(n - 1)) / (Om(n - 1) * b)) * g**2
                )
                p_gg[m, n] = -eps**2 / dq**2 * lower2 / (b * Om(n - 1)) * g**2
            if up2:
                m = n + 2
                a, b = Omn(m, n), Omn(m, n + 1)
                ratio = eps**2 * (2.0 * b - a) / (2.0 * Om(n) * b)
                s2_gg[m, n] = -upper2 / (dq**2 * a) * (ratio + d0**2 / (dq + Om(n))) * g**2
                s2_ee[m, n] = -upper2 / (dq**2 * a) * (ratio - d0**2 / (dq + b)) * g**2
                bracket = (
                    0.5 * (dq - a) / (b * (dq + Om(n)))
                    + 0.5 * (dq + a) / (Om(n) * (dq + b))
                    - dq / (dq + Om(n)) * (1.0 / b + 1.0 / Om(n))
                )
                s2_eg[m, n] = -eps * d0 / dq**2 * upper2 / (dq + a) * bracket * g**2
                p_gg[m, n] = eps**2 / dq**2 * upper2 / (b * Om(n)) * g**2
                p_eg[m, n] = (
                    eps * d0 / dq * upper2 * (Om(n) - b)
                    / (b * Om(n) * (dq + Om(n)) * (dq + b)) * g**2
                )

            # m = n entries of the eg blocks
            a = 0.0
            total = 0.0
            ptotal = 0.0
            if up1:
                b = Omn(n, n + 1)
                w = K(n) ** 2 * f2(n + 1) * (n + 1)
                total += -eps * d0 / dq**2 * w / (dq + a) * (
                    0.5 * (dq - a) / (b * (dq + Om(n))) - dq / (dq + Om(n)) * (1.0 / Om(n) + 1.0 / b)
                )
                ptotal += eps * d0 / dq**2 * w / (b * (dq + Om(n)))
            if dn1:
                b = Omn(n, n - 1)
                w = K(n - 1) ** 2 * f2(n) * n
                total += eps * d0 / dq**2 * w / (dq + a) * (
                    0.5 * (dq + a) / (Om(n - 1) * (dq + b)) - 1.0 / Om(n - 1) + 1.0 / b
                )
                ptotal += eps * d0 / dq**2 * w / (Om(n - 1) * (dq + b))
            s2_eg[n, n] = total * g**2
            p_eg[n, n] = ptotal * g**2

    tables = (s1_gg, s1_eg, s2_gg, s2_ee, s2_eg, p_gg, p_eg)
    if not all(np.all(np.isfinite(t)) for t in tables):
        raise NumericalError("vanishing energy denominator in S-matrices (exact multi-photon resonance)")

    z = np.zeros((n_dim, n_dim))
    is1 = np.block([[-s1_gg, s1_eg], [-s1_eg.T, s1_gg]])
    is2 = np.block([[s2_ee, s2_eg], [-s2_eg.T, s2_gg]])
    prod = np.block([[p_gg, p_eg], [p_eg.T, p_gg]])
    # exact diagonal of iS1 iS1 inside the gg and ee blocks
    diag = -np.sum(is1 * is1, axis=0)
    block_diag = np.block([[np.diag(diag[:n_dim]), z], [z, np.diag(diag[n_dim:])]])
    prod = prod + block_diag
    for arr in (is1, is2, prod):
        arr.setflags(write=False)
    return SMatrices(is1, is2, prod)


def _effective_vector(model, which, n_dim):
    v = np.zeros(2 * n_dim)
    if which == GROUND:
        v[n_dim] = 1.0
        return v
    if not isinstance(which, Doublet):
        raise ValueError(f"unknown state selector {which!r}")
    if which.n + 1 >= n_dim:
        raise ContractError(f"doublet {which.n} needs fock_dim > {which.n + 1}")
    b = vv_block(model, which.n)
    c, s = np.cos(0.5 * b.alpha), np.sin(0.5 * b.alpha)
    e, g = which.n, n_dim + which.n + 1
    if which.branch == "upper":
        v[e], v[g] = c, -s
    else:
        v[e], v[g] = s, c
    return v


def vv_state(model: CoupledModel, which: Which = GROUND, fock_dim=None) -> VvState:
    """exp(-iS) applied to an effective eigenvector, to second order, renormalised."""
    n_dim = model.osc.fock_dim if fock_dim is None else int(fock_dim)
    s = s_matrices(model, n_dim)
    v = _effective_vector(model, which, n_dim)
    u = np.eye(2 * n_dim) - s.is1 - s.is2 + 0.5 * s.is1is1
    out = u @ v
    norm = float(np.linalg.norm(out))
    out = out / norm
    out.setflags(write=False)
    return VvState(out, norm - 1.0)
