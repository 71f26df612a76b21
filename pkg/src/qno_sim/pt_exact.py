"""Exact Poschl-Teller eigenfunctions and quadrature matrix elements.

With hbar = mu = 1 the wells are

    TPT: V(x) = U0 tan^2(a x),  U0 = a^2 lambda (lambda - 1) / 2,  |x| < pi / 2a
    MPT: V(x) = U0 tanh^2(a x), U0 = a^2 lambda (lambda + 1) / 2

whose levels, measured from the bottom of the well, are
Omega (n + 1/2 +/- n^2 / 2 lambda) with Omega = a^2 lambda.  The
eigenfunctions are

    TPT: cos^lambda(a x) C_n^(lambda)(sin a x)
    MPT: sech^(lambda - n)(a x) C_n^(lambda - n + 1/2)(tanh a x),  n < lambda

with C the Gegenbauer polynomials.  They are evaluated by recurrence and
normalised by quadrature.  Integrals run over y = a x on a finite range
outside which every level in use is negligible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import Kind, OscillatorSpec
from .errors import DomainError
from .quadrature import integrate

NORM_RTOL = 1e-12
ELEMENT_ATOL = 1e-11


@dataclass(frozen=True)
class PtBasis:
    """Exact eigenbasis of one Poschl-Teller well.

    ``lam`` is lambda (> 0), ``a`` the range parameter and ``n_levels`` how
    many levels, starting from n = 0, the basis provides.
    """

    kind: Kind
    lam: float
    a: float
    n_levels: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "a", float(self.a))
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise ValueError(f"lambda must be finite and > 0, got {self.lam}")
        if not self.a > 0:
            raise ValueError(f"range parameter a must be > 0, got {self.a}")
        if int(self.n_levels) != self.n_levels or self.n_levels < 1:
            raise ValueError(f"n_levels must be a positive integer, got {self.n_levels}")
        object.__setattr__(self, "n_levels", int(self.n_levels))
        if self.kind is Kind.MPT and self.n_levels - 1 >= self.lam:
            raise ValueError(
                f"MPT well with lambda = {self.lam:g} binds only levels n < lambda; "
                f"requested {self.n_levels}"
            )

    @classmethod
    def from_spec(cls, spec: OscillatorSpec, n_levels=None) -> "PtBasis":
        """Basis matching an oscillator spec; defaults to spec.fock_dim levels (capped for MPT)."""
        if spec.lambda_inv <= 0:
            raise ValueError("the exact basis needs lambda_inv > 0")
        lam = 1.0 / spec.lambda_inv
        if n_levels is None:
            n_levels = spec.fock_dim
            if spec.kind is Kind.MPT:
                n_levels = min(n_levels, int(np.ceil(lam)))
        return cls(spec.kind, lam, spec.range_a, n_levels)

    @property
    def omega(self) -> float:
        return self.a**2 * self.lam

    @property
    def depth(self) -> float:
        """U0 of the potential."""
        if self.kind is Kind.TPT:
            return self.a**2 * self.lam * (self.lam - 1.0) / 2.0
        return self.a**2 * self.lam * (self.lam + 1.0) / 2.0

    @property
    def half_width(self):
        """Edge pi / 2a of the TPT domain; infinite for MPT."""
        return np.pi / (2.0 * self.a) if self.kind is Kind.TPT else np.inf

    def energy(self, n):
        """Level n measured from the potential minimum."""
        n = np.asarray(n, dtype=float)
        s = self.kind.sign
        return self.omega * (n + 0.5 + s * n**2 / (2.0 * self.lam))


def eval_potential(basis: PtBasis, x):
    """V(x) of the well; TPT points outside the domain raise DomainError."""
    x = np.asarray(x, dtype=float)
    y = basis.a * x
    if basis.kind is Kind.TPT:
        if np.any(np.abs(y) >= np.pi / 2):
            raise DomainError("TPT potential is only defined for |x| < pi / 2a")
        return basis.depth * np.tan(y) ** 2
    return basis.depth * np.tanh(y) ** 2


def _gegenbauer_normalised(n, alpha, z):
    """C_n^(alpha)(z) / C_n^(alpha)(1) by upward recurrence."""
    p_prev = np.ones_like(z)
    if n == 0:
        return p_prev
    p = z.copy()
    for k in range(1, n):
        p_prev, p = p, (2.0 * (k + alpha) * z * p - k * p_prev) / (k + 2.0 * alpha)
    return p


def _check_level(basis, n):
    if int(n) != n or n < 0 or n >= basis.n_levels:
        raise IndexError(f"level {n} outside 0..{basis.n_levels - 1}")
    return int(n)


def _log_cosh(y):
    ay = np.abs(y)
    return ay + np.log1p(np.exp(-2.0 * ay)) - np.log(2.0)


def _log_cos(y):
    # log cos y without the cancellation of cos y close to 1
    return 0.5 * np.log1p(-np.sin(y) ** 2)


def _raw(basis, n, y):
    """Unnormalised psi_n at y = a x (TPT points must lie inside the domain)."""
    if basis.kind is Kind.TPT:
        envelope = np.exp(basis.lam * _log_cos(y))
        return envelope * _gegenbauer_normalised(n, basis.lam, np.sin(y))
    power = basis.lam - n
    envelope = np.exp(-power * _log_cosh(y))
    return envelope * _gegenbauer_normalised(n, power + 0.5, np.tanh(y))


def _cutoff(basis, n_top):
    """Half-range in y beyond which every level up to n_top is below ~1e-14."""
    big = 0.5 * (np.sqrt(2.0 * n_top + 1.0) + 8.0) ** 2
    if basis.kind is Kind.TPT:
        return float(2.0 * np.arcsin(np.sqrt(-0.5 * np.expm1(-big / basis.lam))))
    # solve (lam - n_top) log cosh(y) = big
    t = big / (basis.lam - n_top)
    return float(t + np.log1p(np.sqrt(-np.expm1(-2.0 * t))))


@lru_cache(maxsize=64)
def _norms(basis):
    top = basis.n_levels - 1
    tc = _cutoff(basis, top)

    def integrand(y):
        raw = _raw_stack(basis, basis.n_levels, y)
        return raw * raw

    norms = integrate(integrand, -tc, tc, atol=0.0, rtol=NORM_RTOL) / basis.a
    return tuple(float(v) for v in norms)


def _raw_stack(basis, k, y):
    """Unnormalised psi_0..psi_{k-1} at y = a x, one recurrence for all levels."""
    levels = np.arange(k, dtype=float)[:, None]
    if basis.kind is Kind.TPT:
        alpha = np.full((k, 1), basis.lam)
        z = np.sin(y)
        envelope = np.exp(basis.lam * _log_cos(y))[None, :]
    else:
        alpha = basis.lam - levels + 0.5
        z = np.tanh(y)
        envelope = np.exp(-(basis.lam - levels) * _log_cosh(y)[None, :])
    out = np.empty((k, y.size))
    p_prev = np.ones((k, y.size))
    out[0] = 1.0
    if k > 1:
        p = np.broadcast_to(z, (k, y.size)).copy()
        out[1] = p[1]
        for j in range(1, k - 1):
            p_prev, p = p, (2.0 * (j + alpha) * z * p - j * p_prev) / (j + 2.0 * alpha)
            out[j + 1] = p[j + 1]
    return out * envelope


def _stack(basis, k, y):
    """Normalised psi_0..psi_{k-1} at y = a x."""
    norms = np.sqrt(np.array(_norms(basis)[:k]))
    return _raw_stack(basis, k, y) / norms[:, None]


def wavefunction_table(basis: PtBasis, k: int, xt):
    """Rows psi_0..psi_{k-1} in the dimensionless coordinate x~, normalised in x~.

    TPT points outside the domain give 0.
    """
    if k > basis.n_levels:
        raise IndexError(f"basis holds {basis.n_levels} levels, {k} requested")
    root = np.sqrt(basis.omega)
    y = basis.a * np.asarray(xt, dtype=float).ravel() / root
    if basis.kind is Kind.MPT:
        return _stack(basis, k, y) / np.sqrt(root)
    out = np.zeros((k, y.size))
    inside = np.abs(y) < np.pi / 2
    out[:, inside] = _stack(basis, k, y[inside]) / np.sqrt(root)
    return out


def support_radius(basis: PtBasis, k: int) -> float:
    """|x~| beyond which psi_0..psi_{k-1} are negligible (~1e-14) or the TPT domain ends."""
    return float(np.sqrt(basis.omega) * _cutoff(basis, k - 1) / basis.a)


def eval_wavefunction(basis: PtBasis, n, x):
    """Normalised psi_n(x) in physical units; zero outside the TPT domain."""
    n = _check_level(basis, n)
    x = np.asarray(x, dtype=float)
    y = basis.a * x
    if basis.kind is Kind.MPT:
        return _raw(basis, n, y) / np.sqrt(_norms(basis)[n])
    inside = np.abs(y) < np.pi / 2
    out = np.zeros_like(y)
    out[inside] = _raw(basis, n, y[inside]) / np.sqrt(_norms(basis)[n])
    return out


def eval_wavefunction_scaled(basis: PtBasis, n, xt):
    """psi_n in the dimensionless coordinate x~ = sqrt(Omega) x, normalised in x~."""
    root = np.sqrt(basis.omega)
    return eval_wavefunction(basis, n, np.asarray(xt, dtype=float) / root) / np.sqrt(root)


def _pair_integral(basis, k, weight):
    """k x k matrix of int psi_m psi_n weight(x) dx."""
    if k > basis.n_levels:
        raise IndexError(f"basis holds {basis.n_levels} levels, {k} requested")
    tc = _cutoff(basis, k - 1)

    def integrand(y):
        phi = _stack(basis, k, y)
        return phi[:, None, :] * phi[None, :, :] * weight(y / basis.a)

    mat = integrate(integrand, -tc, tc, atol=ELEMENT_ATOL * basis.a) / basis.a
    return 0.5 * (mat + mat.T)


def orthonormality_matrix(basis: PtBasis, k: int):
    """Gram matrix <psi_m|psi_n> for m, n < k."""
    return _pair_integral(basis, k, np.ones_like)


def exact_position_matrix(basis: PtBasis, k: int):
    """All <psi_m|x~|psi_n> for m, n < k, in units of x~ = sqrt(Omega) x."""
    root = np.sqrt(basis.omega)
    return _pair_integral(basis, k, lambda x: root * x)


def exact_matrix_element_x(basis: PtBasis, m: int, n: int) -> float:
    """<psi_m|x~|psi_n>; zero by parity when m - n is even."""
    m = _check_level(basis, m)
    n = _check_level(basis, n)
    if (m - n) % 2 == 0:
        return 0.0
    return float(exact_position_matrix(basis, max(m, n) + 1)[m, n])
