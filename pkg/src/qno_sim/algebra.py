"""f-deformed oscillator algebra for the trigonometric and modified Poschl-Teller wells.

Everything is written in terms of ``lambda_inv`` (the anharmonicity), so the
harmonic oscillator is the exact case ``lambda_inv == 0``.  Units are
dimensionless: hbar = mu = 1, energies in units of the qubit gap, and the
coordinate and momentum are reported as x~ = sqrt(Omega) x and p~ = p / sqrt(Omega).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError

SYMMETRY_TOL = 1e-12


class Kind(str, enum.Enum):
    """Which Poschl-Teller well the deformation mimics."""

    TPT = "TPT"  # trigonometric, hard nonlinearity
    MPT = "MPT"  # modified (hyperbolic), soft nonlinearity

    @property
    def sign(self) -> int:
        return 1 if self is Kind.TPT else -1

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown oscillator kind {value!r}; expected TPT or MPT") from None


class Variant(enum.Enum):
    """Coordinate representation used for x (and p).

    VIBRON keeps the bare deformed ladder operators.  EXTENDEDk keeps the
    weighted series up to the k-th power of the ladder operators.
    """

    VIBRON = ("vibron", 1)
    EXTENDED1 = ("extended1", 1)
    EXTENDED3 = ("extended3", 3)
    EXTENDED5 = ("extended5", 5)

    def __init__(self, label, max_power):
        self.label = label
        self.max_power = max_power

    @property
    def weighted(self) -> bool:
        return self is not Variant.VIBRON

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        text = str(value).lower().replace("(", "").replace(")", "").replace("_", "")
        for member in cls:
            if text in (member.label, member.name.lower()):
                return member
        raise ValueError(
            f"unknown variant {value!r}; expected one of "
            + ", ".join(m.label for m in cls)
        )


def mpt_fock_limit(lambda_inv: float) -> int:
    """Largest Fock truncation N with (N + 5) * lambda_inv < 1."""
    if lambda_inv <= 0:
        raise ValueError("the MPT guard is only finite for lambda_inv > 0")
    inv = 1.0 / lambda_inv
    if inv > 2.0**52:
        # far beyond any usable truncation; avoids float steps smaller than 1
        return 2**52
    n = int(np.floor(inv)) - 5
    while (n + 5) * lambda_inv >= 1.0:
        n -= 1
    return n


@dataclass(frozen=True)
class OscillatorSpec:
    """Deformed oscillator parameters.

    ``omega`` is the reference frequency in units of the qubit gap and
    ``fock_dim`` the number of Fock states kept.
    """

    kind: Kind
    lambda_inv: float
    omega: float = 1.0
    fock_dim: int = 60

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "lambda_inv", float(self.lambda_inv))
        object.__setattr__(self, "omega", float(self.omega))
        if not np.isfinite(self.lambda_inv) or self.lambda_inv < 0:
            raise ValueError(f"lambda_inv must be finite and >= 0, got {self.lambda_inv}")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if int(self.fock_dim) != self.fock_dim or self.fock_dim < 2:
            raise ValueError(f"fock_dim must be an integer >= 2, got {self.fock_dim}")
        object.__setattr__(self, "fock_dim", int(self.fock_dim))
        if self.kind is Kind.MPT and self.lambda_inv > 0:
            if (self.fock_dim + 5) * self.lambda_inv >= 1.0:
                raise DomainError(
                    "MPT truncation exceeds real-algebra range: "
                    f"(N + 5) * lambda_inv = {(self.fock_dim + 5) * self.lambda_inv:g} >= 1 "
                    f"(largest allowed N is {mpt_fock_limit(self.lambda_inv)})"
                )

    @property
    def sign(self) -> int:
        return self.kind.sign

    @property
    def lam(self) -> float:
        """lambda itself (infinite in the harmonic limit)."""
        return np.inf if self.lambda_inv == 0 else 1.0 / self.lambda_inv

    @property
    def range_a(self) -> float:
        """Potential range parameter a = sqrt(Omega * lambda_inv)."""
        return float(np.sqrt(self.omega * self.lambda_inv))

    @property
    def n_max_bound(self):
        """Highest bound level of the MPT well (lambda - 1); None otherwise."""
        if self.kind is Kind.MPT and self.lambda_inv > 0:
            return int(np.ceil(self.lam)) - 1
        return None

    def with_fock_dim(self, fock_dim: int) -> "OscillatorSpec":
        return OscillatorSpec(self.kind, self.lambda_inv, self.omega, fock_dim)

    def harmonic(self) -> "OscillatorSpec":
        """Same oscillator with the deformation switched off."""
        return OscillatorSpec(self.kind, 0.0, self.omega, self.fock_dim)


def default_fock_dim(kind, lambda_inv: float, cap: int = 60) -> int:
    """Fock truncation used when the caller does not choose one.

    TPT (and any harmonic oscillator) uses ``cap``.  For MPT the weight
    series degrade well before the real-algebra guard, so the truncation
    also stops at the lower half of the bound spectrum, floor(lambda / 2).
    """
    kind = Kind.parse(kind)
    if kind is Kind.TPT or lambda_inv == 0:
        return cap
    half = int(min(np.floor(0.5 / lambda_inv + 1e-9), cap))
    return max(2, min(cap, half, mpt_fock_limit(lambda_inv)))


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense real matrix with a verified symmetry tag."""

    data: np.ndarray
    symmetry: str = "general"
    _: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ContractError(f"operator must be square, got shape {data.shape}")
        sym = self.symmetry.lower()
        if sym not in ("symmetric", "antisymmetric", "general"):
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")
        if sym == "symmetric":
            dev = np.max(np.abs(data - data.T), initial=0.0)
        elif sym == "antisymmetric":
            dev = np.max(np.abs(data + data.T), initial=0.0)
        else:
            dev = 0.0
        if dev > SYMMETRY_TOL * max(1.0, np.max(np.abs(data), initial=0.0)):
            raise ContractError(f"matrix is not {sym} (deviation {dev:.3e})")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "symmetry", sym)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def f_squared(spec: OscillatorSpec, n):
    """Deformation function f^2(n) = 1 +/- (n - 1) lambda_inv / 2."""
    return _f2(spec.sign, spec.lambda_inv, n)


def _f2(sign, lam_inv, n):
    return 1.0 + sign * (np.asarray(n, dtype=float) - 1.0) * lam_inv / 2.0


def level_spacing(spec: OscillatorSpec, n):
    """Gap between levels n and n + 1: Omega (1 +/- (2n + 1) lambda_inv / 2)."""
    n = np.asarray(n, dtype=float)
    return spec.omega * (1.0 + spec.sign * (2.0 * n + 1.0) * spec.lambda_inv / 2.0)


def ladder_matrices(spec: OscillatorSpec):
    """Deformed annihilation and creation matrices (A, A^dagger)."""
    n = np.arange(1, spec.fock_dim)
    f2 = f_squared(spec, n)
    if np.any(f2 <= 0):
        raise DomainError("MPT truncation exceeds real-algebra range: f^2(n) <= 0")
    a = np.diag(np.sqrt(n * f2), k=1)
    return OperatorMatrix(a), OperatorMatrix(a.T)


def number_hamiltonian(spec: OscillatorSpec) -> OperatorMatrix:
    """Diagonal oscillator energies Omega (n +/- n^2 lambda_inv / 2), zero-point dropped."""
    n = np.arange(spec.fock_dim, dtype=float)
    energies = spec.omega * (n + spec.sign * n**2 * spec.lambda_inv / 2.0)
    return OperatorMatrix(np.diag(energies), "symmetric")


@dataclass(frozen=True)
class WeightTables:
    """Diagonal weights of the coordinate (k*) and momentum (j*) series, indexed by n."""

    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray


class _Chain:
    """Number-dependent diagonal functions of one deformed oscillator.

    All functions accept integer arrays; a nonpositive square-root argument
    raises DomainError instead of producing NaN.
    """

    def __init__(self, sign, lam_inv):
        self.s = sign
        self.l = lam_inv

    def _lin(self, k):
        return 1.0 + self.s * np.asarray(k, dtype=float) * self.l

    def _root(self, num, den, what):
        if np.any(~(np.asarray(den) > 0)) or np.any(~(np.asarray(num) > 0)):
            raise DomainError(
                f"MPT truncation exceeds real-algebra range: nonpositive argument in {what}"
            )
        return np.sqrt(num / den)

    def F(self, k):
        return self._root(1.0, self._lin(k) * self._lin(np.asarray(k) + 1), "F")

    def G(self, k):
        return self._root(1.0, self._lin(k) * self._lin(np.asarray(k) - 1), "G")

    def H(self, k):
        return self._root(self._lin(k), self._lin(np.asarray(k) - 1), "H")

    def Q(self, k):
        return self._root(self._lin(k), self._lin(np.asarray(k) + 1), "Q")

    def f2(self, k):
        return _f2(self.s, self.l, k)

    # products generated by the cubic term of the coordinate expansion
    def F1(self, n):
        return self.F(n) * self.F(n + 1) * self.F(n + 2)

    def F2(self, n):
        return self.G(n) * self.F(n - 1) * self.F(n)

    def F3(self, n):
        return self.F(n) ** 2 * self.G(n + 1)

    def F4(self, n):
        return self.F(n) * self.F(n + 1) * self.G(n + 2)

    def S(self, n):
        return (self.Q(n) + self.H(n + 1)) / 2

    def H1(self, n):
        return (self.F(n + 2) * self.F(n + 1) * self.Q(n) + self.G(n + 1) * self.G(n + 2) * self.H(n + 3)) / 2

    def H2(self, n):
        return (-self.F(n) * self.F(n - 1) * self.H(n) + self.F(n - 1) * self.G(n) * self.H(n + 1)) / 2

    def H3(self, n):
        return (self.F(n) * self.G(n + 1) * self.Q(n) + self.G(n + 1) * self.F(n) * self.H(n + 1)) / 2

    def H4(self, n):
        return (self.G(n + 2) * self.F(n + 1) * self.Q(n) - self.G(n + 1) * self.G(n + 2) * self.Q(n + 1)) / 2

    # primed products from the quintic term
    def Fp(self, i, n):
        F, G = self.F, self.G
        if i == 1:
            return F(n + 4) * F(n + 3) * self.F1(n)
        if i in (2, 3, 4):
            return F(n + 2) * F(n + 1) * (self.F2, self.F3, self.F4)[i - 2](n)
        if i == 5:
            return F(n + 2) * G(n + 3) * self.F1(n)
        if i == 6:
            return G(n + 4) * F(n + 3) * self.F1(n)
        raise IndexError(i)

    def Hp(self, i, n):
        F, G, H, Q = self.F, self.G, self.H, self.Q
        if i == 1:
            return (F(n + 3) * self.F1(n) * H(n + 5) + F(n + 4) * self.F1(n + 1) * Q(n)) / 2
        if i == 2:
            return (F(n + 1) * self.F2(n) * H(n + 4) - F(n + 2) * self.F1(n - 1) * H(n)) / 2
        if i == 3:
            return (F(n + 1) * self.F3(n) * H(n + 3) + F(n + 2) * self.F2(n + 1) * Q(n)) / 2
        if i == 4:
            return (F(n + 1) * self.F4(n) * H(n + 3) + F(n + 2) * self.F3(n + 1) * Q(n)) / 2
        if i == 5:
            return (G(n + 3) * self.F1(n) * H(n + 3) + F(n + 2) * self.F4(n + 1) * Q(n)) / 2
        if i == 6:
            return (-F(n + 3) * self.F1(n) * Q(n + 3) + G(n + 4) * self.F1(n + 1) * Q(n)) / 2
        raise IndexError(i)

    def _ladder_sum(self, n, terms):
        # sum_j (n + j) f^2(n + j) T_j(n)
        return sum((n + j) * self.f2(n + j) * t for j, t in enumerate(terms))

    def K1(self, n):
        first = self._ladder_sum(n, (self.F2(n), self.F3(n), self.F4(n)))
        return self.F(n) + self.s * self.l / 12.0 * first

    def K2(self, n):
        second = self._ladder_sum(n, [self.Fp(i, n) for i in range(2, 7)])
        return self.s * self.l / 12.0 * self.F1(n) + 3.0 * self.l**2 / 160.0 * second

    def K3(self, n):
        return 3.0 * self.l**2 / 160.0 * self.Fp(1, n)

    def J1(self, n):
        first = self._ladder_sum(n, (self.H2(n), self.H3(n), self.H4(n)))
        return self.S(n) + self.s * self.l / 4.0 * first

    def J2(self, n):
        second = self._ladder_sum(n, [self.Hp(i, n) for i in range(2, 7)])
        return self.s * self.l / 4.0 * self.H1(n) + 3.0 * self.l**2 / 32.0 * second

    def J3(self, n):
        return 3.0 * self.l**2 / 32.0 * self.Hp(1, n)


def k1_weights(kind, lambda_inv: float, n):
    """First coordinate weight K1 at arbitrary levels ``n``.

    Needs only (n + 3) * lambda_inv < 1 for MPT, so it reaches levels beyond
    the full-table guard enforced by OscillatorSpec.
    """
    n = np.asarray(n, dtype=float)
    return _Chain(Kind.parse(kind).sign, float(lambda_inv)).K1(n)


def diagonal_weights(spec: OscillatorSpec) -> WeightTables:
    """All six diagonal weight tables for n = 0 .. N-1."""
    chain = _Chain(spec.sign, spec.lambda_inv)
    n = np.arange(spec.fock_dim, dtype=float)
    tables = {name: getattr(chain, name.upper())(n) for name in ("k1", "k2", "k3", "j1", "j2", "j3")}
    for arr in tables.values():
        arr.setflags(write=False)
    return WeightTables(**tables)


def _raised_series(spec, variant, weights):
    """sum_k (A^dagger)^(2k+1) W_k(n) up to the variant's maximal power."""
    _, adag = ladder_matrices(spec)
    adag = adag.data
    if not variant.weighted:
        return adag.copy()
    out = np.zeros_like(adag)
    power = adag.copy()
    for k, w in enumerate(weights):
        if 2 * k + 1 > variant.max_power:
            break
        out += power * w[np.newaxis, :]
        power = power @ adag @ adag
    return out


def position_operator(spec: OscillatorSpec, variant=Variant.EXTENDED3) -> OperatorMatrix:
    """Dimensionless coordinate x~ as a symmetric N x N matrix."""
    variant = Variant.parse(variant)
    w = diagonal_weights(spec) if variant.weighted else None
    up = _raised_series(spec, variant, (w.k1, w.k2, w.k3) if w else ())
    return OperatorMatrix((up + up.T) / np.sqrt(2.0), "symmetric")


def momentum_operator(spec: OscillatorSpec, variant=Variant.EXTENDED3) -> OperatorMatrix:
    """Real antisymmetric M with p~ = i M."""
    variant = Variant.parse(variant)
    w = diagonal_weights(spec) if variant.weighted else None
    up = _raised_series(spec, variant, (w.j1, w.j2, w.j3) if w else ())
    return OperatorMatrix((up - up.T) / np.sqrt(2.0), "antisymmetric")
