"""Qubit coupled to a deformed oscillator, as a real symmetric 2N x 2N matrix.

Basis order is qubit-major: |e, 0..N-1> first, then |g, 0..N-1>.  The
qubit is written in its energy eigenbasis, so with Delta_Q = sqrt(eps^2 + Delta0^2)

    H = Delta_Q/2 sz + H_osc - gbar [ (eps/Delta_Q) sz + (Delta0/Delta_Q) sx ] X

where X = sqrt(2) x~ is the undivided ladder series.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .algebra import (
    Kind,
    OperatorMatrix,
    OscillatorSpec,
    Variant,
    default_fock_dim,
    number_hamiltonian,
    position_operator,
)

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])

__all__ = [
    "QubitSpec",
    "CoupledModel",
    "build_hamiltonian",
    "uncoupled_levels",
    "parity_operator",
    "make_model",
    "default_fock_dim",
]


@dataclass(frozen=True)
class QubitSpec:
    """Two-level system with gap ``delta0`` and bias ``epsilon``."""

    delta0: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ValueError(f"delta0 must be > 0, got {self.delta0}")
        if not np.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")

    @property
    def delta_q(self) -> float:
        return float(np.hypot(self.epsilon, self.delta0))

    @property
    def bias_weight(self) -> float:
        """eps / Delta_Q, the weight of the sz coupling."""
        return self.epsilon / self.delta_q

    @property
    def gap_weight(self) -> float:
        """Delta0 / Delta_Q, the weight of the sx coupling."""
        return self.delta0 / self.delta_q

    @property
    def theta(self) -> float:
        """Mixing angle with tan(theta) = -Delta0 / eps."""
        return float(np.arctan2(-self.delta0, self.epsilon))


@dataclass(frozen=True)
class CoupledModel:
    qubit: QubitSpec
    osc: OscillatorSpec
    gbar: float
    variant: Variant = Variant.EXTENDED3

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if not (self.gbar >= 0 and np.isfinite(self.gbar)):
            raise ValueError(f"gbar must be finite and >= 0, got {self.gbar}")

    @property
    def dim(self) -> int:
        return 2 * self.osc.fock_dim

    def replace(self, **changes) -> "CoupledModel":
        """Copy with fields changed; ``fock_dim``, ``omega`` and ``epsilon`` reach the nested specs."""
        osc, qubit = self.osc, self.qubit
        if "fock_dim" in changes:
            osc = osc.with_fock_dim(changes.pop("fock_dim"))
        if "omega" in changes:
            osc = OscillatorSpec(osc.kind, osc.lambda_inv, changes.pop("omega"), osc.fock_dim)
        if "epsilon" in changes:
            qubit = QubitSpec(qubit.delta0, changes.pop("epsilon"))
        changes.setdefault("osc", osc)
        changes.setdefault("qubit", qubit)
        return dataclasses.replace(self, **changes)


def make_model(kind="TPT", lambda_inv=0.025, omega=1.0, epsilon=0.0, gbar=0.0,
               variant=Variant.EXTENDED3, fock_dim=None, delta0=1.0) -> CoupledModel:
    """Convenience constructor using the default truncation when ``fock_dim`` is None."""
    kind = Kind.parse(kind)
    if fock_dim is None:
        fock_dim = default_fock_dim(kind, lambda_inv)
    osc = OscillatorSpec(kind, lambda_inv, omega, fock_dim)
    return CoupledModel(QubitSpec(delta0, epsilon), osc, gbar, variant)


def build_hamiltonian(model: CoupledModel) -> OperatorMatrix:
    q = model.qubit
    n = model.osc.fock_dim
    x_series = np.sqrt(2.0) * position_operator(model.osc, model.variant).data
    h_osc = number_hamiltonian(model.osc).data
    coupling = q.bias_weight * SIGMA_Z + q.gap_weight * SIGMA_X
    h = (
        np.kron(0.5 * q.delta_q * SIGMA_Z, np.eye(n))
        + np.kron(np.eye(2), h_osc)
        - model.gbar * np.kron(coupling, x_series)
    )
    # kron of symmetric factors is symmetric up to rounding; make it exact
    return OperatorMatrix(0.5 * (h + h.T), "symmetric")


def uncoupled_levels(model: CoupledModel, count: int) -> np.ndarray:
    """Lowest ``count`` levels of the qubit plus oscillator at gbar = 0."""
    if count < 1 or count > model.dim:
        raise ValueError(f"count must lie in 1..{model.dim}")
    osc = np.diag(number_hamiltonian(model.osc).data)
    half = 0.5 * model.qubit.delta_q
    levels = np.concatenate([half + osc, -half + osc])
    return np.sort(levels)[:count]


def parity_operator(fock_dim: int) -> OperatorMatrix:
    """sz (x) (-1)^n, which commutes with H when eps = 0."""
    parity = np.diag((-1.0) ** np.arange(fock_dim))
    return OperatorMatrix(np.kron(SIGMA_Z, parity), "symmetric")
