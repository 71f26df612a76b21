"""Named invariant checks run by ``qno-sim validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    Kind,
    OscillatorSpec,
    Variant,
    k1_weights,
    ladder_matrices,
    level_spacing,
    number_hamiltonian,
    _f2,
)
from .eigensolver import eigh
from .hamiltonian import build_hamiltonian, make_model, parity_operator
from .observables import GridSpec, entropy, reduce_oscillator, reduce_qubit, wigner, position_density
from .pt_exact import PtBasis, exact_position_matrix, orthonormality_matrix
from .vanvleck import vv_ground_energy, vv_spectrum


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _algebra():
    worst = 0.0
    cases = [(k, l) for k in (Kind.TPT, Kind.MPT) for l in (0.0, 0.025, 0.05)] + [(Kind.TPT, 0.1)]
    for kind, lam in cases:
        n = 60
        if kind is Kind.MPT and lam > 0:
            n = min(60, int(np.floor(1.0 / lam)) - 6)
        spec = OscillatorSpec(kind, lam, 1.0, n)
        a, ad = (m.data for m in ladder_matrices(spec))
        comm = a @ ad - ad @ a
        inner = slice(0, n - 1)
        expected = np.diag(1.0 + kind.sign * np.arange(n) * lam)
        worst = max(worst, np.max(np.abs(comm - expected)[inner, inner]))
        h = number_hamiltonian(spec).data
        shift = h @ a - a @ h
        cols = np.arange(n)
        target = -level_spacing(spec, cols - 1)[None, :] * a
        worst = max(worst, np.max(np.abs(shift - target)[1:n - 1, 1:n - 1]))
    return worst < 1e-10, f"max identity deviation {worst:.2e}"


def rabi_reference(gbar, omega=1.0, delta0=1.0, n=60):
    """Lowest levels of the quantum Rabi model, built independently."""
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    x = a + a.T
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = 0.5 * delta0 * np.kron(sz, np.eye(n)) + omega * np.kron(np.eye(2), a.T @ a) - gbar * np.kron(sx, x)
    return np.linalg.eigvalsh(h)


def _rabi():
    worst = 0.0
    for g in (0.1, 0.2):
        model = make_model("TPT", 0.0, 1.0, 0.0, g, Variant.EXTENDED1, fock_dim=60)
        ours = eigh(build_hamiltonian(model)).values[:9]
        worst = max(worst, np.max(np.abs(ours - rabi_reference(g)[:9])))
    return worst < 1e-9, f"max level deviation {worst:.2e}"


def _vanvleck_spectrum():
    worst = 0.0
    for kind in ("TPT", "MPT"):
        for om in np.linspace(0.5, 1.5, 21):
            model = make_model(kind, 0.025, float(om), 0.0, 0.2)
            num = eigh(build_hamiltonian(model)).values[:9]
            worst = max(worst, np.max(np.abs(num - vv_spectrum(model, 9))))
    return worst < 0.02, f"max |E_vv - E_num| {worst:.4f}"


def _ground_anchor():
    model = make_model("TPT", 0.025, 1.0, 0.0, 0.2)
    e_vv = vv_ground_energy(model)
    e_num = eigh(build_hamiltonian(model)).values[0]
    k = k1_weights("TPT", 0.025, 0)
    om0 = 1.0125
    closed = -(0.5 + k**2 * _f2(1, 0.025, 1) * 0.04 / (1.0 + om0))
    ok = abs(e_vv - closed) < 1e-6 and abs(e_num - e_vv) < 5e-3
    return ok, f"E0_vv {e_vv:.7f}, closed form {closed:.7f}, numeric {e_num:.7f}"


def _matelem():
    rows = []
    ok = True
    for lam in (0.025, 0.05):
        basis = PtBasis("TPT", 1.0 / lam, np.sqrt(lam), 17)
        exact = np.diag(exact_position_matrix(basis, 17), -1)
        n = np.arange(16)
        vib = np.sqrt((n + 1) * _f2(1, lam, n + 1) / 2.0)
        ext = vib * k1_weights("TPT", lam, n)
        ok &= bool(np.all(np.abs(ext - exact) < np.abs(vib - exact)))
        rows.append(f"TPT {lam}: {np.max(np.abs(ext - exact)):.3e}")
    basis = PtBasis("MPT", 20.0, np.sqrt(0.05), 17)
    exact = np.diag(exact_position_matrix(basis, 17), -1)
    n = np.arange(16)
    vib = np.sqrt((n + 1) * _f2(-1, 0.05, n + 1) / 2.0)
    ext = vib * k1_weights("MPT", 0.05, n)
    worse = np.abs(ext - exact)[10:] > np.abs(vib - exact)[10:]
    ok &= bool(np.any(worse))
    rows.append(f"MPT 0.05 extended worse than vibron at n = {[int(i) + 10 for i in np.nonzero(worse)[0]]}")
    return ok, "; ".join(rows)


def _exact_basis():
    worst = 0.0
    for kind, lam in (("TPT", 0.025), ("MPT", 0.025), ("MPT", 0.05)):
        basis = PtBasis(kind, 1.0 / lam, np.sqrt(lam), 10)
        worst = max(worst, np.max(np.abs(orthonormality_matrix(basis, 10) - np.eye(10))))
    return worst < 1e-7, f"max |Gram - I| {worst:.2e}"


def _parity():
    worst = 0.0
    for kind in ("TPT", "MPT"):
        model = make_model(kind, 0.025, 1.0, 0.0, 0.7)
        h = build_hamiltonian(model).data
        p = parity_operator(model.osc.fock_dim).data
        worst = max(worst, np.max(np.abs(h @ p - p @ h)))
    return worst < 1e-12, f"max |[H, P]| {worst:.2e}"


def _observables():
    worst_s = 0.0
    worst_w = 0.0
    for kind, g in (("TPT", 2.0), ("MPT", 1.25)):
        model = make_model(kind, 0.025, 1.0, 0.0, g)
        psi = eigh(build_hamiltonian(model)).vectors[:, 0]
        rq, rn = reduce_qubit(psi), reduce_oscillator(psi)
        worst_s = max(worst_s, abs(entropy(rq) - entropy(rn)))
        basis = PtBasis.from_spec(model.osc)
        w = wigner(rn, basis, GridSpec(nx=61, np_=61))
        marg = np.max(np.abs(w.position_marginal() - position_density(rn, basis, w.x_axis)))
        worst_w = max(worst_w, abs(w.norm_estimate - 1.0), marg)
    ok = worst_s < 1e-8 and worst_w < 1e-3
    return ok, f"entropy asymmetry {worst_s:.2e}, Wigner norm/marginal error {worst_w:.2e}"


CHECKS = {
    "algebra_identities": _algebra,
    "harmonic_rabi": _rabi,
    "parity_symmetry": _parity,
    "exact_basis_orthonormal": _exact_basis,
    "vanvleck_vs_numeric": _vanvleck_spectrum,
    "ground_state_anchor": _ground_anchor,
    "matrix_element_oracle": _matelem,
    "observable_invariants": _observables,
}


def run_all(names=None):
    results = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
