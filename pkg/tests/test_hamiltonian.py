import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import rabi_levels
from qno_sim.algebra import Variant, number_hamiltonian, position_operator
from qno_sim.eigensolver import eigh
from qno_sim.hamiltonian import (
    QubitSpec,
    build_hamiltonian,
    make_model,
    parity_operator,
    uncoupled_levels,
)


@pytest.mark.parametrize("gbar", [0.1, 0.2, 0.7])
@pytest.mark.parametrize("variant", list(Variant))
def test_rabi_reference(gbar, variant):
    model = make_model("TPT", 0.0, 1.0, 0.0, gbar, variant, fock_dim=60)
    ours = eigh(build_hamiltonian(model)).values[:9]
    np.testing.assert_allclose(ours, rabi_levels(gbar)[:9], atol=1e-10)


def test_qubit_spec():
    q = QubitSpec(1.0, 0.75)
    assert q.delta_q == pytest.approx(1.25)
    assert q.bias_weight == pytest.approx(0.6) and q.gap_weight == pytest.approx(0.8)
    assert np.tan(q.theta) == pytest.approx(-1.0 / 0.75)
    with pytest.raises(ValueError):
        QubitSpec(0.0, 0.1)


def test_block_structure():
    model = make_model("TPT", 0.025, 1.1, 0.3, 0.4, fock_dim=12)
    h = build_hamiltonian(model).data
    n = 12
    q = model.qubit
    x = np.sqrt(2) * position_operator(model.osc).data
    osc = number_hamiltonian(model.osc).data
    np.testing.assert_allclose(h[:n, :n], 0.5 * q.delta_q * np.eye(n) + osc - 0.4 * q.bias_weight * x,
                               atol=1e-14)
    np.testing.assert_allclose(h[n:, n:], -0.5 * q.delta_q * np.eye(n) + osc + 0.4 * q.bias_weight * x,
                               atol=1e-14)
    np.testing.assert_allclose(h[:n, n:], -0.4 * q.gap_weight * x, atol=1e-14)


def test_uncoupled_levels_match_diagonalisation():
    for kind in ("TPT", "MPT"):
        model = make_model(kind, 0.025, 0.9, 0.2, 0.0)
        np.testing.assert_allclose(uncoupled_levels(model, 9), eigh(build_hamiltonian(model)).values[:9],
                                   atol=1e-13)
    assert make_model("TPT", 0.0, 1.0, 0.0, 0.0).dim == 120


@pytest.mark.parametrize("kind", ["TPT", "MPT"])
def test_parity(kind):
    model = make_model(kind, 0.025, 1.0, 0.0, 0.9)
    h = build_hamiltonian(model).data
    p = parity_operator(model.osc.fock_dim).data
    assert np.max(np.abs(h @ p - p @ h)) < 1e-12
    biased = build_hamiltonian(model.replace(epsilon=0.2)).data
    assert np.max(np.abs(biased @ p - p @ biased)) > 1e-3


def test_truncation_stability():
    low = [eigh(build_hamiltonian(make_model("TPT", 0.025, 1.0, 0.0, 0.5, fock_dim=n))).values[:9]
           for n in (40, 60)]
    np.testing.assert_allclose(low[0], low[1], atol=1e-8)


def test_replace():
    model = make_model("MPT", 0.025, 1.0, 0.0, 0.2)
    assert model.replace(fock_dim=10).osc.fock_dim == 10
    assert model.replace(omega=0.5).osc.omega == 0.5
    assert model.replace(epsilon=0.1).qubit.epsilon == 0.1
    assert model.replace(gbar=1.0).gbar == 1.0
    with pytest.raises(ValueError):
        model.replace(gbar=-1.0)


@settings(max_examples=30, deadline=None)
@given(kind=st.sampled_from(["TPT", "MPT"]), lam=st.floats(0.0, 0.04), omega=st.floats(0.3, 2.0),
       eps=st.floats(-1.0, 1.0), g=st.floats(0.0, 2.5))
def test_hamiltonian_property(kind, lam, omega, eps, g):
    model = make_model(kind, lam, omega, eps, g, fock_dim=12)
    h = build_hamiltonian(model).data
    assert np.array_equal(h, h.T)
    # the bias enters as eps -> -eps with the qubit flipped: the spectrum is even in eps
    h_neg = build_hamiltonian(model.replace(epsilon=-eps)).data
    np.testing.assert_allclose(eigh(h).values, eigh(h_neg).values, atol=1e-9 * (1 + np.abs(h).max()))
