"""Acceptance criteria 1-9.

Each test prints one ``PASS``/``FAIL`` line (also with pytest capturing on)
and then asserts.  Run ``python3 tests/test_acceptance.py`` for the lines
alone.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import rabi_levels  # noqa: E402
from qno_sim.algebra import (  # noqa: E402
    Kind,
    OscillatorSpec,
    k1_weights,
    ladder_matrices,
    level_spacing,
    momentum_operator,
    mpt_fock_limit,
    number_hamiltonian,
    _f2,
)
from qno_sim.cli import main  # noqa: E402
from qno_sim.eigensolver import eigh  # noqa: E402
from qno_sim.hamiltonian import build_hamiltonian, make_model  # noqa: E402
from qno_sim.observables import (  # noqa: E402
    DensityMatrix,
    GridSpec,
    entropy,
    local_maxima_along_p0,
    mean_excitation,
    momentum_variance,
    position_density,
    reduce_oscillator,
    reduce_qubit,
    wigner,
)
from qno_sim.pt_exact import PtBasis, exact_position_matrix  # noqa: E402
from qno_sim.vanvleck import s_matrices, vv_ground_energy, vv_spectrum, vv_state  # noqa: E402

GBAR_SWEEP = np.linspace(0.0, 2.5, 26)


def _ground(model):
    r = eigh(build_hamiltonian(model))
    return r.values[0], r.vectors[:, 0]


# criteria


def criterion_1():
    worst = 0.0
    cases = [(k, l) for k in (Kind.TPT, Kind.MPT) for l in (0.0, 0.025, 0.05)] + [(Kind.TPT, 0.1)]
    for kind, lam in cases:
        n = 60 if kind is Kind.TPT or lam == 0 else min(60, mpt_fock_limit(lam))
        spec = OscillatorSpec(kind, lam, 1.0, n)
        a, ad = (m.data for m in ladder_matrices(spec))
        inner = slice(0, n - 1)
        comm = (a @ ad - ad @ a)[inner, inner]
        worst = max(worst, np.max(np.abs(comm - np.diag(1.0 + kind.sign * np.arange(n - 1) * lam))))
        h = number_hamiltonian(spec).data
        shift = h @ a - a @ h + level_spacing(spec, np.arange(n) - 1)[None, :] * a
        worst = max(worst, np.max(np.abs(shift[1 : n - 1, 1 : n - 1])))
    return worst < 1e-10, f"max commutator/ladder-shift deviation {worst:.2e}"


def criterion_2():
    worst_e = 0.0
    alaki = 0.0
    for g in (0.1, 0.2):
        model = make_model("TPT", 0.0, 1.0, 0.0, g, fock_dim=60)
        r = eigh(build_hamiltonian(model))
        worst_e = max(worst_e, np.max(np.abs(r.values[:9] - rabi_levels(g)[:9])))
        psi = r.vectors[:, 0]
        alaki = max(alaki, abs(entropy(reduce_qubit(psi)) - entropy(reduce_oscillator(psi))))
    # hand-coded qubit-linear-oscillator generator and ground energy
    n, om, eps, g = 10, 1.3, 0.4, 0.1
    dq = np.hypot(eps, 1.0)
    s = s_matrices(make_model("TPT", 0.0, om, eps, g, "extended1", fock_dim=n))
    is1 = np.zeros((2 * n, 2 * n))
    for k in range(n - 1):
        r = np.sqrt(k + 1.0)
        is1[n + k + 1, n + k] = eps * g * r / (dq * om)
        is1[k + 1, k] = -eps * g * r / (dq * om)
        is1[k + 1, n + k] = -g * r / (dq * (dq + om))
    is1 = is1 - is1.T
    worst_s = np.max(np.abs(s.is1 - is1))
    idx = np.r_[0 : n - 2, n : 2 * n - 2]
    off = ~np.eye(idx.size, dtype=bool)
    prod = (is1 @ is1)[np.ix_(idx, idx)]
    worst_s = max(worst_s, np.max(np.abs((s.is1is1[np.ix_(idx, idx)] - prod)[off])))
    s0 = s_matrices(make_model("TPT", 0.0, om, 0.0, g, "extended1", fock_dim=n))
    is2 = np.zeros((2 * n, 2 * n))
    for k in range(n - 2):
        c = np.sqrt((k + 1.0) * (k + 2.0)) * g**2 / (2 * om * (1 + om))
        is2[n + k + 2, n + k] = -c
        is2[k + 2, k] = c
    worst_s = max(worst_s, np.max(np.abs(s0.is2 - (is2 - is2.T))))
    e0 = -dq / 2 - g**2 * (eps**2 / (dq**2 * om) + 1.0 / (dq**2 * (dq + om)))
    m = make_model("TPT", 0.0, om, eps, g, "extended1", fock_dim=n)
    worst_s = max(worst_s, abs(vv_ground_energy(m) - e0))
    ok = worst_e < 1e-9 and worst_s < 1e-10 and alaki < 1e-8
    return ok, (f"Rabi levels {worst_e:.2e}, harmonic generator/energy formulas {worst_s:.2e}, "
                f"entropy asymmetry {alaki:.2e}")


def _vv_worst(g):
    worst, where = 0.0, None
    for kind in ("TPT", "MPT"):
        for om in np.linspace(0.5, 1.5, 21):
            model = make_model(kind, 0.025, float(om), 0.0, g)
            dev = np.abs(eigh(build_hamiltonian(model)).values[:9] - vv_spectrum(model, 9))
            if dev.max() > worst:
                worst, where = float(dev.max()), (kind, float(om), int(dev.argmax()))
    return worst, where


def criterion_3():
    t0 = time.perf_counter()
    w2, where = _vv_worst(0.2)
    runtime = time.perf_counter() - t0
    w1, _ = _vv_worst(0.1)
    ratio = w2 / w1
    ok = w2 < 0.02 and ratio >= 4.0 and runtime < 10.0
    kind, om, level = where
    return ok, (f"max |E_vv - E_num| = {w2:.4f} (bound 0.02, worst {kind} Omega={om:.2f} level {level}); "
                f"halving gbar shrinks it {ratio:.1f}x (need >= 4); runtime {runtime:.1f} s")


def criterion_4():
    exact = True
    for eps in (0.0, 0.3):
        model = make_model("TPT", 0.025, 1.0, eps, 0.0)
        half = 0.5 * np.hypot(eps, 1.0)
        exact &= _ground(model)[0] == -half and vv_ground_energy(model) == -half
    model = make_model("TPT", 0.025, 1.0, 0.0, 0.2)
    e_vv = vv_ground_energy(model)
    # closed form with Delta_Q = Delta0 = 1, eps = 0, Omega_0 = 1.0125
    k = float(k1_weights("TPT", 0.025, 0))
    closed = -(0.5 + k**2 * _f2(1, 0.025, 1) * 0.04 / (1.0 + 1.0125))
    e_num = _ground(model)[0]
    ok = exact and abs(e_vv - (-0.519623)) < 1e-6 and abs(e_vv - closed) < 1e-12 and abs(e_num - e_vv) < 5e-3
    return ok, f"E0(g=0) exact: {exact}; E0_vv {e_vv:.7f} (target -0.519623); numeric {e_num:.7f}"


def criterion_5():
    targets = {("TPT", 1.5): 0.03, ("MPT", 1.5): 0.3, ("TPT", 2.0): 0.06, ("MPT", 2.0): 0.47}
    parts, ok = [], True
    for (kind, g), target in targets.items():
        n3 = mean_excitation(reduce_oscillator(_ground(make_model(kind, 0.025, 1.0, 0.0, g, "extended3"))[1]))
        n1 = mean_excitation(reduce_oscillator(_ground(make_model(kind, 0.025, 1.0, 0.0, g, "extended1"))[1]))
        d = abs(n3 - n1)
        ok &= abs(d - target) <= 0.5 * target
        parts.append(f"{kind} g={g}: {d:.3f} (~{target})")
    return ok, "; ".join(parts)


def criterion_6():
    ok = True
    parts = []
    n = np.arange(16)
    for lam in (0.025, 0.05):
        exact = np.diag(exact_position_matrix(PtBasis("TPT", 1.0 / lam, np.sqrt(lam), 17), 17), -1)
        vib = np.sqrt((n + 1) * _f2(1, lam, n + 1) / 2.0)
        ext = vib * k1_weights("TPT", lam, n)
        better = np.abs(ext - exact) < np.abs(vib - exact)
        ok &= bool(np.all(better))
        parts.append(f"TPT {lam}: extended closer for {int(better.sum())}/16")
    exact = np.diag(exact_position_matrix(PtBasis("MPT", 20.0, np.sqrt(0.05), 17), 17), -1)
    vib = np.sqrt((n + 1) * _f2(-1, 0.05, n + 1) / 2.0)
    ext = vib * k1_weights("MPT", 0.05, n)
    worse = [int(k) for k in n[10:] if abs(ext[k] - exact[k]) > abs(vib[k] - exact[k])]
    ok &= bool(worse)
    parts.append(f"MPT 0.05: extended worse at n = {worse}")
    return ok, "; ".join(parts)


def criterion_7():
    states = [("TPT", g, e) for g in (0.0, 0.5, 1.25, 2.0) for e in (0.0, 0.1)]
    states += [("MPT", g, e) for g in (0.5, 1.25, 1.5) for e in (0.0, 0.1)]
    worst_s = worst_w = 0.0
    grid = GridSpec(nx=61, np_=81)
    for kind, g, eps in states:
        model = make_model(kind, 0.025, 1.0, eps, g)
        psi = _ground(model)[1]
        rq, rn = reduce_qubit(psi), reduce_oscillator(psi)  # DensityMatrix checks trace, symmetry, PSD
        worst_s = max(worst_s, abs(entropy(rq) - entropy(rn)))
        basis = PtBasis.from_spec(model.osc)
        w = wigner(rn, basis, grid)
        marg = np.max(np.abs(w.position_marginal() - position_density(rn, basis, w.x_axis)))
        worst_w = max(worst_w, abs(w.norm_estimate - 1.0), marg)
    ok = worst_s < 1e-8 and worst_w < 1e-3
    return ok, f"{len(states)} states; entropy asymmetry {worst_s:.2e}; Wigner norm/marginal error {worst_w:.2e}"


def _variance_curve(kind, lam):
    out = []
    for g in GBAR_SWEEP:
        model = make_model(kind, lam, 1.0, 0.0, float(g), fock_dim=None if lam else 60)
        rho = reduce_oscillator(_ground(model)[1])
        out.append(momentum_variance(rho, momentum_operator(model.osc, model.variant)))
    return np.array(out)


def criterion_8():
    parts = []
    tpt = _variance_curve("TPT", 0.025)
    inside = (GBAR_SWEEP > 0.3) & (GBAR_SWEEP < 1.3)
    beyond = GBAR_SWEEP >= 2.0
    a = bool(np.any(tpt[inside] < 0.5) and np.all(tpt[beyond] > 0.5))
    parts.append(f"(a) TPT min var in (0.3,1.3) {tpt[inside].min():.3f}, min for g>=2 {tpt[beyond].min():.3f}")
    mpt = _variance_curve("MPT", 0.025)
    lin = _variance_curve("TPT", 0.0)
    b = bool(np.any(mpt < lin))
    parts.append(f"(b) MPT below linear at {int(np.sum(mpt < lin))}/26 points")
    c = True
    counts = []
    for kind, g in (("TPT", 2.0), ("MPT", 1.25), ("MPT", 1.5)):
        model = make_model(kind, 0.025, 1.0, 0.0, g)
        rho = reduce_oscillator(_ground(model)[1])
        w = wigner(rho, PtBasis.from_spec(model.osc), GridSpec(np_=3, p_min=-1, p_max=1))
        m = len(local_maxima_along_p0(w))
        counts.append(m)
        c &= m >= 2
    parts.append(f"(c) p=0 maxima {counts}")
    s_tpt = entropy(reduce_qubit(_ground(make_model("TPT", 0.025, 1.0, 0.0, 2.0))[1]))
    d = abs(s_tpt - 1.0) < 0.05
    parts.append(f"(d) S(TPT, g=2) {s_tpt:.4f}")
    s_eps = np.array([entropy(reduce_qubit(_ground(make_model("TPT", 0.025, 1.0, 0.1, float(g)))[1]))
                      for g in GBAR_SWEEP])
    peak = int(np.argmax(s_eps))
    e = bool(0 < peak < len(GBAR_SWEEP) - 1 and s_eps[-1] < 0.5 * s_eps[peak]
             and np.all(np.diff(s_eps[: peak + 1]) > 0) and np.all(np.diff(s_eps[peak:]) < 0))
    parts.append(f"(e) eps=0.1 entropy peaks {s_eps[peak]:.3f} at g={GBAR_SWEEP[peak]:.1f}, ends {s_eps[-1]:.4f}")
    return a and b and c and d and e, "; ".join(parts)


SUBCOMMANDS = [
    ["spectrum"],
    ["ground"],
    ["ground", "--epsilon-sweep", "-0.5", "0.5", "5"],
    ["excitations"],
    ["pvariance"],
    ["entropy"],
    ["wigner", "--kind", "MPT", "--gbar", "1.25"],
    ["matelem", "--format", "json"],
    ["validate"],
]


def criterion_9(tmp_dir):
    tmp_dir = Path(tmp_dir)
    differing = []
    for i, args in enumerate(SUBCOMMANDS):
        outs = []
        for rep in range(2):
            path = tmp_dir / f"run{i}_{rep}.out"
            main([*args, "-o", str(path)])
            outs.append(path.read_bytes())
        if outs[0] != outs[1] or not outs[0]:
            differing.append(" ".join(args))
    return not differing, f"{len(SUBCOMMANDS)} subcommand configs run twice; differing: {differing or 'none'}"


# pytest wiring


def _report(number, result, capsys=None):
    ok, detail = result
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok, line


def test_criterion_1_algebra_identities(capsys):
    ok, line = _report(1, criterion_1(), capsys)
    assert ok, line


def test_criterion_2_harmonic_regression(capsys):
    ok, line = _report(2, criterion_2(), capsys)
    assert ok, line


def test_criterion_3_vanvleck_spectrum(capsys):
    ok, line = _report(3, criterion_3(), capsys)
    assert ok, line


def test_criterion_4_ground_state_anchors(capsys):
    ok, line = _report(4, criterion_4(), capsys)
    assert ok, line


def test_criterion_5_excitation_deviations(capsys):
    ok, line = _report(5, criterion_5(), capsys)
    assert ok, line


def test_criterion_6_matrix_element_oracle(capsys):
    ok, line = _report(6, criterion_6(), capsys)
    assert ok, line


def test_criterion_7_observable_invariants(capsys):
    ok, line = _report(7, criterion_7(), capsys)
    assert ok, line


def test_criterion_8_phenomenology(capsys):
    ok, line = _report(8, criterion_8(), capsys)
    assert ok, line


def test_criterion_9_determinism(capsys, tmp_path):
    ok, line = _report(9, criterion_9(tmp_path), capsys)
    assert ok, line


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        results = [_report(1, criterion_1()), _report(2, criterion_2()), _report(3, criterion_3()),
                   _report(4, criterion_4()), _report(5, criterion_5()), _report(6, criterion_6()),
                   _report(7, criterion_7()), _report(8, criterion_8()), _report(9, criterion_9(tmp))]
    sys.exit(0 if all(ok for ok, _ in results) else 1)
