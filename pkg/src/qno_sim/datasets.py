"""Plot-ready datasets: one function per CLI subcommand.

Each function takes a resolved RunConfig and returns a Dataset whose rows
are tuples matching ``columns``.  Sweep points are evaluated through an
ordered thread map; the numba eigensolver releases the GIL.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .algebra import Kind, default_fock_dim, k1_weights, momentum_operator, _f2
from .eigensolver import convergence_sweep, eigh
from .errors import NumericalError
from .hamiltonian import build_hamiltonian, make_model, uncoupled_levels
from .observables import (
    GridSpec,
    entropy,
    local_maxima_along_p0,
    mean_excitation,
    momentum_variance,
    reduce_oscillator,
    reduce_qubit,
    wigner,
)
from .pt_exact import PtBasis, exact_position_matrix
from .vanvleck import GROUND, vv_ground_energy, vv_spectrum, vv_state

LINEAR_FOCK_DIM = 60
SPECTRUM_LEVELS = 9


@dataclass(frozen=True)
class RunConfig:
    kind: str = "TPT"
    lambda_inv: float = 0.025
    omega: float = 1.0
    delta0: float = 1.0
    epsilon: float = 0.0
    gbar: float = 0.2
    gbar_sweep: tuple = None
    omega_sweep: tuple = None
    epsilon_sweep: tuple = None
    epsilons: tuple = (0.0, 0.1)
    fock_dim: object = None  # int, None (default truncation) or "auto"
    variant: str = "extended3"
    x_range: tuple = (-6.0, 6.0)
    p_range: tuple = (-6.0, 6.0)
    grid_points: int = 121
    n_max: int = 15
    output: str = "-"
    format: str = "csv"


@dataclass
class Dataset:
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)


def sweep_values(sweep):
    start, stop, steps = sweep
    return np.linspace(float(start), float(stop), int(steps))


def thread_count():
    cap = os.environ.get("QNO_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, min(n, 8))


def parallel_map(fn, items):
    """Ordered map over a thread pool capped by QNO_THREADS."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _model(cfg, fock_dim, **over):
    params = dict(kind=cfg.kind, lambda_inv=cfg.lambda_inv, omega=cfg.omega,
                  epsilon=cfg.epsilon, gbar=cfg.gbar, variant=cfg.variant,
                  fock_dim=fock_dim, delta0=cfg.delta0)
    params.update(over)
    return make_model(**params)


def _linear_model(cfg, fock_dim, **over):
    # undeformed oscillator: every weight is harmonic, so the variant is immaterial
    return _model(cfg, max(LINEAR_FOCK_DIM, fock_dim), lambda_inv=0.0, **over)


def resolve_fock_dim(cfg, demanding):
    """Truncation for a run plus header metadata.

    ``demanding`` holds parameter overrides for the hardest sweep point;
    with fock_dim = "auto" the convergence sweep runs there.  When the MPT
    limit stops the sweep first, the largest allowed N is used and the
    header records that convergence was not reached.
    """
    default = default_fock_dim(cfg.kind, cfg.lambda_inv)
    if cfg.fock_dim is None:
        return default, {}
    if cfg.fock_dim != "auto":
        return int(cfg.fock_dim), {}
    mpt = Kind.parse(cfg.kind) is Kind.MPT and cfg.lambda_inv > 0
    n_max = default if mpt else 200
    start = min(10, n_max)

    def make(n):
        return build_hamiltonian(_model(cfg, n, **demanding))

    try:
        n, _ = convergence_sweep(make, SPECTRUM_LEVELS, start, 10, 1e-8, n_max=n_max)
        return n, {"fock_converged": 1}
    except NumericalError as err:
        if not mpt:
            raise
        print(
            f"qno-sim: warning: truncation limited to N = {n_max} before convergence "
            f"(best change {err.achieved:.3e})",
            file=sys.stderr,
        )
        return n_max, {"fock_converged": 0, "fock_delta": float(err.achieved)}


def _ground_state(model):
    spec = eigh(build_hamiltonian(model))
    return spec.values[0], spec.vectors[:, 0]


def _gbar_points(cfg):
    if cfg.gbar_sweep is not None:
        return sweep_values(cfg.gbar_sweep)
    return np.array([cfg.gbar])


def spectrum(cfg):
    omegas = sweep_values(cfg.omega_sweep)
    n, meta = resolve_fock_dim(cfg, {"omega": float(omegas.min())})

    def point(om):
        model = _model(cfg, n, omega=float(om))
        numeric = eigh(build_hamiltonian(model)).values[:SPECTRUM_LEVELS]
        vv = vv_spectrum(model, SPECTRUM_LEVELS)
        bare = uncoupled_levels(model, SPECTRUM_LEVELS)
        return [(float(om), k, numeric[k], vv[k], bare[k]) for k in range(SPECTRUM_LEVELS)]

    rows = [r for block in parallel_map(point, omegas) for r in block]
    return Dataset(("omega_ratio", "level_index", "E_numeric", "E_vanvleck", "E_uncoupled"),
                   rows, dict(meta, fock_dim=n))


def ground(cfg):
    if cfg.epsilon_sweep is not None:
        var, values = "epsilon", sweep_values(cfg.epsilon_sweep)
        hard = {"epsilon": float(values[np.argmax(np.abs(values))])}
    else:
        var, values = "gbar", _gbar_points(cfg)
        hard = {"gbar": float(values.max())}
    n, meta = resolve_fock_dim(cfg, hard)

    def point(v):
        over = {var: float(v)}
        model = _model(cfg, n, **over)
        e_num, _ = _ground_state(model)
        e_lin, _ = _ground_state(_linear_model(cfg, n, **over))
        return (float(v), e_num, vv_ground_energy(model), e_lin)

    return Dataset((var, "E0_numeric", "E0_vanvleck", "E0_linear"),
                   parallel_map(point, values), dict(meta, fock_dim=n))


def excitations(cfg):
    gs = _gbar_points(cfg)
    n, meta = resolve_fock_dim(cfg, {"gbar": float(gs.max())})

    def point(g):
        model = _model(cfg, n, gbar=float(g))
        _, psi = _ground_state(model)
        _, psi_lin = _ground_state(_linear_model(cfg, n, gbar=float(g)))
        vv = vv_state(model, GROUND).vector
        return (float(g), mean_excitation(reduce_oscillator(psi)),
                mean_excitation(reduce_oscillator(vv)), mean_excitation(reduce_oscillator(psi_lin)))

    return Dataset(("gbar", "n_numeric", "n_vanvleck", "n_linear"),
                   parallel_map(point, gs), dict(meta, fock_dim=n))


def pvariance(cfg):
    gs = _gbar_points(cfg)
    n, meta = resolve_fock_dim(cfg, {"gbar": float(gs.max())})

    def point(g):
        model = _model(cfg, n, gbar=float(g))
        lin = _linear_model(cfg, n, gbar=float(g))
        _, psi = _ground_state(model)
        _, psi_lin = _ground_state(lin)
        var = momentum_variance(reduce_oscillator(psi), momentum_operator(model.osc, model.variant))
        var_lin = momentum_variance(reduce_oscillator(psi_lin), momentum_operator(lin.osc, lin.variant))
        return (float(g), var, var_lin)

    return Dataset(("gbar", "var_numeric", "var_linear"), parallel_map(point, gs), dict(meta, fock_dim=n))


def entropy_curves(cfg):
    gs = _gbar_points(cfg)
    eps_list = [float(e) for e in cfg.epsilons]
    n, meta = resolve_fock_dim(cfg, {"gbar": float(gs.max())})
    points = [(e, float(g)) for e in eps_list for g in gs]

    def point(item):
        e, g = item
        _, psi = _ground_state(_model(cfg, n, gbar=g, epsilon=e))
        _, psi_lin = _ground_state(_linear_model(cfg, n, gbar=g, epsilon=e))
        return (g, e, entropy(reduce_qubit(psi)), entropy(reduce_qubit(psi_lin)))

    return Dataset(("gbar", "epsilon", "S_numeric", "S_linear"), parallel_map(point, points),
                   dict(meta, fock_dim=n))


def wigner_map(cfg):
    n, meta = resolve_fock_dim(cfg, {})
    model = _model(cfg, n)
    grid = GridSpec(cfg.x_range[0], cfg.x_range[1], cfg.grid_points,
                    cfg.p_range[0], cfg.p_range[1], cfg.grid_points)
    _, psi = _ground_state(model)
    rho = reduce_oscillator(psi)
    if model.osc.lambda_inv > 0:
        basis = PtBasis.from_spec(model.osc)
    else:
        # harmonic limit stands in through a very weakly deformed TPT well
        basis = PtBasis(Kind.TPT, 1e6, np.sqrt(model.osc.omega * 1e-6), n)
    w = wigner(rho, basis, grid)
    rows = [(float(x), float(p), float(w.values[i, j]))
            for i, x in enumerate(w.x_axis) for j, p in enumerate(w.p_axis)]
    maxima = local_maxima_along_p0(w) if np.any(np.isclose(w.p_axis, 0.0, atol=1e-12)) else []
    meta = dict(meta, fock_dim=n, norm=w.norm_estimate, p0_maxima=len(maxima))
    return Dataset(("x", "p", "W"), rows, meta)


def matelem(cfg):
    lam = cfg.lambda_inv
    n_max = int(cfg.n_max)
    levels = np.arange(n_max + 1)
    k1 = k1_weights(cfg.kind, lam, levels)
    sign = Kind.parse(cfg.kind).sign
    vibron = np.sqrt((levels + 1) * _f2(sign, lam, levels + 1) / 2.0)
    extended = vibron * k1
    if lam > 0:
        basis = PtBasis(cfg.kind, 1.0 / lam, np.sqrt(cfg.omega * lam), n_max + 2)
        exact = np.diag(exact_position_matrix(basis, n_max + 2), -1)
    else:
        exact = np.sqrt((levels + 1) / 2.0)
    rows = [(int(k), exact[k], extended[k], vibron[k],
             abs(extended[k] - exact[k]), abs(vibron[k] - exact[k])) for k in levels]
    return Dataset(("n", "exact", "extended", "vibron", "dev_extended", "dev_vibron"), rows,
                   {"fock_dim": n_max + 2})


COMMANDS = {
    "spectrum": spectrum,
    "ground": ground,
    "excitations": excitations,
    "pvariance": pvariance,
    "wigner": wigner_map,
    "entropy": entropy_curves,
    "matelem": matelem,
}


def header_line(command, cfg, meta):
    parts = [f"# qno-sim v{__version__}", f"command={command}", f"kind={cfg.kind}",
             f"lambda_inv={cfg.lambda_inv:.12g}", f"variant={cfg.variant}"]
    for key in sorted(meta):
        val = meta[key]
        parts.append(f"{key}={val:.12g}" if isinstance(val, float) else f"{key}={val}")
    return " ".join(parts)


def format_csv(command, cfg, data: Dataset) -> str:
    lines = [header_line(command, cfg, data.meta), ",".join(data.columns)]
    for row in data.rows:
        cells = []
        for v in row:
            if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
                cells.append("%d" % v)
            else:
                cells.append("%.12e" % float(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def format_json(command, cfg, data: Dataset) -> str:
    meta = {"version": __version__, "command": command, "kind": cfg.kind,
            "lambda_inv": cfg.lambda_inv, "variant": cfg.variant}
    meta.update(data.meta)
    records = [
        {c: (int(v) if isinstance(v, (int, np.integer)) else float(v)) for c, v in zip(data.columns, row)}
        for row in data.rows
    ]
    return json.dumps({"meta": meta, "records": records}, indent=1, sort_keys=False) + "\n"


def with_defaults(command, cfg: RunConfig) -> RunConfig:
    """Fill the sweep a subcommand needs when the caller gave none."""
    if command == "spectrum" and cfg.omega_sweep is None:
        cfg = replace(cfg, omega_sweep=(0.5, 1.5, 21))
    if command in ("ground",) and cfg.gbar_sweep is None and cfg.epsilon_sweep is None:
        cfg = replace(cfg, gbar_sweep=(0.0, 2.5, 26))
    if command in ("excitations", "pvariance", "entropy") and cfg.gbar_sweep is None:
        cfg = replace(cfg, gbar_sweep=(0.0, 2.5, 26))
    return cfg
