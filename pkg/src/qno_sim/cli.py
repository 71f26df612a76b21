"""Command-line front end: ``qno-sim <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 MPT truncation outside the real-algebra range.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace

from . import __version__
from .algebra import Kind, Variant
from .datasets import COMMANDS, RunConfig, format_csv, format_json, with_defaults
from .errors import DomainError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_GUARD = 4

SWEEPS = ("gbar_sweep", "omega_sweep", "epsilon_sweep")


class ConfigError(ValueError):
    pass


def _fock(value):
    if value == "auto":
        return "auto"
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'auto'") from None
    if n < 2:
        raise argparse.ArgumentTypeError("fock dimension must be >= 2")
    return n


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def _add_common(p):
    s = argparse.SUPPRESS
    p.add_argument("--config", default=s, metavar="PATH", help="JSON file with option values")
    p.add_argument("--kind", default=s, type=str.upper, choices=["TPT", "MPT"])
    p.add_argument("--lambda-inv", dest="lambda_inv", type=float, default=s)
    p.add_argument("--omega", type=float, default=s)
    p.add_argument("--epsilon", type=float, default=s)
    p.add_argument("--gbar", type=float, default=s)
    p.add_argument("--gbar-sweep", dest="gbar_sweep", nargs=3, type=float, default=s,
                   metavar=("START", "STOP", "STEPS"))
    p.add_argument("--omega-sweep", dest="omega_sweep", nargs=3, type=float, default=s,
                   metavar=("START", "STOP", "STEPS"))
    p.add_argument("--epsilon-sweep", dest="epsilon_sweep", nargs=3, type=float, default=s,
                   metavar=("START", "STOP", "STEPS"))
    p.add_argument("--epsilons", type=_float_list, default=s, help="bias values for entropy curves")
    p.add_argument("--fock-dim", dest="fock_dim", type=_fock, default=s, metavar="N|auto")
    p.add_argument("--variant", default=s, choices=[v.label for v in Variant])
    p.add_argument("--x-range", dest="x_range", nargs=2, type=float, default=s, metavar=("MIN", "MAX"))
    p.add_argument("--p-range", dest="p_range", nargs=2, type=float, default=s, metavar=("MIN", "MAX"))
    p.add_argument("--grid-points", dest="grid_points", type=int, default=s)
    p.add_argument("--n-max", dest="n_max", type=int, default=s)
    p.add_argument("--output", "-o", default=s, metavar="PATH", help="output file ('-' for stdout)")
    p.add_argument("--format", default=s, choices=["csv", "json"])


def build_parser():
    parser = argparse.ArgumentParser(prog="qno-sim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qno-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "lowest nine levels versus Omega (numeric, Van Vleck, uncoupled)",
        "ground": "ground-state energy versus gbar or epsilon",
        "excitations": "ground-state <n> versus gbar",
        "pvariance": "ground-state momentum variance versus gbar",
        "wigner": "Wigner function of the reduced oscillator ground state",
        "entropy": "qubit entropy versus gbar for several biases",
        "matelem": "exact versus approximate <n+1|x|n>",
        "validate": "run the invariant suite",
    }
    for name, text in helps.items():
        _add_common(sub.add_parser(name, help=text, description=text))
    return parser


def _sweep(value, name):
    if value is None:
        return None
    if len(value) != 3:
        raise ConfigError(f"{name} needs START STOP STEPS")
    start, stop, steps = float(value[0]), float(value[1]), value[2]
    if float(steps) != int(steps) or int(steps) < 2:
        raise ConfigError(f"{name}: STEPS must be an integer >= 2")
    if not stop > start:
        raise ConfigError(f"{name}: STOP must exceed START")
    return (start, stop, int(steps))


def resolve_config(args) -> RunConfig:
    """Defaults, then the JSON config file, then explicit flags."""
    values = {}
    known = {f.name for f in fields(RunConfig)}
    cli = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = sorted(set(loaded) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values.update(loaded)
    values.update(cli)
    cfg = RunConfig(**values)
    try:
        kind = Kind.parse(cfg.kind).value
        variant = Variant.parse(cfg.variant).label
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sweeps = {name: _sweep(getattr(cfg, name), name) for name in SWEEPS}
    given = [n for n, v in sweeps.items() if v is not None]
    if len(given) > 1:
        raise ConfigError("only one of --gbar-sweep, --omega-sweep, --epsilon-sweep may be given")
    fock = cfg.fock_dim
    if fock is not None and fock != "auto":
        if isinstance(fock, bool) or int(fock) != fock or int(fock) < 2:
            raise ConfigError("fock_dim must be an integer >= 2 or 'auto'")
        fock = int(fock)
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    for name in ("lambda_inv", "omega", "epsilon", "gbar", "delta0"):
        try:
            float(getattr(cfg, name))
        except (TypeError, ValueError):
            raise ConfigError(f"{name} must be a number") from None
    if float(cfg.lambda_inv) < 0 or float(cfg.omega) <= 0 or float(cfg.gbar) < 0:
        raise ConfigError("need lambda_inv >= 0, omega > 0 and gbar >= 0")
    if int(cfg.grid_points) < 2 or int(cfg.n_max) < 0:
        raise ConfigError("grid_points must be >= 2 and n_max >= 0")
    return replace(cfg, kind=kind, variant=variant, fock_dim=fock,
                   lambda_inv=float(cfg.lambda_inv), omega=float(cfg.omega),
                   epsilon=float(cfg.epsilon), gbar=float(cfg.gbar),
                   epsilons=tuple(float(e) for e in cfg.epsilons),
                   x_range=tuple(float(v) for v in cfg.x_range),
                   p_range=tuple(float(v) for v in cfg.p_range),
                   grid_points=int(cfg.grid_points), n_max=int(cfg.n_max), **sweeps)


def _check_command(command, cfg):
    if command == "spectrum" and (cfg.gbar_sweep or cfg.epsilon_sweep):
        raise ConfigError("spectrum sweeps Omega; use --omega-sweep")
    if command in ("excitations", "pvariance", "entropy") and (cfg.omega_sweep or cfg.epsilon_sweep):
        raise ConfigError(f"{command} sweeps gbar; use --gbar-sweep")
    if command == "ground" and cfg.omega_sweep:
        raise ConfigError("ground sweeps gbar or epsilon, not Omega")
    if command in ("wigner", "matelem") and any(getattr(cfg, s) for s in SWEEPS):
        raise ConfigError(f"{command} takes no sweep")
    if command == "matelem" and cfg.lambda_inv >= 0 and Kind.parse(cfg.kind) is Kind.MPT:
        if cfg.lambda_inv > 0 and cfg.n_max + 2 > 1.0 / cfg.lambda_inv:
            raise DomainError("MPT well binds fewer levels than --n-max requires")


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _validate(cfg):
    from .validation import run_all

    results = run_all()
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results]
    _write("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    command = args.command
    try:
        cfg = resolve_config(args)
        if command == "validate":
            return _validate(cfg)
        cfg = with_defaults(command, cfg)
        _check_command(command, cfg)
        data = COMMANDS[command](cfg)
        fmt = format_csv if cfg.format == "csv" else format_json
        _write(fmt(command, cfg, data), cfg.output)
    except DomainError as exc:
        print(f"qno-sim: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, TypeError) as exc:
        print(f"qno-sim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        extra = f" (achieved {exc.achieved:.3e})" if exc.achieved is not None else ""
        print(f"qno-sim: numerical failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"qno-sim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qno-sim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
