"""Command line entry point: ``rapsk constellation|rate-design|simulate``.

Any long option may also come from an INI file given with ``--config``;
keys are option names (dashes or underscores) in ``[DEFAULT]`` or in a
section named after the subcommand. Options on the command line win.

Exit status: 0 on success, 2 for bad options or configuration, 3 when the
computation itself fails.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

from .channel import AngularModel, ChannelParams
from .constellation import RapskParams, build_qam, build_rapsk, papr
from .ratedesign import RateRule, design_rates, quantize_rates
from .simulation import SimConfig, build_scheme, emit_results, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(Exception):
    pass


def _kappa(text: str) -> float:
    value = float(text)  # accepts "inf"
    if not value > 0:
        raise argparse.ArgumentTypeError("kappa must be positive or inf")
    return value


def _rates(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _add_rapsk(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=8, help="number of rings")
    p.add_argument("--k", type=int, default=32, help="points per ring")
    p.add_argument("--r0", type=float, default=0.6, help="inner ring radius")


def _add_channel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kappa-phi", type=_kappa, default=math.inf, help="phase-noise concentration, or inf")
    p.add_argument("--angular-model", choices=[m.value for m in AngularModel], default="smooth")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rapsk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constellation", help="geometry and PAPR report")
    p.add_argument("--config", type=Path)
    _add_rapsk(p)
    p.add_argument("--json", type=Path, help="write the geometry as JSON here")

    p = sub.add_parser("rate-design", help="per-level error probabilities and code rates")
    p.add_argument("--config", type=Path)
    _add_rapsk(p)
    p.add_argument("--snr-db", type=float, default=27.0)
    _add_channel(p)
    p.add_argument("--rule", choices=[r.value for r in RateRule], default="one-minus-p")
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--json", type=Path, help="write the report here instead of stdout")

    p = sub.add_parser("simulate", help="Monte Carlo SER or BER sweep")
    p.add_argument("--config", type=Path)
    p.add_argument("--mode", choices=["uncoded", "coded"], default="uncoded")
    p.add_argument("--family", choices=["rapsk", "qam"], default="rapsk")
    _add_rapsk(p)
    p.add_argument("--m", type=int, default=256, help="QAM size")
    p.add_argument("--snr-start", type=float, default=20.0)
    p.add_argument("--snr-stop", type=float, default=30.0)
    p.add_argument("--snr-step", type=float, default=1.0)
    _add_channel(p)
    p.add_argument("--trials", type=int, default=1_000_000, help="symbols (uncoded) or blocks (coded) per point")
    p.add_argument("--target-errors", type=int, default=200)
    p.add_argument("--t", type=int, default=4096, help="block length in symbols")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--design-snr", type=float, default=None, help="SNR for rate design (default: first point)")
    p.add_argument("--rule", choices=[r.value for r in RateRule], default="one-minus-p")
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--rates", type=_rates, default=None,
                   help="comma-separated rates per MSD step, radial levels first")
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--record-timing", action="store_true", help="fill wall_seconds (breaks byte-identity)")
    p.add_argument("--out", type=Path, help="output file (stdout if omitted)")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Load ``--config`` values as subparser defaults so explicit flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None or known.command is None:
        return
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices.get(known.command)
    if subparser is None:
        return
    cp = configparser.ConfigParser()
    try:
        with open(known.config) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {known.config}: {exc}") from exc
    values = dict(cp.defaults())
    if cp.has_section(known.command):
        values.update(cp.items(known.command))
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise ConfigError(f"unknown config key {key!r} for {known.command}")
        if isinstance(action, argparse._StoreTrueAction):
            try:
                defaults[dest] = cp.BOOLEAN_STATES[raw.strip().lower()]
            except KeyError:
                raise ConfigError(f"{key}: expected a boolean, got {raw!r}") from None
            continue
        try:
            value = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{key}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"{key}: {raw!r} is not one of {sorted(action.choices)}")
        defaults[dest] = value
    subparser.set_defaults(**defaults)


def _cmd_constellation(args) -> int:
    c = build_rapsk(RapskParams(args.n, args.k, args.r0))
    value = papr(c)
    print(f"N={c.n} K={c.k} M={c.size} bits={c.m} (ring {c.n_bits}, angle {c.k_bits})")
    print(f"r0={c.r0!r} D={c.d!r}")
    print("radii=" + " ".join(f"{r:.12g}" for r in c.radii))
    print(f"power={c.power!r}")
    print(f"papr={value!r} ({10 * math.log10(value):.4f} dB)")
    if args.json is not None:
        c.dump_json(args.json)
    return EXIT_OK


def _cmd_rate_design(args) -> int:
    c = build_rapsk(RapskParams(args.n, args.k, args.r0))
    p = ChannelParams.from_snr_db(args.snr_db, args.kappa_phi, args.angular_model)
    design = quantize_rates(design_rates(c, p, args.rule), args.margin)
    report = {
        "n": c.n, "k": c.k, "r0": c.r0, "snr_db": args.snr_db,
        "kappa_phi": "inf" if math.isinf(args.kappa_phi) else args.kappa_phi,
        "angular_model": args.angular_model,
        **design.to_dict(),
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.json is not None:
        args.json.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sim_config(args) -> SimConfig:
    return SimConfig(
        mode=args.mode, family=args.family, n=args.n, k=args.k, r0=args.r0, qam_size=args.m,
        snr_start=args.snr_start, snr_stop=args.snr_stop, snr_step=args.snr_step,
        kappa_phi=args.kappa_phi, trials=args.trials, target_errors=args.target_errors,
        t=args.t, seed=args.seed, angular_model=args.angular_model, rate_rule=args.rule,
        design_snr_db=args.design_snr, margin=args.margin, rates=args.rates,
        max_iters=args.max_iters, batch_size=args.batch_size, workers=args.workers,
        record_timing=args.record_timing,
    )


def _validate_sim(cfg: SimConfig) -> None:
    # geometry, channel and code construction are config errors, not runtime ones
    if cfg.family == "rapsk":
        build_rapsk(RapskParams(cfg.n, cfg.k, cfg.r0))
    else:
        build_qam(cfg.qam_size)
    if cfg.mode == "coded":
        build_scheme(cfg)


def _cmd_simulate(args) -> int:
    try:
        cfg = _sim_config(args)
        _validate_sim(cfg)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc
    rows = run(cfg)
    text = emit_results(rows, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "constellation": _cmd_constellation,
    "rate-design": _cmd_rate_design,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_CONFIG
        if args.command != "simulate":
            try:
                RapskParams(args.n, args.k, args.r0)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"rapsk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure past validation is a runtime failure
        print(f"rapsk: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
