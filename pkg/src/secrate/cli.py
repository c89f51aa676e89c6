"""Command-line entry points.

Subcommands:
  rate      evaluate the rate breakdown at an explicit operating point
  optimize  maximize the secrecy rate over coding parameters
  verify    cross-check the closed forms against the log-det oracle
  scenario  run a named or custom sweep and write CSV (+ JSON sidecar)
  dmc       evaluate the discrete-alphabet rates for a joint pmf file

Exit codes: 0 success, 1 bad input or failed verification, 2 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .dmc_eval import achievable_rates, pmf_from_dict
from .errors import DomainError, SecrateError
from .gaussian_oracle import verify_random_draws
from .optimizer import OptConfig, optimize
from .rate_core import ChannelGains, CodingParams, SystemParams, rates
from .scenarios import SCENARIO_NAMES, emit_csv, load_spec, preset, run_scenario

GAIN_KEYS = ("h_sr", "h_sd", "h_rd", "h_se", "h_re")


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad flags; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _parse_gain(value) -> complex | float:
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, list) and len(value) == 2:
        re, im = float(value[0]), float(value[1])
        return complex(re, im) if im != 0.0 else re
    raise DomainError(f"gain entries must be a number or [re, im], got {value!r}")


def _load_gains(path: str) -> ChannelGains:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError(f"gains file {path!r} must hold a JSON object")
    missing = set(GAIN_KEYS) - set(data)
    if missing:
        raise DomainError(f"gains file {path!r} is missing {sorted(missing)}")
    extra = set(data) - set(GAIN_KEYS)
    if extra:
        raise DomainError(f"gains file {path!r} has unknown keys {sorted(extra)}")
    return ChannelGains(**{k: _parse_gain(data[k]) for k in GAIN_KEYS})


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(obj) -> None:
    json.dump(_jsonable(obj), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_rate(args) -> int:
    gains = _load_gains(args.gains)
    sys_params = SystemParams(p1=args.p1, p2=args.p2, q=args.q)
    coding = CodingParams(c=complex(args.c), alpha1=args.a1, alpha2=args.a2, p=args.p)
    _emit(rates(gains, sys_params, coding))
    return 0


def _cmd_optimize(args) -> int:
    gains = _load_gains(args.gains)
    sys_params = SystemParams(p1=args.p1, p2=args.p2, q=args.q)
    cfg = OptConfig(grid_steps=args.grid, multistarts=args.starts, complex_c=args.complex_c)
    result = optimize(gains, sys_params, cfg)
    _emit(result)
    return 0 if result.best is not None else 1


def _cmd_verify(args) -> int:
    report = verify_random_draws(draws=args.draws, seed=args.seed, tol=args.tol)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict}: max deviation {report.max_deviation:.3e} over {report.draws} draws "
          f"(tol {report.tol:g})")
    if not report.passed:
        print(f"worst draw: {json.dumps(_jsonable(report.worst_draw))}", file=sys.stderr)
    return 0 if report.passed else 1


def _cmd_scenario(args) -> int:
    if args.config:
        spec = load_spec(args.config, base_name=args.name)
    elif args.name and args.name != "custom":
        spec = preset(args.name)
    else:
        raise DomainError("need --name <preset> or --config <file> (or both to override)")
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    if args.p1 is not None:
        spec = dataclasses.replace(spec, p1=args.p1)
    result = run_scenario(spec)
    emit_csv(result, args.out)
    print(f"wrote {args.out} and {args.out}.json ({len(result.rows)} rows)")
    return 0


def _cmd_dmc(args) -> int:
    with open(args.pmf, encoding="utf-8") as fh:
        data = json.load(fh)
    pmf = pmf_from_dict(data)
    r_tilde, r_hat, r_s = achievable_rates(pmf)
    _emit({"r_tilde": r_tilde, "r_hat": r_hat, "r_s": r_s})
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="secrate",
                     description="Secrecy rates for the state-aware Gaussian relay "
                                 "wiretap channel.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_system(p):
        p.add_argument("--gains", required=True, metavar="FILE",
                       help="JSON file with h_sr, h_sd, h_rd, h_se, h_re "
                            "(number or [re, im] each)")
        p.add_argument("--p1", type=float, required=True, help="source power budget")
        p.add_argument("--p2", type=float, required=True, help="relay power")
        p.add_argument("--q", type=float, required=True, help="state variance")

    p_rate = sub.add_parser("rate", help="evaluate one operating point")
    add_system(p_rate)
    p_rate.add_argument("--c", type=complex, required=True,
                        help="relay-tracking coefficient (accepts 'a+bj')")
    p_rate.add_argument("--a1", type=float, required=True, help="state coefficient in U1")
    p_rate.add_argument("--a2", type=float, required=True, help="state coefficient in U2")
    p_rate.add_argument("--p", type=float, required=True, help="fresh-message power")
    p_rate.set_defaults(func=_cmd_rate)

    p_opt = sub.add_parser("optimize", help="maximize the secrecy rate")
    add_system(p_opt)
    p_opt.add_argument("--grid", type=int, default=13, help="grid points per axis")
    p_opt.add_argument("--starts", type=int, default=8, help="local-search starts")
    p_opt.add_argument("--complex-c", action="store_true", dest="complex_c",
                       help="search complex relay coefficients")
    p_opt.set_defaults(func=_cmd_optimize)

    p_ver = sub.add_parser("verify", help="closed forms vs covariance oracle")
    p_ver.add_argument("--draws", type=int, default=1000)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--tol", type=float, default=1e-9)
    p_ver.set_defaults(func=_cmd_verify)

    p_sc = sub.add_parser("scenario", help="run a sweep and write CSV")
    p_sc.add_argument("--name", choices=SCENARIO_NAMES, help="preset sweep")
    p_sc.add_argument("--config", metavar="FILE", help="TOML spec or preset overrides")
    p_sc.add_argument("--out", required=True, metavar="FILE", help="CSV output path")
    p_sc.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p_sc.add_argument("--p1", type=float, default=None, help="override the source power")
    p_sc.set_defaults(func=_cmd_scenario)

    p_dmc = sub.add_parser("dmc", help="discrete-alphabet rates from a pmf file")
    p_dmc.add_argument("--pmf", required=True, metavar="FILE",
                       help="JSON joint pmf (state, input_law, channel)")
    p_dmc.set_defaults(func=_cmd_dmc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SecrateError, OSError, ValueError, KeyError) as exc:
        print(f"secrate: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - contract: internal errors exit 2
        print(f"secrate: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
