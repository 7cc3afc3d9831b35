"""Command-line interface.

A thin client over the same handlers the HTTP service exposes: subcommands
parse flags into the request models, execute in-process by default, or ship
the request to a running server when ``--server URL`` is given. Exit code 0
on success, 2 on usage errors, 1 on numerical or I/O failures (with a
diagnostic line on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from pydantic import ValidationError

from . import version_string
from .errors import ConvergenceError, ExperimentError, QuadratureError, SingularFisherError
from .service import schemas
from .service.client import ServiceClient
from .service.handlers import (
    compute_bounds,
    compute_loss,
    compute_sweep,
    run_selftest_checks,
    run_simulation,
)
from .sweep import (
    DEFAULT_SNR_DB,
    SweepTable,
    format_table,
    parse_snr_list,
    write_table,
)

_RUNTIME_ERRORS = (
    SingularFisherError,
    QuadratureError,
    ConvergenceError,
    ExperimentError,
    ValueError,
    OSError,
    RuntimeError,
)

_CONFIG_FLOAT_KEYS = {"zeta", "sigma2", "snr_db", "alpha"}
_CONFIG_INT_KEYS = {"n", "trials", "seed", "workers", "pilot_seed", "quad_order"}
_CONFIG_STR_KEYS = {"mode", "receiver", "pilot_layout"}


def _normalize_mode(mode: str) -> str:
    return "deterministic" if mode in ("det", "deterministic") else mode


def _dump(model) -> str:
    return json.dumps(model.model_dump(), indent=2) + "\n"


def _make_client(url: str) -> ServiceClient:
    return ServiceClient(base_url=url)


def _print_bounds(resp: schemas.BoundsResponse) -> None:
    print(f"zeta: {resp.zeta:g}  alpha: {resp.alpha:g}  n: {resp.n}")
    print(f"fisher_ideal: {resp.fisher_ideal:.10g}")
    print(f"crlb_ideal: {resp.crlb_ideal:.10g}")
    fo = resp.fisher_onebit
    print(f"fisher_onebit: f_zz={fo.f_zz:.10g}  f_za={fo.f_za:.10g}  f_aa={fo.f_aa:.10g}")
    print(f"crlb_onebit_unknown: {resp.crlb_onebit_unknown:.10g}")
    print(f"crlb_onebit_known: {resp.crlb_onebit_known:.10g}")


def _print_loss(resp: schemas.LossResponse) -> None:
    scale = f"zeta: {resp.zeta:g}" if resp.zeta is not None else f"sigma2: {resp.sigma2:g}"
    print(f"mode: {resp.mode}  alpha: {resp.alpha:g}  {scale}")
    print(f"chi: {resp.chi:.10g}  ({resp.chi_db:.4f} dB)")
    print(f"chi_star: {resp.chi_star:.10g}  ({resp.chi_star_db:.4f} dB)")


def _print_simulate(resp: schemas.SimulateResponse) -> None:
    cfg, res = resp.config, resp.result
    scale = f"zeta={cfg.zeta:g}" if cfg.zeta is not None else f"sigma2={cfg.sigma2:g}"
    print(
        f"{cfg.mode} / {cfg.receiver}: {scale} alpha={cfg.alpha:g} "
        f"n={cfg.n} trials={cfg.trials} seed={cfg.master_seed}"
    )
    print(f"mse_zeta: {res.mse_zeta:.6e}  (crlb_ref {res.crlb_ref:.6e})")
    if res.mse_alpha is not None:
        print(f"mse_alpha: {res.mse_alpha:.6e}")
    print(f"efficiency: {res.efficiency:.4f}  ci95_halfwidth: {res.ci95_halfwidth:.3e}")
    print(
        f"clamp_rate: {res.clamp_rate:.4f}  trials_run: {res.trials_run}  "
        f"failures: {res.failures}"
    )


def _read_config_file(path: str, parser: argparse.ArgumentParser) -> dict:
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        parser.error(f"cannot read config file {path}: {err}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        try:
            if key in _CONFIG_FLOAT_KEYS:
                values[key] = float(val)
            elif key in _CONFIG_INT_KEYS:
                values[key] = int(val)
            elif key in _CONFIG_STR_KEYS:
                values[key] = val
            else:
                parser.error(f"{path}:{lineno}: unknown config key {key!r}")
        except ValueError:
            parser.error(f"{path}:{lineno}: bad value for {key!r}: {val!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onebit-chanest",
        description=(
            "Bounds, losses and Monte Carlo experiments for 1-bit channel "
            "estimation with an unknown quantizer offset."
        ),
    )
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="CRLBs and Fisher matrix at one point")
    p_bounds.add_argument("--zeta", type=float, required=True)
    p_bounds.add_argument("--alpha", type=float, required=True)
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--json", action="store_true")
    p_bounds.add_argument("--server", metavar="URL")

    p_loss = sub.add_parser("loss", help="quantization losses at one configuration")
    p_loss.add_argument("--mode", required=True, choices=["det", "deterministic", "hybrid"])
    p_loss.add_argument("--alpha", type=float, required=True)
    p_loss.add_argument("--snr-db", type=float)
    p_loss.add_argument("--zeta", type=float)
    p_loss.add_argument("--sigma2", type=float)
    p_loss.add_argument("--quad-order", type=int, default=80)
    p_loss.add_argument("--json", action="store_true")
    p_loss.add_argument("--server", metavar="URL")

    p_sweep = sub.add_parser("sweep", help="loss tables over an offset/SNR grid")
    p_sweep.add_argument("--mode", required=True, choices=["det", "deterministic", "hybrid"])
    p_sweep.add_argument("--kind", choices=["chi", "chi_star"], default="chi")
    p_sweep.add_argument("--alpha-min", type=float, default=0.0)
    p_sweep.add_argument("--alpha-max", type=float, default=1.0)
    p_sweep.add_argument("--alpha-step", type=float, default=0.05)
    p_sweep.add_argument(
        "--snr-db",
        default=",".join(str(s) for s in DEFAULT_SNR_DB),
        help="comma-separated SNR list in dB",
    )
    p_sweep.add_argument("--format", choices=["paper_txt", "csv", "json"], default="paper_txt")
    p_sweep.add_argument("--out", metavar="PATH")
    p_sweep.add_argument("--quad-order", type=int, default=80)
    p_sweep.add_argument("--server", metavar="URL")

    p_sim = sub.add_parser("simulate", help="Monte Carlo experiment against the bounds")
    p_sim.add_argument("--config", metavar="FILE", help="key = value defaults for the flags")
    p_sim.add_argument("--mode", choices=["det", "deterministic", "hybrid"])
    p_sim.add_argument("--receiver", choices=["ideal", "onebit_unknown", "onebit_known"])
    p_sim.add_argument("--zeta", type=float)
    p_sim.add_argument("--sigma2", type=float)
    p_sim.add_argument("--snr-db", type=float)
    p_sim.add_argument("--alpha", type=float)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--workers", type=int)
    p_sim.add_argument("--pilot-layout", choices=["alternating", "block", "shuffled"])
    p_sim.add_argument("--pilot-seed", type=int)
    p_sim.add_argument("--quad-order", type=int)
    p_sim.add_argument("--json", action="store_true")
    p_sim.add_argument("--server", metavar="URL")

    p_self = sub.add_parser("selftest", help="run the oracle-equivalence suite")
    p_self.add_argument("--server", metavar="URL")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_bounds(args) -> int:
    req = schemas.BoundsRequest(zeta=args.zeta, alpha=args.alpha, n=args.n)
    resp = _make_client(args.server).bounds(req) if args.server else compute_bounds(req)
    if args.json:
        sys.stdout.write(_dump(resp))
    else:
        _print_bounds(resp)
    return 0


def _cmd_loss(args, parser) -> int:
    mode = _normalize_mode(args.mode)
    if mode == "deterministic":
        if (args.snr_db is None) == (args.zeta is None) or args.sigma2 is not None:
            parser.error("deterministic loss takes exactly one of --snr-db or --zeta")
    else:
        if (args.snr_db is None) == (args.sigma2 is None) or args.zeta is not None:
            parser.error("hybrid loss takes exactly one of --snr-db or --sigma2")
    req = schemas.LossRequest(
        mode=mode, alpha=args.alpha, snr_db=args.snr_db,
        zeta=args.zeta, sigma2=args.sigma2, quad_order=args.quad_order,
    )
    resp = _make_client(args.server).loss(req) if args.server else compute_loss(req)
    if args.json:
        sys.stdout.write(_dump(resp))
    else:
        _print_loss(resp)
    return 0


def _cmd_sweep(args, parser) -> int:
    try:
        snr = parse_snr_list(args.snr_db)
    except ValueError as err:
        parser.error(str(err))
    req = schemas.SweepRequest(
        mode=_normalize_mode(args.mode),
        kind=args.kind,
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max,
        alpha_step=args.alpha_step,
        snr_db=snr,
        quad_order=args.quad_order,
    )
    resp = _make_client(args.server).sweep(req) if args.server else compute_sweep(req)
    table = SweepTable(
        kind=tuple(resp.kind),
        alpha_grid=np.array(resp.alpha_grid),
        snr_db=np.array(resp.snr_db),
        values_db=np.array(resp.values_db),
    )
    if args.out:
        write_table(table, args.out, args.format)
        print(f"wrote {table.kind[1]} {table.kind[0]} table to {args.out} ({args.format})")
    else:
        sys.stdout.write(format_table(table, args.format))
    return 0


def _cmd_simulate(args, parser) -> int:
    defaults = {
        "alpha": 0.0, "trials": 1000, "seed": 0, "workers": 1,
        "pilot_layout": "alternating", "pilot_seed": 0, "quad_order": 80,
    }
    cfg = dict(defaults)
    if args.config:
        cfg.update(_read_config_file(args.config, parser))
    for key in (
        "mode", "receiver", "zeta", "sigma2", "snr_db", "alpha", "n",
        "trials", "seed", "workers", "pilot_layout", "pilot_seed", "quad_order",
    ):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    for key in ("mode", "receiver", "n"):
        if cfg.get(key) is None:
            parser.error(f"simulate requires --{key.replace('_', '-')} (flag or config file)")
    cfg["mode"] = _normalize_mode(cfg["mode"])
    scale_given = [k for k in ("zeta", "sigma2", "snr_db") if cfg.get(k) is not None]
    if cfg["mode"] == "deterministic" and sorted(scale_given) not in (["zeta"], ["snr_db"]):
        parser.error("deterministic simulate takes exactly one of --zeta or --snr-db")
    if cfg["mode"] == "hybrid" and sorted(scale_given) not in (["sigma2"], ["snr_db"]):
        parser.error("hybrid simulate takes exactly one of --sigma2 or --snr-db")
    req = schemas.SimulateRequest(
        mode=cfg["mode"], receiver=cfg["receiver"], alpha=cfg["alpha"], n=cfg["n"],
        trials=cfg["trials"], seed=cfg["seed"], snr_db=cfg.get("snr_db"),
        zeta=cfg.get("zeta"), sigma2=cfg.get("sigma2"),
        pilot_layout=cfg["pilot_layout"], pilot_seed=cfg["pilot_seed"],
        quad_order=cfg["quad_order"], workers=cfg["workers"],
    )
    resp = _make_client(args.server).simulate(req) if args.server else run_simulation(req)
    if args.json:
        sys.stdout.write(_dump(resp))
    else:
        _print_simulate(resp)
    return 0


def _cmd_selftest(args) -> int:
    resp = _make_client(args.server).selftest() if args.server else run_selftest_checks()
    for check in resp.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}: {check.name} - {check.detail}")
    return 0 if resp.passed else 1


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("onebit_chanest.service.app:app", host=args.host, port=args.port)
    return 0


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join '--snr-db -25,-2.5' into '--snr-db=-25,-2.5'.

    argparse only recognizes bare negative numbers as values, not negative
    comma lists, so merge them ourselves before parsing.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--snr-db" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    try:
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "loss":
            return _cmd_loss(args, parser)
        if args.command == "sweep":
            return _cmd_sweep(args, parser)
        if args.command == "simulate":
            return _cmd_simulate(args, parser)
        if args.command == "selftest":
            return _cmd_selftest(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except ValidationError as err:
        first = err.errors()[0]
        parser.error(f"invalid request: {first.get('msg', err)}")
    except _RUNTIME_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
