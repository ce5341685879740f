"""Command-line front end.

Every subcommand is a thin client of the HTTP service: by default the
app is mounted in process, and --server points the same calls at a
remote instance. Exit codes: 0 success, 1 input error, 2 internal fault.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import sys
import traceback
from typing import Dict, List, Optional, Sequence, Tuple

import httpx

from .config import _FLOAT_KEYS, _INT_KEYS, parse_config_file
from .metrics import PARAM_NAMES
from .model import ConfigError, RailcalError
from .optim import ALGORITHMS


class _RequestFailed(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _request(server: Optional[str], method: str, path: str, payload=None) -> Dict:
    async def call():
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=None) as client:
                return await client.request(method, path, json=payload)
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://railcal.internal", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)

    try:
        response = asyncio.run(call())
    except httpx.HTTPError as exc:
        raise _RequestFailed(2, f"cannot reach service: {exc}") from exc
    if response.status_code >= 500:
        raise _RequestFailed(2, f"service fault ({response.status_code}): {response.text}")
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise _RequestFailed(1, f"rejected ({response.status_code}): {detail}")
    return response.json()


# ------------------------------------------------------- config plumbing

_SETTINGS_KEYS = _INT_KEYS | _FLOAT_KEYS


def _read_config(path: Optional[str], allowed: set) -> Dict[str, str]:
    if not path:
        return {}
    cfg = parse_config_file(path)
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    return cfg


def _pick(flag_value, cfg: Dict[str, str], key: str, default, cast):
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cast(cfg[key])
    return default


def _parse_algorithms(text: str) -> List[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if names == ["all"]:
        return list(ALGORITHMS)
    return names


# ------------------------------------------------------------- printing

def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _print_table(header: List[str], rows: List[List[str]]) -> None:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())


def _print_summary(body: Dict) -> None:
    rows = [
        [
            s["algorithm"],
            str(s["replications"]) + ("*" if s["deterministic"] else ""),
            _fmt(s["mean_final_Z"]),
            _fmt(s["std_final_Z"]),
            _fmt(s["best_final_Z"]),
        ]
        for s in body["summary"]
    ]
    _print_table(["algorithm", "reps", "mean_final_Z", "std_final_Z", "best_final_Z"], rows)
    if any(s["deterministic"] for s in body["summary"]):
        print("* deterministic search, run once")
    print()
    est_header = ["parameter", "true"] + [s["algorithm"] for s in body["summary"]]
    est_rows = []
    for i, name in enumerate(PARAM_NAMES):
        est_rows.append(
            [name, _fmt(body["theta_true"][i])]
            + [_fmt(s["best_theta"][i]) for s in body["summary"]]
        )
    est_rows.append(["Z", _fmt(0.0)] + [_fmt(s["best_final_Z"]) for s in body["summary"]])
    _print_table(est_header, est_rows)
    if body.get("out_dir"):
        print(f"\nreport written to {body['out_dir']}")


# ------------------------------------------------------------- handlers

def _cmd_scenarios(args) -> int:
    body = _request(args.server, "GET", "/scenarios")
    rows = [
        [s["name"], " ".join(_fmt(c) for c in s["choice_coefs"]),
         " ".join(_fmt(c) for c in s["capacity_coefs"]), s["summary"]]
        for s in body
    ]
    _print_table(["scenario", "choice_coefs", "capacity_coefs", "summary"], rows)
    return 0


def _cmd_fixture(args) -> int:
    payload = {"out_dir": args.out, "demand_seed": args.seed}
    body = _request(args.server, "POST", "/fixture", payload)
    for key in ("directory", "stations", "trains", "passengers", "od_pairs",
                "od_pairs_with_route_choice", "demand_seed"):
        print(f"{key}: {body[key]}")
    return 0


def _cmd_generate(args) -> int:
    cfg = _read_config(args.config, {"scenario", "seed", "demand_seed"} | _SETTINGS_KEYS)
    settings = {k: cfg[k] for k in _SETTINGS_KEYS if k in cfg}
    payload = {
        "out_dir": args.out,
        "input_dir": args.input,
        "scenario": _pick(args.scenario, cfg, "scenario", "reference", str),
        "seed": _pick(args.seed, cfg, "seed", 0, int),
        "demand_seed": _pick(None, cfg, "demand_seed", 7, int),
        "settings": settings or None,
    }
    body = _request(args.server, "POST", "/generate", payload)
    manifest = body["manifest"]
    counts = manifest["counts"]
    print(f"dataset written to {args.out}")
    print(f"scenario: {manifest['scenario']}  seed: {manifest['seed']}")
    print(f"passengers: {counts['demand']}  served: {counts['served']}  unserved: {counts['unserved']}")
    return 0


def _plan_payload(args, cfg: Dict[str, str]) -> Dict:
    return {
        "dataset_dir": args.dataset,
        "budget": _pick(args.budget, cfg, "budget", 100, int),
        "replications": _pick(args.replications, cfg, "replications", 5, int),
        "seed": _pick(args.seed, cfg, "seed", 0, int),
        "workers": _pick(args.workers, cfg, "workers", 1, int),
        "out_dir": args.out,
        "sim_seed": _pick(None, cfg, "sim_seed", None, int),
    }


_PLAN_KEYS = {"algorithms", "budget", "replications", "seed", "workers", "sim_seed"}


def _cmd_calibrate(args) -> int:
    cfg = _read_config(args.config, _PLAN_KEYS)
    algorithms = _parse_algorithms(_pick(args.algorithms, cfg, "algorithms", "cors", str))
    if len(algorithms) != 1:
        raise ConfigError("calibrate runs one algorithm; use compare for several")
    payload = _plan_payload(args, cfg)
    payload["algorithm"] = algorithms[0]
    body = _request(args.server, "POST", "/calibrate", payload)
    _print_summary(body)
    return 0


def _cmd_compare(args) -> int:
    cfg = _read_config(args.config, _PLAN_KEYS)
    algorithms = _parse_algorithms(_pick(args.algorithms, cfg, "algorithms", "all", str))
    payload = _plan_payload(args, cfg)
    payload["algorithms"] = algorithms
    body = _request(args.server, "POST", "/compare", payload)
    _print_summary(body)
    return 0


def _cmd_report(args) -> int:
    payload = {"experiment_dir": args.experiment, "verify_digests": not args.no_verify}
    body = _request(args.server, "POST", "/report", payload)
    _print_summary(body)
    if body.get("digests_ok") is True:
        print("\noutput digests verified")
    elif body.get("digests_ok") is False:
        print("\nwarning: output files do not match the manifest digests", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_dump(args) -> int:
    body = _request(args.server, "GET", "/health")
    print(json.dumps(body, indent=2, sort_keys=True))
    return 0


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="railcal",
        description="Schedule-based transit loading and black-box calibration toolkit.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="URL of a running service; default runs the service in process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenarios", help="list the built-in ground-truth scenarios")
    p.set_defaults(handler=_cmd_scenarios)

    p = sub.add_parser("fixture", help="write the bundled example case to a directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=7, help="demand draw seed")
    p.set_defaults(handler=_cmd_fixture)

    p = sub.add_parser("generate", help="simulate a scenario into a calibration dataset")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--input", default=None,
                   help="input case directory; omitted: build the bundled fixture in place")
    p.add_argument("--scenario", default=None, help="ground-truth scenario name")
    p.add_argument("--seed", type=int, default=None, help="generation seed")
    p.add_argument("--config", default=None, help="settings file (key = value)")
    p.set_defaults(handler=_cmd_generate)

    for name, help_text, handler in (
        ("calibrate", "run one search algorithm against a dataset", _cmd_calibrate),
        ("compare", "run several algorithms and compare their curves", _cmd_compare),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("dataset", help="generated dataset directory")
        p.add_argument("--algorithms", default=None,
                       help="comma-separated algorithm names" + (" (or 'all')" if name == "compare" else ""))
        p.add_argument("--budget", type=int, default=None, help="objective evaluations per run")
        p.add_argument("--replications", type=int, default=None, help="replications per algorithm")
        p.add_argument("--seed", type=int, default=None, help="base seed; replication r uses seed+r")
        p.add_argument("--workers", type=int, default=None, help="parallel runs")
        p.add_argument("--out", default=None, help="directory for traces and report files")
        p.add_argument("--config", default=None, help="settings file (key = value)")
        p.set_defaults(handler=handler)

    p = sub.add_parser("report", help="summarize a stored experiment directory")
    p.add_argument("experiment", help="experiment directory (holds experiment.json)")
    p.add_argument("--no-verify", action="store_true", help="skip output digest checks")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    p = sub.add_parser("health", help="ping the service")
    p.set_defaults(handler=_cmd_dump)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _RequestFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except RailcalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
