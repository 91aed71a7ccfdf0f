"""Command line entry point: ``epikit run|list|check``.

Exit codes: 0 clean, 1 some row FAILed, 2 bad configuration, 3 a probe box
truncated a minimiser (ERROR row).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import scenarios as S

EXIT_CONFIG = 2


def _nu_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--nu expects comma-separated integers, got {text!r}") from exc


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise S.ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise S.ConfigError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise S.ConfigError("config file must hold a JSON object")
    return data


def _configs(args) -> list[S.ScenarioConfig]:
    data = _load(args.config) if args.config else {}
    if args.scenario:
        if "id" in data and data["id"] != args.scenario:
            raise S.ConfigError(f"--scenario {args.scenario!r} disagrees with config id {data['id']!r}")
        data["id"] = args.scenario
    if "id" not in data:
        raise S.ConfigError("give --scenario or a config with an 'id'")
    overrides = {"nu_list": args.nu, "rho": args.rho, "grid_step": args.grid_step, "format": args.format}
    data.update({k: v for k, v in overrides.items() if v is not None})
    ids = list(S.REGISTRY) if data["id"] == "all" else [data["id"]]
    return [S.ScenarioConfig.from_dict({**data, "id": sid}) for sid in ids]


def _merge(results: list[S.SweepResult]) -> S.SweepResult:
    if len(results) == 1:
        return results[0]
    out = S.SweepResult("all")
    for res in results:
        out.rows.extend(res.rows)
        out.profiles.update({f"{res.scenario}/{k}": v for k, v in res.profiles.items()})
    return out


def cmd_run(args) -> int:
    cfgs = _configs(args)
    res = _merge([S.run_scenario(cfg) for cfg in cfgs])
    fmt = cfgs[0].format
    if args.out in (None, "-"):
        sys.stdout.write(S.render_csv(res) if fmt == "csv" else S.render_json(res))
    else:
        S.emit_results(res, fmt, args.out)
    return res.exit_status


def cmd_list(args) -> int:
    width = max(len(sid) for sid, _ in S.anchors())
    for sid, anchor in S.anchors():
        print(f"{sid:<{width}}  {anchor}")
    return 0


def cmd_check(args) -> int:
    args.scenario = None
    args.nu = args.rho = args.grid_step = args.format = None
    for cfg in _configs(args):
        print(f"ok {cfg.id}: nu={list(cfg.nu_list)} rho={cfg.rho} grid_step={cfg.grid_step} "
              f"checks={','.join(cfg.checks)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epikit", description="Epi-distance bounds for Rockafellian sweeps.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario sweep and write its rows")
    run.add_argument("--scenario", help="registered scenario id, or 'all'")
    run.add_argument("--config", help="JSON file with ScenarioConfig fields")
    run.add_argument("--nu", type=_nu_list, help="comma-separated nu values, e.g. 1,2,4")
    run.add_argument("--rho", type=float)
    run.add_argument("--grid-step", type=float)
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--out", help="output path; '-' or omitted writes to stdout")
    run.set_defaults(func=cmd_run)

    lst = sub.add_parser("list", help="show registered scenarios")
    lst.set_defaults(func=cmd_list)

    chk = sub.add_parser("check", help="validate a config file without running it")
    chk.add_argument("--config", required=True)
    chk.set_defaults(func=cmd_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except S.ConfigError as exc:
        print(f"epikit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
