"""starkit command line: `starkit verify <name> [flags]` and `starkit run <config>`."""

from __future__ import annotations

import argparse
import json
import sys

from .verify.runner import DEFAULT_SUITE, REGISTRY, ConfigError, run_config, run_verification


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.replace(" ", "").split(",") if x]


def _place(s: str) -> str | int:
    return s if s in ("inf", "infinity") else int(s)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starkit", description="Verify Stark-type identities on small instances.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one verifier and print its JSON report")
    vs = v.add_subparsers(dest="name", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--negative-control", action="store_true", help="apply the deliberate sign flip")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    b = vs.add_parser("brumer_stark", parents=[common])
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--T", type=_int_list, required=True)
    b.add_argument("--S", type=_int_list, default=None)

    f = vs.add_parser("fitt0_cyclic", parents=[common])
    f.add_argument("--d", type=int, required=True)
    f.add_argument("--T", type=_int_list, required=True)
    f.add_argument("--v", type=_place, default="inf")
    f.add_argument("--S", type=_int_list, default=None)

    dm = vs.add_parser("darmon", parents=[common])
    dm.add_argument("--f", type=int, required=True)
    dm.add_argument("--n", type=int, required=True)
    dm.add_argument("--modulus", type=int, default=None)
    dm.add_argument("--aux-primes", type=int, default=4)

    g = vs.add_parser("gross_tori", parents=[common])
    g.add_argument("--d-L", type=int, required=True)
    g.add_argument("--d-Lt", type=int, required=True)
    g.add_argument("--T", type=_int_list, required=True)
    g.add_argument("--S", type=_int_list, default=None)
    g.add_argument("--literal", action="store_true", help="compare without the T-sign")

    r = vs.add_parser("rse_cyclotomic", parents=[common])
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--T", type=_int_list, required=True)
    r.add_argument("--precision", type=int, default=9)

    run = sub.add_parser("run", help="run a JSON config of verifications")
    run.add_argument("config", nargs="?", default=str(DEFAULT_SUITE),
                     help="config path (default: the shipped suite)")
    run.add_argument("--timing", action="store_true")
    run.add_argument("--summary", action="store_true", help="print one line per report instead of JSON")

    sub.add_parser("list", help="list verifier names")
    return p


def _verify_params(ns: argparse.Namespace) -> dict:
    skip = {"command", "name", "timing", "literal"}
    params = {k: v for k, v in vars(ns).items() if k not in skip}
    if ns.name == "gross_tori":
        params["signed"] = not ns.literal
    return {k: v for k, v in params.items() if v is not None}


def main(argv: list[str] | None = None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        if ns.command == "list":
            print("\n".join(sorted(REGISTRY)))
            return 0
        if ns.command == "verify":
            rep = run_verification(ns.name, **_verify_params(ns))
            print(rep.to_json(ns.timing))
            return 0 if rep.passed else 1
        result = run_config(ns.config)
        if ns.summary:
            for rep in result.reports:
                print(rep.summary_line())
            print(json.dumps(result.summary(), sort_keys=True))
        else:
            print(result.to_json(ns.timing))
        return result.exit_code
    except ConfigError as exc:
        print(f"starkit: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"starkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
