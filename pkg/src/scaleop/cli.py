"""Command-line front end.

The CLI never computes anything itself: it builds a request, posts it to
the certification service (an in-process instance by default, or a remote
one via --server), and renders the response.  Exit codes: 0 success,
1 a certification check failed, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from fractions import Fraction
from typing import Optional

import httpx

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

CSV_COLUMNS = ("d", "q", "p_inv", "s_inv", "family", "lower", "upper",
               "in_general", "in_radial", "flags")


class UsageError(Exception):
    pass


class ServiceClient:
    """POSTs to a remote server when a base URL is given, otherwise drives
    the FastAPI app in-process over an ASGI transport."""

    def __init__(self, server: Optional[str] = None):
        self.server = server

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as client:
                resp = client.post(path, json=payload)
        else:
            resp = asyncio.run(self._post_local(path, payload))
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise UsageError(f"{path} rejected: {detail}")
        return resp.json()

    async def _post_local(self, path: str, payload: dict) -> httpx.Response:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://scaleop.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)


def _parse_qs(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"bad q list {text!r}: {exc}") from exc


def _parse_exponent(text: str) -> str:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return "inf"
    try:
        Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad exponent {text!r}") from exc
    return t


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_scan_csv(payload: dict) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in payload["rows"]:
        lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaleop",
        description="Certification checks, scans, and norms for the "
        "scaling-average operator over odd finite fields.",
    )
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run certification suites")
    p_verify.add_argument("--suite", action="append", help="suite name (repeatable; default all)")
    p_verify.add_argument("--q", "--qs", dest="qs", help="comma-separated q values")
    p_verify.add_argument("--d", type=int, action="append", dest="ds", help="dimension (repeatable)")
    p_verify.add_argument("--n", type=int, help="restrict the oscillation suite to one exponent")
    p_verify.add_argument("--alpha", type=int, help="field extension degree (single q only)")
    p_verify.add_argument("--modulus", help="custom irreducible modulus, low-to-high coefficients")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--threads", type=int, default=1)
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.add_argument("--format", choices=("json",), default="json")

    p_scan = sub.add_parser("scan", help="family lower bounds over an exponent grid")
    p_scan.add_argument("--d", type=int, default=2)
    p_scan.add_argument("--qs", default="3,5,7,9,11,13")
    p_scan.add_argument("--alpha", type=int, help="field extension degree (single q only)")
    p_scan.add_argument("--modulus", help="custom irreducible modulus, low-to-high coefficients")
    p_scan.add_argument("--grid", type=int, default=9)
    p_scan.add_argument("--families", default="delta,subspace,sphere0,sphere1,exponential,radial")
    p_scan.add_argument("--trials", type=int, default=0, help="random-family sample count")
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument("--threads", type=int, default=1)
    p_scan.add_argument("--fit", action="store_true", help="append growth fits (needs >= 4 q)")
    p_scan.add_argument("--out")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")

    p_norm = sub.add_parser("norm", help="input/output norms for a function file")
    p_norm.add_argument("file", help="grid-function or radial-function JSON file")
    p_norm.add_argument("--p", default="1")
    p_norm.add_argument("--s", default="2")
    p_norm.add_argument("--out")

    p_region = sub.add_parser("region", help="emit boundedness-region geometry")
    p_region.add_argument("--kind", choices=("general", "radial"), default="general")
    p_region.add_argument("--d", type=int)
    p_region.add_argument("--out")

    p_dist = sub.add_parser("distance", help="distance-set threshold experiments")
    p_dist.add_argument("--q", type=int, default=11)
    p_dist.add_argument("--d", type=int, default=2)
    p_dist.add_argument("--size", type=int, required=True)
    p_dist.add_argument("--trials", type=int, default=20)
    p_dist.add_argument("--alpha", type=int, help="field extension degree")
    p_dist.add_argument("--modulus", help="custom irreducible modulus, low-to-high coefficients")
    p_dist.add_argument("--seed", type=int, default=0)
    p_dist.add_argument("--out")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _parse_modulus(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"bad modulus {text!r}: {exc}") from exc


def cmd_verify(client: ServiceClient, args) -> int:
    payload = {
        "suites": args.suite,
        "qs": _parse_qs(args.qs) if args.qs else None,
        "ds": args.ds,
        "seed": args.seed,
        "osc_n": args.n,
        "threads": args.threads,
        "alpha": args.alpha,
        "modulus": _parse_modulus(args.modulus),
    }
    resp = client.post("/verify", payload)
    for check in resp["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        where = " ".join(
            f"{k}={check[k]}" for k in ("q", "d") if check.get(k) is not None
        )
        print(
            f"[{status}] criterion {check['criterion']:>2} {check['name']:<28} {where:<12} "
            f"measured={check['measured']} expected={check['expected']} tol={check['tolerance']}"
        )
    n_fail = sum(not c["passed"] for c in resp["checks"])
    print(f"{len(resp['checks']) - n_fail}/{len(resp['checks'])} checks passed (seed={resp['seed']})")
    if args.out:
        _emit(json.dumps(resp, indent=2) + "\n", args.out)
    return EXIT_OK if resp["passed"] else EXIT_CHECK_FAILED


def cmd_scan(client: ServiceClient, args) -> int:
    payload = {
        "d": args.d,
        "qs": _parse_qs(args.qs),
        "grid": args.grid,
        "families": [f for f in args.families.split(",") if f],
        "trials": args.trials,
        "seed": args.seed,
        "threads": args.threads,
        "fit": args.fit,
        "alpha": args.alpha,
        "modulus": _parse_modulus(args.modulus),
    }
    resp = client.post("/scan", payload)
    if args.format == "csv":
        _emit(_render_scan_csv(resp), args.out)
        if args.fit and resp.get("fits") is not None:
            fits_doc = json.dumps({"seed": resp["seed"], "fits": resp["fits"]}, indent=2) + "\n"
            if args.out:
                with open(args.out + ".fits.json", "w") as fh:
                    fh.write(fits_doc)
            else:
                sys.stderr.write(fits_doc)
    else:
        _emit(json.dumps(resp, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_norm(client: ServiceClient, args) -> int:
    try:
        with open(args.file) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read function file: {exc}") from exc
    key = "radial" if "radial" in data else "function"
    payload = {
        "p": _parse_exponent(args.p),
        "s": _parse_exponent(args.s),
        key: data,
    }
    resp = client.post("/norm", payload)
    text = (
        f"input_norm (p={resp['p']}): {_fmt(resp['input_norm'])}\n"
        f"output_norm (s={resp['s']}): {_fmt(resp['output_norm'])}\n"
        f"ratio: {_fmt(resp['ratio'])}\n"
        f"radial_fast_path: {_fmt(resp['radial_fast_path'])}\n"
    )
    _emit(text, args.out)
    return EXIT_OK


def cmd_region(client: ServiceClient, args) -> int:
    resp = client.post("/region", {"kind": args.kind, "d": args.d})
    _emit(json.dumps(resp, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_distance(client: ServiceClient, args) -> int:
    payload = {
        "q": args.q,
        "d": args.d,
        "size": args.size,
        "trials": args.trials,
        "seed": args.seed,
        "alpha": args.alpha,
        "modulus": _parse_modulus(args.modulus),
    }
    resp = client.post("/distance", payload)
    _emit(json.dumps(resp, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code) if exc.code else EXIT_OK
    if args.command == "serve":
        return cmd_serve(args)
    client = ServiceClient(args.server)
    handlers = {
        "verify": cmd_verify,
        "scan": cmd_scan,
        "norm": cmd_norm,
        "region": cmd_region,
        "distance": cmd_distance,
    }
    try:
        return handlers[args.command](client, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
