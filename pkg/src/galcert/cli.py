"""Command-line surface: compute, ingest, analyze, certify, scan, oracle.

Runs the pipeline in process by default; --server posts the same payload
to a running service instead. Machine-readable JSON goes to --output (or
stdout when no path is given); the human summary goes to stdout only when
the JSON went to a file. Errors leave as JSON on stderr with exit code 2;
exit code 1 means the run finished but some verdict was inconclusive.
"""

import argparse
import json
import sys

import httpx

from . import __version__

_ENDPOINTS = {
    "coeffs": "/v1/coeffs",
    "ingest": "/v1/ingest",
    "analyze": "/v1/analyze",
    "exceptional-set": "/v1/exceptional-set",
    "certify": "/v1/certify",
    "scan": "/v1/scan",
    "oracle": "/v1/oracle",
}


def _parse_prime_list(text):
    out = tuple(int(x) for x in text.split(",") if x.strip())
    if not out:
        raise argparse.ArgumentTypeError("empty prime list")
    return out


def _add_form_args(sub, needs_form=True):
    if needs_form:
        g = sub.add_mutually_exclusive_group(required=True)
        g.add_argument("--builtin", choices=("level27", "level160"))
        g.add_argument("--file", help="path to a coefficient JSON document")
    sub.add_argument("-B", "--precision", type=int, default=None,
                     help="coefficient count for computed builtins")
    sub.add_argument("--no-validate", action="store_true",
                     help="skip recurrence validation of the record")
    sub.add_argument("--search-bound", type=int, default=None,
                     help="prime bound for the field analysis sample")


def _add_choice_args(sub):
    sub.add_argument("--q-primes", type=_parse_prime_list, default=None,
                     help="comma-separated primes congruent to 1 mod the level")
    sub.add_argument("--p-primes", type=_parse_prime_list, default=None,
                     help="comma-separated character-covering primes")
    sub.add_argument("--index-prime", type=int, default=None,
                     help="prime whose invariant generates the field")


def _add_common(sub):
    sub.add_argument("-o", "--output", default=None, help="write JSON here")
    sub.add_argument("--server", default=None,
                     help="base URL of a running service; runs in process when absent")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="galcert",
        description="large-image certificates for newform Galois representations",
    )
    parser.add_argument("--version", action="version", version="galcert %s" % __version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("coeffs", help="compute a builtin coefficient document")
    s.add_argument("--builtin", default="level27", choices=("level27", "level160"))
    s.add_argument("-B", "--precision", type=int, default=None)
    s.add_argument("--no-validate", action="store_true")
    _add_common(s)

    s = subs.add_parser("ingest", help="fetch coefficients over HTTP")
    s.add_argument("--label", required=True)
    s.add_argument("-B", "--precision", type=int, default=None)
    s.add_argument("--base-url", default=None)
    s.add_argument("--offline", action="store_true",
                   help="fail instead of touching the network")
    _add_common(s)

    s = subs.add_parser("analyze", help="certify the invariant field K and L/K")
    _add_form_args(s)
    _add_common(s)

    s = subs.add_parser("exceptional-set", help="assemble the exceptional prime set")
    _add_form_args(s)
    _add_choice_args(s)
    _add_common(s)

    s = subs.add_parser("certify", help="certificate for all primes above ell")
    _add_form_args(s)
    _add_choice_args(s)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--witness-bound", type=int, default=None,
                   help="search bound for witness primes")
    _add_common(s)

    s = subs.add_parser("scan", help="certificates for every prime in a range")
    _add_form_args(s)
    _add_choice_args(s)
    s.add_argument("--min", type=int, required=True)
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--witness-bound", type=int, default=None)
    _add_common(s)

    s = subs.add_parser("oracle", help="exhaustive small-group self-tests")
    s.add_argument("--selftest", action="store_true",
                   help="run the full suites (default action)")
    s.add_argument("--qs", type=_parse_prime_list, default=None,
                   help="field sizes for the order/trace table")
    _add_common(s)

    s = subs.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)

    return parser


def _payload(args):
    command = args.command
    params = {}
    if command == "coeffs":
        params["builtin"] = args.builtin
        params["precision"] = args.precision
        params["validate"] = not args.no_validate
        return params
    if command == "ingest":
        return {
            "label": args.label,
            "precision": args.precision,
            "base_url": args.base_url,
            "offline": args.offline,
        }
    if command == "oracle":
        return {"qs": list(args.qs) if args.qs else None}

    if getattr(args, "file", None):
        with open(args.file, "r", encoding="utf-8") as fh:
            params["document"] = json.load(fh)
    else:
        params["builtin"] = args.builtin
    params["precision"] = args.precision
    params["validate"] = not args.no_validate
    params["search_bound"] = args.search_bound

    if command in ("exceptional-set", "certify", "scan"):
        if (args.q_primes is None) != (args.p_primes is None) or (
            (args.q_primes is None) != (args.index_prime is None)
        ):
            raise ValueError("give all of --q-primes, --p-primes, --index-prime or none")
        if args.q_primes is not None:
            params["choices"] = {
                "q_primes": list(args.q_primes),
                "p_primes": list(args.p_primes),
                "index_prime": args.index_prime,
            }
    if command == "certify":
        params["ell"] = args.ell
        params["witness_bound"] = args.witness_bound
    if command == "scan":
        params["min"] = args.min
        params["max"] = args.max
        params["witness_bound"] = args.witness_bound
    return params


def _run_remote(server, command, params, transport=None):
    client = httpx.Client(base_url=server.rstrip("/"), timeout=600.0, transport=transport)
    try:
        resp = client.post(_ENDPOINTS[command], json=params)
    except httpx.HTTPError as exc:
        raise RuntimeError("request to %s failed: %s" % (server, exc))
    finally:
        client.close()
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise RuntimeError("server returned %d: %s" % (resp.status_code, detail))
    return resp.json()


def _summary(command, result):
    if command == "coeffs":
        return "computed %d coefficients: level %s, weight %s" % (
            len(result["coefficients"]), result["level"], result["weight"])
    if command == "ingest":
        return "ingested %d coefficients: level %s, weight %s (%s)" % (
            len(result["coefficients"]), result["level"], result["weight"],
            result.get("source", ""))
    if command == "analyze":
        return "[K:Q]=%s (exact: %s), M=%s, generators=%s, L=K: %s" % (
            result["k_degree"], result["k_degree_exact"], result["M"],
            result["generating_primes"], result["L_equals_K"])
    if command == "exceptional-set":
        return "S: whole primes %s, plus %d individual prime(s) of K" % (
            result["ell_level"], len(result["lambda_level"]))
    if command == "certify":
        lines = ["ell=%s: %s" % (result["ell"], result["verdict"])]
        for entry in result["lambdas"]:
            routes = entry["routes"]
            how = []
            if routes["membership"]["certifies_dichotomy"]:
                how.append("outside S")
            if routes["direct"]["certifies_dichotomy"]:
                how.append("conditions verified")
            lines.append("  lambda %s: %s (%s)" % (
                entry["lambda"]["local_factor"], entry["verdict"],
                "; ".join(how) if how else "no route"))
        return "\n".join(lines)
    if command == "scan":
        lines = [
            "ell=%s: %s" % (ell, result["verdicts"][ell])
            for ell in sorted(result["verdicts"], key=int)
        ]
        lines.append(
            "all large image: %s (range %s..%s)"
            % (result["all_large_image"], result["range"][0], result["range"][1])
        )
        return "\n".join(lines)
    if command == "oracle":
        qs = [str(t["q"]) for t in result["lemma_table"]]
        return "oracle suites passed: order/trace tables for q in {%s}, Cartan facts, PSL2=PGL2 in even characteristic" % ", ".join(qs)
    return json.dumps(result)


def _exit_code(command, result):
    if command == "certify":
        return 0 if result["verdict"].startswith(("PSL2", "PGL2")) else 1
    if command == "scan":
        return 0 if result["all_large_image"] else 1
    if command == "oracle":
        return 0 if result.get("ok") else 1
    return 0


def _emit(args, command, result):
    blob = json.dumps(result, indent=1, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(blob)
        print(_summary(command, result))
        print("wrote %s" % args.output)
    else:
        sys.stdout.write(blob)
    return _exit_code(command, result)


def main(argv=None, transport=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command

    if command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        params = _payload(args)
        if args.server:
            result = _run_remote(args.server, command, params, transport=transport)
        else:
            from .service import HANDLERS

            result = HANDLERS[command](params)
    except (ValueError, RuntimeError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "command": command}) + "\n")
        return 2
    return _emit(args, command, result)


if __name__ == "__main__":
    sys.exit(main())
