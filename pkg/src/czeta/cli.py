"""Command line entry point: compute, verify, discover, certify, predict.

Exit status: 0 all checks passed, 1 a check failed, 2 usage error,
3 computational error.  ``--json`` prints one canonical JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys

from .carlitz import CarlitzCtx
from .errors import CarlitzError
from .motives import build_block, carlitz_motive, verify_sigma_equation
from .poly import parse_theta_poly
from .predict import PredictionGrid, prediction_table
from . import relations as rel

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="characteristic")
    common.add_argument("--r", type=int, default=1, help="field degree, q = p^r")
    common.add_argument("--d", type=int, help="number of Carlitz modules (predict, certify)")
    common.add_argument("--n", type=int, nargs="+", help="weight(s)")
    common.add_argument("--s", type=int, help="range bound for predictions")
    common.add_argument("--m", type=int, nargs="+", help="Frobenius exponent or monomial exponents")
    common.add_argument("--prec", type=int, default=200, help="u-adic precision P")
    common.add_argument("--tdeg", type=int, default=20, help="t-degree T")
    common.add_argument("--deg-bound", type=int, default=8, help="relation degree bound D / certificate bound B")
    common.add_argument("--alpha", nargs="+", help="polynomials in theta, e.g. 1 theta 'theta^2+1'")
    common.add_argument("--json", action="store_true", help="emit canonical JSON")
    common.add_argument("--replay", metavar="PATH", help="re-check a stored certificate")

    parser = argparse.ArgumentParser(prog="czeta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    choices = {
        "compute": ["zeta", "pi", "omega", "plog", "bernoulli", "gamma"],
        "verify": ["euler", "frobenius", "omega-eq", "psi-eq", "special-at-theta", "at-special-case"],
        "discover": ["relations", "anderson-thakur"],
        "certify": ["no-monomial"],
        "predict": ["trdeg"],
    }
    for name, what in choices.items():
        p = sub.add_parser(name, parents=[common])
        p.add_argument("what", choices=what)
    return parser


def _config(args) -> dict:
    keys = ["command", "what", "p", "r", "d", "n", "s", "m", "prec", "tdeg", "deg_bound", "alpha", "replay"]
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required here")
    return value


class UsageError(Exception):
    pass


def _alphas(C: CarlitzCtx, args, default=("1",)):
    texts = args.alpha or list(default)
    return [parse_theta_poly(C.ctx, t) for t in texts]


def _reports(reports) -> tuple:
    payload = [r.to_json() for r in reports]
    return {"reports": payload, "pass": all(r.passed for r in reports)}, all(r.passed for r in reports)


def run(args) -> tuple:
    """Return (payload, ok)."""
    cmd, what = args.command, args.what
    if cmd == "predict":
        grid = PredictionGrid(args.p, _need(args.d, "--d"), _need(args.s, "--s"))
        table = prediction_table(grid)
        return table, table["agree"]
    if cmd == "certify":
        if args.replay:
            try:
                with open(args.replay) as fh:
                    obj = json.load(fh)
            except OSError as exc:
                raise UsageError(f"cannot read {args.replay}: {exc}") from exc
            # accept a bare certificate or a full ``certify --json`` document
            if "result" in obj:
                obj = obj["result"]
            obj = obj.get("certificate", obj)
            try:
                ok = rel.replay_certificate(obj)
            except (KeyError, TypeError, ValueError) as exc:
                raise CarlitzError(f"malformed certificate: {exc!r}") from exc
            return {"replay": args.replay, "certificate": obj, "valid": ok}, ok
        cert = rel.monomial_certificate(_need(args.m, "--m"), args.deg_bound)
        ok = cert.check()
        return {"certificate": cert.to_json(), "valid": ok}, ok

    C = CarlitzCtx(args.p, args.r, args.prec, args.tdeg)
    ns = args.n or []
    if cmd == "compute":
        if what == "zeta":
            return {"values": {str(n): C.zeta(n).to_json() for n in _need(args.n, "--n")},
                    "certified_prec": C.P}, True
        if what == "pi":
            return {"value": C.pi_tilde().to_json(), "certified_prec": C.P}, True
        if what == "omega":
            om = C.omega()
            return {"value": om.to_json(), "certified_prec": C.P, "tail": om.tail}, True
        if what == "plog":
            out = {}
            for n in _need(args.n, "--n"):
                for a in _alphas(C, args):
                    out[f"{n}:{a}"] = C.plog(n, a).to_json()
            return {"values": out, "certified_prec": C.P}, True
        if what == "bernoulli":
            return {"values": {str(n): C.bernoulli_carlitz(n).to_json() for n in _need(args.n, "--n")}}, True
        if what == "gamma":
            return {"values": {str(n): C.d_l_gamma("Gamma", n).to_json() for n in _need(args.n, "--n")}}, True

    if cmd == "verify":
        if what == "euler":
            return _reports([rel.euler_carlitz_check(C, n) for n in _need(args.n, "--n")])
        if what == "frobenius":
            ms = _need(args.m, "--m")
            return _reports([rel.frobenius_check(C, n, m) for n in _need(args.n, "--n") for m in ms])
        if what == "omega-eq":
            return _reports([verify_sigma_equation(carlitz_motive(C), C.T, C.P, "omega-functional-equation")])
        if what == "psi-eq":
            alphas = _alphas(C, args, ("1", "theta"))
            return _reports([verify_sigma_equation(build_block(C, n, alphas), C.T, C.P)
                             for n in (ns or [1])])
        if what == "special-at-theta":
            reports = [rel.omega_at_theta_check(C)]
            for n in ns or [1]:
                for a in _alphas(C, args, ("1", "theta")):
                    reports.append(rel.l_alpha_at_theta_check(C, n, a))
            return _reports(reports)
        if what == "at-special-case":
            return _reports([rel.special_case_check(C, n) for n in (ns or range(1, C.q))])

    if cmd == "discover":
        if what == "relations":
            # zeta(n) for each --n, plus pi~^k for each --m (k must make pi~^k grading-free)
            W = C.with_precision(P=2 * C.P + args.deg_bound + 8)
            values, labels = [], []
            for n in ns:
                values.append(W.zeta(n))
                labels.append(f"zeta({n})")
            for k in args.m or []:
                values.append(W.pi_tilde_power(k))
                labels.append(f"pi^{k}")
            if not values:
                raise UsageError("give --n and/or --m")
            report = rel.find_linear_relations(values, args.deg_bound, C.P, labels)
            return report.to_json(), True
        if what == "anderson-thakur":
            reports = [rel.anderson_thakur_solve(C, n, args.deg_bound, C.P) for n in _need(args.n, "--n")]
            payload = {"reports": [r.to_json() for r in reports]}
            return payload, all(r.extra.get("found") for r in reports)
    raise UsageError(f"unsupported command {cmd} {what}")


def _text(payload, indent=0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        lines = []
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(payload, list):
        lines = []
        for i, x in enumerate(payload):
            if isinstance(x, (dict, list)):
                lines.append(f"{pad}[{i}]")
                lines.append(_text(x, indent + 1))
            else:
                lines.append(f"{pad}- {x}")
        return "\n".join(lines)
    return f"{pad}{payload}"


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        payload, ok = run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"czeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CarlitzError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"czeta: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    doc = {"config": _config(args), "result": payload, "pass": bool(ok)}
    if args.json:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        print(_text(doc))
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
