"""``kmatrix`` command line.

Every command reads a JSON instance file and writes a JSON report to stdout.
Exit codes: 0 pass, 1 mathematical failure, 2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__, config
from .errors import InputError, KmatrixError, ParseError, _plain
from .instances import load_document, load_env, parse_pattern

EXIT_OK, EXIT_MATH, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _pattern(doc):
    if "pattern" not in doc:
        raise InputError("instance has no 'pattern' section")
    env = load_env(doc)
    return env, parse_pattern(doc["pattern"], env)


def run_check(doc, opts) -> tuple[int, dict]:
    from .matshape import check_conditions

    _, pat = _pattern(doc)
    bad = check_conditions(pat)
    return (EXIT_MATH if bad else EXIT_OK), {"pattern": pat.to_json(), "pass": not bad,
                                             "violations": [v.to_json() for v in bad]}


def run_build(doc, opts) -> tuple[int, dict]:
    from .matshape import build_subring

    _, pat = _pattern(doc)
    S = build_subring(pat)
    out = {"pattern": pat.to_json(), "size": S.size, "dim": S.dim, "orders": [int(o) for o in S.orders],
           "commutative": S.is_commutative}
    if getattr(S, "slots", None):
        out["slots"] = {f"{i},{j}": int(s.num.order() // (s.den.order() if s.den is not None else 1)) for (i, j), s in sorted(S.slots.items())}
    if opts.get("table"):
        out["ring"] = S.to_json()
    return EXIT_OK, out


def run_verify(doc, opts) -> tuple[int, dict]:
    from .kdirect import verify_decomposition

    rule = opts.get("rule") or doc.get("rule")
    if not rule:
        raise InputError("no rule given (use --rule or a 'rule' key)")
    degrees = opts.get("degrees") or doc.get("degrees") or [0, 1]
    mode = opts.get("mode") or doc.get("mode") or config.get("mode")
    reps = verify_decomposition(rule, doc, tuple(degrees), mode)
    ok = all(r.ok for r in reps)
    return (EXIT_OK if ok else EXIT_MATH), {"rule": rule, "pass": ok, "reports": [r.to_json() for r in reps]}


def run_mv(doc, opts) -> tuple[int, dict]:
    from .kdirect import mv_exactness
    from .matshape import milnor_square_thm1

    _, pat = _pattern(doc)
    sq = milnor_square_thm1(pat)
    square = sq.check()
    rep = mv_exactness(sq)
    ok = rep.ok and all(bool(v) for k, v in square.items() if isinstance(v, bool))
    return (EXIT_OK if ok else EXIT_MATH), {"square": _plain(square), "mv": rep.to_json(), "pass": ok}


def run_gv(doc, opts) -> tuple[int, dict]:
    """``gv`` section: ``{ring, ideal}``, ``{ring, chain: [...]}`` or ``{ring, ideals: [...]}``."""
    from .gvtools import chain_end_ring, gv_property_check, is_gv

    spec = doc.get("gv")
    if not isinstance(spec, dict) or "ring" not in spec:
        raise InputError("instance needs a 'gv' section with a 'ring'")
    env = load_env(doc)
    B = env.ring(spec["ring"])
    if "ideal" in spec:
        cert = is_gv(B, env.ideal(spec["ideal"], B))
        ok = cert.gv and cert.routes_agree
        return (EXIT_OK if ok else EXIT_MATH), {"certificate": cert.to_json(), "pass": ok}
    if "chain" in spec:
        rep = chain_end_ring(B, [env.ideal(x, B) for x in spec["chain"]])
        return (EXIT_OK if rep.isomorphic else EXIT_MATH), {"chain": rep.to_json(), "pass": rep.isomorphic}
    if "ideals" in spec:
        res = gv_property_check(B, {x: env.ideal(x, B) for x in spec["ideals"]})
        ok = bool(res["ok"])
        return (EXIT_OK if ok else EXIT_MATH), {"properties": _plain(res), "pass": ok}
    raise InputError("'gv' section needs 'ideal', 'chain' or 'ideals'")


def run_ksym(doc, opts) -> tuple[int, dict]:
    """Symbolic rewriting: ``ksym`` section ``{label, degree, mode, steps, evaluate}``."""
    from . import ksymbolic as ks

    if opts.get("example") is not None:
        rep = ks.reproduce_paper_example(int(opts["example"]))
        return (EXIT_OK if rep["match"] else EXIT_MATH), rep
    spec = doc.get("ksym")
    if not isinstance(spec, dict) or "label" not in spec:
        raise InputError("instance needs a 'ksym' section with a 'label' (or use --example P)")
    facts = ks.load_facts(extra=spec.get("facts", []))
    e = ks.KExpr.of(spec["label"], spec.get("degree", "*"), spec.get("mode", "integral"))
    for st in spec.get("steps", []):
        if "identify" in st:
            e = ks.identify(e, st["identify"], st.get("reason", "given"))
        else:
            e = ks.apply_rule(e, st["rule"], st.get("bind", {}))
    out = {"expression": e.to_json(), "values": {}}
    degrees = spec.get("evaluate", [] if not isinstance(e.degree, int) else [e.degree])
    for d in degrees:
        v = ks.evaluate(e, int(d), facts)
        out["values"][str(d)] = v.to_json()
    return EXIT_OK, out


def run_suite(doc, opts) -> tuple[int, dict]:
    entries = doc.get("instances", [])
    base = Path(opts.get("base_dir") or ".")
    jobs = []
    for i, ent in enumerate(entries):
        iid = ent.get("id", f"#{i}")
        src = ent.get("instance")
        if src is None and "file" in ent:
            src = str(base / ent["file"])
        jobs.append((iid, ent.get("command", "verify"), src, ent.get("args", {}), int(ent.get("expect", 0))))
    ids = [j[0] for j in jobs]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate instance ids in manifest")
    workers = int(opts.get("workers") or config.get("workers") or 0) or None
    results = {}
    if jobs:
        if workers == 1 or len(jobs) == 1:
            outs = map(_suite_job, jobs)
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            outs = pool.map(_suite_job, jobs)
        for iid, res in zip(ids, outs):
            results[iid] = res
        if not (workers == 1 or len(jobs) == 1):
            pool.shutdown()
    failures = sorted(k for k, r in results.items() if not r["pass"])
    summary = {"total": len(results), "passed": len(results) - len(failures), "failed": failures}
    ordered = {k: results[k] for k in sorted(results)}
    return (EXIT_MATH if failures else EXIT_OK), {"summary": summary, "results": ordered}


def _suite_job(job) -> dict:
    iid, command, src, args, expect = job
    code, payload = execute(command, src, args)
    return {"command": command, "exit": code, "expect": expect, "pass": code == expect, "output": payload}


COMMANDS = {
    "check": run_check,
    "build": run_build,
    "verify": run_verify,
    "mv": run_mv,
    "gv": run_gv,
    "ksym": run_ksym,
    "suite": run_suite,
}


def execute(command: str, src, opts: dict | None = None) -> tuple[int, dict]:
    """Run one command on an instance (path, JSON text or dict); never raises kmatrix errors."""
    opts = dict(opts or {})
    try:
        if src is None:
            doc = {}
        elif command == "suite":
            doc = _read_json(src)
            if isinstance(src, (str, Path)) and Path(str(src)).exists():
                opts.setdefault("base_dir", str(Path(str(src)).parent))
        else:
            doc = load_document(src)
        return COMMANDS[command](doc, opts)
    except KmatrixError as e:
        return e.exit_code, e.to_json()
    except (KeyError, TypeError, ValueError) as e:
        # malformed but schema-valid documents end up here
        return EXIT_INPUT, {"error": type(e).__name__, "message": str(e), "exit_code": EXIT_INPUT}
    except MemoryError:
        return EXIT_RESOURCE, {"error": "MemoryError", "message": "out of memory", "exit_code": EXIT_RESOURCE}


def _read_json(src):
    if isinstance(src, dict):
        return src
    text = Path(str(src)).read_text() if Path(str(src)).exists() else str(src)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None


def regression_manifest() -> Path:
    return Path(str(resources.files("kmatrix") / "data" / "regression.json"))


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmatrix", description="Finite matrix-subring K-theory checks.")
    p.add_argument("--version", action="store_true", help="print version (with --verbose: config defaults)")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--config", help="JSON config file (env KMATRIX_CONFIG, KMATRIX_<KEY> override)")
    p.add_argument("--pretty", action="store_true", help="indented output")
    sub = p.add_subparsers(dest="command")
    for name in ("check", "build", "mv", "gv"):
        sp = sub.add_parser(name)
        sp.add_argument("instance")
        if name == "build":
            sp.add_argument("--table", action="store_true", help="include structure constants")
    sp = sub.add_parser("verify")
    sp.add_argument("instance")
    sp.add_argument("--rule")
    sp.add_argument("--degrees", type=lambda s: [int(x) for x in s.split(",") if x])
    sp.add_argument("--mode", help="integral | localized:S | mod-p:P")
    sp = sub.add_parser("ksym")
    sp.add_argument("instance", nargs="?")
    sp.add_argument("--example", type=int, metavar="P", help="the End(Z[x] + (p, x)) example at prime P")
    sp = sub.add_parser("suite")
    sp.add_argument("manifest", nargs="?", help="defaults to the bundled regression manifest")
    sp.add_argument("--workers", type=int)
    for sp in sub.choices.values():
        sp.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        config.load(args.config)
    except (OSError, ValueError) as e:
        print(json.dumps({"error": "ConfigError", "message": str(e), "exit_code": EXIT_INPUT}))
        return EXIT_INPUT
    if args.version:
        out = {"version": __version__}
        if args.verbose:
            out["config"] = config.snapshot()
            out["defaults"] = dict(config.DEFAULTS)
        _emit(out, args.pretty)
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "instance", "manifest", "config")}
    if args.command == "suite":
        src = args.manifest or regression_manifest()
    else:
        src = getattr(args, "instance", None)
    code, payload = execute(args.command, src, opts)
    _emit(payload, args.pretty)
    return code


def _emit(payload, pretty: bool) -> None:
    text = json.dumps(payload, indent=2 if pretty else None, sort_keys=True, ensure_ascii=False, default=_default)
    sys.stdout.write(text + "\n")


def _default(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if hasattr(x, "tolist"):
        return x.tolist()
    return str(x)


if __name__ == "__main__":
    sys.exit(main())
