"""Command-line front end.

Every command emits a JSON envelope on stdout containing the result and a
run manifest (command line, version, seed, budgets, sigma_3, timestamps,
input and result digests).  Exit codes: 0 success/verified, 2 usage error,
3 counterexample or violation found, 4 budget exhausted, 5 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__, acceptance, bounds, hom, oracle, sidorenko
from .config import AffineConfiguration, parse_config_spec, product
from .errors import BudgetError, DomainError, InvariantViolation
from .extremal import ExtremalQuery, ex_aff, extract_subconfig
from .manifest import RunManifest
from .ramsey import RamseyQuery, bose_burton, mq_search, ramsey_search
from .space import (
    PointSet,
    direction_set,
    is_projectively_determined,
    omega_affine,
    omega_arrow,
    omega_linear,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


def _load_pointset(path: str, manifest: RunManifest) -> PointSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    manifest.add_input(path, raw)
    return PointSet.from_json(json.loads(raw))


def _load_config(spec: str, manifest: RunManifest) -> AffineConfiguration:
    if not (spec.startswith("cube:") or spec.startswith("circuit:")):
        path = spec[1:] if spec.startswith("@") else spec
        try:
            with open(path, "rb") as fh:
                manifest.add_input(path, fh.read())
        except OSError:
            pass
    return parse_config_spec(spec)


def _parse_c(text: str):
    frac = Fraction(text)
    return frac if frac.denominator == 1 or "." not in text else float(text)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="afflab",
        description="Exact computation and search for affine configurations over F_q")
    top.add_argument("--version", action="version", version="afflab " + __version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="JSON output (always on; flag kept for scripts)")
    common.add_argument("--csv", action="store_true", help="CSV output where supported")
    common.add_argument("--oracle", action="store_true",
                        help="re-verify the result with the slow reference oracle")
    common.add_argument("--threads", type=int, default=1,
                        help="worker budget recorded in the manifest (kernels are"
                             " single-threaded and deterministic)")
    common.add_argument("--budget", type=int, default=None,
                        help="work budget (membership tests or search nodes)")
    common.add_argument("--seed", type=int, default=0, help="64-bit run seed")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom-count", parents=[common],
                       help="count affine homomorphisms B -> A")
    p.add_argument("--config", required=True, help="cube:q:t | circuit:k | file.json")
    p.add_argument("--set", required=True, dest="host", help="PointSet JSON file")
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int, default=100_000)

    p = sub.add_parser("copies", parents=[common],
                       help="count subsets of A affinely isomorphic to B")
    p.add_argument("--config", required=True)
    p.add_argument("--set", required=True, dest="host")

    p = sub.add_parser("rank", parents=[common], help="ranks and basis of a configuration")
    p.add_argument("--config", required=True)

    p = sub.add_parser("direction-set", parents=[common], help="direction set of A")
    p.add_argument("--set", required=True, dest="host")

    p = sub.add_parser("omega", parents=[common],
                       help="omega, omega_aff, omega_arrow of A")
    p.add_argument("--set", required=True, dest="host")

    p = sub.add_parser("product", parents=[common], help="product configuration")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = sub.add_parser("sidorenko", parents=[common],
                       help="weakly-Sidorenko checks")
    p.add_argument("action", choices=["verify", "adversary", "supersat", "product"])
    p.add_argument("--config", help="configuration B")
    p.add_argument("--config2", help="second factor for the product check")
    p.add_argument("--C", default=None, help="exponent (number; defaults to sigma_q)")
    p.add_argument("--C2", default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--D", default="2", help="density scale for supersat")
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("exaff", parents=[common], help="affine extremal number")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", action="append", required=True,
                   help="repeatable configuration spec")
    p.add_argument("--mode", default="exact",
                   help="exact | lower_only | decision:k")
    p.add_argument("--no-symmetry", action="store_true")

    p = sub.add_parser("ramsey", parents=[common], help="vector-space Ramsey number")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--targets", required=True, help="comma list, e.g. 2,3")
    p.add_argument("--nmax", type=int, default=5)

    p = sub.add_parser("bose-burton", parents=[common], help="t-space-free maximum")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("mq", parents=[common], help="m_q(t) search")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)

    p = sub.add_parser("bound", parents=[common], help="closed-form bound evaluators")
    p.add_argument("action", choices=["eval", "table"])
    p.add_argument("--id", required=True, dest="bound_id")
    p.add_argument("--q", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--C", dest="C")
    p.add_argument("--delta")
    p.add_argument("--ts", help="comma list of targets for diag_tower")
    p.add_argument("--height-convention", choices=["base-count", "levels"],
                   default="base-count")
    p.add_argument("--range", dest="range_spec",
                   help="table mode: var=lo..hi, e.g. t=2..12")

    p = sub.add_parser("extract", parents=[common],
                       help="pigeonhole extraction of a sub-host")
    p.add_argument("--config", required=True)
    p.add_argument("--set", required=True, dest="host")

    sub.add_parser("verify-paper", parents=[common],
                   help="run the full acceptance suite")
    return top


def _bound_params(args) -> dict:
    params = {}
    for name in ("q", "t", "s", "k", "n", "r", "p"):
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    if args.C is not None:
        params["C"] = Fraction(args.C)
    if args.delta is not None:
        params["delta"] = Fraction(args.delta)
    if args.ts is not None:
        params["ts"] = [int(x) for x in args.ts.split(",")]
    params["height_convention"] = args.height_convention
    return params


def _run(args, manifest: RunManifest) -> tuple[dict, int]:
    budget = args.budget
    cmd = args.command

    if cmd == "hom-count":
        b = _load_config(args.config, manifest)
        a = _load_pointset(args.host, manifest)
        rep = hom.hom_count(b, a, mode="exact" if args.mode == "exact" else "monte_carlo",
                            samples=args.samples, seed=args.seed,
                            budget=budget or hom.DEFAULT_BUDGET)
        result = rep.to_json()
        if args.oracle:
            slow = oracle.oracle_hom_count(b, a)
            result["oracle"] = {"value": slow.value, "elapsed": slow.elapsed}
            if args.mode == "exact" and slow.value != rep.total:
                raise InvariantViolation("oracle disagrees: %d vs %d"
                                         % (slow.value, rep.total))
        return result, EXIT_OK

    if cmd == "copies":
        b = _load_config(args.config, manifest)
        a = _load_pointset(args.host, manifest)
        return {"copies": hom.copy_count(b, a, budget=budget or hom.DEFAULT_BUDGET)}, EXIT_OK

    if cmd == "rank":
        b = _load_config(args.config, manifest)
        return {"rank_aff": b.rank_aff, "rank_lin": b.rank_lin,
                "basis": list(b.affine_basis()), "points": len(b.points)}, EXIT_OK

    if cmd == "direction-set":
        a = _load_pointset(args.host, manifest)
        d = direction_set(a)
        return {"direction_set": d.to_json(), "size": d.size,
                "projectively_determined_input": is_projectively_determined(a)}, EXIT_OK

    if cmd == "omega":
        a = _load_pointset(args.host, manifest)
        return {"omega": omega_linear(a), "omega_aff": omega_affine(a),
                "omega_arrow": omega_arrow(a)}, EXIT_OK

    if cmd == "product":
        left = _load_config(args.left, manifest)
        right = _load_config(args.right, manifest)
        return {"product": product(left, right).to_json()}, EXIT_OK

    if cmd == "sidorenko":
        return _run_sidorenko(args, manifest)

    if cmd == "exaff":
        family = tuple(_load_config(s, manifest) for s in args.family)
        mode, k = args.mode, None
        if mode.startswith("decision:"):
            mode, k = "decision", int(args.mode.split(":", 1)[1])
        query = ExtremalQuery(q=args.q, n=args.n, family=family, mode=mode, k=k,
                              budget=budget or 1 << 32, seed=args.seed)
        rep = ex_aff(query, symmetry=not args.no_symmetry)
        result = rep.to_json()
        if args.oracle and rep.witness is not None:
            free = all(oracle.oracle_free(b, rep.witness) for b in family)
            result["oracle"] = {"witness_free": free}
            if not free:
                raise InvariantViolation("oracle rejected the witness")
        code = EXIT_OK if rep.status == "complete" else EXIT_BUDGET
        return result, code

    if cmd == "ramsey":
        targets = tuple(int(x) for x in args.targets.split(","))
        rep = ramsey_search(RamseyQuery(q=args.q, targets=targets,
                                        n_max=args.nmax,
                                        budget=budget or 1 << 28, seed=args.seed))
        result = rep.to_json()
        if args.oracle and "lower_bound_witness" in rep.detail:
            wit = rep.detail["lower_bound_witness"]
            omegas = [oracle.oracle_omega(c, "linear") for c in wit.classes]
            result["oracle"] = {"witness_class_omegas": omegas,
                                "all_below_targets": all(
                                    o < t for o, t in zip(omegas, targets))}
        code = EXIT_OK if rep.status in ("complete", "greater-than-nmax") else EXIT_BUDGET
        return result, code

    if cmd == "bose-burton":
        bb = bose_burton(args.q, args.n, args.t)
        return bb.to_json(), EXIT_OK if bb.formula_ok else EXIT_COUNTEREXAMPLE

    if cmd == "mq":
        rep = mq_search(args.q, args.t, args.nmax, budget=budget or 1 << 24,
                        seed=args.seed)
        result = rep.to_json()
        if args.oracle and rep.witness is not None:
            slow = oracle.oracle_direction_set(rep.witness)
            result["oracle"] = {"direction_set_size": slow.size,
                                "omega": omega_linear(slow)}
        code = EXIT_OK if rep.status in ("complete", "greater-than-nmax") else EXIT_BUDGET
        return result, code

    if cmd == "bound":
        if args.action == "eval":
            val = bounds.eval_bound(args.bound_id, _bound_params(args))
            return {"id": args.bound_id, "value": val.to_json(),
                    "float": float(val)}, EXIT_OK
        var, lo, hi = _parse_range(args.range_spec)
        rows = []
        for x in range(lo, hi + 1):
            params = _bound_params(args)
            params[var] = x
            val = bounds.eval_bound(args.bound_id, params)
            rows.append({var: x, "value": float(val),
                         "exact": val.value if val.kind == "exact" else None})
        if args.csv:
            lines = ["%s,value" % var] + ["%d,%s" % (r[var], r["value"]) for r in rows]
            return {"csv": "\n".join(lines), "rows": rows}, EXIT_OK
        return {"rows": rows}, EXIT_OK

    if cmd == "extract":
        b = _load_config(args.config, manifest)
        a = _load_pointset(args.host, manifest)
        res = extract_subconfig(b, a)
        return res.to_json(), EXIT_OK

    if cmd == "verify-paper":
        results = []
        all_ok = True
        for r in acceptance.run_all(progress=lambda res: print(res.line(),
                                                               file=sys.stderr)):
            results.append(r.to_json())
            all_ok = all_ok and r.passed and r.within_time
        return ({"criteria": results, "all_passed": all_ok},
                EXIT_OK if all_ok else EXIT_COUNTEREXAMPLE)

    raise DomainError("unknown command %r" % cmd)


def _run_sidorenko(args, manifest: RunManifest) -> tuple[dict, int]:
    b = _load_config(args.config, manifest)
    c = _parse_c(args.C) if args.C is not None else sidorenko.SidorenkoParams.for_field(b.q).C
    if args.action == "verify":
        v = sidorenko.verify_exhaustive(b, c, args.n)
        code = {"verified": EXIT_OK, "counterexample": EXIT_COUNTEREXAMPLE,
                "inconclusive": EXIT_BUDGET}[v.status]
        return v.to_json(), code
    if args.action == "adversary":
        v = sidorenko.adversary_search(b, args.n, budget=args.budget or 1 << 22,
                                       seed=args.seed)
        return v.to_json(), EXIT_OK
    if args.action == "supersat":
        rep = sidorenko.supersaturation_check(b, c, args.n, Fraction(args.D),
                                              samples=args.samples, seed=args.seed)
        code = {"ok": EXIT_OK, "conditional": EXIT_BUDGET,
                "violated": EXIT_COUNTEREXAMPLE}[rep.status]
        return rep.to_json(), code
    b2 = _load_config(args.config2, manifest)
    c2 = _parse_c(args.C2) if args.C2 is not None else sidorenko.SidorenkoParams.for_field(b2.q).C
    rep = sidorenko.product_sidorenko_check(b, c, b2, c2, args.n,
                                            samples=args.samples, seed=args.seed)
    code = {"ok": EXIT_OK, "conditional": EXIT_BUDGET,
            "violated": EXIT_COUNTEREXAMPLE}[rep.status]
    return rep.to_json(), code


def _parse_range(spec: str | None) -> tuple[str, int, int]:
    if not spec or "=" not in spec or ".." not in spec:
        raise DomainError("table mode needs --range var=lo..hi")
    var, rng = spec.split("=", 1)
    lo, hi = rng.split("..", 1)
    return var.strip(), int(lo), int(hi)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(command=["afflab"] + list(argv), seed=args.seed,
                           budget=args.budget, threads=args.threads)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        result, code = _run(args, manifest)
    except BudgetError as exc:
        print("budget exhausted: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print("internal invariant failure: %s" % exc, file=sys.stderr)
        return EXIT_INTERNAL
    except (DomainError, ValueError, KeyError, OSError) as exc:
        # malformed inputs (bad JSON, bad hex, missing fields) are usage errors
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    envelope = manifest.finalize(result)
    print(json.dumps(envelope, indent=2, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
