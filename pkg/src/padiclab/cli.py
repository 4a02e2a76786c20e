"""Command-line entry point for reproducible verification runs and demos.

Output is deterministic JSON by default (sorted keys, no timestamps) so two
runs with the same inputs and seed are byte-identical; ``--pretty`` switches
to a human-readable rendering.  Exit codes: 0 success / all claims pass,
1 validation error, 2 claim failure, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys

from .core import ContextMismatch, PrimeContext
from . import lipschitz
from .lipschitz import (
    CompatibilityViolation,
    LipschitzFn,
    fn_from_json,
    fn_to_json,
    is_bijective_mod,
    preserves_measure_coord,
    preserves_measure_vdp,
    series_from_json,
    vdp_inverse,
    vdp_transform,
)
from .automorph import (
    CustomOp,
    analyze_custom_op,
    aut_spec_from_json,
    is_homomorphism,
    operation_by_name,
    realize,
)
from .oracle import (
    BudgetExceeded,
    DEFAULT_NODE_BUDGET,
    compare_with_family,
    enumerate_automorphisms,
    verify_trivial_pairs,
)
from . import cipher as cipher_mod

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CLAIM_FAILURE = 2
EXIT_BUDGET = 3


def _load_json_arg(text: str):
    """Inline JSON, or @path to read a JSON file."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _emit(data, args, pretty_renderer=None) -> None:
    if getattr(args, "pretty", False) and pretty_renderer is not None:
        text = pretty_renderer(data)
    elif getattr(args, "pretty", False):
        text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    else:
        text = json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _function_from_spec(ctx: PrimeContext, spec) -> LipschitzFn:
    if isinstance(spec, dict) and "family" in spec:
        return realize(aut_spec_from_json(ctx, spec))
    if isinstance(spec, dict) and "table" in spec:
        if spec.get("p", ctx.p) != ctx.p or spec.get("K", ctx.precision) != ctx.precision:
            raise ValueError("function (p, K) does not match --p/--K")
        return LipschitzFn.from_table(ctx, spec["table"], spec.get("provenance"))
    raise ValueError("spec must carry either a 'family' or a 'table' key")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    ctx = PrimeContext(args.p, args.K)
    fn = _function_from_spec(ctx, _load_json_arg(args.spec))
    x = args.x % ctx.modulus
    value = fn(x)
    _emit(
        {
            "p": ctx.p,
            "K": ctx.precision,
            "x": x,
            "value": value,
            "digits": list(ctx.digits_of(value)),
        },
        args,
        lambda d: f"f({d['x']}) = {d['value']}  digits(LE) {d['digits']}\n",
    )
    return EXIT_OK


def cmd_vdp(args) -> int:
    data = _load_json_arg(args.infile)
    if args.inverse:
        fn = vdp_inverse(series_from_json(data))
        _emit(fn_to_json(fn), args)
    else:
        series = vdp_transform(fn_from_json(data))
        _emit(series.to_json(), args)
    return EXIT_OK


def cmd_check(args) -> int:
    data = _load_json_arg(args.infile)
    ctx = PrimeContext(data["p"], data["K"])
    try:
        fn = LipschitzFn.from_table(ctx, data["table"], data.get("provenance"))
    except CompatibilityViolation as violation:
        _emit(
            {
                "p": ctx.p,
                "K": ctx.precision,
                "tower_compatible": False,
                "violation": {
                    "x": violation.x,
                    "y": violation.y,
                    "level": violation.level,
                },
            },
            args,
        )
        return EXIT_OK
    vdp_report = preserves_measure_vdp(fn)
    coord_report = preserves_measure_coord(fn)
    bijective = all(is_bijective_mod(fn, k) for k in range(1, ctx.precision + 1))
    _emit(
        {
            "p": ctx.p,
            "K": ctx.precision,
            "tower_compatible": True,
            "measure_preserving_vdp": vdp_report.ok,
            "vdp_failure": list(vdp_report.failure) if vdp_report.failure else None,
            "measure_preserving_coord": coord_report.ok,
            "coord_failure": list(coord_report.failure) if coord_report.failure else None,
            "bijective_all_levels": bijective,
        },
        args,
    )
    return EXIT_OK


def cmd_make_aut(args) -> int:
    ctx = PrimeContext(args.p, args.K)
    fn = realize(aut_spec_from_json(ctx, _load_json_arg(args.spec)))
    _emit(fn_to_json(fn), args)
    return EXIT_OK


def cmd_check_hom(args) -> int:
    fn = fn_from_json(_load_json_arg(args.infile))
    results = []
    for name in args.ops.split(","):
        report = is_homomorphism(fn, operation_by_name(name.strip()), seed=args.seed)
        results.append(
            {
                "op": name.strip(),
                "ok": report.ok,
                "counterexample": list(report.counterexample)
                if report.counterexample
                else None,
                "mode": report.mode,
                "checked": report.checked,
            }
        )
    _emit(
        {"p": fn.ctx.p, "K": fn.ctx.precision, "seed": args.seed, "results": results},
        args,
    )
    return EXIT_OK


def cmd_analyze_g(args) -> int:
    ctx = PrimeContext(args.p, args.K)
    op = CustomOp.from_json(ctx, _load_json_arg(args.g))
    report = analyze_custom_op(op)
    _emit({"p": ctx.p, "K": ctx.precision, **report.to_json()}, args)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    ctx = PrimeContext(args.p, args.k)
    ops = [name.strip() for name in args.ops.split(",")]
    result = enumerate_automorphisms(ctx, ops, node_budget=args.budget)
    _emit(result.to_json(), args)
    return EXIT_OK


def _euler_phi(n: int) -> int:
    count = 0
    for i in range(1, n + 1):
        if math.gcd(i, n) == 1:
            count += 1
    return count


def _formula_count(op: str, p: int, k: int) -> int:
    if op == "plus":
        return p**k - p ** (k - 1)
    if op == "xor":
        return (p - 1) ** k * p ** (k * (k - 1) // 2)
    if op == "and":
        return _euler_phi(p - 1) ** k
    raise ValueError(op)


def _criterion_equivalence_sample(p: int, k: int, seed: int, samples: int) -> dict:
    ctx = PrimeContext(p, k)
    rng = random.Random(seed)
    disagreements = 0
    preserving = 0
    for i in range(samples):
        if i % 2:
            fn = lipschitz.random_measure_preserving(ctx, rng)
        else:
            fn = lipschitz.random_lipschitz(ctx, rng)
        a = preserves_measure_vdp(fn).ok
        b = preserves_measure_coord(fn).ok
        c = all(is_bijective_mod(fn, level) for level in range(1, k + 1))
        if not (a == b == c):
            disagreements += 1
        if a:
            preserving += 1
    return {
        "samples": samples,
        "disagreements": disagreements,
        "measure_preserving_seen": preserving,
    }


def cmd_verify(args) -> int:
    p, k, seed = args.p, args.k, args.seed
    ctx = PrimeContext(p, k)
    claims = []

    for op in ("plus", "xor", "and"):
        result = enumerate_automorphisms(ctx, [op], node_budget=args.budget)
        comparison = compare_with_family(result)
        claims.append(
            {
                "name": f"family-matches-oracle-{op}",
                "pass": comparison.equal,
                "detail": {
                    "enumerated": comparison.enumerated_count,
                    "family": comparison.family_count,
                },
            }
        )
        expected = _formula_count(op, p, k)
        claims.append(
            {
                "name": f"count-formula-{op}",
                "pass": result.count == expected,
                "detail": {"count": result.count, "expected": expected},
            }
        )

    # the multiplicative family is compared and reported; quotient-level
    # extras are a finding, surfaced here rather than failed
    times_result = enumerate_automorphisms(ctx, ["times"], node_budget=args.budget)
    times_comparison = compare_with_family(times_result)
    claims.append(
        {
            "name": "family-vs-oracle-times-report",
            "pass": True,
            "detail": {
                "equal": times_comparison.equal,
                "enumerated": times_comparison.enumerated_count,
                "family": times_comparison.family_count,
                "missing": len(times_comparison.missing),
                "extra": len(times_comparison.extra),
            },
        }
    )

    trivial = verify_trivial_pairs(p, k, node_budget=args.budget)
    claims.append(
        {
            "name": "trivial-pairs",
            "pass": trivial.all_trivial,
            "detail": {
                "counts": {"+".join(r.ops): r.count for r in trivial.pairs},
            },
        }
    )

    equivalence = _criterion_equivalence_sample(p, k, seed, samples=300)
    claims.append(
        {
            "name": "criterion-equivalence",
            "pass": equivalence["disagreements"] == 0,
            "detail": equivalence,
        }
    )

    all_pass = all(c["pass"] for c in claims)
    payload = {"p": p, "k": k, "seed": seed, "claims": claims, "all_pass": all_pass}

    def render(data) -> str:
        lines = []
        for claim in data["claims"]:
            status = "PASS" if claim["pass"] else "FAIL"
            lines.append(f"{status}  {claim['name']}  {json.dumps(claim['detail'], sort_keys=True)}")
        lines.append(
            f"{'ALL PASS' if data['all_pass'] else 'FAILURES PRESENT'} "
            f"(p={data['p']}, k={data['k']}, seed={data['seed']})"
        )
        return "\n".join(lines) + "\n"

    _emit(payload, args, render)
    return EXIT_OK if all_pass else EXIT_CLAIM_FAILURE


def cmd_report(args) -> int:
    rows = []
    for path in args.infiles:
        data = _load_json_arg("@" + path)
        rows.append(
            {
                "p": data["p"],
                "k": data["k"],
                "ops": "+".join(data["ops"]),
                "count": data["count"],
            }
        )
    rows.sort(key=lambda r: (r["p"], r["k"], r["ops"]))
    _emit(
        {"table": rows},
        args,
        lambda d: "".join(
            f"p={r['p']} k={r['k']} ops={r['ops']} count={r['count']}\n"
            for r in d["table"]
        )
        or "(empty)\n",
    )
    return EXIT_OK


def cmd_cipher(args) -> int:
    key = cipher_mod.key_from_json(_load_json_arg(args.key))
    if args.action in ("encrypt", "decrypt"):
        word = cipher_mod.word_from_json(_load_json_arg(args.word))
        fn = cipher_mod.encrypt if args.action == "encrypt" else cipher_mod.decrypt
        _emit(fn(word, key).to_json(), args)
        return EXIT_OK
    formula = cipher_mod.parse_formula(_load_json_arg(args.formula))
    data = [cipher_mod.word_from_json(w) for w in _load_json_arg(args.data)]
    demo = cipher_mod.homomorphic_eval(formula, data, key)
    _emit(
        demo.to_json(),
        args,
        lambda d: (
            f"plain result     : {d['plain_result']['symbols']}\n"
            f"encrypt(result)  : {d['encrypted_plain_result']['symbols']}\n"
            f"formula(cipher)  : {d['cipher_result']['symbols']}\n"
            f"verdict          : {'equal' if d['equal'] else 'sides differ at ' + str(d['mismatch_positions'])}\n"
        ),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padiclab",
        description="Exact p-adic integer laboratory: evaluate, verify, enumerate, demo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--json", action="store_true", help="JSON output (the default)")
        sp.add_argument("--pretty", action="store_true", help="human-readable output")
        sp.add_argument("--out", help="write output to this path instead of stdout")

    sp = sub.add_parser("eval", help="evaluate a function or family spec at a point")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--spec", required=True, help="JSON (or @file): family or table")
    sp.add_argument("--x", type=int, required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("vdp", help="ball-coefficient transform of a table, or its inverse")
    sp.add_argument("--in", dest="infile", required=True, help="JSON (or @file)")
    sp.add_argument("--inverse", action="store_true")
    add_common(sp)
    sp.set_defaults(func=cmd_vdp)

    sp = sub.add_parser("check", help="tower compatibility and invertibility criteria")
    sp.add_argument("--in", dest="infile", required=True, help="JSON (or @file)")
    add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("make-aut", help="realize a family spec as a value table")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--spec", required=True, help="JSON (or @file)")
    add_common(sp)
    sp.set_defaults(func=cmd_make_aut)

    sp = sub.add_parser("check-hom", help="homomorphism check against operations")
    sp.add_argument("--in", dest="infile", required=True, help="JSON (or @file)")
    sp.add_argument("--ops", required=True, help="comma list: plus,times,xor,and")
    sp.add_argument("--seed", type=int, default=0)
    add_common(sp)
    sp.set_defaults(func=cmd_check_hom)

    sp = sub.add_parser("analyze-g", help="scalings commuting with a custom series operation")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--g", required=True, help="JSON (or @file): c, a, b, terms")
    add_common(sp)
    sp.set_defaults(func=cmd_analyze_g)

    sp = sub.add_parser("enumerate", help="exhaustively enumerate quotient automorphisms")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--ops", required=True, help="comma list: plus,times,xor,and")
    sp.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    add_common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("verify", help="run the desk-scale claim suite")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("report", help="aggregate enumeration results into a count table")
    sp.add_argument("--in", dest="infiles", nargs="*", default=[], help="result JSON files")
    add_common(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("cipher", help="encrypt/decrypt words, or run the homomorphic demo")
    sp.add_argument("action", choices=["encrypt", "decrypt", "demo"])
    sp.add_argument("--key", required=True, help="JSON (or @file)")
    sp.add_argument("--word", help="JSON (or @file), for encrypt/decrypt")
    sp.add_argument("--formula", help="JSON (or @file), for demo")
    sp.add_argument("--data", help="JSON array of words (or @file), for demo")
    add_common(sp)
    sp.set_defaults(func=cmd_cipher)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "cipher":
        if args.action in ("encrypt", "decrypt") and not args.word:
            parser.error("--word is required for encrypt/decrypt")
        if args.action == "demo" and not (args.formula and args.data):
            parser.error("--formula and --data are required for demo")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, ContextMismatch, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
