"""Batch command line over the library: terms, formulas, derivations, proofs.

Exit codes: 0 success, 1 domain error (E_*), 2 usage error.  All numeric
output is exact num/den.
"""

from __future__ import annotations

import argparse
import json
import sys

from .distribution import (
    distribution,
    estimate_hnv,
    hnv_lower_bound,
    nf_mass,
    sample_run,
)
from .errors import LampeError
from .formulas import (
    entails,
    format_rational,
    measure,
    parse_formula,
)
from .proofs import (
    check_proof,
    normalize_proof,
    proof_from_json,
    proof_to_json,
    translate,
    verify_simulation,
)
from .rewrite import PE, PE_BRACES, head_step, pnf, reduce_term, step
from .terms import canonical_str, parse_term, print_term
from .transport import transport_subject_reduction
from .typesys import (
    apply_mu_star,
    check_derivation,
    derivation_from_json,
    derivation_to_json,
)


def _mode(args):
    return PE_BRACES if args.mode == "pe-braces" else PE


def _read_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _emit_json(obj):
    print(json.dumps(obj, indent=2))


def cmd_parse(args):
    print(print_term(parse_term(args.term)))


def cmd_pnf(args):
    term, trace = pnf(parse_term(args.term), _mode(args))
    if args.trace:
        for s in trace:
            print(s.format())
    if args.json:
        _emit_json({"result": print_term(term), "steps": len(trace)})
    else:
        print(print_term(term))


def cmd_reduce(args):
    outcome = reduce_term(
        parse_term(args.term), _mode(args), args.strategy, args.fuel
    )
    if args.json:
        _emit_json(
            {
                "result": print_term(outcome.term),
                "trace": [s.to_json() for s in outcome.trace],
                "exhausted": outcome.exhausted,
            }
        )
    else:
        if args.trace:
            for s in outcome.trace:
                print(s.format())
        print(print_term(outcome.term))


def cmd_dist(args):
    term, _ = pnf(parse_term(args.term), _mode(args))
    dist = distribution(term, _mode(args))
    if args.json:
        _emit_json(
            {
                canonical_str(t): format_rational(w)
                for t, w in dist.items()
            }
        )
    else:
        for t, w in dist.items():
            print(f"{format_rational(w)}  {print_term(t)}")


def cmd_hnv(args):
    est = hnv_lower_bound(parse_term(args.term), args.fuel, _mode(args))
    print(format_rational(est.value))
    if not est.exact:
        print("lower bound (fuel exhausted)", file=sys.stderr)


def cmd_nf(args):
    est = nf_mass(parse_term(args.term), args.fuel)
    print(format_rational(est.value))
    if not est.exact:
        print("lower bound (fuel exhausted)", file=sys.stderr)


def cmd_mu(args):
    print(format_rational(measure(parse_formula(args.formula))))


def cmd_entails(args):
    holds = entails(parse_formula(args.left), parse_formula(args.right))
    print("true" if holds else "false")


def cmd_check(args):
    deriv = derivation_from_json(_read_json(args.file))
    judgement = check_derivation(deriv, args.system)
    print(judgement.format())


def cmd_mu_star(args):
    deriv = derivation_from_json(_read_json(args.file))
    result = apply_mu_star(deriv)
    if args.json:
        _emit_json(derivation_to_json(result))
    else:
        print(result.judgement.format())


def cmd_transport(args):
    deriv = derivation_from_json(_read_json(args.file))
    mode = _mode(args)
    steps = step(deriv.judgement.term, mode)
    if not 0 <= args.step_index < len(steps):
        raise LampeError(
            f"step index {args.step_index} out of range ({len(steps)} steps)"
        )
    result = transport_subject_reduction(deriv, steps[args.step_index], mode)
    if args.json:
        _emit_json(derivation_to_json(result))
    else:
        print(result.judgement.format())


def cmd_check_proof(args):
    proof = proof_from_json(_read_json(args.file))
    print(check_proof(proof).format())


def cmd_normalize_proof(args):
    proof = proof_from_json(_read_json(args.file))
    normal, steps = normalize_proof(proof, args.fuel)
    print(f"{steps} steps", file=sys.stderr)
    if args.json:
        _emit_json(proof_to_json(normal))
    else:
        print(normal.sequent.format())


def cmd_translate(args):
    proof = proof_from_json(_read_json(args.file))
    term, deriv = translate(proof)
    if args.json:
        _emit_json(
            {"term": print_term(term), "derivation": derivation_to_json(deriv)}
        )
    else:
        print(print_term(term))
        print(deriv.judgement.format())


def cmd_simulate(args):
    proof = proof_from_json(_read_json(args.file))
    report = verify_simulation(proof, args.fuel)
    for entry in report.entries:
        status = "ok" if entry.ok else "FAIL"
        print(f"{status} {entry.kind} ({len(entry.steps)} steps) {entry.detail}")
    print(f"{len(report.entries)} steps, {len(report.failures)} failures")
    if report.failures:
        raise LampeError("simulation failures")


def cmd_sample(args):
    outcome = sample_run(
        parse_term(args.term), args.seed, args.fuel, _mode(args)
    )
    if outcome.is_head_normal:
        print(f"HEAD_NORMAL {print_term(outcome.term)}")
    else:
        print("EXHAUSTED")


def cmd_estimate(args):
    estimate, stderr = estimate_hnv(
        parse_term(args.term), args.samples, args.fuel, args.seed, _mode(args)
    )
    print(f"{format_rational(estimate)} {format_rational(stderr)}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lampe",
        description="probabilistic event lambda calculus toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, term=False, file=False):
        p.add_argument("--mode", choices=["pe", "pe-braces"], default="pe")
        p.add_argument("--fuel", type=int, default=1000)
        p.add_argument("--json", action="store_true")
        if term:
            p.add_argument("term")
        if file:
            p.add_argument("file")
        return p

    common(sub.add_parser("parse", help="echo a term"), term=True)
    p = common(sub.add_parser("pnf", help="permutative normal form"), term=True)
    p.add_argument("--trace", action="store_true")
    p = common(sub.add_parser("reduce", help="fuel-bounded reduction"), term=True)
    p.add_argument("--strategy", choices=["head", "full"], default="full")
    p.add_argument("--trace", action="store_true")
    common(sub.add_parser("dist", help="distribution of a PNF"), term=True)
    common(sub.add_parser("hnv", help="head-normalization mass"), term=True)
    common(sub.add_parser("nf", help="normalization mass"), term=True)
    p = sub.add_parser("mu", help="measure of a formula")
    p.add_argument("formula")
    p = sub.add_parser("entails", help="Boolean entailment")
    p.add_argument("left")
    p.add_argument("right")
    p = common(sub.add_parser("check", help="check a typing derivation"), file=True)
    p.add_argument("--system", choices=["cn", "cbv", "int"], required=True)
    common(sub.add_parser("mu-star", help="discharge all names at once"), file=True)
    p = common(
        sub.add_parser("transport", help="subject reduction transport"), file=True
    )
    p.add_argument("--step-index", type=int, default=0)
    common(sub.add_parser("check-proof", help="check a proof"), file=True)
    common(sub.add_parser("normalize-proof", help="normalize a proof"), file=True)
    common(sub.add_parser("translate", help="proof term and typing"), file=True)
    common(sub.add_parser("simulate", help="normalization vs reduction"), file=True)
    p = common(sub.add_parser("sample", help="one randomized run"), term=True)
    p.add_argument("--seed", type=int, default=0)
    p = common(sub.add_parser("estimate", help="Monte Carlo estimate"), term=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    return parser


_COMMANDS = {
    "parse": cmd_parse,
    "pnf": cmd_pnf,
    "reduce": cmd_reduce,
    "dist": cmd_dist,
    "hnv": cmd_hnv,
    "nf": cmd_nf,
    "mu": cmd_mu,
    "entails": cmd_entails,
    "check": cmd_check,
    "mu-star": cmd_mu_star,
    "transport": cmd_transport,
    "check-proof": cmd_check_proof,
    "normalize-proof": cmd_normalize_proof,
    "translate": cmd_translate,
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
}


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        _COMMANDS[args.command](args)
    except LampeError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"E_INPUT: {exc}", file=sys.stderr)
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        print(f"E_SCHEMA: malformed input ({exc})", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
