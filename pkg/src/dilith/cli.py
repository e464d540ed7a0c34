"""Command-line interface: key lifecycle, estimation, search, op counts,
and the lemma suite.

Exit codes: 0 success/accept, 1 verify-reject (or failing lemma), 2
invalid parameters, 3 I/O failure, 4 infeasible search.  Every command is
deterministic given its arguments; keygen takes the seed explicitly (or
--random-seed, which prints the seed it drew).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import codec, estimator, lemma_lab, opcounts, params as params_mod, ring, scheme

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_BAD_PARAMS = 2
EXIT_IO = 3
EXIT_INFEASIBLE = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_params(spec: str, require_valid: bool) -> params_mod.ParameterSet:
    """Resolve a --params/--set argument: built-in id first, then file path.

    Parameter files must pass the full validity gate; built-ins are served
    as stored (their validity appears in estimator reports).
    """
    if spec in params_mod.BUILTIN:
        p = params_mod.builtin(spec)
    else:
        if not os.path.exists(spec):
            raise CliError(EXIT_BAD_PARAMS, f"unknown parameter set or missing file: {spec}")
        try:
            p = params_mod.load_params_file(spec)
        except params_mod.BadParamsFile as e:
            raise CliError(EXIT_BAD_PARAMS, f"bad parameter file {spec}: {e}")
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot read {spec}: {e}")
        failed = [c for c in estimator.validate(p) if not c.passed]
        if failed:
            raise CliError(
                EXIT_BAD_PARAMS,
                f"parameter file {spec} fails constraint {failed[0].name}: {failed[0].detail}",
            )
    if require_valid:
        failed = [c for c in estimator.validate(p) if not c.passed]
        if failed:
            raise CliError(
                EXIT_BAD_PARAMS,
                f"parameter set {p.name} fails constraint {failed[0].name}: {failed[0].detail}",
            )
    return p


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}")


def _write_file(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {path}: {e}")


def _parse_seed(args) -> bytes:
    if args.random_seed:
        seed = os.urandom(scheme.SEED_BYTES)
        print(f"seed: {seed.hex()}")
        return seed
    if not args.seed:
        raise CliError(EXIT_BAD_PARAMS, "either --seed or --random-seed is required")
    try:
        seed = bytes.fromhex(args.seed)
    except ValueError:
        raise CliError(EXIT_BAD_PARAMS, "--seed must be hex")
    if len(seed) != scheme.SEED_BYTES:
        raise CliError(EXIT_BAD_PARAMS, f"--seed must be {scheme.SEED_BYTES} bytes of hex")
    return seed


def cmd_keygen(args) -> int:
    p = _load_params(args.params, require_valid=True)
    seed = _parse_seed(args)
    try:
        kp = scheme.keygen(p, seed)
    except (ring.BadCongruence, ring.NotPrime, ring.NotPowerOfTwo) as e:
        raise CliError(EXIT_BAD_PARAMS, str(e))
    pk_bytes = codec.serialize_public_key(kp.pk)
    sk_bytes = codec.serialize_secret_key(kp.sk)
    _write_file(args.out_pk, pk_bytes)
    _write_file(args.out_sk, sk_bytes)
    print(f"pk: {len(pk_bytes)} bytes -> {args.out_pk}")
    print(f"sk: {len(sk_bytes)} bytes -> {args.out_sk}")
    return EXIT_OK


def cmd_sign(args) -> int:
    try:
        sk = codec.deserialize_secret_key(_read_file(args.sk))
    except (codec.BadMagic, codec.BadParamsId, codec.TruncatedInput, codec.NonCanonical) as e:
        raise CliError(EXIT_BAD_PARAMS, f"bad secret key: {e}")
    message = _read_file(args.infile)
    try:
        sig, attempts = scheme.sign_with_attempts(sk, message)
    except scheme.MaxAttemptsExceeded as e:
        raise CliError(EXIT_BAD_PARAMS, str(e))
    _write_file(args.out_sig, codec.serialize_signature(sk.params, sig))
    print(f"attempts: {attempts}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        pk = codec.deserialize_public_key(_read_file(args.pk))
    except (codec.BadMagic, codec.BadParamsId, codec.TruncatedInput, codec.NonCanonical) as e:
        raise CliError(EXIT_BAD_PARAMS, f"bad public key: {e}")
    message = _read_file(args.infile)
    try:
        sig_params, sig = codec.deserialize_signature(_read_file(args.sig))
    except (codec.BadMagic, codec.BadParamsId, codec.TruncatedInput, codec.NonCanonical) as e:
        print(f"reject: malformed signature ({e})")
        return EXIT_REJECT
    if sig_params != pk.params:
        print("reject: signature/key parameter mismatch")
        return EXIT_REJECT
    if scheme.verify(pk, message, sig):
        print("accept")
        return EXIT_OK
    print("reject")
    return EXIT_REJECT


def _estimate_rows(names):
    rows = []
    for name in names:
        p = params_mod.builtin(name)
        rows.append((p, estimator.report(p)))
    return rows


def cmd_estimate(args) -> int:
    if args.all_tables:
        if args.format == "csv":
            ordered = [n for group in params_mod.GROUPS.values() for n in group]
            sys.stdout.write(estimator.reports_to_csv(_estimate_rows(ordered)))
        else:
            doc = {
                group: [
                    estimator.report_to_dict(p, rep)
                    for p, rep in _estimate_rows(names)
                ]
                for group, names in params_mod.GROUPS.items()
            }
            print(json.dumps(doc, indent=2))
        return EXIT_OK
    if not args.set:
        raise CliError(EXIT_BAD_PARAMS, "either --set or --all-tables is required")
    p = _load_params(args.set, require_valid=False)
    rep = estimator.report(p)
    if args.format == "csv":
        sys.stdout.write(estimator.reports_to_csv([(p, rep)]))
    else:
        print(json.dumps(estimator.report_to_dict(p, rep), indent=2))
    return EXIT_OK


def cmd_opcounts(args) -> int:
    p = _load_params(args.set, require_valid=False)
    try:
        if args.mul == "ntt":
            cost = opcounts.ntt_mul_cost(p.n)
        elif args.mul == "hntt":
            cost = opcounts.hntt_minimal_split(p.n, p.q)[2]
        else:
            cost = opcounts.mul_cost_for(p)
    except (opcounts.NonIntegralCost, ValueError) as e:
        raise CliError(EXIT_BAD_PARAMS, str(e))
    table = opcounts.zq_op_table(p, cost)
    if args.format == "csv":
        sys.stdout.write(opcounts.comparison_to_csv([(p, table)]))
    else:
        doc = opcounts.comparison_to_dict([(p, table)])[p.name]
        doc["cost_per_mul"] = {"mults": cost.mults, "adds": cost.adds}
        print(json.dumps({p.name: doc}, indent=2))
    return EXIT_OK


def _parse_range(text: str, what: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise CliError(EXIT_BAD_PARAMS, f"--{what} must be LO:HI")
    return lo, hi


def cmd_search(args) -> int:
    if args.targets:
        try:
            lwe_t, st_t, sis_t = (int(x) for x in args.targets.split(","))
        except ValueError:
            raise CliError(EXIT_BAD_PARAMS, "--targets must be LWE,STMSIS,SIS")
        targets = estimator.SearchTargets(lwe=lwe_t, stmsis=st_t, sis=sis_t)
    else:
        targets = estimator.SearchTargets.for_level(args.level)
    try:
        winner = estimator.search(
            level=args.level,
            targets=targets,
            q=args.q,
            n=args.n,
            d=args.d,
            tau=args.tau,
            k_range=_parse_range(args.k_range, "k-range"),
            l_range=_parse_range(args.l_range, "l-range"),
            gamma2_range=_parse_range(args.gamma2_range, "gamma2-range"),
        )
    except estimator.NoFeasiblePoint as e:
        print(f"no feasible point: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(json.dumps(winner.to_json_dict(), indent=2))
    return EXIT_OK


def cmd_lemmas(args) -> int:
    results = {}
    if args.suite in ("all", "rounding"):
        rounding = []
        for q in (17, 19, 23):
            for t in range(1, q + 1):
                if t * t > q:
                    break
                spec = lemma_lab.RoundingSpec(q, t)
                exact = lemma_lab.p_t_exact(spec)
                brute = lemma_lab.p_t_bruteforce(spec)
                rounding.append({
                    "q": q,
                    "t": t,
                    "p_t": str(exact),
                    "closed_form_matches_bruteforce": exact == brute,
                    "below_2_over_t": exact * t <= 2,
                })
        results["rounding"] = {
            "passed": all(r["closed_form_matches_bruteforce"] and r["below_2_over_t"] for r in rounding),
            "cases": rounding,
        }
    if args.suite in ("all", "uniformity"):
        ctx = ring.make_ring(17, 4)
        sweep = lemma_lab.uniformity_sweep(
            ctx, 1, args.alpha, mode=args.mode, samples=args.samples
        )
        results["uniformity"] = {
            "passed": sweep.passed,
            "mode": sweep.mode,
            "checked": sweep.checked,
            "failures": sweep.failures,
        }
    if args.suite in ("all", "ntt"):
        ctx = ring.make_ring(17, 4)
        iso = lemma_lab.isomorphism_exhaustive(ctx)
        results["ntt"] = {
            "passed": iso.passed,
            "roundtrip_ok": iso.roundtrip_ok,
            "homomorphism_ok": iso.homomorphism_ok,
            "primitive_sums_ok": iso.primitive_sums_ok,
            "elements": iso.elements,
            "pairs": iso.pairs,
        }
    all_passed = all(block["passed"] for block in results.values())
    print(json.dumps({"passed": all_passed, "suites": results}, indent=2))
    return EXIT_OK if all_passed else EXIT_REJECT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilith", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    kg = sub.add_parser("keygen", help="generate a key pair from a seed")
    kg.add_argument("--params", required=True, help="built-in set id or params JSON file")
    kg.add_argument("--seed", help="32-byte hex seed")
    kg.add_argument("--random-seed", action="store_true", help="draw a seed and print it")
    kg.add_argument("--out-pk", required=True)
    kg.add_argument("--out-sk", required=True)
    kg.set_defaults(func=cmd_keygen)

    sg = sub.add_parser("sign", help="sign a message file")
    sg.add_argument("--sk", required=True)
    sg.add_argument("--in", dest="infile", required=True)
    sg.add_argument("--out-sig", required=True)
    sg.set_defaults(func=cmd_sign)

    vf = sub.add_parser("verify", help="verify a signature file")
    vf.add_argument("--pk", required=True)
    vf.add_argument("--in", dest="infile", required=True)
    vf.add_argument("--sig", required=True)
    vf.set_defaults(func=cmd_verify)

    es = sub.add_parser("estimate", help="security report for parameter sets")
    es.add_argument("--set", help="built-in set id or params JSON file")
    es.add_argument("--all-tables", action="store_true", help="every built-in set, grouped")
    es.add_argument("--format", choices=("json", "csv"), default="json")
    es.set_defaults(func=cmd_estimate)

    op = sub.add_parser("opcounts", help="Z_q operation counts per phase")
    op.add_argument("--set", required=True)
    op.add_argument("--mul", choices=("ntt", "hntt", "auto"), default="auto")
    op.add_argument("--format", choices=("json", "csv"), default="json")
    op.set_defaults(func=cmd_opcounts)

    se = sub.add_parser("search", help="search feasible parameter sets")
    se.add_argument("--level", type=int, choices=(1, 2, 3, 4, 5), required=True)
    se.add_argument("--targets", help="explicit LWE,STMSIS,SIS Core-SVP minima")
    se.add_argument("--q", type=int, default=params_mod.Q0)
    se.add_argument("--n", type=int, default=512)
    se.add_argument("--d", type=int, default=15)
    se.add_argument("--tau", type=int, default=40)
    se.add_argument("--k-range", default="4:16")
    se.add_argument("--l-range", default="4:16")
    se.add_argument("--gamma2-range", default="200000:1200000")
    se.set_defaults(func=cmd_search)

    lm = sub.add_parser("lemmas", help="brute-force lemma verification")
    lm.add_argument("--suite", choices=("all", "rounding", "uniformity", "ntt"), default="all")
    lm.add_argument("--mode", choices=("auto", "full", "sampled"), default="auto",
                    help="uniformity sweep mode")
    lm.add_argument("--samples", type=int, default=100)
    lm.add_argument("--alpha", type=int, default=0, help="coefficient index to tally")
    lm.set_defaults(func=cmd_lemmas)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except params_mod.UnknownParamsId as e:
        print(f"error: unknown parameter set {e}", file=sys.stderr)
        return EXIT_BAD_PARAMS


if __name__ == "__main__":
    sys.exit(main())
