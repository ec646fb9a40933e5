"""Command-line entry point: ``mpjlab {run,attack,verify,brute,bench}``.

Exit codes: 0 success/valid, 1 falsified/invalid, 2 usage, precondition
or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys

from .adversary import FoolingCertificate, attack, attack_uniform, verify_certificate
from .core import Instance, evaluate, random_instance
from .errors import CapExceeded, ConstructionFailed, PreconditionViolated
from .oracle import DEFAULT_CAP, brute_force_fooling_search, exhaustive_report
from .protocol import run
from .protocols import TpjShape, protocol_from_name

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _protocol(descriptor, n, k):
    try:
        return protocol_from_name(descriptor, n, k)
    except (ValueError, PreconditionViolated) as exc:
        raise UsageError(str(exc)) from exc


def _space(protocol):
    if protocol.name == "tpj":
        return TpjShape(protocol.params["b"], protocol.k)
    return None


def cmd_run(args, out):
    protocol = _protocol(args.protocol, args.n, args.k)
    if args.exhaustive:
        try:
            report = exhaustive_report(protocol, _space(protocol), cap=args.cap)
        except CapExceeded as exc:
            raise UsageError(str(exc)) from exc
        print(
            f"{report.correct}/{report.total} correct, "
            f"C_total={protocol.total_cost}, C_max={protocol.max_cost}",
            file=out,
        )
        if report.counterexample is not None:
            print(f"counterexample: {json.dumps(report.counterexample.to_dict())}", file=out)
        return EXIT_OK if report.ok else EXIT_FALSIFIED

    if args.instance:
        try:
            with open(args.instance) as fh:
                inst = Instance.from_dict(json.load(fh))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read instance: {exc}") from exc
        if (inst.n, inst.k) != (args.n, args.k):
            raise UsageError(f"instance has n={inst.n}, k={inst.k}; expected n={args.n}, k={args.k}")
    else:
        rng = random.Random(args.random)
        shape = _space(protocol)
        if shape is not None:
            inst = rng.choice(list(shape.instances()))
        else:
            inst = random_instance(args.n, args.k, rng)
        print(f"seed: {args.random}", file=out)
    transcript, truth = run(protocol, inst), evaluate(inst)
    print(f"instance: {json.dumps(inst.to_dict())}", file=out)
    print(f"transcript: {json.dumps(transcript.to_dict())}", file=out)
    verdict = "correct" if transcript.output == truth else "WRONG"
    print(f"answer={truth} output={transcript.output} {verdict}, "
          f"C_total={protocol.total_cost}, C_max={protocol.max_cost}", file=out)
    return EXIT_OK if transcript.output == truth else EXIT_FALSIFIED


def cmd_attack(args, out):
    protocol = _protocol(args.protocol, args.n, args.k)
    try:
        cert = attack_uniform(protocol) if args.uniform else attack(protocol)
    except PreconditionViolated as exc:
        raise UsageError(f"precondition violated: {exc}") from exc
    except ConstructionFailed as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    text = cert.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"certificate written to {args.out}", file=out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out):
    try:
        with open(args.certificate) as fh:
            cert = FoolingCertificate.from_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    protocol = _protocol(args.protocol, cert.n, cert.k)
    try:
        verdict = verify_certificate(protocol, cert)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(("valid: " if verdict else "invalid: ") + verdict.reason, file=out)
    return EXIT_OK if verdict else EXIT_FALSIFIED


def cmd_brute(args, out):
    protocol = _protocol(args.protocol, args.n, args.k)
    try:
        cert = brute_force_fooling_search(protocol, _space(protocol), cap=args.cap)
    except CapExceeded as exc:
        raise UsageError(str(exc)) from exc
    if cert is None:
        print("no fooling pair: the protocol separates every pair with different answers", file=out)
        return EXIT_OK
    out.write(cert.to_json())
    return EXIT_FALSIFIED


BENCH_ROWS = [
    ("trivial", 3, 3), ("trivial", 4, 3), ("trivial", 4, 4), ("trivial", 8, 3),
    ("reordered:1:2", 4, 3), ("reordered:1:2", 8, 3), ("reordered:2:3", 8, 4),
    ("tpj", 4, 3), ("tpj", 9, 3), ("tpj", 8, 4),
    ("silent", 8, 3), ("truncated-trivial", 8, 3), ("first-player", 8, 3),
    ("uniform-truncated", 8, 3),
]


BENCH_CAP = 50_000


def cmd_bench(args, out):
    if args.suite != "theorems":
        raise UsageError(f"unknown suite {args.suite!r}")
    header = ["protocol", "view", "n", "k", "C_total", "C_max", "correct", "certificate"]
    rows = []
    for descriptor, n, k in BENCH_ROWS:
        protocol = _protocol(descriptor, n, k)
        try:
            report = exhaustive_report(protocol, _space(protocol), cap=args.cap)
            correct = f"{report.correct}/{report.total}"
            refuted = not report.ok
        except CapExceeded:
            correct, refuted = "cap", True
        cert = "-"
        if refuted and protocol.view_model.value == "Collapsing":
            try:
                maker = attack if protocol.total_cost <= n - 3 else attack_uniform
                cert = "verified" if verify_certificate(protocol, maker(protocol)) else "INVALID"
            except PreconditionViolated:
                cert = "n/a"
        label = descriptor if descriptor != "tpj" else f"tpj b={protocol.params['b']}"
        rows.append([label, protocol.view_model.value, n, k, protocol.total_cost,
                     protocol.max_cost, correct, cert])
    if args.csv:
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
    else:
        widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
        for row in [header] + rows:
            print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip(), file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="mpjlab", description="Pointer-jumping protocol laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a protocol and check it against the true answer")
    p.add_argument("--protocol", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", metavar="FILE")
    source.add_argument("--random", type=int, metavar="SEED")
    source.add_argument("--exhaustive", action="store_true")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack", help="build a fooling certificate against a collapsing protocol")
    p.add_argument("--protocol", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--uniform", action="store_true", help="use the per-player (max-cost) construction")
    p.add_argument("--out", metavar="CERT.json")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("verify", help="check a fooling certificate")
    p.add_argument("--protocol", required=True)
    p.add_argument("certificate", metavar="CERT.json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("brute", help="exhaustive fooling-pair search")
    p.add_argument("--protocol", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("bench", help="cost and correctness table for the built-in protocols")
    p.add_argument("--suite", default="theorems")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--cap", type=int, default=BENCH_CAP,
                   help="executions allowed per exhaustive check (default: %(default)s)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
