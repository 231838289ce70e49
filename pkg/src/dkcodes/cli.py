"""Command-line workbench.

Exit status: 0 on success, 1 when a stream fails validation or a container
cannot be decoded, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import Constraint, SlidingConfig, optimize_rate, parse_k, solve_lambda
from .bitstream import BitBuffer, unpack
from .container import EncodedContainer, is_container
from .errors import DKCodeError, DomainError, NotFactorableError, ParameterError
from .harness import (
    DEFAULT_SEED,
    estimate_rate,
    reproduce_table4,
    table4_csv,
    table4_json,
    validate_constraint,
)
from .interleaved import InterleavedCode, il_decode, il_encode
from .sliding import full_decode, full_encode

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _constraint(args) -> Constraint:
    return Constraint(args.d, parse_k(args.k))


def _sliding_config(args, c: Constraint) -> SlidingConfig:
    j = args.j
    if args.p is not None:
        return SlidingConfig(c, 0 if j is None else j, args.p)
    if not c.finite:
        # stuffing is optimal for k = infinity at p = 1/lambda
        return SlidingConfig(c, 0, 1.0 / solve_lambda(c).lam)
    prof = optimize_rate(c, j)
    return SlidingConfig(c, prof.j_star, prof.p_star)


def _read_bits(path: str) -> BitBuffer:
    with open(path, "rb") as fh:
        data = fh.read()
    return unpack(data, 8 * len(data))


def cmd_capacity(args) -> int:
    res = solve_lambda(_constraint(args))
    print(json.dumps({"constraint": str(_constraint(args)), "lambda": res.lam, "capacity": res.capacity, "residual": res.residual}))
    return EXIT_OK


def cmd_optimize(args) -> int:
    c = _constraint(args)
    prof = optimize_rate(c, args.j)
    print(json.dumps({"constraint": str(c), "j_star": prof.j_star, "p_star": prof.p_star,
                      "rate": prof.rate, "efficiency": round(prof.efficiency, 4)}))
    return EXIT_OK


def cmd_encode(args) -> int:
    c = _constraint(args)
    if args.algo == "il" and (args.j is not None or args.p is not None):
        raise UsageError("--j/--p apply only to --algo ss")
    u = _read_bits(args.infile)
    if args.algo == "ss":
        cont = full_encode(u, _sliding_config(args, c))
    else:
        cont = il_encode(u, c)
    with open(args.outfile, "wb") as fh:
        fh.write(cont.to_bytes())
    rate = len(u) / len(cont.payload) if len(cont.payload) else 0.0
    print(f"encoded {len(u)} bits into {len(cont.payload)} constrained bits {c} (rate {rate:.4f})",
          file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    with open(args.infile, "rb") as fh:
        cont = EncodedContainer.from_bytes(fh.read())
    u = full_decode(cont) if cont.algorithm == "ss" else il_decode(cont)
    if len(u) % 8:
        raise DKCodeError(f"decoded {len(u)} bits, not a whole number of bytes")
    with open(args.outfile, "wb") as fh:
        fh.write(np.packbits(u.bits).tobytes())
    return EXIT_OK


def cmd_simulate(args) -> int:
    c = _constraint(args)
    if args.algo == "ss":
        config = _sliding_config(args, c)
    elif args.j is not None or args.p is not None:
        raise UsageError("--j/--p apply only to --algo ss")
    else:
        config = InterleavedCode.for_constraint(c)
    report = estimate_rate(config, args.bits, args.seed)
    if args.json:
        print(report.to_json())
    else:
        print(f"{report.constraint} {report.algorithm}: empirical {report.empirical_rate:.6f}, "
              f"analytic {report.analytic_rate:.6f}, capacity {report.capacity:.6f}, "
              f"efficiency {report.efficiency:.4f} (n={report.n_bits}, seed={report.seed})")
    return EXIT_OK


def cmd_factor(args) -> int:
    code = InterleavedCode.for_constraint(_constraint(args))
    plan = code.plan
    print(f"{plan.constraint}: k-d+1 = {plan.size} = {' * '.join(map(str, plan.primes))}")
    print(f"H(z) = {plan.describe()}")
    if plan.binary_delay is not None:
        print(f"power-of-two form delay exponent: {plan.binary_delay}")
    print(f"transformers: {plan.n_transformers} (vs {plan.constraint.span} for one per branching state)")
    for p, eta, chain in zip(plan.primes, plan.strides, code.chain.biases):
        print(f"  factor P={p} stride={eta}: biases " + ", ".join(f"{b:.6f}" for b in chain))
    for word, phrase in code.codebook.entries():
        print(f"  {word:>{plan.n_transformers}}  ->  {phrase}")
    return EXIT_OK


def cmd_table4(args) -> int:
    rows = reproduce_table4()
    if args.csv:
        sys.stdout.write(table4_csv(rows))
    elif args.json:
        print(table4_json(rows))
    else:
        print(f"{'(d,k)':>8} {'C':>7} {'SS(0)%':>8} {'SS(1)%':>8} {'SS(j*)%':>8} {'j*':>3}")
        for r in rows:
            print(f"{f'({r.d},{r.k})':>8} {r.capacity:7.4f} {r.stuffing_efficiency:8.2f} "
                  f"{r.flipping_efficiency:8.2f} {r.sliding_efficiency:8.2f} {r.j_star:3d}")
    return EXIT_OK


def cmd_check(args) -> int:
    c = _constraint(args)
    with open(args.infile, "rb") as fh:
        data = fh.read()
    bits = EncodedContainer.from_bytes(data).payload if is_container(data) else unpack(data, 8 * len(data))
    report = validate_constraint(bits, c)
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkcodes", description="(d,k) constrained code workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def dk(p, k_required=True):
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--k", required=k_required, help="integer or 'inf'")

    p = sub.add_parser("capacity", help="root lambda and capacity of H_{d,k}(z) = 1")
    dk(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("optimize", help="rate-maximizing (j, p) for symbol sliding")
    dk(p)
    p.add_argument("--j", type=int)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("encode", help="encode a file into a container")
    p.add_argument("--algo", choices=("ss", "il"), required=True)
    dk(p)
    p.add_argument("--j", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a container back to the original file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo rate estimate")
    p.add_argument("--algo", choices=("ss", "il"), required=True)
    dk(p)
    p.add_argument("--j", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--bits", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("factor", help="factorization plan, biases and codebook")
    dk(p)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("table4", help="capacity/efficiency table for the reference constraints")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_table4)

    p = sub.add_parser("check", help="validate a container payload or raw bit file")
    p.add_argument("--in", dest="infile", required=True)
    dk(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError, DomainError, NotFactorableError) as exc:
        print(f"dkcodes {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DKCodeError, OSError) as exc:
        print(f"dkcodes {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"dkcodes {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
