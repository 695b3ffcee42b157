"""Command-line front end.

Subcommands mirror the library: ``x``, ``s`` and ``f`` print one element,
``fib`` prints the index sets of the generic Fibonacci polynomial, ``verify``
runs the identity and positivity suites, and ``bench`` times cold-cache
element computation.  Exit codes are stable for CI use: 0 success, 1 failed
verification or internal error, 2 usage/domain/scale errors.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import fibpoly, lattice
from .engine import ClusterEngine
from .errors import ClusterA11Error, DomainError, EvalAtZeroError, ParseError, ScaleError
from .laurent import LaurentPoly


def _parse_eval(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError(f"--eval expects 'a,b', got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise DomainError(f"--eval expects two integers, got {text!r}") from None
    if a == 0 or b == 0:
        raise DomainError("--eval coordinates must be nonzero")
    return a, b


def _print_element(value: LaurentPoly, fmt: str, eval_at: str | None) -> None:
    if eval_at is not None:
        a, b = _parse_eval(eval_at)
        result = value.eval_int(a, b)
        print(result.numerator if result.denominator == 1 else result)
        return
    print(value.to_json() if fmt == "json" else value.format_human())


def _cmd_element(args: argparse.Namespace) -> int:
    engine = ClusterEngine()
    value = {"x": engine.x, "s": engine.s, "f": engine.f}[args.kind](args.index)
    _print_element(value, args.format, args.eval)
    return 0


def _cmd_fib(args: argparse.Namespace) -> int:
    fp = fibpoly.fib_enumerate(args.n) if args.oracle else fibpoly.fib_recurrence(args.n)
    print(fp.to_json())
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    engine = ClusterEngine()
    identities = engine.verify_identities(args.max)
    positivity = engine.positivity_scan(args.max)
    for line in identities.summary_lines():
        print(line)
    for line in positivity.summary_lines():
        print(line)
    ok = identities.all_passed and positivity.all_passed
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    n = args.n
    if n < 0:
        raise DomainError("bench needs a nonnegative family index")
    print(f"kernel={lattice.kernel_name()} n={n}")
    t0 = time.perf_counter()
    x_val = ClusterEngine().x(n + 3)
    t1 = time.perf_counter()
    s_val = ClusterEngine().s(n)
    t2 = time.perf_counter()
    print(f"x({n + 3}): {x_val.term_count()} terms in {1000 * (t1 - t0):.1f} ms")
    print(f"s({n}): {s_val.term_count()} terms in {1000 * (t2 - t1):.1f} ms")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cluster-a11",
        description="Exact computation in the rank-2 affine cluster algebra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for kind, blurb in (
        ("x", "a cluster variable x_m (any integer m)"),
        ("s", "a semicanonical generator s_n (n >= -1)"),
        ("f", "a member f_N of the Fibonacci Laurent family (N >= 0)"),
    ):
        p = sub.add_parser(kind, help=f"print {blurb}")
        p.add_argument("index", type=int)
        p.add_argument("--format", choices=("human", "json"), default="human")
        p.add_argument("--eval", metavar="A,B", help="print the exact value at x1=A, x2=B instead")
        p.set_defaults(func=_cmd_element, kind=kind)

    p = sub.add_parser("fib", help="print the index sets of the generic Fibonacci polynomial")
    p.add_argument("n", type=int)
    p.add_argument("--oracle", action="store_true",
                   help="use the brute-force enumeration (N <= 25) instead of the recurrence")
    p.set_defaults(func=_cmd_fib)

    p = sub.add_parser("verify", help="run the identity and positivity suites")
    p.add_argument("--max", type=int, default=50, help="largest n to verify (default 50)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="time cold-cache computation of x(n+3) and s(n)")
    p.add_argument("--n", type=int, default=100, help="family index (default 100)")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ScaleError, EvalAtZeroError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ClusterA11Error as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
