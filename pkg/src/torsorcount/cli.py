"""Command-line interface: ``torsorcount {count,constants,verify,report}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import __version__, constants, cox, enumeration
from .analysis import convergence_table, fit_two_term, residual_growth
from .cox import DivisorTag

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

METADATA = {
    "log": "natural",
    "height": "max(|a^2x|,|b^2x|,|c^2x|,|z^2x^3|,|ay|,|by|,|cy|)",
    "ratio": "count / (B * log(B))",
    "residual_per_B": "(count - c * B * log(B)) / B",
    "elapsed_seconds": "wall-clock seconds",
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    divisor: DivisorTag = DivisorTag.D1
    bounds: tuple[int, ...] = ()
    method: str = "fast"
    prime_bound: int = 10**6
    tol: float = 1e-4
    shards: int = 1
    fmt: str = "csv"
    out: str | None = None
    timing: bool = True
    max_prime: int = 100
    oracle_bound: int = 200

    def __post_init__(self) -> None:
        if any(b < 1 for b in self.bounds):
            raise UsageError("every bound must be >= 1")
        if any(b2 <= b1 for b1, b2 in zip(self.bounds, self.bounds[1:])):
            raise UsageError("bounds must be strictly increasing")
        if self.method not in enumeration.METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.method == "oracle" and self.bounds and self.bounds[-1] > enumeration.MAX_ORACLE_BOUND:
            raise UsageError(f"oracle supports B <= {enumeration.MAX_ORACLE_BOUND}")
        if self.bounds and self.bounds[-1] > enumeration.MAX_FAST_BOUND:
            raise UsageError(f"bounds above {enumeration.MAX_FAST_BOUND} are not supported")
        if self.prime_bound < 2:
            raise UsageError("--prime-bound must be >= 2")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.shards < 1:
            raise UsageError("--shards must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if not 2 <= self.max_prime <= constants.MAX_FP_PRIME:
            raise UsageError("--max-prime must lie in [2, 10000]")
        if not 1 <= self.oracle_bound <= enumeration.MAX_ORACLE_BOUND:
            raise UsageError(f"--oracle-bound must lie in [1, {enumeration.MAX_ORACLE_BOUND}]")


def _parse_bounds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"cannot parse bounds {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    if v is None:
        return ""
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)  # 'nan', 'inf': strict JSON has no non-finite numbers
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    return v


def _emit(cfg: RunConfig, command: str, rows: list[dict], summary: dict | None = None) -> None:
    meta = dict(METADATA, command=command, version=__version__)
    if cfg.fmt == "json":
        doc = {"command": command, "metadata": meta, "rows": rows}
        if summary is not None:
            doc["summary"] = summary
        text = json.dumps(_json_safe(doc), indent=2, sort_keys=True, default=str, allow_nan=False) + "\n"
    else:
        buf = io.StringIO()
        for k in sorted(meta):
            buf.write(f"# {k}: {meta[k]}\n")
        fields = list(rows[0]) if rows else []
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fields])
        for k, v in (summary or {}).items():
            buf.write(f"# {k}: {_fmt(v)}\n")
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_count(cfg: RunConfig) -> int:
    if not cfg.bounds:
        raise UsageError("--bounds is required")
    results = enumeration.count_grid(cfg.divisor, cfg.bounds, cfg.method, cfg.shards)
    rows = []
    for r in results:
        row = r.as_row()
        if not cfg.timing:
            row["elapsed_seconds"] = None
        rows.append(row)
    _emit(cfg, "count", rows)
    return EXIT_OK


def cmd_constants(cfg: RunConfig) -> int:
    br = constants.predicted_constant(cfg.divisor, cfg.prime_bound, cfg.tol)
    _emit(cfg, "constants", [br.as_dict()])
    return EXIT_OK


def _verify_checks(cfg: RunConfig) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = []

    def grading() -> tuple[bool, str]:
        bad = cox.grading_violations(cox.GRADING)
        return not bad, "all degrees match" if not bad else "wrong degree: " + ",".join(bad)

    checks.append(("grading", grading))

    primes = [int(p) for p in constants.primes_up_to(cfg.max_prime)]
    for d in DivisorTag:
        def densities(d=d) -> tuple[bool, str]:
            bad = [p for p in primes if constants.local_density(d, p).value != constants.density_formula(d, p)]
            return not bad, f"p <= {cfg.max_prime}" + (f"; mismatch at {bad}" if bad else "")

        def brute(d=d) -> tuple[bool, str]:
            ps = [p for p in (2, 3, 5) if p <= cfg.max_prime]
            bad = [p for p in ps if constants.fp_count(d, p) != constants.fp_count_bruteforce(d, p)]
            return not bad, f"p in {ps}" + (f"; mismatch at {bad}" if bad else "")

        def oracle(d=d) -> tuple[bool, str]:
            bs = list(range(1, cfg.oracle_bound + 1))
            ref = enumeration.oracle_counts(d, bs)
            bad = [r.bound for r in ref if enumeration.count(d, r.bound).count != r.count]
            return not bad, f"B <= {cfg.oracle_bound}" + (f"; mismatch at {bad[:5]}" if bad else "")

        def volume(d=d) -> tuple[bool, str]:
            q = constants.archimedean_volume_quadrature(d, cfg.tol)
            exact, _ = constants.archimedean_volume_regions(d)
            gap = abs(q - float(exact))
            return gap <= cfg.tol, f"quadrature {q!r} vs regions {exact}"

        checks += [
            (f"densities_{d.value}", densities),
            (f"fp_bruteforce_{d.value}", brute),
            (f"oracle_{d.value}", oracle),
            (f"volume_{d.value}", volume),
        ]

    def alpha() -> tuple[bool, str]:
        a = constants.alpha()
        return a == Fraction(1, 6), f"alpha = {a}"

    checks.append(("alpha", alpha))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    rows = []
    ok_all = True
    for name, check in _verify_checks(cfg):
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= ok
        rows.append({"check": name, "status": "pass" if ok else "fail", "detail": detail})
    _emit(cfg, "verify", rows, {"all_passed": ok_all})
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_report(cfg: RunConfig) -> int:
    if not cfg.bounds:
        raise UsageError("--bounds is required")
    results = enumeration.count_grid(cfg.divisor, cfg.bounds, cfg.method, cfg.shards)
    br = constants.predicted_constant(cfg.divisor, cfg.prime_bound, cfg.tol)
    table = convergence_table(results, br.prediction)
    summary: dict = {
        "divisor": cfg.divisor.value,
        "prediction": br.prediction,
        "prediction_low": br.prediction_low,
        "prediction_high": br.prediction_high,
        "final_relative_gap": table[-1].relative_gap,
        "residual_growth": residual_growth(table),
    }
    if len(results) >= 3:
        c_hat, c2_hat = fit_two_term(results)
        summary.update(c_hat=c_hat, c2_hat=c2_hat, c_hat_relative_gap=c_hat / br.prediction - 1.0)
    _emit(cfg, "report", [r.as_row() for r in table], summary)
    return EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "constants": cmd_constants,
    "verify": cmd_verify,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--divisor", choices=["D1", "D2"], default="D1")
    common.add_argument("--bounds", default="", help="comma-separated list of height bounds B")
    common.add_argument("--method", choices=list(enumeration.METHODS), default="fast")
    common.add_argument("--prime-bound", type=int, default=10**6, help="Euler product over p <= P")
    common.add_argument("--tol", type=float, default=1e-4, help="quadrature tolerance")
    common.add_argument("--shards", type=int, default=1, help="parallel shards of the outer loop")
    common.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--no-timing", dest="timing", action="store_false",
                        help="leave elapsed_seconds empty for byte-reproducible output")
    common.add_argument("--max-prime", type=int, default=100, help="verify: densities for p <= this")
    common.add_argument("--oracle-bound", type=int, default=200, help="verify: oracle check for B <= this")

    parser = argparse.ArgumentParser(prog="torsorcount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("count", parents=[common], help="exact counts N_i(B)")
    sub.add_parser("constants", parents=[common], help="factors of the predicted constant")
    sub.add_parser("verify", parents=[common], help="run the invariant checks")
    sub.add_parser("report", parents=[common], help="counts vs prediction with a two-term fit")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            divisor=DivisorTag.parse(args.divisor),
            bounds=_parse_bounds(args.bounds),
            method=args.method,
            prime_bound=args.prime_bound,
            tol=args.tol,
            shards=args.shards,
            fmt=args.fmt,
            out=args.out,
            timing=args.timing,
            max_prime=args.max_prime,
            oracle_bound=args.oracle_bound,
        )
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"torsorcount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError) as exc:
        print(f"torsorcount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except constants.QuadratureError as exc:
        print(f"torsorcount: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
