"""Command-line front end: ``gibbsdisc {estimate,verify,table}``.

Exit status: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import __version__
from .estimators import discovery_profile, pd_correction_deltas
from .gibbs import PDParams, SampleSummary
from .report import Report, rows_to_csv
from .simulation import DEFAULT_MAX_M, enumerate_exact, monte_carlo

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

SUM_TO_ONE_TOL = 1e-10
ORACLE_TOL = 1e-12
Z_LIMIT = 4.0


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------


def parse_dataset(text: str, mode: str = "auto") -> tuple[SampleSummary, str | None]:
    """Parse a frequency file.

    One record per line: a single integer (a species multiplicity) or
    ``size,count``.  Blank lines and ``#`` comments are skipped; a
    ``# label: NAME`` comment names the dataset.
    """
    label = None
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("label:"):
                label = body.split(":", 1)[1].strip()
            continue
        fields = [f for f in line.replace(",", " ").replace(";", " ").split()]
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise InputError(f"line {lineno}: expected integers, got {raw!r}") from None
        if any(v <= 0 for v in values):
            raise InputError(f"line {lineno}: sizes and counts must be positive")
        records.append((lineno, values))
    if not records:
        raise InputError("no data records found")
    widths = {len(v) for _, v in records}
    if mode == "auto":
        if widths == {1}:
            mode = "multiplicities"
        elif widths == {2}:
            mode = "counts"
        else:
            raise InputError("cannot auto-detect format: mixed column counts")
    want = 1 if mode == "multiplicities" else 2
    for lineno, v in records:
        if len(v) != want:
            raise InputError(f"line {lineno}: expected {want} column(s) in {mode} mode")
    if mode == "multiplicities":
        sample = SampleSummary.from_multiplicities(v[0] for _, v in records)
    else:
        sample = SampleSummary.from_counts([(v[0], v[1]) for _, v in records])
    return sample, label


def parse_int_list(spec: str) -> list[int]:
    """``"0:5"`` (inclusive), ``"1,3,7"`` or mixtures such as ``"0,2:4"``."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise InputError(f"empty range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(part))
    return sorted(set(out))


def _params(args) -> PDParams:
    try:
        return PDParams(args.alpha, args.theta)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load(args) -> tuple[SampleSummary, str | None]:
    try:
        text = Path(args.input).read_text(encoding="utf-8") if args.input != "-" else sys.stdin.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from None
    try:
        return parse_dataset(text, args.input_format)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _dataset_dict(sample: SampleSummary, label) -> dict:
    return {"label": label, "n": sample.n, "j": sample.j, "counts": [list(c) for c in sample.counts]}


def _k_list(args, kmax: int) -> list[int]:
    if not args.k:
        return list(range(0, kmax + 1))
    ks = parse_int_list(args.k)
    bad = [k for k in ks if k < 0 or k > kmax]
    if bad:
        raise InputError(f"k values {bad} outside [0, n+m={kmax}]")
    return ks


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


def _profile_block(params, sample, m, ks, *, split: bool, legacy: bool) -> dict:
    prof = discovery_profile(params, sample, m)
    leg = discovery_profile(params, sample, m, legacy=True) if legacy else None
    deltas = pd_correction_deltas(params, sample, m) if legacy else None
    rows = []
    for k in ks:
        v = prof.values[k]
        row = {"k": k, "total": v.total}
        if split:
            row["old"] = v.old_part
            row["new"] = v.new_part
        if legacy:
            row["legacy"] = leg.values[k].total
            row["delta"] = float(deltas[k]) if k <= m else 0.0
        rows.append(row)
    block = {"m": m, "flag": prof.flag, "method": prof.method, "model": prof.model_descriptor, "rows": rows}
    return block


def _render_text(report: Report) -> str:
    lines = [f"# {report.command}  {report.dataset['counts']}  n={report.dataset['n']} j={report.dataset['j']}"]
    for prof in report.profiles:
        lines.append(f"# m={prof['m']}  {prof['model']}  ({prof['flag']}, {prof['method']})")
        cols = list(prof["rows"][0]) if prof["rows"] else ["k", "total"]
        lines.append("  ".join(f"{c:>12}" for c in cols))
        for row in prof["rows"]:
            lines.append("  ".join(f"{row[c]:>12d}" if isinstance(row[c], int) else f"{row[c]:>12.6f}" for c in cols))
    if report.verification:
        ver = report.verification
        for key, val in ver.items():
            if key == "z_scores":
                continue
            lines.append(f"{key}: {val}")
        if "z_scores" in ver:
            lines.append("k  z")
            for k, z in ver["z_scores"].items():
                lines.append(f"{k}  {z:+.3f}")
    return "\n".join(lines) + "\n"


def _emit(report: Report, fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        if report.profiles:
            text = report.to_csv()
        else:
            flat = {key: val for key, val in (report.verification or {}).items() if key != "z_scores"}
            for k, z in (report.verification or {}).get("z_scores", {}).items():
                flat[f"z_{k}"] = z
            text = rows_to_csv([flat])
    else:
        text = _render_text(report)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    params = _params(args)
    sample, label = _load(args)
    if args.m < 0:
        raise InputError("--m must be nonnegative")
    ks = _k_list(args, sample.n + args.m)
    report = Report(
        command="estimate",
        parameters={"alpha": args.alpha, "theta": args.theta, "m": args.m, "k": ks,
                    "legacy": args.legacy, "split": args.split},
        version=__version__,
        dataset=_dataset_dict(sample, label),
        profiles=[_profile_block(params, sample, args.m, ks, split=args.split, legacy=args.legacy)],
    )
    _emit(report, args.format, args.output)
    return EXIT_OK


def cmd_table(args) -> int:
    params = _params(args)
    sample, label = _load(args)
    ms = parse_int_list(args.m)
    if not ms or min(ms) < 0:
        raise InputError("--m needs a nonempty list of nonnegative integers")
    ks = parse_int_list(args.k) if args.k else list(range(0, sample.n + max(ms) + 1))
    if any(k < 0 for k in ks):
        raise InputError("k values must be nonnegative")
    profiles = []
    for m in ms:
        prof = discovery_profile(params, sample, m)
        # k beyond n+m is structurally impossible
        rows = [{"k": k, "total": prof.values[k].total if k in prof.values else 0.0} for k in ks]
        profiles.append({"m": m, "flag": prof.flag, "method": prof.method, "model": prof.model_descriptor,
                         "rows": rows})
    report = Report(
        command="table",
        parameters={"alpha": args.alpha, "theta": args.theta, "m": ms, "k": ks},
        version=__version__,
        dataset=_dataset_dict(sample, label),
        profiles=profiles,
    )
    _emit(report, args.format, args.output)
    return EXIT_OK


def _verify_sum_to_one(params, sample, m, legacy) -> dict:
    prof = discovery_profile(params, sample, m, legacy=legacy)
    mass = prof.total_mass()
    residual = abs(1.0 - mass)
    out = {"mode": "sum_to_one", "formula": prof.flag, "total_mass": mass, "residual": residual,
           "tolerance": SUM_TO_ONE_TOL, "passed": residual < SUM_TO_ONE_TOL}
    if legacy:
        out["delta_sum"] = math.fsum(pd_correction_deltas(params, sample, m))
    return out


def _verify_oracle(params, sample, m) -> dict:
    if m > DEFAULT_MAX_M:
        raise InputError(f"oracle mode needs m <= {DEFAULT_MAX_M}")
    oracle = enumerate_exact(params, sample, m)
    worst = 0.0
    for method in ("closed_form", "general"):
        prof = discovery_profile(params, sample, m, method=method)
        for k, v in prof.values.items():
            if k == 0:
                worst = max(worst, abs(v.total - oracle.p_new))
                continue
            worst = max(worst, abs(v.old_part - oracle.old.get(k, 0.0)), abs(v.new_part - oracle.new.get(k, 0.0)),
                        abs(v.total - oracle.total(k)))
    return {"mode": "oracle", "max_abs_deviation": worst, "tolerance": ORACLE_TOL, "passed": worst < ORACLE_TOL}


def _verify_monte_carlo(params, sample, m, replicates, seed, threads) -> dict:
    prof = discovery_profile(params, sample, m)
    res = monte_carlo(params, sample, m, replicates, seed, threads=threads)
    z = res.z_scores(lambda k: prof.values[k].total)
    worst = max(abs(v) for v in z.values())
    return {"mode": "monte_carlo", "replicates": replicates, "seed": seed, "max_abs_z": worst, "z_limit": Z_LIMIT,
            "passed": worst <= Z_LIMIT, "z_scores": {str(k): v for k, v in z.items()}}


def cmd_verify(args) -> int:
    params = _params(args)
    sample, label = _load(args)
    if args.m < 0:
        raise InputError("--m must be nonnegative")
    if args.replicates < 1:
        raise InputError("--replicates must be positive")
    if args.mode == "sum_to_one":
        ver = _verify_sum_to_one(params, sample, args.m, args.legacy)
    elif args.mode == "oracle":
        ver = _verify_oracle(params, sample, args.m)
    else:
        ver = _verify_monte_carlo(params, sample, args.m, args.replicates, args.seed, args.threads)
    report = Report(
        command="verify",
        parameters={"alpha": args.alpha, "theta": args.theta, "m": args.m, "mode": args.mode,
                    "legacy": args.legacy, "replicates": args.replicates},
        version=__version__,
        dataset=_dataset_dict(sample, label),
        seed=args.seed if args.mode == "monte_carlo" else None,
        verification=ver,
    )
    _emit(report, args.format, args.output)
    return EXIT_OK if ver["passed"] else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gibbsdisc", description="Discovery-probability estimates under PD(alpha, theta) priors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, m_type=int):
        p.add_argument("input", help="frequency file ('-' for stdin)")
        p.add_argument("--alpha", type=float, required=True, help="discount in (0, 1)")
        p.add_argument("--theta", type=float, required=True, help="strength, > -alpha")
        p.add_argument("--m", type=m_type, required=True)
        p.add_argument("--input-format", choices=["auto", "multiplicities", "counts"], default="auto")
        p.add_argument("--output", help="write report here instead of stdout")

    p = sub.add_parser("estimate", help="[m:k]-discovery profile")
    common(p)
    p.add_argument("--k", help="k values, e.g. '0:5' or '1,2,4' (default 0..n+m)")
    p.add_argument("--legacy", action="store_true", help="also report the FLP 2012 values and deltas")
    p.add_argument("--split", action="store_true", help="report old/new species parts")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="check estimates against identities, enumeration or simulation")
    common(p)
    p.add_argument("--mode", choices=["sum_to_one", "oracle", "monte_carlo"], default="sum_to_one")
    p.add_argument("--replicates", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--legacy", action="store_true", help="check the FLP 2012 formula instead (sum_to_one)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="grid of estimates over several m")
    common(p, m_type=str)
    p.add_argument("--k", help="k values (default 0..n+max(m))")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"gibbsdisc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
