"""Command-line front end.

Subcommands: thresholds, figure1, recover, uncertainty, spark, montecarlo,
mub, conditions. Global flags: --seed, --out, --threads, --config. A config
file holds "key = value" lines; explicit flags override it. Exit codes:
0 success, 2 input error, 3 I/O error, 4 combinatorial guard exceeded.

Every output file starts with a comment header carrying the resolved
configuration and master seed; re-running the recorded command reproduces
the file byte for byte apart from the generated_at line.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone

from .common import GuardExceeded
from .dictionaries import (
    ConcatDictionary,
    build_dirac_fourier,
    build_mub_concat,
    build_random_pair,
    load_dictionary,
    spectral_norm,
)
from .probabilistic import (
    RandomSupportSpec,
    check_recovery_conditions,
    randomized_recovery_experiment,
    scaling_condition_report,
    sigma_min_tail_estimate,
    tail_bound_params,
    two_onb_robust_thresholds,
)
from .solvers import (
    basis_pursuit,
    exact_recovery,
    load_signal,
    omp,
    p0_bruteforce,
    support_of,
)
from .spark import spark_bruteforce
from .thresholds import (
    CoherenceTriple,
    orthonormal_parts,
    sweep_csv_lines,
    threshold_report,
    threshold_sweep_table,
)
from .uncertainty import exhaustive_uncertainty_scan, scan_csv_lines

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_GUARD = 4

# flags each subcommand accepts from a config file (value-taking / boolean)
COMMAND_FLAGS = {
    "thresholds": {"mu", "mu-a", "mu-b", "seed", "out", "threads"},
    "figure1": {"mu", "grid", "seed", "out", "threads"},
    "recover": {"dict-file", "signal-file", "solver", "max-k", "tol",
                "max-iter", "seed", "out", "threads"},
    "uncertainty": {"dict", "d", "p", "split", "atoms-a", "atoms-b",
                    "dict-file", "max", "max-na", "max-nb", "seed", "out",
                    "threads"},
    "spark": {"dict", "d", "p", "split", "atoms-a", "atoms-b", "dict-file",
              "max-check", "seed", "out", "threads"},
    "montecarlo": {"dict", "d", "p", "split", "atoms-a", "atoms-b",
                   "dict-file", "fixed-a", "nb", "trials", "model", "s",
                   "gamma", "seed", "out", "threads"},
    "mub": {"p", "split", "seed", "out", "threads"},
    "conditions": {"dict", "d", "p", "split", "atoms-a", "atoms-b",
                   "dict-file", "na", "nb", "s", "gamma", "seed", "out",
                   "threads"},
}
BOOLEAN_FLAGS = {"report-scaling"}
for _cmd in ("mub",):
    COMMAND_FLAGS[_cmd] = COMMAND_FLAGS[_cmd] | BOOLEAN_FLAGS


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


def config_as_argv(values: dict[str, str], command: str) -> list[str]:
    argv: list[str] = []
    allowed = COMMAND_FLAGS.get(command, set())
    for key, val in values.items():
        if key not in allowed:
            continue
        if key in BOOLEAN_FLAGS:
            if val.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
            elif val.lower() not in ("0", "false", "no", "off"):
                raise ValueError(f"config key {key}: boolean expected, got {val!r}")
        else:
            argv.extend([f"--{key}", val])
    return argv


def add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker cap for batch operations")
    sub.add_argument("--config", default=None, help=argparse.SUPPRESS)


def add_dict_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dict", choices=["dirac-fourier", "mub", "random"],
                     default=None, help="built-in dictionary family")
    sub.add_argument("--d", type=int, default=None, help="ambient dimension")
    sub.add_argument("--p", type=int, default=None, help="prime dimension (mub)")
    sub.add_argument("--split", type=int, default=1,
                     help="bases in part A (mub)")
    sub.add_argument("--atoms-a", type=int, default=None,
                     help="part A atom count (random)")
    sub.add_argument("--atoms-b", type=int, default=None,
                     help="part B atom count (random)")
    sub.add_argument("--dict-file", default=None, help="load dictionary from file")


def resolve_dictionary(args) -> ConcatDictionary:
    if args.dict_file:
        obj = load_dictionary(args.dict_file)
        if not isinstance(obj, ConcatDictionary):
            raise ValueError("this command needs a concatenated pair "
                             "(file header with Na > 0)")
        return obj
    if args.dict == "dirac-fourier":
        if args.d is None:
            raise ValueError("--d required for the dirac-fourier family")
        return build_dirac_fourier(args.d)
    if args.dict == "mub":
        if args.p is None:
            raise ValueError("--p required for the mub family")
        return build_mub_concat(args.p, args.split)
    if args.dict == "random":
        if args.d is None or args.atoms_a is None or args.atoms_b is None:
            raise ValueError("--d, --atoms-a, --atoms-b required for random pairs")
        return build_random_pair(args.d, args.atoms_a, args.atoms_b, args.seed)
    raise ValueError("choose a dictionary with --dict or --dict-file")


def resolved_config(args, command: str) -> dict[str, str]:
    skip = {"config", "func", "command"}
    out = {"command": command}
    for key, val in sorted(vars(args).items()):
        if key in skip or val is None:
            continue
        out[key.replace("_", "-")] = str(val)
    return out


def emit(lines: list[str], config: dict[str, str], out_path: str | None) -> None:
    header = [f"# {k} = {v}" for k, v in config.items()]
    header.append(f"# generated_at = {datetime.now(timezone.utc).isoformat()}")
    text = "\n".join(header + lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def fmt(v: float) -> str:
    return f"{v:.15g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_thresholds(args) -> int:
    triple = CoherenceTriple(args.mu_a, args.mu_b, args.mu)
    rep = threshold_report(triple)
    p0_rows = [
        ("general_p0", rep.general_p0),
        ("pair_p0", rep.pair_p0),
    ]
    if rep.pair_symmetric_p0 is not None:
        p0_rows.append(("pair_p0_symmetric", rep.pair_symmetric_p0))
    if orthonormal_parts(triple):
        p0_rows.append(("two_onb_p0", rep.two_onb_p0))
    bp_rows = [("pair_bp_omp", rep.pair_bp_omp)]
    if orthonormal_parts(triple):
        bp_rows.append(("two_onb_bp", rep.two_onb_bp))
        bp_rows.append(("two_onb_refined", rep.two_onb_refined))
    lines = [f"muA = {fmt(triple.mu_a)}, muB = {fmt(triple.mu_b)}, "
             f"mu = {fmt(triple.mu)}", ""]
    best_p0 = max(v for _, v in p0_rows)
    best_bp = max(v for _, v in bp_rows)
    lines.append("uniqueness thresholds (k < value):")
    for name, v in p0_rows:
        mark = "  <-- dominant" if v == best_p0 else ""
        lines.append(f"  {name:<20}{fmt(v)}{mark}")
    lines.append("bp/omp recovery thresholds (k < value):")
    for name, v in bp_rows:
        mark = "  <-- dominant" if v == best_bp else ""
        lines.append(f"  {name:<20}{fmt(v)}{mark}")
    lines.append("")
    lines.append(f"minimizer: x_boundary = {fmt(rep.x_boundary)}, "
                 f"x_stationary = {fmt(rep.x_stationary)}, "
                 f"x_solution = {fmt(rep.x_solution)}")
    lines.append(f"case_indicator = {fmt(rep.case_indicator)}")
    emit(lines, resolved_config(args, "thresholds"), args.out)
    return EXIT_OK


def cmd_figure1(args) -> int:
    rows = threshold_sweep_table(args.mu, args.grid)
    emit(sweep_csv_lines(rows), resolved_config(args, "figure1"), args.out)
    return EXIT_OK


def cmd_recover(args) -> int:
    obj = load_dictionary(args.dict_file)
    split = obj.n_a if isinstance(obj, ConcatDictionary) else obj.n
    signal = load_signal(args.signal_file, split)
    entries = obj.full_matrix() if isinstance(obj, ConcatDictionary) else obj.entries
    if signal.coefficients.size != entries.shape[1]:
        raise ValueError("signal length does not match the dictionary")
    y = entries @ signal.coefficients
    truth = signal.coefficients
    lines = []
    if args.solver == "p0":
        max_k = args.max_k if args.max_k is not None else signal.support.size
        res = p0_bruteforce(obj, y, max_k)
        ok = exact_recovery(res.coefficients, truth)
        lines.append("solver = P0")
        lines.append(f"success = {ok}")
        lines.append(f"unique = {res.unique} (supports fitting at size "
                     f"{res.support.size}: {res.fits})")
        lines.append(f"support_a = {res.support.in_a}")
        lines.append(f"support_b = {res.support.in_b}")
        lines.append(f"residual = {fmt(res.residual_norm)}")
    else:
        if args.solver == "bp":
            outcome = basis_pursuit(obj, y, tol=args.tol,
                                    max_iter=args.max_iter, truth=truth)
        else:
            outcome = omp(obj, y, residual_tol=args.tol, truth=truth)
        sup = support_of(outcome.recovered, split)
        lines.append(f"solver = {outcome.solver}")
        lines.append(f"success = {outcome.success}")
        lines.append(f"iterations = {outcome.iterations}")
        lines.append(f"support_a = {sup.in_a}")
        lines.append(f"support_b = {sup.in_b}")
        lines.append(f"residual = {fmt(outcome.residual_norm)}")
    emit(lines, resolved_config(args, "recover"), args.out)
    return EXIT_OK


def cmd_uncertainty(args) -> int:
    pair = resolve_dictionary(args)
    max_na = args.max_na if args.max_na is not None else args.max
    max_nb = args.max_nb if args.max_nb is not None else args.max
    if max_na is None or max_nb is None:
        raise ValueError("give --max or both --max-na and --max-nb")
    rows = exhaustive_uncertainty_scan(pair, max_na, max_nb)
    lines = scan_csv_lines(rows)
    worst = [r for r in rows if r.violates]
    lines.append(f"# violations = {len(worst)}")
    emit(lines, resolved_config(args, "uncertainty"), args.out)
    return EXIT_OK


def cmd_spark(args) -> int:
    pair = resolve_dictionary(args)
    cert = spark_bruteforce(pair, args.max_check)
    lines = [f"status = {cert.status}"]
    if cert.spark is not None:
        lines.append(f"spark = {cert.spark}")
        lines.append(f"witness = {' '.join(str(i) for i in cert.witness)}")
    lines.append(f"checked_up_to = {cert.checked_up_to}")
    lines.append(f"bound_general = {fmt(cert.bounds.general)}")
    if cert.bounds.two_onb is not None:
        lines.append(f"bound_two_onb = {fmt(cert.bounds.two_onb)}")
    if cert.bounds.pair is not None:
        lines.append(f"bound_pair = {fmt(cert.bounds.pair)}")
    lines.append(f"note = {cert.describe()}")
    emit(lines, resolved_config(args, "spark"), args.out)
    return EXIT_OK


def parse_index_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(t) for t in text.replace(",", " ").split())


def cmd_montecarlo(args) -> int:
    if args.trials < 1:
        raise ValueError("need at least one trial")
    pair = resolve_dictionary(args)
    fixed = parse_index_list(args.fixed_a)
    spec = RandomSupportSpec(fixed_a=fixed, nb=args.nb, seed=args.seed)
    workers = args.threads or os.cpu_count() or 1
    tail = sigma_min_tail_estimate(pair, spec, args.trials, s=args.s,
                                   gamma=args.gamma, workers=workers)
    result = randomized_recovery_experiment(pair, spec, args.trials,
                                            model=args.model, workers=workers)
    lines = result.csv_lines()
    lines.append(f"# sigma_min_tail_prob = {fmt(tail.empirical_prob)}")
    lines.append(f"# reference_n_minus_s = {fmt(tail.reference_prob)}")
    force = "in force" if tail.bound_in_force else "not in force"
    lines.append(f"# tail_bound = {force}")
    if tail.degenerate:
        lines.append("# degenerate = support exceeds ambient dimension")
    emit(lines, resolved_config(args, "montecarlo"), args.out)
    return EXIT_OK


def cmd_mub(args) -> int:
    if args.p is None:
        raise ValueError("--p required")
    pair = build_mub_concat(args.p, args.split)
    lines = [
        f"d = {pair.d}, N_a = {pair.n_a}, N_b = {pair.n_b}",
        f"muA = {fmt(pair.mu_a)}",
        f"muB = {fmt(pair.mu_b)}",
        f"mu = {fmt(pair.mu)}",
        f"norm_a = {fmt(spectral_norm(pair.part_a))}",
        f"norm_b = {fmt(spectral_norm(pair.part_b))}",
    ]
    if args.report_scaling:
        rep = scaling_condition_report(pair)
        lines.append("scaling ratios:")
        for name, value, desc in rep.rows():
            lines.append(f"  {name} = {fmt(value)}   ({desc})")
    emit(lines, resolved_config(args, "mub"), args.out)
    return EXIT_OK


def cmd_conditions(args) -> int:
    pair = resolve_dictionary(args)
    rep = check_recovery_conditions(pair, args.na, args.nb, s=args.s,
                                    gamma=args.gamma)
    tail = tail_bound_params(pair, args.na, args.nb, s=args.s)
    robust_p0, robust_bp = two_onb_robust_thresholds(pair.mu, pair.n, args.s)
    lines = [
        f"fixed_part_lhs = {fmt(rep.fixed_part_lhs)}",
        f"fixed_part_rhs = {fmt(rep.fixed_part_rhs)}",
        f"fixed_part_ok = {rep.fixed_part_ok}",
        f"random_part_lhs = {fmt(rep.random_part_lhs)}",
        f"random_part_rhs = {fmt(rep.random_part_rhs)}",
        f"random_part_ok = {rep.random_part_ok}",
        f"p0_sparsity_ok = {rep.p0_sparsity_ok}",
        f"bp_sparsity_ok = {rep.bp_sparsity_ok}",
        f"bound_in_force = {rep.in_force}",
        f"tail_slope = {fmt(tail.slope)}",
        f"tail_offset = {fmt(tail.offset)}",
        f"tail_deviation = {fmt(tail.deviation)}",
        f"tail_failure_prob = {fmt(tail.failure_prob)}",
        f"tail_ceiling = {fmt(tail.ceiling)}",
        f"tail_within_half = {tail.within_half}",
        f"two_onb_robust_p0 = {fmt(robust_p0)}",
        f"two_onb_robust_bp = {fmt(robust_bp)}",
    ]
    emit(lines, resolved_config(args, "conditions"), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dictpair",
        description="sparsity thresholds and recovery experiments for "
                    "concatenated dictionary pairs",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("thresholds", help="evaluate every closed-form threshold")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--mu-a", type=float, default=0.0)
    p.add_argument("--mu-b", type=float, default=0.0)
    add_common_flags(p)
    p.set_defaults(func=cmd_thresholds)

    p = subs.add_parser("figure1", help="sweep symmetric-pair thresholds over mu_b")
    p.add_argument("--mu", type=float, default=0.01)
    p.add_argument("--grid", type=int, default=101)
    add_common_flags(p)
    p.set_defaults(func=cmd_figure1)

    p = subs.add_parser("recover", help="run one solver on a planted instance")
    p.add_argument("--dict-file", required=True)
    p.add_argument("--signal-file", required=True)
    p.add_argument("--solver", choices=["p0", "bp", "omp"], required=True)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=50_000)
    add_common_flags(p)
    p.set_defaults(func=cmd_recover)

    p = subs.add_parser("uncertainty", help="exhaustive support-size scan")
    add_dict_flags(p)
    p.add_argument("--max", type=int, default=None,
                   help="cap for both support sizes")
    p.add_argument("--max-na", type=int, default=None)
    p.add_argument("--max-nb", type=int, default=None)
    add_common_flags(p)
    p.set_defaults(func=cmd_uncertainty)

    p = subs.add_parser("spark", help="brute-force spark with lower bounds")
    add_dict_flags(p)
    p.add_argument("--max-check", type=int, default=8)
    add_common_flags(p)
    p.set_defaults(func=cmd_spark)

    p = subs.add_parser("montecarlo", help="randomized-support recovery experiment")
    add_dict_flags(p)
    p.add_argument("--fixed-a", default="",
                   help="comma-separated indices into part A")
    p.add_argument("--nb", type=int, required=True,
                   help="random atoms drawn from part B")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--model", choices=["gaussian", "unit-phase"],
                   default="gaussian")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    add_common_flags(p)
    p.set_defaults(func=cmd_montecarlo)

    p = subs.add_parser("mub", help="mutually unbiased bases example")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--split", type=int, default=1)
    p.add_argument("--report-scaling", action="store_true")
    add_common_flags(p)
    p.set_defaults(func=cmd_mub)

    p = subs.add_parser("conditions", help="randomized-recovery admission checks")
    add_dict_flags(p)
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    add_common_flags(p)
    p.set_defaults(func=cmd_conditions)

    return parser


def _inject_config(argv: list[str]) -> list[str]:
    """Insert config-file values as flags right after the subcommand, so
    explicit flags (parsed later) override them."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a path")
    path = argv[idx + 1]
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    if command is None:
        return argv
    values = parse_config_file(path)
    extra = config_as_argv(values, command)
    pos = argv.index(command) + 1
    return argv[:pos] + extra + argv[pos:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
