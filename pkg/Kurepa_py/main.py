"""
Command line for the Kurepa toolkit.

Exit codes: 0 clean run, 1 usage or internal error (including failed verification
suites), 2 a counterexample was found by a ``kurepa`` or ``strong`` scan.
Every long flag ``--foo-bar`` takes its default from ``KUREPA_FOO_BAR`` when set.
"""
import os
import sys
import logging
import argparse
from typing import List, Optional

from .arithmetic_manager import ArithmeticManager
from .config_manager import ENV_PREFIX, ConfigManager
from .data_handler import DataHandler
from .determinant_manager import DeterminantManager
from .exceptions import CheckpointError, KurepaError
from .heuristics_manager import HeuristicsManager
from .kurepa_evals import DEFAULT_MAX, EvaluationManager
from .scan_manager import CLASS_FILTERS, FINDING_KINDS, KINDS, LONG_RUNNING_HI, ScanConfig, ScanManager
from .sequence_manager import SequenceManager
from .utils import ReportFormat, Utility

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDING = 2

# Jobs above these sizes need --opt-in-long.
LONG_ELIMINATION_ORDER = 2000
LONG_BELL_SCAN_HI = 5000

logger = logging.getLogger(__name__)


class KurepaArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit code 1; 2 is reserved for findings."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def env_default(flag: str, default=None):
    """The ``KUREPA_*`` value for a long flag, or ``default``; argparse applies the flag's type."""
    return os.environ.get(ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper(), default)


def env_flag(flag: str) -> bool:
    return str(env_default(flag, "")).lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    parser = KurepaArgumentParser(prog="kurepa", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output on stderr")
    parser.add_argument("--precision", type=int, default=env_default("--precision"),
                        help="significant digits for reals (default 6)")
    parser.add_argument("--format", choices=[f.value for f in ReportFormat],
                        default=env_default("--format", ReportFormat.CSV.value), help="table output format")
    parser.add_argument("--opt-in-long", action="store_true", default=env_flag("--opt-in-long"),
                        help="allow jobs that run for hours")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=KurepaArgumentParser)

    seq = commands.add_parser("seq", help="left factorials, derangement numbers, Bell numbers")
    seq.add_argument("name", choices=["leftfact", "subfact", "bell"])
    seq.add_argument("n", type=int)
    seq.add_argument("--mod", type=int, default=env_default("--mod"))

    det = commands.add_parser("det", help="Kurepa determinants")
    det.add_argument("n", type=int)
    det.add_argument("--mod", type=int, default=env_default("--mod"))
    det.add_argument("--via", choices=["exact", "elim", "derangement"], default=env_default("--via"))
    det.add_argument("--binary", action="store_true", default=env_flag("--binary"))
    det.add_argument("--lemma-d", action="store_true", default=env_flag("--lemma-d"),
                     help="the auxiliary 0/1 determinant of order n")

    scan = commands.add_parser("scan", help="range scans; exit 2 when kurepa/strong find a counterexample",
                               description="Exit code 2 means a kurepa or strong scan found a counterexample.")
    scan.add_argument("kind", choices=KINDS)
    scan.add_argument("--lo", type=int, default=env_default("--lo", "2"))
    scan.add_argument("--hi", type=int, default=env_default("--hi"), required=env_default("--hi") is None)
    scan.add_argument("--bound", type=int, default=env_default("--bound", "2"))
    scan.add_argument("--ratio-bound", type=float, default=env_default("--ratio-bound"))
    scan.add_argument("--class", dest="class_filter", choices=CLASS_FILTERS,
                      default=env_default("--class", "all"),
                      help="class of n for table1, table2 and bell-one; the other kinds reject anything but all")
    scan.add_argument("--output", default=env_default("--output"),
                      help="write the report to this file instead of stdout")
    scan.add_argument("--checkpoint", default=env_default("--checkpoint"))
    scan.add_argument("--checkpoint-interval", type=int, default=env_default("--checkpoint-interval"))
    scan.add_argument("--resume", action="store_true", default=env_flag("--resume"))
    scan.add_argument("--jobs", type=int, default=env_default("--jobs"))

    heuristic = commands.add_parser("heuristic", help="expected near-miss counts and event probabilities")
    heuristic.add_argument("kind", choices=["expected-count", "event-prob", "constants", "event-report"])
    heuristic.add_argument("--x", type=float, default=env_default("--x"))
    heuristic.add_argument("--y", type=float, default=env_default("--y"))
    heuristic.add_argument("--d", type=int, default=env_default("--d", "0"))
    heuristic.add_argument("--mode", choices=["exact", "mertens"], default=env_default("--mode", "mertens"))

    verify = commands.add_parser("verify", help="cross-module verification suites")
    verify.add_argument("suite", choices=sorted(DEFAULT_MAX))
    verify.add_argument("--max", type=int, default=env_default("--max"))
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _require_long(args, what: str) -> bool:
    if not args.opt_in_long:
        logger.error("%s is long-running; pass --opt-in-long to run it", what)
        return False
    logger.warning("running long job: %s", what)
    return True


def cmd_seq(args, config: ConfigManager) -> int:
    print(SequenceManager.term(args.name, args.n, args.mod).value)
    return EXIT_OK


def cmd_det(args, config: ConfigManager) -> int:
    manager = DeterminantManager(config)
    n, m = args.n, args.mod
    if args.lemma_d:
        print(f"{manager.lemma_det_D(n)} [exact]")
        return EXIT_OK
    if args.binary:
        print(f"{manager.kurepa_binary_det(n)} [exact]")
        return EXIT_OK

    via = args.via or ("exact" if m is None else "elim")
    if via == "exact":
        value = manager.kurepa_det_exact(n)
        print(f"{value if m is None else value % m} [exact]")
        return EXIT_OK
    if via == "derangement":
        print(f"{manager.kurepa_det_mod_via_derangement(n, m).value} [derangement]")
        return EXIT_OK
    if m is None:
        raise KurepaError("--via elim needs --mod.")
    if n - 4 > LONG_ELIMINATION_ORDER and not _require_long(args, f"elimination of order {n - 4}"):
        return EXIT_ERROR
    if ArithmeticManager.is_prime(m):
        residue = manager.kurepa_det_mod(n, m)
    else:
        residue = manager.kurepa_det_mod_composite(n, m)
    print(f"{residue.value} [elim]")
    return EXIT_OK


def cmd_scan(args, config: ConfigManager) -> int:
    if args.hi > LONG_RUNNING_HI and not _require_long(args, f"scan up to {args.hi}"):
        return EXIT_ERROR
    if args.kind == "bell-one" and args.hi > LONG_BELL_SCAN_HI and not _require_long(args, f"Bell scan up to {args.hi}"):
        return EXIT_ERROR
    cfg = ScanConfig(args.lo, args.hi, residue_bound=args.bound, ratio_bound=args.ratio_bound,
                     class_filter=args.class_filter,
                     checkpoint_interval=args.checkpoint_interval or config.checkpoint_interval)
    checkpoint = DataHandler(args.checkpoint) if args.checkpoint else None
    if args.resume and checkpoint is None:
        raise KurepaError("--resume needs --checkpoint.")

    report = DataHandler(args.output) if args.output else None
    scanner = ScanManager(config)
    header = True
    found = False
    for _, _, records in scanner.iter_scan(args.kind, cfg, checkpoint=checkpoint, resume=args.resume):
        if args.kind == "kurepa":
            found = found or any(r.r_signed == 0 for r in records)
        elif args.kind in FINDING_KINDS:
            found = found or bool(records)
        if not records and not (header and args.format == ReportFormat.CSV.value):
            continue
        text = Utility.render(ScanManager.records_to_frame(records), args.format, config.precision, header=header)
        if report is not None:
            report.write_text(text, append=not header)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
        header = False
    if report is not None and header:
        report.write_text("")
    if found:
        logger.warning("%s scan found a counterexample", args.kind)
        return EXIT_FINDING
    return EXIT_OK


def cmd_heuristic(args, config: ConfigManager) -> int:
    manager = HeuristicsManager(config)
    if args.kind in ("constants", "event-report"):
        frame = manager.published_constants(args.mode) if args.kind == "constants" \
            else manager.event_probability_report()
        sys.stdout.write(Utility.render(frame, args.format, config.precision))
        return EXIT_OK
    if args.x is None or args.y is None:
        raise KurepaError(f"heuristic {args.kind} needs --x and --y.")
    if args.kind == "expected-count":
        estimate = manager.expected_near_miss_count(args.x, args.y, args.d, args.mode)
    else:
        estimate = manager.kurepa_event_probability(args.x, args.y)
    print(Utility.format_real(estimate.value, config.precision))
    return EXIT_OK


def cmd_verify(args, config: ConfigManager) -> int:
    evaluations = EvaluationManager(config)
    frame = evaluations.run(args.suite, args.max)
    fmt = args.format if args.format != ReportFormat.CSV.value else ReportFormat.PRETTY.value
    sys.stdout.write(Utility.render(frame, fmt, config.precision))
    summary = evaluations.summarize(frame)
    print(f"suite {args.suite}: {summary['passed']}/{summary['cases']} passed")
    return EXIT_OK if summary["failed"] == 0 else EXIT_ERROR


COMMANDS = {
    "seq": cmd_seq,
    "det": cmd_det,
    "scan": cmd_scan,
    "heuristic": cmd_heuristic,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = ConfigManager.from_env().with_overrides(precision=args.precision,
                                                         jobs=getattr(args, "jobs", None))
        return COMMANDS[args.command](args, config)
    except CheckpointError as e:
        print(f"kurepa: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (KurepaError, ValueError) as e:
        print(f"kurepa: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
