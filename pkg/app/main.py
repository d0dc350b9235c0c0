#!/usr/bin/env python3
"""
bruhat-cluster-lab - Main Entry Point

Command-line front end: Cartan data, word seeds, ensemble matrices, mutation
sequences and the verification suites. Command output goes to stdout as JSON
lines (or aligned text with --format pretty); logs go to stderr.
"""

import argparse
import json
import re
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import sympy as sp

from app.config import Config
from app.models.cartan import (
    PRESETS,
    CartanRealization,
    extend,
    from_preset,
    parse_matrix_text,
    type_a,
    validate_core,
)
from app.models.report import CheckReport
from app.models.seed import build_ensemble, build_seed, parse_double_word, parse_letters
from app.services.mutation_service import initial_state, mutate_sequence
from app.services.verification_service import VerificationService, all_reduced_words
from app.utils.error_handler import (
    ApplicationError,
    BadShape,
    ComputationError,
    ConfigurationError,
    InputError,
    with_error_handling,
)
from app.utils.logging import get_logger, setup_logging
from app.utils.matrices import format_matrix, format_rational, rational_pair

logger = get_logger("main")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

# Options whose values may start with "-": "--word -1,2" is rewritten to "--word=-1,2"
SIGNED_VALUE_OPTIONS = ("--word", "--seq", "--u", "--v", "--extension", "--matrix")
_SIGNED_VALUE = re.compile(r"^-\d")

# (u, v, i) with l(u s_i) > l(u) and l(v s_i) > l(v)
DEFAULT_GENDETID_TRIPLES = {
    3: [((), (), 1), ((), (), 2), ((1,), (), 2), ((), (2,), 1), ((2,), (2,), 1), ((1, 2), (), 1)],
    4: [((), (), 2), ((1,), (3,), 2), ((2,), (), 1), ((1, 3), (), 2), ((2,), (1,), 3), ((2,), (3,), 1)],
}

VERIFY_CHECKS = (
    "def-oracle",
    "structural",
    "laurent",
    "ensemble-commute",
    "poisson",
    "sln",
    "newlem",
    "twist",
    "gendetid",
    "groupfact",
    "unifact",
    "worked-example",
    "paper-example",
)

WORKED_EXAMPLE_CHECKS = ("worked-example", "paper-example")


def normalize_argv(argv: Sequence[str]) -> List[str]:
    """Join signed list values onto their option so argparse does not read them as flags."""
    result: List[str] = []
    args = list(argv)
    index = 0
    while index < len(args):
        arg = args[index]
        if (
            arg in SIGNED_VALUE_OPTIONS
            and index + 1 < len(args)
            and _SIGNED_VALUE.match(args[index + 1])
        ):
            result.append(f"{arg}={args[index + 1]}")
            index += 2
            continue
        result.append(arg)
        index += 1
    return result


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), help="named Cartan matrix")
    common.add_argument("--matrix", help='Cartan matrix inline, e.g. "2,-1;-1,2"')
    common.add_argument("--extension", help='extension rows, e.g. "1,0"')
    common.add_argument("--n", type=int, help="use the SL_n (type A_{n-1}) realization")
    common.add_argument("--format", choices=("json", "pretty"), help="output format")
    common.add_argument("--rng-seed", type=int, dest="rng_seed", help="run seed for random trials")
    common.add_argument("--trials", type=int, help="number of random trials or instances")
    common.add_argument("--threads", type=int, help="worker thread cap")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="bruhat-cluster-lab",
        description="Cluster ensembles on double Bruhat cells, in exact arithmetic.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cartan = commands.add_parser("cartan", parents=[common], help="inspect or validate Cartan data")
    cartan.add_argument("action", choices=("show", "validate"))

    seed = commands.add_parser("seed", parents=[common], help="build or mutate a word seed")
    seed.add_argument("action", choices=("build", "mutate"))
    seed.add_argument("--word", required=True, help="double reduced word, e.g. -1,-2,1,2")
    seed.add_argument("--seq", default="", help="mutation sequence, e.g. 1,2,1")

    ensemble = commands.add_parser("ensemble", parents=[common], help="print B, M, B~ and det B~")
    ensemble.add_argument("--word", required=True)

    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("check", choices=VERIFY_CHECKS)
    verify.add_argument("--word", help="double reduced word (or a positive word for groupfact/unifact)")
    verify.add_argument("--u", help="positive word for u (gendetid, twist)")
    verify.add_argument("--v", help="positive word for v (gendetid, twist)")
    verify.add_argument("--i", type=int, help="simple index for gendetid")
    verify.add_argument("--max-length", type=int, dest="max_length", help="word length cap for random instances")
    verify.add_argument("--depth", type=int, default=4, help="exhaustive mutation depth (laurent)")
    verify.add_argument("--random-sequences", type=int, default=50, dest="random_sequences")
    return parser


def apply_overrides(args: argparse.Namespace) -> Config:
    """Rebuild the configuration and lay the command-line flags over it."""
    Config.reset()
    config = Config()
    if args.rng_seed is not None:
        config.verification.rng_seed = args.rng_seed
    if args.trials is not None:
        config.verification.trials = args.trials
    if args.threads is not None:
        config.verification.max_workers = args.threads
    if args.format is not None:
        config.output.format = args.format
    config._update_flat_fields()
    Config.validate()
    return config


def resolve_realization(args: argparse.Namespace) -> CartanRealization:
    extension = parse_matrix_text(args.extension) if args.extension else None
    if args.matrix:
        return extend(validate_core(parse_matrix_text(args.matrix)), extension)
    if args.preset:
        return from_preset(args.preset, extension)
    if args.n is not None:
        if extension is not None:
            raise BadShape("SL_n has no extension rows")
        return type_a(args.n)
    raise BadShape("give one of --preset, --matrix or --n")


def _render(value: Any) -> Any:
    if isinstance(value, sp.MatrixBase):
        return [[rational_pair(value[i, j]) for j in range(value.cols)] for i in range(value.rows)]
    if isinstance(value, sp.Basic) and value.is_Rational:
        return rational_pair(value)
    return value


def emit(payload: Dict[str, Any], fmt: str, labels: Sequence[Any] = ()) -> None:
    """One JSON line, or one aligned block per field."""
    if fmt == "json":
        data = {key: _render(value) for key, value in payload.items()}
        print(json.dumps(data, sort_keys=True, separators=(",", ":")))
        return
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, sp.MatrixBase):
            print(f"{key}:")
            print(format_matrix(value, labels if value.rows == len(labels) else ()))
        elif isinstance(value, sp.Basic) and value.is_Rational:
            print(f"{key}: {format_rational(value)}")
        else:
            print(f"{key}: {json.dumps(value, sort_keys=True)}")


def emit_reports(reports: List[CheckReport], summary: CheckReport, fmt: str) -> int:
    for report in reports + [summary]:
        if fmt == "json":
            print(report.to_json_line())
        else:
            status = "PASS" if report.passed else "FAIL"
            print(f"{status} {report.check} {json.dumps(report.instance, sort_keys=True)}")
    return EXIT_OK if summary.passed else EXIT_FAILED


def run_cartan(args: argparse.Namespace, config: Config) -> int:
    realization = resolve_realization(args)
    if args.action == "validate":
        emit({"valid": True, **realization.core.to_dict()}, config.output.format)
        return EXIT_OK
    data = realization.to_dict()
    if config.output.format == "pretty":
        data["Cfull"] = sp.ImmutableMatrix(data["Cfull"])
    emit(data, config.output.format)
    return EXIT_OK


def run_seed(args: argparse.Namespace, config: Config) -> int:
    realization = resolve_realization(args)
    word = parse_double_word(realization, parse_letters(args.word))
    seed = build_seed(word)
    fmt = config.output.format
    if args.action == "build":
        payload: Dict[str, Any] = {"word": word.to_dict(), **seed.to_dict()}
        if fmt == "pretty":
            payload["B"] = seed.B
        emit(payload, fmt, seed.indices)
        return EXIT_OK

    sequence = parse_letters(args.seq)
    state = mutate_sequence(initial_state(seed), sequence)
    payload = {
        "sequence": list(state.history),
        "I": list(seed.indices),
        "B": state.seed.B,
        "A": {str(k): str(value) for k, value in state.assign_a.items()},
        "X": {str(k): str(value) for k, value in state.assign_x.items()},
    }
    emit(payload, fmt, seed.indices)
    return EXIT_OK


def run_ensemble(args: argparse.Namespace, config: Config) -> int:
    realization = resolve_realization(args)
    word = parse_double_word(realization, parse_letters(args.word))
    ensemble = build_ensemble(word)
    payload: Dict[str, Any] = {**ensemble.to_dict(), "abs_det": rational_pair(abs(ensemble.det))}
    if config.output.format == "pretty":
        payload.update(
            B=ensemble.B,
            M=ensemble.M,
            Btilde=ensemble.Btilde,
            detBtilde=ensemble.det,
            abs_det=abs(ensemble.det),
        )
    emit(payload, config.output.format, ensemble.seed.indices)
    return EXIT_OK


def _word_arg(args: argparse.Namespace, realization: CartanRealization):
    if args.word is None:
        raise BadShape(f"verify {args.check} needs --word")
    return parse_double_word(realization, parse_letters(args.word))


def _positive_words(args: argparse.Namespace, n: int) -> List[Sequence[int]]:
    if args.word:
        return [parse_letters(args.word)]
    return all_reduced_words(type_a(n), args.max_length or 4)


def _gendetid_triples(args: argparse.Namespace, n: int):
    if args.i is not None:
        return [(parse_letters(args.u or ""), parse_letters(args.v or ""), args.i)]
    if n not in DEFAULT_GENDETID_TRIPLES:
        raise BadShape(f"no default triples for SL_{n}; give --u, --v and --i")
    return DEFAULT_GENDETID_TRIPLES[n]


def collect_reports(args: argparse.Namespace, service: VerificationService) -> List[CheckReport]:
    check = args.check
    trials = args.trials
    if check == "def-oracle":
        return service.def_oracle_suite(instances=trials or 200, max_length=args.max_length or 12)
    if check == "structural":
        return service.structural_suite(instances=trials or 1000, max_length=args.max_length or 8)
    if check in WORKED_EXAMPLE_CHECKS:
        return service.worked_example_suite()
    if check in ("gendetid", "groupfact", "unifact", "twist"):
        n = args.n or 3
        if check == "gendetid":
            return service.gendetid_suite(n, _gendetid_triples(args, n), trials)
        if check == "twist":
            return service.twist_suite(n, parse_letters(args.u or ""), parse_letters(args.v or ""), trials)
        suite = service.groupfact_suite if check == "groupfact" else service.unifact_suite
        return suite(n, _positive_words(args, n), trials)

    realization = resolve_realization(args)
    word = _word_arg(args, realization)
    if check == "laurent":
        return service.laurent_suite(word, depth=args.depth, random_sequences=args.random_sequences)
    if check == "ensemble-commute":
        return service.ensemble_commute_suite(word, trials)
    if check == "poisson":
        return service.poisson_suite(word)
    if check == "sln":
        return service.sln_suite(word, trials)
    return service.newlem_suite(word, trials)


def run_verify(args: argparse.Namespace, config: Config) -> int:
    service = VerificationService(config)
    reports = collect_reports(args, service)
    return emit_reports(reports, service.summary(reports), config.output.format)


HANDLERS: Dict[str, Callable[[argparse.Namespace, Config], int]] = {
    "cartan": run_cartan,
    "seed": run_seed,
    "ensemble": run_ensemble,
    "verify": run_verify,
}


@with_error_handling(logger=logger, include_traceback=False)
def dispatch(args: argparse.Namespace) -> int:
    config = apply_overrides(args)
    setup_logging()
    logger.debug(f"Running {args.command}", extra={"command": args.command})
    return HANDLERS[args.command](args, config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 0 on success, 1 on a failed verification, 2 on invalid input."""
    parser = build_parser()
    args = parser.parse_args(normalize_argv(sys.argv[1:] if argv is None else argv))
    try:
        return dispatch(args)
    except (InputError, ConfigurationError) as e:
        print(f"error: {e.error_code}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ComputationError as e:
        print(f"error: {e.error_code}: {e}", file=sys.stderr)
        return EXIT_FAILED
    except ApplicationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
