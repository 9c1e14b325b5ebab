"""
Command-line front end.

Every verb prints a human-readable report on standard output and returns
an exit code: 0 on success, 1 on a negative answer (not a member, a
violation, a dominated target, a failing scenario claim), 2 on usage or
input errors and 3 when an enumeration cap is exceeded. Machine outputs
are written only after the computation has succeeded.

Examples::

    bce-lab validate game.yaml
    bce-lab solve game.yaml --direction 1,0 --out witness.json
    bce-lab membership game.json target.json
    bce-lab polytope game.json --out vertices.csv --svg polytope.svg
    bce-lab rationalize table1.json --target l,c
    bce-lab verify game.json mixture.json
    bce-lab verify game.json bundle.yaml --refinement
    bce-lab factorize game.json expansion.yaml --out xi.json
    bce-lab scenario example1
    bce-lab scenario bargaining --states 1,2 --prior 1/2,1/2 --offers 1/2,1,3/2,2
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from .bce.characterization import sequential_move_characterization
from .bce.io import load_mixture, load_rules, load_target, save_mixture
from .bce.obedience import SolverOptions
from .bce.polytope import feasible_payoff_hull, payoff_polytope_2p, render_svg, write_vertices_csv
from .bce.solver import membership_test, optimize_direction, verify_bce
from .core.config import config
from .core.errors import BceLabError, CapExceededError, GameValidationError, ShapeMismatchError
from .core.logger import get_logger, setup_global_logger
from .core.types import (
    EXIT_CAP,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_USAGE,
    LOG_LEVELS,
    format_rational,
    parse_rational,
)
from .expansion.io import load_information, xi_table_to_dict
from .expansion.kernels import (
    Expansion,
    consistency_issues,
    describe_xi_table,
    factorization_test,
    induce_game,
)
from .games.base import BaseGame, ValidationReport, validate_game
from .games.io import load_game
from .rationalizability.dominance import is_truly_dominated
from .rationalizability.io import load_problem
from .rationalizability.verdict import is_rationalizable
from .refinements.io import load_bundle, verify_bundle
from .scenarios.runner import available, build, run

logger = get_logger(__name__)


def _emit(lines: Iterable[str]) -> None:
    for line in lines:
        print(line)


def _rationals(text: str) -> List[Any]:
    try:
        return [parse_rational(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}: {e}")


def _labels(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _check_cap(report: ValidationReport) -> None:
    if report.cap_exceeded is not None:
        limit, size = report.cap_exceeded
        raise CapExceededError("histories", limit, size)


def _valid_game(path: str) -> BaseGame:
    """Load a game and refuse it when any structural invariant fails."""
    game = load_game(path)
    report = validate_game(game)
    _check_cap(report)
    if not report.valid:
        _emit(report.lines())
        raise GameValidationError(f"{path} is not a valid game ({len(report.issues)} issues)")
    return game


def _options(game: BaseGame, args: argparse.Namespace) -> SolverOptions:
    rules = load_rules(game, args.rules) if getattr(args, "rules", None) else None
    return SolverOptions(rules=rules)


def _write_json(path: str, document: Dict[str, Any]) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


# ============================================================================
# Verbs
# ============================================================================


def cmd_validate(args: argparse.Namespace) -> int:
    game = load_game(args.game)
    report = validate_game(game)
    _check_cap(report)
    if report.valid:
        tree = game.tree()
        print(
            f"{game.name}: valid ({game.num_players} players, {game.stages} stages, "
            f"{len(tree.terminals)} terminal histories)"
        )
        return EXIT_OK
    print(f"{game.name}: {len(report.issues)} issues")
    _emit(report.lines())
    return EXIT_NEGATIVE


def cmd_solve(args: argparse.Namespace) -> int:
    game = _valid_game(args.game)
    direction = args.direction if args.direction is not None else [1] * game.num_players
    if len(direction) != game.num_players:
        raise ShapeMismatchError(
            f"Direction has {len(direction)} weights for {game.num_players} players"
        )
    result = optimize_direction(game, direction, _options(game, args))
    print(f"value: {format_rational(result.value)}")
    print("payoffs: (" + ", ".join(format_rational(u) for u in result.payoffs) + ")")
    _emit(result.witness.describe())
    if args.out:
        save_mixture(game, result.witness, args.out)
    return EXIT_OK


def cmd_membership(args: argparse.Namespace) -> int:
    game = _valid_game(args.game)
    target = load_target(game, args.target)
    options = _options(game, args)
    result = membership_test(game, target, options)
    if result.member:
        print("member: true")
        assert result.witness is not None
        _emit(result.witness.describe())
        if args.out:
            save_mixture(game, result.witness, args.out)
        return EXIT_OK

    print("member: false" + (" (restricted rule family)" if result.one_sided else ""))
    if result.reason:
        print(f"reason: {result.reason}")
    try:
        report = sequential_move_characterization(game, target)
    except ShapeMismatchError:
        return EXIT_NEGATIVE
    for condition in report.violated:
        print(f"violated: {condition.text}")
    return EXIT_NEGATIVE


def cmd_polytope(args: argparse.Namespace) -> int:
    game = _valid_game(args.game)
    polytope = payoff_polytope_2p(game, args.directions, _options(game, args))
    print(f"{game.name}: {len(polytope.vertices)} vertices ({polytope.directions} directions)")
    _emit(polytope.csv_lines())
    out = Path(args.out or f"{game.name}-vertices.csv")
    write_vertices_csv(polytope, out)
    if args.svg:
        render_svg(polytope, Path(args.svg), feasible_payoff_hull(game), title=game.name)
    return EXIT_OK


def cmd_rationalize(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    verdict = is_rationalizable(problem, args.target)
    _emit(verdict.lines())
    if args.dominance:
        true = is_truly_dominated(problem, args.target)
        dominated = "true" if true.dominated else "false"
        print(f"truly dominated: {dominated} (slack {format_rational(true.slack)})")
    return EXIT_OK if verdict.rationalizable else EXIT_NEGATIVE


def cmd_verify(args: argparse.Namespace) -> int:
    game = _valid_game(args.game)
    if args.refinement:
        bundle = load_bundle(game, args.candidate)
        report = verify_bundle(bundle)
        kind = "sequential" if bundle.sequential else "weak perfect"
        if report.clean:
            print(f"{kind} BCE: no violations")
            return EXIT_OK
        print(f"{kind} BCE: {len(report.issues)} violations")
        _emit(report.lines())
        return EXIT_NEGATIVE

    mixture = load_mixture(game, args.candidate)
    violations = verify_bce(game, mixture)
    if not violations:
        print("BCE: obedient")
        return EXIT_OK
    print(f"BCE: {len(violations)} profitable deviations")
    _emit(v.describe() for v in violations)
    return EXIT_NEGATIVE


def cmd_factorize(args: argparse.Namespace) -> int:
    game = _valid_game(args.game)
    loaded = load_information(game, args.information)
    family = induce_game(game, loaded) if isinstance(loaded, Expansion) else loaded
    issues = consistency_issues(game, family)
    print(f"consistent: {'false' if issues else 'true'}")
    _emit("  " + issue for issue in issues)
    result = factorization_test(game, family)
    print(f"factorizable: {'true' if result.factorizable else 'false'}")
    if result.reason:
        print(f"reason: {result.reason}")
    if not result.factorizable:
        return EXIT_NEGATIVE
    _emit(describe_xi_table(result.table))
    if args.out and result.witness is not None:
        _write_json(args.out, xi_table_to_dict(game, result.witness, result.table))
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    if args.name is None:
        for name in available():
            print(f"{name}: {build(name).summary}")
        return EXIT_OK
    params = {
        key: value
        for key, value in (("states", args.states), ("prior", args.prior), ("offers", args.offers))
        if value is not None
    }
    report = run(args.name, **params)
    _emit(report.lines())
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        report.write_json(args.out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


# ============================================================================
# Parser
# ============================================================================


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so ``main`` owns the exit code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bce-lab",
        description="Exact Bayes correlated equilibria of multi-stage games",
    )
    parser.add_argument("--cap-rules", type=_positive, help="Maximum feedback rules enumerated")
    parser.add_argument("--cap-histories", type=_positive, help="Maximum terminal histories")
    parser.add_argument(
        "--cap-deviations", type=_positive, help="Maximum pure deviations per player"
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="Logging level (stderr)")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("validate", help="Check the structural invariants of a game file")
    p.add_argument("game")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("solve", help="Maximize a weighted payoff sum over all BCE")
    p.add_argument("game")
    p.add_argument(
        "--direction", type=_rationals, help="Comma-separated weights (default all ones)"
    )
    p.add_argument("--rules", help="Restricted rule family file")
    p.add_argument("--out", help="Write the witness mixture here")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("membership", help="Is a target outcome distribution a BCE outcome?")
    p.add_argument("game")
    p.add_argument("target")
    p.add_argument(
        "--rules", help="Restricted rule family file (negative answers become one-sided)"
    )
    p.add_argument("--out", help="Write the witness mixture here")
    p.set_defaults(handler=cmd_membership)

    p = sub.add_parser("polytope", help="Exact BCE payoff polytope of a two-player game")
    p.add_argument("game")
    p.add_argument("--directions", type=_positive, help="Initial search directions")
    p.add_argument("--rules", help="Restricted rule family file")
    p.add_argument("--out", help="Vertex CSV path (default <game>-vertices.csv)")
    p.add_argument("--svg", help="Also render the polytope over the feasible hull")
    p.set_defaults(handler=cmd_polytope)

    p = sub.add_parser(
        "rationalize", help="Rationalizability of an action path in a decision problem"
    )
    p.add_argument("problem")
    p.add_argument(
        "--target", type=_labels, required=True, help="Comma-separated actions, one per period"
    )
    p.add_argument("--dominance", action="store_true", help="Also report true dominance")
    p.set_defaults(handler=cmd_rationalize)

    p = sub.add_parser("verify", help="Check a mixture (or a refinement bundle) exactly")
    p.add_argument("game")
    p.add_argument("candidate")
    p.add_argument("--refinement", action="store_true", help="Candidate is a wPBCE/SBCE bundle")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser(
        "factorize", help="Consistency and factorization of an expansion or kernel family"
    )
    p.add_argument("game")
    p.add_argument("information")
    p.add_argument("--out", help="Write the factorizing expansion here")
    p.set_defaults(handler=cmd_factorize)

    p = sub.add_parser("scenario", help="Run a built-in scenario (no name lists them)")
    p.add_argument("name", nargs="?")
    p.add_argument("--states", type=_rationals, help="Bargaining valuations")
    p.add_argument("--prior", type=_rationals, help="Bargaining prior")
    p.add_argument("--offers", type=_rationals, help="Bargaining offer grid")
    p.add_argument("--out", help="Write the claim report as JSON")
    p.set_defaults(handler=cmd_scenario)

    return parser


def _apply_overrides(args: argparse.Namespace) -> None:
    limits = {
        key: value
        for key, value in (
            ("rules", args.cap_rules),
            ("histories", args.cap_histories),
            ("deviations", args.cap_deviations),
        )
        if value is not None
    }
    solver = {"directions": args.directions} if getattr(args, "directions", None) else {}
    if limits or solver:
        config.override(limits=limits, solver=solver)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"bce-lab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return EXIT_OK if not e.code else EXIT_USAGE

    setup_global_logger(level=args.log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        _apply_overrides(args)
        return handler(args)
    except CapExceededError as e:
        logger.error("Cap exceeded: %s", e)
        print(f"bce-lab: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except BceLabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"bce-lab: {e}", file=sys.stderr)
        return EXIT_USAGE


def run_cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
