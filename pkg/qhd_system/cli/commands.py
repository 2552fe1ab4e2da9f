"""
Command line interface module.

Argument parsing and one function per subcommand. Each command function
returns the process exit code; error-to-exit-code mapping lives in
:mod:`qhd_system.main`.
"""

import argparse
import math
from contextlib import nullcontext
from typing import ContextManager, List, Optional

from qhd_system.cli.config import OUTPUT_FORMATS, GameSection, RunConfig, load_config
from qhd_system.cli import output
from qhd_system.core.classical import BimatrixGame2x2, analyze_classical
from qhd_system.core.dynamics import (
    InvasionScenario, RoleInvasionScenario, simulate_invasion, simulate_role_invasion,
)
from qhd_system.core.equilibria import corner_nash_conditions, find_nash, invasion_barrier, surfaces_symmetric
from qhd_system.core.errors import MissingSectionError, ValidationError
from qhd_system.core.quantum import (
    MODULI_NAMES, NormalizationPolicy, TacticProfile, expected_payoffs_trace, final_density_matrix,
    payoff_surface, state_from_moduli,
)
from qhd_system.core.sweep import SWEEP_COLUMNS, SweepSettings, run_sweep
from qhd_system.core.verification import DEFAULT_SEED, DEFAULT_TOLERANCE, DEFAULT_TRIALS, run_verification
from qhd_system.utils.performance import PerformanceTracker

DEFAULT_FORMATS = {
    "classical": "text",
    "analyze": "text",
    "sweep": "csv",
    "simulate": "csv",
    "verify": "text",
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _check_tolerance(tol: Optional[float]) -> Optional[float]:
    """Reject a --tol that is not a finite positive number."""
    if tol is not None and not (math.isfinite(tol) and tol > 0):
        raise ValidationError(f"--tol must be a finite positive number, got {tol}", field="tol")
    return tol


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='Configuration document; flags override its values')
    common.add_argument('--format', choices=OUTPUT_FORMATS, help='Output format')
    common.add_argument('--out', help='Write output to this file instead of standard output')
    common.add_argument('--profile', action='store_true', help='Print timings and memory usage to stderr')
    common.add_argument('--verbose', action='store_true', help='Enable debug logging')
    return common


def _game_parser() -> argparse.ArgumentParser:
    game = argparse.ArgumentParser(add_help=False)
    game.add_argument('--resource-value', type=float, help='Value of the contested resource')
    game.add_argument('--injury-cost', type=float, help='Payoff change from an injury (negative)')
    game.add_argument('--display-cost', type=float, help='Payoff change from a display contest (negative)')
    game.add_argument('--losing-cost', type=float, help='Payoff of the loser of a Hawk-Dove encounter')
    game.add_argument('--strict-signs', action=argparse.BooleanOptionalAction, default=None,
                      help='Require a positive resource value and negative costs')
    return game


def _state_parser() -> argparse.ArgumentParser:
    state = argparse.ArgumentParser(add_help=False)
    state.add_argument('--moduli', type=float, nargs=4, metavar=('A2', 'B2', 'C2', 'D2'),
                       help='Squared moduli of the |HH>, |DD>, |HD>, |DH> amplitudes')
    state.add_argument('--policy', choices=[p.value for p in NormalizationPolicy],
                       help='Normalization policy for the state')
    return state


def setup_argument_parser() -> argparse.ArgumentParser:
    """Set up command line argument parser.

    Returns:
        argparse.ArgumentParser: Command line argument parser
    """
    parser = argparse.ArgumentParser(description='Quantum Hawk-Dove - evolutionary stability analysis')
    subparsers = parser.add_subparsers(dest='command', help='Commands')
    subparsers.required = True
    common, game, state = _common_parser(), _game_parser(), _state_parser()

    subparsers.add_parser('classical', parents=[common, game],
                          help='Classical payoff matrix and its pure and mixed ESS')

    analyze_parser = subparsers.add_parser('analyze', parents=[common, game, state],
                                           help='Payoff surfaces, Nash equilibria and ESS of the quantized game')
    analyze_parser.add_argument('--tactics', type=float, nargs=2, metavar=('P', 'Q'),
                                help='Tactic profile at which to evaluate the trace payoffs')
    analyze_parser.add_argument('--tol', type=float, help='Absolute tolerance (default 1e-9 x payoff scale)')

    sweep_parser = subparsers.add_parser('sweep', parents=[common, game],
                                         help='Equilibrium analysis over a grid of initial states')
    sweep_parser.add_argument('--axes', nargs=2, choices=MODULI_NAMES, help='The two gridded squared moduli')
    sweep_parser.add_argument('--resolution', type=int, help='Grid points per axis')
    sweep_parser.add_argument('--split', type=float, help='Share of the remaining mass given to the first other modulus')
    sweep_parser.add_argument('--workers', type=_positive_int, help='Worker processes')

    simulate_parser = subparsers.add_parser('simulate', parents=[common, game, state],
                                            help='Replicator dynamics of a mutant invasion')
    simulate_parser.add_argument('--incumbent', type=float, nargs='+', metavar='S',
                                 help='Incumbent strategy: s, or p q for asymmetric games')
    simulate_parser.add_argument('--mutant', type=float, nargs='+', metavar='S',
                                 help='Mutant strategy: s, or p q for asymmetric games')
    simulate_parser.add_argument('--epsilon', type=float, help='Initial mutant share')
    simulate_parser.add_argument('--generations', type=_positive_int, help='Generation budget')
    simulate_parser.add_argument('--step-size', type=float, help='Replicator step size')
    simulate_parser.add_argument('--extinction-threshold', type=float, help='Share below which the mutant is extinct')
    simulate_parser.add_argument('--no-certify', action='store_true',
                                 help='Always iterate down to the extinction threshold')

    verify_parser = subparsers.add_parser('verify', parents=[common],
                                          help='Trace-vs-closed-form oracle and golden cases')
    verify_parser.add_argument('--trials', type=_positive_int, default=DEFAULT_TRIALS, help='Random draws')
    verify_parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Seed of the PCG64 generator')
    verify_parser.add_argument('--tol', type=float, default=DEFAULT_TOLERANCE,
                               help='Tolerance relative to the payoff scale')

    return parser


def parse_args(args: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments.

    Args:
        args: Command line argument list, defaults to None which uses sys.argv

    Returns:
        argparse.Namespace: Parsed arguments
    """
    return setup_argument_parser().parse_args(args)


def load_run_config(args: argparse.Namespace, require_game: bool = True) -> RunConfig:
    """Configuration document (if any) with command line flags applied on top.

    Raises:
        ConfigError: For problems in the document or a missing game
        ValidationError: For flag values outside their domain
    """
    config = load_config(args.config, require_game=False) if args.config else RunConfig()

    game = config.game
    flags = {name: getattr(args, name, None)
             for name in ("resource_value", "injury_cost", "display_cost", "losing_cost")}
    if any(v is not None for v in flags.values()):
        base = {} if game is None else {name: getattr(game, name) for name in flags}
        merged = {name: flags[name] if flags[name] is not None else base.get(name) for name in flags}
        if merged["losing_cost"] is None:
            merged["losing_cost"] = 0.0
        missing = [name for name, v in merged.items() if v is None]
        if missing:
            raise MissingSectionError("missing game parameters: "
                                      + ", ".join("--" + m.replace("_", "-") for m in missing))
        game = GameSection(strict_signs=game.strict_signs if game else None, **merged)
    if game is None and require_game:
        raise MissingSectionError("game parameters required: pass --config with a [game] section "
                                  "or --resource-value, --injury-cost and --display-cost")
    config.game = game

    if getattr(args, "policy", None):
        config.policy = NormalizationPolicy(args.policy)
    if getattr(args, "moduli", None):
        config.state = state_from_moduli(args.moduli, config.policy)
    if getattr(args, "tactics", None):
        config.tactics = TacticProfile(*args.tactics)
    return config


def _format(args: argparse.Namespace, config: RunConfig) -> str:
    return args.format or config.output.format or DEFAULT_FORMATS[args.command]


def _destination(args: argparse.Namespace, config: RunConfig) -> str:
    return args.out or config.output.path


def _timed(tracker: Optional[PerformanceTracker], name: str) -> ContextManager:
    return tracker.timed(name) if tracker is not None else nullcontext()


def _finish(tracker: Optional[PerformanceTracker]) -> None:
    if tracker is not None:
        tracker.print_report()


def classical_command(args: argparse.Namespace) -> int:
    """Execute classical command.

    Args:
        args: Command line arguments

    Returns:
        Exit code (0 means success)
    """
    config = load_run_config(args)
    tracker = PerformanceTracker() if args.profile else None

    with _timed(tracker, "Classical Analysis"):
        game = _build_game(args, config, strict_default=True)
        report = analyze_classical(game, config.game.params())

    fmt = _format(args, config)
    with output.open_output(_destination(args, config)) as stream:
        if fmt == "csv":
            output.write_csv(stream, output.CLASSICAL_COLUMNS, output.classical_rows(game))
        elif fmt == "json":
            output.write_json(stream, output.classical_document(game, report))
        else:
            output.write_lines(stream, output.classical_lines(game, report))
    _finish(tracker)
    return 0


def analyze_command(args: argparse.Namespace) -> int:
    """Execute analyze command.

    Args:
        args: Command line arguments

    Returns:
        Exit code (0 means success)
    """
    config = load_run_config(args)
    tracker = PerformanceTracker() if args.profile else None

    with _timed(tracker, "Equilibrium Analysis"):
        game = _build_game(args, config)
        state, tactics = config.state, config.tactics
        surf_a, surf_b = payoff_surface(state, game)
        report = find_nash(surf_a, surf_b, _check_tolerance(args.tol))
        traced = expected_payoffs_trace(state, game, tactics)
        rho = final_density_matrix(state, tactics)
        conditions = {f"({p:g}, {q:g})": corner_nash_conditions(game, p, q)
                      for p in (0.0, 1.0) for q in (0.0, 1.0)}

    fmt = _format(args, config)
    point = (tactics.p, tactics.q)
    with output.open_output(_destination(args, config)) as stream:
        if fmt == "csv":
            output.write_csv(stream, output.CANDIDATE_COLUMNS, output.analysis_rows(report))
        elif fmt == "json":
            output.write_json(stream, output.analysis_document(state, report, point, traced, rho, conditions))
        else:
            output.write_lines(stream, output.analysis_lines(state, report, point, traced, rho, conditions))
    _finish(tracker)
    return 0


def sweep_command(args: argparse.Namespace) -> int:
    """Execute sweep command.

    Args:
        args: Command line arguments

    Returns:
        Exit code (0 means success)
    """
    config = load_run_config(args)
    tracker = PerformanceTracker() if args.profile else None

    base = config.sweep
    settings = SweepSettings(
        axes=tuple(args.axes) if args.axes else base.axes,
        resolution=args.resolution if args.resolution is not None else base.resolution,
        split=args.split if args.split is not None else base.split,
        workers=args.workers if args.workers is not None else base.workers,
    )
    with _timed(tracker, "Sweep"):
        cells = run_sweep(_build_game(args, config), settings)

    fmt = _format(args, config)
    with output.open_output(_destination(args, config)) as stream:
        if fmt == "json":
            output.write_json(stream, output.sweep_document(cells))
        else:
            output.write_csv(stream, SWEEP_COLUMNS, output.sweep_rows(cells))
    _finish(tracker)
    return 0


def simulate_command(args: argparse.Namespace) -> int:
    """Execute simulate command.

    Symmetric games run one population and take a single strategy for
    --incumbent/--mutant; asymmetric games run one population per player
    role with (p, q) strategy pairs.

    Args:
        args: Command line arguments

    Returns:
        Exit code (0 means success)
    """
    config = load_run_config(args)
    tracker = PerformanceTracker() if args.profile else None
    sim = config.simulation

    def strategy(values: Optional[List[float]], default):
        if values is None:
            return default
        if len(values) > 2:
            raise ValidationError("a strategy takes one or two values", field="strategy")
        return (values[0], values[-1])

    incumbent = strategy(args.incumbent, sim.incumbent)
    mutant = strategy(args.mutant, sim.mutant)
    settings = dict(
        epsilon=args.epsilon if args.epsilon is not None else sim.epsilon,
        generations=args.generations if args.generations is not None else sim.generations,
        step_size=args.step_size if args.step_size is not None else sim.step_size,
        extinction_threshold=(args.extinction_threshold if args.extinction_threshold is not None
                              else sim.extinction_threshold),
    )

    with _timed(tracker, "Simulation"):
        surf_a, surf_b = payoff_surface(config.state, _build_game(args, config))
        barrier = None
        if surfaces_symmetric(surf_a, surf_b):
            for name, pair in (("incumbent", incumbent), ("mutant", mutant)):
                if pair[0] != pair[1]:
                    raise ValidationError(f"{name} takes a single strategy in a symmetric game, got {list(pair)}",
                                          field=name)
            scenario = InvasionScenario(surf_a, incumbent[0], mutant[0], certify=not args.no_certify, **settings)
            trajectory = simulate_invasion(scenario)
            barrier = invasion_barrier(surf_a, incumbent[0], mutant[0])
            header, rows = ("generation", "share"), output.trajectory_rows(trajectory)
        else:
            trajectory = simulate_role_invasion(RoleInvasionScenario(surf_a, surf_b, incumbent, mutant, **settings))
            header, rows = ("generation", "row_share", "col_share"), output.role_trajectory_rows(trajectory)

    fmt = _format(args, config)
    with output.open_output(_destination(args, config)) as stream:
        if fmt == "json":
            output.write_json(stream, output.simulation_document(trajectory, barrier))
        elif fmt == "text":
            output.write_lines(stream, output.simulation_lines(trajectory, barrier))
        else:
            output.write_csv(stream, header, rows)
            stream.write(f"# verdict: {trajectory.verdict.value}\n")
    _finish(tracker)
    return 0


def verify_command(args: argparse.Namespace) -> int:
    """Execute verify command.

    Args:
        args: Command line arguments

    Returns:
        0 if every check passed, 1 otherwise
    """
    config = load_run_config(args, require_game=False)
    tracker = PerformanceTracker() if args.profile else None

    with _timed(tracker, "Verification"):
        report = run_verification(args.trials, args.seed, _check_tolerance(args.tol))

    fmt = _format(args, config)
    with output.open_output(_destination(args, config)) as stream:
        if fmt == "csv":
            output.write_csv(stream, output.VERIFY_COLUMNS, output.verification_rows(report))
        elif fmt == "json":
            output.write_json(stream, output.verification_document(report))
        else:
            output.write_lines(stream, output.verification_lines(report))
    _finish(tracker)
    return 0 if report.passed else 1


def _build_game(args: argparse.Namespace, config: RunConfig, strict_default: bool = False) -> BimatrixGame2x2:
    section = config.game
    # Flag, then document, then the command's default
    if args.strict_signs is not None:
        strict = args.strict_signs
    elif section.strict_signs is not None:
        strict = section.strict_signs
    else:
        strict = strict_default
    return GameSection(section.resource_value, section.injury_cost, section.display_cost,
                       section.losing_cost, strict).game()


COMMANDS = {
    "classical": classical_command,
    "analyze": analyze_command,
    "sweep": sweep_command,
    "simulate": simulate_command,
    "verify": verify_command,
}
