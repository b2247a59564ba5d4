#!/usr/bin/env python3
"""
golflab - golf and parking processes on the cycle and on Z

Command-line front end: simulation, exact laws, the exact verification
suite, experiment scans and run manifests. Every output written with
--emit gets a manifest next to it and a row in the run store.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from packaging.version import Version

import exact_laws
import experiments
import export_manager
import verification
from exact_laws import ExactDistribution, ZLawParams, format_fraction
from golf_errors import ConfigurationError, GolfLabError, ParameterError
from golf_model import CycleConfig, SiteState, parse_strategy
from line_model import LineWindowConfig, find_window_separators, run_golf_line, sample_line_window
from oracle import exact_final_distribution, exact_parking_distribution, exact_segment_distribution
from run_store import RunManifest, RunStore
from seed_manager import SeedManager
from settings import TOOL_VERSION, Settings

logger = logging.getLogger('golflab')

# Arguments that never change an output
RUNTIME_ARGS = ('emit', 'archive', 'threads', 'verbose', 'debug', 'seed', 'command', 'action')


@dataclass(frozen=True)
class Output:
    """Result of a subcommand: CSV rows or a JSON document."""

    rows: Optional[List[Dict]] = None
    document: Optional[object] = None

    def to_bytes(self) -> bytes:
        if self.rows is not None:
            return export_manager.csv_bytes(self.rows)
        return export_manager.json_bytes(self.document)

    def write(self, path: str) -> str:
        if self.rows is not None:
            return export_manager.write_csv(self.rows, path)
        return export_manager.write_json(self.document, path)


# Argument parsing helpers

def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}")


def _fraction_pair(text: str) -> Tuple[str, str]:
    parts = [v.strip() for v in text.split(',')]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"Expected two rationals p1,p2, got {text!r}")
    for part in parts:
        try:
            Fraction(part)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"Not a rational number: {part!r}")
    return parts[0], parts[1]


def _census(text: str) -> Dict[int, int]:
    """Parse ``-1:3,0:1,2:1`` (multiplicity:count)."""
    census: Dict[int, int] = {}
    try:
        for item in text.split(','):
            key, _, count = item.partition(':')
            census[int(key)] = census.get(int(key), 0) + int(count)
    except ValueError:
        raise ParameterError(f"Expected multiplicity:count pairs, got {text!r}")
    return census


def _census_json(census: Dict[int, int]) -> Dict[str, int]:
    return {str(j): c for j, c in sorted(census.items())}


def _exact_document(law: ExactDistribution, **header) -> Dict:
    document = dict(header)
    document.update(law.to_json_dict())
    return document


# simulate

def cmd_simulate_golf(args, seed: int, threads: int) -> Output:
    strategy = parse_strategy(args.strategy)
    config = CycleConfig.from_string(args.config) if args.config else None
    rows = experiments.simulate_golf(args.n, args.balls, args.holes, strategy, args.trials, seed, config, threads)
    return Output(rows=rows)


def cmd_simulate_parking(args, seed: int, threads: int) -> Output:
    row = experiments.simulate_parking(args.n, args.cars, parse_strategy(args.strategy), args.trials, seed, threads)
    return Output(rows=[row])


def cmd_simulate_multiball(args, seed: int, threads: int) -> Output:
    rows = experiments.simulate_multiball(_census(args.census), parse_strategy(args.strategy), args.trials, seed, threads)
    return Output(rows=rows)


def cmd_simulate_line(args, seed: int, threads: int) -> Output:
    strategy = parse_strategy(args.strategy)
    seeds = SeedManager(seed)
    if args.window:
        config = LineWindowConfig.from_string(args.window.replace('\\n', '\n'))
    else:
        config = sample_line_window(args.db, args.dt, args.width, seeds.generator("simulate:line", 0))
    report = find_window_separators(config)
    final = run_golf_line(config, strategy, seed=seeds.generator("simulate:line", 1))
    return Output(document={
        'window': {'left': config.left, 'right': config.right},
        'separators': list(report.certified),
        'separator_margins': list(report.margin),
        'remaining_holes': list(final.remaining_holes),
        'blocks': list(final.block_sizes()),
        'uncertified_sites': len(final.uncertified),
    })


# exact

def cmd_exact_cycle(args, seed: int, threads: int) -> Output:
    law = exact_laws.remaining_holes_distribution_cycle(args.n, args.balls, args.holes)
    return Output(document=_exact_document(law, n=args.n, balls=args.balls, holes=args.holes))


def cmd_exact_oracle(args, seed: int, threads: int) -> Output:
    strategy = parse_strategy(args.strategy)
    if args.segment:
        states = [SiteState.from_char(c) for c in args.config.strip()]
        law = exact_segment_distribution(states, strategy)
    else:
        law = exact_final_distribution(CycleConfig.from_string(args.config), strategy)
    return Output(document=_exact_document(law, config=args.config.strip(), strategy=strategy.label,
                                           segment=bool(args.segment)))


def cmd_exact_parking(args, seed: int, threads: int) -> Output:
    if args.p is None:
        law = exact_laws.parking_distribution(args.n, args.cars)
    else:
        law = exact_parking_distribution(args.n, args.cars, p=Fraction(args.p))
    return Output(document=_exact_document(law, n=args.n, cars=args.cars))


def cmd_exact_multiball(args, seed: int, threads: int) -> Output:
    census = _census(args.census)
    n = sum(census.values())
    law = exact_laws.multiball_distribution(n, census)
    return Output(document=_exact_document(law, n=n, census=_census_json(census)))


def cmd_exact_zlaw(args, seed: int, threads: int) -> Output:
    params = ZLawParams(args.db, args.dt)
    masses = [exact_laws.z_critical_block_law(params, args.index, b) for b in range(args.max_b + 1)]
    return Output(document={'db': args.db, 'dt': args.dt, 'index': args.index,
                            'block_size': [2 * b for b in range(args.max_b + 1)], 'mass': masses})


def cmd_exact_zgeneral(args, seed: int, threads: int) -> Output:
    masses = [exact_laws.z_block0_law_general(args.db, args.dt, l0) for l0 in range(args.max_l + 1)]
    return Output(document={'db': args.db, 'dt': args.dt, 'block_size': list(range(args.max_l + 1)),
                            'mass': masses})


def cmd_exact_sparse(args, seed: int, threads: int) -> Output:
    document: Dict = {'balls': args.balls, 'holes': args.holes}
    if args.x is not None:
        document['x'] = args.x
        document['density'] = exact_laws.sparse_density(args.balls, args.holes, args.x)
    moments = exact_laws.sparse_limit_moments(args.balls, args.holes)
    document['mean'] = [format_fraction(m) for m in moments.mean]
    document['second_moment'] = [[format_fraction(m) for m in row] for row in moments.second]
    return Output(document=document)


def cmd_exact_blocks(args, seed: int, threads: int) -> Output:
    if args.holes is None:
        law = exact_laws.block_size_distribution_full(args.n, args.balls)
    else:
        law = exact_laws.block_size_distribution_cycle(args.n, args.balls, args.holes)
    return Output(document=_exact_document(law, n=args.n, balls=args.balls, holes=args.holes))


def cmd_exact_block0(args, seed: int, threads: int) -> Output:
    law = exact_laws.block0_distribution_cycle(args.n, args.balls, args.holes)
    return Output(document=_exact_document(law, n=args.n, balls=args.balls, holes=args.holes))


def cmd_exact_mini_parking(args, seed: int, threads: int) -> Output:
    return Output(document={'n': args.n, 'probability': format_fraction(exact_laws.mini_parking_conditional(args.n))})


# experiment

def cmd_experiment_phase(args, seed: int, threads: int) -> Output:
    regime = experiments.parse_regime(args.regime, a=args.a, lam=args.lam)
    if isinstance(regime, experiments.Critical) and args.n is not None:
        profile = experiments.critical_window_profile(regime.lam, args.n, args.trials, seed, threads)
        if args.gof:
            result = experiments.block0_density_gof(profile.block0, regime.lam, args.bins)
            return Output(document={'lambda': regime.lam, 'n': args.n, 'n_l': profile.n_l,
                                    'trials': args.trials, 'block0_gof': result.to_json_dict()})
        return Output(rows=profile.rows())
    if not args.ns:
        raise ParameterError("A scan needs --ns (or --n with the critical regime)")
    spec = experiments.ScanSpec(regime, tuple(args.ns), args.trials, seed, args.sampler,
                                parse_strategy(args.strategy))
    return Output(rows=experiments.max_block_scan(spec, threads))


def cmd_experiment_monotone(args, seed: int, threads: int) -> Output:
    rows = experiments.max_block_monotonicity(args.n, args.n_ls, args.trials, seed, threads, args.sigmas)
    return Output(rows=rows)


def cmd_experiment_sparse(args, seed: int, threads: int) -> Output:
    strategy = parse_strategy(args.strategy)
    gof = experiments.sparse_case_check(args.balls, args.holes, args.n, args.trials, seed, strategy, threads)
    samples = experiments.sparse_block_samples(args.balls, args.holes, args.n, args.trials, seed, strategy, threads)
    return Output(document={'balls': args.balls, 'holes': args.holes, 'n': args.n, 'trials': args.trials,
                            'gof': gof.to_json_dict(),
                            'means': experiments.sparse_mean_rows(args.balls, args.holes, samples)})


def cmd_experiment_parking(args, seed: int, threads: int) -> Output:
    rows = []
    for text in args.strategies:
        rows.extend(experiments.parking_asymptotics_check(args.a, args.ns, args.trials, seed,
                                                          parse_strategy(text), threads, args.band))
    return Output(rows=rows)


def cmd_experiment_triangle(args, seed: int, threads: int) -> Output:
    result = experiments.cross_model_triangle(args.n, args.holes_left, args.trials, seed,
                                              parse_strategy(args.strategy), threads)
    document = {'n': args.n, 'n_l': args.holes_left, 'trials': args.trials}
    document.update(result.to_json_dict())
    return Output(document=document)


def cmd_experiment_separators(args, seed: int, threads: int) -> Output:
    if args.fill_check:
        rows = [dict(experiments.separator_fill_check(args.db, args.dt, w, args.trials, seed,
                                                      parse_strategy(args.strategy), threads), half_width=w)
                for w in args.widths]
        return Output(rows=rows)
    return Output(rows=experiments.separator_density_scan(args.db, args.dt, args.widths, args.trials, seed,
                                                          args.t, threads))


def cmd_experiment_zlaw(args, seed: int, threads: int) -> Output:
    strategy = parse_strategy(args.strategy)
    if args.balanced:
        if not args.ns:
            raise ParameterError("The balanced trend needs --ns")
        return Output(rows=experiments.balanced_block0_trend(args.db, args.ns, args.trials, seed, args.K,
                                                             args.hole_surplus, threads))
    document: Dict = {'db': args.db, 'dt': args.dt, 'n': args.n, 'R': args.R, 'trials': args.trials}
    if args.recenter is not None:
        result = experiments.recentering_check(args.db, args.dt, args.n, args.trials, seed, args.recenter,
                                               strategy, threads)
        document['recentering'] = dict(result.to_json_dict(), offset=args.recenter)
    else:
        results = experiments.z_block_law_check(args.db, args.dt, args.n, args.R, args.trials, seed,
                                                strategy, threads)
        document['gof'] = {name: result.to_json_dict() for name, result in sorted(results.items())}
    return Output(document=document)


# verify and manifest

def cmd_verify(args) -> int:
    p_pair = tuple(Fraction(p) for p in args.p_pair)
    report = verification.run_verification(max_n=args.max_n, p_pair=p_pair)
    print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    if not report.passed:
        print(f"Counterexample: {report.counterexample}", file=sys.stderr)
        return 1
    return 0


def cmd_manifest_list(args, settings: Settings) -> int:
    store = RunStore(args.database or settings.database)
    for record in store.get_manifests(args.subcommand):
        print(json.dumps(record, sort_keys=True))
    return 0


def cmd_manifest_replay(args, settings: Settings) -> int:
    manifest = export_manager.read_manifest(args.file)
    if Version(manifest.tool_version).major != Version(TOOL_VERSION).major:
        raise ConfigurationError(f"Manifest written by version {manifest.tool_version}, "
                                 f"this is {TOOL_VERSION}")
    handler = HANDLERS.get(manifest.subcommand)
    if handler is None:
        raise ConfigurationError(f"Unknown subcommand in manifest: {manifest.subcommand}")
    replayed = argparse.Namespace(**manifest.params)
    output = handler(replayed, manifest.master_seed, args.threads or settings.threads)
    digest = export_manager.sha256(output.to_bytes())
    if digest != manifest.output_digest:
        print(f"Digest mismatch: expected {manifest.output_digest}, got {digest}", file=sys.stderr)
        return 1
    print(f"Reproduced {manifest.output_path} ({digest})")
    return 0


HANDLERS: Dict[str, Callable] = {
    'simulate golf': cmd_simulate_golf,
    'simulate parking': cmd_simulate_parking,
    'simulate multiball': cmd_simulate_multiball,
    'simulate line': cmd_simulate_line,
    'exact cycle': cmd_exact_cycle,
    'exact oracle': cmd_exact_oracle,
    'exact parking': cmd_exact_parking,
    'exact multiball': cmd_exact_multiball,
    'exact zlaw': cmd_exact_zlaw,
    'exact zgeneral': cmd_exact_zgeneral,
    'exact sparse': cmd_exact_sparse,
    'exact blocks': cmd_exact_blocks,
    'exact block0': cmd_exact_block0,
    'exact mini-parking': cmd_exact_mini_parking,
    'experiment phase': cmd_experiment_phase,
    'experiment monotone': cmd_experiment_monotone,
    'experiment sparse': cmd_experiment_sparse,
    'experiment parking': cmd_experiment_parking,
    'experiment triangle': cmd_experiment_triangle,
    'experiment separators': cmd_experiment_separators,
    'experiment zlaw': cmd_experiment_zlaw,
}


def run_output_command(args, settings: Settings) -> int:
    """Run a simulate/exact/experiment subcommand, emit its output and record a manifest."""
    subcommand = f"{args.command} {args.action}"
    seed = args.seed if args.seed is not None else settings.seed
    threads = args.threads or settings.threads
    params = {key: value for key, value in vars(args).items() if key not in RUNTIME_ARGS}

    started = time.perf_counter()
    output = HANDLERS[subcommand](args, seed, threads)
    logger.info("%s seed=%d threads=%d finished in %.2fs", subcommand, seed, threads,
                time.perf_counter() - started)

    if not args.emit:
        sys.stdout.write(output.to_bytes().decode('utf-8'))
        return 0

    digest = output.write(args.emit)
    manifest = RunManifest(subcommand, params, seed, TOOL_VERSION, args.emit, digest)
    manifest_file = export_manager.write_manifest(manifest)
    RunStore(settings.database).add_manifest(manifest)
    if args.archive:
        export_manager.archive_run([args.emit, manifest_file], args.archive, manifest)
    print(f"Wrote {args.emit} ({digest})")
    return 0


def _add_output_options(parser: argparse.ArgumentParser):
    parser.add_argument('--seed', type=int, help='master seed (default: GOLFLAB_SEED or 0)')
    parser.add_argument('--threads', type=int, help='worker processes (default: GOLFLAB_THREADS or 1)')
    parser.add_argument('--emit', help='write the output to this file and record a manifest')
    parser.add_argument('--archive', help='also bundle output and manifest into this zip file')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='golflab', description=__doc__.strip().splitlines()[0])
    parser.add_argument('-v', '--verbose', action='store_true', help='log progress')
    parser.add_argument('--debug', action='store_true', help='log everything, trajectories included')
    commands = parser.add_subparsers(dest='command', required=True)

    # simulate
    simulate = commands.add_parser('simulate', help='Monte Carlo runs').add_subparsers(dest='action', required=True)
    p = simulate.add_parser('golf')
    p.add_argument('--n', type=int, default=0)
    p.add_argument('--balls', type=int, default=0)
    p.add_argument('--holes', type=int, default=0)
    p.add_argument('--config', help='fixed start over {B, H, .}, overrides --n/--balls/--holes')
    p.add_argument('--strategy', default='pwalk:1/2')
    p.add_argument('--trials', type=int, default=1)
    p = simulate.add_parser('parking')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--cars', type=int, required=True)
    p.add_argument('--strategy', default='pwalk:1/2')
    p.add_argument('--trials', type=int, default=100)
    p = simulate.add_parser('multiball')
    p.add_argument('--census', required=True, help='multiplicity:count pairs, -1 for holes')
    p.add_argument('--strategy', default='pwalk:1/2')
    p.add_argument('--trials', type=int, default=1)
    p = simulate.add_parser('line')
    p.add_argument('--db', type=float, default=0.4)
    p.add_argument('--dt', type=float, default=0.6)
    p.add_argument('--width', type=int, default=1000, help='half width W of the window -W..W')
    p.add_argument('--window', help='fixed window "offset=<left>\\n<states>"')
    p.add_argument('--strategy', default='pwalk:1/2')
    for sub in simulate.choices.values():
        _add_output_options(sub)

    # exact
    exact = commands.add_parser('exact', help='exact laws').add_subparsers(dest='action', required=True)
    for name in ('cycle', 'block0'):
        p = exact.add_parser(name)
        p.add_argument('--n', type=int, required=True)
        p.add_argument('--balls', type=int, required=True)
        p.add_argument('--holes', type=int, required=True)
    p = exact.add_parser('blocks')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--balls', type=int, required=True)
    p.add_argument('--holes', type=int, help='omit for a cycle with no neutral site')
    p = exact.add_parser('oracle')
    p.add_argument('--config', required=True, help='start over {B, H, .}')
    p.add_argument('--strategy', default='pwalk:1/2')
    p.add_argument('--segment', action='store_true', help='treat the start as a segment instead of a cycle')
    p = exact.add_parser('parking')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--cars', type=int, required=True)
    p.add_argument('--p', help='compute with the exact chain at this walk bias instead of the closed form')
    p = exact.add_parser('multiball')
    p.add_argument('--census', required=True)
    p = exact.add_parser('zlaw')
    p.add_argument('--db', type=float, required=True)
    p.add_argument('--dt', type=float, required=True)
    p.add_argument('--index', type=int, default=0)
    p.add_argument('--max-b', type=int, default=10)
    p = exact.add_parser('zgeneral')
    p.add_argument('--db', type=float, required=True)
    p.add_argument('--dt', type=float, required=True)
    p.add_argument('--max-l', type=int, default=20)
    p = exact.add_parser('sparse')
    p.add_argument('--balls', type=int, required=True)
    p.add_argument('--holes', type=int, required=True)
    p.add_argument('--x', type=_float_list, help='point of the simplex for the density')
    p = exact.add_parser('mini-parking')
    p.add_argument('--n', type=int, required=True)
    for sub in exact.choices.values():
        _add_output_options(sub)

    # verify
    p = commands.add_parser('verify', help='exact oracle-vs-formula suite')
    p.add_argument('--max-n', type=int, default=6)
    p.add_argument('--p-pair', type=_fraction_pair, default=('1/2', '1/3'))

    # experiment
    experiment = commands.add_parser('experiment', help='scans and checks').add_subparsers(dest='action', required=True)
    p = experiment.add_parser('phase')
    p.add_argument('--regime', choices=['linear', 'critical', 'super', 'sub'], required=True)
    p.add_argument('--a', type=float)
    p.add_argument('--lambda', dest='lam', type=float)
    p.add_argument('--ns', type=_int_list)
    p.add_argument('--n', type=int, help='critical regime: profile at one size')
    p.add_argument('--trials', type=int, default=1000)
    p.add_argument('--sampler', choices=['forest', 'golf'], default='forest')
    p.add_argument('--strategy', default='dir:0')
    p.add_argument('--gof', action='store_true', help='critical profile: report the block 0 test instead')
    p.add_argument('--bins', type=int, default=20)
    p = experiment.add_parser('monotone')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--n-ls', type=_int_list, required=True, help='increasing holes-left grid, each of the parity of n')
    p.add_argument('--trials', type=int, default=1000)
    p.add_argument('--sigmas', type=float, default=3.0, help='allowed rise in combined standard errors')
    p = experiment.add_parser('sparse')
    p.add_argument('--balls', type=int, required=True)
    p.add_argument('--holes', type=int, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--trials', type=int, default=10000)
    p.add_argument('--strategy', default='dir:0')
    p = experiment.add_parser('parking')
    p.add_argument('--a', type=float, default=0.5)
    p.add_argument('--ns', type=_int_list, required=True)
    p.add_argument('--trials', type=int, default=1000)
    p.add_argument('--strategies', type=lambda s: s.split(','), default=['dir:0'])
    p.add_argument('--band', type=float, default=1.0)
    p = experiment.add_parser('triangle')
    p.add_argument('--n', type=int, default=12)
    p.add_argument('--holes-left', type=int, default=4)
    p.add_argument('--trials', type=int, default=100000)
    p.add_argument('--strategy', default='pwalk:1/2')
    p = experiment.add_parser('separators')
    p.add_argument('--db', type=float, default=0.4)
    p.add_argument('--dt', type=float, default=0.6)
    p.add_argument('--widths', type=_int_list, default=[1000])
    p.add_argument('--trials', type=int, default=1000)
    p.add_argument('--t', type=float, help='keep only balls with clock below t')
    p.add_argument('--fill-check', action='store_true', help='run golf and count filled separators')
    p.add_argument('--strategy', default='pwalk:1/2')
    p = experiment.add_parser('zlaw')
    p.add_argument('--db', type=float, default=0.4)
    p.add_argument('--dt', type=float, default=0.6)
    p.add_argument('--n', type=int, default=20000)
    p.add_argument('--R', type=int, default=1)
    p.add_argument('--trials', type=int, default=10000)
    p.add_argument('--strategy', default='dir:0')
    p.add_argument('--recenter', type=int, help='compare the central block seen from 0 and from this vertex')
    p.add_argument('--balanced', action='store_true', help='P(Delta_0 <= K) at equal densities over --ns')
    p.add_argument('--ns', type=_int_list)
    p.add_argument('--K', type=int, default=10)
    p.add_argument('--hole-surplus', type=int, default=2)
    for sub in experiment.choices.values():
        _add_output_options(sub)

    # manifest
    manifest = commands.add_parser('manifest', help='stored runs').add_subparsers(dest='action', required=True)
    p = manifest.add_parser('list')
    p.add_argument('--subcommand')
    p.add_argument('--database')
    p = manifest.add_parser('replay')
    p.add_argument('file')
    p.add_argument('--threads', type=int)

    return parser


def configure_logging(settings: Settings, verbose: bool, debug: bool):
    level = logging.DEBUG if debug else logging.INFO if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s %(message)s', stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function - entry point of the command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_env()
        configure_logging(settings, args.verbose, args.debug)
        if getattr(args, 'threads', None) is not None and args.threads < 1:
            raise ParameterError(f"--threads must be at least 1, got {args.threads}")

        if args.command == 'verify':
            return cmd_verify(args)
        if args.command == 'manifest':
            if args.action == 'list':
                return cmd_manifest_list(args, settings)
            return cmd_manifest_replay(args, settings)
        return run_output_command(args, settings)

    except (GolfLabError, ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
