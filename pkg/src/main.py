#!/usr/bin/env python3
"""
Main entry point for the SEB Channel Toolkit.

This module provides the command-line interface. Each subcommand reads
its input files, runs one analysis, and prints a Report on stdout; log
records go to stderr.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .channels.converter import ChannelConverter
from .channels.evaluator import ChannelEvaluator
from .config import Config
from .dilation.dilator import CommutativeDilator
from .errors import BadWeights, ChannelToolkitError, IoError, ParseError, ValidationError
from .models.reports import Report
from .models.schema import Tolerances
from .normalization.codec import MatrixCodec
from .seb.analyzer import SebAnalyzer
from .structure.analyzer import StructureAnalyzer
from .synthesis.nullspace import NullspaceSynthesizer
from .utils.io_handler import IOHandler
from .utils.logger import setup_logger

# Errors caused by the invocation or its inputs rather than by an analysis
USAGE_ERRORS = (ParseError, ValidationError, IoError, BadWeights)

Outcome = Tuple[Dict[str, Any], bool]


class SebToolkit:
    """
    Command coordinator.

    Every command method:
    1. Reads its input files (recording their digests)
    2. Runs the analysis
    3. Writes the optional artifact
    4. Returns the payload and the ok flag
    """

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        log_level: str = Config.LOG_LEVEL,
        verify_inputs: bool = True,
    ):
        """
        Initialize the toolkit with all components.

        Args:
            tolerances: Numerical tolerances (default: Config defaults)
            log_level: Logging level
            verify_inputs: Reject channel files that fail the CPTP checks
        """
        self.logger = setup_logger(
            name=Config.LOGGER_NAME,
            level=getattr(logging, log_level.upper(), logging.WARNING)
        )
        self.tol = tolerances or Config.default_tolerances()
        self.verify_inputs = verify_inputs
        self.inputs: Dict[str, str] = {}

        self.codec = MatrixCodec()
        self.io_handler = IOHandler(self.tol, self.codec)
        self.evaluator = ChannelEvaluator(self.tol)
        self.converter = ChannelConverter(self.tol)
        self.seb = SebAnalyzer(self.tol)
        self.synthesizer = NullspaceSynthesizer(self.tol)
        self.dilator = CommutativeDilator(self.tol)
        self.structure = StructureAnalyzer(self.tol)

        self.logger.info(f"Initialized {Config.APP_NAME} v{Config.VERSION}")

    def _record(self, path: Path):
        self.inputs[Path(path).name] = self.io_handler.digest(path)

    def _channel(self, path: Path, verify: Optional[bool] = None):
        self._record(path)
        return self.io_handler.read_channel(
            path, verify=self.verify_inputs if verify is None else verify
        )

    def verify(self, path: Path) -> Outcome:
        ch = self._channel(path, verify=False)
        cptp = self.evaluator.verify_cptp(ch)
        validation = self.io_handler.validator.validate(ch)
        payload = {
            'representation': ch.representation,
            'dim_in': ch.dim_in,
            'dim_out': ch.dim_out,
            'cptp': cptp,
            'validation': validation,
        }
        return payload, cptp.ok and validation.is_valid

    def range_comm(self, path: Path) -> Outcome:
        report = self.seb.range_commutativity_test(self._channel(path))
        return {'range_commutativity': report}, report.commutes

    def decompose(
        self,
        path: Path,
        weights: Optional[Sequence[float]],
        seed: int,
        output: Optional[Path],
    ) -> Outcome:
        ch = self._channel(path)
        dec = self.seb.decompose_seb(ch, weights=weights, seed=seed)
        include_sigma = max(ch.dim_in, ch.dim_out) <= Config.CHOI_CERTIFY_MAX_DIM
        check = self.seb.verify_separable_decomposition(dec, ch, include_sigma=include_sigma)
        holevo = dec.to_holevo()
        cptp = self.evaluator.verify_cptp(holevo)
        if output:
            self.io_handler.write_channel(holevo, output)
        payload = {'decomposition': dec, 'check': check, 'holevo_cptp': cptp}
        return payload, check.ok and cptp.ok

    def synth_null(self, path: Path, output: Optional[Path]) -> Outcome:
        self._record(path)
        spec = self.io_handler.read_subspace(path)
        out = self.synthesizer.synthesize_channel(spec)
        check = self.synthesizer.verify_nullspace(out, spec)
        cptp = self.evaluator.verify_cptp(out.channel)
        if output:
            self.io_handler.write_channel(out.channel, output)
        payload = {
            'synthesis': out,
            'subspace_dimension': spec.dim ** 2 - out.output_dim,
            'check': check,
            'cptp': cptp,
        }
        return payload, check.ok and cptp.ok

    def dilate(self, path: Path, output: Optional[Path]) -> Outcome:
        holevo = self.converter.to_holevo(self._channel(path))
        dil = self.dilator.build_dilation(holevo)
        check = self.dilator.verify_dilation(dil, holevo)
        if output:
            self.io_handler.write_json(dil, output)
        return {'dilation': dil, 'check': check}, check.ok

    def fixed_points(self, path: Path, seed: int) -> Outcome:
        ch = self._channel(path)
        form = self.structure.rank_one_form(ch)
        commutant = self.structure.commutant_projections(form, seed=seed)
        checks = [self.structure.adjoint_fixed_check(form, p) for p in commutant.projections]
        fixed_space = self.structure.fixed_point_space(ch)
        payload = {
            'commutant': commutant,
            'projection_checks': checks,
            'commutant_dimension': commutant.dimension,
            'fix_dimension': len(fixed_space),
        }
        ok = all(c.fixed for c in checks) and commutant.pairwise_comm_residual <= self.tol.eps_comm
        return payload, ok

    def mult_domain(self, path: Path, projection_path: Path) -> Outcome:
        form = self.structure.rank_one_form(self._channel(path))
        self._record(projection_path)
        _, projections = self.io_handler.read_projections(projection_path)
        reports = [self.structure.multiplicative_projection_check(form, p) for p in projections]
        inside = [p for p, r in zip(projections, reports) if r.in_domain]
        payload = {
            'projections': reports,
            'in_domain_count': len(inside),
            'domain_pairwise_comm_residual': self.structure.projection_family_commutativity(inside),
        }
        return payload, all(r.in_domain for r in reports)

    def convert(self, path: Path, target: str, output: Optional[Path]) -> Outcome:
        converted = self.converter.convert(self._channel(path), target)
        cptp = self.evaluator.verify_cptp(converted)
        if output:
            self.io_handler.write_channel(converted, output)
        return {'channel': self.codec.channel_document(converted), 'cptp': cptp}, cptp.ok


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance '{text}'")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1), got {text}")
    return value


def _weights(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid weight list '{text}'")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per analysis."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol-comm', type=_tolerance, default=Config.EPS_COMM,
                        help=f'Relative commutator tolerance (default: {Config.EPS_COMM})')
    common.add_argument('--tol-psd', type=_tolerance, default=Config.EPS_PSD,
                        help=f'Negative-eigenvalue tolerance (default: {Config.EPS_PSD})')
    common.add_argument('--tol-recon', type=_tolerance, default=Config.EPS_RECON,
                        help=f'Reconstruction tolerance (default: {Config.EPS_RECON})')
    common.add_argument('--seed', type=int, default=Config.DEFAULT_SEED,
                        help=f'Seed for randomized steps (default: {Config.DEFAULT_SEED})')
    common.add_argument('--report', choices=['json', 'text'], default='json',
                        help='Report format on stdout (default: json)')
    common.add_argument('--no-verify', action='store_true',
                        help='Skip the CPTP check of input channels')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        default=Config.LOG_LEVEL,
                        help=f'Logging level on stderr (default: {Config.LOG_LEVEL})')

    parser = argparse.ArgumentParser(
        prog="seb-toolkit",
        description="Analyze strongly entanglement breaking quantum channels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Check a channel file
  seb-toolkit verify tests/fixtures/dephasing-d2.json

  # Measure-and-prepare decomposition, writing the Holevo form
  seb-toolkit decompose tests/fixtures/dephasing-d2.json --seed 7 -o holevo.json

  # Channel with a prescribed null space
  seb-toolkit synth-null tests/fixtures/sigmaz-span.json -o channel.json
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('verify', parents=[common], help='CPTP check of a channel file')
    p.add_argument('channel', type=Path)

    p = sub.add_parser('range-comm', parents=[common], help='Commutativity of the range')
    p.add_argument('channel', type=Path)

    p = sub.add_parser('decompose', parents=[common], help='Measure-and-prepare decomposition')
    p.add_argument('channel', type=Path)
    p.add_argument('--weights', type=_weights, help='Comma-separated Choi weights')
    p.add_argument('-o', '--output', type=Path, help='Write the Holevo channel file')

    p = sub.add_parser('synth-null', parents=[common], help='Channel with a given null space')
    p.add_argument('subspace', type=Path)
    p.add_argument('-o', '--output', type=Path, help='Write the synthesized channel file')

    p = sub.add_parser('dilate', parents=[common], help='Commutative-range dilation')
    p.add_argument('channel', type=Path)
    p.add_argument('-o', '--output', type=Path, help='Write the dilation')

    p = sub.add_parser('fixed-points', parents=[common], help='Commutant and fixed projections')
    p.add_argument('channel', type=Path)

    p = sub.add_parser('mult-domain', parents=[common], help='Multiplicative-domain test')
    p.add_argument('channel', type=Path)
    p.add_argument('--projection', type=Path, required=True, help='Projection file')

    p = sub.add_parser('convert', parents=[common], help='Change representation')
    p.add_argument('channel', type=Path)
    p.add_argument('--to', choices=['kraus', 'holevo', 'choi'], required=True)
    p.add_argument('-o', '--output', type=Path, help='Write the converted channel file')

    return parser


def _dispatch(toolkit: SebToolkit, args: argparse.Namespace) -> Outcome:
    command = args.command
    if command == 'verify':
        return toolkit.verify(args.channel)
    if command == 'range-comm':
        return toolkit.range_comm(args.channel)
    if command == 'decompose':
        return toolkit.decompose(args.channel, args.weights, args.seed, args.output)
    if command == 'synth-null':
        return toolkit.synth_null(args.subspace, args.output)
    if command == 'dilate':
        return toolkit.dilate(args.channel, args.output)
    if command == 'fixed-points':
        return toolkit.fixed_points(args.channel, args.seed)
    if command == 'mult-domain':
        return toolkit.mult_domain(args.channel, args.projection)
    return toolkit.convert(args.channel, args.to, args.output)


def _flatten(value: Any, prefix: str, lines: List[str]):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(value[key], f"{prefix}.{key}" if prefix else key, lines)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, item in enumerate(value):
            _flatten(item, f"{prefix}[{i}]", lines)
    else:
        lines.append(f"{prefix}: {json.dumps(value)}")


def render_report(report: Report, codec: MatrixCodec, fmt: str = 'json') -> str:
    """
    Render a report for stdout.

    The JSON form is canonical and leaves out runtime_ms; the text form is
    a flat ``key: value`` listing that includes it.
    """
    if fmt == 'json':
        return codec.dumps(report.model_dump(exclude={'runtime_ms'}))
    lines: List[str] = []
    _flatten(codec.to_jsonable(report), "", lines)
    return "\n".join(lines) + "\n"


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand and print its report.

    Returns:
        0 if the report is ok, 1 if an analysis completed or failed with
        ok = false, 2 for usage, parse, validation and I/O errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    tolerances = Tolerances(
        eps_herm=Config.EPS_HERM,
        eps_psd=args.tol_psd,
        eps_comm=args.tol_comm,
        eps_recon=args.tol_recon,
        eps_rank=Config.EPS_RANK,
    )
    toolkit = SebToolkit(tolerances, log_level=args.log_level, verify_inputs=not args.no_verify)

    started = time.perf_counter()
    error = None
    try:
        payload, ok = _dispatch(toolkit, args)
        code = 0 if ok else 1
    except ChannelToolkitError as e:
        toolkit.logger.error(f"{args.command} failed: {e.__class__.__name__}: {e.message}")
        payload, ok, error = {}, False, e.to_dict()
        code = 2 if isinstance(e, USAGE_ERRORS) else 1

    runtime_ms = int((time.perf_counter() - started) * 1000)
    report = Report(
        command=args.command,
        inputs=toolkit.inputs,
        tolerances=tolerances,
        payload=toolkit.codec.to_jsonable(payload),
        ok=bool(ok),
        runtime_ms=runtime_ms,
        error=toolkit.codec.to_jsonable(error),
    )
    toolkit.logger.info(f"{args.command} finished in {runtime_ms} ms: ok={report.ok}")
    sys.stdout.write(render_report(report, toolkit.codec, args.report))
    return code


def main():
    """Main CLI entry point."""
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
