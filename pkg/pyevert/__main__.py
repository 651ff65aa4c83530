"""
pyevert/__main__.py

Command-line interface: ``python -m pyevert {generate,relax,evert,analyze,export}``.

Every config key is also a flag (``--resolution 24``, ``--relax.max_steps
500``); flags override the values of ``--config``. Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 I/O or parse failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import run
from .config.registry import ConfigRegistry
from .errors import (
	ConfigError,
	EversionError,
	HalfwayError,
	IoFailure,
	PipelineError,
	ResolutionTooLow,
	SeedMeshMissing,
)
from .pipeline.config import EversionConfig

logger = logging.getLogger("pyevert")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def exit_code(exc: BaseException) -> int:
	"""Map an error to the process exit code."""
	if isinstance(exc, PipelineError):
		exc = exc.cause
	if isinstance(exc, (ConfigError, ResolutionTooLow)):
		return EXIT_CONFIG
	if isinstance(exc, (IoFailure, SeedMeshMissing)):
		return EXIT_IO
	if isinstance(exc, HalfwayError):
		return EXIT_NUMERICAL
	if isinstance(exc, OSError):
		return EXIT_IO
	return EXIT_NUMERICAL


def build_parser(registry: Optional[ConfigRegistry] = None) -> argparse.ArgumentParser:
	registry = registry or ConfigRegistry()
	parser = argparse.ArgumentParser(
		prog="pyevert",
		description="Energy-driven minimax sphere eversions",
	)
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("--config", type=str, default=None, help="key = value config file.")
	common.add_argument("--loglevel", type=str, default="INFO", help="Set logging level.")
	registry.add_arguments(common)

	sub = parser.add_subparsers(dest="command", required=True)

	p = sub.add_parser("generate", parents=[common], help="Write an unrelaxed halfway seed.")
	p.add_argument("--out", type=str, required=True, help="Seed path (<stem>.obj plus sidecars).")

	p = sub.add_parser("relax", parents=[common], help="Relax a halfway model and write it as a seed.")
	p.add_argument("--out", type=str, required=True, help="Seed path of the relaxed model.")

	p = sub.add_parser("evert", parents=[common], help="Compute and export a full eversion.")
	p.add_argument("--bundle", type=str, default=None, help="Homotopy bundle path [default: <output_dir>/homotopy.npz].")

	p = sub.add_parser("analyze", parents=[common], help="Audit a directory of frame_NNNN.obj files.")
	p.add_argument("frames_dir", type=str, help="Directory of frames.")
	p.add_argument("--out", type=str, default=None, help="Directory for the audit tables.")

	p = sub.add_parser("export", parents=[common], help="Export a saved homotopy bundle.")
	p.add_argument("--bundle", type=str, default=None, help="Homotopy bundle [default: <output_dir>/homotopy.npz].")
	p.add_argument("--out", type=str, default=None, help="Export directory [default: output_dir].")
	return parser


def _dispatch(args: argparse.Namespace, config: EversionConfig) -> None:
	if args.command == "generate":
		model = run.generate(config, args.out)
		logger.info("Generated %s seed: energy %.6g", model.kind, model.energy)
	elif args.command == "relax":
		model = run.relax(config, args.out)
		logger.info("Relaxed %s: energy %.8g (converged: %s)", model.kind, model.energy, model.converged)
	elif args.command == "evert":
		homotopy = run.evert(config, args.bundle)
		logger.info("Eversion written to %s (%d frames)", config.output_dir, homotopy.n_frames)
	elif args.command == "analyze":
		audit = run.analyze(args.frames_dir, args.out, config.intersect, config.n_jobs)
		logger.info("%d frames, %d events, Li-Yau %s", audit.n_frames, len(audit.events), audit.passed)
	elif args.command == "export":
		bundle = args.bundle or str(config.output_path / run.BUNDLE_NAME)
		manifest = run.export(bundle, args.out or config.output_dir, config.plots, config.intersect, config.n_jobs)
		logger.info("Exported %d files", len(manifest["files"]))


def main(argv: Optional[List[str]] = None) -> int:
	registry = ConfigRegistry()
	args = build_parser(registry).parse_args(argv)
	logging.basicConfig(
		level=getattr(logging, str(args.loglevel).upper(), logging.INFO),
		format="%(asctime)s %(levelname)s %(name)s: %(message)s",
	)
	try:
		config = EversionConfig.from_file(args.config, registry.overrides_from_args(args), registry)
		_dispatch(args, config)
	except EversionError as exc:
		logger.error("%s", exc)
		return exit_code(exc)
	except OSError as exc:
		logger.error("%s", exc)
		return EXIT_IO
	return EXIT_OK


if __name__ == "__main__":
	sys.exit(main())
