"""micdam - finite strain anisotropic damage simulations from the command line."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

from micdam.config import load_config
from micdam.errors import MicdamError, exit_code_for
from micdam.geometry import generate, write_mesh
from micdam.logging import configure, get_logger, log_event
from micdam.sim import (
    anisotropy_sweep,
    calibrate_length_scale,
    refinement_sweep,
    run,
    viscosity_sweep,
)
from micdam.sim.output import write_json
from micdam.types import RunConfig
from micdam.variants import get_variant, list_variants

VERSION = "1.0.0"

logger = get_logger("cli")

EXAMPLES = """
Examples:
  micdam run --config config/config.toml
      Run the configured load program

  micdam run -c config/config.toml --override material.variant=C \\
      --override material.length_scale=1300 --out out/C
      Run variant C with another length scale into out/C

  micdam mesh --override mesh.geometry=notched --override mesh.level=1 notched.mesh
      Write a generated mesh in the neutral text format

  micdam calibrate -c config/config.toml --variant C --bracket 100 5000
      Match variant C's peak force to the variant B run

  micdam sweep-viscosity -c config/config.toml --values 1 2 4 10
  micdam sweep-refinement -c config/config.toml --levels 0 1 2
  micdam sweep-anisotropy -c config/config.toml --variants A B C
      Parameter studies; one sub-directory per run plus a JSON summary

  micdam variants
      List micromorphic variants

Exit Codes:
  0  Success
  1  Configuration, geometry or mesh file error
  2  Simulation failure (a load step failed; partial results are written)
  3  Calibration error
  4  Internal error
"""


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c", "--config",
        type=Path,
        metavar="PATH",
        help="TOML run configuration (default: built-in reference parameters)",
    )
    common.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config value, e.g. material.eta_v=2 (repeatable)",
    )
    common.add_argument(
        "--threads",
        type=int,
        metavar="N",
        help="Parallel workers for the element loop (see solver.executor)",
    )
    common.add_argument(
        "--out",
        type=Path,
        metavar="DIR",
        help="Output directory (overrides output.directory)",
    )
    common.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Write JSON-lines audit events to stderr",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser for the CLI."""
    parser = argparse.ArgumentParser(
        prog="micdam",
        description="Finite strain anisotropic damage simulations with micromorphic regularization.",
        epilog=EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {VERSION}",
    )

    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    subparsers.add_parser(
        "run",
        parents=[common],
        help="Run one simulation",
        description="Execute the displacement-controlled load program of a configuration.",
    )

    mesh_parser = subparsers.add_parser(
        "mesh",
        parents=[common],
        help="Generate a mesh file",
        description="Generate the configured mesh and write it in the neutral text format.",
    )
    mesh_parser.add_argument("path", type=Path, help="Mesh file to write")

    calibrate_parser = subparsers.add_parser(
        "calibrate",
        parents=[common],
        help="Calibrate a length scale",
        description="Bisect a uniform length scale until the peak force matches a reference.",
    )
    calibrate_parser.add_argument(
        "--variant",
        help="Variant to calibrate (default: the configured one)",
    )
    calibrate_parser.add_argument(
        "--bracket",
        nargs=2,
        type=float,
        required=True,
        metavar=("LOW", "HIGH"),
        help="Length scale bracket [MPa mm^2]",
    )
    reference = calibrate_parser.add_mutually_exclusive_group()
    reference.add_argument(
        "--reference-variant",
        default="B",
        help="Variant whose run (configured length scale) sets the target peak (default: B)",
    )
    reference.add_argument(
        "--reference-peak",
        type=float,
        metavar="F",
        help="Target peak force [N] instead of a reference run",
    )

    viscosity_parser = subparsers.add_parser(
        "sweep-viscosity",
        parents=[common],
        help="Viscosity study",
        description="Repeat the run for several artificial viscosities eta_v.",
    )
    viscosity_parser.add_argument(
        "--values", nargs="+", type=float, default=[1.0, 2.0, 4.0, 10.0],
        help="eta_v values [MPa s] (default: 1 2 4 10)",
    )

    refinement_parser = subparsers.add_parser(
        "sweep-refinement",
        parents=[common],
        help="Mesh refinement study",
        description="Repeat the run on several refinement levels.",
    )
    refinement_parser.add_argument(
        "--levels", nargs="+", type=int, default=[0, 1, 2],
        help="Refinement levels (default: 0 1 2)",
    )
    refinement_parser.add_argument(
        "--component", default="yy",
        help="Damage component used for the band width (default: yy)",
    )
    refinement_parser.add_argument(
        "--threshold", type=float, default=0.5,
        help="Damage level bounding the band (default: 0.5)",
    )

    anisotropy_parser = subparsers.add_parser(
        "sweep-anisotropy",
        parents=[common],
        help="Anisotropic vs isotropic study",
        description="Paired theta = 1 / theta = 0 runs per variant.",
    )
    anisotropy_parser.add_argument(
        "--variants", nargs="+", default=["A", "B", "C"],
        help="Variants to compare (default: A B C)",
    )

    subparsers.add_parser(
        "variants",
        help="List micromorphic variants",
        description="Show the registered micromorphic variants.",
    )

    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config, args.override)
    if args.threads is not None:
        config = replace(config, solver=replace(config.solver, threads=max(1, args.threads)))
    if args.out is not None:
        config = replace(config, output=replace(config.output, directory=args.out))
    return config


def _guarded(action: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    try:
        return action(args)
    except MicdamError as e:
        log_event(logger, "error", code=e.code, source=e.source, message=e.message)
        print(f"Error: {e}", file=sys.stderr)
        return exit_code_for(e)


def _print_summary(report: dict[str, Any]) -> None:
    print(f"status:          {report['status']}")
    print(f"steps:           {report['steps_committed']}/{report['steps_requested']}")
    print(f"peak force:      {report['peak_force']:.6g} N at u = {report['u_at_peak']:.6g} mm")
    if report["u_at_half_peak"] is not None:
        print(f"u at 0.5 Fmax:   {report['u_at_half_peak']:.6g} mm")
    print(f"dissipation:     {report['dissipation']:.6g} N mm")
    print(f"cut-backs:       {report['cutbacks']}")


def run_simulation(args: argparse.Namespace) -> int:
    """Run one simulation and print its summary."""
    config = _load(args)
    result = run(config)
    _print_summary(result.report)
    print(f"results in {config.output.directory}")
    if result.failure is not None:
        print(f"Error: {result.failure}", file=sys.stderr)
        return exit_code_for(result.failure)
    return 0


def run_mesh(args: argparse.Namespace) -> int:
    """Generate and write a mesh."""
    config = _load(args)
    mesh = generate(config.mesh)
    path = write_mesh(mesh, args.path)
    print(f"{config.mesh.geometry} level {config.mesh.level}: "
          f"{mesh.n_nodes} nodes, {mesh.n_elements} {mesh.element_type} elements -> {path}")
    return 0


def run_calibrate(args: argparse.Namespace) -> int:
    """Calibrate a length scale against a reference peak force."""
    config = _load(args)
    if args.variant is not None:
        config = replace(config, material=config.material.with_variant(args.variant))
    if args.reference_peak is not None:
        reference = args.reference_peak
    else:
        reference_material = config.material.with_variant(args.reference_variant)
        reference_config = replace(
            config,
            material=reference_material,
            output=replace(config.output, directory=config.output.directory / "reference"),
        )
        reference = run(reference_config).peak_force
    result = calibrate_length_scale(config, reference, (args.bracket[0], args.bracket[1]))
    summary = {"variant": config.material.variant.tag, **result.to_dict()}
    path = write_json(summary, config.output.directory / "calibration.json")
    print(f"variant {summary['variant']}: length scale {result.length_scale:.6g} MPa mm^2 "
          f"(peak {result.peak_force:.6g} N vs {reference:.6g} N, {len(result.trials)} runs)")
    print(f"summary in {path}")
    return 0


def run_sweep(args: argparse.Namespace) -> int:
    """Run one of the parameter studies and write its JSON summary."""
    config = _load(args)
    if args.command == "sweep-viscosity":
        summary = viscosity_sweep(config, args.values)
        print(f"peak force spread: {summary['peak_spread']:.3%}")
    elif args.command == "sweep-refinement":
        summary = refinement_sweep(config, args.levels, damage_component=args.component,
                                   threshold=args.threshold)
        for entry in summary["runs"]:
            print(f"level {entry['level']}: {entry['elements']} elements, "
                  f"peak {entry['peak_force']:.6g} N, band width {entry['band_width']:.4g} mm")
    else:
        summary = anisotropy_sweep(config, args.variants)
        for pair in summary["pairs"]:
            print(f"variant {pair['variant']}: isotropic excess {pair['excess']:.3%}")
    path = write_json(summary, config.output.directory / f"{args.command}.json")
    print(f"summary in {path}")
    return 0


def run_variants() -> int:
    """List registered micromorphic variants."""
    print("Available variants:\n")
    for tag in list_variants():
        variant = get_variant(tag)
        print(f"  {tag:<6} {variant.n_dbar} nonlocal field(s)  {variant.description}")
    print("\nUse: micdam run --override material.variant=<tag>")
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "run": run_simulation,
    "mesh": run_mesh,
    "calibrate": run_calibrate,
    "sweep-viscosity": run_sweep,
    "sweep-refinement": run_sweep,
    "sweep-anisotropy": run_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "variants":
        return run_variants()

    if args.command in COMMANDS:
        configure(args.verbose)
        return _guarded(COMMANDS[args.command], args)

    # No command - show help
    parser.print_help()
    return 0


if __name__ == "__main__":
    sys.exit(main())
