#!/usr/bin/env python3
"""
ddfem CLI - diffuse domain experiments on composed signed distance functions.

Usage:
    python main.py {render,solve,convergence,validate} --scene <file> [OPTIONS]

Environment Variables:
    DDFEM_THREADS: Worker threads for assembly and sampling (default: 1)
    DDFEM_OUT: Output directory (default: output)
    DDFEM_LANG: Language of progress messages, cn or en (default: en)
    DDFEM_TRANSFORMER: Transformer overriding the scene's (default: unset)

Exit codes:
    0 success, 2 invalid scene or settings, 3 numerical failure.
"""

import argparse
import logging
import os
import sys

from ddfem.cli import cmd_convergence, cmd_render, cmd_solve, cmd_validate
from ddfem.config import RunConfig, get_message
from ddfem.config.scene import load_scene
from ddfem.errors import EXIT_USER_ERROR, DdfemError
from ddfem.fem import default_threads
from ddfem.model import list_problems
from ddfem.transformers import list_transformers

COMMANDS = ("render", "solve", "convergence", "validate")


def _epsilons(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid epsilon list '{text}'")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("epsilons must be positive")
    return values


def parse_args(argv=None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="ddfem - diffuse domain methods on composed SDF geometries",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Render the phase field and a boundary weight of a scene
    python main.py render --scene scenes/two_balls_mixed.json --field phi --field weight:Ball0

    # Solve the transformed problem
    python main.py solve --scene scenes/poisson_ball.json

    # Convergence study over epsilon
    python main.py convergence --scene scenes/poisson_ball.json --epsilons 0.2,0.1,0.05

    # Check geometry and boundary invariants
    python main.py validate --scene scenes/five_balls.json

    # List registered transformers and built-in problems
    python main.py --list-transformers
    python main.py --list-problems
        """,
    )

    parser.add_argument("command", nargs="?", choices=COMMANDS, help="Command to run")

    parser.add_argument("--scene", "-s", type=str, help="Scene JSON file")

    parser.add_argument(
        "--transformer",
        "-t",
        type=str,
        default=os.getenv("DDFEM_TRANSFORMER"),
        help="Transformer to apply (overrides the scene)",
    )

    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default=os.getenv("DDFEM_OUT", "output"),
        help="Output directory (default: output)",
    )

    parser.add_argument(
        "--allow-coarse",
        action="store_true",
        help="Allow grids with h > epsilon / 2",
    )

    parser.add_argument(
        "--field",
        "-f",
        action="append",
        dest="fields",
        metavar="FIELD",
        help="render: sdf, chi, phi, surface_delta or weight:<segment> (repeatable)",
    )

    parser.add_argument(
        "--epsilons",
        type=_epsilons,
        help="convergence: comma separated epsilon sequence",
    )

    parser.add_argument(
        "--threads",
        type=int,
        default=default_threads(),
        help="Worker threads for assembly and sampling (default: 1)",
    )

    parser.add_argument(
        "--lang",
        type=str,
        choices=["cn", "en"],
        default=os.getenv("DDFEM_LANG", "en"),
        help="Language of progress messages (cn or en, default: en)",
    )

    parser.add_argument("--quiet", "-q", action="store_true", help="Suppress progress output")

    parser.add_argument("--verbose", "-v", action="store_true", help="Log solver progress")

    parser.add_argument(
        "--list-transformers", action="store_true", help="List registered transformers and exit"
    )

    parser.add_argument(
        "--list-problems", action="store_true", help="List built-in problems and exit"
    )

    return parser.parse_args(argv)


def handle_list_commands(args, lang: str) -> bool:
    """
    Handle --list-transformers and --list-problems.

    Returns:
        True if a listing was printed (should exit), False otherwise.
    """
    handled = False
    if args.list_transformers:
        print(f"{get_message('available_transformers', lang)}:")
        for name in list_transformers():
            print(f"  - {name}")
        handled = True
    if args.list_problems:
        print(f"{get_message('available_problems', lang)}:")
        for name in list_problems():
            print(f"  - {name}")
        handled = True
    return handled


def run(args: argparse.Namespace) -> int:
    """Run one command; returns the process exit code."""
    config = RunConfig(
        out_dir=args.out,
        threads=args.threads,
        lang=args.lang,
        transformer=args.transformer,
        allow_coarse=args.allow_coarse,
        quiet=args.quiet,
        verbose=args.verbose,
    )
    if not args.scene:
        print("Error: --scene is required", file=sys.stderr)
        return EXIT_USER_ERROR

    scene = load_scene(args.scene)
    if args.command == "render":
        cmd_render(scene, config, args.fields)
    elif args.command == "solve":
        cmd_solve(scene, config)
    elif args.command == "convergence":
        cmd_convergence(scene, config, args.epsilons)
    elif args.command == "validate":
        if not cmd_validate(scene, config):
            return EXIT_USER_ERROR
    return 0


def main(argv=None) -> int:
    """Main entry point."""
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if handle_list_commands(args, args.lang):
        return 0

    if args.command is None:
        print(f"Error: a command is required ({', '.join(COMMANDS)})", file=sys.stderr)
        return EXIT_USER_ERROR

    try:
        return run(args)
    except DdfemError as e:
        print(f"❌ {type(e).__name__}: {e.message}", file=sys.stderr)
        for key, value in e.details.items():
            print(f"   {key}: {value}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
