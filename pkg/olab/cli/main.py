import argparse
import logging
import sys
from pathlib import Path

from olab.api import GEN_TARGETS, VERIFY_TARGETS
from olab.api import run as run_command
from olab.buildings import load_coxeter
from olab.errors import CapacityError, OlabError, WindowError
from olab.models import GroupKind, RunConfig

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def _pair(value: str) -> tuple[str, str]:
    parts = value.split(":")
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected i:j, got {value!r}")
    return parts[0], parts[1]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--d",
        dest="degrees",
        type=int,
        nargs=2,
        default=[3, 3],
        metavar=("D0", "D1"),
        help="Degrees of type-0 and type-1 vertices",
    )
    parser.add_argument("--radius", type=int, default=2, help="Truncation radius")
    parser.add_argument(
        "--group",
        choices=[kind.value for kind in GroupKind],
        default=GroupKind.FULL_AUT.value,
    )
    parser.add_argument("--local", choices=["sym", "cyclic"], default="sym")
    parser.add_argument(
        "--family", choices=["sfull", "sq", "sv1", "sp"], default="sfull"
    )
    parser.add_argument("--q", type=int, default=0, help="Thickening of the sq family")
    parser.add_argument("--k", type=int, default=1, help="Independence radius")
    parser.add_argument("--depth", type=int, default=1, help="Filtration depth")
    parser.add_argument(
        "--plus", action="store_true", help="Also check the normalizer condition"
    )
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0, help="Sampling seed")
    parser.add_argument("--window-radius", type=int, default=None)
    parser.add_argument(
        "--seed-vertices",
        type=int,
        nargs="+",
        default=[],
        help="Vertex ids of a seed subtree (or of P for the sp family)",
    )
    building = parser.add_argument_group("buildings")
    building.add_argument(
        "--building", action="store_true", help="Work on a right-angled building"
    )
    building.add_argument(
        "--coxeter", type=Path, help="Coxeter file with generators, commute, thickness"
    )
    building.add_argument("--generators", nargs="+", default=[])
    building.add_argument("--commute", type=_pair, nargs="+", default=[])
    building.add_argument("--thickness", type=int, nargs="+", default=[])
    building.add_argument("--gallery-depth", type=int, default=1)
    building.add_argument("--chamber", type=int, default=None)
    building.add_argument("--delta-radius", type=int, default=None)
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=Path("output"),
        help="Directory for report files",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Processes for verification instances",
    )
    parser.add_argument(
        "--resume",
        action="store_true",
        help="Skip instances already in the checkpoint of --output-dir",
    )


def _config(args: argparse.Namespace) -> RunConfig:
    generators = tuple(args.generators)
    commute = tuple(args.commute)
    thickness = tuple(args.thickness)
    if args.coxeter is not None:
        with open(args.coxeter, encoding="utf-8") as f:
            coxeter = load_coxeter(f.read())
        generators = coxeter.generators
        commute = tuple(tuple(sorted(pair)) for pair in coxeter.commuting)
        thickness = coxeter.thickness
    building = args.building or args.target == "building"
    return RunConfig(
        command=args.command,
        target=args.target,
        degrees=tuple(args.degrees),
        radius=args.radius,
        group=args.group,
        local=args.local,
        family=args.family,
        q=args.q,
        k=args.k,
        depth=args.depth,
        plus=args.plus,
        samples=args.samples,
        seed=args.seed,
        window_radius=args.window_radius,
        generators=generators,
        commute=commute,
        thickness=thickness,
        gallery_depth=args.gallery_depth,
        seed_vertices=tuple(args.seed_vertices),
        chamber=args.chamber,
        building=building,
        delta_radius=args.delta_radius,
        workers=args.workers,
        resume=args.resume,
    )


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    parser = argparse.ArgumentParser(
        description="Factorization and representation checks on tree groups"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    gen = commands.add_parser("gen", help="Build and dump a tree, building or group")
    gen.add_argument("target", choices=GEN_TARGETS)
    verify = commands.add_parser("verify", help="Run a verification campaign")
    verify.add_argument("target", choices=VERIFY_TARGETS)
    reps = commands.add_parser("reps", help="Count standard representations of a seed")
    reps.set_defaults(target="seed")
    for sub in (gen, verify, reps):
        _add_common(sub)
    args = parser.parse_args()

    try:
        config = _config(args)
        result = run_command(config, checkpoint_dir=args.output_dir)
    except (CapacityError, WindowError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CAPACITY)
    except (OlabError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)

    # Print console output
    print(result["console"], end="")

    output_dir = args.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    for filename, content in sorted(result["files"].items()):
        filepath = output_dir / filename
        with open(filepath, "w", newline="") as f:
            f.write(content)
        logger.info("  Wrote %s", filepath)

    if not result["passed"]:
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    main()
