"""
Run layer for the command line.

A single entry point takes a RunConfig, performs the requested generation,
verification or representation count, and returns console output, report
files (JSON and CSV) as strings, and the overall verdict.
"""

import hashlib
import io
import json
import logging
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from sympy.combinatorics import CyclicGroup, PermutationGroup, SymmetricGroup

from olab.buildings import (
    build_building,
    check_building,
    coxeter_system,
    delta_two_transitivity,
    dump_building,
    load_building,
    s_delta_translation,
    universal_group,
    verify_h_v1,
    verify_ipj,
    wing,
    wing_intersection_law,
)
from olab.campaign import Checkpoint
from olab.errors import ConfigError
from olab.filtration import (
    anchored,
    canonical_seed,
    default_window,
    height_of,
    members,
    sp_family,
    standard_count,
    structural_depth,
    verify_factorization,
    verify_hypothesis,
    verify_ipk,
)
from olab.groups import group_dump, truncated_group
from olab.models import (
    SQ,
    SV1,
    BuildingTree,
    Family,
    GroupKind,
    GroupSpec,
    RunConfig,
    SFull,
    Subtree,
    TruncatedTree,
    family_label,
)
from olab.report import (
    factorization_csv,
    hypothesis_csv,
    ipj_csv,
    ipk_csv,
    print_building,
    print_delta,
    print_factorization,
    print_hypothesis,
    print_ipj,
    print_ipk,
    print_reps,
    print_sp_family,
    print_stratification,
    report_json,
    reps_csv,
    stratification_csv,
    to_jsonable,
)
from olab.tree import (
    build_semiregular,
    complete_subtrees,
    dump_tree,
    load_tree,
    make_subtree,
    vertex_ball,
)

COMMANDS = ("gen", "verify", "reps")
GEN_TARGETS = ("tree", "building", "group")
VERIFY_TARGETS = (
    "hypothesis",
    "stratification",
    "factorization",
    "ipk",
    "ipv1",
    "delta2t",
    "sp",
    "wings",
)
FAMILIES = ("sfull", "sq", "sv1", "sp")
LOCALS = ("sym", "cyclic")


def validate_config(config: RunConfig) -> None:
    """Check a run configuration before any computation.

    Raises:
        ConfigError: If a field is out of range or the command and target disagree.
    """
    if config.command not in COMMANDS:
        raise ConfigError(f"Unknown command {config.command!r}")
    targets = {"gen": GEN_TARGETS, "verify": VERIFY_TARGETS, "reps": ("seed",)}
    if config.target not in targets[config.command]:
        choices = ", ".join(targets[config.command])
        raise ConfigError(
            f"Unknown {config.command} target {config.target!r} (choose from {choices})"
        )
    if config.group not in {kind.value for kind in GroupKind}:
        raise ConfigError(f"Unknown group {config.group!r}")
    if config.local not in LOCALS:
        raise ConfigError(f"Unknown local action {config.local!r}")
    if config.family not in FAMILIES:
        raise ConfigError(f"Unknown family {config.family!r}")
    if len(config.degrees) != 2 or min(config.degrees) < 2:
        raise ConfigError(f"Degrees must be two integers >= 2, got {config.degrees}")
    if config.radius < 0:
        raise ConfigError(f"Radius must be non-negative, got {config.radius}")
    for name in ("q", "depth", "gallery_depth"):
        if getattr(config, name) < 0:
            value = getattr(config, name)
            raise ConfigError(f"{name} must be non-negative, got {value}")
    if config.k < 1:
        raise ConfigError(f"k must be at least 1, got {config.k}")
    if config.samples < 1:
        raise ConfigError(f"samples must be positive, got {config.samples}")
    if config.workers < 1:
        raise ConfigError(f"workers must be at least 1, got {config.workers}")
    if config.window_radius is not None and config.window_radius < 0:
        raise ConfigError(
            f"Window radius must be non-negative, got {config.window_radius}"
        )
    if config.target in ("delta2t", "wings") and not config.building:
        raise ConfigError(f"Target {config.target!r} needs --building")
    if (config.building or config.target == "building") and not config.generators:
        raise ConfigError("A building needs Coxeter generators")
    if config.family == "sp" and not config.seed_vertices:
        raise ConfigError("The sp family needs --seed-vertices for P")
    if config.family == "sp" and config.building:
        raise ConfigError("The sp family is built on trees, not buildings")


@dataclass
class _Context:
    tree: TruncatedTree
    group: PermutationGroup
    window: Subtree
    building: BuildingTree | None = None
    locals_: dict[str, PermutationGroup] | None = None
    checkpoint: Checkpoint | None = None


def _local(config: RunConfig, n: int) -> PermutationGroup:
    return SymmetricGroup(n) if config.local == "sym" else CyclicGroup(n)


def build_group(config: RunConfig, tree: TruncatedTree) -> PermutationGroup:
    kind = GroupKind(config.group)
    local_groups = {}
    if kind is GroupKind.UNIVERSAL_LOCAL:
        local_groups = {t: _local(config, d) for t, d in enumerate(config.degrees)}
    return truncated_group(GroupSpec(kind, tree, local_groups=local_groups))


def _window(config: RunConfig, tree: TruncatedTree) -> Subtree:
    if config.window_radius is None:
        return default_window(tree)
    return vertex_ball(tree, tree.base, config.window_radius)


def _context(config: RunConfig) -> _Context:
    if config.building:
        coxeter = coxeter_system(config.generators, config.commute, config.thickness)
        building = build_building(coxeter, config.gallery_depth)
        locals_ = {
            g: _local(config, q)
            for g, q in zip(coxeter.generators, coxeter.thickness, strict=True)
        }
        if config.group == GroupKind.UNIVERSAL_LOCAL:
            group = universal_group(building, locals_)
        else:
            group = truncated_group(GroupSpec(GroupKind(config.group), building.tree))
        tree = building.tree
        return _Context(tree, group, _window(config, tree), building, locals_)
    tree = build_semiregular(*config.degrees, config.radius)
    return _Context(tree, build_group(config, tree), _window(config, tree))


def _family(config: RunConfig, ctx: _Context) -> Family:
    match config.family:
        case "sfull":
            return SFull()
        case "sq":
            return SQ(config.q)
        case "sv1":
            return SV1()
    p = make_subtree(ctx.tree, config.seed_vertices)
    return sp_family(p, config.k, ctx.group).family


CHECKPOINT_FILE = "checkpoint.jsonl"


def campaign_id(config: RunConfig) -> str:
    """Fingerprint of the settings that decide instance results."""
    data = json.dumps(to_jsonable(config), sort_keys=True)
    return hashlib.sha256(data.encode("utf-8")).hexdigest()[:16]


def run(config: RunConfig, checkpoint_dir: Path | None = None) -> dict:
    """
    Run one command.

    When `checkpoint_dir` is given, verification instances are appended to
    checkpoint.jsonl there, and `config.resume` picks up the finished ones.

    Returns:
        dict with keys:
            - "console": str of all console output
            - "files": dict mapping filename -> content (report.json plus CSVs)
            - "passed": whether every check passed
    """
    # Capture logging output to string buffer
    log_buffer = io.StringIO()
    handler = logging.StreamHandler(log_buffer)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger = logging.getLogger("olab")
    logger.handlers.clear()
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)

    validate_config(config)
    if config.command == "gen":
        kind, payload, passed, files = _gen(config)
    else:
        ctx = _context(config)
        if checkpoint_dir is not None:
            ctx.checkpoint = Checkpoint.open(
                Path(checkpoint_dir) / CHECKPOINT_FILE,
                campaign_id(config),
                resume=config.resume,
            )
        if config.command == "verify":
            kind, payload, passed, files = _verify(config, ctx)
        else:
            kind, payload, passed, files = _reps(config, ctx)
    files["report.json"] = report_json(config, kind, payload, passed)
    return {"console": log_buffer.getvalue(), "files": files, "passed": passed}


def _gen(config: RunConfig):
    logger = logging.getLogger(__name__)
    if config.target == "building":
        coxeter = coxeter_system(config.generators, config.commute, config.thickness)
        building = build_building(coxeter, config.gallery_depth)
        problems = check_building(building)
        dump = dump_building(building)
        reloaded = load_building(dump)
        if reloaded.tree != building.tree or reloaded.colors != building.colors:
            problems.append("building dump does not reload to the same building")
        print_building(building, problems)
        payload = {
            "chambers": len(building.colors),
            "residues": len(building.residue_block),
            "problems": problems,
        }
        return "building", payload, not problems, {"building.json": dump}

    tree = build_semiregular(*config.degrees, config.radius)
    if config.target == "tree":
        dump = dump_tree(tree)
        round_trip = load_tree(dump) == tree
        logger.info(
            "Tree (%d,%d) radius %d: %d vertices, round trip %s",
            *config.degrees,
            config.radius,
            tree.size,
            "ok" if round_trip else "FAILED",
        )
        payload = {"vertices": tree.size, "round_trip": round_trip}
        return "tree", payload, round_trip, {"tree.json": dump}

    group = build_group(config, tree)
    logger.info(
        "Group %s on %d vertices: order %d, %d generators",
        config.group,
        tree.size,
        group.order(),
        len(group.generators),
    )
    return "group", group, True, {"group.json": group_dump(group)}


def _verify(config: RunConfig, ctx: _Context):
    match config.target:
        case "hypothesis":
            if ctx.building is not None:
                report = verify_h_v1(
                    ctx.building,
                    ctx.group,
                    ctx.locals_,
                    ctx.window,
                    workers=config.workers,
                    checkpoint=ctx.checkpoint,
                )
            else:
                report = verify_hypothesis(
                    _family(config, ctx),
                    ctx.group,
                    ctx.window,
                    workers=config.workers,
                    checkpoint=ctx.checkpoint,
                )
            print_hypothesis(report)
            files = {"hypothesis_failures.csv": hypothesis_csv(report)}
            return "hypothesis", report, report.passed, files
        case "stratification":
            family = _family(config, ctx)
            rows = [
                (
                    s,
                    height_of(family, s, ctx.group),
                    structural_depth(family, s, ctx.group),
                )
                for s in members(family, ctx.window, ctx.group)
                if anchored(s)
            ]
            print_stratification(rows, family_label(family))
            ok = all(h == d for _, h, d in rows)
            payload = [{"subtree": s, "height": h, "depth": d} for s, h, d in rows]
            files = {"stratification.csv": stratification_csv(rows)}
            return "stratification", payload, ok, files
        case "factorization":
            return _verify_factorization(config, ctx)
        case "ipk":
            rows = [
                (s, verify_ipk(ctx.group, config.k, s))
                for s in complete_subtrees(ctx.window, len(ctx.window))
                if len(s) >= 2 and s.margin >= config.k - 1
            ]
            print_ipk(config.k, rows)
            ok = all(result.holds for _, result in rows)
            payload = [{"subtree": s, "result": r} for s, r in rows]
            return "ipk", payload, ok, {"ipk.csv": ipk_csv(rows)}
        case "ipv1":
            return _verify_ipv1(ctx)
        case "delta2t":
            radius = config.delta_radius
            if radius is None:
                radius = config.gallery_depth
            result = delta_two_transitivity(ctx.building, ctx.group, radius)
            print_delta(result)
            return "delta2t", result, result.holds, {}
        case "sp":
            p = make_subtree(ctx.tree, config.seed_vertices)
            result = sp_family(p, config.k, ctx.group)
            print_sp_family(result)
            return "sp", result, result.hypotheses_ok, {}
        case "wings":
            return _verify_wings(ctx.building)
    raise ConfigError(f"Unknown verify target {config.target!r}")


def _verify_factorization(config: RunConfig, ctx: _Context):
    family = _family(config, ctx)
    grown = None
    if ctx.building is None:
        bigger = build_semiregular(*config.degrees, config.radius + 1)
        grown = build_group(config, bigger)
    report = verify_factorization(
        family,
        config.depth,
        config.plus,
        ctx.group,
        ctx.window,
        samples=config.samples,
        seed=config.seed,
        grown=grown,
        workers=config.workers,
        checkpoint=ctx.checkpoint,
    )
    print_factorization(report)
    files = {"factorization.csv": factorization_csv(report)}
    return "factorization", report, report.passed, files


def _verify_ipv1(ctx: _Context):
    if ctx.building is not None:
        results = []
        for block in range(len(ctx.building.blocks)):
            results += verify_ipj(ctx.building, ctx.group, block)
        print_ipj(results)
        ok = all(r.holds for r in results)
        return "ipv1", results, ok, {"ipv1.csv": ipj_csv(results)}
    tree = ctx.tree
    rows = [
        (s, verify_ipk(ctx.group, 1, s))
        for v in ctx.window.vertices
        if tree.types[v] == 1 and tree.radius - tree.depths[v] >= 1
        for s in (vertex_ball(tree, v, 1),)
    ]
    print_ipk(1, rows)
    ok = all(result.holds for _, result in rows)
    payload = [{"subtree": s, "result": r} for s, r in rows]
    return "ipv1", payload, ok, {"ipv1.csv": ipk_csv(rows)}


def _verify_wings(building: BuildingTree):
    """Wings over each complete residue partition the chambers; the intersection law."""
    logger = logging.getLogger(__name__)
    tree = building.tree
    problems = []
    checked = 0
    for r, k in sorted(building.residue_block.items()):
        if not tree.is_inside(r):
            continue
        block = building.blocks[k]
        wings = [wing(building, c, block) for c in tree.adjacency[r]]
        covered = frozenset().union(*wings)
        if covered != frozenset(building.chambers) or sum(map(len, wings)) != len(
            covered
        ):
            problems.append(f"wings over residue {r} do not partition the chambers")
        for c in tree.adjacency[r]:
            for size in range(2, len(block) + 1):
                for j in combinations(block, size):
                    checked += 1
                    if not wing_intersection_law(building, c, j):
                        problems.append(f"intersection law fails at {c}, J={j}")
    logger.info(
        "Wings: %d residues, %d intersection checks, %d problems",
        sum(tree.is_inside(r) for r in building.residue_block),
        checked,
        len(problems),
    )
    for problem in problems[:10]:
        logger.info("  %s", problem)
    return "wings", {"checked": checked, "problems": problems}, not problems, {}


def _reps(config: RunConfig, ctx: _Context):
    logger = logging.getLogger(__name__)
    if ctx.building is not None:
        chamber = ctx.building.base if config.chamber is None else config.chamber
        subtree = s_delta_translation(ctx.building, chamber)
        family: Family = SV1()
        logger.info(
            "Seed B(%d, 2) in the incidence tree: its chambers are the chambers "
            "within one block of chamber %d",
            chamber,
            chamber,
        )
    else:
        family = _family(config, ctx)
        if config.seed_vertices:
            subtree = make_subtree(ctx.tree, config.seed_vertices)
        else:
            subtree = vertex_ball(ctx.tree, ctx.tree.base, 1)
    seed = canonical_seed(family, subtree, ctx.group)
    verified = False
    if config.plus:
        report = verify_factorization(
            family,
            max(seed.depth, 1),
            True,
            ctx.group,
            ctx.window,
            samples=config.samples,
            seed=config.seed,
            workers=config.workers,
            checkpoint=ctx.checkpoint,
        )
        verified = report.passed
    count = standard_count(family, seed, ctx.group, verified=verified)
    print_reps(count)
    return "reps", count, True, {"reps.csv": reps_csv(count)}
