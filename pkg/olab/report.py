import csv
import dataclasses
import io
import json
import logging
from enum import Enum

from sympy.combinatorics import Permutation, PermutationGroup

from olab.models import (
    SP,
    SQ,
    SV1,
    BuildingTree,
    DeltaResult,
    FactorizationReport,
    HypothesisReport,
    IpjResult,
    IpkResult,
    RunConfig,
    SFull,
    SpFamilyResult,
    StandardCount,
    Subtree,
    family_label,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "olab-report/1"
RULE = "=" * 60
SUBRULE = "-" * 54


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _header(title: str) -> list[str]:
    return [f"\n{RULE}", f"  {title}", RULE, ""]


def print_hypothesis(report: HypothesisReport) -> None:
    """Print the pair scan of a family."""
    lines = _header(f"Hypothesis H: {report.family}")
    lines += [
        f"    Members in window:   {report.members:>10}",
        f"    Pairs checked:       {report.pairs_checked:>10}",
        f"    Margin:              {report.margin:>10}",
        f"    Failures:            {len(report.failures):>10}",
    ]
    if report.exploratory:
        lines.append("    (exploratory: local groups are not all 2-transitive)")
    if report.vacuous:
        lines.append("    (vacuous: the window holds no comparable pairs)")
    for failure in report.failures[:10]:
        lines.append(
            f"    T={list(failure.t)} T'={list(failure.t_prime)} "
            f"Fix(T')<=Fix(T)={failure.fixator_contained} "
            f"T<=T'={failure.subtree_contained}"
        )
    lines += ["", f"  RESULT: {_verdict(report.passed)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_factorization(report: FactorizationReport) -> None:
    """Print a factorization campaign with its per-condition tallies."""
    instances = report.instances
    label = "factorization+" if report.plus else "factorization"
    lines = _header(f"{label.capitalize()}: {report.family} at depth {report.depth}")
    lines += [
        f"    Sampling:            {report.sampling}",
        f"    Margin:              {report.margin:>10}",
        f"    Hypothesis H:        {_verdict(report.hypothesis_ok):>10}",
        f"    Instances:           {len(instances):>10}",
        f"    Condition 1 fails:   {sum(not r.cond1 for r in instances):>10}",
        f"    Condition 2 fails:   {sum(not r.cond2 for r in instances):>10}",
    ]
    if report.plus:
        cond3 = sum(r.cond3 is False for r in instances)
        lines.append(f"    Condition 3 fails:   {cond3:>10}")
    recipes = sum(r.route == "recipe" for r in instances)
    lines.append(f"    Witness by recipe:   {recipes:>10}")
    lines += [f"    Note: {note}" for note in report.notes]
    for record in [r for r in instances if not r.passed][:10]:
        lines.append(
            f"    U={list(record.u)} V={list(record.v)} "
            f"cond1={record.cond1} cond2={record.cond2} cond3={record.cond3}"
        )
    lines += ["", f"  RESULT: {_verdict(report.passed)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_ipk(k: int, rows: list[tuple[Subtree, IpkResult]]) -> None:
    lines = _header(f"IP_{k} order identity")
    for s, result in rows:
        product = " * ".join(str(order) for _, order in result.factor_orders)
        lines.append(
            f"    {list(s.vertices)}: |Fix| = {result.fixator_order}, "
            f"product = {product}  {_verdict(result.holds)}"
        )
    ok = all(result.holds for _, result in rows)
    lines += ["", f"  RESULT: {_verdict(ok)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_ipj(results: list[IpjResult]) -> None:
    lines = _header("IP_V1 order identity at residues")
    for result in results:
        product = " * ".join(str(order) for _, order in result.factor_orders)
        lines.append(
            f"    residue {result.residue}: |Fix| = {result.fixator_order}, "
            f"product = {product}  {_verdict(result.holds)}"
        )
    ok = all(result.holds for result in results)
    lines += ["", f"  RESULT: {_verdict(ok)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_delta(result: DeltaResult) -> None:
    lines = _header(f"Delta-2-transitivity up to gallery radius {result.radius}")
    lines.append(f"    W-distance classes:  {result.classes:>10}")
    if result.failing_pair is not None:
        a, b = result.failing_pair
        lines.append(f"    Chambers {a} and {b} share a W-distance but not an orbit")
    lines += ["", f"  RESULT: {_verdict(result.holds)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_stratification(rows: list[tuple[Subtree, int, int]], family: str) -> None:
    """Print the chain height against the structural depth of every member."""
    mismatches = [(s, h, d) for s, h, d in rows if h != d]
    lines = _header(f"Stratification: {family}")
    lines += [
        f"    Members:             {len(rows):>10}",
        f"    Mismatches:          {len(mismatches):>10}",
    ]
    depths: dict[int, int] = {}
    for _, _, d in rows:
        depths[d] = depths.get(d, 0) + 1
    for d in sorted(depths):
        lines.append(f"    Depth {d}:{depths[d]:>24}")
    for s, h, d in mismatches[:10]:
        lines.append(f"    {list(s.vertices)}: height {h}, structural depth {d}")
    lines += ["", f"  RESULT: {_verdict(not mismatches)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_sp_family(result: SpFamilyResult) -> None:
    lines = _header(f"SP family: {family_label(result.family)}")
    lines += [
        f"    Maximal subtrees:    {len(result.sigma):>10}",
        f"    Tiles:               {len(result.family.tiles):>10}",
    ]
    for name, ok in sorted(result.hypotheses.items()):
        lines.append(f"    Hypothesis {name}:       {_verdict(ok):>10}")
    lines += [f"    Note: {note}" for note in result.notes]
    lines += ["", f"  RESULT: {_verdict(result.hypotheses_ok)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


def print_reps(count: StandardCount) -> None:
    """Print the irreps of Aut_G(C) with fixed multiplicities and standard flags."""
    seed = count.seed
    standard = {label.index for label in count.standard}
    lines = _header(
        f"Standard representations: {family_label(seed.family)}, "
        f"seed {list(seed.subtree.vertices)}"
    )
    lines += [
        f"    Seed depth:          {seed.depth:>10}",
        f"    |Aut_G(C)|:          {count.aut_order:>10}",
        f"    Irreps:              {len(count.degrees):>10}",
        f"    Family subgroups:    {len(count.multiplicities[0]):>10}",
        "",
        f"  {'irrep':>7} {'degree':>7}  fixed dims       standard",
        f"  {SUBRULE}",
    ]
    for i, (degree, row) in enumerate(
        zip(count.degrees, count.multiplicities, strict=True)
    ):
        flag = "yes" if i in standard else ""
        lines.append(f"  {i:>7} {degree:>7}  {str(row):<16} {flag}")
    lines += [
        "",
        f"  STANDARD COUNT: {count.count}",
        "  (each standard irrep w lifts to w o p_U on the compact open subgroup;",
        "   the induced representations themselves are not constructed)",
        f"\n{RULE}\n",
    ]
    logger.info("\n".join(lines))


def print_building(building: BuildingTree, problems: list[str]) -> None:
    tree = building.tree
    blocks = ", ".join("{" + ",".join(b) + "}" for b in building.blocks)
    lines = _header(f"Building of gallery depth {building.gallery_depth}")
    lines += [
        f"    Blocks:              {blocks}",
        f"    Chambers:            {len(building.colors):>10}",
        f"    Residues:            {len(building.residue_block):>10}",
        f"    Tree vertices:       {tree.size:>10}",
    ]
    lines += [f"    Problem: {p}" for p in problems]
    lines += ["", f"  RESULT: {_verdict(not problems)}", f"\n{RULE}\n"]
    logger.info("\n".join(lines))


# Machine-readable output


def to_jsonable(obj):
    """Plain JSON data for report dataclasses, subtrees and permutations."""
    match obj:
        case Subtree():
            return list(obj.vertices)
        case SFull() | SQ() | SP() | SV1():
            return family_label(obj)
        case Permutation():
            return list(obj.array_form)
        case PermutationGroup():
            return {"degree": obj.degree, "order": int(obj.order())}
        case Enum():
            return obj.value
        case dict():
            return {str(k): to_jsonable(v) for k, v in obj.items()}
        case list() | tuple():
            return [to_jsonable(v) for v in obj]
        case set() | frozenset():
            return sorted(to_jsonable(v) for v in obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        data = {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
            if f.repr
        }
        passed = getattr(type(obj), "passed", None)
        if isinstance(passed, property):
            data["passed"] = obj.passed
        return data
    return obj


def report_json(config: RunConfig, kind: str, payload, passed: bool) -> str:
    data = {
        "schema": SCHEMA_VERSION,
        "config": to_jsonable(config),
        "kind": kind,
        "passed": passed,
        "result": to_jsonable(payload),
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_ALL)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def _ids(vertices) -> str:
    return " ".join(str(v) for v in vertices) if vertices is not None else ""


def hypothesis_csv(report: HypothesisReport) -> str:
    return _csv(
        ["t", "t_prime", "fixator_contained", "subtree_contained"],
        (
            [_ids(f.t), _ids(f.t_prime), f.fixator_contained, f.subtree_contained]
            for f in report.failures
        ),
    )


def factorization_csv(report: FactorizationReport) -> str:
    return _csv(
        [
            "u",
            "v",
            "witness",
            "route",
            "transporter_size",
            "transporter_stable",
            "cond1",
            "cond2",
            "cond3",
            "passed",
        ],
        (
            [
                _ids(r.u),
                _ids(r.v),
                _ids(r.witness),
                r.route or "",
                r.transporter_size,
                "" if r.transporter_stable is None else r.transporter_stable,
                r.cond1,
                r.cond2,
                "" if r.cond3 is None else r.cond3,
                r.passed,
            ]
            for r in report.instances
        ),
    )


def ipk_csv(rows: list[tuple[Subtree, IpkResult]]) -> str:
    return _csv(
        ["subtree", "fixator_order", "factor_orders", "holds"],
        (
            [
                _ids(s.vertices),
                result.fixator_order,
                " ".join(str(order) for _, order in result.factor_orders),
                result.holds,
            ]
            for s, result in rows
        ),
    )


def ipj_csv(results: list[IpjResult]) -> str:
    return _csv(
        ["residue", "fixator_order", "factor_orders", "holds"],
        (
            [
                r.residue,
                r.fixator_order,
                " ".join(str(order) for _, order in r.factor_orders),
                r.holds,
            ]
            for r in results
        ),
    )


def stratification_csv(rows: list[tuple[Subtree, int, int]]) -> str:
    return _csv(
        ["subtree", "height", "structural_depth"],
        ([_ids(s.vertices), h, d] for s, h, d in rows),
    )


def reps_csv(count: StandardCount) -> str:
    standard = {label.index for label in count.standard}
    return _csv(
        ["irrep", "degree", "fixed_dims", "standard"],
        (
            [i, degree, " ".join(str(m) for m in row), i in standard]
            for i, (degree, row) in enumerate(
                zip(count.degrees, count.multiplicities, strict=True)
            )
        ),
    )
