"""Subtree families, their depth strata and mechanical factorization checks.

The finite group model fixes the base vertex, so a fixator computed in it is the
true fixator only for subtrees that contain the base. Every check that compares
fixators therefore runs on anchored subtrees (those containing the base); by
translation this loses nothing for groups transitive on type-0 vertices.
"""

import dataclasses
import logging
import random
from collections import defaultdict
from functools import partial

import networkx as nx
from sympy.combinatorics import PermutationGroup

from olab.campaign import Checkpoint, run_instances
from olab.characters import (
    character_table,
    direct_product_witness,
    fixed_multiplicity,
    standard_reps,
)
from olab.config import load_limits
from olab.errors import CapacityError, PreconditionError, WindowError
from olab.groups import (
    fixator,
    fixator_leq,
    fixator_profile,
    group_from_state,
    group_state,
    quotient_on_subtree,
    restrict,
    setwise_stab,
    subgroup_in_product,
    transporter_set,
)
from olab.models import (
    SP,
    SQ,
    SV1,
    FactorizationReport,
    Family,
    HypothesisFailure,
    HypothesisReport,
    InstanceRecord,
    IpkResult,
    IrrepLabel,
    SeedDescriptor,
    SFull,
    SpFamilyResult,
    StandardCount,
    Subtree,
    TruncatedTree,
    family_label,
)
from olab.tree import (
    ball,
    boundary_edges,
    complete_subtrees,
    convex_hull,
    edges_of,
    geodesic,
    half_tree,
    make_subtree,
    q_set,
    set_distance,
    translate,
    vertex_ball,
    whole_tree,
)

logger = logging.getLogger(__name__)


def anchored(s: Subtree) -> bool:
    return s.tree.base in s


def default_window(tree: TruncatedTree) -> Subtree:
    return vertex_ball(tree, tree.base, max(tree.radius - 2, 0))


def _union(tree: TruncatedTree, parts) -> Subtree:
    vertices: set[int] = set()
    for part in parts:
        vertices |= part.vertex_set
    return Subtree(tuple(sorted(vertices)), tree)


def _fits(tree: TruncatedTree, v: int, r: int) -> bool:
    return tree.radius - tree.depths[v] >= r


# Strata


def stratum(
    family: Family, l: int, window: Subtree, group: PermutationGroup | None = None
) -> list[Subtree]:
    """Family subtrees inside `window` whose fixators sit at depth l.

    Raises:
        PreconditionError: If l is negative, or an SP family is given no group.
    """
    if l < 0:
        raise PreconditionError(f"Depth must be non-negative, got {l}")
    match family:
        case SFull():
            return _sfull_stratum(l, window)
        case SQ(q=q):
            return _sq_stratum(q, l, window)
        case SV1():
            levels = _sv1_levels(window, l)
            return levels[l] if l < len(levels) else []
        case SP():
            return _sp_stratum(family, l, window, group)
    raise PreconditionError(f"Unknown family {family!r}")


def _sfull_stratum(l: int, window: Subtree) -> list[Subtree]:
    tree = window.tree
    if l == 0:
        return [Subtree((v,), tree) for v in window.vertices]
    if l == 1:
        return [Subtree(e, tree) for e in edges_of(window)]
    return [s for s in complete_subtrees(window, l - 1) if len(s.interior) == l - 1]


def _sq_stratum(q: int, l: int, window: Subtree) -> list[Subtree]:
    tree = window.tree
    if q < 0:
        raise PreconditionError(f"q must be non-negative, got {q}")
    if (q + l) % 2 == 0:
        r = (l + q) // 2
        centers = [Subtree(e, tree) for e in edges_of(window)]
    else:
        r = (l + q + 1) // 2
        centers = [Subtree((v,), tree) for v in window.vertices]
    found = []
    for center in centers:
        if center.margin < r:
            continue
        b = ball(center, r)
        if b.issubset(window):
            found.append(b)
    return found


def _sv1_levels(window: Subtree, up_to: int | None = None) -> list[list[Subtree]]:
    """Grow B(v,1), v of type 1, by 2-balls around type-0 vertices not yet centered."""
    tree = window.tree
    limits = load_limits()
    level = {
        vertex_ball(tree, v, 1)
        for v in window.vertices
        if tree.types[v] == 1 and _fits(tree, v, 1)
    }
    level = {s for s in level if s.issubset(window)}
    levels = [sorted(level, key=lambda s: s.vertices)]
    while level and (up_to is None or len(levels) <= up_to):
        grown = set()
        for r in level:
            centered = q_set(r)
            for w in r.vertices:
                if tree.types[w] != 0 or w in centered or not _fits(tree, w, 2):
                    continue
                b = vertex_ball(tree, w, 2)
                if b.issubset(window):
                    grown.add(_union(tree, (r, b)))
        if len(grown) > limits.max_orbit:
            raise CapacityError(f"More than {limits.max_orbit} SV1 subtrees")
        level = grown
        if level:
            levels.append(sorted(level, key=lambda s: s.vertices))
    return levels


def _thick(s: Subtree, k: int) -> Subtree:
    return ball(s, k - 1)


def translates(group: PermutationGroup, s: Subtree) -> list[Subtree]:
    """The distinct images g(S), g in G, in lexicographic order."""
    images = transporter_set(group, s).image_sets()
    found = (Subtree(tuple(sorted(i)), s.tree) for i in images)
    return sorted(found, key=lambda t: t.vertices)


def _sp_stratum(
    family: SP, l: int, window: Subtree, group: PermutationGroup | None
) -> list[Subtree]:
    if group is None:
        raise PreconditionError("The SP family needs a group to enumerate translates")
    if l == 0:
        seeds = [_thick(t, family.k) for t in family.tiles]
    elif l == 1:
        seeds = [_thick(family.p, family.k)]
    else:
        return []
    found = {t for s in seeds for t in translates(group, s) if t.issubset(window)}
    return sorted(found, key=lambda s: s.vertices)


def members(
    family: Family, window: Subtree, group: PermutationGroup | None = None
) -> list[Subtree]:
    """All family subtrees inside `window`, across depths."""
    found: list[Subtree] = []
    l = 0
    while True:
        layer = stratum(family, l, window, group)
        if not layer and (l > 0 or not isinstance(family, SP)):
            break
        found += layer
        l += 1
        if isinstance(family, SP) and l > 1:
            break
    return found


def structural_depth(
    family: Family, s: Subtree, group: PermutationGroup | None = None
) -> int:
    """The depth read off the shape of S.

    Raises:
        PreconditionError: If S is not a member of the family.
    """
    tree = s.tree
    match family:
        case SFull():
            if len(s) <= 2:
                return len(s) - 1
            if not s.is_complete or not s.interior:
                raise PreconditionError(f"{list(s.vertices)} is not a complete subtree")
            return len(s.interior) + 1
        case SQ(q=q):
            sub = tree.graph.subgraph(s.vertices)
            centers = sorted(nx.center(sub))
            radius = nx.eccentricity(sub, centers[0])
            if len(centers) == 1:
                r, l = radius, 2 * radius - q - 1
                v = centers[0]
                shape = vertex_ball(tree, v, r) if _fits(tree, v, r) else None
            else:
                r, l = radius - 1, 2 * (radius - 1) - q
                edge = Subtree(tuple(centers), tree)
                shape = ball(edge, r) if edge.margin >= r else None
            if shape is None or shape != s or l < 0:
                raise PreconditionError(
                    f"{list(s.vertices)} is not a ball of sq(q={q})"
                )
            return l
        case SV1():
            centered = q_set(s)
            if not centered:
                if any(
                    tree.types[v] == 1
                    and _fits(tree, v, 1)
                    and vertex_ball(tree, v, 1) == s
                    for v in s.vertices
                ):
                    return 0
            elif _union(tree, (vertex_ball(tree, v, 2) for v in centered)) == s and {
                v for v in convex_hull(tree, centered) if tree.types[v] == 0
            } == set(centered):
                return len(centered)
            raise PreconditionError(f"{list(s.vertices)} is not in the SV1 family")
        case SP():
            for l in (0, 1):
                if s in _sp_stratum(family, l, whole_tree(tree), group):
                    return l
            raise PreconditionError(
                f"{list(s.vertices)} is not in {family_label(family)}"
            )
    raise PreconditionError(f"Unknown family {family!r}")


def height_of(family: Family, s: Subtree, group: PermutationGroup) -> int:
    """Longest chain of family subtrees inside S with shrinking fixators, minus 1.

    Raises:
        PreconditionError: If S itself is not a member of the family.
        CapacityError: If S contains too many family subtrees to search.
    """
    candidates = members(family, s, group)
    if s not in candidates:
        raise PreconditionError(f"{list(s.vertices)} is not in {family_label(family)}")
    limits = load_limits()
    if len(candidates) > limits.max_orbit:
        raise CapacityError(f"Chain search over {len(candidates)} subtrees")
    orders = {c: fixator_profile(group, c.vertices)[0] for c in candidates}
    longest: dict[Subtree, int] = {}
    for c in sorted(set(candidates), key=len):
        below = [
            n
            for d, n in longest.items()
            if d.vertex_set < c.vertex_set and orders[d] > orders[c]
        ]
        longest[c] = 1 + max(below, default=0)
    return longest[s] - 1


def stratum_orders(
    family: Family, l: int, group: PermutationGroup, window: Subtree
) -> list[int]:
    """Distinct fixator orders met in a stratum."""
    layer = stratum(family, l, window, group)
    return sorted({fixator_profile(group, s.vertices)[0] for s in layer})


# Hypothesis and factorization


def _scan_pairs(
    state: tuple[tuple[int, ...], ...], tested: list[Subtree], tp: Subtree
) -> tuple[int, list[HypothesisFailure]]:
    """Compare every tested T against one anchored T'."""
    group = group_from_state(state)
    failures = []
    pairs = 0
    for t in tested:
        if t == tp:
            continue
        pairs += 1
        fix_contained = fixator_leq(group, t, tp)
        sub_contained = t.issubset(tp)
        if fix_contained != sub_contained:
            failures.append(
                HypothesisFailure(t.vertices, tp.vertices, fix_contained, sub_contained)
            )
    return pairs, failures


def _scan_record(scan: tuple[int, list[HypothesisFailure]]) -> dict:
    pairs, failures = scan
    return {"pairs": pairs, "failures": [dataclasses.asdict(f) for f in failures]}


def _scan_from_record(record: dict) -> tuple[int, list[HypothesisFailure]]:
    failures = [
        HypothesisFailure(
            tuple(f["t"]),
            tuple(f["t_prime"]),
            f["fixator_contained"],
            f["subtree_contained"],
        )
        for f in record["failures"]
    ]
    return record["pairs"], failures


def _key(prefix: str, *subtrees: Subtree) -> str:
    return prefix + "|".join(" ".join(map(str, s.vertices)) for s in subtrees)


def verify_hypothesis(
    family: Family,
    group: PermutationGroup,
    window: Subtree,
    exploratory: bool = False,
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
) -> HypothesisReport:
    """Check Fix(T') <= Fix(T) iff T subset of T' on window members.

    T' ranges over anchored members so its fixator in the model is exact. Each
    T' is one instance for the worker pool and the checkpoint.
    """
    tested = [s for s in members(family, window, group) if s.margin >= 1]
    larger = [s for s in tested if anchored(s)]
    scans = run_instances(
        partial(_scan_pairs, group_state(group), tested),
        larger,
        key=lambda tp: _key("hypothesis ", tp),
        encode=_scan_record,
        decode=_scan_from_record,
        workers=workers,
        checkpoint=checkpoint,
    )
    pairs = sum(n for n, _ in scans)
    failures = [f for _, found in scans for f in found]
    report = HypothesisReport(
        family=family_label(family),
        members=len(tested),
        pairs_checked=pairs,
        margin=min((s.margin for s in tested), default=window.margin),
        failures=failures,
        exploratory=exploratory,
        vacuous=pairs == 0,
    )
    logger.debug(
        "Hypothesis on %s: %d pairs, %d failures", report.family, pairs, len(failures)
    )
    return report


def tilde_h(
    family: Family, s: Subtree, group: PermutationGroup
) -> list[tuple[Subtree, PermutationGroup]]:
    """Depth l-1 family subtrees inside S (l the depth of S) with their fixators.

    Raises:
        PreconditionError: If S sits at depth 0.
    """
    l = structural_depth(family, s, group)
    if l < 1:
        raise PreconditionError(f"{list(s.vertices)} sits at depth 0")
    return [(r, fixator(group, r)) for r in stratum(family, l - 1, s, group)]


def _nearest(tree: TruncatedTree, candidates, target: Subtree) -> int:
    return min(candidates, key=lambda y: (set_distance(tree, (y,), target.vertices), y))


def _recipe(family: Family, t: Subtree, tp: Subtree) -> Subtree | None:
    """A combinatorial witness W for the pair (T, T'), read off the family shape."""
    tree = t.tree
    match family:
        case SFull():
            interior = set(t.interior)
            if len(interior) == 1:
                w = next(iter(interior))
                x = _nearest(tree, t.leaves, tp)
                return Subtree(tuple(sorted((w, x))), tree)
            if len(interior) > 1:
                extremal = [
                    w
                    for w in interior
                    if sum(1 for y in tree.adjacency[w] if y in interior) == 1
                ]
                w = max(
                    extremal,
                    key=lambda y: (set_distance(tree, (y,), tp.vertices), -y),
                )
                dropped = {y for y in tree.adjacency[w] if y in t and y not in interior}
                return Subtree(tuple(v for v in t.vertices if v not in dropped), tree)
            return None
        case SQ():
            sub = tree.graph.subgraph(t.vertices)
            centers = sorted(nx.center(sub))
            radius = nx.eccentricity(sub, centers[0])
            if len(centers) == 1:
                v = centers[0]
                x = _nearest(tree, tree.adjacency[v], tp)
                return ball(Subtree(tuple(sorted((v, x))), tree), radius - 1)
            x = _nearest(tree, centers, tp)
            return vertex_ball(tree, x, radius - 1)
        case SV1():
            return _star_witness(t, tp)
    return None


def _star_witness(t: Subtree, tp: Subtree) -> Subtree | None:
    tree = t.tree
    centered = q_set(t)
    if len(centered) == 1:
        (v,) = centered
        others = [y for y in tp.vertices if y != v]
        if not others:
            return None
        y = min(others, key=lambda y: (tree.distances[v][y], y))
        return vertex_ball(tree, geodesic(tree, v, y)[1], 1)
    target = q_set(tp)
    if not target:
        return None
    v = max(centered, key=lambda u: (set_distance(tree, (u,), target), -u))
    return _union(tree, (vertex_ball(tree, u, 2) for u in centered - {v}))


def _sample(pairs, samples: int, seed: int) -> tuple[list, str]:
    if len(pairs) <= samples:
        return pairs, "exhaustive"
    rng = random.Random(seed)
    buckets = defaultdict(list)
    for t, tp in pairs:
        buckets[set_distance(t.tree, t.vertices, tp.vertices)].append((t, tp))
    for bucket in buckets.values():
        rng.shuffle(bucket)
    chosen = []
    queues = [buckets[d] for d in sorted(buckets)]
    while len(chosen) < samples:
        for queue in queues:
            if queue and len(chosen) < samples:
                chosen.append(queue.pop())
    chosen.sort(key=lambda p: (p[0].vertices, p[1].vertices))
    return chosen, f"stratified {samples}/{len(pairs)} seed={seed}"


def _check_instance(
    family: Family,
    l: int,
    plus: bool,
    state: tuple[tuple[int, ...], ...],
    grown_state: tuple[tuple[int, ...], ...] | None,
    pair: tuple[Subtree, Subtree],
) -> InstanceRecord:
    group = group_from_state(state)
    grown = None if grown_state is None else group_from_state(grown_state)
    t, tp = pair
    candidates = [r for r in stratum(family, l - 1, t, group) if anchored(r)]
    try:
        recipe = _recipe(family, t, tp)
    except (WindowError, PreconditionError):
        recipe = None
    ordered = [recipe] if recipe in candidates else []
    ordered += [r for r in candidates if r != recipe]

    v_group = fixator(group, tp)
    witness = route = failure = None
    for r in ordered:
        check = subgroup_in_product(fixator(group, r), v_group, t)
        if check.holds:
            witness = r
            route = "recipe" if r == recipe else "search"
            break
        if failure is None and check.counterexample is not None:
            failure = list(check.counterexample.array_form)

    inside = transporter_set(group, t, tp)
    _, points = fixator_profile(group, tp.vertices)
    conjugating = transporter_set(group, t, points)
    same = set(inside.images) == set(conjugating.images)
    stable = None
    if grown is not None:
        stable = set(transporter_set(grown, t, tp).images) == set(inside.images)

    cond3 = None
    if plus:
        cond3 = all(
            translate(t, g) == t
            for r in candidates
            for g in fixator(group, r).generators
        )
    return InstanceRecord(
        u=t.vertices,
        v=tp.vertices,
        witness=witness.vertices if witness else None,
        route=route,
        failure=None if witness else failure,
        transporter_size=inside.size,
        transporter_stable=stable,
        cond1=witness is not None,
        cond2=same and stable is not False,
        cond3=cond3,
    )


def _instance_from_record(record: dict) -> InstanceRecord:
    witness = record["witness"]
    return InstanceRecord(
        **{
            **record,
            "u": tuple(record["u"]),
            "v": tuple(record["v"]),
            "witness": None if witness is None else tuple(witness),
        }
    )


ANCHORED_COND3 = "condition 3 is checked for anchored W of depth l-1 inside U only"


def verify_factorization(
    family: Family,
    l: int,
    plus: bool,
    group: PermutationGroup,
    window: Subtree,
    samples: int = 500,
    seed: int = 0,
    grown: PermutationGroup | None = None,
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
) -> FactorizationReport:
    """Check the factorization conditions at depth l on anchored window instances.

    `grown` is the same group modeled on a tree one ring larger, with the same
    vertex ids on the common part; it backs the transporter stability check.
    Instances run on `workers` processes and are logged to `checkpoint`.

    Raises:
        PreconditionError: If l < 1.
    """
    if l < 1:
        raise PreconditionError(f"Factorization is checked at depth >= 1, got {l}")
    hypothesis = verify_hypothesis(
        family, group, window, workers=workers, checkpoint=checkpoint
    )
    if not hypothesis.passed:
        logger.warning(
            "Hypothesis fails on %d pairs; factorization results are flagged",
            len(hypothesis.failures),
        )
    us = [t for t in stratum(family, l, window, group) if anchored(t) and t.margin >= 1]
    vs = [t for t in members(family, window, group) if anchored(t) and t.margin >= 1]
    pairs = [(t, tp) for t in us for tp in vs if not fixator_leq(group, t, tp)]
    chosen, sampling = _sample(pairs, samples, seed)
    logger.info(
        "Checking %d of %d instances at depth %d (%s)",
        len(chosen),
        len(pairs),
        l,
        sampling,
    )
    grown_state = None if grown is None else group_state(grown)
    instances = run_instances(
        partial(_check_instance, family, l, plus, group_state(group), grown_state),
        chosen,
        key=lambda pair: _key(f"depth {l} plus={plus} ", *pair),
        encode=dataclasses.asdict,
        decode=_instance_from_record,
        workers=workers,
        checkpoint=checkpoint,
    )
    used = [t for pair in chosen for t in pair]
    return FactorizationReport(
        family=family_label(family),
        depth=l,
        plus=plus,
        margin=min((s.margin for s in used), default=window.margin),
        sampling=sampling,
        hypothesis_ok=hypothesis.passed and not hypothesis.vacuous,
        instances=instances,
        notes=[ANCHORED_COND3] if plus else [],
    )


def reverify_instance(
    record: InstanceRecord,
    family: Family,
    l: int,
    group: PermutationGroup,
    tree: TruncatedTree,
) -> bool:
    """Re-check a success record from its witness alone."""
    if record.witness is None:
        return False
    t = make_subtree(tree, record.u)
    tp = make_subtree(tree, record.v)
    r = make_subtree(tree, record.witness)
    u_group = fixator(group, t)
    if not all(g.array_form[x] == x for g in u_group.generators for x in r.vertices):
        return False
    if not subgroup_in_product(fixator(group, r), fixator(group, tp), t).holds:
        return False
    return height_of(family, r, group) == l - 1


def l_qk(q: int, k: int) -> int:
    """The depth from which the ball filtration factorizes under IP_k."""
    if q < 0 or k < 1:
        raise PreconditionError(f"Need q >= 0 and k >= 1, got q={q}, k={k}")
    if q % 2 == 0:
        return max(1, 2 * k - q - 1)
    return max(1, 2 * k - q)


def verify_ipk(group: PermutationGroup, k: int, s: Subtree) -> IpkResult:
    """Compare |Fix(S^(k-1))| with the product of its one-sided factors.

    The factor at a boundary edge (o, t) fixes S^(k-1) and everything closer to
    o than to t; factor supports are disjoint, so equal orders certify the
    product decomposition.

    Raises:
        PreconditionError: If S is not complete or has no edge.
        WindowError: If S^(k-1) leaves the truncation.
    """
    if k < 1:
        raise PreconditionError(f"k must be at least 1, got {k}")
    if len(s) < 2 or not s.is_complete:
        raise PreconditionError(
            f"{list(s.vertices)} is not a complete subtree with an edge"
        )
    thick = ball(s, k - 1)
    total, _ = fixator_profile(group, thick.vertices)
    factors = []
    product = 1
    for edge in boundary_edges(s):
        side = half_tree(s.tree, edge.origin, edge.terminus) | thick.vertex_set
        order, _ = fixator_profile(group, tuple(sorted(side)))
        factors.append((edge, order))
        product *= order
    return IpkResult(holds=product == total, fixator_order=total, factor_orders=factors)


def sp_family(p: Subtree, k: int, group: PermutationGroup) -> SpFamilyResult:
    """Build the SP family of P and check its four standing hypotheses in the window.

    Raises:
        PreconditionError: If P is not complete or has no interior vertex.
    """
    if k < 1:
        raise PreconditionError(f"k must be at least 1, got {k}")
    if not p.is_complete or not p.interior:
        raise PreconditionError(
            f"{list(p.vertices)} must be complete with an interior vertex"
        )
    tree = p.tree
    proper = [
        s for s in complete_subtrees(p, len(p.interior)) if s.vertex_set != p.vertex_set
    ]
    sigma = [s for s in proper if not any(s.vertex_set < o.vertex_set for o in proper)]
    thick = {s: _thick(s, k) for s in sigma}
    p_thick = _thick(p, k)
    tiles = [
        r
        for r in sigma
        if not any(fixator_leq(group, thick[r], thick[o]) for o in sigma if o != r)
    ]

    def order(s: Subtree) -> int:
        return fixator_profile(group, s.vertices)[0]

    def strictly_below(small_fix: Subtree, large_fix: Subtree) -> bool:
        """Fix(small_fix) is a proper subgroup of Fix(large_fix)."""
        return fixator_leq(group, large_fix, small_fix) and order(small_fix) < order(
            large_fix
        )

    images = {r: translates(group, thick[r]) for r in tiles}
    h1 = not any(
        strictly_below(thick[r], b) for r in tiles for o in tiles for b in images[o]
    )
    h2 = all(order(p_thick) != order(thick[r]) for r in tiles) and all(
        p.issubset(b)
        for r in tiles
        for b in images[r]
        if strictly_below(b, p_thick)
    )
    h3 = all(
        p_thick.issubset(b)
        for v in range(tree.size)
        for n in range(tree.radius + 1)
        if _fits(tree, v, n) and tree.depths[v] <= n
        for b in (vertex_ball(tree, v, n),)
        if fixator_leq(group, p_thick, b)
    )
    h4 = True
    for image in translates(group, p):
        if image == p:
            continue
        other = ball(image, k - 1)
        if fixator_leq(group, p_thick, other) and fixator_leq(group, other, p_thick):
            h4 = False
            break
    notes = ["translates range over the base stabilizer inside the truncation"]
    if not tiles:
        notes.append("no tile survives the fixator comparison")
    result = SpFamilyResult(
        family=SP(p, k, tuple(tiles)),
        sigma=sigma,
        hypotheses={"h1": h1, "h2": h2, "h3": h3, "h4": h4},
        notes=notes,
    )
    logger.debug(
        "SP family of %s: %d tiles of %d", list(p.vertices), len(tiles), len(sigma)
    )
    return result


# Seeds and representations


def canonical_seed(
    family: Family, s: Subtree, group: PermutationGroup
) -> SeedDescriptor:
    """The lexicographically least translate of S, with its depth."""
    rep = translates(group, s)[0]
    return SeedDescriptor(family, rep, structural_depth(family, s, group))


def _images_in_quotient(
    groups: list[PermutationGroup], c: Subtree
) -> list[PermutationGroup]:
    images = []
    for h in groups:
        try:
            images.append(PermutationGroup([restrict(g, c) for g in h.generators]))
        except WindowError as e:
            raise PreconditionError(
                "A fixator in the family does not normalize "
                f"Fix({list(c.vertices)}): {e}"
            ) from e
    return images


def standard_count(
    family: Family,
    seed: SeedDescriptor,
    group: PermutationGroup,
    verified: bool = False,
) -> StandardCount:
    """Count the standard irreps of Aut_G(C) = Stab(C)/Fix(C) for the seed C.

    Raises:
        PreconditionError: If the seed sits at depth 0.
        KernelMismatchError: Propagated from quotient_on_subtree.
    """
    if seed.depth < 1:
        raise PreconditionError("Seeds at depth 0 have no smaller family members")
    if not verified:
        logger.warning(
            "Factorization+ not verified at depth %d; counting anyway", seed.depth
        )
    c = seed.subtree
    quotient = quotient_on_subtree(group, c)
    subgroups = _images_in_quotient([fix for _, fix in tilde_h(family, c, group)], c)
    table = character_table(quotient)
    standard = standard_reps(table, subgroups)
    multiplicities = [
        [fixed_multiplicity(table, i, h) for h in subgroups] for i in range(len(table))
    ]
    return StandardCount(
        seed=seed,
        aut_order=table.order,
        degrees=table.degrees,
        multiplicities=multiplicities,
        standard=standard,
    )


def existence_witness(
    group: PermutationGroup, s: Subtree, parts: list[Subtree]
) -> IrrepLabel | None:
    """An irrep of Stab(S)/Fix(S) with no fixed vectors under every Fix(S_i) image.

    Raises:
        PreconditionError: If the parts are not distinct subtrees of S with
            pairwise union S, are not permuted by Stab(S), or do not sit
            strictly between Fix(S) and Stab(S).
    """
    if len({part.vertex_set for part in parts}) != len(parts):
        raise PreconditionError("Parts must be distinct")
    for i, a in enumerate(parts):
        if not a.issubset(s):
            raise PreconditionError(f"Part {i} is not inside {list(s.vertices)}")
        for j in range(i + 1, len(parts)):
            if a.vertex_set | parts[j].vertex_set != s.vertex_set:
                raise PreconditionError(f"Parts {i} and {j} do not cover the subtree")
    stab = setwise_stab(group, s)
    part_sets = {part.vertex_set for part in parts}
    for g in stab.generators:
        for i, part in enumerate(parts):
            if translate(part, g).vertex_set not in part_sets:
                raise PreconditionError(f"Stab moves part {i} off the list")
    fix_order = fixator_profile(group, s.vertices)[0]
    stab_order = int(stab.order())
    for i, part in enumerate(parts):
        order = fixator_profile(group, part.vertices)[0]
        if not fix_order < order < stab_order:
            raise PreconditionError(
                f"Fix(part {i}) of order {order} is not strictly between "
                f"{fix_order} and {stab_order}"
            )
    quotient = quotient_on_subtree(group, s)
    subgroups = _images_in_quotient([fixator(group, part) for part in parts], s)
    return direct_product_witness(quotient, subgroups)
