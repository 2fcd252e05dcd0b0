"""Semi-regular right-angled buildings as chamber/residue incidence trees.

Chambers are the type-0 vertices and residues of each block I_k the type-1
vertices. A chamber carries one color per generator; colors inside a residue
of block k range over the product of the alphabets of I_k, and the remaining
colors are inherited from the chamber the residue was reached from.
"""

import json
import logging
from collections import deque
from itertools import product

import networkx as nx
from sympy.combinatorics import Permutation, PermutationGroup

from olab.campaign import Checkpoint
from olab.config import load_limits
from olab.errors import CapacityError, ConfigError, PreconditionError, WindowError
from olab.filtration import default_window, verify_hypothesis, verify_ipk
from olab.models import (
    SV1,
    BuildingTree,
    CoxeterSystem,
    DeltaResult,
    HypothesisReport,
    IpjResult,
    StarPartition,
    Subtree,
    TruncatedTree,
    WordNF,
)
from olab.tree import dump_tree, geodesic, load_tree, vertex_ball

logger = logging.getLogger(__name__)


def load_coxeter(content: str) -> CoxeterSystem:
    """Parse a Coxeter file: generators, commuting pairs and thickness per generator.

    Raises:
        ConfigError: If the file is malformed or names unknown generators.
    """
    try:
        data = json.loads(content)
        generators = tuple(data["generators"])
        commute = [tuple(pair) for pair in data.get("commute", [])]
        thickness = data["thickness"]
        if isinstance(thickness, dict):
            thickness = [thickness[g] for g in generators]
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Invalid Coxeter file: {e}") from e
    return coxeter_system(generators, commute, tuple(thickness))


def coxeter_system(
    generators, commute, thickness: tuple[int, ...]
) -> CoxeterSystem:
    """Validate and build a right-angled Coxeter system.

    Raises:
        ConfigError: On repeated or unknown generators, a bad commuting pair, or
            a thickness below 3.
    """
    generators = tuple(generators)
    if not generators or len(set(generators)) != len(generators):
        raise ConfigError(f"Generators must be distinct and non-empty: {generators}")
    if len(thickness) != len(generators):
        raise ConfigError(
            f"{len(thickness)} thickness values for {len(generators)} generators"
        )
    for g, q in zip(generators, thickness, strict=True):
        if not isinstance(q, int) or q < 3:
            raise ConfigError(f"Thickness of {g} must be an integer >= 3, got {q}")
    pairs = set()
    for pair in commute:
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ConfigError(f"Commuting pair must join two generators: {pair}")
        if any(g not in generators for g in pair):
            raise ConfigError(f"Commuting pair {pair} names an unknown generator")
        pairs.add(frozenset(pair))
    return CoxeterSystem(generators, frozenset(pairs), tuple(thickness))


def partition_star(coxeter: CoxeterSystem) -> StarPartition:
    """Blocks of the relation "equal or commuting" when it is an equivalence."""
    graph = nx.Graph()
    graph.add_nodes_from(coxeter.generators)
    graph.add_edges_from(tuple(pair) for pair in coxeter.commuting)
    order = coxeter.index
    blocks = sorted(
        (tuple(sorted(c, key=order)) for c in nx.connected_components(graph)),
        key=lambda b: order(b[0]),
    )
    for block in blocks:
        for j in block:
            for i in block:
                for l in block:
                    if len({i, j, l}) < 3:
                        continue
                    if (
                        coxeter.commute(i, j)
                        and coxeter.commute(j, l)
                        and not coxeter.commute(i, l)
                    ):
                        return StarPartition(tuple(blocks), violation=(i, j, l))
    return StarPartition(tuple(blocks))


def _blocks(coxeter: CoxeterSystem) -> tuple[tuple[str, ...], ...]:
    partition = partition_star(coxeter)
    if not partition.ok:
        i, j, l = partition.violation
        raise PreconditionError(
            f"Commutation is not transitive: {i}-{j} and {j}-{l} commute, {i}-{l} not"
        )
    return partition.blocks


def normal_form(word, coxeter: CoxeterSystem) -> WordNF:
    """Free-product normal form: each block is elementary abelian of exponent 2.

    Raises:
        PreconditionError: If a letter is unknown or the blocks are not well defined.
    """
    blocks = _blocks(coxeter)
    block_of = {g: k for k, block in enumerate(blocks) for g in block}
    stack: list[tuple[int, set[str]]] = []
    for letter in word:
        if letter not in block_of:
            raise PreconditionError(f"Unknown generator {letter!r}")
        k = block_of[letter]
        if stack and stack[-1][0] == k:
            stack[-1][1].symmetric_difference_update({letter})
            if not stack[-1][1]:
                stack.pop()
        else:
            stack.append((k, {letter}))
    return WordNF(tuple((k, frozenset(letters)) for k, letters in stack))


# Construction


def build_building(coxeter: CoxeterSystem, gallery_depth: int) -> BuildingTree:
    """Breadth-first incidence tree out to gallery distance `gallery_depth`.

    The truncation has radius 2D+1 so the deepest chambers keep their residues.

    Raises:
        ConfigError: If the gallery depth is negative or (⋆) fails.
        CapacityError: If the tree exceeds OLAB_MAX_VERTICES.
    """
    if gallery_depth < 0:
        raise ConfigError(f"Gallery depth must be non-negative, got {gallery_depth}")
    partition = partition_star(coxeter)
    if not partition.ok:
        raise ConfigError(
            f"Coxeter system fails (⋆): violation {partition.violation}"
        )
    blocks = partition.blocks
    limits = load_limits()
    sizes = []
    for block in blocks:
        size = 1
        for g in block:
            size *= coxeter.thickness[coxeter.index(g)]
        sizes.append(size)
    radius = 2 * gallery_depth + 1

    types = [0]
    adjacency: list[list[int]] = [[]]
    depths = [0]
    targets = [len(blocks)]
    colors: dict[int, tuple[int, ...]] = {0: (0,) * len(coxeter.generators)}
    residue_block: dict[int, int] = {}
    came_from: dict[int, int | None] = {0: None}

    def add(t: int, parent: int, target: int) -> int:
        v = len(types)
        if v >= limits.max_vertices:
            raise CapacityError(
                f"Building exceeds {limits.max_vertices} vertices "
                "(raise OLAB_MAX_VERTICES)"
            )
        types.append(t)
        adjacency.append([parent])
        adjacency[parent].append(v)
        depths.append(depths[parent] + 1)
        targets.append(target)
        return v

    queue = deque([0])
    while queue:
        c = queue.popleft()
        for k, block in enumerate(blocks):
            if k == came_from[c]:
                continue
            r = add(1, c, sizes[k])
            residue_block[r] = k
            if depths[r] >= radius:
                continue
            positions = [coxeter.index(g) for g in block]
            alphabets = [range(coxeter.thickness[i]) for i in positions]
            own = tuple(colors[c][i] for i in positions)
            for tup in product(*alphabets):
                if tup == own:
                    continue
                d = add(0, r, len(blocks))
                color = list(colors[c])
                for i, y in zip(positions, tup, strict=True):
                    color[i] = y
                colors[d] = tuple(color)
                came_from[d] = k
                queue.append(d)

    uniform = len(set(sizes)) == 1
    tree = TruncatedTree(
        types=tuple(types),
        adjacency=tuple(tuple(n) for n in adjacency),
        base=0,
        radius=radius,
        target_degrees=tuple(targets),
        degrees=(len(blocks), sizes[0]) if uniform else None,
    )
    building = BuildingTree(tree, coxeter, blocks, colors, residue_block, gallery_depth)
    logger.debug(
        "Built building: %d chambers, %d residues",
        len(colors),
        len(residue_block),
    )
    return building


def _positions(building: BuildingTree, k: int) -> list[int]:
    return [building.coxeter.index(g) for g in building.blocks[k]]


def _complete(building: BuildingTree, r: int) -> bool:
    return building.tree.is_inside(r)


def check_building(building: BuildingTree) -> list[str]:
    """Tree and legal-coloring invariants; an empty list means all hold."""
    tree = building.tree
    problems = []
    if not nx.is_tree(tree.graph):
        problems.append("incidence graph is not a tree")
    for v in range(tree.size):
        if tree.is_inside(v) and len(tree.adjacency[v]) != tree.target_degrees[v]:
            problems.append(
                f"vertex {v} has degree {len(tree.adjacency[v])}, "
                f"expected {tree.target_degrees[v]}"
            )
        if any(tree.types[w] == tree.types[v] for w in tree.adjacency[v]):
            problems.append(f"vertex {v} is adjacent to a vertex of its own type")
    for r, k in building.residue_block.items():
        chambers = tree.adjacency[r]
        positions = _positions(building, k)
        own = [tuple(building.colors[c][i] for i in positions) for c in chambers]
        if len(set(own)) != len(own):
            problems.append(f"residue {r}: two chambers share their block colors")
        if _complete(building, r) and len(own) != tree.target_degrees[r]:
            problems.append(f"residue {r}: block colors are not onto")
        others = {
            tuple(y for i, y in enumerate(building.colors[c]) if i not in positions)
            for c in chambers
        }
        if len(others) > 1:
            problems.append(f"residue {r}: colors outside block {k} vary")
    return problems


def dump_building(building: BuildingTree) -> str:
    data = json.loads(dump_tree(building.tree))
    coxeter = building.coxeter
    data["coxeter"] = {
        "generators": list(coxeter.generators),
        "commute": sorted(sorted(pair) for pair in coxeter.commuting),
        "thickness": dict(zip(coxeter.generators, coxeter.thickness, strict=True)),
    }
    data["gallery_depth"] = building.gallery_depth
    data["chambers"] = {
        str(c): {"colors": dict(zip(coxeter.generators, colors, strict=True))}
        for c, colors in sorted(building.colors.items())
    }
    data["residues"] = {
        str(r): {"block": k} for r, k in sorted(building.residue_block.items())
    }
    return json.dumps(data, indent=2, sort_keys=True)


def load_building(content: str) -> BuildingTree:
    """Parse a building dump.

    Raises:
        ConfigError: If the dump is malformed.
    """
    tree = load_tree(content)
    try:
        data = json.loads(content)
        raw = data["coxeter"]
        coxeter = coxeter_system(
            raw["generators"],
            raw["commute"],
            tuple(raw["thickness"][g] for g in raw["generators"]),
        )
        colors = {
            int(c): tuple(item["colors"][g] for g in coxeter.generators)
            for c, item in data["chambers"].items()
        }
        residues = {int(r): item["block"] for r, item in data["residues"].items()}
        depth = data["gallery_depth"]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Invalid building file: {e}") from e
    return BuildingTree(tree, coxeter, _blocks(coxeter), colors, residues, depth)


# Geometry


def _require_residue(building: BuildingTree, r: int) -> None:
    if r not in building.residue_block:
        raise PreconditionError(f"Vertex {r} is not a residue")
    if not _complete(building, r):
        raise WindowError(f"Residue {r} is cut by the truncation")


def _require_chamber(building: BuildingTree, c: int) -> None:
    if c not in building.colors:
        raise PreconditionError(f"Vertex {c} is not a chamber")


def projection(building: BuildingTree, r: int, c: int) -> int:
    """The chamber of residue r closest to chamber c."""
    _require_residue(building, r)
    _require_chamber(building, c)
    if c in building.tree.adjacency[r]:
        return c
    return geodesic(building.tree, r, c)[1]


def residue_of(building: BuildingTree, c: int, k: int) -> int:
    _require_chamber(building, c)
    for r in building.tree.adjacency[c]:
        if building.residue_block[r] == k:
            return r
    raise WindowError(
        f"The block-{k} residue of chamber {c} lies outside the truncation"
    )


def _block_of(building: BuildingTree, j) -> int:
    j = set(j)
    for k, block in enumerate(building.blocks):
        if j and j <= set(block):
            return k
    raise PreconditionError(f"{sorted(j)} is not a non-empty subset of one block")


def wing(building: BuildingTree, c: int, j) -> frozenset[int]:
    """Chambers whose projection to the J-residue of c is c."""
    k = _block_of(building, j)
    r = residue_of(building, c, k)
    _require_residue(building, r)
    indices = [building.coxeter.index(g) for g in j]
    own = building.colors[c]
    found = set()
    for d in building.chambers:
        e = projection(building, r, d)
        if all(building.colors[e][i] == own[i] for i in indices):
            found.add(d)
    return frozenset(found)


def wing_intersection_law(building: BuildingTree, c: int, j) -> bool:
    whole = wing(building, c, j)
    parts = [wing(building, c, (g,)) for g in j]
    return whole == frozenset.intersection(*parts)


def delta(building: BuildingTree, c: int, d: int) -> WordNF:
    """W-distance of two chambers, read off the colors changed along the tree path."""
    _require_chamber(building, c)
    _require_chamber(building, d)
    path = geodesic(building.tree, c, d)
    word = []
    gens = building.coxeter.generators
    for a, b in zip(path[0::2], path[2::2], strict=False):
        changed = [
            i
            for i, (x, y) in enumerate(
                zip(building.colors[a], building.colors[b], strict=True)
            )
            if x != y
        ]
        word += [gens[i] for i in changed]
    return normal_form(word, building.coxeter)


# Groups


def _check_locals(
    building: BuildingTree, locals_: dict[str, PermutationGroup]
) -> None:
    coxeter = building.coxeter
    for g, q in zip(coxeter.generators, coxeter.thickness, strict=True):
        if g not in locals_:
            raise ConfigError(f"No local group for generator {g}")
        local = locals_[g]
        if local.degree != q:
            raise ConfigError(
                f"Local group for {g} acts on {local.degree} colors, thickness is {q}"
            )
        if not local.is_transitive():
            raise ConfigError(f"Local group for {g} is not transitive")


def _lookup(building: BuildingTree) -> dict[int, dict[tuple[int, ...], int]]:
    """Per residue, the chamber carrying each block color tuple."""
    table = {}
    for r, k in building.residue_block.items():
        positions = _positions(building, k)
        table[r] = {
            tuple(building.colors[c][i] for i in positions): c
            for c in building.tree.adjacency[r]
        }
    return table


def _residue_move(
    building: BuildingTree,
    lookup,
    r: int,
    sigmas: dict[int, list[int]],
) -> list[int]:
    """Permute the chambers of r by their colors and match the wings by color."""
    tree = building.tree
    image = list(range(tree.size))
    parent = tree.parents[r]
    k = building.residue_block[r]
    positions = _positions(building, k)
    queue = deque()
    for c in tree.adjacency[r]:
        if c == parent:
            continue
        colors = building.colors[c]
        key = tuple(
            sigmas[i][colors[i]] if i in sigmas else colors[i] for i in positions
        )
        queue.append((c, lookup[r][key], r))
    while queue:
        x, x_img, via = queue.popleft()
        image[x] = x_img
        if tree.types[x] == 0:
            for s in tree.adjacency[x]:
                if s == via:
                    continue
                k2 = building.residue_block[s]
                s_img = next(
                    y for y in tree.adjacency[x_img] if building.residue_block[y] == k2
                )
                queue.append((s, s_img, x))
        else:
            pos = _positions(building, building.residue_block[x])
            for z in tree.adjacency[x]:
                if z == via:
                    continue
                key = tuple(building.colors[z][i] for i in pos)
                queue.append((z, lookup[x_img][key], x))
    return image


def universal_group(
    building: BuildingTree, locals_: dict[str, PermutationGroup]
) -> PermutationGroup:
    """The truncated universal group of the building, fixing the base chamber.

    Raises:
        ConfigError: If a local group is missing, of the wrong degree or intransitive.
    """
    _check_locals(building, locals_)
    tree = building.tree
    lookup = _lookup(building)
    gens = []
    for r in building.residues:
        if not _complete(building, r):
            continue
        parent = tree.parents[r]
        for i in _positions(building, building.residue_block[r]):
            g = building.coxeter.generators[i]
            stab = locals_[g].stabilizer(building.colors[parent][i])
            for sigma in stab.generators:
                if sigma.is_Identity:
                    continue
                af = list(sigma.array_form)
                af += list(range(len(af), building.coxeter.thickness[i]))
                gens.append(_residue_move(building, lookup, r, {i: af}))
    perms = [Permutation(g) for g in gens if g != list(range(tree.size))]
    group = PermutationGroup(perms or [Permutation(list(range(tree.size)))])
    logger.debug("Universal group with %d generators", len(perms))
    return group


def in_universal_group(
    building: BuildingTree, locals_: dict[str, PermutationGroup], g: Permutation
) -> bool:
    """Whether every complete residue sees a color action inside the local groups."""
    tree = building.tree
    af = g.array_form
    if any(tree.types[af[v]] != tree.types[v] for v in range(tree.size)):
        return False
    for r, k in building.residue_block.items():
        if building.residue_block[af[r]] != k:
            return False
        if not _complete(building, r):
            continue
        for i in _positions(building, k):
            action: dict[int, int] = {}
            for c in tree.adjacency[r]:
                a, b = building.colors[c][i], building.colors[af[c]][i]
                if action.setdefault(a, b) != b:
                    return False
            q = building.coxeter.thickness[i]
            if sorted(action) != list(range(q)) or len(set(action.values())) != q:
                return False
            sigma = Permutation([action[y] for y in range(q)])
            if not locals_[building.coxeter.generators[i]].contains(sigma):
                return False
    return True


# Verifications


def verify_ipj(
    building: BuildingTree, group: PermutationGroup, block: int
) -> list[IpjResult]:
    """The IP_V1 order identity at every block-k residue with room for its 1-ball."""
    if not 0 <= block < len(building.blocks):
        raise PreconditionError(f"No block {block}")
    tree = building.tree
    results = []
    for r, k in sorted(building.residue_block.items()):
        if k != block or tree.radius - tree.depths[r] < 2:
            continue
        ipk = verify_ipk(group, 1, vertex_ball(tree, r, 1))
        results.append(
            IpjResult(
                residue=r,
                holds=ipk.holds,
                fixator_order=ipk.fixator_order,
                factor_orders=[(e.terminus, order) for e, order in ipk.factor_orders],
            )
        )
    if not results:
        raise WindowError(f"No block-{block} residue has room for its 1-ball")
    return results


def _two_transitive(local: PermutationGroup) -> bool:
    n = local.degree
    return local.is_transitive() and len(local.stabilizer(0).orbit(1)) == n - 1


def verify_h_v1(
    building: BuildingTree,
    group: PermutationGroup,
    locals_: dict[str, PermutationGroup] | None = None,
    window: Subtree | None = None,
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
) -> HypothesisReport:
    """Pair scan of the SV1 family, exploratory unless all locals are 2-transitive."""
    exploratory = locals_ is not None and not all(
        _two_transitive(local) for local in locals_.values()
    )
    if exploratory:
        logger.warning("Local groups are not all 2-transitive; the run is exploratory")
    window = window or default_window(building.tree)
    return verify_hypothesis(
        SV1(),
        group,
        window,
        exploratory=exploratory,
        workers=workers,
        checkpoint=checkpoint,
    )


def delta_two_transitivity(
    building: BuildingTree, group: PermutationGroup, radius: int
) -> DeltaResult:
    """Chambers at equal W-distance from the base lie in one orbit of its stabilizer."""
    tree = building.tree
    if 2 * radius > tree.radius:
        raise WindowError(
            f"Gallery radius {radius} exceeds the building depth "
            f"{building.gallery_depth}"
        )
    orbit_of = {}
    for n, orbit in enumerate(group.orbits()):
        for x in orbit:
            orbit_of[x] = n
    classes: dict[WordNF, int] = {}
    for d in building.chambers:
        if tree.depths[d] > 2 * radius:
            continue
        key = delta(building, building.base, d)
        first = classes.setdefault(key, d)
        if orbit_of[first] != orbit_of[d]:
            return DeltaResult(False, radius, len(classes), failing_pair=(first, d))
    return DeltaResult(True, radius, len(classes))


def s_delta_translation(building: BuildingTree, c: int) -> Subtree:
    """B(c, 2), after checking its chambers are those at W-distance in one block.

    Raises:
        WindowError: If c lacks margin 2.
        PreconditionError: If the two chamber sets differ.
    """
    _require_chamber(building, c)
    tree = building.tree
    if tree.radius - tree.depths[c] < 2:
        raise WindowError(f"Chamber {c} has no room for its 2-ball")
    b = vertex_ball(tree, c, 2)
    spheres = {
        d for d in building.chambers if len(delta(building, c, d).syllables) <= 1
    }
    chambers = {v for v in b.vertices if tree.types[v] == 0}
    if spheres != chambers:
        raise PreconditionError(
            f"Chambers within one block of {c} differ from the 2-ball chambers"
        )
    return b
