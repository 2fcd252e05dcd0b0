"""Truncated trees and the subtree combinatorics the filtration families use."""

import json
import logging
from collections import deque
from itertools import combinations

import networkx as nx
from sympy.combinatorics import Permutation

from olab.config import load_limits
from olab.errors import CapacityError, ConfigError, PreconditionError, WindowError
from olab.models import OrientedEdge, Subtree, TruncatedTree

logger = logging.getLogger(__name__)


def build_tree(
    target_degrees_by_type: tuple[int, int],
    radius: int,
    degree_of: dict[int, int] | None = None,
) -> TruncatedTree:
    """Breadth-first ball of radius `radius` around a type-0 base vertex.

    `degree_of` overrides the target degree of individual vertex ids.
    """
    limits = load_limits()
    types = [0]
    adjacency: list[list[int]] = [[]]
    targets = [_target(0, 0, target_degrees_by_type, degree_of)]
    frontier = deque([0])
    depth = {0: 0}
    while frontier:
        v = frontier.popleft()
        if depth[v] >= radius:
            continue
        missing = targets[v] - len(adjacency[v])
        for _ in range(missing):
            w = len(types)
            if w >= limits.max_vertices:
                raise CapacityError(
                    f"Tree exceeds {limits.max_vertices} vertices "
                    "(raise OLAB_MAX_VERTICES)"
                )
            t = 1 - types[v]
            types.append(t)
            adjacency.append([v])
            adjacency[v].append(w)
            targets.append(_target(w, t, target_degrees_by_type, degree_of))
            depth[w] = depth[v] + 1
            frontier.append(w)
    return TruncatedTree(
        types=tuple(types),
        adjacency=tuple(tuple(n) for n in adjacency),
        base=0,
        radius=radius,
        target_degrees=tuple(targets),
    )


def _target(
    v: int, t: int, by_type: tuple[int, int], degree_of: dict[int, int] | None
) -> int:
    if degree_of is not None and v in degree_of:
        return degree_of[v]
    return by_type[t]


def build_semiregular(d0: int, d1: int, radius: int) -> TruncatedTree:
    """The (d0, d1)-semi-regular tree truncated at `radius` around a type-0 base."""
    if d0 < 2 or d1 < 2:
        raise ConfigError(f"Degrees must be at least 2, got ({d0}, {d1})")
    if radius < 0:
        raise ConfigError(f"Radius must be non-negative, got {radius}")
    tree = build_tree((d0, d1), radius)
    tree = TruncatedTree(
        types=tree.types,
        adjacency=tree.adjacency,
        base=tree.base,
        radius=tree.radius,
        target_degrees=tree.target_degrees,
        degrees=(d0, d1),
    )
    logger.debug("Built (%d,%d,%d) tree with %d vertices", d0, d1, radius, tree.size)
    return tree


def make_subtree(tree: TruncatedTree, vertices) -> Subtree:
    """Validate a vertex set as a subtree.

    Raises:
        PreconditionError: If the set is empty, out of range or not connected.
    """
    ids = tuple(sorted(set(vertices)))
    if not ids:
        raise PreconditionError("Empty subtree")
    if ids[0] < 0 or ids[-1] >= tree.size:
        raise PreconditionError(f"Vertex ids out of range: {list(ids)}")
    if len(ids) > 1 and not nx.is_connected(tree.graph.subgraph(ids)):
        raise PreconditionError(f"Vertex set {list(ids)} is not connected")
    return Subtree(ids, tree)


def whole_tree(tree: TruncatedTree) -> Subtree:
    return Subtree(tuple(range(tree.size)), tree)


def distance(tree: TruncatedTree, u: int, v: int) -> int:
    return tree.distances[u][v]


def set_distance(tree: TruncatedTree, a, b) -> int:
    return min(tree.distances[u][v] for u in a for v in b)


def geodesic(tree: TruncatedTree, u: int, v: int) -> list[int]:
    return nx.shortest_path(tree.graph, u, v)


def ball(s: Subtree, r: int) -> Subtree:
    """All vertices within distance r of S.

    Raises:
        WindowError: If the ball would leave the truncation.
    """
    if r < 0:
        raise PreconditionError(f"Radius must be non-negative, got {r}")
    if s.margin < r:
        raise WindowError(
            f"ball of radius {r} around {list(s.vertices)} leaves the truncation "
            f"(margin {s.margin})"
        )
    graph = s.tree.graph
    lengths = nx.multi_source_dijkstra_path_length(graph, set(s.vertices), cutoff=r)
    return Subtree(tuple(sorted(lengths)), s.tree)


def vertex_ball(tree: TruncatedTree, v: int, r: int) -> Subtree:
    return ball(Subtree((v,), tree), r)


def edge_ball(tree: TruncatedTree, u: int, v: int, r: int) -> Subtree:
    return ball(make_subtree(tree, (u, v)), r)


def half_tree(tree: TruncatedTree, w: int, v: int) -> frozenset[int]:
    """Vertices strictly closer to w than to its neighbor v."""
    if v not in tree.adjacency[w]:
        raise PreconditionError(f"Vertices {w} and {v} are not adjacent")
    dist_w = tree.distances[w]
    dist_v = tree.distances[v]
    return frozenset(u for u in range(tree.size) if dist_w[u] < dist_v[u])


def edges_of(s: Subtree) -> list[tuple[int, int]]:
    return [
        (v, w) for v in s.vertices for w in s.tree.adjacency[v] if v < w and w in s
    ]


def complete_subtrees(window: Subtree, max_interior: int) -> list[Subtree]:
    """Complete subtrees inside `window` with at most `max_interior` interior vertices.

    A complete subtree with interior vertices is determined by its interior set,
    which is connected; the subtree is the interior plus all its neighbors.
    """
    tree = window.tree
    limits = load_limits()
    found: list[Subtree] = [Subtree((v,), tree) for v in window.vertices]
    found += [Subtree(e, tree) for e in edges_of(window)]

    candidates = [
        v
        for v in window.vertices
        if tree.is_inside(v)
        and tree.target_degrees[v] >= 2
        and all(w in window for w in tree.adjacency[v])
    ]
    allowed = set(candidates)
    level = {frozenset((v,)) for v in candidates}
    size = 1
    while level and size <= max_interior:
        for interior in level:
            vertices = set(interior)
            for v in interior:
                vertices.update(tree.adjacency[v])
            found.append(Subtree(tuple(sorted(vertices)), tree))
        if len(found) > limits.max_orbit:
            raise CapacityError(f"More than {limits.max_orbit} complete subtrees")
        size += 1
        level = {
            interior | {w}
            for interior in level
            for v in interior
            for w in tree.adjacency[v]
            if w in allowed and w not in interior
        }
    found.sort(key=lambda s: (len(s.interior), len(s), s.vertices))
    return found


def q_set(s: Subtree) -> frozenset[int]:
    """Type-0 vertices whose 2-ball lies in S.

    Raises:
        WindowError: If some type-0 vertex near the boundary cannot be decided.
    """
    tree = s.tree
    result = set()
    for v in s.vertices:
        if tree.types[v] != 0:
            continue
        lengths = nx.single_source_shortest_path_length(tree.graph, v, cutoff=2)
        if not all(w in s for w in lengths):
            continue
        if tree.radius - tree.depths[v] < 2:
            raise WindowError(
                f"Cannot decide whether B({v}, 2) lies in {list(s.vertices)}: "
                "the ball reaches the truncation boundary"
            )
        result.add(v)
    return frozenset(result)


def convex_hull(tree: TruncatedTree, q) -> frozenset[int]:
    points = sorted(set(q))
    if not points:
        raise PreconditionError("Convex hull of an empty set")
    hull = set(points)
    for u, v in combinations(points, 2):
        hull.update(geodesic(tree, u, v))
    return frozenset(hull)


def boundary_edges(s: Subtree) -> list[OrientedEdge]:
    """Oriented edges of S whose terminus is a leaf of S."""
    if len(s) < 2:
        raise PreconditionError(
            f"Subtree {list(s.vertices)} has no edges, boundary edges undefined"
        )
    edges = []
    for leaf in s.leaves:
        origin = next(w for w in s.tree.adjacency[leaf] if w in s)
        edges.append(OrientedEdge(origin, leaf))
    return edges


def translate(s: Subtree, g: Permutation) -> Subtree:
    if g.size != s.tree.size:
        raise WindowError(
            f"Permutation of degree {g.size} does not act on "
            f"a tree of {s.tree.size} vertices"
        )
    image = g.array_form
    return Subtree(tuple(sorted(image[v] for v in s.vertices)), s.tree)


def dump_tree(tree: TruncatedTree) -> str:
    data = {
        "degrees": list(tree.degrees) if tree.degrees else None,
        "radius": tree.radius,
        "base": tree.base,
        "vertices": [
            {"id": v, "type": t, "degree": tree.target_degrees[v]}
            for v, t in enumerate(tree.types)
        ],
        "edges": [list(e) for e in tree.edges()],
    }
    return json.dumps(data, indent=2, sort_keys=True)


def _check_numbering(tree: TruncatedTree) -> None:
    """Base 0, every vertex numbered after its parent, types alternating."""
    if tree.base != 0:
        raise ConfigError(f"Tree file has base {tree.base}, expected 0")
    if tree.types[0] != 0:
        raise ConfigError("Tree file has a base of type 1")
    depth = nx.single_source_shortest_path_length(tree.graph, 0)
    for v in range(1, tree.size):
        parent = next(u for u in tree.adjacency[v] if depth[u] < depth[v])
        if parent > v:
            raise ConfigError(
                f"Vertex {v} is numbered before its parent {parent}; "
                "ids must follow the breadth-first construction"
            )
        if tree.types[parent] == tree.types[v]:
            raise ConfigError(f"Adjacent vertices {parent} and {v} share a type")


def load_tree(content: str) -> TruncatedTree:
    """Parse a tree file.

    Raises:
        ConfigError: If the file is not a valid tree dump.
    """
    try:
        data = json.loads(content)
        vertices = sorted(data["vertices"], key=lambda item: item["id"])
        ids = [item["id"] for item in vertices]
        if ids != list(range(len(vertices))):
            raise ConfigError("Tree file ids must be 0..n-1 without gaps")
        adjacency: list[list[int]] = [[] for _ in vertices]
        for u, v in data["edges"]:
            if not (0 <= u < len(vertices) and 0 <= v < len(vertices)):
                raise ConfigError(f"Edge ({u}, {v}) leaves the vertex range")
            adjacency[u].append(v)
            adjacency[v].append(u)
        degrees = data.get("degrees")
        tree = TruncatedTree(
            types=tuple(item["type"] for item in vertices),
            adjacency=tuple(tuple(sorted(n)) for n in adjacency),
            base=data["base"],
            radius=data["radius"],
            target_degrees=tuple(
                item.get("degree") or degrees[item["type"]] for item in vertices
            ),
            degrees=tuple(degrees) if degrees else None,
        )
    except (KeyError, TypeError, IndexError, json.JSONDecodeError) as e:
        raise ConfigError(f"Invalid tree file: {e}") from e
    if not nx.is_tree(tree.graph):
        raise ConfigError("Tree file does not describe a tree")
    _check_numbering(tree)
    return tree
