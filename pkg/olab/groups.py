"""Finite permutation groups acting on the vertices of a truncated tree."""

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from sympy.combinatorics import Permutation, PermutationGroup, SymmetricGroup

from olab.config import load_limits
from olab.errors import CapacityError, ConfigError, KernelMismatchError, WindowError
from olab.models import GroupKind, GroupSpec, ProductCheck, Subtree, TruncatedTree
from olab.tree import vertex_ball

logger = logging.getLogger(__name__)

type Coloring = dict[tuple[int, int], int]


def identity(n: int) -> Permutation:
    return Permutation(list(range(n)))


def _compose(a: list[int], b: list[int]) -> list[int]:
    """Array form of a after b."""
    return [a[x] for x in b]


def _invert(a: list[int]) -> list[int]:
    inverse = [0] * len(a)
    for i, x in enumerate(a):
        inverse[x] = i
    return inverse


# Colorings and localized moves


def legal_coloring(tree: TruncatedTree, partial: Coloring | None = None) -> Coloring:
    """Complete a per-vertex edge coloring so every vertex sees distinct colors.

    Without a partial coloring, the edge towards the base gets color 0 at every
    non-base vertex and the remaining edges get 1, 2, ... in id order.

    Raises:
        ConfigError: If the partial coloring repeats a color or leaves the alphabet.
    """
    partial = partial or {}
    coloring: Coloring = {}
    for v in range(tree.size):
        d = tree.target_degrees[v]
        given = {w: partial[(v, w)] for w in tree.adjacency[v] if (v, w) in partial}
        for w, c in given.items():
            if not 0 <= c < d:
                raise ConfigError(f"Color {c} on edge ({v},{w}) outside 0..{d - 1}")
        if len(set(given.values())) != len(given):
            colors = sorted(given.values())
            raise ConfigError(f"Repeated colors at vertex {v}: {colors}")
        used = set(given.values())
        parent = tree.parents[v]
        order = list(tree.adjacency[v])
        if parent is not None and parent not in given and 0 not in used:
            given[parent] = 0
            used.add(0)
        free = (c for c in range(d) if c not in used)
        for w in order:
            if w not in given:
                given[w] = next(free)
        for w, c in given.items():
            coloring[(v, w)] = c
    return coloring


def _local_group(spec: GroupSpec, v: int) -> PermutationGroup:
    d = spec.tree.target_degrees[v]
    if spec.kind is not GroupKind.UNIVERSAL_LOCAL:
        return SymmetricGroup(d)
    t = spec.tree.types[v]
    if t not in spec.local_groups:
        raise ConfigError(f"No local group prescribed for type {t}")
    local = spec.local_groups[t]
    if local.degree != d:
        raise ConfigError(
            f"Local group for type {t} acts on {local.degree} colors, "
            f"but vertex {v} has degree {d}"
        )
    return local


@lru_cache(maxsize=256)
def _color_transversal(local: PermutationGroup, a: int) -> dict[int, list[int]]:
    return {b: p.array_form for b, p in local.orbit_transversal(a, pairs=True)}


class _MoveBuilder:
    """Builds tree automorphisms from a local permutation of colors at one vertex."""

    def __init__(self, spec: GroupSpec) -> None:
        self.tree = spec.tree
        self.spec = spec
        self.coloring = legal_coloring(spec.tree, spec.coloring)
        self.by_color = {(v, c): w for (v, w), c in self.coloring.items()}
        self._locals: dict[int, PermutationGroup] = {}

    def local(self, v: int) -> PermutationGroup:
        if v not in self._locals:
            self._locals[v] = _local_group(self.spec, v)
        return self._locals[v]

    def color(self, v: int, w: int) -> int:
        return self.coloring[(v, w)]

    def move(self, v: int, sigma: list[int]) -> list[int]:
        """Apply sigma to the colors at v, propagating by color matching below v."""
        tree = self.tree
        image = list(range(tree.size))
        parent = tree.parents[v]
        for w in tree.adjacency[v]:
            if w == parent:
                continue
            w_img = self.by_color[(v, sigma[self.color(v, w)])]
            if w_img != w:
                self._match_branch(image, w, w_img, v, v)
        return image

    def _match_branch(
        self, image: list[int], u: int, u_img: int, parent: int, parent_img: int
    ) -> None:
        queue = deque([(u, u_img, parent, parent_img)])
        while queue:
            x, x_img, p, p_img = queue.popleft()
            image[x] = x_img
            a = self.color(x, p)
            b = self.color(x_img, p_img)
            if a == b:
                pi = None
            else:
                pi = _color_transversal(self.local(x), a).get(b)
                if pi is None:
                    raise ConfigError(
                        f"Local group at vertex {x} cannot map color {a} to {b}; "
                        "the coloring does not extend"
                    )
            for y in self.tree.adjacency[x]:
                if y == p:
                    continue
                c = self.color(x, y)
                y_img = self.by_color[(x_img, c if pi is None else pi[c])]
                queue.append((y, y_img, x, x_img))


def _padded(sigma: Permutation, d: int) -> list[int]:
    af = list(sigma.array_form)
    return af + list(range(len(af), d))


def truncated_group(spec: GroupSpec) -> PermutationGroup:
    """The group of ball automorphisms fixing the base induced by the modeled group."""
    tree = spec.tree
    builder = _MoveBuilder(spec)
    generators: list[list[int]] = []

    if spec.kind is GroupKind.DIAGONAL:
        generators += _vertex_moves(builder, tree.base)
        for depth in range(1, tree.radius):
            combined = list(range(tree.size))
            for v in range(tree.size):
                if tree.depths[v] != depth or len(tree.children(v)) < 2:
                    continue
                first, second = (builder.color(v, w) for w in tree.children(v)[:2])
                sigma = list(range(tree.target_degrees[v]))
                sigma[first], sigma[second] = second, first
                combined = _compose(builder.move(v, sigma), combined)
            generators.append(combined)
    else:
        for v in range(tree.size):
            if tree.is_inside(v):
                generators += _vertex_moves(builder, v)

    if spec.kind is GroupKind.FULL_AUT_PLUS:
        generators = [
            g
            for g in generators
            if all(tree.types[g[v]] == tree.types[v] for v in range(tree.size))
        ]

    perms = [Permutation(g) for g in generators if g != list(range(tree.size))]
    group = PermutationGroup(perms or [identity(tree.size)])
    logger.debug("Built %s group with %d generators", spec.kind, len(perms))
    return group


def _vertex_moves(builder: _MoveBuilder, v: int) -> list[list[int]]:
    tree = builder.tree
    local = builder.local(v)
    d = tree.target_degrees[v]
    parent = tree.parents[v]
    if parent is None:
        sigmas = local.generators
    else:
        sigmas = local.stabilizer(builder.color(v, parent)).generators
    return [
        builder.move(v, _padded(sigma, d)) for sigma in sigmas if not sigma.is_Identity
    ]


# Stabilizer chains


class StabilizerChain:
    """Transversals of the pointwise stabilizer chain along a prescribed base prefix."""

    def __init__(self, group: PermutationGroup, points: tuple[int, ...]) -> None:
        self.group = group
        self.points = points
        degree = group.degree
        _, strong_gens = group.schreier_sims_incremental(base=list(points))
        self.transversals: list[dict[int, list[int]]] = []
        forms = [g.array_form for g in strong_gens]
        for i, point in enumerate(points):
            prefix = points[:i]
            gens = [af for af in forms if all(af[b] == b for b in prefix)]
            self.transversals.append(_orbit_transversal(gens, point, degree))
        fixing = [
            g
            for g, af in zip(strong_gens, forms, strict=True)
            if not g.is_Identity and all(af[b] == b for b in points)
        ]
        self.fixator = PermutationGroup(fixing or [identity(degree)])

    def sift(self, g: list[int]) -> list[int] | None:
        """Strip g along the base; None when no group element agrees with g there."""
        x = g
        for point, transversal in zip(self.points, self.transversals, strict=True):
            u = transversal.get(x[point])
            if u is None:
                return None
            x = _compose(_invert(u), x)
        return x

    def order(self) -> int:
        result = int(self.fixator.order())
        for transversal in self.transversals:
            result *= len(transversal)
        return result


def _orbit_transversal(
    gens: list[list[int]], point: int, degree: int
) -> dict[int, list[int]]:
    transversal = {point: list(range(degree))}
    queue = deque([point])
    while queue:
        y = queue.popleft()
        for g in gens:
            z = g[y]
            if z not in transversal:
                transversal[z] = _compose(g, transversal[y])
                queue.append(z)
    return transversal


@lru_cache(maxsize=2048)
def stabilizer_chain(
    group: PermutationGroup, points: tuple[int, ...]
) -> StabilizerChain:
    return StabilizerChain(group, points)


def fixator(
    group: PermutationGroup, s: Subtree | frozenset[int] | tuple[int, ...]
) -> PermutationGroup:
    """Pointwise stabilizer of a vertex set."""
    points = s.vertices if isinstance(s, Subtree) else tuple(sorted(s))
    return stabilizer_chain(group, points).fixator


def fixed_points(group: PermutationGroup) -> frozenset[int]:
    forms = [g.array_form for g in group.generators]
    return frozenset(x for x in range(group.degree) if all(af[x] == x for af in forms))


@lru_cache(maxsize=4096)
def fixator_profile(
    group: PermutationGroup, points: tuple[int, ...]
) -> tuple[int, frozenset[int]]:
    """Order and fixed-point set of the fixator of `points`."""
    fix = stabilizer_chain(group, points).fixator
    return int(fix.order()), fixed_points(fix)


def fixator_leq(group: PermutationGroup, small: Subtree, large: Subtree) -> bool:
    """Whether Fix(large) <= Fix(small), read off the fixed points of Fix(large)."""
    _, points = fixator_profile(group, large.vertices)
    return small.vertex_set <= points


# Transporters and products


@dataclass
class Transporter:
    """All g with g(S) inside a target set: cosets rep * Fix(S)."""

    points: tuple[int, ...]
    representatives: list[Permutation]
    images: list[tuple[int, ...]]
    fixator: PermutationGroup = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.representatives) * int(self.fixator.order())

    def __contains__(self, g: Permutation) -> bool:
        af = g.array_form
        return tuple(af[p] for p in self.points) in set(self.images)

    def image_sets(self) -> set[frozenset[int]]:
        return {frozenset(image) for image in self.images}

    def elements(self):
        for rep in self.representatives:
            for f in self.fixator.generate():
                yield f * rep


def transporter_set(
    group: PermutationGroup, s: Subtree, target: Subtree | frozenset[int] | None = None
) -> Transporter:
    """Backtrack over the base images of S, pruning images outside `target`.

    With target None every image is allowed, which enumerates the cosets of Fix(S).
    """
    limits = load_limits()
    points = s.vertices
    chain = stabilizer_chain(group, points)
    if target is None:
        allowed = None
    elif isinstance(target, Subtree):
        allowed = target.vertex_set
    else:
        allowed = frozenset(target)
    if allowed is not None and len(allowed) < len(points):
        return Transporter(points, [], [], chain.fixator)

    reps: list[list[int]] = []
    stack = [(0, list(range(group.degree)))]
    while stack:
        level, prefix = stack.pop()
        if level == len(points):
            reps.append(prefix)
            if len(reps) > limits.max_orbit:
                raise CapacityError(f"Transporter exceeds {limits.max_orbit} cosets")
            continue
        for y, u in sorted(chain.transversals[level].items(), reverse=True):
            if allowed is not None and prefix[y] not in allowed:
                continue
            stack.append((level + 1, _compose(prefix, u)))
    reps.sort(key=lambda r: tuple(r[p] for p in points))
    images = [tuple(r[p] for p in points) for r in reps]
    return Transporter(points, [Permutation(r) for r in reps], images, chain.fixator)


def setwise_stab(group: PermutationGroup, s: Subtree) -> PermutationGroup:
    """Elements mapping S onto itself."""
    found = transporter_set(group, s, s)
    gens = [r for r in found.representatives if not r.is_Identity]
    gens += [g for g in found.fixator.generators if not g.is_Identity]
    return PermutationGroup(gens or [identity(group.degree)])


def orbit_of_tuple(group: PermutationGroup, t: tuple[int, ...]) -> set[tuple[int, ...]]:
    limits = load_limits()
    orbit = {t}
    queue = deque([t])
    gens = [g.array_form for g in group.generators]
    while queue:
        current = queue.popleft()
        for g in gens:
            image = tuple(g[x] for x in current)
            if image not in orbit:
                orbit.add(image)
                if len(orbit) > limits.max_orbit:
                    raise CapacityError(f"Orbit exceeds {limits.max_orbit} tuples")
                queue.append(image)
    return orbit


def canonical_tuple(orbit: set[tuple[int, ...]]) -> tuple[int, ...]:
    return min(orbit)


def in_product(g: Permutation, v: PermutationGroup, u_base: Subtree) -> bool:
    """Whether g lies in V * Fix_G(u_base): some element of V agrees with g on u_base.

    No ambient group is passed. For any G holding both V and g, an element
    v of V agreeing with g on u_base gives v^-1 g in Fix_G(u_base), so the
    answer is the same for every such G.
    """
    chain = stabilizer_chain(v, u_base.vertices)
    return chain.sift(list(g.array_form)) is not None


def subgroup_in_product(
    w: PermutationGroup, v: PermutationGroup, u_base: Subtree
) -> ProductCheck:
    """Whether W lies in V * U for U = Fix_W(u_base), one coset at a time."""
    limits = load_limits()
    cosets = transporter_set(w, u_base)
    index = len(cosets.representatives)
    if index > limits.max_index:
        raise CapacityError(f"Index [W:U] = {index} exceeds {limits.max_index}")
    for rep in cosets.representatives:
        if not in_product(rep, v, u_base):
            return ProductCheck(holds=False, index=index, counterexample=rep)
    return ProductCheck(holds=True, index=index)


def restrict(g: Permutation, s: Subtree) -> Permutation:
    """The action of g on the vertices of S, relabelled 0..|S|-1 in id order."""
    labels = {v: i for i, v in enumerate(s.vertices)}
    af = g.array_form
    try:
        return Permutation([labels[af[v]] for v in s.vertices])
    except KeyError:
        raise WindowError(f"Element does not stabilize {list(s.vertices)}") from None


def quotient_on_subtree(group: PermutationGroup, s: Subtree) -> PermutationGroup:
    """Stab(S) acting on V(S), a model of N_G(Fix S)/Fix S.

    Raises:
        KernelMismatchError: If the normalizer of Fix(S) moves S.
    """
    stab = setwise_stab(group, s)
    _, points = fixator_profile(group, s.vertices)
    normalizer = transporter_set(group, s, points)
    own = transporter_set(group, s, s)
    if normalizer.image_sets() != own.image_sets():
        raise KernelMismatchError(
            f"Fix({list(s.vertices)}) is normalized by elements moving the subtree; "
            "the restriction does not model N_G(U)/U"
        )
    # the restriction kernel is Fix(S) itself
    return PermutationGroup([restrict(g, s) for g in stab.generators])


# Enumeration-backed structure


@dataclass
class ConjugacyClass:
    representative: Permutation
    size: int
    elements: frozenset[Permutation] = field(repr=False)


def check_order(group: PermutationGroup) -> int:
    """The group order, refusing groups above the enumeration cap.

    Raises:
        CapacityError: If |G| exceeds OLAB_MAX_GROUP_ORDER.
    """
    cap = load_limits().max_group_order
    order = int(group.order())
    if order > cap:
        raise CapacityError(
            f"Group of order {order} exceeds OLAB_MAX_GROUP_ORDER={cap}"
        )
    return order


def enumerate_elements(group: PermutationGroup) -> list[Permutation]:
    check_order(group)
    return list(group.generate())


def _class_key(c: ConjugacyClass) -> tuple:
    rep = c.representative
    return (not rep.is_Identity, int(rep.order()), c.size, rep.array_form)


def conjugacy_classes(group: PermutationGroup) -> list[ConjugacyClass]:
    """Classes sorted identity first, then by element order, size, representative."""
    check_order(group)
    classes = []
    for members in group.conjugacy_classes():
        rep = min(members, key=lambda p: p.array_form)
        classes.append(ConjugacyClass(rep, len(members), frozenset(members)))
    classes.sort(key=_class_key)
    cap = load_limits().max_classes
    if len(classes) > cap:
        raise CapacityError(f"{len(classes)} conjugacy classes exceed {cap}")
    return classes


def k_closure(group: PermutationGroup, tree: TruncatedTree, k: int) -> PermutationGroup:
    """Ball automorphisms agreeing with G on every k-ball inside the truncation.

    Only vertices whose k-ball fits in the truncation constrain the result.
    """
    full = truncated_group(GroupSpec(GroupKind.FULL_AUT, tree))
    chains = [
        stabilizer_chain(group, vertex_ball(tree, v, k).vertices)
        for v in range(tree.size)
        if tree.radius - tree.depths[v] >= k
    ]
    closure = group
    for g in enumerate_elements(full):
        af = list(g.array_form)
        agrees = all(chain.sift(af) is not None for chain in chains)
        if agrees and not closure.contains(g):
            closure = PermutationGroup(list(closure.generators) + [g])
    logger.debug("k-closure (k=%d) has order %d", k, closure.order())
    return closure


def group_dump(group: PermutationGroup) -> str:
    data = {
        "degree": group.degree,
        "order": int(group.order()),
        "base": list(group.base),
        "generators": [list(g.array_form) for g in group.generators],
    }
    return json.dumps(data, indent=2, sort_keys=True)


def group_state(group: PermutationGroup) -> tuple[tuple[int, ...], ...]:
    """Generator images as plain tuples, for handing a group to another process."""
    return tuple(tuple(g.array_form) for g in group.generators)


@lru_cache(maxsize=16)
def group_from_state(state: tuple[tuple[int, ...], ...]) -> PermutationGroup:
    return PermutationGroup([Permutation(list(af)) for af in state])
