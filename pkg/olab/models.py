from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import ClassVar

import networkx as nx
from sympy.combinatorics import Permutation, PermutationGroup


@dataclass(frozen=True)
class TruncatedTree:
    """A finite ball of a locally finite bicolored tree, vertex ids in BFS order."""

    types: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    base: int
    radius: int
    target_degrees: tuple[int, ...]
    degrees: tuple[int, int] | None = None  # set for semi-regular trees

    @property
    def size(self) -> int:
        return len(self.types)

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.size))
        for v, neighbors in enumerate(self.adjacency):
            graph.add_edges_from((v, w) for w in neighbors if v < w)
        return graph

    @cached_property
    def depths(self) -> tuple[int, ...]:
        lengths = nx.single_source_shortest_path_length(self.graph, self.base)
        return tuple(lengths[v] for v in range(self.size))

    @cached_property
    def distances(self) -> dict[int, dict[int, int]]:
        return dict(nx.all_pairs_shortest_path_length(self.graph))

    @cached_property
    def parents(self) -> tuple[int | None, ...]:
        depths = self.depths
        return tuple(
            next((w for w in self.adjacency[v] if depths[w] == depths[v] - 1), None)
            for v in range(self.size)
        )

    def children(self, v: int) -> tuple[int, ...]:
        depth = self.depths[v]
        return tuple(w for w in self.adjacency[v] if self.depths[w] == depth + 1)

    def is_inside(self, v: int) -> bool:
        """True when v carries its full target degree in the truncation."""
        return self.depths[v] < self.radius

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v in range(self.size) for w in self.adjacency[v] if v < w]


@dataclass(frozen=True)
class Subtree:
    """A subtree identified with its sorted vertex-id tuple."""

    vertices: tuple[int, ...]
    tree: TruncatedTree = field(compare=False, repr=False)

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def degree_in(self, v: int) -> int:
        return sum(1 for w in self.tree.adjacency[v] if w in self.vertex_set)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if self.degree_in(v) <= 1)

    @cached_property
    def interior(self) -> tuple[int, ...]:
        return tuple(
            v
            for v in self.vertices
            if self.degree_in(v) >= 2
            and self.degree_in(v) == self.tree.target_degrees[v]
        )

    @cached_property
    def is_complete(self) -> bool:
        return len(self.leaves) + len(self.interior) == len(self.vertices)

    @cached_property
    def margin(self) -> int:
        """Largest r with ball(S, r) inside the truncation."""
        return self.tree.radius - max(self.tree.depths[v] for v in self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.vertex_set

    def issubset(self, other: "Subtree") -> bool:
        return self.vertex_set <= other.vertex_set


@dataclass(frozen=True)
class OrientedEdge:
    origin: int
    terminus: int

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.terminus, self.origin)


class GroupKind(StrEnum):
    FULL_AUT = "full-aut"
    FULL_AUT_PLUS = "full-aut-plus"
    UNIVERSAL_LOCAL = "universal"
    DIAGONAL = "diagonal"  # control group with sphere-wide generators


@dataclass
class GroupSpec:
    kind: GroupKind
    tree: TruncatedTree
    local_groups: dict[int, PermutationGroup] = field(default_factory=dict)  # by type
    coloring: dict[tuple[int, int], int] | None = None  # (vertex, neighbor) -> color


# Filtration families


@dataclass(frozen=True)
class SFull:
    """All complete finite subtrees."""

    name: ClassVar[str] = "sfull"


@dataclass(frozen=True)
class SQ:
    """Balls B(v, r) and B(e, r) thickened by q."""

    q: int
    name: ClassVar[str] = "sq"


@dataclass(frozen=True)
class SP:
    """The family generated by the tiles of a complete subtree P."""

    p: Subtree
    k: int
    tiles: tuple[Subtree, ...] = ()
    name: ClassVar[str] = "sp"


@dataclass(frozen=True)
class SV1:
    """Unions of 2-balls around type-0 vertices, grown from residue stars."""

    name: ClassVar[str] = "sv1"


type Family = SFull | SQ | SP | SV1


def family_label(family: Family) -> str:
    match family:
        case SQ(q=q):
            return f"sq(q={q})"
        case SP(p=p, k=k):
            return f"sp(P={list(p.vertices)}, k={k})"
        case _:
            return family.name


@dataclass(frozen=True)
class SeedDescriptor:
    family: Family
    subtree: Subtree
    depth: int


@dataclass
class HypothesisFailure:
    t: tuple[int, ...]
    t_prime: tuple[int, ...]
    fixator_contained: bool  # Fix(T') <= Fix(T)
    subtree_contained: bool  # T subset of T'


@dataclass
class HypothesisReport:
    family: str
    members: int
    pairs_checked: int
    margin: int
    failures: list[HypothesisFailure] = field(default_factory=list)
    exploratory: bool = False
    vacuous: bool = False

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ProductCheck:
    holds: bool
    index: int  # [W : U]
    counterexample: Permutation | None = None


@dataclass
class InstanceRecord:
    u: tuple[int, ...]
    v: tuple[int, ...]
    witness: tuple[int, ...] | None
    route: str | None  # "recipe" or "search"
    failure: list[int] | None  # image array of an element outside VU
    transporter_size: int
    transporter_stable: bool | None  # None when no grown window was supplied
    cond1: bool
    cond2: bool
    cond3: bool | None = None

    @property
    def passed(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3 is not False


@dataclass
class FactorizationReport:
    family: str
    depth: int
    plus: bool
    margin: int
    sampling: str
    hypothesis_ok: bool
    instances: list[InstanceRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hypothesis_ok and all(r.passed for r in self.instances)


@dataclass
class IpkResult:
    holds: bool
    fixator_order: int
    factor_orders: list[tuple[OrientedEdge, int]]


@dataclass
class SpFamilyResult:
    family: SP
    sigma: list[Subtree]
    hypotheses: dict[str, bool]
    notes: list[str] = field(default_factory=list)

    @property
    def hypotheses_ok(self) -> bool:
        return all(self.hypotheses.values())


# Character theory


@dataclass(frozen=True)
class IrrepLabel:
    index: int
    degree: int
    standard: bool | None = None  # standard for the family it was scanned against


@dataclass
class StandardCount:
    seed: SeedDescriptor
    aut_order: int
    degrees: list[int]
    multiplicities: list[list[int]]  # [irrep][family member]
    standard: list[IrrepLabel]

    @property
    def count(self) -> int:
        return len(self.standard)


# Buildings


@dataclass(frozen=True)
class CoxeterSystem:
    """A right-angled Coxeter system with thickness q_i per generator."""

    generators: tuple[str, ...]
    commuting: frozenset[frozenset[str]]  # pairs with m_ij = 2; all others infinite
    thickness: tuple[int, ...]

    def index(self, generator: str) -> int:
        return self.generators.index(generator)

    def commute(self, i: str, j: str) -> bool:
        return frozenset((i, j)) in self.commuting

    def m(self, i: str, j: str) -> int | float:
        if i == j:
            return 1
        return 2 if self.commute(i, j) else float("inf")


@dataclass(frozen=True)
class StarPartition:
    blocks: tuple[tuple[str, ...], ...]
    violation: tuple[str, str, str] | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None


@dataclass(frozen=True)
class WordNF:
    syllables: tuple[tuple[int, frozenset[str]], ...]  # (block index, letters)

    @property
    def length(self) -> int:
        return sum(len(letters) for _, letters in self.syllables)

    def __str__(self) -> str:
        return "".join("".join(sorted(letters)) for _, letters in self.syllables) or "1"


@dataclass
class BuildingTree:
    tree: TruncatedTree
    coxeter: CoxeterSystem
    blocks: tuple[tuple[str, ...], ...]
    colors: dict[int, tuple[int, ...]]  # chamber -> color per generator
    residue_block: dict[int, int]  # residue vertex -> block index
    gallery_depth: int

    @property
    def base(self) -> int:
        return self.tree.base

    @property
    def chambers(self) -> list[int]:
        return sorted(self.colors)

    @property
    def residues(self) -> list[int]:
        return sorted(self.residue_block)


@dataclass
class IpjResult:
    residue: int
    holds: bool
    fixator_order: int
    factor_orders: list[tuple[int, int]]  # (chamber, order)


@dataclass
class DeltaResult:
    holds: bool
    radius: int
    classes: int
    failing_pair: tuple[int, int] | None = None


# CLI


@dataclass
class RunConfig:
    command: str  # gen | verify | reps
    target: str  # what to generate or which check to verify
    degrees: tuple[int, int] = (3, 3)
    radius: int = 2
    group: str = "full-aut"
    local: str = "sym"  # sym | cyclic
    family: str = "sfull"
    q: int = 0
    k: int = 1
    depth: int = 1
    plus: bool = False
    samples: int = 500
    seed: int = 0
    window_radius: int | None = None
    generators: tuple[str, ...] = ()
    commute: tuple[tuple[str, str], ...] = ()
    thickness: tuple[int, ...] = ()
    gallery_depth: int = 1
    seed_vertices: tuple[int, ...] = ()
    chamber: int | None = None
    building: bool = False
    delta_radius: int | None = None  # defaults to the gallery depth
    # scheduling only; left out of report.json and the campaign fingerprint
    workers: int = field(default=1, repr=False)
    resume: bool = field(default=False, repr=False)
