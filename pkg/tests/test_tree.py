import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from olab.buildings import build_building, coxeter_system
from olab.errors import ConfigError, PreconditionError, WindowError
from olab.models import OrientedEdge
from olab.tree import (
    ball,
    boundary_edges,
    build_semiregular,
    complete_subtrees,
    convex_hull,
    distance,
    dump_tree,
    edge_ball,
    geodesic,
    half_tree,
    load_tree,
    make_subtree,
    q_set,
    set_distance,
    vertex_ball,
    whole_tree,
)


class TestBuildSemiregular:
    def test_sizes_by_radius(self) -> None:
        sizes = [build_semiregular(3, 3, r).size for r in range(5)]
        assert sizes == [1, 4, 10, 22, 46]

    def test_bfs_ids(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert tree.adjacency[0] == (1, 2, 3)
        assert tree.children(1) == (4, 5)
        assert tree.children(3) == (8, 9)
        assert tree.parents[9] == 3

    def test_types_alternate(self) -> None:
        tree = build_semiregular(3, 4, 3)
        for u, v in tree.edges():
            assert tree.types[u] != tree.types[v]
        # type-1 vertices have degree 4
        assert len(tree.adjacency[1]) == 4
        assert tree.degrees == (3, 4)

    def test_inside_vertices_reach_target_degree(self) -> None:
        tree = build_semiregular(2, 3, 3)
        for v in range(tree.size):
            if tree.is_inside(v):
                assert len(tree.adjacency[v]) == tree.target_degrees[v]

    def test_degree_below_two_raises(self) -> None:
        with pytest.raises(ConfigError, match="at least 2"):
            build_semiregular(1, 3, 2)

    def test_negative_radius_raises(self) -> None:
        with pytest.raises(ConfigError, match="non-negative"):
            build_semiregular(3, 3, -1)


class TestSubtrees:
    def test_make_subtree_sorts(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert make_subtree(tree, [4, 1, 0]).vertices == (0, 1, 4)

    def test_disconnected_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError, match="not connected"):
            make_subtree(tree, [1, 2])

    def test_empty_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError, match="Empty"):
            make_subtree(tree, [])

    def test_out_of_range_raises(self) -> None:
        tree = build_semiregular(3, 3, 1)
        with pytest.raises(PreconditionError, match="out of range"):
            make_subtree(tree, [0, 7])

    def test_complete_and_interior(self) -> None:
        tree = build_semiregular(3, 3, 2)
        star = vertex_ball(tree, 0, 1)
        assert star.is_complete
        assert star.interior == (0,)
        assert star.leaves == (1, 2, 3)
        # vertex 1 keeps only two of its three neighbors
        path = make_subtree(tree, [0, 1, 4])
        assert not path.is_complete

    def test_margin(self) -> None:
        tree = build_semiregular(3, 3, 3)
        assert vertex_ball(tree, 0, 1).margin == 2
        assert make_subtree(tree, [1, 4]).margin == 1


class TestBalls:
    def test_vertex_ball(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert vertex_ball(tree, 0, 1).vertices == (0, 1, 2, 3)
        assert vertex_ball(tree, 1, 1).vertices == (0, 1, 4, 5)

    def test_edge_ball(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert edge_ball(tree, 0, 1, 1).vertices == (0, 1, 2, 3, 4, 5)

    def test_ball_leaving_truncation_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(WindowError, match="leaves the truncation"):
            ball(make_subtree(tree, [1]), 2)

    def test_negative_radius_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError):
            ball(make_subtree(tree, [0]), -1)


class TestHalfTreeAndHull:
    def test_half_tree(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert half_tree(tree, 0, 1) == frozenset({0, 2, 3, 6, 7, 8, 9})
        assert half_tree(tree, 1, 0) == frozenset({1, 4, 5})

    def test_half_tree_needs_adjacent_vertices(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError, match="not adjacent"):
            half_tree(tree, 0, 4)

    def test_geodesic_and_hull(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert geodesic(tree, 4, 6) == [4, 1, 0, 2, 6]
        assert convex_hull(tree, [4, 6]) == frozenset({0, 1, 2, 4, 6})

    def test_set_distance(self) -> None:
        tree = build_semiregular(3, 3, 2)
        assert set_distance(tree, [4, 5], [2, 6]) == 3

    def test_empty_hull_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError):
            convex_hull(tree, [])


class TestCompleteSubtrees:
    def test_small_window(self) -> None:
        tree = build_semiregular(3, 3, 2)
        found = complete_subtrees(vertex_ball(tree, 0, 1), 1)
        # four vertices, three edges and the star itself
        assert len(found) == 8
        assert found[-1].vertices == (0, 1, 2, 3)
        assert all(s.is_complete for s in found)

    def test_two_interior_vertices(self) -> None:
        tree = build_semiregular(3, 3, 3)
        found = complete_subtrees(vertex_ball(tree, 0, 2), 2)
        two = [s for s in found if len(s.interior) == 2]
        # an interior edge {0, i} for each neighbor i of the base
        assert len(two) == 3
        assert two[0].vertices == (0, 1, 2, 3, 4, 5)

    def test_boundary_edges(self) -> None:
        tree = build_semiregular(3, 3, 2)
        edges = boundary_edges(vertex_ball(tree, 0, 1))
        assert edges == [OrientedEdge(0, 1), OrientedEdge(0, 2), OrientedEdge(0, 3)]

    def test_single_vertex_has_no_boundary_edges(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(PreconditionError, match="no edges"):
            boundary_edges(make_subtree(tree, [0]))


class TestQSet:
    def test_base_ball(self) -> None:
        tree = build_semiregular(3, 3, 4)
        assert q_set(vertex_ball(tree, 0, 2)) == frozenset({0})

    def test_star_has_no_centers(self) -> None:
        tree = build_semiregular(3, 3, 4)
        assert q_set(vertex_ball(tree, 1, 1)) == frozenset()

    def test_undecidable_near_boundary_raises(self) -> None:
        tree = build_semiregular(3, 3, 2)
        with pytest.raises(WindowError, match="truncation boundary"):
            q_set(whole_tree(tree))


class TestDump:
    def test_load_restores_tree(self) -> None:
        tree = build_semiregular(3, 4, 3)
        assert load_tree(dump_tree(tree)) == tree

    def test_invalid_json_raises(self) -> None:
        with pytest.raises(ConfigError, match="Invalid tree file"):
            load_tree("{not json")

    def test_cycle_is_rejected(self) -> None:
        content = (
            '{"base": 0, "radius": 1, "degrees": [2, 2], '
            '"vertices": [{"id": 0, "type": 0}, {"id": 1, "type": 1}, '
            '{"id": 2, "type": 1}], "edges": [[0, 1], [1, 2], [0, 2]]}'
        )
        with pytest.raises(ConfigError, match="not describe a tree"):
            load_tree(content)

    def _edited(self, edit) -> str:
        data = json.loads(dump_tree(build_semiregular(3, 3, 2)))
        edit(data)
        return json.dumps(data)

    def test_id_gap_is_rejected(self) -> None:
        def drop_last(data: dict) -> None:
            data["vertices"][-1]["id"] = 42

        with pytest.raises(ConfigError, match="without gaps"):
            load_tree(self._edited(drop_last))

    def test_edge_out_of_range_is_rejected(self) -> None:
        def stray_edge(data: dict) -> None:
            data["edges"][-1] = [3, -1]

        with pytest.raises(ConfigError, match="leaves the vertex range"):
            load_tree(self._edited(stray_edge))

    def test_equal_adjacent_types_are_rejected(self) -> None:
        def retype(data: dict) -> None:
            data["vertices"][4]["type"] = 1

        with pytest.raises(ConfigError, match="Adjacent vertices 1 and 4 share"):
            load_tree(self._edited(retype))

    def test_child_before_parent_is_rejected(self) -> None:
        # swap ids 1 and 4: vertex 1 now hangs below vertex 4
        def swap(data: dict) -> None:
            relabel = {1: 4, 4: 1}
            data["edges"] = [
                [relabel.get(u, u), relabel.get(v, v)] for u, v in data["edges"]
            ]
            for item in data["vertices"]:
                if item["id"] in relabel:
                    item["type"] = 1 - item["type"]

        with pytest.raises(ConfigError, match="numbered before its parent"):
            load_tree(self._edited(swap))

    def test_building_dump_still_loads(self) -> None:
        building = build_building(coxeter_system(("a", "b"), (), (3, 3)), 2)
        assert load_tree(dump_tree(building.tree)) == building.tree


TREE = build_semiregular(3, 3, 3)
VERTICES = st.integers(0, TREE.size - 1)


class TestMetricProperties:
    @given(VERTICES, VERTICES, VERTICES)
    def test_triangle_inequality(self, u: int, v: int, w: int) -> None:
        assert distance(TREE, u, v) == distance(TREE, v, u)
        assert distance(TREE, u, w) <= distance(TREE, u, v) + distance(TREE, v, w)

    @given(VERTICES, VERTICES)
    def test_geodesic_length(self, u: int, v: int) -> None:
        path = geodesic(TREE, u, v)
        assert len(path) == distance(TREE, u, v) + 1
        assert path[0] == u
        assert path[-1] == v

    @given(VERTICES)
    def test_half_trees_split_the_tree(self, w: int) -> None:
        for v in TREE.adjacency[w]:
            near_w = half_tree(TREE, w, v)
            near_v = half_tree(TREE, v, w)
            assert not near_w & near_v
            assert len(near_w) + len(near_v) == TREE.size
