import json

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import (
    CyclicGroup,
    Permutation,
    PermutationGroup,
    SymmetricGroup,
)

from olab.buildings import (
    build_building,
    check_building,
    coxeter_system,
    delta,
    delta_two_transitivity,
    dump_building,
    in_universal_group,
    load_building,
    load_coxeter,
    normal_form,
    partition_star,
    projection,
    residue_of,
    s_delta_translation,
    universal_group,
    verify_h_v1,
    verify_ipj,
    wing,
    wing_intersection_law,
)
from olab.errors import CapacityError, ConfigError, PreconditionError, WindowError
from olab.groups import enumerate_elements, truncated_group
from olab.models import GroupKind, GroupSpec

FREE = coxeter_system(("a", "b"), (), (3, 3))
COMMUTING = coxeter_system(("a", "b", "c"), (("a", "b"),), (3, 3, 3))


def _locals(kind) -> dict:
    return {"a": kind(3), "b": kind(3)}


class TestCoxeter:
    def test_load_coxeter(self) -> None:
        content = json.dumps(
            {"generators": ["a", "b"], "commute": [], "thickness": {"a": 3, "b": 4}}
        )
        coxeter = load_coxeter(content)
        assert coxeter.generators == ("a", "b")
        assert coxeter.thickness == (3, 4)
        assert coxeter.m("a", "b") == float("inf")

    def test_commuting_pair(self) -> None:
        assert COMMUTING.m("a", "b") == 2
        assert COMMUTING.m("a", "a") == 1

    def test_thickness_below_three_raises(self) -> None:
        with pytest.raises(ConfigError, match=">= 3"):
            coxeter_system(("a", "b"), (), (2, 3))

    def test_unknown_generator_raises(self) -> None:
        with pytest.raises(ConfigError, match="unknown generator"):
            coxeter_system(("a", "b"), (("a", "z"),), (3, 3))

    def test_thickness_count_mismatch_raises(self) -> None:
        with pytest.raises(ConfigError, match="thickness values"):
            coxeter_system(("a", "b"), (), (3,))

    def test_malformed_file_raises(self) -> None:
        with pytest.raises(ConfigError, match="Invalid Coxeter file"):
            load_coxeter('{"generators": ["a"]}')


class TestPartitionStar:
    def test_free_product_blocks(self) -> None:
        assert partition_star(FREE).blocks == (("a",), ("b",))

    def test_commuting_block(self) -> None:
        partition = partition_star(COMMUTING)
        assert partition.ok
        assert partition.blocks == (("a", "b"), ("c",))

    def test_violation(self) -> None:
        coxeter = coxeter_system(("a", "b", "c"), (("a", "b"), ("b", "c")), (3, 3, 3))
        partition = partition_star(coxeter)
        assert not partition.ok
        assert partition.violation == ("a", "b", "c")

    def test_violation_blocks_construction(self) -> None:
        coxeter = coxeter_system(("a", "b", "c"), (("a", "b"), ("b", "c")), (3, 3, 3))
        with pytest.raises(ConfigError, match="violation"):
            build_building(coxeter, 1)


class TestNormalForm:
    def test_commuting_letters_cancel(self) -> None:
        assert str(normal_form("aba", COMMUTING)) == "b"

    def test_square_is_trivial(self) -> None:
        nf = normal_form("aa", FREE)
        assert nf.syllables == ()
        assert str(nf) == "1"

    def test_free_word_is_reduced(self) -> None:
        nf = normal_form("abab", FREE)
        assert len(nf.syllables) == 4
        assert nf.length == 4

    def test_unknown_letter_raises(self) -> None:
        with pytest.raises(PreconditionError, match="Unknown generator"):
            normal_form("ax", FREE)

    @given(st.text(alphabet="abc", max_size=12), st.text(alphabet="abc", max_size=12))
    def test_inserting_a_square_changes_nothing(self, left: str, right: str) -> None:
        word = left + right
        for letter in "abc":
            padded = left + letter + letter + right
            assert normal_form(padded, COMMUTING) == normal_form(word, COMMUTING)

    @given(st.text(alphabet="abc", max_size=12))
    def test_normal_form_is_idempotent(self, word: str) -> None:
        nf = normal_form(word, COMMUTING)
        spelled = "".join("".join(sorted(letters)) for _, letters in nf.syllables)
        assert normal_form(spelled, COMMUTING) == nf

    @given(st.text(alphabet="abc", max_size=12), st.text(alphabet="abc", max_size=12))
    def test_commuting_swap_changes_nothing(self, left: str, right: str) -> None:
        first = normal_form(left + "ab" + right, COMMUTING)
        assert first == normal_form(left + "ba" + right, COMMUTING)


class TestBuildBuilding:
    def test_gallery_depth_one(self) -> None:
        building = build_building(FREE, 1)
        assert building.chambers == [0, 2, 3, 5, 6]
        assert building.residues == [1, 4, 7, 8, 9, 10]
        assert building.tree.radius == 3
        assert building.tree.degrees == (2, 3)
        assert check_building(building) == []

    def test_gallery_depth_zero(self) -> None:
        building = build_building(FREE, 0)
        assert building.chambers == [0]
        assert building.residues == [1, 2]

    def test_commuting_block_residues(self) -> None:
        building = build_building(COMMUTING, 1)
        # the {a, b} residue holds 9 chambers, the {c} residue 3
        assert len(building.tree.adjacency[1]) == 9
        assert check_building(building) == []

    def test_negative_depth_raises(self) -> None:
        with pytest.raises(ConfigError, match="non-negative"):
            build_building(FREE, -1)

    def test_vertex_cap(self, monkeypatch) -> None:
        monkeypatch.setenv("OLAB_MAX_VERTICES", "6")
        with pytest.raises(CapacityError, match="OLAB_MAX_VERTICES"):
            build_building(FREE, 1)

    def test_dump_reloads(self) -> None:
        building = build_building(FREE, 2)
        reloaded = load_building(dump_building(building))
        assert reloaded.tree == building.tree
        assert reloaded.colors == building.colors
        assert reloaded.residue_block == building.residue_block
        assert reloaded.blocks == building.blocks


class TestGeometry:
    def test_projection(self) -> None:
        building = build_building(FREE, 1)
        assert projection(building, 1, 2) == 2
        assert projection(building, 1, 5) == 0

    def test_projection_onto_cut_residue_raises(self) -> None:
        building = build_building(FREE, 1)
        with pytest.raises(WindowError, match="cut by the truncation"):
            projection(building, 7, 0)

    def test_residue_of(self) -> None:
        building = build_building(FREE, 1)
        assert residue_of(building, 0, 0) == 1
        assert residue_of(building, 2, 1) == 7

    def test_wings_partition_the_chambers(self) -> None:
        building = build_building(FREE, 1)
        assert wing(building, 0, ("a",)) == frozenset({0, 5, 6})
        assert wing(building, 2, ("a",)) == frozenset({2})
        assert wing(building, 3, ("a",)) == frozenset({3})

    def test_wing_intersection_law(self) -> None:
        building = build_building(COMMUTING, 1)
        assert wing_intersection_law(building, 0, ("a", "b"))

    def test_wing_needs_one_block(self) -> None:
        building = build_building(COMMUTING, 1)
        with pytest.raises(PreconditionError, match="one block"):
            wing(building, 0, ("a", "c"))

    def test_delta(self) -> None:
        building = build_building(FREE, 1)
        assert str(delta(building, 0, 2)) == "a"
        assert str(delta(building, 0, 5)) == "b"
        assert str(delta(building, 2, 5)) == "ab"
        assert delta(building, 3, 3).length == 0


class TestUniversalGroup:
    def test_orders(self) -> None:
        orders = [
            universal_group(build_building(FREE, depth), _locals(SymmetricGroup))
            for depth in (1, 2)
        ]
        assert [int(g.order()) for g in orders] == [4, 64]

    def test_cyclic_locals_fix_everything(self) -> None:
        group = universal_group(build_building(FREE, 1), _locals(CyclicGroup))
        assert group.order() == 1

    def test_membership_filter_matches_generated_group(self) -> None:
        building = build_building(FREE, 1)
        full = truncated_group(GroupSpec(GroupKind.FULL_AUT, building.tree))
        assert full.order() == 8
        locals_ = _locals(SymmetricGroup)
        elements = enumerate_elements(full)
        kept = [g for g in elements if in_universal_group(building, locals_, g)]
        assert len(kept) == universal_group(building, locals_).order()

    def test_cyclic_filter_keeps_identity_only(self) -> None:
        building = build_building(FREE, 1)
        full = truncated_group(GroupSpec(GroupKind.FULL_AUT, building.tree))
        locals_ = _locals(CyclicGroup)
        elements = enumerate_elements(full)
        kept = [g for g in elements if in_universal_group(building, locals_, g)]
        assert len(kept) == 1
        assert kept[0].is_Identity

    def test_intransitive_local_raises(self) -> None:
        building = build_building(FREE, 1)
        swap = PermutationGroup([Permutation([1, 0, 2])])
        locals_ = {"a": SymmetricGroup(3), "b": swap}
        with pytest.raises(ConfigError, match="not transitive"):
            universal_group(building, locals_)

    def test_missing_local_raises(self) -> None:
        building = build_building(FREE, 1)
        with pytest.raises(ConfigError, match="No local group"):
            universal_group(building, {"a": SymmetricGroup(3)})


class TestVerifications:
    def test_ipj_holds_for_universal_group(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(SymmetricGroup))
        results = verify_ipj(building, group, 0)
        assert [r.residue for r in results] == [1, 13, 16]
        assert all(r.holds for r in results)

    def test_ipj_without_room_raises(self) -> None:
        building = build_building(FREE, 0)
        group = universal_group(building, _locals(SymmetricGroup))
        with pytest.raises(WindowError, match="has room"):
            verify_ipj(building, group, 0)

    def test_h_v1_is_vacuous_at_depth_one(self) -> None:
        building = build_building(FREE, 1)
        group = universal_group(building, _locals(SymmetricGroup))
        report = verify_h_v1(building, group, _locals(SymmetricGroup))
        assert report.vacuous
        assert not report.exploratory

    def test_h_v1_holds_for_sym_locals(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(SymmetricGroup))
        report = verify_h_v1(building, group, _locals(SymmetricGroup))
        assert report.members == 3
        assert report.passed
        assert not report.vacuous

    def test_h_v1_fails_for_cyclic_locals(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(CyclicGroup))
        report = verify_h_v1(building, group, _locals(CyclicGroup))
        assert report.exploratory
        assert not report.passed

    def test_delta_two_transitivity(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(SymmetricGroup))
        result = delta_two_transitivity(building, group, 1)
        assert result.holds
        assert result.classes == 3
        assert delta_two_transitivity(building, group, 2).holds

    def test_delta_two_transitivity_fails_for_cyclic_locals(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(CyclicGroup))
        result = delta_two_transitivity(building, group, 1)
        assert not result.holds
        assert result.failing_pair == (2, 3)

    def test_delta_radius_beyond_building_raises(self) -> None:
        building = build_building(FREE, 2)
        group = universal_group(building, _locals(SymmetricGroup))
        with pytest.raises(WindowError, match="exceeds the building depth"):
            delta_two_transitivity(building, group, 3)

    def test_s_delta_translation(self) -> None:
        building = build_building(FREE, 2)
        seed = s_delta_translation(building, 0)
        assert seed.vertices == (0, 1, 2, 3, 4, 5, 6)

    def test_s_delta_translation_needs_margin(self) -> None:
        building = build_building(FREE, 0)
        with pytest.raises(WindowError, match="no room"):
            s_delta_translation(building, 0)
