"""Truncated limit-space queries: sequences, points, classes, mesh."""

from fractions import Fraction

import pytest

from spectra import (
    DomainError,
    PointClass,
    RationalPoint,
    ValidationError,
    basis_open,
    barycentric_stages,
    carrier_of_point,
    classify_point,
    downset_count,
    enumerate_sequences,
    make_complex,
    specialization_leq,
    squared_mesh,
    standard_simplex,
    vertex_coordinates,
)
from spectra.spectral import is_compatible


@pytest.fixture(scope="module")
def edge_stages():
    return barycentric_stages(standard_simplex(1), 4)


@pytest.fixture(scope="module")
def triangle_stages():
    return barycentric_stages(standard_simplex(2), 3)


@pytest.fixture(scope="module")
def deep_triangle_stages():
    return barycentric_stages(standard_simplex(2), 4)


class TestEnumerateSequences:
    def test_depth_zero_is_one_per_simplex(self, edge_stages):
        assert len(enumerate_sequences(edge_stages[:1])) == 3

    def test_message_adversary_stages_enumerate_too(self):
        from spectra import COLORLESS, IIS, Adversary, iterate

        stages = iterate(standard_simplex(1), Adversary(1, IIS), COLORLESS, 2)
        seqs = enumerate_sequences(stages)
        assert len(seqs) == len(stages[2].complex) == 9
        assert all(is_compatible(s, stages) for s in seqs)

    def test_depth_one_is_one_per_level_one_simplex(self, edge_stages):
        seqs = enumerate_sequences(edge_stages[:2])
        assert len(seqs) == len(edge_stages[1].complex) == 5

    def test_facets_only_depth_two(self, edge_stages):
        assert len(enumerate_sequences(edge_stages[:3], facets_only=True)) == 4

    def test_all_sequences_are_compatible(self, triangle_stages):
        for seq in enumerate_sequences(triangle_stages[:3]):
            assert is_compatible(seq, triangle_stages[:3])


class TestSpecializationOrder:
    def test_reflexive(self, edge_stages):
        for seq in enumerate_sequences(edge_stages[:2]):
            assert specialization_leq(seq, seq)

    def test_facet_sequence_below_its_vertex_sequence(self, edge_stages):
        stages = edge_stages[:2]
        seqs = enumerate_sequences(stages)
        facet_seqs = [s for s in seqs if s.at_level(1).dim == 1]
        for fs in facet_seqs:
            for vs in seqs:
                if vs.at_level(1).dim == 0 and vs.at_level(1).issubset(fs.at_level(1)):
                    assert specialization_leq(fs, vs)
                    assert not specialization_leq(vs, fs)

    def test_distinct_facet_sequences_incomparable(self, edge_stages):
        seqs = enumerate_sequences(edge_stages[:3], facets_only=True)
        for a in seqs:
            for b in seqs:
                if a != b:
                    assert not specialization_leq(a, b)

    def test_antisymmetry_and_transitivity(self, edge_stages):
        seqs = enumerate_sequences(edge_stages[:2])
        for a in seqs:
            for b in seqs:
                if specialization_leq(a, b) and specialization_leq(b, a):
                    assert a == b
                for c in seqs:
                    if specialization_leq(a, b) and specialization_leq(b, c):
                        assert specialization_leq(a, c)

    def test_depth_mismatch_rejected(self, edge_stages):
        a = enumerate_sequences(edge_stages[:2])[0]
        b = enumerate_sequences(edge_stages[:3])[0]
        with pytest.raises(DomainError):
            specialization_leq(a, b)

    def test_facet_only_sequences_are_the_minimal_elements(self, edge_stages):
        stages = edge_stages[:3]
        seqs = enumerate_sequences(stages)
        facet_seqs = set(enumerate_sequences(stages, facets_only=True))
        minimal = {
            s
            for s in seqs
            if not any(t != s and specialization_leq(t, s) for t in seqs)
        }
        assert minimal == facet_seqs


class TestBasisOpen:
    def test_level_zero_corner(self, edge_stages):
        stages = edge_stages[:2]
        corner = stages[0].complex.vertex_with_label("v0")
        out = basis_open(stages, 0, corner)
        assert all(corner in seq.at_level(0) for seq in out)
        # The corner-vertex sequence plus the three level-1 tails of the edge.
        assert len(out) == 4

    def test_midpoint_vertex_at_level_one(self, edge_stages):
        stages = edge_stages[:2]
        edge = stages[0].complex.simplex("v0", "v1")
        mid = next(
            v for v in stages[1].complex.vertices if stages[1].labels[v] == edge
        )
        out = basis_open(stages, 1, mid)
        assert len(out) == 3

    def test_basis_opens_are_closed_under_pointwise_refinement(self, edge_stages):
        # Up in the point-wise order is down in specialization: anything
        # specialization-below a member is a member.
        stages = edge_stages[:2]
        seqs = enumerate_sequences(stages)
        for v in stages[1].complex.vertices:
            members = set(basis_open(stages, 1, v))
            for s in members:
                for t in seqs:
                    if specialization_leq(t, s):
                        assert t in members


class TestRationalPoint:
    def test_floats_rejected(self):
        with pytest.raises(ValidationError):
            RationalPoint([0.5, 0.5])

    def test_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            RationalPoint(["1/2", "1/3"])

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            RationalPoint(["3/2", "-1/2"])

    def test_parse(self):
        p = RationalPoint.parse("1/3, 2/3")
        assert p.coords == (Fraction(1, 3), Fraction(2, 3))
        assert not p.on_boundary()
        assert RationalPoint.parse("1,0").on_boundary()


class TestCarrierOfPoint:
    def test_corner_stays_on_the_corner(self, edge_stages):
        seq = carrier_of_point(RationalPoint.parse("1,0"), edge_stages)
        assert all(entry.dim == 0 for entry in seq.entries[1:])
        assert seq.at_level(0).dim == 0

    def test_midpoint_becomes_a_vertex_after_one_round(self, edge_stages):
        seq = carrier_of_point(RationalPoint.parse("1/2,1/2"), edge_stages)
        assert seq.at_level(0).dim == 1
        assert all(entry.dim == 0 for entry in seq.entries[1:])

    def test_one_third_stays_inside_edges(self, edge_stages):
        seq = carrier_of_point(RationalPoint.parse("1/3,2/3"), edge_stages)
        assert all(entry.dim == 1 for entry in seq.entries)

    def test_carriers_are_compatible_sequences(self, triangle_stages):
        for text in ("1/3,1/3,1/3", "1/2,1/2,0", "2/5,2/5,1/5", "1,0,0"):
            seq = carrier_of_point(RationalPoint.parse(text), triangle_stages)
            assert is_compatible(seq, triangle_stages)

    def test_wrong_arity_rejected(self, edge_stages):
        with pytest.raises(DomainError):
            carrier_of_point(RationalPoint.parse("1/3,1/3,1/3"), edge_stages)


class TestDownsetCount:
    def test_generic_interior_point_counts_itself_only(self, edge_stages):
        assert downset_count(RationalPoint.parse("1/3,2/3"), edge_stages) == 1

    def test_midpoint_counts_three(self, edge_stages):
        assert downset_count(RationalPoint.parse("1/2,1/2"), edge_stages) == 3

    def test_corner_counts_two(self, edge_stages):
        assert downset_count(RationalPoint.parse("1,0"), edge_stages) == 2

    def test_counts_never_decrease_with_depth(self, edge_stages):
        for text in ("1/3,2/3", "1/2,1/2", "1,0", "1/4,3/4"):
            point = RationalPoint.parse(text)
            values = [
                downset_count(point, edge_stages[: n + 1]) for n in range(1, 5)
            ]
            assert values == sorted(values)

    def test_triangle_barycenter_counts_grow_strictly(self, triangle_stages):
        center = RationalPoint.parse("1/3,1/3,1/3")
        values = [
            downset_count(center, triangle_stages[: n + 1]) for n in (1, 2, 3)
        ]
        assert values[0] < values[1] < values[2]


class TestClassifyPoint:
    def test_codimension_zero_forever(self, edge_stages):
        result = classify_point(RationalPoint.parse("1/3,2/3"), edge_stages)
        assert result.kind is PointClass.C1
        assert set(result.codims) == {0}

    def test_interior_wall_point(self, edge_stages):
        result = classify_point(RationalPoint.parse("1/2,1/2"), edge_stages)
        assert result.kind is PointClass.C3_INTERIOR

    def test_boundary_wall_point(self, edge_stages):
        result = classify_point(RationalPoint.parse("1,0"), edge_stages)
        assert result.kind is PointClass.C3_BOUNDARY

    def test_triangle_barycenter_has_infinite_class(self, triangle_stages):
        result = classify_point(RationalPoint.parse("1/3,1/3,1/3"), triangle_stages)
        assert result.kind is PointClass.C_INFINITY

    def test_triangle_wall_points(self, deep_triangle_stages):
        # A non-dyadic point on the median stays on codimension-1 walls
        # forever; its down-set is the wall simplex plus the two flanking
        # facets.  On the boundary only one facet flanks.
        interior = RationalPoint.parse("2/5,3/10,3/10")
        result = classify_point(interior, deep_triangle_stages)
        assert result.kind is PointClass.C3_INTERIOR
        assert downset_count(interior, deep_triangle_stages) == 3
        border = RationalPoint.parse("2/5,3/5,0")
        assert classify_point(border, deep_triangle_stages).kind is PointClass.C3_BOUNDARY
        assert downset_count(border, deep_triangle_stages) == 2

    def test_late_dyadic_point_is_unstable_at_this_depth(self, edge_stages):
        result = classify_point(RationalPoint.parse("1/16,15/16"), edge_stages)
        assert result.kind is PointClass.UNSTABLE
        assert result.codims == (0, 0, 0, 0, 1)

    def test_window_controls_what_counts_as_stabilized(self, edge_stages):
        # 3/8 only lands on a subdivision vertex at level 3, so the last
        # three codimensions are (0, 1, 1) and a window of 3 refuses to
        # extrapolate while a window of 2 accepts the wall pattern.
        point = RationalPoint.parse("3/8,5/8")
        assert classify_point(point, edge_stages, window=3).kind is PointClass.UNSTABLE
        assert classify_point(point, edge_stages, window=2).kind is PointClass.C3_INTERIOR

    def test_window_must_fit(self, edge_stages):
        with pytest.raises(DomainError):
            classify_point(RationalPoint.parse("1/2,1/2"), edge_stages[:2], window=3)


class TestMesh:
    def test_edge_mesh_is_quarter_per_round(self, edge_stages):
        for n in range(5):
            assert squared_mesh(edge_stages, n) == Fraction(1, 4) ** n

    def test_triangle_mesh_strictly_decreases_with_ratio_bound(self, triangle_stages):
        meshes = [squared_mesh(triangle_stages, n) for n in range(4)]
        for a, b in zip(meshes, meshes[1:]):
            assert b < a
            assert b <= Fraction(4, 9) * a

    def test_geometry_requires_subdivision_stages(self):
        path = make_complex([["a", "b"], ["b", "c"]])
        stages = barycentric_stages(path, 1)
        with pytest.raises(ValidationError):
            vertex_coordinates(stages, 1)
