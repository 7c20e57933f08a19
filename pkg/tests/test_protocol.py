"""Round construction, subdivision stages, and stage axioms."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectra import (
    COLORED,
    COLORLESS,
    IIS,
    IS,
    Adversary,
    CarrierStage,
    Simplex,
    Subcomplex,
    ValidationError,
    barycentric_stage,
    barycentric_stages,
    check_carrier_map,
    check_stage_axioms,
    chromatic_stage,
    colored_simplex,
    dual_projection,
    initial_stage,
    iterate,
    make_complex,
    one_round,
    project_to_level,
    standard_simplex,
    verify_projection,
)


def counts(c):
    by_dim = {}
    for s in c:
        by_dim[s.dim] = by_dim.get(s.dim, 0) + 1
    return by_dim


class TestOneRound:
    def test_colorless_iis_on_edge_is_a_path_of_two(self):
        stage = one_round(initial_stage(make_complex([["a", "b"]])), Adversary(1, IIS), COLORLESS)
        assert len(stage.complex.vertices) == 3
        assert len(stage.complex.facets()) == 2
        assert counts(stage.complex) == {0: 3, 1: 2}

    def test_colored_iis_on_edge_splits_into_three(self):
        stage = one_round(initial_stage(colored_simplex(["a", "b"])), Adversary(1, IIS), COLORED)
        assert len(stage.complex.vertices) == 4
        assert len(stage.complex.facets()) == 3

    def test_colored_snapshot_strictly_contains_immediate_snapshot(self):
        start = initial_stage(colored_simplex(["a", "b", "c"]))
        iis = one_round(start, Adversary(2, IIS), COLORED)
        snap = one_round(start, Adversary(2, IS), COLORED)
        iis_states = {frozenset(v.label for v in s) for s in iis.complex}
        snap_states = {frozenset(v.label for v in s) for s in snap.complex}
        assert iis_states < snap_states
        iis_facets = {frozenset(v.label for v in s) for s in iis.complex.facets()}
        snap_facets = {frozenset(v.label for v in s) for s in snap.complex.facets()}
        assert len(snap_facets - iis_facets) >= 1

    def test_self_loop_free_letter_rejected_at_construction(self):
        with pytest.raises(ValidationError):
            Adversary(1, letters=[object()])  # not even a digraph

    def test_colored_mode_needs_colored_labels(self):
        with pytest.raises(ValidationError):
            one_round(initial_stage(make_complex([["a", "b"]])), Adversary(1, IIS), COLORED)

    def test_too_many_participants_rejected(self):
        with pytest.raises(ValidationError):
            one_round(initial_stage(standard_simplex(2)), Adversary(1, IIS), COLORLESS)


class TestIterate:
    def test_zero_rounds_is_the_input(self):
        c = make_complex([["a", "b"]])
        stages = iterate(c, Adversary(1, IIS), COLORLESS, 0)
        assert len(stages) == 1 and stages[0].complex == c

    def test_two_colorless_rounds_on_the_edge(self):
        stages = iterate(make_complex([["a", "b"]]), Adversary(1, IIS), COLORLESS, 2)
        assert len(stages[2].complex.vertices) == 5
        assert len(stages[2].complex.facets()) == 4

    def test_one_colorless_round_on_the_triangle(self):
        stages = iterate(standard_simplex(2), Adversary(2, IIS), COLORLESS, 1)
        assert counts(stages[1].complex) == {0: 7, 1: 12, 2: 6}
        assert len(stages[1].complex) == 25

    def test_facets_project_onto_facets(self):
        stages = iterate(standard_simplex(2), Adversary(2, IIS), COLORLESS, 2)
        for level in (1, 2):
            stage = stages[level]
            prev_facets = set(stage.source.facets())
            for f in stage.complex.facets():
                assert stage.project(f) in prev_facets
            assert {stage.project(f) for f in stage.complex.facets()} == prev_facets


class TestChainSubdivision:
    def test_edge(self):
        stage = barycentric_stage(initial_stage(make_complex([["a", "b"]])))
        assert len(stage.complex.vertices) == 3
        assert len(stage.complex.facets()) == 2

    def test_triangle_has_six_facets(self):
        stage = barycentric_stage(initial_stage(standard_simplex(2)))
        assert len(stage.complex.facets()) == 6

    def test_projection_is_the_top_of_the_chain(self):
        edge = make_complex([["a", "b"]])
        stage = barycentric_stage(initial_stage(edge))
        vertex_of = {stage.labels[v]: v for v in stage.complex.vertices}
        chain = Simplex([vertex_of[edge.simplex("a")], vertex_of[edge.simplex("a", "b")]])
        assert stage.project(chain) == edge.simplex("a", "b")

    def test_facet_counts_follow_the_factorial_law(self):
        for d, rounds in ((1, 3), (2, 3)):
            stages = barycentric_stages(standard_simplex(d), rounds)
            for n, stage in enumerate(stages):
                assert len(stage.complex.facets()) == math.factorial(d + 1) ** n


def match_by_view(op_stage: CarrierStage, chain_stage: CarrierStage):
    """Canonical vertex matching: a view set against the simplex it spans."""
    by_simplex = {chain_stage.labels[v]: v for v in chain_stage.complex.vertices}
    return {
        v: by_simplex[Simplex(op_stage.labels[v])]
        for v in op_stage.complex.vertices
    }


def assert_stage_isomorphic(op_stage: CarrierStage, chain_stage: CarrierStage):
    mapping = match_by_view(op_stage, chain_stage)
    assert len(mapping) == len(chain_stage.complex.vertices)

    def mapped(s: Simplex) -> Simplex:
        return Simplex(mapping[v] for v in s)

    assert {mapped(s) for s in op_stage.complex} == set(chain_stage.complex.simplices)
    for sigma in op_stage.source:
        lhs = {mapped(g) for g in op_stage.carrier[sigma].generators}
        rhs = set(chain_stage.carrier[sigma].generators)
        assert lhs == rhs, f"carriers disagree at {sigma!r}"
    for s in op_stage.complex:
        assert op_stage.project(s) == chain_stage.project(mapped(s))


class TestOperationalFunctorialAgreement:
    def test_dimension_one(self):
        start = initial_stage(make_complex([["a", "b"]]))
        assert_stage_isomorphic(
            one_round(start, Adversary(1, IIS), COLORLESS), barycentric_stage(start)
        )

    def test_dimension_two(self):
        start = initial_stage(standard_simplex(2))
        assert_stage_isomorphic(
            one_round(start, Adversary(2, IIS), COLORLESS), barycentric_stage(start)
        )

    def test_non_pure_input(self):
        start = initial_stage(make_complex([["a", "b", "c"], ["c", "d"]]))
        assert_stage_isomorphic(
            one_round(start, Adversary(2, IIS), COLORLESS), barycentric_stage(start)
        )


small_generators = st.lists(
    st.sets(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=3),
    min_size=1,
    max_size=4,
)


@settings(max_examples=25, deadline=None)
@given(small_generators)
def test_one_round_agrees_with_chain_subdivision_on_random_complexes(generators):
    start = initial_stage(make_complex(generators))
    op = one_round(start, Adversary(2, IIS), COLORLESS)
    chain = barycentric_stage(start)
    assert_stage_isomorphic(op, chain)


class TestChromatic:
    def test_edge(self):
        stage = chromatic_stage(initial_stage(colored_simplex(["a", "b"])))
        assert len(stage.complex.vertices) == 4
        assert len(stage.complex.facets()) == 3

    def test_triangle_has_thirteen_facets(self):
        stage = chromatic_stage(initial_stage(colored_simplex(["a", "b", "c"])))
        assert len(stage.complex.facets()) == 13

    def test_two_rounds_on_the_edge(self):
        first = chromatic_stage(initial_stage(colored_simplex(["a", "b"])))
        second = chromatic_stage(first)
        assert len(second.complex.facets()) == 9

    def test_uncolored_input_rejected(self):
        with pytest.raises(ValidationError):
            chromatic_stage(initial_stage(make_complex([["a", "b"]])))


class TestStageAxioms:
    def test_chain_stage_on_triangle_passes(self):
        report = check_stage_axioms(barycentric_stage(initial_stage(standard_simplex(2))))
        assert report.ok

    def test_operational_stage_passes(self):
        stage = one_round(initial_stage(standard_simplex(2)), Adversary(2, IIS), COLORLESS)
        assert check_stage_axioms(stage).ok

    def test_colored_stage_passes(self):
        stage = chromatic_stage(initial_stage(colored_simplex(["a", "b"])))
        assert check_stage_axioms(stage).ok

    def test_initial_stage_passes(self):
        assert check_stage_axioms(initial_stage(make_complex([["a", "b"], ["b", "c"]]))).ok

    def test_dropping_a_chain_breaks_totality(self):
        stage = barycentric_stage(initial_stage(make_complex([["a", "b"]])))
        edge = stage.source.simplex("a", "b")
        kept = stage.carrier[edge].generators[:1]
        corrupted = dict(stage.carrier)
        corrupted[edge] = Subcomplex(stage.complex, kept)
        report = check_carrier_map(corrupted, stage.source, stage.complex)
        assert not report.total
        broken = CarrierStage(
            stage.level, stage.source, stage.complex, corrupted,
            stage.projection, stage.labels, stage.kind,
        )
        assert not check_stage_axioms(broken).ok

    def test_protocol_carriers_satisfy_the_carrier_axioms(self):
        stages = iterate(make_complex([["a", "b"]]), Adversary(1, IIS), COLORLESS, 2)
        for stage in stages[1:]:
            report = check_carrier_map(stage.carrier, stage.source, stage.complex)
            assert report.monotone and report.strict and report.total

    def test_depth_two_stage_passes_the_full_audit(self):
        stages = iterate(standard_simplex(2), Adversary(2, IIS), COLORLESS, 2)
        assert check_stage_axioms(stages[2]).ok


class TestProjectionComposition:
    def test_composed_projection_matches_the_composed_carrier_dual(self):
        stages = barycentric_stages(make_complex([["a", "b"]]), 2)
        level0, level2 = stages[0].complex, stages[2].complex
        composed_carrier = {}
        for sigma in level0:
            members = [
                tau
                for tau in level2
                if project_to_level(stages, tau, 2, 0).issubset(sigma)
            ]
            composed_carrier[sigma] = Subcomplex(level2, members)
        rho = dual_projection(composed_carrier, level0, level2)
        for tau in level2:
            assert rho[tau] == project_to_level(stages, tau, 2, 0)

    def test_projection_verifies_on_all_stage_kinds(self):
        runs = [
            barycentric_stages(standard_simplex(2), 2),
            iterate(standard_simplex(2), Adversary(2, IIS), COLORLESS, 2),
            iterate(colored_simplex(["a", "b"]), Adversary(1, IIS), COLORED, 2),
        ]
        for stages in runs:
            for stage in stages:
                assert verify_projection(stage).ok
