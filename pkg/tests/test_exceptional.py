import random
from fractions import Fraction

import pytest

from localsft.covers import BaseCurve, CoverSpec, boundary_strata, is_orbit_cylinder
from localsft.errors import (
    HypothesesViolated,
    NotElliptic,
    NotExceptional,
    NotMorse,
    PipelineHypothesis,
)
from localsft.exceptional import (
    AXIOMS,
    DescendantSpec,
    NeckConfiguration,
    descendant_copies,
    elliptic_necessity,
    exceptional_invariants,
    lagrangian_genus_gate,
    recursion_pipeline,
    splitting_equations,
    standard_neck,
)
from localsft.orbits import OrbitCollection, ReebOrbit


def sphere(name="v", rel=2, index=0, immersed=True, closed=True):
    return BaseCurve(name, closed=closed, index=index, rel_c1_doubled=rel,
                     immersed=immersed)


def elliptic(theta, name="gamma", max_iterate=6):
    return ReebOrbit(name, "elliptic", theta=Fraction(theta), max_iterate=max_iterate)


def hyperbolic(cz1, name="h", morse=True):
    return ReebOrbit(name, "hyperbolic", cz1=cz1, morse=morse)


class TestExceptionalInvariants:
    def test_characteristic_numbers(self):
        inv = exceptional_invariants(sphere())
        assert inv.self_intersection == -1
        assert inv.c1 == 1

    def test_cover_index_table(self):
        inv = exceptional_invariants(sphere())
        assert [inv.cover_index(d) for d in range(1, 6)] == [0, 2, 4, 6, 8]

    def test_wrong_chern_number_rejected(self):
        with pytest.raises(NotExceptional):
            exceptional_invariants(sphere(rel=4))

    def test_nonrigid_rejected(self):
        with pytest.raises(NotExceptional):
            exceptional_invariants(sphere(index=2))

    def test_open_curve_rejected(self):
        g = elliptic("3/10")
        curve = BaseCurve("w", positive_ends=OrbitCollection((g.iterate(1),)),
                          index=0, rel_c1_doubled=0)
        with pytest.raises(NotExceptional):
            exceptional_invariants(curve)


class TestDescendantCopies:
    def test_two_points_on_double_cover(self):
        assert descendant_copies(DescendantSpec(sphere(), 2, 2, (0, 0))) == 4

    def test_no_marked_points(self):
        assert descendant_copies(DescendantSpec(sphere(), 2, 0, ())) == 1

    def test_higher_degree(self):
        assert descendant_copies(DescendantSpec(sphere(), 3, 2, (0, 0))) == 9


class TestRecursionPipeline:
    def test_count_is_minus_one_quarter(self):
        result = recursion_pipeline(DescendantSpec(sphere(), 2, 1, (1,)))
        assert result.value == Fraction(-1, 4)

    def test_trace_steps(self):
        result = recursion_pipeline(DescendantSpec(sphere(), 2, 1, (1,)))
        steps = {s.step_id: dict(s.outputs) for s in result.trace}
        assert steps["divisor"]["factor"] == "1/4"
        assert steps["euler"]["euler_number"] == "-1"
        assert steps["obstruction"]["rank"] == "2"
        assert steps["obstruction"]["unperturbed_dim"] == "2"
        assert steps["total"]["count"] == "-1/4"

    def test_other_descendant_data_rejected(self):
        with pytest.raises(PipelineHypothesis):
            recursion_pipeline(DescendantSpec(sphere(), 3, 1, (1,)))
        with pytest.raises(PipelineHypothesis):
            recursion_pipeline(DescendantSpec(sphere(), 2, 1, (2,)))

    def test_non_exceptional_base_rejected(self):
        with pytest.raises(PipelineHypothesis):
            recursion_pipeline(DescendantSpec(sphere(rel=4), 2, 1, (1,)))


class TestSplittingEquations:
    def test_negative_defect_branch(self):
        eq = splitting_equations(standard_neck("N", [elliptic("3/10")]))
        assert eq.defect == -1
        assert eq.right_side == Fraction(-1, 4)
        assert dict(eq.gamma_squared_indices) == {"plus": 2, "minus": 0}
        # the rigid doubly-covered plane sits on the negative side
        assert "N-" in eq.sum_terms[0].label
        assert eq.sum_terms[0].index == 0
        assert eq.sum_terms[0].obstruction_rank == 2

    def test_positive_defect_branch(self):
        eq = splitting_equations(standard_neck("N", [elliptic("7/10")]))
        assert eq.defect == 1
        assert eq.right_side == Fraction(-1, 4)
        assert dict(eq.gamma_squared_indices) == {"plus": 0, "minus": 2}
        assert "N+" in eq.sum_terms[0].label

    def test_constrained_terms_have_rank_two_over_dim_two(self):
        eq = splitting_equations(standard_neck("N", [elliptic("3/10")]))
        for term in (eq.sum_terms[1], eq.single_term):
            assert term.dimension == 2
            assert term.obstruction_rank == 2

    def test_hyperbolic_orbit_rejected(self):
        with pytest.raises(NotElliptic):
            splitting_equations(standard_neck("N", [hyperbolic(1)]))

    def test_degenerate_orbit_rejected(self):
        degenerate = ReebOrbit("d", "elliptic", theta=Fraction(3, 10),
                               max_iterate=6, morse=False)
        with pytest.raises(NotMorse):
            splitting_equations(standard_neck("N", [degenerate]))

    def test_multi_orbit_neck_rejected(self):
        neck = standard_neck("N", [elliptic("3/10"), elliptic("7/10", name="eta")])
        with pytest.raises(HypothesesViolated):
            splitting_equations(neck)


class TestEllipticNecessity:
    @pytest.mark.parametrize("cz_values", [(1,), (2,), (-3,), (1, 2), (2, 4),
                                           (1, 2, 3), (-1, -2, 5)])
    def test_all_hyperbolic_contradicts(self, cz_values):
        orbits = [hyperbolic(cz, name=f"h{i}") for i, cz in enumerate(cz_values)]
        verdict = elliptic_necessity(standard_neck("N", orbits))
        assert verdict.kind == "CONTRADICTION"

    def test_single_elliptic_consistent(self):
        verdict = elliptic_necessity(standard_neck("N", [elliptic("3/10")]))
        assert verdict.kind == "CONSISTENT"
        assert verdict.elliptic_witness == "gamma"

    def test_adding_elliptic_restores_consistency(self):
        hyp = [hyperbolic(1, "h0"), hyperbolic(2, "h1")]
        assert elliptic_necessity(standard_neck("N", hyp)).kind == "CONTRADICTION"
        mixed = hyp + [elliptic("3/10")]
        verdict = elliptic_necessity(standard_neck("N", mixed))
        assert verdict.kind == "CONSISTENT"

    def test_non_morse_rejected(self):
        with pytest.raises(NotMorse):
            elliptic_necessity(standard_neck("N", [hyperbolic(1, morse=False)]))

    def test_derivation_cites_the_vanishing_axiom(self):
        verdict = elliptic_necessity(standard_neck("N", [hyperbolic(1)]))
        axiom = AXIOMS["hyperbolic-descendant-vanishing"]
        assert any(axiom.name in step.citation for step in verdict.derivation)
        assert any(axiom.provenance in step.citation for step in verdict.derivation)

    def test_no_phantom_strata_citations(self):
        # every constrained cylinder space named in the derivation appears in
        # the boundary stratification of the top constrained cover
        from localsft.exceptional import cylinder_point_strata
        orbit = hyperbolic(1)
        verdict = elliptic_necessity(standard_neck("N", [orbit]))
        graph, family = cylinder_point_strata(orbit)
        known = {node.spec.describe() for node in graph.node_list()}
        cited_any = False
        for step in verdict.derivation:
            if step.step_id.startswith(("point-on-cylinder", "negative-dimension",
                                        "vanishing")):
                cited = [chunk.rstrip(",") for chunk in step.claim.split()
                         if chunk.startswith("M^1[cyl(")]
                for label in cited:
                    cited_any = True
                    assert label in known, f"phantom stratum {label}"
        assert cited_any


class TestGenusGate:
    @pytest.mark.parametrize("genus,intersects,want", [
        (0, True, "ALLOWED"), (1, True, "ALLOWED"),
        (2, True, "EXCLUDED"), (3, True, "EXCLUDED"), (7, True, "EXCLUDED"),
        (0, False, "ALLOWED"), (5, False, "ALLOWED"),
    ])
    def test_gate_table(self, genus, intersects, want):
        assert lagrangian_genus_gate(genus, intersects).kind == want

    def test_exclusion_cites_the_metric_axiom(self):
        verdict = lagrangian_genus_gate(2, True)
        axiom = AXIOMS["uniformizing-metric-hyperbolic"]
        assert any(axiom.name in step.citation for step in verdict.derivation)


class TestNeckConfiguration:
    def test_standard_neck_sides_are_rigid(self):
        neck = standard_neck("N", [elliptic("3/10")])
        assert neck.side_plus.index == 0
        assert neck.side_minus.index == 0
        assert neck.side_plus.rel_c1_doubled + neck.side_minus.rel_c1_doubled == 2

    def test_nonseparating_rejected(self):
        g = elliptic("3/10")
        base = standard_neck("N", [g])
        with pytest.raises(HypothesesViolated):
            NeckConfiguration("M", (g,), base.side_plus, base.side_minus,
                              separating=False)

    def test_positive_index_side_rejected(self):
        g = elliptic("3/10")
        base = standard_neck("N", [g])
        bad = BaseCurve("w", negative_ends=base.side_plus.negative_ends,
                        index=2, rel_c1_doubled=base.side_plus.rel_c1_doubled + 2)
        with pytest.raises(HypothesesViolated):
            NeckConfiguration("M", (g,), bad, base.side_minus)
