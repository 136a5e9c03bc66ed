from __future__ import annotations

import random

import pytest

from trilin.errors import BudgetExceededError, CapacityError, StructureError
from trilin.gadgets import (
    attach_equal,
    attach_not,
    designate_attachments,
    join_clause,
    make_binary_enforced_sun,
    make_bowtie,
    make_squared_cycle,
    make_sun,
    make_wheel,
)
from trilin.graph import Graph, canonical_form, is_isomorphic
from trilin.operators import triangular_line_graph, verify_certificate
from trilin.search import (
    SQUARED_CYCLE,
    WHEEL,
    SearchLimits,
    brute_force_preimages,
    count_labeled_preimages,
    is_tlg_small,
    template_solve,
)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def test_bowtie_has_one_class_two_labelings():
    bowtie = make_bowtie().graph
    found = brute_force_preimages(bowtie)
    assert len(found) == 1
    w = found[0]
    assert verify_certificate(w)
    assert is_isomorphic(w.candidate, Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]))
    assert count_labeled_preimages(bowtie) == 2


def test_triangle_preimages():
    # the star K_{1,3} is triangle-free, so only K3 itself maps to K3
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    found = brute_force_preimages(tri)
    assert len(found) == 1
    assert canonical_form(found[0].candidate) == canonical_form(tri)


def test_single_vertex_target():
    found = brute_force_preimages(Graph(1, []))
    assert len(found) == 1
    assert len(found[0].candidate.edges) == 1


def test_nonrealizable_targets():
    # a single edge cannot be hit: adjacency in the derived graph demands a
    # full triangle, which brings a third vertex
    assert brute_force_preimages(Graph(2, [(0, 1)])) == []
    status, _ = is_tlg_small(Graph(2, [(0, 1)]))
    assert status == "NO"
    # K4 - e is likewise not a triangular line graph
    assert brute_force_preimages(Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])) == []


def test_is_tlg_small_yes_and_unknown():
    bowtie = make_bowtie().graph
    status, w = is_tlg_small(bowtie)
    assert status == "YES" and verify_certificate(w)
    status, reason = is_tlg_small(bowtie, SearchLimits(node_budget=1))
    assert status == "UNKNOWN" and "budget" in reason.lower()


def test_oracle_respects_target_cap():
    with pytest.raises(CapacityError):
        brute_force_preimages(make_sun(12).graph, SearchLimits(max_target_vertices=16))


def test_oracle_round_trips_small_operator_images():
    rng = random.Random(23)
    checked = 0
    while checked < 12:
        n = rng.randint(3, 6)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < 0.55]
        g = Graph(n, edges)
        h = triangular_line_graph(g).derived
        if h.n > 9:
            continue
        found = brute_force_preimages(h)
        keys = {canonical_form(w.candidate) for w in found}
        # the preimage we started from (minus isolated vertices) must appear
        used = sorted({v for e in g.sorted_edges for v in e})
        idx = {v: i for i, v in enumerate(used)}
        core = Graph(len(used), [(idx[u], idx[v]) for u, v in g.sorted_edges])
        assert canonical_form(core) in keys
        for w in found:
            assert verify_certificate(w)
        checked += 1


def test_seven_sun_brute_force_two_classes():
    found = brute_force_preimages(make_sun(7).graph)
    assert len(found) == 2
    kinds = set()
    for w in found:
        assert verify_certificate(w)
        if is_isomorphic(w.candidate, make_wheel(7).graph):
            kinds.add("wheel")
        elif is_isomorphic(w.candidate, make_squared_cycle(7).graph):
            kinds.add("cycle")
    assert kinds == {"wheel", "cycle"}


def test_budget_raises_cleanly():
    with pytest.raises(BudgetExceededError):
        brute_force_preimages(make_sun(7).graph, SearchLimits(node_budget=10))


# ---------------------------------------------------------------------------
# Template solver
# ---------------------------------------------------------------------------


def test_template_solve_single_7sun():
    found = template_solve(designate_attachments(make_sun(7)))
    assert len(found) == 2
    kinds = {a.choices["self"] for a in found}
    assert kinds == {WHEEL, SQUARED_CYCLE}
    for a in found:
        assert verify_certificate(a.witness)


def test_template_solve_agrees_with_oracle_on_7sun():
    solved = {canonical_form(a.witness.candidate)
              for a in template_solve(designate_attachments(make_sun(7)))}
    brute = {canonical_form(w.candidate)
             for w in brute_force_preimages(make_sun(7).graph)}
    assert solved == brute


def test_equal_join_forces_agreement():
    sun = designate_attachments(make_sun(7))
    found = template_solve(attach_equal(sun, "equal", sun, "root"))
    assert len(found) == 2
    for a in found:
        assert verify_certificate(a.witness)
        assert a.choices["a"] == a.choices["b"]
    assert {a.choices["a"] for a in found} == {WHEEL, SQUARED_CYCLE}


def test_not_join_forces_disagreement():
    sun = designate_attachments(make_sun(7))
    found = template_solve(attach_not(sun, "not", sun, "root"))
    assert len(found) == 2
    for a in found:
        assert verify_certificate(a.witness)
        assert a.choices["a"] != a.choices["b"]


def test_pinned_solve_restricts_results():
    sun = designate_attachments(make_sun(7))
    eq = attach_equal(sun, "equal", sun, "root")
    pinned = template_solve(eq, pin={"a": SQUARED_CYCLE})
    assert len(pinned) == 1
    assert pinned[0].choices == {"a": SQUARED_CYCLE, "b": SQUARED_CYCLE}
    assert template_solve(eq, pin={"a": SQUARED_CYCLE, "b": WHEEL}) == []
    nt = attach_not(sun, "not", sun, "root")
    pinned = template_solve(nt, pin={"a": WHEEL})
    assert len(pinned) == 1
    assert pinned[0].choices["b"] == SQUARED_CYCLE


def test_pinned_solve_validates_unit_names():
    sun = designate_attachments(make_sun(7))
    with pytest.raises(StructureError):
        template_solve(sun, pin={"nonexistent": WHEEL})


def test_max_results_short_circuits():
    sun = designate_attachments(make_sun(7))
    found = template_solve(sun, max_results=1)
    assert len(found) == 1
    assert verify_certificate(found[0].witness)


def test_binary_enforcement_collapses_twelve_sun():
    # at tap size 12 the chain chords force a triangle among the would-be
    # squared-cycle fragments, leaving only the shared-hub wheel preimage
    found = template_solve(make_binary_enforced_sun(12))
    assert len(found) == 1
    a = found[0]
    assert set(a.choices.values()) == {WHEEL}
    assert verify_certificate(a.witness)
    bp = make_binary_enforced_sun(12)
    inv = {t: e for e, t in a.witness.edge_to_vertex.items()}
    hubs = None
    for name, sg in bp.sub_gadgets.items():
        if sg.kind != "sun7":
            continue
        common = None
        for slot in sg.roles["cycle"]:
            ends = set(inv[slot])
            common = ends if common is None else common & ends
        assert len(common) == 1
        hubs = common if hubs is None else hubs | common
    # all twelve wheel fragments share one hub vertex
    assert len(hubs) == 1


def test_binary_enforcement_keeps_both_sides_at_thirteen():
    # one step up the cycle length, the chord pattern avoids the forced
    # triangle and both template families survive
    found = template_solve(make_binary_enforced_sun(13))
    kinds = {frozenset(a.choices.values()) for a in found}
    assert frozenset({WHEEL}) in kinds
    assert frozenset({SQUARED_CYCLE}) in kinds
    assert len(found) == 2
    for a in found:
        assert verify_certificate(a.witness)


def test_clause_gadget_pinned_patterns():
    bp = join_clause(make_sun(12), make_sun(12), make_sun(12))
    # the all-wheel pattern is infeasible; one mixed pattern is feasible
    assert template_solve(bp, pin={"S1": WHEEL, "S2": WHEEL, "S3": WHEEL}) == []
    found = template_solve(
        bp, pin={"S1": SQUARED_CYCLE, "S2": SQUARED_CYCLE, "S3": SQUARED_CYCLE},
        max_results=1)
    assert len(found) == 1
    assert verify_certificate(found[0].witness)
