"""Preimage search: a brute-force oracle for small targets and a
template-constrained solver for sun-structured composites.

Both solvers work in "slot" space: a candidate graph is grown lazily, each
target vertex getting assigned an unordered pair of candidate vertex slots
(the edge that turns into it).  Fresh slots are introduced in first-use
order, which breaks candidate relabeling symmetry.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import BudgetExceededError, CapacityError, StructureError
from .gadgets import GadgetBlueprint, SubGadget, make_squared_cycle, make_wheel
from .graph import Graph, all_isomorphisms, canonical_form, enumerate_triangles
from .operators import PreimageWitness, verify_certificate

WHEEL = "WHEEL"
SQUARED_CYCLE = "SQUARED_CYCLE"


@dataclass
class SearchLimits:
    max_target_vertices: int = 16
    max_candidate_vertices: int | None = None  # default 2*|V(h)|, exhaustive
    time_budget: float | None = None  # seconds
    node_budget: int | None = None


class _Budget:
    def __init__(self, limits: SearchLimits):
        self.nodes = 0
        self.node_budget = limits.node_budget
        self.deadline = (time.monotonic() + limits.time_budget
                         if limits.time_budget else None)

    def tick(self):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExceededError(f"node budget exhausted ({self.node_budget})")
        if self.deadline is not None and self.nodes % 256 == 0 \
                and time.monotonic() > self.deadline:
            raise BudgetExceededError("time budget exhausted")


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def _target_order(h: Graph) -> list[int]:
    """BFS-ish order so each vertex (after component starts) has an already
    placed neighbor, which forces a shared candidate endpoint."""
    seen: list[int] = []
    in_seen = [False] * h.n
    for start in range(h.n):
        if in_seen[start]:
            continue
        queue = [start]
        in_seen[start] = True
        while queue:
            v = queue.pop(0)
            seen.append(v)
            for w in sorted(h.adj[v]):
                if not in_seen[w]:
                    in_seen[w] = True
                    queue.append(w)
    return seen


class _State:
    __slots__ = ("assign", "edge_owner", "gadj", "slots")

    def __init__(self):
        self.assign: dict[int, tuple[int, int]] = {}   # target -> edge
        self.edge_owner: dict[tuple[int, int], int] = {}
        self.gadj: dict[int, set[int]] = {}
        self.slots = 0

    def new_triangles_ok(self, h: Graph, a: int, b: int) -> bool:
        """Every triangle the new edge (a, b) closes must map to a target
        triangle, or T(candidate) will exceed the target."""
        e_ab = self.edge_owner[(min(a, b), max(a, b))]
        for x in self.gadj[a] & self.gadj[b]:
            t1 = self.edge_owner[(min(a, x), max(a, x))]
            t2 = self.edge_owner[(min(b, x), max(b, x))]
            if not (h.has_edge(t1, e_ab) and h.has_edge(t2, e_ab)
                    and h.has_edge(t1, t2)):
                return False
        return True

    def place(self, h: Graph, tv: int, a: int, b: int) -> bool:
        e = (min(a, b), max(a, b))
        if e in self.edge_owner:
            return False
        self.assign[tv] = e
        self.edge_owner[e] = tv
        grew = max(a, b) >= self.slots
        self.slots = max(self.slots, a + 1, b + 1)
        self.gadj.setdefault(a, set()).add(b)
        self.gadj.setdefault(b, set()).add(a)
        if not self.new_triangles_ok(h, a, b):
            self.unplace(tv, a, b, grew)
            return False
        return True

    def unplace(self, tv: int, a: int, b: int, grew: bool):
        e = (min(a, b), max(a, b))
        del self.assign[tv]
        del self.edge_owner[e]
        self.gadj[a].discard(b)
        self.gadj[b].discard(a)
        if grew:
            self.slots = max((max(x) + 1 for x in self.edge_owner), default=0)


def _candidate_edges_for(state: _State, h: Graph, tv: int, order_pos: dict[int, int],
                         slot_cap: int):
    """Pairs (a, b) the target vertex tv may be assigned, respecting the
    shared-endpoint constraint from already placed target neighbors and the
    fresh-slot introduction order."""
    placed_nbrs = [w for w in h.adj[tv] if w in state.assign]
    fresh = state.slots
    if placed_nbrs:
        # the edge must share an endpoint with EVERY placed neighbor edge;
        # enumerate pairs anchored at endpoints of one neighbor edge
        anchor = set(state.assign[placed_nbrs[0]])
        opts = set()
        others = list(range(state.slots)) + ([fresh] if fresh < slot_cap else [])
        for a in anchor:
            for b in others:
                if a == b:
                    continue
                pair = (min(a, b), max(a, b))
                if all(state.assign[w][0] in pair or state.assign[w][1] in pair
                       for w in placed_nbrs):
                    opts.add(pair)
        return sorted(opts)
    # component start: any pair of existing slots, one fresh, or two fresh
    opts = []
    for a in range(state.slots):
        for b in range(a + 1, state.slots):
            opts.append((a, b))
        if fresh < slot_cap:
            opts.append((a, fresh))
    if fresh + 1 < slot_cap:
        opts.append((fresh, fresh + 1))
    return opts


def _search_assignments(h: Graph, limits: SearchLimits):
    """Yields every complete certified assignment (slot-canonical), i.e.
    dict target -> candidate edge, such that T(candidate) maps onto h."""
    slot_cap = limits.max_candidate_vertices or 2 * h.n
    order = _target_order(h)
    order_pos = {v: i for i, v in enumerate(order)}
    state = _State()
    budget = _Budget(limits)

    def rec(i: int):
        if i == len(order):
            cand = Graph(state.slots, state.edge_owner.keys())
            w = PreimageWitness(h, cand, dict(state.edge_owner))
            if verify_certificate(w):
                yield dict(state.edge_owner)
            return
        tv = order[i]
        for a, b in _candidate_edges_for(state, h, tv, order_pos, slot_cap):
            budget.tick()
            if state.place(h, tv, a, b):
                yield from rec(i + 1)
                state.unplace(tv, a, b, True)

    yield from rec(0)


def brute_force_preimages(h: Graph, limits: SearchLimits | None = None) -> list[PreimageWitness]:
    """All preimage isomorphism classes of h, one verifying witness each.

    Complete within the candidate-vertex bound (default 2|V(h)|, which no
    preimage can exceed).  Empty list means h has no preimage at all.
    """
    limits = limits or SearchLimits()
    if h.n > limits.max_target_vertices:
        raise CapacityError(
            f"target has {h.n} vertices, over the limit "
            f"{limits.max_target_vertices}")
    seen: dict[bytes, PreimageWitness] = {}
    for edge_owner in _search_assignments(h, limits):
        cand = Graph(1 + max((max(e) for e in edge_owner), default=-1),
                     edge_owner.keys())
        key = canonical_form(cand)
        if key not in seen:
            seen[key] = PreimageWitness(h, cand, edge_owner)
    return [seen[k] for k in sorted(seen)]


def count_labeled_preimages(h: Graph, limits: SearchLimits | None = None) -> int:
    """Certified (candidate, bijection) pairs modulo candidate relabeling."""
    limits = limits or SearchLimits()
    if h.n > limits.max_target_vertices:
        raise CapacityError("target too large")
    reps: dict[bytes, Graph] = {}
    keys: set[tuple] = set()
    for edge_owner in _search_assignments(h, limits):
        cand = Graph(1 + max((max(e) for e in edge_owner), default=-1),
                     edge_owner.keys())
        ck = canonical_form(cand)
        rep = reps.setdefault(ck, cand)
        best = None
        for sigma in all_isomorphisms(cand, rep):
            img = tuple(sorted(
                (min(sigma[u], sigma[v]), max(sigma[u], sigma[v]), t)
                for (u, v), t in edge_owner.items()))
            if best is None or img < best:
                best = img
        keys.add((ck, best))
    return len(keys)


def is_tlg_small(h: Graph, limits: SearchLimits | None = None):
    """Three-valued recognition: ('YES', witness) / ('NO', None) /
    ('UNKNOWN', reason)."""
    try:
        found = brute_force_preimages(h, limits)
    except BudgetExceededError as exc:
        return ("UNKNOWN", str(exc))
    if found:
        return ("YES", found[0])
    return ("NO", None)


# ---------------------------------------------------------------------------
# Template solver
# ---------------------------------------------------------------------------


@dataclass
class TemplateAssignment:
    choices: dict[str, str]           # unit name -> WHEEL | SQUARED_CYCLE
    witness: PreimageWitness


def _template_edge_maps(k: int):
    """For each template kind, the list of automorphism-induced labelings:
    maps from sun position index (0..2k-1; 2p = cycle p, 2p+1 = apex p) to a
    template edge."""
    out = {}
    for kind, bp in ((WHEEL, make_wheel(k)), (SQUARED_CYCLE, make_squared_cycle(k))):
        g = bp.graph
        if kind == WHEEL:
            hub = k
            base = {}
            for p in range(k):
                base[2 * p] = (hub, p)              # spoke -> cycle vertex p
                base[2 * p + 1] = (p, (p + 1) % k)  # rim -> apex p
        else:
            base = {}
            for p in range(k):
                base[2 * p] = (p, (p + 1) % k)      # short edge -> cycle p
                base[2 * p + 1] = (p, (p + 2) % k)  # chord -> apex p
        maps = []
        for sigma in all_isomorphisms(g, g):
            maps.append({idx: (sigma[u], sigma[v]) for idx, (u, v) in base.items()})
        out[kind] = (g, maps)
    return out


_TEMPLATES_CACHE: dict[int, dict] = {}


def _templates(k: int):
    if k not in _TEMPLATES_CACHE:
        _TEMPLATES_CACHE[k] = _template_edge_maps(k)
    return _TEMPLATES_CACHE[k]


def _solver_units(bp: GadgetBlueprint) -> list[tuple[str, SubGadget]]:
    units = []
    if bp.kind in ("sun7", "sun12") and "cycle" in bp.roles:
        units.append(("self", SubGadget(bp.kind, tuple(range(bp.graph.n)),
                                        dict(bp.roles))))
    for name in sorted(bp.sub_gadgets):
        sg = bp.sub_gadgets[name]
        if sg.kind in ("sun7", "sun12") and name != "self":
            units.append((name, sg))
    return units


def _check_triangle_coverage(bp: GadgetBlueprint, units) -> None:
    sets = [set(sg.vertices) for _, sg in units]
    for tri in enumerate_triangles(bp.graph):
        tv = set(tri)
        if not any(tv <= s for s in sets):
            raise StructureError(
                f"triangle {tri} not inside any registered sun unit")


def _order_units(units):
    """Greedy: start at the lexicographically first unit, then always take
    the unit with maximum vertex overlap with what is already placed."""
    remaining = dict(units)
    order = []
    placed: set[int] = set()
    while remaining:
        if not order:
            name = min(remaining)
        else:
            best = max(len(placed & set(sg.vertices)) for sg in remaining.values())
            name = min(nm for nm, sg in remaining.items()
                       if len(placed & set(sg.vertices)) == best)
        sg = remaining.pop(name)
        order.append((name, sg))
        placed |= set(sg.vertices)
    return order


def _unit_positions(sg: SubGadget) -> dict[int, int]:
    """Host vertex -> sun position index (2p cycle / 2p+1 apex)."""
    pos = {}
    for p, v in enumerate(sg.roles["cycle"]):
        pos[2 * p] = v
    for p, v in enumerate(sg.roles["apex"]):
        pos[2 * p + 1] = v
    return pos


def _place_unit(state: _State, h: Graph, sg: SubGadget,
                edge_map: dict[int, tuple[int, int]], budget: _Budget):
    """Embed one unit labeling into the global state.  Template vertices
    map to slots forced by already assigned targets, or to fresh slots.
    Yields once per consistent embedding with the placements applied, and
    unwinds them itself on resumption.
    """
    pos = _unit_positions(sg)
    sigma: dict[int, int] = {}  # template vertex -> slot, injective
    used: set[int] = set()
    # order: assigned targets first, then expand along template adjacency so
    # each free vertex is reached from pinned ones where possible
    pending = sorted(edge_map.items())
    items = []
    known: set[int] = set()
    for idx, (p, q) in pending:
        if pos[idx] in state.assign:
            known.update((p, q))
    while pending:
        pick = None
        for cand in pending:
            idx, (p, q) = cand
            if pos[idx] in state.assign:
                pick = cand
                break
            if pick is None and (p in known or q in known):
                pick = cand
        if pick is None:
            pick = pending[0]
        pending.remove(pick)
        items.append(pick)
        known.update(pick[1])
    base_slots = state.slots  # slots existing before this unit

    def pin(t: int, s: int) -> bool:
        if t in sigma:
            return sigma[t] == s
        if s in used:
            return False
        sigma[t] = s
        used.add(s)
        return True

    def unpin(t: int):
        if t in sigma:
            used.discard(sigma.pop(t))

    def rec(j: int):
        if j == len(items):
            yield None
            return
        idx, (p, q) = items[j]
        tv = pos[idx]
        budget.tick()
        if tv in state.assign:
            a, b = state.assign[tv]
            for x, y in ((a, b), (b, a)):
                news = [t for t in (p, q) if t not in sigma]
                if pin(p, x) and pin(q, y):
                    yield from rec(j + 1)
                for t in news:
                    unpin(t)
            return
        # target unassigned: each endpoint is its pinned slot, or any slot
        # that predates this unit (cross-unit sharing), or the next fresh one
        def endpoint_options(t: int, taken: int | None):
            if t in sigma:
                return [sigma[t]]
            opts = [s for s in range(base_slots) if s not in used and s != taken]
            fresh = state.slots
            if fresh != taken and fresh >= base_slots:
                opts.append(fresh)
            elif fresh == taken:
                opts.append(fresh + 1)
            return opts

        for a in endpoint_options(p, None):
            newp = p not in sigma
            if not pin(p, a):
                continue
            for b in endpoint_options(q, a):
                newq = q not in sigma
                if pin(q, b) and state.place(h, tv, a, b):
                    yield from rec(j + 1)
                    state.unplace(tv, a, b, True)
                if newq:
                    unpin(q)
            if newp:
                unpin(p)

    yield from rec(0)


def template_solve(bp: GadgetBlueprint,
                   limits: SearchLimits | None = None,
                   pin: dict[str, str] | None = None,
                   max_results: int | None = None) -> list[TemplateAssignment]:
    """Enumerate consistent global wheel / squared-cycle choices over all
    registered sun units; one certified witness per distinct choice vector.

    pin fixes the choice of named units (others stay free); max_results
    stops the enumeration early, which together with a full pin turns the
    solver into a witness materializer for one prescribed choice vector.
    """
    limits = limits or SearchLimits()
    pin = pin or {}
    h = bp.graph
    units = _solver_units(bp)
    if not units:
        raise StructureError("blueprint has no registered sun units")
    unknown = set(pin) - {name for name, _ in units}
    if unknown:
        raise StructureError(f"pinned units not registered: {sorted(unknown)}")
    _check_triangle_coverage(bp, units)
    order = _order_units(units)
    budget = _Budget(limits)
    state = _State()
    results: dict[tuple, TemplateAssignment] = {}
    choices: dict[str, str] = {}

    class _Done(Exception):
        pass

    def rec(i: int):
        if i == len(order):
            key = tuple(sorted(choices.items()))
            if key in results:
                return
            cand = Graph(state.slots, state.edge_owner.keys())
            w = PreimageWitness(h, cand, dict(state.edge_owner))
            if verify_certificate(w):
                results[key] = TemplateAssignment(dict(choices), w)
                if max_results is not None and len(results) >= max_results:
                    raise _Done
            return
        name, sg = order[i]
        k = len(sg.roles["cycle"])
        first = i == 0
        pre_assigned = set(state.assign)
        kinds = (pin[name],) if name in pin else (WHEEL, SQUARED_CYCLE)
        for kind in kinds:
            _, maps = _templates(k)[kind]
            choices[name] = kind
            # the first unit needs one labeling only: the dihedral group acts
            # by candidate relabeling, absorbed by slot canonicalization.
            # Distinct labelings often force identical placements; recurse
            # once per distinct resulting state.
            sigs = []
            seen_sigs = set()
            for edge_map in (maps[:1] if first else maps):
                for _ in _place_unit(state, h, sg, edge_map, budget):
                    sig = tuple(sorted(
                        (tv, e) for tv, e in state.assign.items()
                        if tv not in pre_assigned))
                    if sig not in seen_sigs:
                        seen_sigs.add(sig)
                        sigs.append(sig)
            for sig in sigs:
                ok = all(state.place(h, tv, a, b) for tv, (a, b) in sig)
                if ok:
                    rec(i + 1)
                for tv, (a, b) in reversed(sig):
                    if tv in state.assign:
                        state.unplace(tv, a, b, True)
            del choices[name]

    try:
        rec(0)
    except _Done:
        pass
    return [results[k] for k in sorted(results)]
