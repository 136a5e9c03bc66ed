"""Constructors for bowties, fans, wheels, suns, and the composite gadgets.

A blueprint is a graph annotated with named roles (vertex tuples) and a
registry of sub-gadgets addressed by slash-separated paths.  Composition
works by disjoint union followed by vertex identification; parallel edges
arising from merged triangles collapse silently (set semantics).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GraphConstructionError, ParseError, StructureError
from .graph import (
    Graph,
    enumerate_triangles,
    from_json_obj,
    to_json_obj,
)

EQUAL = "EQUAL"
NOT = "NOT"


@dataclass(frozen=True)
class SubGadget:
    """A registered sub-structure: vertex subset of the host plus roles."""

    kind: str
    vertices: tuple[int, ...]
    roles: dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class GadgetBlueprint:
    graph: Graph
    kind: str
    roles: dict[str, tuple[int, ...]] = field(default_factory=dict)
    sub_gadgets: dict[str, SubGadget] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def sub(self, path: str) -> SubGadget:
        try:
            return self.sub_gadgets[path]
        except KeyError:
            raise StructureError(f"no sub-gadget named {path!r}")

    def to_json_obj(self) -> dict:
        return {
            "graph": to_json_obj(self.graph),
            "kind": self.kind,
            "roles": {k: list(v) for k, v in sorted(self.roles.items())},
            "sub_gadgets": {
                name: {
                    "kind": sg.kind,
                    "vertices": list(sg.vertices),
                    "roles": {k: list(v) for k, v in sorted(sg.roles.items())},
                }
                for name, sg in sorted(self.sub_gadgets.items())
            },
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @staticmethod
    def from_json_obj(obj: dict) -> "GadgetBlueprint":
        try:
            graph = from_json_obj(obj["graph"])
            subs = {
                name: SubGadget(
                    d["kind"],
                    tuple(d["vertices"]),
                    {k: tuple(v) for k, v in d["roles"].items()},
                )
                for name, d in obj.get("sub_gadgets", {}).items()
            }
            roles = {k: tuple(v) for k, v in obj.get("roles", {}).items()}
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad blueprint JSON: {exc}")
        return GadgetBlueprint(graph, obj.get("kind", ""), roles, subs, obj.get("meta", {}))


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def _validate_bowtie(g: Graph, center: int, t1: tuple[int, int], t2: tuple[int, int]) -> None:
    verts = (center,) + tuple(t1) + tuple(t2)
    if len(set(verts)) != 5:
        raise StructureError("bowtie roles must name five distinct vertices")
    for a, b in (t1, t2):
        for u, v in ((center, a), (center, b), (a, b)):
            if not g.has_edge(u, v):
                raise StructureError(f"missing bowtie edge ({u},{v})")
    # the two triangles must share only the center
    if g.has_edge(t1[0], t2[0]) or g.has_edge(t1[0], t2[1]) \
            or g.has_edge(t1[1], t2[0]) or g.has_edge(t1[1], t2[1]):
        raise StructureError("bowtie triangles share more than the center")


def _require_sun7(bp: GadgetBlueprint) -> None:
    if bp.kind != "sun7" or "cycle" not in bp.roles or "apex" not in bp.roles:
        raise StructureError("expected a 7-sun blueprint with cycle/apex roles")
    if len(bp.roles["cycle"]) != 7 or len(bp.roles["apex"]) != 7:
        raise StructureError("7-sun roles have wrong arity")


# ---------------------------------------------------------------------------
# Assembly: disjoint union + identification, with registry translation
# ---------------------------------------------------------------------------


class Assembly:
    """Incrementally builds a composite blueprint.

    Parts are added with a path prefix; identifications are collected in
    union-id space and applied once at build time.
    """

    def __init__(self):
        self._n = 0
        self._edges: list[tuple[int, int]] = []
        self._labels: dict[int, str] = {}
        self._subs: dict[str, SubGadget] = {}
        self._pairs: list[tuple[int, int]] = []
        self._part_roles: dict[str, dict[str, tuple[int, ...]]] = {}

    def add(self, bp: GadgetBlueprint, prefix: str) -> None:
        off = self._n
        g = bp.graph
        self._n += g.n
        self._edges.extend((u + off, v + off) for u, v in g.sorted_edges)
        for v in range(g.n):
            base = g.labels.get(v) if g.labels else f"v{v}"
            self._labels[v + off] = f"{prefix}/{base}" if prefix else base
        shift = lambda t: tuple(x + off for x in t)
        self._part_roles[prefix] = {k: shift(v) for k, v in bp.roles.items()}
        self._subs[prefix] = SubGadget(
            bp.kind, tuple(range(off, off + g.n)), self._part_roles[prefix]
        )
        for name, sg in bp.sub_gadgets.items():
            path = f"{prefix}/{name}" if prefix else name
            self._subs[path] = SubGadget(
                sg.kind, shift(sg.vertices), {k: shift(v) for k, v in sg.roles.items()}
            )

    def sub(self, path: str) -> SubGadget:
        try:
            return self._subs[path]
        except KeyError:
            raise StructureError(f"no sub-gadget named {path!r}")

    def identify(self, u: int, v: int) -> None:
        self._pairs.append((u, v))

    def bowtie_join(self, path_a: str, path_b: str, mode: str) -> None:
        """Identify two attachment bowties per the EQUAL or NOT pattern."""
        ba, bb = self.sub(path_a), self.sub(path_b)
        for sg, path in ((ba, path_a), (bb, path_b)):
            if sg.kind != "bowtie":
                raise StructureError(f"{path!r} is not a bowtie sub-gadget")
        ca, (ca1, aa1), (ca2, aa2) = (
            ba.roles["center"][0], ba.roles["t1"], ba.roles["t2"],
        )
        cb, (cb1, ab1), (cb2, ab2) = (
            bb.roles["center"][0], bb.roles["t1"], bb.roles["t2"],
        )
        self.identify(ca, cb)
        if mode == EQUAL:
            # both triangles: identify vertices of different degrees
            self.identify(ca1, ab1)
            self.identify(aa1, cb1)
        elif mode == NOT:
            # one triangle same-degree, the other different
            self.identify(ca1, cb1)
            self.identify(aa1, ab1)
        else:
            raise StructureError(f"unknown join mode {mode!r}")
        self.identify(ca2, ab2)
        self.identify(aa2, cb2)

    def build(self, kind: str, roles: dict[str, tuple[int, ...]] | None = None,
              meta: dict | None = None) -> GadgetBlueprint:
        parent = list(range(self._n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self._pairs:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        reps = sorted({find(v) for v in range(self._n)})
        new_id = {r: i for i, r in enumerate(reps)}
        vmap = [new_id[find(v)] for v in range(self._n)]

        groups: dict[int, list[int]] = {}
        for v in range(self._n):
            groups.setdefault(vmap[v], []).append(v)
        labels = {}
        for nid, olds in groups.items():
            parts = sorted({p for o in olds for p in self._labels[o].split("=")})
            labels[nid] = "=".join(parts)

        edges = {(min(vmap[u], vmap[v]), max(vmap[u], vmap[v])) for u, v in self._edges}
        graph = Graph(len(reps), edges, labels)

        tr = lambda t: tuple(vmap[x] for x in t)
        subs = {
            name: SubGadget(
                sg.kind,
                tuple(sorted({vmap[x] for x in sg.vertices})),
                {k: tr(v) for k, v in sg.roles.items()},
            )
            for name, sg in self._subs.items()
        }
        out_roles = {k: tr(v) for k, v in (roles or {}).items()}
        return GadgetBlueprint(graph, kind, out_roles, subs, meta or {})


# ---------------------------------------------------------------------------
# Elementary gadgets
# ---------------------------------------------------------------------------


def make_bowtie() -> GadgetBlueprint:
    """Two triangles sharing one vertex (the center): 5 vertices, 6 edges."""
    g = Graph(
        5,
        [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)],
        {0: "center", 1: "t1c", 2: "t1a", 3: "t2c", 4: "t2a"},
    )
    roles = {"center": (0,), "t1": (1, 2), "t2": (3, 4)}
    _validate_bowtie(g, 0, (1, 2), (3, 4))
    return GadgetBlueprint(g, "bowtie", roles)


def make_double_triangle() -> GadgetBlueprint:
    """K4 minus an edge: 4 vertices, 5 edges; T of it is the bowtie."""
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)],
              {0: "u", 1: "s1", 2: "s2", 3: "v"})
    return GadgetBlueprint(g, "double_triangle", {"shared_edge": (1, 2)})


def make_fan(k: int) -> GadgetBlueprint:
    """k triangles sharing a hub, consecutive ones sharing an edge."""
    if k < 3:
        raise StructureError(f"fan needs k >= 3, got {k}")
    hub = 0
    rim = list(range(1, k + 2))
    edges = [(hub, r) for r in rim]
    edges += [(rim[i], rim[i + 1]) for i in range(k)]
    labels = {0: "hub", **{r: f"r{i}" for i, r in enumerate(rim)}}
    g = Graph(k + 2, edges, labels)
    return GadgetBlueprint(g, "fan", {"hub": (hub,), "rim": tuple(rim)})


def make_triangle_strip(k: int) -> GadgetBlueprint:
    """k triangles in a strip: triangles at distance two share a vertex."""
    if k < 3:
        raise StructureError(f"triangle strip needs k >= 3, got {k}")
    n = k + 2
    edges = [(i, i + 1) for i in range(n - 1)]
    edges += [(i, i + 2) for i in range(n - 2)]
    g = Graph(n, edges, {i: f"v{i}" for i in range(n)})
    return GadgetBlueprint(g, "strip", {"spine": tuple(range(n))})


def make_wheel(k: int) -> GadgetBlueprint:
    """k-cycle plus a dominating hub: k+1 vertices, 2k edges."""
    if k < 4:
        raise StructureError(f"wheel needs k >= 4, got {k}")
    hub = k
    edges = [(i, (i + 1) % k) for i in range(k)] + [(i, hub) for i in range(k)]
    labels = {**{i: f"c{i}" for i in range(k)}, hub: "hub"}
    g = Graph(k + 1, edges, labels)
    return GadgetBlueprint(g, f"wheel{k}", {"cycle": tuple(range(k)), "hub": (hub,)})


def make_squared_cycle(k: int) -> GadgetBlueprint:
    """k-cycle with chords between distance-2 vertices: k vertices, 2k edges."""
    if k < 5:
        raise StructureError(f"squared cycle needs k >= 5, got {k}")
    edges = [(i, (i + 1) % k) for i in range(k)] + [(i, (i + 2) % k) for i in range(k)]
    g = Graph(k, edges, {i: f"c{i}" for i in range(k)})
    return GadgetBlueprint(g, f"squared_cycle{k}", {"cycle": tuple(range(k))})


def _sun_parts(k: int, off: int = 0):
    cycle = tuple(range(off, off + k))
    apex = tuple(range(off + k, off + 2 * k))
    edges = [(cycle[i], cycle[(i + 1) % k]) for i in range(k)]
    for i in range(k):
        edges += [(apex[i], cycle[i]), (apex[i], cycle[(i + 1) % k])]
    return cycle, apex, edges


def make_sun(k: int) -> GadgetBlueprint:
    """k-cycle with one degree-2 apex on each cycle edge: 2k vertices, 3k edges."""
    if k < 4:
        raise StructureError(f"sun needs k >= 4, got {k}")
    cycle, apex, edges = _sun_parts(k)
    labels = {**{c: f"c{i}" for i, c in enumerate(cycle)},
              **{a: f"a{i}" for i, a in enumerate(apex)}}
    g = Graph(2 * k, edges, labels)
    roles = {"cycle": cycle, "apex": apex}
    if k == 12:
        # clause-attachment triangles at the appendix coordinates
        roles["a_triangle"] = (cycle[0], cycle[1], apex[0])
        roles["b_triangle"] = (cycle[6], cycle[7], apex[6])
    kind = "sun7" if k == 7 else f"sun{k}"
    return GadgetBlueprint(g, kind, roles)


def _sun_bowtie(g: Graph, cycle: tuple[int, ...], apex: tuple[int, ...],
                center_idx: int) -> SubGadget:
    """Bowtie of the two sun triangles meeting at cycle vertex center_idx."""
    k = len(cycle)
    i = center_idx
    center = cycle[i]
    t1 = (cycle[(i - 1) % k], apex[(i - 1) % k])
    t2 = (cycle[(i + 1) % k], apex[i])
    _validate_bowtie(g, center, t1, t2)
    return SubGadget("bowtie", (center,) + t1 + t2,
                     {"center": (center,), "t1": t1, "t2": t2})


def designate_attachments(sun7: GadgetBlueprint) -> GadgetBlueprint:
    """Mark the ROOT / EQUAL / NOT bowties on a 7-sun.

    Positions (cycle vertices 0..6, triangle i = (c_i, c_{i+1}, a_i)):
    ROOT centered at c0, EQUAL at c2, NOT at c4 -- pairwise triangle-disjoint.
    Idempotent.
    """
    _require_sun7(sun7)
    cycle, apex = sun7.roles["cycle"], sun7.roles["apex"]
    subs = dict(sun7.sub_gadgets)
    subs["root"] = _sun_bowtie(sun7.graph, cycle, apex, 0)
    subs["equal"] = _sun_bowtie(sun7.graph, cycle, apex, 2)
    subs["not"] = _sun_bowtie(sun7.graph, cycle, apex, 4)
    return GadgetBlueprint(sun7.graph, sun7.kind, sun7.roles, subs, sun7.meta)


def make_binary_enforced_sun(k: int) -> GadgetBlueprint:
    """k-sun plus, for each i, a three-triangle chain from c_i to c_{i+4},
    closing an embedded 7-sun with the four sun triangles in between."""
    if k < 9:
        raise StructureError(f"binary-enforced sun needs k >= 9, got {k}")
    cycle, apex, edges = _sun_parts(k)
    labels = {**{c: f"c{i}" for i, c in enumerate(cycle)},
              **{a: f"a{i}" for i, a in enumerate(apex)}}
    n = 2 * k
    subs: dict[str, SubGadget] = {}
    chain_info = []
    for i in range(k):
        w1, w2, p1, p2, p3 = n, n + 1, n + 2, n + 3, n + 4
        n += 5
        ci, ci4 = cycle[i], cycle[(i + 4) % k]
        edges += [
            (ci4, w1), (w1, w2), (w2, ci),
            (ci4, p1), (w1, p1),
            (w1, p2), (w2, p2),
            (w2, p3), (ci, p3),
        ]
        for v, name in ((w1, f"w1_{i}"), (w2, f"w2_{i}"), (p1, f"p1_{i}"),
                        (p2, f"p2_{i}"), (p3, f"p3_{i}")):
            labels[v] = name
        chain_info.append((i, w1, w2, p1, p2, p3))
    g = Graph(n, edges, labels)

    for i, w1, w2, p1, p2, p3 in chain_info:
        cyc7 = tuple(cycle[(i + d) % k] for d in range(5)) + (w1, w2)
        apx7 = tuple(apex[(i + d) % k] for d in range(4)) + (p1, p2, p3)
        subs[f"emb{i}"] = SubGadget(
            "sun7", tuple(sorted(cyc7 + apx7)), {"cycle": cyc7, "apex": apx7}
        )
        t1 = (cycle[(i + 4) % k], p1)
        t2 = (w2, p2)
        _validate_bowtie(g, w1, t1, t2)
        subs[f"emb{i}/chain"] = SubGadget(
            "bowtie", (w1,) + t1 + t2, {"center": (w1,), "t1": t1, "t2": t2}
        )
    subs["sun12" if k == 12 else f"sun{k}"] = SubGadget(
        f"sun{k}", tuple(cycle + apex), {"cycle": cycle, "apex": apex}
    )
    roles = {"cycle": cycle, "apex": apex}
    if k == 12:
        roles["a_triangle"] = (cycle[0], cycle[1], apex[0])
        roles["b_triangle"] = (cycle[6], cycle[7], apex[6])
    return GadgetBlueprint(g, f"binary_sun{k}", roles, subs)


# ---------------------------------------------------------------------------
# Joins
# ---------------------------------------------------------------------------


def _join(a: GadgetBlueprint, bowtie_a: str, b: GadgetBlueprint, bowtie_b: str,
          mode: str, kind: str, prefix_a: str = "a", prefix_b: str = "b") -> GadgetBlueprint:
    asm = Assembly()
    asm.add(a, prefix_a)
    asm.add(b, prefix_b)
    asm.bowtie_join(f"{prefix_a}/{bowtie_a}", f"{prefix_b}/{bowtie_b}", mode)
    return asm.build(kind)


def attach_equal(a: GadgetBlueprint, bowtie_a: str,
                 b: GadgetBlueprint, bowtie_b: str) -> GadgetBlueprint:
    """EQUAL gadget: centers identified, then cycle vertices of one sun
    identified with apexes of the other in both bowtie triangles."""
    return _join(a, bowtie_a, b, bowtie_b, EQUAL, "equal_join")


def attach_not(a: GadgetBlueprint, bowtie_a: str,
               b: GadgetBlueprint, bowtie_b: str) -> GadgetBlueprint:
    """NOT gadget: same-degree identification in one triangle, different in
    the other."""
    return _join(a, bowtie_a, b, bowtie_b, NOT, "not_join")


def make_wire(k: int) -> GadgetBlueprint:
    """k+1 chained 7-suns H0..Hk, consecutive pairs joined by NOT gadgets."""
    if k < 0:
        raise StructureError("wire length must be >= 0")
    asm = Assembly()
    sun = designate_attachments(make_sun(7))
    for i in range(k + 1):
        asm.add(sun, f"H{i}")
        if i > 0:
            asm.bowtie_join(f"H{i-1}/not", f"H{i}/root", NOT)
    return asm.build("wire", meta={"length": k})


def make_large_variable_gadget(i: int, j: int) -> GadgetBlueprint:
    """Binary-enforced 12-sun whose embedded 7-sun at chain 0 is H'.

    H' attaches to the wire by an EQUAL gadget at its chain bowtie (centered
    at w1_0), which keeps the identifications away from the clause-attachment
    triangles at appendix indices 0,1,2 and 12,13,14.
    """
    base = make_binary_enforced_sun(12)
    roles = dict(base.roles)
    roles["hprime"] = base.sub("emb0").vertices
    meta = {"variable": i, "tap": j, "hprime_unit": "emb0",
            "equal_bowtie": "emb0/chain"}
    return GadgetBlueprint(base.graph, "large_variable", roles,
                           base.sub_gadgets, meta)


def make_variable_cluster(i: int, m: int) -> GadgetBlueprint:
    """Wire of 2m+1 suns with a large variable gadget EQUAL-joined to each of
    H_1..H_2m.  Tap j stores x_i when j is even and its complement when odd."""
    if m < 1:
        raise StructureError(f"variable cluster needs m >= 1, got {m}")
    asm = Assembly()
    sun = designate_attachments(make_sun(7))
    for j in range(2 * m + 1):
        asm.add(sun, f"H{j}")
        if j > 0:
            asm.bowtie_join(f"H{j-1}/not", f"H{j}/root", NOT)
    for j in range(1, 2 * m + 1):
        asm.add(make_large_variable_gadget(i, j), f"V{j}")
        asm.bowtie_join(f"H{j}/equal", f"V{j}/emb0/chain", EQUAL)
    polarity = {j: ("pos" if j % 2 == 0 else "neg") for j in range(1, 2 * m + 1)}
    return asm.build("cluster", meta={"variable": i, "m": m, "polarity": polarity})


def _clause_pairs(asm: Assembly, legs: list[str]) -> None:
    """Cyclic a/b triangle identification across three 12-suns."""
    for ell in range(3):
        sa = asm.sub(legs[ell])
        sb = asm.sub(legs[(ell + 1) % 3])
        for sg, path in ((sa, legs[ell]), (sb, legs[(ell + 1) % 3])):
            if "a_triangle" not in sg.roles or "b_triangle" not in sg.roles:
                raise StructureError(f"{path!r} lacks clause-attachment roles")
        a1, a2, a3 = sa.roles["a_triangle"]
        b1, b2, b3 = sb.roles["b_triangle"]
        asm.identify(a1, b1)
        asm.identify(a2, b3)
        asm.identify(a3, b2)


def join_clause(g1: GadgetBlueprint, g2: GadgetBlueprint,
                g3: GadgetBlueprint) -> GadgetBlueprint:
    """Three-way twisted identification of the clause-attachment triangles."""
    asm = Assembly()
    legs = []
    for ell, bp in enumerate((g1, g2, g3), start=1):
        prefix = f"S{ell}"
        asm.add(bp, prefix)
        legs.append(prefix)
        for role in ("a_triangle", "b_triangle"):
            if role not in bp.roles:
                raise StructureError(f"clause leg {ell} lacks {role}")
            tri = bp.roles[role]
            if bp.graph.degree(tri[2]) != 2:
                raise StructureError(
                    f"clause leg {ell}: {role} third vertex must have degree 2"
                )
    _clause_pairs(asm, legs)
    return asm.build("clause")


# ---------------------------------------------------------------------------
# Solver registry helpers
# ---------------------------------------------------------------------------


def binary_units(bp: GadgetBlueprint) -> list[tuple[str, SubGadget]]:
    """The registered 7-sun units a template solver branches over."""
    units = []
    if bp.kind == "sun7":
        units.append(("self", SubGadget("sun7", tuple(range(bp.graph.n)), dict(bp.roles))))
    for name in sorted(bp.sub_gadgets):
        sg = bp.sub_gadgets[name]
        if sg.kind == "sun7":
            units.append((name, sg))
    return units


def check_unit_coverage(bp: GadgetBlueprint) -> None:
    """Every triangle of the host must lie inside some registered 7-sun."""
    units = binary_units(bp)
    sets = [set(sg.vertices) for _, sg in units]
    for tri in enumerate_triangles(bp.graph):
        tv = set(tri)
        if not any(tv <= s for s in sets):
            raise StructureError(f"triangle {tri} not covered by any 7-sun unit")
