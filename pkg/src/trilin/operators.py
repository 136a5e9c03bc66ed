"""The triangular line graph operator and its certificate machinery.

T(G) has one vertex per edge of G; two are adjacent iff the edges share an
endpoint and lie together in a triangle of G.  L is the classic line graph,
and the Gallai graph is L(G) minus the edges of T(G).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from collections.abc import Iterable

from .errors import CertificateError, ParseError, StructureError
from .graph import (
    Edge,
    Graph,
    from_json_obj,
    induced_subgraph,
    to_json_obj,
    _norm_edge,
)


@dataclass(frozen=True)
class TlgResult:
    """A derived graph together with the bijection E(source) -> V(derived)."""

    source: Graph
    derived: Graph
    edge_to_vertex: dict[Edge, int]


def _edge_vertex_order(g: Graph) -> dict[Edge, int]:
    return {e: i for i, e in enumerate(g.sorted_edges)}


def triangular_line_graph(g: Graph) -> TlgResult:
    """T(G): edges sharing an endpoint and a common triangle become adjacent."""
    e2v = _edge_vertex_order(g)
    adj = g.adj
    derived_edges = []
    for e1, i in e2v.items():
        u, v = e1
        for x, y in ((u, v), (v, u)):
            for w in adj[x]:
                if w == y:
                    continue
                e2 = _norm_edge(x, w)
                j = e2v[e2]
                if j <= i:
                    continue
                # shared endpoint x; triangle needs the closing edge (y, w)
                if w in adj[y]:
                    derived_edges.append((i, j))
    derived = Graph(len(e2v), derived_edges)
    return TlgResult(g, derived, e2v)


def line_graph(g: Graph) -> TlgResult:
    """Classic line graph with the same bijection bookkeeping as T."""
    e2v = _edge_vertex_order(g)
    adj = g.adj
    derived_edges = []
    for e1, i in e2v.items():
        u, v = e1
        for x, y in ((u, v), (v, u)):
            for w in adj[x]:
                if w == y:
                    continue
                j = e2v[_norm_edge(x, w)]
                if j > i:
                    derived_edges.append((i, j))
    derived = Graph(len(e2v), derived_edges)
    return TlgResult(g, derived, e2v)


def gallai_graph(g: Graph) -> Graph:
    """Line graph edges that do not come from a triangle of g."""
    lg = line_graph(g).derived
    tg = triangular_line_graph(g).derived
    return Graph(lg.n, lg.edges - tg.edges)


# ---------------------------------------------------------------------------
# Preimage witnesses (the NP certificate) and verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreimageWitness:
    """Candidate graph plus edge->vertex bijection onto the target graph."""

    target: Graph
    candidate: Graph
    edge_to_vertex: dict[Edge, int]

    def to_json_obj(self) -> dict:
        return {
            "target": to_json_obj(self.target),
            "candidate": to_json_obj(self.candidate),
            "map": [
                [u, v, t] for (u, v), t in sorted(self.edge_to_vertex.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @staticmethod
    def from_json_obj(obj: dict) -> "PreimageWitness":
        try:
            target = from_json_obj(obj["target"])
            candidate = from_json_obj(obj["candidate"])
            mapping = {
                _norm_edge(int(u), int(v)): int(t) for u, v, t in obj["map"]
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad witness JSON: {exc}")
        return PreimageWitness(target, candidate, mapping)

    @staticmethod
    def from_json(text: str) -> "PreimageWitness":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), exc.lineno)
        return PreimageWitness.from_json_obj(obj)


def _check_bijection(w: PreimageWitness) -> None:
    dom = set(w.edge_to_vertex)
    if dom != w.candidate.edges:
        raise CertificateError(
            "mapping domain is not exactly the candidate edge set"
        )
    values = list(w.edge_to_vertex.values())
    if len(set(values)) != len(values):
        raise CertificateError("mapping is not injective")
    if set(values) != set(range(w.target.n)):
        raise CertificateError("mapping does not cover the target vertex set")


def verify_certificate(w: PreimageWitness) -> bool:
    """True iff T(candidate) equals the target under the recorded bijection.

    Polynomial time.  Raises CertificateError when the map is not a bijection
    E(candidate) -> V(target).
    """
    _check_bijection(w)
    t = triangular_line_graph(w.candidate)
    mapped = frozenset(
        _norm_edge(
            w.edge_to_vertex[w.candidate.sorted_edges[i]],
            w.edge_to_vertex[w.candidate.sorted_edges[j]],
        )
        for i, j in t.derived.edges
    )
    return mapped == w.target.edges


def witness_of_operator(res: TlgResult) -> PreimageWitness:
    """The operator's own output packaged as a (always valid) witness."""
    return PreimageWitness(res.derived, res.source, dict(res.edge_to_vertex))


# ---------------------------------------------------------------------------
# Triangle-induced subgraphs and the closure lemma
# ---------------------------------------------------------------------------


def is_triangle_induced(h: Graph, subset: Iterable[int]) -> bool:
    """True iff `subset` is closed under triangle completion in h."""
    s = set(subset)
    for v in s:
        if not (0 <= v < h.n):
            raise StructureError(f"vertex {v} not in graph")
    adj = h.adj
    for u in s:
        for v in adj[u]:
            if v <= u or v not in s:
                continue
            for w in adj[u] & adj[v]:
                if w not in s:
                    return False
    return True


def restrict_preimage(w: PreimageWitness, subset: Iterable[int]) -> PreimageWitness:
    """Restrict a witness for H2 to a triangle-induced H1, per the closure
    lemma: the candidate becomes the subgraph induced by the edges mapping
    into the subset, and the restricted witness verifies against H1."""
    s = sorted(set(subset))
    if not is_triangle_induced(w.target, s):
        raise StructureError("subset is not triangle-induced in the target")
    if not verify_certificate(w):
        raise CertificateError("input witness does not verify")
    target_sub, _ = induced_subgraph(w.target, s)
    t_index = {old: new for new, old in enumerate(s)}
    keep = set(s)
    kept_edges = [e for e, t in w.edge_to_vertex.items() if t in keep]
    cand_vertices = sorted({v for e in kept_edges for v in e})
    c_index = {old: new for new, old in enumerate(cand_vertices)}
    cand_labels = None
    if w.candidate.labels:
        cand_labels = {
            c_index[v]: w.candidate.labels[v]
            for v in cand_vertices
            if v in w.candidate.labels
        }
    candidate = Graph(
        len(cand_vertices),
        [(c_index[u], c_index[v]) for u, v in kept_edges],
        cand_labels,
    )
    mapping = {
        _norm_edge(c_index[u], c_index[v]): t_index[w.edge_to_vertex[(u, v)]]
        for u, v in kept_edges
    }
    return PreimageWitness(target_sub, candidate, mapping)


# ---------------------------------------------------------------------------
# Le's characterization
# ---------------------------------------------------------------------------

LeFamily = list[frozenset[int]]


def le_family_from_preimage(w: PreimageWitness) -> LeFamily:
    """One member per candidate vertex of degree >= 1: the target vertices
    that are images of its incident edges."""
    if not verify_certificate(w):
        raise CertificateError("witness does not verify")
    members = []
    for v in range(w.candidate.n):
        incident = [e for e in w.candidate.sorted_edges if v in e]
        if incident:
            members.append(frozenset(w.edge_to_vertex[e] for e in incident))
    return members


def check_le_family(h: Graph, family: LeFamily) -> bool:
    """Literal check of the four characterization conditions."""
    for member in family:
        for v in member:
            if not (0 <= v < h.n):
                raise StructureError(f"family member vertex {v} not in graph")
    # (1) every vertex appears in exactly two members
    cover = [0] * h.n
    for member in family:
        for v in member:
            cover[v] += 1
    if any(c != 2 for c in cover):
        return False
    # (2) every edge appears (both endpoints) in exactly one member
    for u, v in h.edges:
        hits = sum(1 for member in family if u in member and v in member)
        if hits != 1:
            return False
    # (3) pairwise intersections have at most one vertex
    k = len(family)
    inter = [[family[i] & family[j] for j in range(k)] for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if len(inter[i][j]) > 1:
                return False
    # (4) literal reading over distinct ordered triples (i, j, k)
    for i in range(k):
        for j in range(k):
            if j == i:
                continue
            for kk in range(k):
                if kk == i or kk == j:
                    continue
                ik = inter[i][kk] if i < kk else inter[kk][i]
                jk = inter[j][kk] if j < kk else inter[kk][j]
                if len(ik) != 1 or len(jk) != 1:
                    continue
                (vi,) = ik
                (vj,) = jk
                if vi == vj:
                    continue
                have_edge = h.has_edge(vi, vj)
                overlap = bool(inter[i][j] if i < j else inter[j][i])
                if have_edge != overlap:
                    return False
    return True
