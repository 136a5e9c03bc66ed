"""Clause gadget reference data: loaders for the frozen data files and the
constructive builder for clause preimages.

Vertex labels use the scheme "S{leg}:{index}" with index 2p for cycle vertex
p of the 12-sun and 2p+1 for apex p; identified vertices join their labels
with "=" in sorted order.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import IntegrityError
from .gadgets import GadgetBlueprint, SubGadget, join_clause, make_sun
from .graph import Graph
from .operators import PreimageWitness

DATA_DIR = Path(__file__).parent / "data"


def _load_payload(name: str, appendix_dir: str | Path | None = None) -> dict:
    base = Path(appendix_dir) if appendix_dir else DATA_DIR
    path = base / name
    try:
        payload = path.read_bytes()
        checks = json.loads((base / "checksums.json").read_text())
    except OSError as exc:
        raise IntegrityError(f"cannot read appendix data: {exc}")
    want = checks.get(name)
    got = hashlib.sha256(payload).hexdigest()
    if want != got:
        raise IntegrityError(f"checksum mismatch for {name}: {got} != {want}")
    return json.loads(payload)


def _leg_of(label_part: str) -> tuple[int, int]:
    leg, idx = label_part[1:].split(":")
    return int(leg), int(idx)


def load_appendix_clause_gadget(appendix_dir: str | Path | None = None) -> GadgetBlueprint:
    """The 63-vertex clause gadget, with each constituent 12-sun registered."""
    obj = _load_payload("clause_gadget.json", appendix_dir)
    gobj = obj["graph"]
    g = Graph(gobj["n"], [tuple(e) for e in gobj["edges"]],
              {int(k): v for k, v in gobj["labels"].items()})
    subs = {}
    for ell in (1, 2, 3):
        slots: dict[int, int] = {}
        for v in range(g.n):
            for part in g.labels[v].split("="):
                leg, idx = _leg_of(part)
                if leg == ell:
                    slots[idx] = v
        if sorted(slots) != list(range(24)):
            raise IntegrityError(f"clause gadget leg {ell} has wrong label set")
        cycle = tuple(slots[2 * p] for p in range(12))
        apex = tuple(slots[2 * p + 1] for p in range(12))
        subs[f"S{ell}"] = SubGadget(
            "sun12", tuple(sorted(set(cycle + apex))),
            {"cycle": cycle, "apex": apex,
             "a_triangle": (cycle[0], cycle[1], apex[0]),
             "b_triangle": (cycle[6], cycle[7], apex[6])},
        )
    return GadgetBlueprint(g, "clause", {}, subs)


def load_appendix_preimage(wheels: int,
                           appendix_dir: str | Path | None = None) -> PreimageWitness:
    """Certified clause-gadget preimage with the given number of wheel legs."""
    if wheels not in (0, 1, 2):
        raise ValueError(f"wheels must be 0, 1, or 2, got {wheels}")
    target = load_appendix_clause_gadget(appendix_dir).graph
    by_label = {lab: v for v, lab in target.labels.items()}
    obj = _load_payload(f"preimage_{wheels}wheels.json", appendix_dir)
    cand = Graph(obj["candidate"]["n"],
                 [(e[0], e[1]) for e in obj["candidate"]["edges"]])
    try:
        mapping = {(u, v): by_label[lab] for u, v, lab in obj["map"]}
    except KeyError as exc:
        raise IntegrityError(f"preimage map references unknown label {exc}")
    return PreimageWitness(target, cand, mapping)


# ---------------------------------------------------------------------------
# Constructive clause preimages
# ---------------------------------------------------------------------------


def _leg_edge_labels(ell: int, wheel: bool):
    """Edges of one leg keyed by (leg-local vertex pair), valued by the sun
    vertex index (0..23) that edge turns into.

    Squared cycle on u0..u11: edge {p,p+1} -> 2p, chord {p,p+2} -> 2p+1.
    Wheel with hub h and rim x0..x11: spoke {h,xp} -> 2p, rim {xp,xp+1} -> 2p+1.
    Local vertex keys are ('u', p) or ('h',) / ('x', p).
    """
    out = {}
    if wheel:
        for p in range(12):
            out[frozenset({(ell, "h", 0), (ell, "x", p)})] = 2 * p
            out[frozenset({(ell, "x", p), (ell, "x", (p + 1) % 12)})] = 2 * p + 1
    else:
        for p in range(12):
            out[frozenset({(ell, "u", p), (ell, "u", (p + 1) % 12)})] = 2 * p
            out[frozenset({(ell, "u", p), (ell, "u", (p + 2) % 12)})] = 2 * p + 1
    return out


def _triangle_corners(edges_by_index: dict, indices: tuple[int, int, int]):
    """Corner vertices of the leg triangle formed by three edge indices,
    ordered so corner i is shared by the two edges other than indices[i]."""
    e = {i: next(k for k, idx in edges_by_index.items() if idx == i)
         for i in indices}
    i0, i1, i2 = indices
    c0 = next(iter(e[i1] & e[i2]))
    c1 = next(iter(e[i0] & e[i2]))
    c2 = next(iter(e[i0] & e[i1]))
    return c0, c1, c2


def build_clause_preimage(wheels: tuple[bool, bool, bool],
                          target: Graph | None = None) -> PreimageWitness:
    """Glue three wheel / squared-cycle legs along the clause identification.

    The a-triangle of leg l (sun indices 0, 1, 2) merges with the b-triangle
    of leg l+1 (indices 12, 13, 14); corners are matched through the edge
    correspondence 0=12, 1=14, 2=13.  The result is returned as a witness
    against the clause gadget and is *not* checked here; the all-wheels
    input yields a witness that fails verification.
    """
    if target is None:
        target = join_clause(make_sun(12), make_sun(12), make_sun(12)).graph
    legs = {ell: _leg_edge_labels(ell, wheels[ell - 1]) for ell in (1, 2, 3)}

    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for ell in (1, 2, 3):
        nxt = ell % 3 + 1
        # a-triangle (0, 1, 2) of leg ell, b-triangle (12, 14, 13) of leg nxt
        ac = _triangle_corners(legs[ell], (0, 1, 2))
        bc = _triangle_corners(legs[nxt], (12, 14, 13))
        for a, b in zip(ac, bc):
            union(a, b)

    verts = sorted({find(v) for leg in legs.values() for e in leg for v in e})
    vid = {r: i for i, r in enumerate(verts)}

    def tid(ell: int, idx: int) -> int:
        lab = f"S{ell}"
        lab += f"/c{idx // 2}" if idx % 2 == 0 else f"/a{idx // 2}"
        for v in range(target.n):
            if lab in target.labels[v].split("="):
                return v
        raise IntegrityError(f"target lacks label {lab}")

    mapping: dict[tuple[int, int], int] = {}
    edges = set()
    for ell, leg in legs.items():
        for e, idx in leg.items():
            u, v = sorted(vid[find(x)] for x in e)
            edges.add((u, v))
            mapping[(u, v)] = tid(ell, idx)
    cand = Graph(len(verts), edges)
    return PreimageWitness(target, cand, mapping)
