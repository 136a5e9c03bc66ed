"""3-SAT to graph compiler and the desk-scale decision wrapper.

Each variable becomes a cluster (a NOT-chained wire of 7-suns with an
enforced 12-sun tapped onto every interior wire sun by an EQUAL gadget);
each clause twists together the three tapped 12-suns selected by its
literals.  The compiled graph admits a preimage exactly when the template
choices propagated from a satisfying assignment can all be realized.

Note on realizability: the enforced 12-sun admits only the all-wheel
preimage (see template_solve on make_binary_enforced_sun(12)), so the
squared-cycle side of a tap cannot be materialized.  witness_from_assignment
surfaces this as a CertificateError instead of silently failing; decide()
consequently reports UNSAT whenever no pinned choice vector is realizable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    BudgetExceededError,
    CertificateError,
    ParseError,
    StructureError,
    UnsatisfyingAssignmentError,
)
from .gadgets import (
    Assembly,
    GadgetBlueprint,
    _clause_pairs,
    make_binary_enforced_sun,
    make_squared_cycle,
    make_variable_cluster,
    make_wheel,
)
from .graph import every_edge_in_unique_triangle, is_isomorphic
from .operators import PreimageWitness, restrict_preimage, verify_certificate
from .search import (
    SQUARED_CYCLE,
    WHEEL,
    SearchLimits,
    _Budget,
    template_solve,
)

Literal = tuple[int, bool]  # (0-based variable index, True = positive)


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        for j, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise ParseError(f"clause {j} has {len(clause)} literals, need 3")
            vs = [v for v, _ in clause]
            if len(set(vs)) != 3:
                raise ParseError(f"clause {j} repeats a variable")
            for v, _ in clause:
                if not 0 <= v < self.variable_count:
                    raise ParseError(f"clause {j} uses variable {v + 1}, "
                                     f"only {self.variable_count} declared")


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF: 'p cnf <vars> <clauses>' header, 0-terminated clauses."""
    n = m = None
    lits: list[int] = []
    clauses: list[tuple[Literal, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if n is not None:
                raise ParseError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"bad problem line {line!r}", lineno)
            continue
        if n is None:
            raise ParseError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno)
            if lit == 0:
                clauses.append(tuple((abs(x) - 1, x > 0) for x in lits))
                lits = []
            else:
                lits.append(lit)
    if n is None:
        raise ParseError("missing problem line")
    if lits:
        raise ParseError("last clause not 0-terminated")
    if len(clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    return CnfFormula(n, tuple(clauses))


def satisfies(formula: CnfFormula, assignment: tuple[bool, ...]) -> bool:
    return violated_clause(formula, assignment) is None


def violated_clause(formula: CnfFormula, assignment: tuple[bool, ...]) -> int | None:
    """1-based index of the first unsatisfied clause, or None."""
    if len(assignment) != formula.variable_count:
        raise StructureError("assignment length mismatch")
    for j, clause in enumerate(formula.clauses, start=1):
        if not any(assignment[v] == pos for v, pos in clause):
            return j
    return None


@dataclass(frozen=True)
class ReductionOutput:
    formula: CnfFormula
    blueprint: GadgetBlueprint
    variable_roots: dict[int, str] = field(default_factory=dict)
    clause_legs: dict[int, tuple[str, str, str]] = field(default_factory=dict)


def _tap_index(clause_index: int, positive: bool) -> int:
    """Positive literals read tap 2j, negative ones 2j - 1 (1-based j)."""
    return 2 * clause_index if positive else 2 * clause_index - 1


def compile_formula(formula: CnfFormula) -> ReductionOutput:
    """Build the reduction graph: one cluster per variable, wire length
    2m + 1, plus one three-way twist per clause."""
    m = len(formula.clauses)
    if m == 0:
        raise StructureError("formula has no clauses")
    asm = Assembly()
    roots: dict[int, str] = {}
    for i in range(formula.variable_count):
        prefix = f"x{i + 1}"
        asm.add(make_variable_cluster(i, m), prefix)
        roots[i] = f"{prefix}/H0"
    legs_by_clause: dict[int, tuple[str, str, str]] = {}
    for j, clause in enumerate(formula.clauses, start=1):
        legs = tuple(f"x{v + 1}/V{_tap_index(j, pos)}" for v, pos in clause)
        _clause_pairs(asm, list(legs))
        legs_by_clause[j] = legs
    bp = asm.build("reduction", meta={
        "variables": formula.variable_count, "clauses": m,
    })
    if not every_edge_in_unique_triangle(bp.graph):
        raise StructureError("compiled graph broke the unique-triangle invariant")
    return ReductionOutput(formula, bp, roots, legs_by_clause)


# ---------------------------------------------------------------------------
# Witness construction / extraction
# ---------------------------------------------------------------------------


def _cluster_pins(i: int, value: bool, m: int) -> dict[str, str]:
    """Template choices propagated through cluster i by the NOT / EQUAL
    joins: the root sun is a squared cycle iff the variable is true, wire
    suns alternate, and each tapped 12-sun copies its wire sun."""
    pins: dict[str, str] = {}
    prefix = f"x{i + 1}"
    for j in range(2 * m + 1):
        cyc = value == (j % 2 == 0)
        kind = SQUARED_CYCLE if cyc else WHEEL
        pins[f"{prefix}/H{j}"] = kind
        if 1 <= j:
            for t in range(12):
                pins[f"{prefix}/V{j}/emb{t}"] = kind
            pins[f"{prefix}/V{j}/sun12"] = kind
    return pins


_CYCLE_TAP_FEASIBLE: bool | None = None


def _cycle_tap_feasible() -> bool:
    """Whether the enforced 12-sun admits a squared-cycle-side preimage.
    Computed once from the solver; used to fail fast instead of exhausting
    the global search for every pinned tap."""
    global _CYCLE_TAP_FEASIBLE
    if _CYCLE_TAP_FEASIBLE is None:
        found = template_solve(make_binary_enforced_sun(12))
        _CYCLE_TAP_FEASIBLE = any(
            a.choices.get("sun12") == SQUARED_CYCLE for a in found)
    return _CYCLE_TAP_FEASIBLE


def witness_from_assignment(r: ReductionOutput, assignment: tuple[bool, ...],
                            limits: SearchLimits | None = None) -> PreimageWitness:
    """Materialize the preimage prescribed by a satisfying assignment.

    Raises UnsatisfyingAssignmentError when a clause is false, and
    CertificateError when the prescribed template choices admit no actual
    preimage (which at tap size 12 affects every squared-cycle tap)."""
    bad = violated_clause(r.formula, assignment)
    if bad is not None:
        raise UnsatisfyingAssignmentError(bad)
    m = len(r.formula.clauses)
    pins: dict[str, str] = {}
    for i, value in enumerate(assignment):
        pins.update(_cluster_pins(i, bool(value), m))
    if not _cycle_tap_feasible():
        needy = sorted(name for name, kind in pins.items()
                       if name.endswith("/sun12") and kind == SQUARED_CYCLE)
        if needy:
            raise CertificateError(
                "no preimage realizes the prescribed choices: the enforced "
                "12-sun has no squared-cycle-side preimage, required at "
                f"{needy[0]} (and {len(needy) - 1} more)")
    found = template_solve(r.blueprint, limits, pin=pins, max_results=1)
    if not found:
        raise CertificateError(
            "no preimage realizes the prescribed template choices")
    return found[0].witness


def assignment_from_witness(r: ReductionOutput,
                            w: PreimageWitness) -> tuple[bool, ...]:
    """Read the stored bits back out of a verified witness by restricting
    to each variable's root sun and testing which template it became."""
    if not verify_certificate(w):
        raise CertificateError("witness does not certify the compiled graph")
    wheel7 = make_wheel(7).graph
    cycle7 = make_squared_cycle(7).graph
    values = []
    for i in range(r.formula.variable_count):
        sub = r.blueprint.sub(r.variable_roots[i])
        restricted = restrict_preimage(w, sub.vertices)
        if is_isomorphic(restricted.candidate, cycle7):
            values.append(True)
        elif is_isomorphic(restricted.candidate, wheel7):
            values.append(False)
        else:
            raise CertificateError(
                f"restriction to {r.variable_roots[i]} matches neither template")
    out = tuple(values)
    bad = violated_clause(r.formula, out)
    if bad is not None:
        raise CertificateError(
            f"extracted assignment violates clause {bad}")
    return out


# ---------------------------------------------------------------------------
# Decision wrapper
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecisionResult:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    assignment: tuple[bool, ...] | None = None
    witness: PreimageWitness | None = None
    reason: str | None = None


def decide(formula: CnfFormula, limits: SearchLimits | None = None,
           max_vars: int = 20) -> DecisionResult:
    """Exponential desk-scale decision: enumerate assignments in
    lexicographic order, keep the first whose prescribed preimage actually
    materializes and verifies.  UNSAT only after the whole space is
    exhausted; budget exhaustion reports UNKNOWN."""
    n = formula.variable_count
    if n > max_vars:
        raise StructureError(
            f"refusing {n}-variable formula (guard {max_vars}); "
            "the decision procedure is exponential")
    r = compile_formula(formula)
    budget = _Budget(limits) if limits else None
    try:
        for bits in itertools.product((False, True), repeat=n):
            if budget is not None:
                budget.tick()
            if violated_clause(formula, bits) is not None:
                continue
            try:
                w = witness_from_assignment(r, bits, limits)
            except CertificateError:
                continue
            return DecisionResult("SAT", bits, w)
    except BudgetExceededError as exc:
        return DecisionResult("UNKNOWN", reason=str(exc))
    return DecisionResult("UNSAT")
