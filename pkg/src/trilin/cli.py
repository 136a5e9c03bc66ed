"""Command-line front end.

Exit codes: 0 success, 1 negative result (not a preimage / UNSAT / failed
checks), 2 usage error, 3 budget exhausted before a conclusion, 4 internal
or data-integrity error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import appendix as appendix_mod
from .errors import (
    BudgetExceededError,
    CapacityError,
    CertificateError,
    IntegrityError,
    ParseError,
    StructureError,
    TrilinError,
    UnsatisfyingAssignmentError,
)
from .gadgets import (
    GadgetBlueprint,
    join_clause,
    make_binary_enforced_sun,
    make_bowtie,
    make_fan,
    make_squared_cycle,
    make_sun,
    make_triangle_strip,
    make_variable_cluster,
    make_wheel,
    make_wire,
)
from .graph import (
    Graph,
    every_edge_in_unique_triangle,
    is_isomorphic,
    load_graph_file,
    to_dot,
    to_edgelist,
    to_json_obj,
)
from .operators import (
    PreimageWitness,
    restrict_preimage,
    triangular_line_graph,
    verify_certificate,
)
from .reduction import (
    compile_formula,
    decide as decide_formula,
    parse_dimacs,
    witness_from_assignment,
)
from .search import (
    SQUARED_CYCLE,
    WHEEL,
    SearchLimits,
    brute_force_preimages,
    template_solve,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _load_config() -> dict:
    path = os.environ.get("TRILIN_CONFIG")
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"bad config file {path}: {exc}")
    if not isinstance(cfg, dict):
        raise click.ClickException(f"config file {path} must hold an object")
    return cfg


def _limits(ctx_cfg: dict, time_budget, node_budget, max_target) -> SearchLimits:
    lim = SearchLimits()
    if (v := ctx_cfg.get("max_target_vertices")) is not None:
        lim.max_target_vertices = int(v)
    if (v := ctx_cfg.get("time_budget")) is not None:
        lim.time_budget = float(v)
    if (v := ctx_cfg.get("node_budget")) is not None:
        lim.node_budget = int(v)
    if max_target is not None:
        lim.max_target_vertices = max_target
    if time_budget is not None:
        lim.time_budget = time_budget
    if node_budget is not None:
        lim.node_budget = node_budget
    return lim


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _render_graph(g: Graph, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(to_json_obj(g), separators=(",", ":"))
    if fmt == "edgelist":
        return to_edgelist(g)
    if fmt == "dot":
        return to_dot(g)
    raise click.ClickException(f"unknown format {fmt!r}")


format_option = click.option(
    "--format", "fmt", default=None,
    type=click.Choice(["json", "edgelist", "dot"]), help="Output format.")
out_option = click.option("--out", default=None, help="Write output to a file.")
budget_options = (
    click.option("--time-budget", type=float, default=None),
    click.option("--node-budget", type=int, default=None),
    click.option("--max-target-vertices", type=int, default=None),
    click.option("--workers", type=int, default=1,
                 help="Worker count (results are worker-count independent)."),
)


def _with_budget_options(f):
    for opt in reversed(budget_options):
        f = opt(f)
    return f


@click.group()
@click.pass_context
def main(ctx):
    """Triangular line graph toolkit."""
    ctx.obj = _load_config()


def _fmt_from(ctx, fmt) -> str:
    return fmt or ctx.obj.get("format") or "json"


# ---------------------------------------------------------------------------
# tlg
# ---------------------------------------------------------------------------


@main.group()
def tlg():
    """The operator itself."""


@tlg.command("compute")
@click.argument("graph_file")
@format_option
@out_option
@click.pass_context
def tlg_compute(ctx, graph_file, fmt, out):
    """Emit T(G) and the edge->vertex bijection."""
    g = load_graph_file(graph_file)
    res = triangular_line_graph(g)
    fmt = _fmt_from(ctx, fmt)
    if fmt == "json":
        payload = {
            "graph": to_json_obj(res.derived),
            "map": [[u, v, t] for (u, v), t in sorted(res.edge_to_vertex.items())],
        }
        _emit(json.dumps(payload, separators=(",", ":")), out)
    else:
        _emit(_render_graph(res.derived, fmt), out)


# ---------------------------------------------------------------------------
# gadget
# ---------------------------------------------------------------------------


_BUILDERS = {
    "bowtie": (0, lambda: make_bowtie()),
    "fan": (1, make_fan),
    "strip": (1, make_triangle_strip),
    "wheel": (1, make_wheel),
    "squared-cycle": (1, make_squared_cycle),
    "sun": (1, make_sun),
    "binary-enforced-sun": (1, make_binary_enforced_sun),
    "wire": (1, make_wire),
    "cluster": (2, lambda i, m: make_variable_cluster(i, m)),
    "clause": (0, lambda: join_clause(make_sun(12), make_sun(12), make_sun(12))),
}


@main.group()
def gadget():
    """Blueprint constructors."""


@gadget.command("build")
@click.argument("kind")
@click.argument("params", nargs=-1, type=int)
@click.option("--appendix-dir", default=None)
@format_option
@out_option
@click.pass_context
def gadget_build(ctx, kind, params, appendix_dir, fmt, out):
    """Emit a named gadget blueprint (see docs for kinds and parameters)."""
    fmt = _fmt_from(ctx, fmt)
    if kind == "appendix-clause":
        bp = appendix_mod.load_appendix_clause_gadget(
            appendix_dir or ctx.obj.get("appendix_dir"))
    else:
        try:
            arity, builder = _BUILDERS[kind]
        except KeyError:
            raise click.ClickException(
                f"unknown gadget kind {kind!r}; choose from "
                f"{sorted(_BUILDERS) + ['appendix-clause']}")
        if len(params) != arity:
            raise click.ClickException(
                f"gadget {kind!r} takes {arity} integer parameter(s)")
        try:
            bp = builder(*params)
        except StructureError as exc:
            raise click.ClickException(str(exc))
    if fmt == "json":
        _emit(bp.to_json(), out)
    else:
        _emit(_render_graph(bp.graph, fmt), out)


# ---------------------------------------------------------------------------
# preimage
# ---------------------------------------------------------------------------


@main.group()
def preimage():
    """Search and certificate verification."""


@preimage.command("solve")
@click.argument("graph_file")
@_with_budget_options
@format_option
@out_option
@click.pass_context
def preimage_solve(ctx, graph_file, time_budget, node_budget,
                   max_target_vertices, workers, fmt, out):
    """Brute-force preimage classes of a small target graph."""
    del workers  # results are worker-count independent; executed serially
    g = load_graph_file(graph_file)
    lim = _limits(ctx.obj, time_budget, node_budget, max_target_vertices)
    try:
        found = brute_force_preimages(g, lim)
    except BudgetExceededError as exc:
        click.echo(json.dumps({"status": "UNKNOWN", "reason": str(exc)}))
        sys.exit(EXIT_BUDGET)
    payload = {
        "status": "YES" if found else "NO",
        "classes": [w.to_json_obj() for w in found],
    }
    _emit(json.dumps(payload, separators=(",", ":")), out)
    if not found:
        sys.exit(EXIT_NEGATIVE)


@preimage.command("verify")
@click.argument("witness_file")
def preimage_verify(witness_file):
    """Check a stored witness; prints VALID or INVALID."""
    with open(witness_file) as fh:
        w = PreimageWitness.from_json(fh.read())
    try:
        ok = verify_certificate(w)
    except CertificateError as exc:
        click.echo(f"INVALID: {exc}")
        sys.exit(EXIT_NEGATIVE)
    click.echo("VALID" if ok else "INVALID")
    if not ok:
        sys.exit(EXIT_NEGATIVE)


# ---------------------------------------------------------------------------
# reduction commands
# ---------------------------------------------------------------------------


def _read_formula(cnf_file):
    with open(cnf_file) as fh:
        return parse_dimacs(fh.read())


@main.command("reduce")
@click.argument("cnf_file")
@format_option
@out_option
@click.pass_context
def reduce_cmd(ctx, cnf_file, fmt, out):
    """Compile a 3-CNF formula into its reduction graph."""
    try:
        r = compile_formula(_read_formula(cnf_file))
    except StructureError as exc:
        raise click.ClickException(str(exc))
    fmt = _fmt_from(ctx, fmt)
    if fmt == "json":
        _emit(r.blueprint.to_json(), out)
    else:
        _emit(_render_graph(r.blueprint.graph, fmt), out)


@main.command("decide")
@click.argument("cnf_file")
@click.option("--max-vars", type=int, default=20)
@_with_budget_options
@out_option
@click.pass_context
def decide_cmd(ctx, cnf_file, max_vars, time_budget, node_budget,
               max_target_vertices, workers, out):
    """Decide satisfiability through the compiled graph's preimages."""
    del workers
    formula = _read_formula(cnf_file)
    lim = None
    if time_budget is not None or node_budget is not None:
        lim = _limits(ctx.obj, time_budget, node_budget, max_target_vertices)
    try:
        res = decide_formula(formula, lim, max_vars=max_vars)
    except StructureError as exc:
        raise click.ClickException(str(exc))
    payload = {"status": res.status}
    if res.assignment is not None:
        payload["assignment"] = [int(b) for b in res.assignment]
    if res.reason:
        payload["reason"] = res.reason
    _emit(json.dumps(payload, separators=(",", ":")), out)
    if res.status == "UNSAT":
        sys.exit(EXIT_NEGATIVE)
    if res.status == "UNKNOWN":
        sys.exit(EXIT_BUDGET)


@main.command("witness")
@click.argument("cnf_file")
@click.argument("assignment")
@out_option
def witness_cmd(cnf_file, assignment, out):
    """Materialize the preimage for a satisfying ASSIGNMENT (e.g. '101')."""
    formula = _read_formula(cnf_file)
    bits = tuple(c == "1" for c in assignment.replace(",", ""))
    if len(bits) != formula.variable_count:
        raise click.ClickException(
            f"assignment length {len(bits)} != {formula.variable_count} variables")
    try:
        r = compile_formula(formula)
    except StructureError as exc:
        raise click.ClickException(str(exc))
    try:
        w = witness_from_assignment(r, bits)
    except UnsatisfyingAssignmentError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_NEGATIVE)
    except CertificateError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_NEGATIVE)
    _emit(w.to_json(), out)


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


@main.group()
def check():
    """Verification batteries."""


def _check_lemma_battery(appendix_dir, lim) -> list[tuple[str, str, str]]:
    """Returns (name, status, detail) rows; status PASS / FAIL / UNKNOWN."""
    rows = []

    def run(name, fn):
        try:
            ok, detail = fn()
            rows.append((name, "PASS" if ok else "FAIL", detail))
        except BudgetExceededError as exc:
            rows.append((name, "UNKNOWN", str(exc)))
        except IntegrityError:
            raise
        except TrilinError as exc:
            rows.append((name, "FAIL", str(exc)))

    def two_preimages_of_7sun():
        found = brute_force_preimages(make_sun(7).graph, lim)
        kinds = {
            "wheel" if is_isomorphic(w.candidate, make_wheel(7).graph)
            else "cycle" if is_isomorphic(w.candidate, make_squared_cycle(7).graph)
            else "other"
            for w in found
        }
        return kinds == {"wheel", "cycle"} and len(found) == 2, \
            f"{len(found)} classes: {sorted(kinds)}"

    def binary_sun_two():
        found = template_solve(make_binary_enforced_sun(12), lim)
        return len(found) == 2, f"{len(found)} assignments"

    def equal_and_not():
        from .gadgets import attach_equal, attach_not, designate_attachments
        sun = designate_attachments(make_sun(7))
        eq = template_solve(attach_equal(sun, "equal", sun, "root"), lim)
        nt = template_solve(attach_not(sun, "not", sun, "root"), lim)
        ok = (len(eq) == 2 and all(len(set(a.choices.values())) == 1 for a in eq)
              and len(nt) == 2 and all(len(set(a.choices.values())) == 2 for a in nt))
        return ok, f"equal: {len(eq)}, not: {len(nt)}"

    def cluster_two():
        found = template_solve(make_variable_cluster(0, 1), lim)
        return len(found) == 2, f"{len(found)} assignments"

    def clause_seven():
        found = template_solve(
            join_clause(make_sun(12), make_sun(12), make_sun(12)), lim)
        patterns = {tuple(a.choices[f"S{i}"] for i in (1, 2, 3)) for a in found}
        all_wheel = (WHEEL,) * 3
        return len(patterns) == 7 and all_wheel not in patterns, \
            f"{len(patterns)} patterns"

    def unique_triangles():
        r = compile_formula(parse_dimacs("p cnf 3 1\n1 2 3 0\n"))
        return every_edge_in_unique_triangle(r.blueprint.graph), \
            f"{r.blueprint.graph.n} vertices"

    def appendix_round_trip():
        bp = appendix_mod.load_appendix_clause_gadget(appendix_dir)
        built = join_clause(make_sun(12), make_sun(12), make_sun(12))
        if not is_isomorphic(bp.graph, built.graph):
            return False, "table 1 mismatch"
        for wheels in (0, 1, 2):
            w = appendix_mod.load_appendix_preimage(wheels, appendix_dir)
            if not verify_certificate(w):
                return False, f"table {wheels + 2} witness invalid"
        return True, "table 1 + 3 witnesses"

    run("7-sun has exactly two preimages", two_preimages_of_7sun)
    run("enforced 12-sun has exactly two preimages", binary_sun_two)
    run("EQUAL/NOT joins force agree/differ", equal_and_not)
    run("variable cluster has exactly two preimages", cluster_two)
    run("clause gadget: 7 of 8 patterns", clause_seven)
    run("compiled graph: every edge in a unique triangle", unique_triangles)
    run("appendix data round-trips", appendix_round_trip)
    return rows


@check.command("lemmas")
@click.option("--appendix-dir", default=None)
@_with_budget_options
@click.pass_context
def check_lemmas(ctx, appendix_dir, time_budget, node_budget,
                 max_target_vertices, workers):
    """Run the lemma battery and print a PASS/FAIL report."""
    del workers
    lim = _limits(ctx.obj, time_budget, node_budget, max_target_vertices)
    if lim.time_budget is None:
        # each row is individually bounded so the battery always terminates
        lim.time_budget = 300.0
    try:
        rows = _check_lemma_battery(
            appendix_dir or ctx.obj.get("appendix_dir"), lim)
    except IntegrityError as exc:
        click.echo(f"INTEGRITY ERROR: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    width = max(len(name) for name, _, _ in rows)
    for name, status, detail in rows:
        click.echo(f"{status:7s} {name:<{width}s}  ({detail})")
    statuses = {status for _, status, _ in rows}
    if "FAIL" in statuses:
        sys.exit(EXIT_NEGATIVE)
    if "UNKNOWN" in statuses:
        sys.exit(EXIT_BUDGET)


def entry() -> None:  # pragma: no cover - thin wrapper
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except (OSError,) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except (BudgetExceededError, CapacityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    except IntegrityError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    except (StructureError, TrilinError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":  # pragma: no cover
    entry()
