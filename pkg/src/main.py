"""Main entry point: CLI for Alon-Tarsi certificates on plane graphs without 4- and l-cycles."""

from __future__ import annotations

import asyncio
import hashlib
import json
import logging
import time
from enum import Enum
from pathlib import Path
from typing import Any

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .errors import EmbeddingError, NotInClass, TheoremViolation, TooLarge, UnknownVertex

app = typer.Typer(
    name="atmatch",
    help="Matchings whose removal leaves Alon-Tarsi number at most 3, for planar graphs without 4- and l-cycles",
)
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2


class OutputFormat(str, Enum):
    JSON = "json"
    TABLE = "table"


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ── Shared plumbing ──────────────────────────────────────────────


def _cap_option():
    return typer.Option(None, "--cap-edges", envvar="ATMATCH_CAP_EDGES", help="diff enumeration cap")


def _at_cap_option():
    return typer.Option(
        None, "--at-cap-edges", envvar="ATMATCH_AT_CAP_EDGES", help="AT-number / orientation search cap"
    )


def _l_option():
    return typer.Option(None, "--l", help="Forbidden cycle length 5, 6 or 7 (default: from the file)")


def _format_option():
    return typer.Option(OutputFormat.JSON, "--format", help="json or table")


def _apply_limits(cap_edges: int | None, at_cap_edges: int | None) -> None:
    from .alon_tarsi import configure_limits

    configure_limits(cap_edges=cap_edges, at_cap_edges=at_cap_edges)


def _usage_error(message: str) -> typer.Exit:
    err_console.print(f"[red]error:[/red] {message}")
    return typer.Exit(code=EXIT_USAGE)


def _digest(path: str) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load(path: str, l: int | None):
    """Parse a rotsys file; returns (graph, l). Input problems exit with status 2."""
    from .rotsys import VALID_L, load_rotsys

    if l is not None and l not in VALID_L:
        raise _usage_error(f"--l must be one of {VALID_L}, got {l}")
    try:
        doc = load_rotsys(path)
    except FileNotFoundError as e:
        raise _usage_error(str(e)) from None
    except (EmbeddingError, UnknownVertex) as e:
        raise _usage_error(f"{path}: {e}") from None
    return doc.graph, l if l is not None else doc.l


def _report(command: str, inputs: list[str], t0: float, **body: Any) -> dict[str, Any]:
    report: dict[str, Any] = {
        "command": command,
        "inputs": {p: _digest(p) for p in inputs},
    }
    report.update(body)
    report["elapsed_seconds"] = round(time.time() - t0, 3)
    return report


def _emit(report: dict[str, Any], passed: bool) -> None:
    typer.echo(json.dumps(report, indent=2, default=str))
    if not passed:
        raise typer.Exit(code=EXIT_FAILED)


def _check(name: str, passed: bool, **witness: Any) -> dict[str, Any]:
    return {"name": name, "passed": passed, "witness": witness}


# ── Commands ─────────────────────────────────────────────────────


@app.command()
def analyze(
    path: str = typer.Argument(..., help="rotsys file"),
    l: int = _l_option(),
    cap_edges: int = _cap_option(),
    at_cap_edges: int = _at_cap_option(),
):
    """Summarize a plane graph: faces, class membership, AT number, first configuration."""
    from .alon_tarsi import at_number
    from .configurations import detect
    from .plane_graph import blocks, in_class

    t0 = time.time()
    _apply_limits(cap_edges, at_cap_edges)
    G, l = _load(path, l)
    member = in_class(G, l)
    try:
        at: int | str = at_number(G)
    except TooLarge as e:
        at = f"too_large: {e}"
    cfg = detect(G, l, check_class=False) if member else None
    decomposition = blocks(G)
    report = _report(
        "analyze",
        [path],
        t0,
        l=l,
        num_vertices=len(G),
        num_edges=len(G.edges),
        root=G.root,
        outer_face=list(G.outer_face.vertices),
        face_degrees=[f.degree for f in G.faces],
        blocks=len(decomposition.blocks),
        cut_vertices=sorted(decomposition.cut_vertices),
        at_number=at,
        configuration=cfg.to_dict() if cfg else None,
        checks=[_check("in_class", member)],
    )
    _emit(report, member)


@app.command()
def extract(
    path: str = typer.Argument(..., help="rotsys file"),
    l: int = _l_option(),
    cap_edges: int = _cap_option(),
    at_cap_edges: int = _at_cap_option(),
    base_threshold: int = typer.Option(
        None, "--base-threshold", envvar="ATMATCH_BASE_THRESHOLD", help="Brute force at or below this size"
    ),
    output: str = typer.Option(None, "--output", "-o", help="Also write the certificate JSON here"),
):
    """Extract a valid matching and a good orientation of G - M, then verify them independently."""
    from .reducer import extract as extract_certificate
    from .reducer import verify_certificate

    t0 = time.time()
    _apply_limits(cap_edges, at_cap_edges)
    G, l = _load(path, l)
    try:
        cert = extract_certificate(G, l, base_threshold=base_threshold)
    except (NotInClass, TooLarge) as e:
        raise _usage_error(f"{path}: {e}") from None
    except TheoremViolation as e:
        report = _report("extract", [path], t0, l=l, theorem_violation=str(e), rotsys=e.rotsys)
        _emit(report, False)
        return
    verification = verify_certificate(G, cert)
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(json.dumps(cert.to_dict(), indent=2))
    report = _report(
        "extract",
        [path],
        t0,
        l=l,
        certificate=cert.to_dict(),
        checks=[c.to_dict() for c in verification.checks],
        passed=verification.passed,
    )
    _emit(report, verification.passed)


@app.command("verify-orientation")
def verify_orientation(
    path: str = typer.Argument(..., help="rotsys file"),
    orientation_path: str = typer.Argument(..., help="u>v arc list"),
    cap_edges: int = _cap_option(),
):
    """diff, maximum out-degree and root out-degree of an orientation, with the good verdict."""
    from .alon_tarsi import Orientation, diff
    from .rotsys import load_orientation

    t0 = time.time()
    _apply_limits(cap_edges, None)
    G, l = _load(path, None)
    try:
        D = Orientation.from_arcs(load_orientation(orientation_path), G.vertices)
    except FileNotFoundError as e:
        raise _usage_error(str(e)) from None
    except (ValueError, KeyError) as e:
        raise _usage_error(f"{orientation_path}: {e}") from None

    foreign = sorted(e for e in D.edges if not G.has_edge(*e))
    # edges left unoriented must be a matching avoiding the root (the removed M)
    missing = sorted(set(G.edges) - set(D.edges))
    ends = [x for e in missing for x in e]
    matching_ok = len(ends) == len(set(ends)) and G.root not in ends
    try:
        value: int | None = diff(D)
    except TooLarge as e:
        raise _usage_error(str(e)) from None
    root_out = D.out_degree(G.root)
    checks = [
        _check("arcs_are_edges", not foreign, foreign=[list(e) for e in foreign]),
        _check("missing_edges_form_matching", matching_ok, missing=[list(e) for e in missing]),
        _check("diff_nonzero", value != 0, diff=value),
        _check("max_out_degree", D.max_out_degree <= 2, max_out_degree=D.max_out_degree),
        _check("root_is_sink", root_out == 0, root=G.root, root_out_degree=root_out),
    ]
    good = all(c["passed"] for c in checks)
    report = _report(
        "verify-orientation",
        [path, orientation_path],
        t0,
        diff=value,
        max_out_degree=D.max_out_degree,
        root_out_degree=root_out,
        good=good,
        checks=checks,
    )
    _emit(report, good)


@app.command()
def detect(
    path: str = typer.Argument(..., help="rotsys file"),
    l: int = _l_option(),
    all_instances: bool = typer.Option(False, "--all", help="List every instance in priority order"),
):
    """The first reducible configuration (kind and role-labelled vertices)."""
    from .configurations import detect as detect_configuration
    from .configurations import iter_configurations

    t0 = time.time()
    G, l = _load(path, l)
    try:
        cfg = detect_configuration(G, l)
    except NotInClass as e:
        raise _usage_error(f"{path}: {e}") from None
    found = cfg is not None or len(G) < 2
    body: dict[str, Any] = {"l": l, "configuration": cfg.to_dict() if cfg else None}
    if all_instances:
        body["instances"] = [c.to_dict() for c in iter_configurations(G, l)]
    if cfg is None and len(G) >= 2:
        logger.error("no configuration on a class member with %d vertices", len(G))
        body["rotsys"] = G.to_rotsys(l)
    body["checks"] = [_check("configuration_found", found)]
    _emit(_report("detect", [path], t0, **body), found)


def _print_ledger(ledger, audit_report) -> None:
    table = Table(title=f"Charges (l={ledger.l})")
    table.add_column("Element", style="cyan")
    table.add_column("Initial", justify="right")
    table.add_column("Final", justify="right", style="green")
    final = ledger.charge
    for e in sorted(ledger.initial):
        table.add_row(f"{e[0]}{e[1]}", str(ledger.initial[e]), str(final[e]))
    console.print(table)

    transfers = Table(title="Transfers")
    for col in ("Rule", "From", "To", "Amount"):
        transfers.add_column(col)
    for t in ledger.transfers:
        d = t.to_dict()
        transfers.add_row(d["rule"], d["from"], d["to"], d["amount"])
    console.print(transfers)

    checks = Table(title="Audit")
    checks.add_column("Check", style="cyan")
    checks.add_column("Status")
    for c in audit_report.checks:
        colour = {"pass": "green", "fail": "red"}.get(c.status, "yellow")
        checks.add_row(c.name, f"[{colour}]{c.status}[/{colour}]")
    console.print(checks)


@app.command()
def discharge(
    path: str = typer.Argument(..., help="rotsys file"),
    l: int = _l_option(),
    fmt: OutputFormat = _format_option(),
):
    """Apply the discharging rules for l with exact arithmetic and audit the result."""
    from .discharging import apply_rules, audit

    t0 = time.time()
    G, l = _load(path, l)
    try:
        ledger = apply_rules(G, l)
    except NotInClass as e:
        raise _usage_error(f"{path}: {e}") from None
    audit_report = audit(ledger, G, l)
    if fmt is OutputFormat.TABLE:
        _print_ledger(ledger, audit_report)
        if not audit_report.passed:
            raise typer.Exit(code=EXIT_FAILED)
        return
    report = _report(
        "discharge", [path], t0, ledger=ledger.to_dict(), audit=audit_report.to_dict()
    )
    _emit(report, audit_report.passed)


@app.command("enumerate")
def enumerate_corpus(
    l: int = typer.Option(..., "--l", help="Forbidden cycle length 5, 6 or 7"),
    max_n: int = typer.Option(..., "--max-n", help="Largest vertex count"),
    out: str = typer.Option("data/corpus", "--out", "-o", help="Directory for rotsys files"),
    seed: int = typer.Option(0, "--seed"),
    mode: str = typer.Option("exhaustive", "--mode", help="exhaustive or random"),
    samples: int = typer.Option(100, "--samples", help="Graphs drawn in random mode"),
    connectivity: int = typer.Option(1, "--connectivity", help="1 (connected) or 2"),
    max_vertices: int = typer.Option(
        None, "--max-vertices-cap", envvar="ATMATCH_MAX_VERTICES", help="Enumeration cap"
    ),
):
    """Write every rooted class member up to --max-n vertices as rotsys files plus a manifest."""
    from .genlab import GeneratorSpec, configure_generator, enumerate_class

    t0 = time.time()
    configure_generator(max_vertices)
    try:
        spec = GeneratorSpec(
            max_vertices=max_n, l=l, connectivity=connectivity, seed=seed, mode=mode, samples=samples
        )
    except ValidationError as e:
        raise _usage_error(str(e)) from None

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, G in enumerate(enumerate_class(spec)):
        name = f"g{i:05d}.rotsys"
        (out_dir / name).write_text(G.to_rotsys(l))
        files.append(name)
    manifest = {"count": len(files), "spec": spec.model_dump(), "seed": seed, "files": files}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    report = _report(
        "enumerate", [], t0, count=len(files), spec=spec.model_dump(), directory=str(out_dir)
    )
    _emit(report, True)


@app.command("certify-batch")
def certify_batch(
    l: int = typer.Option(..., "--l", help="Forbidden cycle length 5, 6 or 7"),
    max_n: int = typer.Option(..., "--max-n", help="Largest vertex count"),
    jobs: int = typer.Option(4, "--jobs", "-j", help="Worker threads"),
    seed: int = typer.Option(0, "--seed"),
    mode: str = typer.Option("exhaustive", "--mode", help="exhaustive or random"),
    samples: int = typer.Option(100, "--samples", help="Graphs drawn in random mode"),
    cap_edges: int = _cap_option(),
    at_cap_edges: int = _at_cap_option(),
    base_threshold: int = typer.Option(None, "--base-threshold", envvar="ATMATCH_BASE_THRESHOLD"),
    oracle_max_n: int = typer.Option(
        0, "--oracles-max-n", help="Also check AT(G-M) <= 3 and 3-choosability up to this size"
    ),
    plots: str = typer.Option(None, "--plots", help="Directory for aggregate plots"),
    weave_project: str = typer.Option(None, "--weave-project", help="Enable Weave tracing"),
    fmt: OutputFormat = _format_option(),
):
    """enumerate -> extract -> verify -> detect -> discharge over a whole corpus, aggregated."""
    from .orchestrator import BatchConfig, print_batch_stats, run_batch
    from .weave_integration import init_weave

    _apply_limits(cap_edges, at_cap_edges)
    try:
        config = BatchConfig(
            l=l,
            max_n=max_n,
            jobs=jobs,
            seed=seed,
            mode=mode,
            samples=samples,
            base_threshold=base_threshold,
            oracle_max_n=oracle_max_n,
        )
        config.generator_spec()
    except ValidationError as e:
        raise _usage_error(str(e)) from None

    weave_enabled = False
    if weave_project:
        weave_enabled = init_weave(weave_project)
        if not weave_enabled:
            err_console.print("[yellow]Weave not available, running without tracing[/yellow]")

    t0 = time.time()
    run = asyncio.run(run_batch(config, weave_enabled=weave_enabled))
    if plots:
        from .visualization import generate_batch_plots

        for p in generate_batch_plots(run, plots):
            err_console.print(f"[green]wrote[/green] {p}")
    passed = run.stats.failed == 0
    if fmt is OutputFormat.TABLE:
        print_batch_stats(run.stats)
        if not passed:
            raise typer.Exit(code=EXIT_FAILED)
        return
    _emit(_report("certify-batch", [], t0, **run.to_dict(), passed=passed), passed)


@app.command()
def validate(
    graphs: int = typer.Option(500, "--graphs", help="Graphs in the AT-identity sweep"),
    trials: int = typer.Option(200, "--trials", help="Digraph pairs in the one-way-cut sweep"),
    seed: int = typer.Option(0, "--seed"),
    cap_edges: int = _cap_option(),
):
    """Cross-check diff against the graph polynomial, the one-way-cut product and known AT values."""
    from .validation import run_all

    t0 = time.time()
    _apply_limits(cap_edges, None)
    result = run_all(num_graphs=graphs, num_trials=trials, seed=seed)
    _emit(_report("validate", [], t0, **result), result["passed"])


@app.command()
def visualize(
    path: str = typer.Argument(..., help="rotsys file"),
    certificate_path: str = typer.Argument(..., help="Certificate JSON (extract --output)"),
    output: str = typer.Option("data/certificate.png", "--output", "-o"),
):
    """Render a certificate: matching edges thick, arcs as arrows, root highlighted."""
    from .reducer import Certificate
    from .visualization import plot_certificate

    G, _ = _load(path, None)
    try:
        data = json.loads(Path(certificate_path).read_text())
        cert = Certificate.from_dict(data.get("certificate", data))
    except (OSError, ValueError, KeyError) as e:
        raise _usage_error(f"{certificate_path}: {e}") from None
    err_console.print(f"[green]wrote[/green] {plot_certificate(G, cert, output)}")


if __name__ == "__main__":
    app()
