"""Batch certification: enumerate -> extract -> verify -> detect -> discharge over a whole corpus."""

from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator
from rich.console import Console
from rich.table import Table

from .alon_tarsi import at_number
from .configurations import detect
from .discharging import apply_rules, audit
from .errors import ATMatchError, TheoremViolation
from .genlab import GeneratorSpec, brute_force_choosable, enumerate_class
from .plane_graph import PlaneGraph
from .reducer import FALLBACK, extract, verify_certificate
from .rotsys import VALID_L, format_rotsys
from .weave_integration import trace_batch_summary, trace_certificate

logger = logging.getLogger(__name__)

console = Console(stderr=True)


class BatchConfig(BaseModel):
    l: int
    max_n: int = Field(ge=1)
    jobs: int = Field(default=4, ge=1)
    seed: int = 0
    mode: Literal["exhaustive", "random"] = "exhaustive"
    samples: int = Field(default=100, ge=1)
    connectivity: int = Field(default=1, ge=1, le=2)
    base_threshold: int | None = Field(default=None, ge=1)
    oracle_max_n: int = Field(default=0, ge=0)  # AT and choosability oracles up to this size

    @field_validator("l")
    @classmethod
    def _known_l(cls, v: int) -> int:
        if v not in VALID_L:
            raise ValueError(f"l must be one of {VALID_L}")
        return v

    def generator_spec(self) -> GeneratorSpec:
        return GeneratorSpec(
            max_vertices=self.max_n,
            l=self.l,
            connectivity=self.connectivity,
            seed=self.seed,
            mode=self.mode,
            samples=self.samples,
        )


@dataclass
class GraphOutcome:
    index: int
    num_vertices: int
    num_edges: int
    root: int
    passed: bool = True
    failures: list[dict[str, Any]] = field(default_factory=list)
    matching_size: int = 0
    diff: int | None = None
    kinds: dict[str, int] = field(default_factory=dict)
    v0_final: Fraction | None = None
    f0_final: Fraction | None = None
    theorem_violation: bool = False
    rotsys: str | None = None

    def fail(self, name: str, witness: dict[str, Any]) -> None:
        self.passed = False
        self.failures.append({"check": name, "witness": witness})

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "num_vertices": self.num_vertices,
            "num_edges": self.num_edges,
            "root": self.root,
            "passed": self.passed,
            "failures": self.failures,
            "matching_size": self.matching_size,
            "diff": self.diff,
            "kinds": self.kinds,
            "v0_final": None if self.v0_final is None else str(self.v0_final),
            "f0_final": None if self.f0_final is None else str(self.f0_final),
            "rotsys": self.rotsys,
        }


@dataclass
class BatchStats:
    l: int
    graphs: int = 0
    passed: int = 0
    failed: int = 0
    theorem_violations: int = 0
    fallbacks: int = 0
    kind_counts: dict[str, int] = field(default_factory=dict)
    min_v0_final: Fraction | None = None
    min_f0_final: Fraction | None = None
    max_matching: int = 0
    elapsed_seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.l,
            "graphs": self.graphs,
            "passed": self.passed,
            "failed": self.failed,
            "theorem_violations": self.theorem_violations,
            "fallbacks": self.fallbacks,
            "kind_counts": dict(sorted(self.kind_counts.items())),
            "min_v0_final": None if self.min_v0_final is None else str(self.min_v0_final),
            "min_f0_final": None if self.min_f0_final is None else str(self.min_f0_final),
            "max_matching": self.max_matching,
        }


@dataclass
class BatchRun:
    config: BatchConfig
    stats: BatchStats
    outcomes: list[GraphOutcome] = field(default_factory=list)

    @property
    def failures(self) -> list[GraphOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.model_dump(),
            "stats": self.stats.to_dict(),
            "failures": [o.to_dict() for o in self.failures],
        }


def certify_one(G: PlaneGraph, l: int, index: int, config: BatchConfig) -> GraphOutcome:
    """Run every check on one rooted class member. Never raises for failed checks."""
    outcome = GraphOutcome(index=index, num_vertices=len(G), num_edges=len(G.edges), root=G.root)
    try:
        cert = extract(G, l, base_threshold=config.base_threshold)
    except TheoremViolation as e:
        outcome.theorem_violation = True
        outcome.fail("extract", {"error": str(e)})
        cert = None

    if cert is not None:
        outcome.matching_size = len(cert.matching)
        outcome.kinds = cert.kind_counts()
        report = verify_certificate(G, cert)
        outcome.diff = report.check("diff_nonzero").witness.get("diff")
        for check in report.checks:
            if not check.passed:
                outcome.fail(check.name, check.witness)
        if len(G) <= config.oracle_max_n:
            h = G.to_networkx()
            h.remove_edges_from(cert.matching.edges)
            at = at_number(h)
            if at > 3:
                outcome.fail("at_number", {"at_number": at})
            verdict = brute_force_choosable(h, 3)
            if verdict.choosable is False:
                outcome.fail("choosable", verdict.to_dict())

    if len(G) >= 2 and detect(G, l) is None:
        outcome.fail("completeness", {"reason": "no configuration detected"})

    ledger = apply_rules(G, l)
    audit_report = audit(ledger, G, l)
    outcome.v0_final, outcome.f0_final = audit_report.v0_charge, audit_report.f0_charge
    for check in audit_report.checks:
        if check.status == "fail":
            outcome.fail(f"audit:{check.name}", check.witness)

    if not outcome.passed:
        outcome.rotsys = format_rotsys(G, l)
    return outcome


def _aggregate(stats: BatchStats, outcome: GraphOutcome) -> None:
    stats.graphs += 1
    if outcome.passed:
        stats.passed += 1
    else:
        stats.failed += 1
    stats.theorem_violations += outcome.theorem_violation
    stats.fallbacks += outcome.kinds.get(FALLBACK, 0)
    for kind, n in outcome.kinds.items():
        stats.kind_counts[kind] = stats.kind_counts.get(kind, 0) + n
    if outcome.v0_final is not None:
        if stats.min_v0_final is None or outcome.v0_final < stats.min_v0_final:
            stats.min_v0_final = outcome.v0_final
    if outcome.f0_final is not None:
        if stats.min_f0_final is None or outcome.f0_final < stats.min_f0_final:
            stats.min_f0_final = outcome.f0_final
    stats.max_matching = max(stats.max_matching, outcome.matching_size)


def print_batch_stats(stats: BatchStats) -> None:
    table = Table(title=f"certify-batch l={stats.l}")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Graphs", str(stats.graphs))
    table.add_row("Passed", str(stats.passed))
    table.add_row("Failed", str(stats.failed))
    table.add_row("Theorem violations", str(stats.theorem_violations))
    table.add_row("Brute-force fallbacks", str(stats.fallbacks))
    for kind, n in sorted(stats.kind_counts.items()):
        table.add_row(f"  {kind}", str(n))
    table.add_row("Min ch*(v0)", str(stats.min_v0_final))
    table.add_row("Min ch*(f0)", str(stats.min_f0_final))
    table.add_row("Largest matching", str(stats.max_matching))
    table.add_row("Time", f"{stats.elapsed_seconds:.1f}s")

    console.print(table)


async def run_batch(config: BatchConfig, weave_enabled: bool = False) -> BatchRun:
    """Certify every generated graph on a pool of config.jobs worker threads."""
    t0 = time.time()
    graphs = list(enumerate_class(config.generator_spec()))
    console.print(f"[bold cyan]Certifying {len(graphs)} rooted graphs (l={config.l})[/bold cyan]")

    sem = asyncio.Semaphore(config.jobs)

    async def _run(index: int, G: PlaneGraph) -> GraphOutcome:
        async with sem:
            return await asyncio.to_thread(certify_one, G, config.l, index, config)

    completed = await asyncio.gather(
        *(_run(i, G) for i, G in enumerate(graphs)), return_exceptions=True
    )

    stats = BatchStats(l=config.l)
    run = BatchRun(config=config, stats=stats)
    for index, (G, result) in enumerate(zip(graphs, completed)):
        if isinstance(result, BaseException):
            if not isinstance(result, ATMatchError):
                logger.error("worker crashed on graph %d: %r", index, result)
            result = GraphOutcome(
                index=index, num_vertices=len(G), num_edges=len(G.edges), root=G.root
            )
            result.fail("error", {"error": repr(completed[index])})
            result.rotsys = format_rotsys(G, config.l)
        _aggregate(stats, result)
        run.outcomes.append(result)
        if weave_enabled:
            trace_certificate(
                graph_id=f"l{config.l}-{index}",
                l=config.l,
                num_vertices=result.num_vertices,
                num_edges=result.num_edges,
                matching_size=result.matching_size,
                passed=result.passed,
                diff_value=result.diff,
                reduction_kinds=result.kinds,
            )

    stats.elapsed_seconds = time.time() - t0
    if weave_enabled:
        trace_batch_summary(stats.to_dict())
    return run
