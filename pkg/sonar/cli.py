# https://typer.tiangolo.com/

from pathlib import Path
from typing import Optional

import click
import typer
from pydantic import ValidationError
from rich import print
from rich.console import Console
from rich.markup import escape

from sonar.core.generators import generate
from sonar.core.graph import Graph, format_edge_list
from sonar.flows.adversary import run_adversary
from sonar.flows.experiment import run_experiment
from sonar.models.experiment import BoundSpec, ExperimentConfig, GeneratorSpec, OracleSpec
from sonar.models.search import SearchParams
from sonar.tasks.generate import read_graph, write_graph
from sonar.tasks.serialize import read_records, write_records
from sonar.tasks.trial import build_oracle, run_searcher, score
from sonar.tasks.verify import verify_bounds
from sonar.utilities.errors import IncompatibleConfig, InvalidParameters, SonarError
from sonar.utilities.seeding import make_rng
from sonar.utilities.types import (
	BoundMode,
	GameName,
	GeneratorKind,
	MedianRule,
	OutputFormat,
	SearcherName,
	TiePolicy,
)
from sonar.utilities.vars import SEARCHER_CAPABILITIES

console = Console()
app = typer.Typer(no_args_is_help=True, help="Target search on graphs: generators, searchers, adversary games.")

KindFlag = typer.Option(help="Graph family to generate")
SizeFlag = typer.Option(..., help="Number of vertices (star-paths: number of non-center vertices)")
SeedFlag = typer.Option(0, help="Seed for graphs, targets and oracles")
OutFlag = typer.Option(None, help="Output file; prints to stdout when omitted")


def _parse_targets(graph: Graph, text: str) -> list[int]:
	"""Comma-separated vertex labels, or dense ids when no label matches."""
	targets = []
	for token in (t.strip() for t in text.split(",")):
		if not token:
			continue
		if token in graph.labels:
			targets.append(graph.vertex_id(token))
		elif token.isdigit() and int(token) < graph.n:
			targets.append(int(token))
		else:
			raise InvalidParameters(f"Unknown target vertex: {token}")
	return targets


def _targets_ids(text: Optional[str]) -> Optional[list[int]]:
	if text is None:
		return None
	return [int(t) for t in text.split(",") if t.strip()]


@app.command()
def gen(
	kind: GeneratorKind = KindFlag,
	n: int = SizeFlag,
	seed: int = SeedFlag,
	extra_edges: int = typer.Option(0, help="Extra edges on top of the random spanning tree"),
	max_degree: int = typer.Option(8, help="Degree cap for random-bounded graphs"),
	weighted: bool = typer.Option(False, help="Draw integer edge weights in [1, max-weight]"),
	max_weight: int = typer.Option(10, help="Largest edge weight"),
	out: Optional[Path] = OutFlag,
):
	"""Generate a graph and write it in edge-list format."""
	graph = generate(
		kind, n, seed=seed, extra_edges=extra_edges, max_degree=max_degree, weighted=weighted, max_weight=max_weight
	)
	if out is None:
		typer.echo(format_edge_list(graph), nl=False)
		return
	write_graph(graph, str(out))
	print(f"[green]Wrote {kind.value} graph with {graph.n} vertices and {graph.edge_count} edges to {out}[/green]")


@app.command()
def search(
	searcher: SearcherName = typer.Option(SearcherName.GAMMA_BINARY, help="Searcher to run"),
	graph_file: Optional[Path] = typer.Option(None, "--graph", help="Edge-list file to search on"),
	kind: Optional[GeneratorKind] = typer.Option(None, help="Generate the graph instead of reading --graph"),
	n: int = typer.Option(64, help="Number of vertices when generating"),
	seed: int = SeedFlag,
	targets: Optional[str] = typer.Option(None, help="Comma-separated target vertices; random when omitted"),
	target_count: int = typer.Option(1, help="Number of random targets for restricted-set search"),
	p1: float = typer.Option(0.75, help="Probability that a two-target answer points at t1"),
	epsilon: float = typer.Option(0.0, help="Median approximation factor"),
	rho: float = typer.Option(1.0, help="Repetition multiplier"),
	median_rule: MedianRule = typer.Option(MedianRule.BEST, help="Which qualifying median to query"),
	tie_policy: TiePolicy = typer.Option(TiePolicy.EQUIPROBABLE, help="How the oracle picks among shortest-path edges"),
	locate_first_target: bool = typer.Option(False, help="Find t1 with the noisy search before a second-target search"),
	out: Optional[Path] = OutFlag,
):
	"""Run one searcher and print its transcript as JSON."""
	if graph_file is None and kind is None:
		raise typer.BadParameter("either --graph or --kind is required")
	graph = read_graph(str(graph_file)) if graph_file is not None else generate(kind, n, seed=seed)

	capability = SEARCHER_CAPABILITIES[searcher]
	if capability.tree_only and not graph.is_tree:
		raise IncompatibleConfig(f"{searcher.value} runs on trees only")

	if targets is not None:
		chosen = _parse_targets(graph, targets)
	else:
		count = capability.targets or target_count
		chosen = [int(t) for t in make_rng(seed).choice(graph.n, size=count, replace=False)]

	params = SearchParams(epsilon=epsilon, rho=rho, seed=seed, median_rule=median_rule)
	oracle = build_oracle(graph, graph.distances, capability.oracle, chosen, p1, tie_policy, seed=seed)
	found, transcripts = run_searcher(searcher, graph, oracle, params, locate_first_target)

	text = "\n".join(t.to_json(indent=2) for t in transcripts)
	if out is not None:
		out.write_text(text + "\n")
	else:
		typer.echo(text)

	labels = escape(f"[{', '.join(graph.labels[v] for v in found)}]")
	expected = escape(f"[{', '.join(graph.labels[v] for v in chosen)}]")
	color = "green" if score(searcher, found, chosen) else "red"
	print(f"[{color}]{searcher.value}: found {labels} (targets {expected}) in {oracle.invocations} queries[/{color}]")


@app.command()
def adversary(
	game: GameName = typer.Option(..., help="Lower-bound game to play"),
	n: int = SizeFlag,
	epsilon: float = typer.Option(0.5, help="Approximation factor for the marking and phi-trap games"),
	pairs: int = typer.Option(1, help="Antipodal target pairs for the cycle-antipodal game"),
	seed: int = SeedFlag,
	out: Optional[Path] = typer.Option(None, help="Write the floor-mode record for `verify --mode floor`"),
	format: OutputFormat = typer.Option(OutputFormat.CSV, help="Record format for --out"),
):
	"""Play a lower-bound adversary game and print the forced query count."""
	print(f"[bold purple]Playing {game.value} on n={n}[/bold purple]")
	report, record = run_adversary(game, n, epsilon=epsilon, pairs=pairs, seed=seed)

	typer.echo(f"forced queries: {report.forced_queries}")
	typer.echo(f"claimed floor: {report.bound}")
	if report.floor_ok:
		print(f"[green]Certificate held for all {report.certificate_steps} steps[/green]")
	else:
		print(f"[bold red]Floor not established (certificate ok: {report.certificate_ok})[/bold red]")

	if out is not None:
		write_records.fn([record], None, format, str(out))


@app.command()
def experiment(
	searcher: SearcherName = typer.Option(..., help="Searcher to run in every trial"),
	graph_file: Optional[Path] = typer.Option(None, "--graph", help="Edge-list file shared by every trial"),
	kind: Optional[GeneratorKind] = typer.Option(None, help="Graph family to generate instead of reading --graph"),
	n: Optional[int] = typer.Option(None, help="Number of vertices when generating"),
	trials: int = typer.Option(100, help="Number of trials"),
	seed: int = typer.Option(0, help="Master seed; trial seeds are derived from it"),
	targets: Optional[str] = typer.Option(None, help="Comma-separated fixed target ids; random per trial when omitted"),
	target_count: int = typer.Option(1, help="Targets per trial for restricted-set search"),
	p1: float = typer.Option(0.75, help="Probability that a two-target answer points at t1"),
	epsilon: float = typer.Option(0.0, help="Median approximation factor"),
	rho: float = typer.Option(1.0, help="Repetition multiplier"),
	median_rule: MedianRule = typer.Option(MedianRule.BEST, help="Which qualifying median to query"),
	tie_policy: TiePolicy = typer.Option(TiePolicy.EQUIPROBABLE, help="How the oracle picks among shortest-path edges"),
	extra_edges: int = typer.Option(0, help="Extra edges for random-connected and random-bounded graphs"),
	max_degree: int = typer.Option(8, help="Degree cap for random-bounded graphs"),
	weighted: bool = typer.Option(False, help="Draw integer edge weights in [1, max-weight] for generated graphs"),
	max_weight: int = typer.Option(10, help="Largest edge weight"),
	locate_first_target: bool = typer.Option(False, help="Find t1 with the noisy search before a second-target search"),
	out: Optional[Path] = OutFlag,
	format: OutputFormat = typer.Option(OutputFormat.CSV, help="Record format"),
):
	"""Run a seeded Monte-Carlo experiment and write one record per trial plus a summary."""
	if (graph_file is None) == (kind is None):
		raise typer.BadParameter("exactly one of --graph and --kind is required")
	generator = None
	if kind is not None:
		if n is None:
			raise typer.BadParameter("--n is required with --kind")
		generator = GeneratorSpec(
			kind=kind, n=n, extra_edges=extra_edges, max_degree=max_degree, weighted=weighted, max_weight=max_weight
		)
	elif not graph_file.exists():
		raise FileNotFoundError(f"Graph file does not exist: {graph_file}")

	capability = SEARCHER_CAPABILITIES[searcher]
	cfg = ExperimentConfig(
		generator=generator,
		graph_file=str(graph_file) if graph_file is not None else None,
		searcher=searcher,
		params=SearchParams(epsilon=epsilon, rho=rho, median_rule=median_rule),
		oracle=OracleSpec(
			kind=capability.oracle,
			p1=p1,
			targets=_targets_ids(targets),
			target_count=capability.targets or target_count,
			tie_policy=tie_policy,
		),
		trials=trials,
		master_seed=seed,
		format=format,
		locate_first_target=locate_first_target,
	)

	result = run_experiment(cfg, out=str(out) if out is not None else None)
	if out is None:
		typer.echo(write_records.fn(result.records, result.summary, format), nl=False)

	summary = result.summary
	print(
		f"[green]{summary.trials} trials: success rate {summary.success_rate:.3f}, "
		f"queries median {summary.queries_median:.1f}, max {summary.queries_max}[/green]"
	)
	if summary.bound_violations:
		print(f"[bold yellow]{summary.bound_violations} trials exceeded their query cap[/bold yellow]")


@app.command()
def verify(
	records: Path = typer.Argument(..., help="CSV or JSON records file"),
	mode: BoundMode = typer.Option(BoundMode.CAP, help="cap: queries <= limit; floor: queries >= limit"),
	limit: Optional[int] = typer.Option(None, help="Override every record's own bound"),
	format: Optional[OutputFormat] = typer.Option(None, help="Record format; guessed from the extension when omitted"),
):
	"""Check records against their query caps or floors; exits 1 on any violation."""
	loaded, _ = read_records(str(records), format)
	report = verify_bounds.fn(loaded, BoundSpec(mode=mode, limit=limit))

	for warning in report.warnings:
		print(f"[yellow]{warning}[/yellow]")
	if report.passed:
		print(f"[green]PASS: {report.checked} records within their {mode.value}[/green]")
		return
	print(f"[bold red]FAIL: trials {report.violations} violate their {mode.value}[/bold red]")
	raise typer.Exit(code=1)


def cli(argv: Optional[list[str]] = None) -> int:
	"""Run the command line and return its exit status instead of exiting."""
	command = typer.main.get_command(app)
	try:
		result = command.main(args=argv, prog_name="sonar", standalone_mode=False)
	except click.exceptions.UsageError as e:
		e.show()
		return 2
	except click.exceptions.Abort:
		return 1
	except (SonarError, ValidationError, FileNotFoundError) as e:
		console.print(f"[bold red]{e}[/bold red]")
		return 1
	return result if isinstance(result, int) else 0


def main() -> None:
	raise SystemExit(cli())


if __name__ == "__main__":
	main()
