from pathlib import Path

from prefect import task
from prefect.cache_policies import NO_CACHE

from sonar.utilities.logging import get_logger

from sonar.core.generators import generate
from sonar.core.graph import Graph, format_edge_list, parse_edge_list
from sonar.models.experiment import GeneratorSpec


@task(
	name="generate-graph",
	description="Build a graph from a generator spec and seed",
	cache_policy=NO_CACHE,
	task_run_name="generate-{spec.kind.value}-{spec.n}",
)
def generate_graph(spec: GeneratorSpec, seed: int = 0) -> Graph:
	"""Build the graph described by `spec`; random kinds and weights come from `seed`."""
	logger = get_logger("generate-graph")
	graph = generate(
		spec.kind,
		spec.n,
		seed=seed,
		extra_edges=spec.extra_edges,
		max_degree=spec.max_degree,
		weighted=spec.weighted,
		max_weight=spec.max_weight,
	)
	logger.info(f"Generated {spec.kind.value} graph: n={graph.n} m={graph.edge_count} max_degree={graph.max_degree}")
	return graph


def read_graph(path: str) -> Graph:
	source = Path(path)
	if not source.exists():
		raise FileNotFoundError(f"Graph file does not exist: {path}")
	return parse_edge_list(source.read_text())


def write_graph(graph: Graph, path: str) -> str:
	target = Path(path)
	target.parent.mkdir(parents=True, exist_ok=True)
	target.write_text(format_edge_list(graph))
	return str(target)
