import time
from typing import Optional

from prefect import task
from prefect.cache_policies import NO_CACHE

from sonar.utilities.logging import get_logger

from sonar.core.generators import generate
from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Oracle, RestrictedSetOracle
from sonar.models.experiment import ExperimentConfig, ExperimentRecord
from sonar.models.oracle import OracleConfig
from sonar.models.search import SearchParams
from sonar.searchers.gamma import gamma_binary_search, gamma_search_cap
from sonar.searchers.noisy import noisy_first_target, noisy_search_cap
from sonar.searchers.restricted import restricted_search_cap, restricted_set_search
from sonar.searchers.second_target import (
	algorithm1_cap,
	algorithm1_second_target,
	algorithm2_direction_distance,
	algorithm3_vertex_edge,
	branching_cap,
)
from sonar.searchers.transcript import Transcript
from sonar.searchers.tree import tree_search_cap, tree_two_target_search
from sonar.utilities.errors import IncompatibleConfig, SearchError
from sonar.utilities.seeding import derive_seed, make_rng
from sonar.utilities.types import GeneratorKind, OracleKind, SearcherName, TiePolicy
from sonar.utilities.vars import SEARCHER_CAPABILITIES

# Kinds that only produce trees when no extra edges are requested
_TREE_KINDS = {GeneratorKind.PATH, GeneratorKind.STAR_PATHS, GeneratorKind.RANDOM_TREE}
_SPANNING_KINDS = {GeneratorKind.RANDOM_CONNECTED, GeneratorKind.RANDOM_BOUNDED}


def check_compatibility(cfg: ExperimentConfig, graph: Optional[Graph] = None) -> None:
	"""Reject searcher / oracle / graph combinations the searcher cannot run on.

	Without a graph only the generator spec (if any) is checked; with one, tree-ness
	and target ids are checked against the actual graph.
	"""
	capability = SEARCHER_CAPABILITIES[cfg.searcher]
	oracle = cfg.oracle
	name = cfg.searcher.value

	if oracle.kind != capability.oracle:
		raise IncompatibleConfig(f"{name} needs a {capability.oracle.value} oracle, got {oracle.kind.value}")
	if capability.targets and oracle.target_count != capability.targets:
		raise IncompatibleConfig(f"{name} needs {capability.targets} targets, got {oracle.target_count}")
	if oracle.kind == OracleKind.TWO_TARGET and oracle.p1 >= 1:
		raise IncompatibleConfig(f"{name} needs p1 < 1 so that both targets can answer")

	needs_bias = cfg.searcher in (SearcherName.NOISY_FIRST_TARGET, SearcherName.ALGORITHM1) or (
		cfg.locate_first_target and capability.needs_first_target
	)
	if needs_bias and oracle.p1 <= 0.5:
		raise IncompatibleConfig(f"{name} needs a biased oracle with p1 > 1/2, got {oracle.p1}")
	if cfg.locate_first_target and not capability.needs_first_target:
		raise IncompatibleConfig(f"locate_first_target only applies to second-target searchers, not {name}")

	generator = cfg.generator
	if generator is not None:
		if capability.tree_only:
			tree_kind = generator.kind in _TREE_KINDS or (
				generator.kind in _SPANNING_KINDS and generator.extra_edges == 0
			)
			if not tree_kind:
				raise IncompatibleConfig(f"{name} runs on trees only, {generator.kind.value} graphs are not trees")
		if oracle.target_count > generator.n:
			raise IncompatibleConfig(f"{oracle.target_count} targets do not fit in {generator.n} vertices")

	if graph is None:
		return
	if capability.tree_only and not graph.is_tree:
		raise IncompatibleConfig(f"{name} runs on trees only")
	if oracle.target_count > graph.n:
		raise IncompatibleConfig(f"{oracle.target_count} targets do not fit in {graph.n} vertices")
	if oracle.targets is not None and any(t >= graph.n for t in oracle.targets):
		raise IncompatibleConfig(f"targets {oracle.targets} are not all vertices of a {graph.n}-vertex graph")


def searcher_cap(cfg: ExperimentConfig, graph: Graph) -> int:
	"""Closed-form query cap of the configured searcher on `graph`."""
	n = graph.n
	params = cfg.params
	p1 = cfg.oracle.p1
	searcher = cfg.searcher

	if searcher == SearcherName.GAMMA_BINARY:
		return gamma_search_cap(n, params.epsilon)
	if searcher == SearcherName.NOISY_FIRST_TARGET:
		return noisy_search_cap(n, params.rho)
	if searcher == SearcherName.TREE_TWO_TARGET:
		return tree_search_cap(n, p1, params.rho)
	if searcher == SearcherName.RESTRICTED_SET:
		return restricted_search_cap(n, cfg.oracle.target_count)

	if searcher == SearcherName.ALGORITHM1:
		cap = algorithm1_cap(n, p1, graph.max_degree, params.epsilon, params.rho)
	else:
		cap = branching_cap(n, params.epsilon, params.rho)
	if cfg.locate_first_target:
		cap += noisy_search_cap(n, params.rho)
	return cap


def build_oracle(
	graph: Graph,
	dt: DistanceTable,
	kind: OracleKind,
	targets: list[int],
	p1: float = 1.0,
	tie_policy: TiePolicy = TiePolicy.EQUIPROBABLE,
	seed: int = 0,
) -> Oracle | RestrictedSetOracle:
	if kind == OracleKind.RESTRICTED_SET:
		return RestrictedSetOracle(graph, dt, targets)
	if kind == OracleKind.TRUTHFUL:
		return Oracle(graph, dt, OracleConfig(targets=targets, tie_policy=tie_policy, seed=seed))
	if len(targets) != 2:
		raise IncompatibleConfig(f"a two-target oracle needs exactly 2 targets, got {len(targets)}")
	return Oracle(graph, dt, OracleConfig.two_target(targets[0], targets[1], p1, seed, tie_policy))


def run_searcher(
	searcher: SearcherName,
	graph: Graph,
	oracle: Oracle | RestrictedSetOracle,
	params: SearchParams,
	locate_first_target: bool = False,
	dt: Optional[DistanceTable] = None,
) -> tuple[list[int], list[Transcript]]:
	"""Run one searcher against a prepared oracle.

	Second-target searchers report [t1, t2]; t1 is read off the oracle
	unless `locate_first_target` asks for it to be found first with the
	noisy first-target search, which adds a transcript of its own.
	"""
	dt = dt if dt is not None else graph.distances

	if isinstance(oracle, RestrictedSetOracle):
		found, transcript = restricted_set_search(graph, oracle, len(oracle.targets), params, dt)
		return found, [transcript]
	if searcher == SearcherName.RESTRICTED_SET:
		raise IncompatibleConfig("restricted-set search needs a restricted-set oracle")
	if searcher == SearcherName.GAMMA_BINARY:
		v, transcript = gamma_binary_search(graph, oracle, params, dt)
		return [v], [transcript]
	if searcher == SearcherName.NOISY_FIRST_TARGET:
		v, transcript = noisy_first_target(graph, oracle, params, dt)
		return [v], [transcript]
	if searcher == SearcherName.TREE_TWO_TARGET:
		pair, transcript = tree_two_target_search(graph, oracle, params, dt)
		return list(pair), [transcript]

	transcripts: list[Transcript] = []
	t1 = oracle.targets[0]
	if locate_first_target:
		t1, located = noisy_first_target(graph, oracle, params, dt)
		transcripts.append(located)
	if searcher == SearcherName.ALGORITHM1:
		v, transcript = algorithm1_second_target(graph, t1, oracle, params, dt)
	elif searcher == SearcherName.ALGORITHM2:
		v, transcript = algorithm2_direction_distance(graph, t1, oracle, params, dt)
	else:
		v, transcript = algorithm3_vertex_edge(graph, t1, oracle, oracle, params, dt)
	transcripts.append(transcript)
	return [t1, v], transcripts


def score(searcher: SearcherName, found: list[int], targets: list[int]) -> bool:
	"""Unordered match for searchers that find every target, ordered prefix match otherwise."""
	if not found:
		return False
	if searcher in (SearcherName.TREE_TWO_TARGET, SearcherName.RESTRICTED_SET):
		return sorted(found) == sorted(targets)
	return found == targets[: len(found)]


@task(
	name="run-trial",
	description="Run one seeded search trial and score it against the hidden targets",
	cache_policy=NO_CACHE,
	task_run_name="trial-{trial}",
)
def run_trial(cfg: ExperimentConfig, trial: int, graph: Optional[Graph] = None) -> ExperimentRecord:
	"""Run trial `trial` of an experiment.

	Everything random in the trial (the graph when it is not shared, the
	targets, the oracle and the searcher's tie-breaking) is drawn from the
	trial's derived seed, so a trial reproduces from (config, index) alone.
	"""
	logger = get_logger("run-trial")
	seed = derive_seed(cfg.master_seed, trial)
	rng = make_rng(seed)
	started = time.perf_counter()

	if graph is None:
		spec = cfg.generator
		if spec is None:
			raise IncompatibleConfig(f"trial {trial}: {cfg.graph_file} must be read once and passed in as the shared graph")
		graph = generate(
			spec.kind,
			spec.n,
			seed=seed,
			extra_edges=spec.extra_edges,
			max_degree=spec.max_degree,
			weighted=spec.weighted,
			max_weight=spec.max_weight,
		)
	check_compatibility(cfg, graph)
	dt = graph.distances

	if cfg.oracle.targets is not None:
		targets = list(cfg.oracle.targets)
	else:
		targets = [int(t) for t in rng.choice(graph.n, size=cfg.oracle.target_count, replace=False)]

	params = cfg.params.model_copy(update={"seed": seed})
	oracle = build_oracle(
		graph, dt, cfg.oracle.kind, targets, cfg.oracle.p1, cfg.oracle.tie_policy, seed=derive_seed(seed, 1)
	)

	found: list[int] = []
	try:
		found, _ = run_searcher(cfg.searcher, graph, oracle, params, cfg.locate_first_target, dt)
	except SearchError as e:
		logger.warning(f"Trial {trial} ({cfg.searcher.value}) failed: {e}")
	success = score(cfg.searcher, found, targets)

	millis = (time.perf_counter() - started) * 1000.0
	cap = searcher_cap(cfg, graph)
	total = oracle.invocations
	two_target = cfg.oracle.kind == OracleKind.TWO_TARGET

	record = ExperimentRecord(
		trial=trial,
		seed=seed,
		searcher=cfg.searcher.value,
		n=graph.n,
		p1=cfg.oracle.p1 if two_target else 1.0,
		epsilon=cfg.params.epsilon,
		rho=cfg.params.rho,
		queries_total=total,
		queries_by_type=dict(sorted(oracle.by_kind.items())),
		success=success,
		found=found,
		bound_cap=cap,
		bound_ok=total <= cap,
		millis=round(millis, 3),
	)
	logger.debug(f"Trial {trial}: queries={total} cap={cap} success={success}")
	return record
