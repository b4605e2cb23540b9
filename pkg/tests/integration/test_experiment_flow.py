import pytest

from sonar.core.generators import generate
from sonar.core.graph import Graph
from sonar.flows.experiment import run_experiment, summarize
from sonar.models.experiment import ExperimentConfig, GeneratorSpec, OracleSpec
from sonar.models.search import SearchParams
from sonar.searchers.transcript import ceil_log2
from sonar.searchers.tree import tree_alpha
from sonar.tasks.generate import write_graph
from sonar.tasks.serialize import read_records
from sonar.utilities.types import GeneratorKind, OracleKind, OutputFormat, SearcherName


def _config(searcher: SearcherName, kind: GeneratorKind, n: int, trials: int, **overrides) -> ExperimentConfig:
	return ExperimentConfig(
		generator=GeneratorSpec(kind=kind, n=n, extra_edges=overrides.pop("extra_edges", 0)),
		searcher=searcher,
		trials=trials,
		**overrides,
	)


class TestSummarize:
	def test_empty(self):
		summary = summarize([])
		assert summary.trials == 0
		assert summary.success_rate == 0.0


@pytest.mark.integration
class TestExperimentFlow:
	def test_records_come_back_in_trial_order(self):
		cfg = _config(SearcherName.GAMMA_BINARY, GeneratorKind.RANDOM_CONNECTED, 64, 12, extra_edges=30)
		result = run_experiment(cfg)
		assert [r.trial for r in result.records] == list(range(12))
		assert result.summary.trials == 12
		assert result.summary.success_rate == 1.0
		assert result.summary.bound_violations == 0

	def test_reruns_are_identical_apart_from_timing(self):
		cfg = _config(
			SearcherName.TREE_TWO_TARGET,
			GeneratorKind.RANDOM_TREE,
			63,
			6,
			oracle=OracleSpec(kind=OracleKind.TWO_TARGET, p1=0.7),
			params=SearchParams(rho=2),
			master_seed=99,
		)
		first = [r.model_dump(exclude={"millis"}) for r in run_experiment(cfg).records]
		second = [r.model_dump(exclude={"millis"}) for r in run_experiment(cfg).records]
		assert first == second

	def test_shared_graph_when_regeneration_is_off(self):
		cfg = _config(
			SearcherName.GAMMA_BINARY,
			GeneratorKind.RANDOM_TREE,
			50,
			4,
			regenerate_graph=False,
		)
		result = run_experiment(cfg)
		assert {r.n for r in result.records} == {50}
		assert all(r.success for r in result.records)

	def test_graph_file_is_read_once_and_precomputed(self, temp_dir, mocker):
		path = temp_dir / "connected.txt"
		write_graph(generate(GeneratorKind.RANDOM_CONNECTED, 48, seed=5, extra_edges=20), str(path))
		precompute = mocker.spy(Graph, "precompute")
		cfg = ExperimentConfig(graph_file=str(path), searcher=SearcherName.GAMMA_BINARY, trials=6)
		result = run_experiment(cfg)
		assert precompute.call_count == 1
		assert {r.n for r in result.records} == {48}
		assert all(r.success and r.bound_ok for r in result.records)

	def test_writes_records(self, temp_dir):
		path = temp_dir / "results.json"
		cfg = _config(
			SearcherName.RESTRICTED_SET,
			GeneratorKind.RANDOM_CONNECTED,
			100,
			5,
			extra_edges=40,
			oracle=OracleSpec(kind=OracleKind.RESTRICTED_SET, target_count=3),
			format=OutputFormat.JSON,
		)
		result = run_experiment(cfg, out=str(path))
		records, summary = read_records(str(path))
		assert records == result.records
		assert summary == result.summary

	@pytest.mark.slow
	def test_path_1024_within_eleven_queries(self):
		cfg = _config(SearcherName.GAMMA_BINARY, GeneratorKind.PATH, 1024, 200)
		result = run_experiment(cfg)
		assert result.summary.queries_max <= 11
		assert result.summary.success_rate == 1.0

	@pytest.mark.slow
	def test_tree_two_target_success_rate(self):
		cfg = _config(
			SearcherName.TREE_TWO_TARGET,
			GeneratorKind.RANDOM_TREE,
			256,
			200,
			oracle=OracleSpec(kind=OracleKind.TWO_TARGET, p1=0.7),
		)
		result = run_experiment(cfg)
		assert result.summary.success_rate >= 0.9
		assert result.summary.bound_violations == 0
		assert result.summary.queries_max <= 2 * tree_alpha(0.7) * ceil_log2(256) ** 2
