import pytest

from sonar.core.generators import cycle_graph, random_tree
from sonar.models.experiment import ExperimentConfig, GeneratorSpec, OracleSpec
from sonar.models.search import SearchParams
from sonar.tasks.trial import build_oracle, check_compatibility, run_searcher, run_trial, score, searcher_cap
from sonar.utilities.errors import IncompatibleConfig
from sonar.utilities.types import GeneratorKind, OracleKind, SearcherName


def _config(searcher: SearcherName, kind: GeneratorKind = GeneratorKind.RANDOM_TREE, n: int = 64, **overrides):
	oracle = overrides.pop("oracle", None)
	if oracle is None:
		oracle = OracleSpec(kind=OracleKind.TWO_TARGET, p1=0.75)
	return ExperimentConfig(
		generator=GeneratorSpec(kind=kind, n=n, extra_edges=overrides.pop("extra_edges", 0)),
		searcher=searcher,
		oracle=oracle,
		**overrides,
	)


class TestCheckCompatibility:
	def test_gamma_needs_truthful_oracle(self):
		with pytest.raises(IncompatibleConfig, match="truthful"):
			check_compatibility(_config(SearcherName.GAMMA_BINARY))

	def test_tree_searcher_rejects_cyclic_kinds(self):
		with pytest.raises(IncompatibleConfig, match="trees only"):
			check_compatibility(_config(SearcherName.TREE_TWO_TARGET, kind=GeneratorKind.CYCLE))

	def test_spanning_kind_is_a_tree_without_extra_edges(self):
		check_compatibility(_config(SearcherName.TREE_TWO_TARGET, kind=GeneratorKind.RANDOM_CONNECTED))
		with pytest.raises(IncompatibleConfig):
			check_compatibility(_config(SearcherName.TREE_TWO_TARGET, kind=GeneratorKind.RANDOM_CONNECTED, extra_edges=3))

	def test_tree_searcher_rejects_a_cyclic_graph(self):
		cfg = _config(SearcherName.TREE_TWO_TARGET, kind=GeneratorKind.PATH, n=6)
		with pytest.raises(IncompatibleConfig):
			check_compatibility(cfg, cycle_graph(6))

	def test_noisy_needs_bias(self):
		cfg = _config(SearcherName.NOISY_FIRST_TARGET, oracle=OracleSpec(kind=OracleKind.TWO_TARGET, p1=0.5))
		with pytest.raises(IncompatibleConfig, match="p1 > 1/2"):
			check_compatibility(cfg)

	def test_two_target_oracle_needs_both_targets_to_answer(self):
		cfg = _config(SearcherName.ALGORITHM2, oracle=OracleSpec(kind=OracleKind.TWO_TARGET, p1=1.0))
		with pytest.raises(IncompatibleConfig, match="p1 < 1"):
			check_compatibility(cfg)

	def test_locate_first_target_only_for_second_target_searchers(self):
		cfg = _config(SearcherName.NOISY_FIRST_TARGET, locate_first_target=True)
		with pytest.raises(IncompatibleConfig, match="locate_first_target"):
			check_compatibility(cfg)

	def test_targets_must_fit(self):
		cfg = _config(
			SearcherName.RESTRICTED_SET,
			kind=GeneratorKind.PATH,
			n=3,
			oracle=OracleSpec(kind=OracleKind.RESTRICTED_SET, target_count=4),
		)
		with pytest.raises(IncompatibleConfig, match="do not fit"):
			check_compatibility(cfg)

	def test_explicit_targets_checked_against_the_graph(self):
		cfg = _config(
			SearcherName.GAMMA_BINARY,
			kind=GeneratorKind.PATH,
			n=5,
			oracle=OracleSpec(kind=OracleKind.TRUTHFUL, targets=[9]),
		)
		check_compatibility(cfg)
		with pytest.raises(IncompatibleConfig, match="not all vertices"):
			check_compatibility(cfg, random_tree(5, seed=0))


class TestScore:
	def test_unordered_for_tree_and_restricted(self):
		assert score(SearcherName.TREE_TWO_TARGET, [4, 2], [2, 4])
		assert score(SearcherName.RESTRICTED_SET, [9, 1, 5], [1, 5, 9])

	def test_ordered_prefix_otherwise(self):
		assert score(SearcherName.NOISY_FIRST_TARGET, [2], [2, 4])
		assert not score(SearcherName.NOISY_FIRST_TARGET, [4], [2, 4])
		assert score(SearcherName.ALGORITHM2, [2, 4], [2, 4])

	def test_nothing_found_is_a_failure(self):
		assert not score(SearcherName.GAMMA_BINARY, [], [0])


class TestRunSearcher:
	def test_second_target_reports_both_targets(self, small_connected):
		oracle = build_oracle(small_connected, small_connected.distances, OracleKind.TWO_TARGET, [3, 30], p1=0.75)
		found, transcripts = run_searcher(SearcherName.ALGORITHM3, small_connected, oracle, SearchParams(rho=4))
		assert found[0] == 3
		assert len(transcripts) == 1

	def test_located_first_target_adds_a_transcript(self, small_connected):
		oracle = build_oracle(small_connected, small_connected.distances, OracleKind.TWO_TARGET, [3, 30], p1=0.8, seed=2)
		_, transcripts = run_searcher(
			SearcherName.ALGORITHM2, small_connected, oracle, SearchParams(rho=10), locate_first_target=True
		)
		assert [t.searcher for t in transcripts] == ["noisy-first-target", "algorithm2"]

	def test_two_target_oracle_needs_two_targets(self, path5):
		with pytest.raises(IncompatibleConfig):
			build_oracle(path5, path5.distances, OracleKind.TWO_TARGET, [1])


class TestRunTrial:
	def test_gamma_trial_record(self):
		cfg = _config(
			SearcherName.GAMMA_BINARY,
			kind=GeneratorKind.RANDOM_CONNECTED,
			n=128,
			extra_edges=50,
			oracle=OracleSpec(kind=OracleKind.TRUTHFUL),
		)
		record = run_trial.fn(cfg, 0)
		assert record.success
		assert record.p1 == 1.0
		assert record.n == 128
		assert record.bound_ok
		assert record.queries_total == sum(record.queries_by_type.values())
		assert record.bound_cap == 7 + 1

	def test_reproducible_from_config_and_index(self):
		cfg = _config(SearcherName.TREE_TWO_TARGET, params=SearchParams(rho=2), master_seed=11)
		a = run_trial.fn(cfg, 3).model_dump(exclude={"millis"})
		b = run_trial.fn(cfg, 3).model_dump(exclude={"millis"})
		assert a == b

	def test_trials_get_distinct_seeds(self):
		cfg = _config(SearcherName.TREE_TWO_TARGET, master_seed=11)
		assert run_trial.fn(cfg, 0).seed != run_trial.fn(cfg, 1).seed

	def test_shared_graph_is_used(self):
		graph = random_tree(40, seed=1)
		cfg = _config(SearcherName.TREE_TWO_TARGET, n=40)
		record = run_trial.fn(cfg, 0, graph)
		assert record.n == 40

	def test_restricted_set_trial(self):
		cfg = _config(
			SearcherName.RESTRICTED_SET,
			kind=GeneratorKind.RANDOM_CONNECTED,
			n=100,
			extra_edges=40,
			oracle=OracleSpec(kind=OracleKind.RESTRICTED_SET, target_count=3),
		)
		record = run_trial.fn(cfg, 2)
		assert record.success
		assert record.queries_by_type == {"restricted-set": record.queries_total}
		assert record.bound_cap == 3 * 8

	def test_cap_adds_location_when_requested(self, small_connected):
		cfg = _config(SearcherName.ALGORITHM2, kind=GeneratorKind.RANDOM_CONNECTED, n=40, extra_edges=20)
		located = cfg.model_copy(update={"locate_first_target": True})
		assert searcher_cap(located, small_connected) > searcher_cap(cfg, small_connected)
