"""Cross-checks of distances, cones and potentials against networkx on small graphs."""

import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sonar.core.generators import random_connected
from sonar.core.potentials import CandidateSet, exact_median, gamma, gamma_all, phi_all
from sonar.utilities.types import Potential
from tests.conftest import from_networkx


def _to_networkx(graph) -> nx.Graph:
	nxg = nx.Graph()
	nxg.add_nodes_from(range(graph.n))
	nxg.add_weighted_edges_from(graph.edges())
	return nxg


def _assert_matches_definitions(nxg: nx.Graph, subsets: list[list[int]]) -> None:
	"""Distances, E_t(v), Phi, Gamma and median halving on one unweighted graph, against BFS."""
	g = from_networkx(nxg)
	dt = g.distances
	lengths = dict(nx.all_pairs_shortest_path_length(nxg))
	first_steps = {
		(v, t): frozenset(u for u in nxg.neighbors(v) if lengths[u][t] + 1 == lengths[v][t])
		for v in range(g.n)
		for t in range(g.n)
	}
	for (v, t), expected in first_steps.items():
		assert dt.d(v, t) == lengths[v][t]
		assert dt.target_edges(v, t) == expected
	for members in subsets:
		s = CandidateSet.from_vertices(g.n, members)
		phis = phi_all(dt, s)
		gammas = gamma_all(g, dt, s)
		for v in range(g.n):
			assert phis[v] == sum(lengths[v][t] for t in members)
			assert gammas[v] == max(sum(1 for t in members if u in first_steps[v, t]) for u in nxg.neighbors(v))
		for potential in Potential:
			v0 = exact_median(potential, g, dt, s)
			assert gamma(g, dt, s, v0) <= len(members) / 2


class TestAtlas:
	def test_distances_match_bfs(self, atlas_graphs):
		for nxg in atlas_graphs:
			g = from_networkx(nxg)
			lengths = dict(nx.all_pairs_shortest_path_length(nxg))
			for v in range(g.n):
				for t in range(g.n):
					assert g.distances.d(v, t) == lengths[v][t]

	def test_cones_match_shortest_path_first_steps(self, atlas_graphs):
		for nxg in atlas_graphs:
			g = from_networkx(nxg)
			dt = g.distances
			lengths = dict(nx.all_pairs_shortest_path_length(nxg))
			for v in range(g.n):
				for u in g.neighbors(v):
					expected = {t for t in range(g.n) if lengths[u][t] + 1 == lengths[v][t]}
					assert set(np.flatnonzero(dt.cone_mask(v, u)).tolist()) == expected

	def test_target_edges_are_first_steps_of_shortest_paths(self, atlas_graphs):
		for nxg in atlas_graphs[::7]:
			g = from_networkx(nxg)
			for v in range(g.n):
				for t in range(g.n):
					if v == t:
						assert g.distances.target_edges(v, t) == frozenset()
						continue
					first_steps = {path[1] for path in nx.all_shortest_paths(nxg, v, t)}
					assert g.distances.target_edges(v, t) == frozenset(first_steps)

	def test_potentials_match_definitions(self, atlas_graphs):
		for index, nxg in enumerate(atlas_graphs[::5]):
			g = from_networkx(nxg)
			dt = g.distances
			lengths = dict(nx.all_pairs_shortest_path_length(nxg))
			members = [x for x in range(g.n) if (x + index) % 2 == 0] or [0]
			s = CandidateSet.from_vertices(g.n, members)
			phis = phi_all(dt, s)
			gammas = gamma_all(g, dt, s)
			for v in range(g.n):
				assert phis[v] == sum(lengths[v][t] for t in members)
				cone_sizes = [
					sum(1 for t in members if lengths[u][t] + 1 == lengths[v][t]) for u in nxg.neighbors(v)
				]
				assert gammas[v] == max(cone_sizes)

	@pytest.mark.slow
	def test_median_halving_over_every_subset(self, atlas_graphs):
		for nxg in atlas_graphs:
			g = from_networkx(nxg)
			dt = g.distances
			for size in range(1, g.n + 1):
				for members in itertools.combinations(range(g.n), size):
					s = CandidateSet.from_vertices(g.n, members)
					for potential in Potential:
						v0 = exact_median(potential, g, dt, s)
						assert gamma(g, dt, s, v0) <= size / 2


class TestEightVertices:
	@pytest.mark.slow
	def test_every_connected_graph(self, connected_graphs_8):
		assert len(connected_graphs_8) == 11117
		subsets = [list(range(8)), [0, 2, 4, 6], [1, 3, 5, 7], [0, 7], [1, 2, 3], [5]]
		for nxg in connected_graphs_8:
			_assert_matches_definitions(nxg, subsets)


@st.composite
def graph_and_subset(draw):
	n = draw(st.integers(min_value=2, max_value=24))
	extra = draw(st.integers(min_value=0, max_value=2 * n))
	seed = draw(st.integers(min_value=0, max_value=2**31))
	weighted = draw(st.booleans())
	g = random_connected(n, extra_edges=extra, seed=seed, weighted=weighted, max_weight=5)
	mask = draw(st.lists(st.booleans(), min_size=n, max_size=n).filter(any))
	return g, CandidateSet(np.array(mask))


class TestProperties:
	@settings(max_examples=60, deadline=None)
	@given(graph_and_subset())
	def test_weighted_distances_match_dijkstra(self, case):
		g, _ = case
		lengths = dict(nx.all_pairs_dijkstra_path_length(_to_networkx(g)))
		for v in range(g.n):
			for t in range(g.n):
				assert abs(g.distances.d(v, t) - lengths[v][t]) < 1e-9

	@settings(max_examples=80, deadline=None)
	@given(graph_and_subset())
	def test_phi_median_halves_every_cone(self, case):
		g, s = case
		dt = g.distances
		v = exact_median(Potential.PHI, g, dt, s)
		assert gamma(g, dt, s, v) <= len(s) / 2

	@settings(max_examples=80, deadline=None)
	@given(graph_and_subset())
	def test_gamma_median_halves_the_candidates(self, case):
		g, s = case
		dt = g.distances
		v = exact_median(Potential.GAMMA, g, dt, s)
		assert gamma(g, dt, s, v) <= len(s) / 2

	@settings(max_examples=60, deadline=None)
	@given(graph_and_subset())
	def test_cones_cover_everything_but_the_source(self, case):
		g, _ = case
		dt = g.distances
		for v in range(g.n):
			union = np.zeros(g.n, dtype=bool)
			for u in g.neighbors(v):
				union |= dt.cone_mask(v, u)
			assert not union[v]
			assert union.sum() == g.n - 1


@st.composite
def nine_or_ten_vertices(draw):
	n = draw(st.sampled_from([9, 10]))
	extra = draw(st.integers(min_value=0, max_value=(n - 1) * (n - 2) // 2))
	seed = draw(st.integers(min_value=0, max_value=2**31))
	g = random_connected(n, extra_edges=extra, seed=seed)
	members = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=1, max_size=n, unique=True))
	return g, sorted(members)


class TestNineAndTenVertices:
	@pytest.mark.slow
	@settings(max_examples=500, deadline=None)
	@given(nine_or_ten_vertices())
	def test_random_graphs_match_definitions(self, case):
		g, members = case
		_assert_matches_definitions(_to_networkx(g), [list(range(g.n)), members])
