import itertools

import networkx as nx
import pytest

from sonar.core.generators import cycle_graph, path_graph, random_connected, random_tree
from sonar.core.graph import Graph, build_graph


@pytest.fixture
def temp_dir(tmp_path):
	"""Provide a temporary directory for test outputs."""
	return tmp_path


@pytest.fixture
def path5() -> Graph:
	"""Unit path v1 - v2 - v3 - v4 - v5 (ids 0..4)."""
	return path_graph(5)


@pytest.fixture
def cycle6() -> Graph:
	return cycle_graph(6)


@pytest.fixture
def square() -> Graph:
	"""4-cycle a-b-c-d: every vertex has an antipode reachable both ways."""
	return build_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


@pytest.fixture
def weighted_triangle() -> Graph:
	"""Triangle whose long edge a-c (weight 5) is never a shortest path."""
	return build_graph([("a", "b", 1), ("b", "c", 2), ("a", "c", 5)])


@pytest.fixture
def small_tree() -> Graph:
	return random_tree(31, seed=7)


@pytest.fixture
def small_connected() -> Graph:
	return random_connected(40, extra_edges=20, seed=3)


@pytest.fixture(scope="session")
def atlas_graphs() -> list[nx.Graph]:
	"""Every connected graph of the networkx atlas with 2 to 7 vertices."""
	return [g for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= 7 and nx.is_connected(g)]


@pytest.fixture(scope="session")
def connected_graphs_8(atlas_graphs) -> list[nx.Graph]:
	"""Every connected 8-vertex graph up to isomorphism.

	Each one has a non-cut vertex, so it is some connected 7-vertex atlas graph
	plus a vertex joined to a non-empty subset of it. Duplicates are dropped
	by hashing first and testing isomorphism within a hash bucket.
	"""
	buckets: dict[str, list[nx.Graph]] = {}
	graphs: list[nx.Graph] = []
	for base in (g for g in atlas_graphs if g.number_of_nodes() == 7):
		for size in range(1, 8):
			for attach in itertools.combinations(range(7), size):
				graph = base.copy()
				graph.add_edges_from((7, x) for x in attach)
				bucket = buckets.setdefault(nx.weisfeiler_lehman_graph_hash(graph), [])
				if any(nx.is_isomorphic(graph, other) for other in bucket):
					continue
				bucket.append(graph)
				graphs.append(graph)
	return graphs


def from_networkx(graph: nx.Graph) -> Graph:
	"""Convert with ids equal to the networkx node order 0..n-1."""
	nodes = sorted(graph.nodes())
	return build_graph([(a, b) for a, b in graph.edges()], vertices=nodes)
