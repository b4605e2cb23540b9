import math
from typing import Optional

import networkx as nx
import numpy as np

from sonar.core.graph import EdgeInput, Graph, build_graph
from sonar.utilities.errors import InvalidParameters
from sonar.utilities.seeding import make_rng
from sonar.utilities.types import GeneratorKind


def star_vertex(r: int, path: int, position: int) -> int:
	"""Id of the vertex `position` steps out on spoke `path` (both 1-based); 0 is the center."""
	if position == 0:
		return 0
	return (path - 1) * r + position


def _weights(count: int, weighted: bool, max_weight: int, rng: np.random.Generator) -> list[int]:
	if not weighted:
		return [1] * count
	return [int(w) for w in rng.integers(1, max_weight + 1, size=count)]


def _assemble(
	n: int,
	pairs: list[tuple[int, int]],
	labels: list[str],
	weighted: bool = False,
	max_weight: int = 1,
	rng: Optional[np.random.Generator] = None,
) -> Graph:
	weights = _weights(len(pairs), weighted, max_weight, rng or make_rng(0))
	edges: list[EdgeInput] = [(labels[a], labels[b], w) for (a, b), w in zip(pairs, weights)]
	return build_graph(edges, vertices=labels[:n])


def _networkx_pairs(graph: nx.Graph) -> list[tuple[int, int]]:
	return sorted((min(a, b), max(a, b)) for a, b in graph.edges())


def path_graph(n: int, weighted: bool = False, max_weight: int = 1, rng=None) -> Graph:
	if n < 1:
		raise InvalidParameters("path needs n >= 1")
	return _assemble(n, _networkx_pairs(nx.path_graph(n)), [f"v{i + 1}" for i in range(n)], weighted, max_weight, rng)


def cycle_graph(n: int, weighted: bool = False, max_weight: int = 1, rng=None) -> Graph:
	if n < 3:
		raise InvalidParameters("cycle needs n >= 3")
	return _assemble(n, _networkx_pairs(nx.cycle_graph(n)), [f"v{i}" for i in range(n)], weighted, max_weight, rng)


def clique_graph(n: int, weighted: bool = False, max_weight: int = 1, rng=None) -> Graph:
	if n < 1:
		raise InvalidParameters("clique needs n >= 1")
	return _assemble(n, _networkx_pairs(nx.complete_graph(n)), [f"v{i}" for i in range(n)], weighted, max_weight, rng)


def grid_diag_graph(n: int, weighted: bool = False, max_weight: int = 1, rng=None) -> Graph:
	"""2 x (n/2) grid with both diagonals in every cell.

	Top row v1..v_{n/2} gets ids 0..n/2-1, bottom row u1..u_{n/2} the rest.
	"""
	if n < 4 or n % 2:
		raise InvalidParameters("grid-diag needs an even n >= 4")
	h = n // 2
	labels = [f"v{i + 1}" for i in range(h)] + [f"u{i + 1}" for i in range(h)]
	pairs: list[tuple[int, int]] = []
	for i in range(h):
		pairs.append((i, h + i))
		if i + 1 < h:
			pairs.extend([(i, i + 1), (h + i, h + i + 1), (i, h + i + 1), (i + 1, h + i)])
	return _assemble(n, sorted(pairs), labels, weighted, max_weight, rng)


def star_paths_graph(n: int, weighted: bool = False, max_weight: int = 1, rng=None) -> Graph:
	"""sqrt(n) paths of sqrt(n) vertices joined at a center v0; n+1 vertices in all."""
	r = math.isqrt(n)
	if r < 1 or r * r != n:
		raise InvalidParameters(f"star-paths needs a perfect square n, got {n}")
	labels = ["v0"] + [f"v{p}_{j}" for p in range(1, r + 1) for j in range(1, r + 1)]
	pairs = [(star_vertex(r, p, j - 1), star_vertex(r, p, j)) for p in range(1, r + 1) for j in range(1, r + 1)]
	return _assemble(n + 1, sorted(pairs), labels, weighted, max_weight, rng)


def _random_tree_pairs(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
	if n == 1:
		return []
	if n == 2:
		return [(0, 1)]
	sequence = [int(x) for x in rng.integers(0, n, size=n - 2)]
	return _networkx_pairs(nx.from_prufer_sequence(sequence))


def _bounded_tree_pairs(n: int, max_degree: int, rng: np.random.Generator) -> list[tuple[int, int]]:
	order = [int(x) for x in rng.permutation(n)]
	degree = np.zeros(n, dtype=np.int64)
	pairs: list[tuple[int, int]] = []
	for i in range(1, n):
		open_slots = [order[j] for j in range(i) if degree[order[j]] < max_degree]
		parent = open_slots[int(rng.integers(len(open_slots)))]
		child = order[i]
		degree[parent] += 1
		degree[child] += 1
		pairs.append((min(parent, child), max(parent, child)))
	return pairs


def _add_extra_edges(
	n: int,
	pairs: list[tuple[int, int]],
	extra: int,
	rng: np.random.Generator,
	max_degree: Optional[int] = None,
) -> list[tuple[int, int]]:
	present = set(pairs)
	degree = np.zeros(n, dtype=np.int64)
	for a, b in pairs:
		degree[a] += 1
		degree[b] += 1
	available = n * (n - 1) // 2 - len(present)
	target = min(extra, available)
	added = 0
	attempts = 0
	# Rejection sampling; bounded so dense or degree-saturated requests terminate.
	while added < target and attempts < 50 * (target + 1):
		attempts += 1
		a, b = (int(x) for x in rng.integers(0, n, size=2))
		if a == b:
			continue
		key = (min(a, b), max(a, b))
		if key in present:
			continue
		if max_degree is not None and (degree[a] >= max_degree or degree[b] >= max_degree):
			continue
		present.add(key)
		degree[a] += 1
		degree[b] += 1
		added += 1
	return sorted(present)


def random_tree(n: int, seed: int, weighted: bool = False, max_weight: int = 1) -> Graph:
	if n < 1:
		raise InvalidParameters("random-tree needs n >= 1")
	rng = make_rng(seed)
	pairs = _random_tree_pairs(n, rng)
	return _assemble(n, pairs, [str(i) for i in range(n)], weighted, max_weight, rng)


def random_connected(n: int, extra_edges: int, seed: int, weighted: bool = False, max_weight: int = 1) -> Graph:
	"""Uniform spanning tree over n vertices plus up to `extra_edges` uniform non-duplicate edges."""
	if n < 1:
		raise InvalidParameters("random-connected needs n >= 1")
	rng = make_rng(seed)
	pairs = _add_extra_edges(n, _random_tree_pairs(n, rng), extra_edges, rng)
	return _assemble(n, pairs, [str(i) for i in range(n)], weighted, max_weight, rng)


def random_bounded(
	n: int,
	max_degree: int,
	extra_edges: int,
	seed: int,
	weighted: bool = False,
	max_weight: int = 1,
) -> Graph:
	"""Random connected graph whose every degree stays <= max_degree."""
	if n < 1:
		raise InvalidParameters("random-bounded needs n >= 1")
	if n > 2 and max_degree < 2:
		raise InvalidParameters("random-bounded needs max_degree >= 2 for n > 2")
	rng = make_rng(seed)
	pairs = _add_extra_edges(n, _bounded_tree_pairs(n, max_degree, rng), extra_edges, rng, max_degree=max_degree)
	return _assemble(n, pairs, [str(i) for i in range(n)], weighted, max_weight, rng)


def generate(
	kind: GeneratorKind,
	n: int,
	seed: int = 0,
	extra_edges: int = 0,
	max_degree: int = 8,
	weighted: bool = False,
	max_weight: int = 10,
) -> Graph:
	"""Build a graph of the given kind. Random kinds and weights are drawn from `seed`."""
	rng = make_rng(seed)
	if kind == GeneratorKind.PATH:
		return path_graph(n, weighted, max_weight, rng)
	if kind == GeneratorKind.CYCLE:
		return cycle_graph(n, weighted, max_weight, rng)
	if kind == GeneratorKind.CLIQUE:
		return clique_graph(n, weighted, max_weight, rng)
	if kind == GeneratorKind.GRID_DIAG:
		return grid_diag_graph(n, weighted, max_weight, rng)
	if kind == GeneratorKind.STAR_PATHS:
		return star_paths_graph(n, weighted, max_weight, rng)
	if kind == GeneratorKind.RANDOM_TREE:
		return random_tree(n, seed, weighted, max_weight)
	if kind == GeneratorKind.RANDOM_CONNECTED:
		return random_connected(n, extra_edges, seed, weighted, max_weight)
	if kind == GeneratorKind.RANDOM_BOUNDED:
		return random_bounded(n, max_degree, extra_edges, seed, weighted, max_weight)
	raise InvalidParameters(f"Unknown generator kind: {kind}")
