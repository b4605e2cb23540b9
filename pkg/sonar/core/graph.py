from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from sonar.utilities.errors import DisconnectedGraph, DuplicateEdge, EdgeListSyntaxError, InvalidEdge, NotAdjacent
from sonar.utilities.vars import DISTANCE_TOLERANCE

EdgeInput = tuple[Hashable, Hashable] | tuple[Hashable, Hashable, float]
# One target vertex, or an index array / boolean mask of them
Targets = int | np.ndarray


@dataclass(frozen=True)
class Graph:
	"""Immutable weighted undirected connected graph with dense ids 0..n-1.

	`adjacency[v]` holds (neighbor, weight) pairs in insertion order; all
	tie-breaking downstream uses vertex ids, never this order.
	"""

	n: int
	adjacency: tuple[tuple[tuple[int, float], ...], ...]
	labels: tuple[str, ...]

	def neighbors(self, v: int) -> tuple[int, ...]:
		return tuple(u for u, _ in self.adjacency[v])

	def degree(self, v: int) -> int:
		return len(self.adjacency[v])

	@cached_property
	def max_degree(self) -> int:
		return max((len(a) for a in self.adjacency), default=0)

	@cached_property
	def edge_count(self) -> int:
		return sum(len(a) for a in self.adjacency) // 2

	@property
	def is_tree(self) -> bool:
		return self.edge_count == self.n - 1

	def weight(self, v: int, u: int) -> float:
		for x, w in self.adjacency[v]:
			if x == u:
				return w
		raise NotAdjacent(f"{self.labels[u]} is not adjacent to {self.labels[v]}")

	def has_edge(self, v: int, u: int) -> bool:
		return any(x == u for x, _ in self.adjacency[v])

	def vertex_id(self, label: str) -> int:
		try:
			return self._label_index[label]
		except KeyError:
			raise KeyError(f"Unknown vertex label: {label}") from None

	@cached_property
	def _label_index(self) -> dict[str, int]:
		return {label: i for i, label in enumerate(self.labels)}

	def edges(self) -> list[tuple[int, int, float]]:
		"""Every edge once as (u, v, w) with u < v, sorted by (u, v)."""
		return sorted((v, u, w) for v in range(self.n) for u, w in self.adjacency[v] if v < u)

	@cached_property
	def sparse(self) -> csr_matrix:
		rows, cols, data = [], [], []
		for v, adj in enumerate(self.adjacency):
			for u, w in adj:
				rows.append(v)
				cols.append(u)
				data.append(w)
		return csr_matrix((data, (rows, cols)), shape=(self.n, self.n), dtype=float)

	@cached_property
	def distances(self) -> "DistanceTable":
		return all_pairs_distances(self)

	def precompute(self) -> "DistanceTable":
		"""Fill every lazy cache up front.

		The caches are plain cached_property values, so a graph shared by worker
		threads must be precomputed before the first trial is submitted.
		"""
		_ = (self.max_degree, self.edge_count, self.sparse, self._label_index)
		dt = self.distances
		_ = (dt.max_distance, dt.cone_matrix)
		return dt


def build_graph(edges: Iterable[EdgeInput], vertices: Optional[Sequence[Hashable]] = None) -> Graph:
	"""Validate an edge list and build a Graph.

	Ids are assigned to `vertices` first (in the given order), then to any
	other endpoint in first-appearance order of the edge list. A two-element
	edge has unit weight.
	"""
	index: dict[str, int] = {}
	labels: list[str] = []

	def intern(token: Hashable) -> int:
		key = str(token)
		if key not in index:
			index[key] = len(labels)
			labels.append(key)
		return index[key]

	for token in vertices or ():
		intern(token)

	adjacency: list[list[tuple[int, float]]] = []
	seen: set[tuple[int, int]] = set()
	count = 0
	for edge in edges:
		count += 1
		if len(edge) == 2:
			a, b = edge  # type: ignore[misc]
			w = 1.0
		elif len(edge) == 3:
			a, b, raw = edge  # type: ignore[misc]
			w = float(raw)
		else:
			raise InvalidEdge(f"Edge must have two endpoints and an optional weight: {edge!r}")
		if str(a) == str(b):
			raise InvalidEdge(f"Self-loop at {a}")
		if not w > 0 or not np.isfinite(w):
			raise InvalidEdge(f"Edge {a}-{b} has non-positive weight {w}")
		u, v = intern(a), intern(b)
		key = (min(u, v), max(u, v))
		if key in seen:
			raise DuplicateEdge(f"Duplicate edge {a}-{b}")
		seen.add(key)
		while len(adjacency) < len(labels):
			adjacency.append([])
		adjacency[u].append((v, w))
		adjacency[v].append((u, w))

	n = len(labels)
	while len(adjacency) < n:
		adjacency.append([])

	if count == 0 and n != 1:
		raise InvalidEdge("Edge list is empty")

	graph = Graph(n=n, adjacency=tuple(tuple(a) for a in adjacency), labels=tuple(labels))
	if n > 1:
		components, _ = connected_components(graph.sparse, directed=False)
		if components != 1:
			raise DisconnectedGraph(f"Graph has {components} connected components")
	return graph


@dataclass(frozen=True)
class Cone:
	"""N(v,u): vertices whose shortest path from `source` may start with the edge to `gate`"""

	source: int
	gate: int
	members: frozenset[int]

	def __contains__(self, x: object) -> bool:
		return x in self.members

	def __len__(self) -> int:
		return len(self.members)


class DistanceTable:
	"""All-pairs shortest-path distances plus the stacked cone matrix.

	The cone matrix has one boolean row per directed edge (v, u), grouped by
	v in adjacency order, and is built on first use.
	"""

	def __init__(self, graph: Graph, matrix: np.ndarray):
		self.graph = graph
		matrix.setflags(write=False)
		self.matrix = matrix

	@property
	def n(self) -> int:
		return self.graph.n

	def d(self, v: int, u: int) -> float:
		return float(self.matrix[v, u])

	@cached_property
	def max_distance(self) -> float:
		return float(self.matrix.max()) if self.n else 0.0

	@cached_property
	def _stacked(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		g = self.graph
		offsets = np.zeros(g.n + 1, dtype=np.int64)
		for v in range(g.n):
			offsets[v + 1] = offsets[v] + g.degree(v)
		total = int(offsets[-1])
		cones = np.zeros((total, g.n), dtype=bool)
		owner = np.empty(total, dtype=np.int64)
		gate = np.empty(total, dtype=np.int64)
		D = self.matrix
		for v in range(g.n):
			start = int(offsets[v])
			for k, (u, w) in enumerate(g.adjacency[v]):
				cones[start + k] = np.abs(D[v] - (w + D[u])) <= DISTANCE_TOLERANCE
				owner[start + k] = v
				gate[start + k] = u
		cones.setflags(write=False)
		return cones, owner, gate, offsets

	@property
	def cone_matrix(self) -> np.ndarray:
		return self._stacked[0]

	@property
	def cone_owner(self) -> np.ndarray:
		return self._stacked[1]

	@property
	def cone_gate(self) -> np.ndarray:
		return self._stacked[2]

	def cone_rows(self, v: int) -> slice:
		offsets = self._stacked[3]
		return slice(int(offsets[v]), int(offsets[v + 1]))

	def cone_mask(self, v: int, u: int) -> np.ndarray:
		rows = self.cone_rows(v)
		hits = np.flatnonzero(self.cone_gate[rows] == u)
		if hits.size == 0:
			raise NotAdjacent(f"{self.graph.labels[u]} is not adjacent to {self.graph.labels[v]}")
		return self.cone_matrix[rows.start + int(hits[0])]

	def in_cone(self, v: int, u: int, x: int) -> bool:
		return bool(self.cone_mask(v, u)[x])

	def target_edges(self, v: int, t: int) -> frozenset[int]:
		rows = self.cone_rows(v)
		hit = self.cone_matrix[rows, t]
		return frozenset(int(u) for u in self.cone_gate[rows][hit])


def all_pairs_distances(g: Graph) -> DistanceTable:
	if g.n == 1:
		return DistanceTable(g, np.zeros((1, 1)))
	matrix = shortest_path(g.sparse, method="D", directed=False)
	return DistanceTable(g, np.ascontiguousarray(matrix))


def cone(g: Graph, dt: DistanceTable, v: int, u: int) -> Cone:
	if not g.has_edge(v, u):
		raise NotAdjacent(f"{g.labels[u]} is not adjacent to {g.labels[v]}")
	members = frozenset(int(x) for x in np.flatnonzero(dt.cone_mask(v, u)))
	return Cone(source=v, gate=u, members=members)


def target_edges(g: Graph, dt: DistanceTable, v: int, t: int) -> frozenset[int]:
	"""E_t(v): neighbors u of v with t in N(v,u). Empty iff t == v."""
	return dt.target_edges(v, t)


def additive_valid(dt: DistanceTable, v: int, u: int, t: Targets, c: float) -> bool:
	"""Answer u at v is a c-additive approximate direction toward t.

	`t` may be an index array or boolean mask; the answer must then be valid
	toward every vertex it selects.
	"""
	w = dt.graph.weight(v, u)
	D = dt.matrix
	return bool(np.all(w + D[u, t] <= D[v, t] + c + DISTANCE_TOLERANCE))


def multiplicative_valid(dt: DistanceTable, v: int, u: int, t: Targets, eps: float) -> bool:
	"""Answer u at v is a (1+eps)-multiplicative approximate direction toward t (every t of an array)."""
	w = dt.graph.weight(v, u)
	D = dt.matrix
	return bool(np.all(w + D[u, t] <= (1 + eps) * D[v, t] + DISTANCE_TOLERANCE))


def parse_edge_list(text: str) -> Graph:
	"""Parse the edge-list text format.

	One edge per line as `u v w` or `u v` (unit weight), or a lone `v` that
	declares a vertex. `#` starts a comment.
	"""
	vertices: list[str] = []
	edges: list[EdgeInput] = []
	for lineno, raw in enumerate(text.splitlines(), start=1):
		line = raw.split("#", 1)[0].strip()
		if not line:
			continue
		tokens = line.split()
		if len(tokens) == 1:
			vertices.append(tokens[0])
		elif len(tokens) == 2:
			edges.append((tokens[0], tokens[1]))
		elif len(tokens) == 3:
			try:
				weight = float(tokens[2])
			except ValueError:
				raise EdgeListSyntaxError(f"line {lineno}: weight is not a number: {tokens[2]!r}") from None
			edges.append((tokens[0], tokens[1], weight))
		else:
			raise EdgeListSyntaxError(f"line {lineno}: expected 1 to 3 tokens, got {len(tokens)}")
	return build_graph(edges, vertices=vertices)


def format_edge_list(g: Graph) -> str:
	"""Serialize so that parse_edge_list reproduces the same dense ids."""

	def fmt(w: float) -> str:
		return str(int(w)) if float(w).is_integer() else repr(float(w))

	lines = [f"# n={g.n} m={g.edge_count}"]
	lines.extend(label for label in g.labels)
	lines.extend(f"{g.labels[u]} {g.labels[v]} {fmt(w)}" for u, v, w in g.edges())
	return "\n".join(lines) + "\n"
