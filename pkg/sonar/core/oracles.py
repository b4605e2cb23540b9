from collections import Counter
from dataclasses import dataclass
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import Field, TypeAdapter

from sonar.core.graph import DistanceTable, Graph
from sonar.models.oracle import OracleConfig
from sonar.utilities.errors import InvalidNoise, NotAdjacent
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, TiePolicy


@dataclass(frozen=True, slots=True)
class Found:
	target: int  # 1-based index into the oracle's targets
	type: Literal["found"] = "found"


@dataclass(frozen=True, slots=True)
class Direction:
	vertex: int
	type: Literal["direction"] = "direction"


@dataclass(frozen=True, slots=True)
class DirectionDistance:
	vertex: int
	distance: float
	type: Literal["direction-distance"] = "direction-distance"


@dataclass(frozen=True, slots=True)
class EdgeAnswer:
	yes: bool
	type: Literal["edge"] = "edge"


@dataclass(frozen=True, slots=True)
class TwoDirections:
	first: int
	second: int
	type: Literal["two-directions"] = "two-directions"

	@classmethod
	def of(cls, a: int, b: int) -> "TwoDirections":
		return cls(min(a, b), max(a, b))

	@property
	def pair(self) -> tuple[int, int]:
		return (self.first, self.second)


QueryResponse = Union[Found, Direction, DirectionDistance, EdgeAnswer, TwoDirections]

RESPONSE_ADAPTER: TypeAdapter[QueryResponse] = TypeAdapter(
	Annotated[QueryResponse, Field(discriminator="type")]  # type: ignore[arg-type]
)


def response_to_dict(response: QueryResponse) -> dict:
	return RESPONSE_ADAPTER.dump_python(response, mode="json")


def response_from_dict(data: dict) -> QueryResponse:
	return RESPONSE_ADAPTER.validate_python(data)


class Oracle:
	"""Probabilistic truthful oracle over one or more targets.

	Every query samples target i with probability p_i. Batch methods draw
	`count` independent answers at once; `invocations` advances by the
	number of answers produced. `last_sampled` holds the 0-based target
	indices behind the most recent call, for soundness instrumentation.
	"""

	def __init__(self, graph: Graph, dt: DistanceTable, config: OracleConfig):
		for t in config.targets:
			if t >= graph.n:
				raise ValueError(f"target {t} is not a vertex of a graph with {graph.n} vertices")
		self.graph = graph
		self.dt = dt
		self.config = config
		self.targets: tuple[int, ...] = tuple(config.targets)
		self.probabilities = np.asarray(config.probabilities, dtype=float)
		self.tie_policy = config.tie_policy
		self.rng = np.random.default_rng(config.seed)
		self.invocations = 0
		self.by_kind: Counter[str] = Counter()
		self.last_sampled: list[int] = []
		self._edges_cache: dict[tuple[int, int], np.ndarray] = {}

	@property
	def bias(self) -> float:
		return float(self.probabilities[0])

	def _count(self, kind: QueryKind, count: int) -> None:
		self.invocations += count
		self.by_kind[kind.value] += count

	def _options(self, v: int, i: int) -> np.ndarray:
		key = (v, i)
		cached = self._edges_cache.get(key)
		if cached is None:
			cached = np.array(sorted(self.dt.target_edges(v, self.targets[i])), dtype=np.int64)
			self._edges_cache[key] = cached
		return cached

	def _sample_targets(self, count: int) -> np.ndarray:
		if len(self.targets) == 1:
			sampled = np.zeros(count, dtype=np.int64)
		else:
			sampled = self.rng.choice(len(self.targets), size=count, p=self.probabilities)
		self.last_sampled = [int(i) for i in sampled]
		return sampled

	def _pick(self, options: np.ndarray, draws: np.ndarray) -> np.ndarray:
		if self.tie_policy == TiePolicy.ADVERSARIAL:
			return np.full(draws.shape, options[0], dtype=np.int64)
		return options[(draws * len(options)).astype(np.int64)]

	def _directions(self, v: int, count: int) -> list[tuple[int, Optional[int]]]:
		"""(target index, neighbor or None for Found) per sampled answer."""
		sampled = self._sample_targets(count)
		draws = self.rng.random(count)
		answers: list[tuple[int, Optional[int]]] = []
		for i in np.unique(sampled):
			idx = np.flatnonzero(sampled == i)
			if self.targets[i] == v:
				answers.extend((int(k), None) for k in idx)
				continue
			picks = self._pick(self._options(v, int(i)), draws[idx])
			answers.extend((int(k), int(u)) for k, u in zip(idx, picks))
		answers.sort()
		return [(int(sampled[k]), u) for k, u in answers]

	def direction_queries(self, v: int, count: int) -> list[QueryResponse]:
		self._count(QueryKind.DIRECTION, count)
		return [Found(i + 1) if u is None else Direction(u) for i, u in self._directions(v, count)]

	def direction_query(self, v: int) -> QueryResponse:
		return self.direction_queries(v, 1)[0]

	def direction_distance_queries(self, v: int, count: int) -> list[QueryResponse]:
		self._count(QueryKind.DIRECTION_DISTANCE, count)
		row = self.dt.matrix[v]
		return [
			Found(i + 1) if u is None else DirectionDistance(u, float(row[self.targets[i]]))
			for i, u in self._directions(v, count)
		]

	def direction_distance_query(self, v: int) -> QueryResponse:
		return self.direction_distance_queries(v, 1)[0]

	def edge_direction_queries(self, v: int, u: int, count: int) -> list[QueryResponse]:
		if not self.graph.has_edge(v, u):
			raise NotAdjacent(f"{self.graph.labels[u]} is not adjacent to {self.graph.labels[v]}")
		self._count(QueryKind.EDGE_DIRECTION, count)
		mask = self.dt.cone_mask(v, u)
		sampled = self._sample_targets(count)
		return [EdgeAnswer(bool(mask[self.targets[i]])) for i in sampled]

	def edge_direction_query(self, v: int, u: int) -> QueryResponse:
		return self.edge_direction_queries(v, u, 1)[0]

	def two_direction_query(self, v: int) -> QueryResponse:
		"""Unordered pair {u, u'} with u in E_t1(v) and u' in E_t2(v); Found at a target."""
		self._count(QueryKind.TWO_DIRECTION, 1)
		self.last_sampled = [0, 1]
		for i, t in enumerate(self.targets):
			if t == v:
				self.last_sampled = [i]
				return Found(i + 1)
		draws = self.rng.random(2)
		first = int(self._pick(self._options(v, 0), draws[:1])[0])
		second = int(self._pick(self._options(v, 1), draws[1:])[0])
		return TwoDirections.of(first, second)


class NoisyOracle:
	"""Single-target oracle that answers correctly with probability p.

	With probability 1-p it returns an adversarially chosen neighbor: the
	one whose cone keeps the most of the registered belief set, or else the
	smallest id outside E_t(v), or else the smallest id overall.
	"""

	def __init__(self, graph: Graph, dt: DistanceTable, p: float, target: int, seed: int = 0):
		if not 0.5 < p <= 1:
			raise InvalidNoise(f"noise parameter p must lie in (1/2, 1], got {p}")
		self.graph = graph
		self.dt = dt
		self.p = p
		self.target = target
		self.rng = np.random.default_rng(seed)
		self.invocations = 0
		self.by_kind: Counter[str] = Counter()
		self.belief: Optional[np.ndarray] = None
		self.last_truthful: Optional[bool] = None

	def register_belief(self, mask: Optional[np.ndarray]) -> None:
		self.belief = None if mask is None else np.asarray(mask, dtype=bool)

	def _noise(self, v: int) -> int:
		neighbors = sorted(self.graph.neighbors(v))
		if self.belief is not None:
			sizes = [int(np.count_nonzero(self.dt.cone_mask(v, u) & self.belief)) for u in neighbors]
			return neighbors[int(np.argmax(sizes))]
		correct = self.dt.target_edges(v, self.target)
		wrong = [u for u in neighbors if u not in correct]
		return wrong[0] if wrong else neighbors[0]

	def noisy_single_query(self, v: int) -> QueryResponse:
		self.invocations += 1
		self.by_kind[QueryKind.DIRECTION.value] += 1
		truthful = bool(self.rng.random() < self.p)
		self.last_truthful = truthful
		if truthful or self.graph.degree(v) == 0:
			if v == self.target:
				return Found(1)
			return Direction(min(self.dt.target_edges(v, self.target)))
		return Direction(self._noise(v))

	def direction_query(self, v: int) -> QueryResponse:
		return self.noisy_single_query(v)


class RestrictedSetOracle:
	"""Answers (v, S) queries about targets inside S, with adversarial smallest-id choices."""

	def __init__(self, graph: Graph, dt: DistanceTable, targets: list[int]):
		if len(set(targets)) != len(targets) or not targets:
			raise ValueError("restricted-set targets must be a non-empty list of distinct vertices")
		self.graph = graph
		self.dt = dt
		self.targets: tuple[int, ...] = tuple(targets)
		self.invocations = 0
		self.by_kind: Counter[str] = Counter()

	def restricted_set_query(self, v: int, s: np.ndarray) -> QueryResponse:
		self.invocations += 1
		self.by_kind[QueryKind.RESTRICTED_SET.value] += 1
		inside = [t for t in self.targets if s[t]]
		if v in inside:
			return Found(self.targets.index(v) + 1)
		neighbors = sorted(self.graph.neighbors(v))
		if not inside:
			get_logger("oracles").debug(f"restricted-set query at {v}: no target in S, answering noise")
			return Direction(neighbors[0])
		for u in neighbors:
			mask = self.dt.cone_mask(v, u)
			if any(mask[t] for t in inside):
				return Direction(u)
		raise AssertionError("cones of v cover V \\ {v}")
