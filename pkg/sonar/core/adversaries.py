"""Lower-bound adversary games.

Each game owns a graph and a scripted responder with lazy target placement.
After every answer the game re-checks its consistency certificate: some
placement of the targets must still make every past answer valid. The
first answer that commits a placement is recorded, so `forced_queries`
counts how many queries the adversary survived.
"""

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from sonar.core.generators import cycle_graph, grid_diag_graph, path_graph, star_paths_graph, star_vertex
from sonar.core.graph import DistanceTable, Graph, additive_valid, multiplicative_valid
from sonar.core.oracles import Direction, Found, QueryResponse, TwoDirections
from sonar.core.potentials import (
	CandidateSet,
	select_qualifying,
	star_center_potential,
	star_spoke_potential,
	tree_phi_all,
)
from sonar.models.search import MedianPolicy
from sonar.utilities.errors import InvalidSize
from sonar.utilities.logging import get_logger
from sonar.utilities.types import GameName, MedianRule, Potential, QueryKind


class AdversaryGame(ABC):
	name: GameName
	query_kind: QueryKind = QueryKind.DIRECTION
	target_count: int = 1

	def __init__(self, graph: Graph):
		self.graph = graph
		self.history: list[tuple[int, QueryResponse]] = []
		self.certificates: list[bool] = []
		self.committed: Optional[tuple[int, ...]] = None
		self.committed_at: Optional[int] = None
		self.revealed: list[int] = []

	@property
	def dt(self) -> DistanceTable:
		return self.graph.distances

	@property
	def queries(self) -> int:
		return len(self.history)

	@property
	def certificate_ok(self) -> bool:
		return all(self.certificates)

	@property
	def forced_queries(self) -> int:
		"""Queries answered before any placement was committed."""
		return self.committed_at if self.committed_at is not None else self.queries

	@property
	def finished(self) -> bool:
		return len(self.revealed) >= self.target_count

	def respond(self, v: int) -> QueryResponse:
		if not 0 <= v < self.graph.n:
			raise ValueError(f"{v} is not a vertex")
		response = self._answer(v)
		self.history.append((v, response))
		if isinstance(response, Found) and v not in self.revealed:
			self.revealed.append(v)
		self.certificates.append(self.certificate())
		return response

	def direction_query(self, v: int) -> QueryResponse:
		return self.respond(v)

	def _commit(self, targets: tuple[int, ...]) -> None:
		if self.committed is None:
			self.committed = targets
			self.committed_at = self.queries
			get_logger("adversaries").debug(f"{self.name.value}: placement committed after {self.queries} queries")

	@abstractmethod
	def _answer(self, v: int) -> QueryResponse: ...

	@abstractmethod
	def certificate(self) -> bool:
		"""True while some target placement is consistent with every answer so far."""

	@abstractmethod
	def bound(self) -> int:
		"""Queries the construction claims any searcher must spend."""

	@abstractmethod
	def placements(self) -> int:
		"""Number of target placements still consistent with the history."""


class GridAdditiveGame(AdversaryGame):
	"""Query at a vertex is answered with the vertex opposite it in its column.

	That answer is 1-additive valid for every target other than the queried
	vertex, so the target hides at any unqueried vertex until only one is left.
	"""

	name = GameName.GRID_ADDITIVE

	def __init__(self, n: int):
		if n < 4 or n % 2:
			raise InvalidSize(f"grid-additive needs an even n >= 4, got {n}")
		super().__init__(grid_diag_graph(n))
		self.n = n
		self.half = n // 2
		self.consistent = np.ones(n, dtype=bool)
		self.additive = 1.0

	def opposite(self, v: int) -> int:
		return v + self.half if v < self.half else v - self.half

	def _answer(self, v: int) -> QueryResponse:
		if self.committed is not None:
			return Found(1) if v == self.committed[0] else Direction(min(self.dt.target_edges(v, self.committed[0])))
		if self.consistent[v] and np.count_nonzero(self.consistent) == 1:
			self._commit((v,))
			return Found(1)
		self.consistent[v] = False
		return Direction(self.opposite(v))

	def placements(self) -> int:
		return 1 if self.committed is not None else int(np.count_nonzero(self.consistent))

	def certificate(self) -> bool:
		live = self.consistent.copy()
		if self.committed is not None:
			live[:] = False
			live[self.committed[0]] = True
		if not live.any():
			return False
		pending = [(v, r.vertex) for v, r in self.history if isinstance(r, Direction)]
		if self.committed is not None:
			pending = pending[: self.committed_at]
		return all(additive_valid(self.dt, v, u, live, self.additive) for v, u in pending)

	def bound(self) -> int:
		return self.n - 1


class MarkingGame(AdversaryGame):
	"""Multiplicative adversary on the diagonal grid.

	A query at column i marks every column j with |j - i| < 1/eps and is
	answered with the opposite vertex while unmarked columns remain. The
	target is placed among the columns marked last.
	"""

	name = GameName.MUL_MARKING

	def __init__(self, n: int, epsilon: float):
		if n < 4 or n % 2:
			raise InvalidSize(f"mul-marking needs an even n >= 4, got {n}")
		if not 0 < epsilon <= 2:
			raise InvalidSize(f"mul-marking needs 0 < eps <= 2, got {epsilon}")
		super().__init__(grid_diag_graph(n))
		self.n = n
		self.half = n // 2
		self.epsilon = epsilon
		self.marked = np.zeros(self.half, dtype=bool)
		self.new_columns: list[int] = []
		self.pre_placement: list[tuple[int, int]] = []

	@property
	def window_limit(self) -> int:
		"""Most columns a single query can mark.

		The window is every column within distance < 1/eps, so 2*ceil(1/eps) - 1
		columns. For non-integral 1/eps this can exceed 2/eps (eps = 1/2.1
		gives 5 > 4.2); the certificate checks against this exact count.
		"""
		return 2 * math.ceil(1 / self.epsilon) - 1

	def column(self, v: int) -> int:
		return v % self.half

	def opposite(self, v: int) -> int:
		return v + self.half if v < self.half else v - self.half

	def _window(self, i: int) -> np.ndarray:
		cols = np.arange(self.half)
		return np.abs(cols - i) < 1 / self.epsilon

	def _truthful(self, v: int) -> QueryResponse:
		assert self.committed is not None
		t = self.committed[0]
		return Found(1) if v == t else Direction(min(self.dt.target_edges(v, t)))

	def _answer(self, v: int) -> QueryResponse:
		if self.committed is not None:
			self.new_columns.append(0)
			return self._truthful(v)
		fresh = self._window(self.column(v)) & ~self.marked
		self.new_columns.append(int(np.count_nonzero(fresh)))
		self.marked |= fresh
		if not self.marked.all():
			u = self.opposite(v)
			self.pre_placement.append((v, u))
			return Direction(u)
		columns = np.flatnonzero(fresh)
		spots = sorted([int(c) for c in columns] + [int(c) + self.half for c in columns])
		others = [x for x in spots if x != v]
		self._commit(((others or spots)[0],))
		return self._truthful(v)

	def unmarked_vertices(self) -> np.ndarray:
		cols = np.flatnonzero(~self.marked)
		return np.concatenate([cols, cols + self.half])

	def placements(self) -> int:
		return 1 if self.committed is not None else 2 * int(np.count_nonzero(~self.marked))

	def certificate(self) -> bool:
		if self.new_columns and self.new_columns[-1] > self.window_limit:
			return False
		live = list(self.committed) if self.committed is not None else [int(x) for x in self.unmarked_vertices()]
		if not live:
			return False
		targets = np.array(live, dtype=np.int64)
		return all(multiplicative_valid(self.dt, v, u, targets, self.epsilon) for v, u in self.pre_placement)

	def bound(self) -> int:
		return math.ceil(self.n * self.epsilon / 4)


class PhiTrapGame(AdversaryGame):
	"""Star of sqrt(n) spokes with the target fixed at the center.

	The scripted Phi searcher queries the first vertex of each spoke in
	turn; each is a (1+eps)-approximate Phi median of the current candidate
	set, so the searcher is forced through all sqrt(n) spokes.
	"""

	name = GameName.PHI_TRAP

	def __init__(self, n: int, epsilon: float):
		r = math.isqrt(n)
		if n < 4 or r * r != n:
			raise InvalidSize(f"phi-trap needs a perfect square n >= 4, got {n}")
		super().__init__(star_paths_graph(n))
		self.n = n
		self.r = r
		self.epsilon = epsilon
		self.target = 0
		self.candidates = CandidateSet.full(n + 1)
		self.center_potentials: list[float] = []
		self.spoke_potentials: list[float] = []
		self.committed = (0,)

	@property
	def script(self) -> list[int]:
		return [star_vertex(self.r, p, 1) for p in range(1, self.r + 1)]

	def policy(self) -> MedianPolicy:
		return MedianPolicy(potential=Potential.PHI, epsilon=self.epsilon, rule=MedianRule.SCRIPTED, script=self.script)

	def spoke_of(self, v: int) -> tuple[int, int]:
		"""(spoke, position) of a non-center vertex, both 1-based."""
		return (v - 1) // self.r + 1, (v - 1) % self.r + 1

	def _answer(self, v: int) -> QueryResponse:
		if v == self.target:
			return Found(1)
		p, j = self.spoke_of(v)
		return Direction(star_vertex(self.r, p, j - 1))

	def cone_toward_center(self, v: int) -> np.ndarray:
		"""N(v, parent) on the star: everything except the part of v's spoke at or beyond v."""
		p, j = self.spoke_of(v)
		mask = np.ones(self.n + 1, dtype=bool)
		mask[star_vertex(self.r, p, j) : star_vertex(self.r, p, self.r) + 1] = False
		return mask

	def play_script(self) -> int:
		"""Run the scripted Phi searcher; returns the number of forced queries.

		Raises ScriptViolation as soon as a scripted vertex fails to qualify.
		"""
		policy = self.policy()
		for k, v in enumerate(self.script):
			values = tree_phi_all(self.graph, self.candidates)
			select_qualifying(values, policy, step=k)
			self.center_potentials.append(float(values[self.target]))
			self.spoke_potentials.append(float(values[v]))
			response = self.respond(v)
			assert isinstance(response, Direction)
			self.candidates.restrict(self.cone_toward_center(v))
			self.candidates.add(v)
		return self.queries

	def placements(self) -> int:
		return 1

	def certificate(self) -> bool:
		if not self.candidates.mask[self.target]:
			return False
		# step k was scored on the k-pruned star; both potentials must match the closed forms
		if self.center_potentials:
			k = len(self.center_potentials) - 1
			if self.center_potentials[k] != star_center_potential(self.n, k):
				return False
			if self.spoke_potentials[k] != star_spoke_potential(self.n, k):
				return False
		for v, response in self.history:
			if isinstance(response, Direction) and not self.cone_toward_center(v)[self.target]:
				return False
		return True

	def bound(self) -> int:
		return self.r


class CycleAntipodalGame(AdversaryGame):
	"""Unbiased cycle adversary hiding c antipodal target pairs.

	From any vertex outside a pair, the two members of an antipodal pair lie
	one on each side, so a fair coin between the two neighbors is truthful
	for every placement that avoids the queried vertices.
	"""

	name = GameName.CYCLE_ANTIPODAL

	def __init__(self, n: int, pairs: int = 1, seed: int = 0):
		if n < 4 or n % 2:
			raise InvalidSize(f"cycle games need an even n >= 4, got {n}")
		if pairs < 1 or 2 * pairs > n // 2:
			raise InvalidSize(f"need 1 <= c and 2c <= n/2, got c={pairs}, n={n}")
		super().__init__(cycle_graph(n))
		self.n = n
		self.half = n // 2
		self.pairs = pairs
		self.target_count = 1
		self.rng = np.random.default_rng(seed)
		self.free = np.ones(self.half, dtype=bool)

	def pair_of(self, v: int) -> int:
		return v % self.half

	def _step(self, v: int, sign: int) -> int:
		return (v + sign) % self.n

	def _coin(self, v: int) -> QueryResponse:
		return Direction(self._step(v, 1 if self.rng.random() < 0.5 else -1))

	def _after_commit(self, v: int) -> QueryResponse:
		assert self.committed is not None
		if v in self.committed:
			return Found(self.committed.index(v) + 1)
		t = self.committed[int(self.rng.integers(len(self.committed)))]
		options = sorted(self.dt.target_edges(v, t))
		return Direction(options[int(self.rng.integers(len(options)))])

	def _answer(self, v: int) -> QueryResponse:
		if self.committed is not None:
			return self._after_commit(v)
		was_free = bool(self.free[self.pair_of(v)])
		self.free[self.pair_of(v)] = False
		remaining = int(np.count_nonzero(self.free))
		if remaining >= self.pairs or not was_free:
			return self._coin(v)
		chosen = [int(x) for x in np.flatnonzero(self.free)][: self.pairs - 1]
		targets = [v, (v + self.half) % self.n]
		for x in chosen:
			targets.extend([x, x + self.half])
		self._commit(tuple(targets))
		return Found(1)

	def placements(self) -> int:
		if self.committed is not None:
			return 1
		return math.comb(int(np.count_nonzero(self.free)), self.pairs)

	def certificate(self) -> bool:
		if self.committed is None:
			free = int(np.count_nonzero(self.free))
			if free < self.pairs:
				return False
			distinct = len({v for v, _ in self.history})
			if distinct <= self.half - self.pairs - 1 and free < self.pairs + 1:
				return False
			return True
		queried_before = {v for v, _ in self.history[: self.committed_at]}
		return not queried_before.intersection(self.committed)

	def bound(self) -> int:
		return self.half - self.pairs


class CycleTwoDirectionGame(CycleAntipodalGame):
	"""Two-direction queries on a cycle: every answer is {v-1, v+1}."""

	name = GameName.CYCLE_TWODIR
	query_kind = QueryKind.TWO_DIRECTION

	def __init__(self, n: int, seed: int = 0):
		super().__init__(n, pairs=1, seed=seed)

	def _coin(self, v: int) -> QueryResponse:
		return TwoDirections.of(self._step(v, -1), self._step(v, 1))

	def _after_commit(self, v: int) -> QueryResponse:
		assert self.committed is not None
		if v in self.committed:
			return Found(self.committed.index(v) + 1)
		first = min(self.dt.target_edges(v, self.committed[0]))
		second = min(self.dt.target_edges(v, self.committed[1]))
		return TwoDirections.of(first, second)

	def two_direction_query(self, v: int) -> QueryResponse:
		return self.respond(v)


class PathTwoTargetGame(AdversaryGame):
	"""Two targets on a path, one per half; every answer points at the other half."""

	name = GameName.PATH_TWO_TARGET
	target_count = 2

	def __init__(self, n: int):
		if n < 4:
			raise InvalidSize(f"path-two-target needs n >= 4, got {n}")
		super().__init__(path_graph(n))
		self.n = n
		self.split = n // 2
		self.unqueried = np.ones(n, dtype=bool)
		self.placed: dict[int, int] = {}

	def half_of(self, v: int) -> int:
		return 1 if v < self.split else 2

	def _half_mask(self, half: int) -> np.ndarray:
		mask = np.zeros(self.n, dtype=bool)
		if half == 1:
			mask[: self.split] = True
		else:
			mask[self.split :] = True
		return mask

	def _answer(self, v: int) -> QueryResponse:
		half = self.half_of(v)
		if self.placed.get(half) == v:
			return Found(half)
		if half not in self.placed:
			left = self.unqueried & self._half_mask(half)
			if left[v] and np.count_nonzero(left) == 1:
				self.placed[half] = v
				if self.committed_at is None:
					self.committed_at = self.queries
				if len(self.placed) == 2:
					self.committed = (self.placed[1], self.placed[2])
				return Found(half)
		self.unqueried[v] = False
		return Direction(v + 1 if half == 1 else v - 1)

	@property
	def forced_queries(self) -> int:
		"""Queries answered before the second target was revealed."""
		return self.queries - 1 if self.finished else self.queries

	def _options(self, half: int) -> np.ndarray:
		if half in self.placed:
			mask = np.zeros(self.n, dtype=bool)
			mask[self.placed[half]] = True
			return mask
		return self.unqueried & self._half_mask(half)

	def placements(self) -> int:
		return int(np.count_nonzero(self._options(1))) * int(np.count_nonzero(self._options(2)))

	def certificate(self) -> bool:
		left, right = self._options(1), self._options(2)
		if not left.any() or not right.any():
			return False
		# every answer points from its half toward the other half, so any left/right pair is consistent
		for v, response in self.history:
			if isinstance(response, Direction):
				toward_right = response.vertex > v
				if toward_right and not right[v + 1 :].any():
					return False
				if not toward_right and not left[:v].any():
					return False
		return True

	def bound(self) -> int:
		return self.n - 2


def build_game(name: GameName, n: int, epsilon: float = 0.5, pairs: int = 1, seed: int = 0) -> AdversaryGame:
	if name == GameName.GRID_ADDITIVE:
		return GridAdditiveGame(n)
	if name == GameName.MUL_MARKING:
		return MarkingGame(n, epsilon)
	if name == GameName.PHI_TRAP:
		return PhiTrapGame(n, epsilon)
	if name == GameName.CYCLE_ANTIPODAL:
		return CycleAntipodalGame(n, pairs=pairs, seed=seed)
	if name == GameName.CYCLE_TWODIR:
		return CycleTwoDirectionGame(n, seed=seed)
	if name == GameName.PATH_TWO_TARGET:
		return PathTwoTargetGame(n)
	raise InvalidSize(f"unknown game {name}")


grid_additive_game = GridAdditiveGame
multiplicative_marking_game = MarkingGame
phi_trap_game = PhiTrapGame
cycle_antipodal_game = CycleAntipodalGame
cycle_two_direction_game = CycleTwoDirectionGame
path_two_target_consistency = PathTwoTargetGame
