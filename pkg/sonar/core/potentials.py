import math
from collections.abc import Iterable
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import breadth_first_order

from sonar.core.generators import star_vertex
from sonar.core.graph import DistanceTable, Graph
from sonar.models.search import MedianPolicy
from sonar.utilities.errors import NotATree, ScriptViolation
from sonar.utilities.types import MedianRule, Potential

QUALIFY_TOLERANCE = 1e-9


class CandidateSet:
	"""Boolean membership mask over vertex ids with a cached cardinality.

	Mutated in place only by the search loop that owns it.
	"""

	def __init__(self, mask: np.ndarray):
		self.mask = np.array(mask, dtype=bool, copy=True)
		self._count = int(np.count_nonzero(self.mask))

	@classmethod
	def full(cls, n: int) -> "CandidateSet":
		return cls(np.ones(n, dtype=bool))

	@classmethod
	def from_vertices(cls, n: int, vertices: Iterable[int]) -> "CandidateSet":
		mask = np.zeros(n, dtype=bool)
		mask[list(vertices)] = True
		return cls(mask)

	def restrict(self, keep: np.ndarray) -> None:
		np.logical_and(self.mask, keep, out=self.mask)
		self._count = int(np.count_nonzero(self.mask))

	def discard(self, v: int) -> None:
		if self.mask[v]:
			self.mask[v] = False
			self._count -= 1

	def add(self, v: int) -> None:
		if not self.mask[v]:
			self.mask[v] = True
			self._count += 1

	def copy(self) -> "CandidateSet":
		return CandidateSet(self.mask)

	def members(self) -> list[int]:
		return [int(x) for x in np.flatnonzero(self.mask)]

	def only(self) -> Optional[int]:
		"""The single member, or None unless exactly one remains."""
		if self._count != 1:
			return None
		return int(np.flatnonzero(self.mask)[0])

	def __len__(self) -> int:
		return self._count

	def __contains__(self, v: object) -> bool:
		return isinstance(v, (int, np.integer)) and bool(self.mask[int(v)])

	def __repr__(self) -> str:
		return f"CandidateSet(size={self._count})"


# Vectorised evaluation at every vertex


def phi_all(dt: DistanceTable, s: CandidateSet) -> np.ndarray:
	return dt.matrix[:, s.mask].sum(axis=1)


def gamma_all(g: Graph, dt: DistanceTable, s: CandidateSet) -> np.ndarray:
	values = np.zeros(g.n, dtype=np.int64)
	if g.n == 1:
		return values
	counts = np.count_nonzero(dt.cone_matrix[:, s.mask], axis=1)
	np.maximum.at(values, dt.cone_owner, counts)
	return values


def weighted_gamma_all(g: Graph, dt: DistanceTable, weights: np.ndarray) -> np.ndarray:
	values = np.zeros(g.n, dtype=float)
	if g.n == 1:
		return values
	masses = dt.cone_matrix @ weights
	np.maximum.at(values, dt.cone_owner, masses)
	return values


def tree_phi_all(g: Graph, s: CandidateSet) -> np.ndarray:
	"""Phi_S at every vertex of a tree in linear time, without a distance table."""
	if not g.is_tree:
		raise NotATree(f"graph has {g.edge_count} edges for {g.n} vertices")
	if g.n == 1:
		return np.zeros(1)
	order, parent = breadth_first_order(g.sparse, 0, directed=False, return_predecessors=True)
	up = np.zeros(g.n)
	for v in order[1:]:
		up[v] = g.weight(int(v), int(parent[v]))

	count = s.mask.astype(np.int64)
	below = np.zeros(g.n)
	for v in order[:0:-1]:
		p = parent[v]
		count[p] += count[v]
		below[p] += below[v] + up[v] * count[v]

	total = count[order[0]]
	values = np.empty(g.n)
	values[order[0]] = below[order[0]]
	for v in order[1:]:
		values[v] = values[parent[v]] + up[v] * (total - 2 * count[v])
	return values


def potential_all(potential: Potential, g: Graph, dt: DistanceTable, s: CandidateSet) -> np.ndarray:
	if potential == Potential.PHI:
		return phi_all(dt, s)
	return gamma_all(g, dt, s)


# Scalar forms


def phi(dt: DistanceTable, s: CandidateSet, v: int) -> float:
	return float(dt.matrix[v, s.mask].sum())


def gamma(g: Graph, dt: DistanceTable, s: CandidateSet, v: int) -> int:
	if g.degree(v) == 0:
		return 0
	rows = dt.cone_rows(v)
	return int(np.count_nonzero(dt.cone_matrix[rows][:, s.mask], axis=1).max())


def weighted_gamma(g: Graph, dt: DistanceTable, weights: np.ndarray, v: int) -> float:
	if g.degree(v) == 0:
		return 0.0
	rows = dt.cone_rows(v)
	return float((dt.cone_matrix[rows] @ weights).max())


# Medians


def exact_median(potential: Potential, g: Graph, dt: DistanceTable, s: CandidateSet) -> int:
	"""Vertex of V minimising the potential over S; smallest id on ties."""
	return int(np.argmin(potential_all(potential, g, dt, s)))


def weighted_gamma_median(g: Graph, dt: DistanceTable, weights: np.ndarray) -> int:
	return int(np.argmin(weighted_gamma_all(g, dt, weights)))


def qualifying_mask(values: np.ndarray, epsilon: float, allowed: Optional[np.ndarray] = None) -> np.ndarray:
	"""Vertices whose potential is within (1+epsilon) of the minimum.

	With `allowed`, both the minimum and the qualifiers range over that mask only.
	"""
	if allowed is None:
		floor = values.min()
		return values <= (1 + epsilon) * floor + QUALIFY_TOLERANCE
	floor = values[allowed].min()
	return allowed & (values <= (1 + epsilon) * floor + QUALIFY_TOLERANCE)


def select_qualifying(
	values: np.ndarray,
	policy: MedianPolicy,
	rng: Optional[np.random.Generator] = None,
	step: int = 0,
	allowed: Optional[np.ndarray] = None,
) -> int:
	qualifies = qualifying_mask(values, policy.epsilon, allowed)
	candidates = np.flatnonzero(qualifies)
	rule = policy.rule

	if rule == MedianRule.SCRIPTED and step < len(policy.script):
		vertex = policy.script[step]
		if not 0 <= vertex < len(values) or not qualifies[vertex]:
			raise ScriptViolation(
				f"scripted vertex {vertex} does not qualify at step {step} (epsilon={policy.epsilon})",
				vertex=vertex,
				step=step,
			)
		return int(vertex)
	if rule == MedianRule.WORST_QUALIFYING:
		return int(candidates[np.argmax(values[candidates])])
	if rule == MedianRule.RANDOM_QUALIFYING:
		chooser = rng if rng is not None else np.random.default_rng(step)
		return int(chooser.choice(candidates))
	# best, and scripted once the script has run out
	return int(candidates[np.argmin(values[candidates])])


def approx_median(
	policy: MedianPolicy,
	g: Graph,
	dt: DistanceTable,
	s: CandidateSet,
	rng: Optional[np.random.Generator] = None,
	step: int = 0,
) -> int:
	"""A vertex x with potential(x) <= (1+eps) * min potential, chosen by the policy rule."""
	values = potential_all(policy.potential, g, dt, s)
	return select_qualifying(values, policy, rng=rng, step=step)


class MedianSelector:
	"""Stateful median picker owned by one search loop.

	Advances the script cursor for scripted policies and owns the stream
	used by random-qualifying.
	"""

	def __init__(self, policy: MedianPolicy, rng: Optional[np.random.Generator] = None):
		self.policy = policy
		self.rng = rng if rng is not None else np.random.default_rng(0)
		self.step = 0

	def select(self, g: Graph, dt: DistanceTable, s: CandidateSet) -> int:
		vertex = approx_median(self.policy, g, dt, s, rng=self.rng, step=self.step)
		self.step += 1
		return vertex


# Star-of-paths closed forms (r = sqrt(n) spokes of r vertices each)


def _spokes(n: int) -> int:
	r = math.isqrt(n)
	if r * r != n or r < 1:
		raise ValueError(f"n must be a perfect square, got {n}")
	return r


def star_center_potential(n: int, k: int) -> int:
	"""Phi over the k-pruned candidate set at the center."""
	r = _spokes(n)
	return k + (r - k) * r * (r + 1) // 2


def star_spoke_potential(n: int, k: int) -> int:
	"""Phi over the k-pruned candidate set at the first vertex of an unpruned spoke."""
	r = _spokes(n)
	return 2 * k + r * (r - 1) // 2 + 1 + (r - k - 1) * r * (r + 3) // 2


def pruned_star_set(n: int, k: int) -> CandidateSet:
	"""Center, first vertex of spokes 1..k, and all of spokes k+1..r."""
	r = _spokes(n)
	if not 0 <= k <= r:
		raise ValueError(f"k must be in [0, {r}]")
	members = [0]
	members.extend(star_vertex(r, p, 1) for p in range(1, k + 1))
	members.extend(star_vertex(r, p, j) for p in range(k + 1, r + 1) for j in range(1, r + 1))
	return CandidateSet.from_vertices(n + 1, members)
