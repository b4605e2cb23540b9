import math
from collections import Counter
from typing import Optional

import numpy as np

from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Direction, Found, Oracle, QueryResponse
from sonar.core.potentials import CandidateSet, MedianSelector
from sonar.models.search import SearchParams
from sonar.searchers.transcript import Transcript, ceil_log2
from sonar.utilities.errors import InvalidParameters, NotATree
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, SearcherName


def tree_alpha(p1: float) -> float:
	"""-1 / log2(p) for the larger of the two answer probabilities."""
	p = max(p1, 1 - p1)
	if not 0.5 <= p < 1:
		raise InvalidParameters(f"tree search needs two targets with p1 in (0, 1), got {p1}")
	return -1.0 / math.log2(p)


def tree_block(n: int, p1: float, rho: float) -> int:
	return max(1, math.ceil(rho * tree_alpha(p1) * ceil_log2(n)))


def tree_search_cap(n: int, p1: float, rho: float) -> int:
	"""One query, then 2L-1 blocks of m queries (L = ceil(log2 n))."""
	L = ceil_log2(n)
	return 1 + max(0, 2 * L - 1) * tree_block(n, p1, rho)


def _most_frequent(directions: list[int]) -> int:
	counts = Counter(directions)
	top = max(counts.values())
	return min(u for u, c in counts.items() if c == top)


def _toward(g: Graph, dt: DistanceTable, v: int, x: int) -> int:
	"""The neighbor of v on the tree path to x."""
	return min(dt.target_edges(v, x))


def tree_two_target_search(
	g: Graph,
	oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[tuple[int, int], Transcript]:
	"""Find both targets of a biased two-target oracle on a tree.

	Phase 1 anchors at the first median v1 and follows any answer that leads
	away from v1, which can only point at a target inside the current
	subtree; phase 2 repeats from V - {t0}, ignoring answers toward t0.
	"""
	if not g.is_tree:
		raise NotATree(f"graph has {g.edge_count} edges for {g.n} vertices")

	logger = get_logger("tree-two-target")
	dt = dt if dt is not None else g.distances
	L = ceil_log2(g.n)
	m = tree_block(g.n, oracle.bias, params.rho)
	selector = MedianSelector(params.median_policy(), rng=np.random.default_rng(params.seed))
	transcript = Transcript(SearcherName.TREE_TWO_TARGET.value, params.budget)

	def ask(v: int, count: int, phase: int, size: int) -> list[QueryResponse]:
		transcript.charge(count)
		responses = oracle.direction_queries(v, count)
		transcript.record_block(QueryKind.DIRECTION, (v,), responses, size, phase=phase)
		transcript.rounds += 1
		return responses

	def narrow(s: CandidateSet, v: int, u: int) -> None:
		s.restrict(dt.cone_mask(v, u))
		if len(s) == 0:
			s.add(v)

	# Phase 1: find any target
	s = CandidateSet.full(g.n)
	v1: Optional[int] = None
	t0: Optional[int] = None
	for iteration in range(max(L, 1)):
		if len(s) <= 1:
			break
		v = selector.select(g, dt, s)
		responses = ask(v, 1 if iteration == 0 else m, 1, len(s))
		if any(isinstance(r, Found) for r in responses):
			t0 = v
			break
		directions = [r.vertex for r in responses if isinstance(r, Direction)]
		if v1 is None:
			v1 = v
		if v == v1:
			u = _most_frequent(directions)
		else:
			leaving = sorted({u for u in directions if not dt.in_cone(v, u, v1)})
			u = leaving[0] if leaving else _toward(g, dt, v, v1)
		narrow(s, v, u)
	if t0 is None:
		t0 = s.only() if len(s) == 1 else s.members()[0]
	logger.debug(f"tree phase 1 settled on {t0} after {transcript.total} queries")

	# Phase 2: the other target, discounting answers toward t0
	s = CandidateSet.full(g.n)
	s.discard(t0)
	for _ in range(max(L, 1)):
		if len(s) <= 1:
			break
		v = selector.select(g, dt, s)
		responses = ask(v, m, 2, len(s))
		hit = next((r for r in responses if isinstance(r, Found) and v != t0), None)
		if hit is not None:
			return (t0, v), transcript.finish([t0, v])
		directions = [r.vertex for r in responses if isinstance(r, Direction)]
		away = sorted({u for u in directions if not dt.in_cone(v, u, t0)})
		# at t0 every Direction leads away, so this block was all Found(t0); the next
		# round re-asks the same median and the search spends one of its L rounds
		if not away and v == t0:
			continue
		u = away[0] if away else _toward(g, dt, v, t0)
		narrow(s, v, u)

	other = s.members()[0] if len(s) else t0
	return (t0, other), transcript.finish([t0, other])
