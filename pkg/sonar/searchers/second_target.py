"""Second-target detection once t1 is known.

All three searchers run the Gamma-median candidate loop over V - {t1}.
A block of answers that contradicts t1 (a neighbor outside E_t1(v), or a
distance other than d(v, t1)) must come from t2 and narrows S
deterministically; otherwise the block is resolved by a majority vote
(direction queries) or by probing each answered branch (direction-distance
and edge-direction queries).
"""

import math
from collections import Counter
from typing import Optional

import numpy as np

from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Direction, DirectionDistance, EdgeAnswer, Found, Oracle, QueryResponse
from sonar.core.potentials import CandidateSet, MedianSelector
from sonar.models.search import SearchParams
from sonar.searchers.transcript import BRANCH, MEDIAN, Transcript, repetition_block
from sonar.utilities.errors import InvalidParameters, NoBranchAccepted
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, SearcherName
from sonar.utilities.vars import DISTANCE_TOLERANCE

# A round whose branches are all rejected is repeated this many times before aborting
BRANCH_RETRIES = 1


def second_target_rounds(n: int, epsilon: float) -> int:
	if n <= 2:
		return 1
	return max(1, math.ceil(math.log2(n) / (1 - math.log2(1 + epsilon))))


def algorithm1_constant(p1: float) -> float:
	"""c = 7 (1+p1)^2 / (p1 (1-p1)^2)"""
	if not 0.5 < p1 < 1:
		raise InvalidParameters(f"algorithm1 needs 1/2 < p1 < 1, got {p1}")
	return 7 * (1 + p1) ** 2 / (p1 * (1 - p1) ** 2)


def algorithm1_block(n: int, p1: float, delta: int, rho: float) -> int:
	"""ceil(rho * c * Delta * log2 n) repetitions per median."""
	if n <= 1:
		return 1
	return max(1, math.ceil(rho * algorithm1_constant(p1) * delta * math.log2(n)))


def algorithm1_cap(n: int, p1: float, delta: int, epsilon: float, rho: float) -> int:
	"""One block per round.

	A block answered entirely by Found(1) (only possible at v = t1, with
	probability p1^block) is repeated as a retry and is not covered here.
	"""
	return algorithm1_block(n, p1, delta, rho) * second_target_rounds(n, epsilon)


def median_query_cap(n: int, epsilon: float, rho: float) -> int:
	"""Vertex-direction (median) queries: one block per round, each round possibly retried."""
	return (BRANCH_RETRIES + 1) * second_target_rounds(n, epsilon) * repetition_block(n, rho)


def branch_query_cap(n: int, epsilon: float, rho: float) -> int:
	"""Secondary queries: one block per distinct median answer."""
	b = repetition_block(n, rho)
	return (BRANCH_RETRIES + 1) * second_target_rounds(n, epsilon) * b * b


def branching_cap(n: int, epsilon: float, rho: float) -> int:
	return median_query_cap(n, epsilon, rho) + branch_query_cap(n, epsilon, rho)


def _start(g: Graph, t1: int, params: SearchParams, name: SearcherName):
	if not 0 <= t1 < g.n:
		raise InvalidParameters(f"t1={t1} is not a vertex")
	s = CandidateSet.full(g.n)
	s.discard(t1)
	selector = MedianSelector(params.median_policy(), rng=np.random.default_rng(params.seed))
	return s, selector, Transcript(name.value, params.budget)


def _narrow(s: CandidateSet, dt: DistanceTable, v: int, u: int) -> None:
	s.restrict(dt.cone_mask(v, u))


def _found_second(responses: list[QueryResponse]) -> bool:
	return any(isinstance(r, Found) and r.target == 2 for r in responses)


def algorithm1_second_target(
	g: Graph,
	t1: int,
	oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[int, Transcript]:
	"""Detect t2 with direction queries only, given t1 and an equiprobable biased oracle."""
	logger = get_logger("algorithm1")
	dt = dt if dt is not None else g.distances
	block = algorithm1_block(g.n, oracle.bias, g.max_degree, params.rho)
	s, selector, transcript = _start(g, t1, params, SearcherName.ALGORITHM1)

	while len(s) > 1:
		v = selector.select(g, dt, s)
		for attempt in range(BRANCH_RETRIES + 1):
			transcript.charge(block)
			responses = oracle.direction_queries(v, block)
			transcript.rounds += 1
			transcript.record_block(QueryKind.DIRECTION, (v,), responses, len(s))
			if _found_second(responses):
				return v, transcript.finish([v])

			directions = [r.vertex for r in responses if isinstance(r, Direction)]
			# only Found(1): v is t1 and t2 never answered
			if not directions:
				logger.warning(f"algorithm1: every answer at {v} was Found(1) (attempt {attempt + 1})")
				continue
			expected = dt.target_edges(v, t1)
			contradicting = sorted({u for u in directions if u not in expected})
			if contradicting:
				u = contradicting[0]
			else:
				counts = Counter(directions)
				top = max(counts.values())
				u = min(x for x, c in counts.items() if c == top)
			_narrow(s, dt, v, u)
			break
		else:
			raise NoBranchAccepted(f"algorithm1: t2 never answered at {v}")

		if len(s) == 0:
			logger.debug(f"algorithm1: candidate set emptied at {v}, returning it as the guess")
			return v, transcript.finish([v])

	guess = s.only() if len(s) == 1 else t1
	return guess, transcript.finish([guess])


def algorithm2_direction_distance(
	g: Graph,
	t1: int,
	oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[int, Transcript]:
	"""Detect t2 with direction-distance queries, given t1."""
	logger = get_logger("algorithm2")
	dt = dt if dt is not None else g.distances
	b = repetition_block(g.n, params.rho)
	s, selector, transcript = _start(g, t1, params, SearcherName.ALGORITHM2)
	kind = QueryKind.DIRECTION_DISTANCE

	while len(s) > 1:
		v = selector.select(g, dt, s)
		for attempt in range(BRANCH_RETRIES + 1):
			transcript.charge(b)
			responses = oracle.direction_distance_queries(v, b)
			transcript.rounds += 1
			transcript.record_block(kind, (v,), responses, len(s), role=MEDIAN)
			if _found_second(responses):
				return v, transcript.finish([v])

			answers = sorted({(r.vertex, r.distance) for r in responses if isinstance(r, DirectionDistance)})
			if not answers:
				logger.warning(f"algorithm2: only Found(1) at {v} (attempt {attempt + 1})")
				continue
			expected = dt.target_edges(v, t1)
			d1 = dt.d(v, t1)
			mismatched = [u for u, ell in answers if u not in expected or abs(ell - d1) > DISTANCE_TOLERANCE]
			if mismatched:
				_narrow(s, dt, v, mismatched[0])
				break

			accepted: Optional[int] = None
			for u, ell in answers:
				transcript.charge(b)
				probes = oracle.direction_distance_queries(u, b)
				transcript.record_block(kind, (u,), probes, len(s), role=BRANCH)
				if _found_second(probes):
					return u, transcript.finish([u])
				shortened = ell - g.weight(v, u)
				if all(
					abs(r.distance - shortened) <= DISTANCE_TOLERANCE for r in probes if isinstance(r, DirectionDistance)
				):
					accepted = u
					break
			if accepted is not None:
				_narrow(s, dt, v, accepted)
				break
			logger.warning(f"algorithm2: no branch accepted at {v} (attempt {attempt + 1})")
		else:
			raise NoBranchAccepted(f"algorithm2: no branch accepted at {v} after {BRANCH_RETRIES + 1} attempts")

		if len(s) == 0:
			return v, transcript.finish([v])

	guess = s.only() if len(s) == 1 else t1
	return guess, transcript.finish([guess])


def algorithm3_vertex_edge(
	g: Graph,
	t1: int,
	dir_oracle: Oracle,
	edge_oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[int, Transcript]:
	"""Detect t2 with vertex-direction and edge-direction queries, given t1."""
	logger = get_logger("algorithm3")
	dt = dt if dt is not None else g.distances
	b = repetition_block(g.n, params.rho)
	s, selector, transcript = _start(g, t1, params, SearcherName.ALGORITHM3)

	while len(s) > 1:
		v = selector.select(g, dt, s)
		for attempt in range(BRANCH_RETRIES + 1):
			transcript.charge(b)
			responses = dir_oracle.direction_queries(v, b)
			transcript.rounds += 1
			transcript.record_block(QueryKind.DIRECTION, (v,), responses, len(s), role=MEDIAN)
			if _found_second(responses):
				return v, transcript.finish([v])

			answers = sorted({r.vertex for r in responses if isinstance(r, Direction)})
			if not answers:
				logger.warning(f"algorithm3: only Found(1) at {v} (attempt {attempt + 1})")
				continue
			expected = dt.target_edges(v, t1)
			contradicting = [u for u in answers if u not in expected]
			if contradicting:
				_narrow(s, dt, v, contradicting[0])
				break

			accepted: Optional[int] = None
			for u in answers:
				transcript.charge(b)
				verdicts = edge_oracle.edge_direction_queries(v, u, b)
				transcript.record_block(QueryKind.EDGE_DIRECTION, (v, u), verdicts, len(s), role=BRANCH)
				if all(isinstance(r, EdgeAnswer) and r.yes for r in verdicts):
					accepted = u
					break
			if accepted is not None:
				_narrow(s, dt, v, accepted)
				break
			logger.warning(f"algorithm3: no branch accepted at {v} (attempt {attempt + 1})")
		else:
			raise NoBranchAccepted(f"algorithm3: no branch accepted at {v} after {BRANCH_RETRIES + 1} attempts")

		if len(s) == 0:
			return v, transcript.finish([v])

	guess = s.only() if len(s) == 1 else t1
	return guess, transcript.finish([guess])
