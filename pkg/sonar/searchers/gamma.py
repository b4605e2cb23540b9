import math
from typing import Optional

import numpy as np

from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Direction, Found, Oracle
from sonar.core.potentials import CandidateSet, MedianSelector
from sonar.models.search import SearchParams
from sonar.searchers.transcript import Transcript
from sonar.utilities.errors import BudgetExceeded
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, SearcherName


def gamma_search_cap(n: int, epsilon: float) -> int:
	"""ceil(log2 n / (1 - log2(1+eps))) + 1 queries."""
	if n <= 1:
		return 1
	return math.ceil(math.log2(n) / (1 - math.log2(1 + epsilon))) + 1


def gamma_binary_search(
	g: Graph,
	oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[int, Transcript]:
	"""Binary search for a single target by querying (1+eps)-approximate Gamma medians.

	Every Direction(u) answer at v narrows S to S & N(v,u); the search ends
	on the first Found.
	"""
	logger = get_logger("gamma-binary")
	dt = dt if dt is not None else g.distances
	s = CandidateSet.full(g.n)
	selector = MedianSelector(params.median_policy(), rng=np.random.default_rng(params.seed))
	transcript = Transcript(SearcherName.GAMMA_BINARY.value, params.budget)

	while True:
		v = selector.select(g, dt, s)
		transcript.charge()
		response = oracle.direction_query(v)
		transcript.rounds += 1

		if isinstance(response, Found):
			s = CandidateSet.from_vertices(g.n, [v])
			transcript.record(QueryKind.DIRECTION, (v,), response, len(s))
			logger.debug(f"gamma-binary found {v} after {transcript.total} queries")
			return v, transcript.finish([v])

		assert isinstance(response, Direction)
		s.restrict(dt.cone_mask(v, response.vertex))
		transcript.record(QueryKind.DIRECTION, (v,), response, len(s))
		if len(s) == 0:
			raise BudgetExceeded(f"candidate set emptied after {transcript.total} queries; oracle is unsound")
