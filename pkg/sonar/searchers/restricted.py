from typing import Optional

from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Direction, Found, RestrictedSetOracle
from sonar.core.potentials import CandidateSet, MedianSelector
from sonar.models.search import SearchParams
from sonar.searchers.transcript import Transcript, ceil_log2
from sonar.utilities.errors import BudgetExceeded
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, SearcherName


def restricted_search_cap(n: int, target_count: int) -> int:
	return target_count * (ceil_log2(n) + 1)


def restricted_set_search(
	g: Graph,
	oracle: RestrictedSetOracle,
	target_count: int,
	params: Optional[SearchParams] = None,
	dt: Optional[DistanceTable] = None,
) -> tuple[list[int], Transcript]:
	"""Find every target with (v, S) queries, one Gamma binary search per target.

	Each inner search starts from V minus the targets already found, so the
	remaining targets always lie in S and the search never loses them.
	"""
	logger = get_logger("restricted-set")
	params = params if params is not None else SearchParams()
	dt = dt if dt is not None else g.distances
	selector = MedianSelector(params.median_policy())
	transcript = Transcript(SearcherName.RESTRICTED_SET.value, params.budget)
	found: list[int] = []

	for round_index in range(target_count):
		s = CandidateSet.full(g.n)
		for t in found:
			s.discard(t)
		while True:
			v = selector.select(g, dt, s)
			transcript.charge()
			response = oracle.restricted_set_query(v, s.mask)
			transcript.rounds += 1
			if isinstance(response, Found):
				found.append(v)
				transcript.record(
					QueryKind.RESTRICTED_SET, (v,), response, 1, phase=round_index + 1, set_size=len(s)
				)
				break
			assert isinstance(response, Direction)
			size = len(s)
			s.restrict(dt.cone_mask(v, response.vertex))
			transcript.record(
				QueryKind.RESTRICTED_SET, (v,), response, len(s), phase=round_index + 1, set_size=size
			)
			if len(s) == 0:
				raise BudgetExceeded(f"restricted-set: candidate set emptied after {transcript.total} queries")
		logger.debug(f"restricted-set: target {round_index + 1} of {target_count} at {found[-1]}")

	return found, transcript.finish(found)
