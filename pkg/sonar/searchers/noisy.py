from typing import Optional

import numpy as np

from sonar.core.graph import DistanceTable, Graph
from sonar.core.oracles import Direction, Found, Oracle
from sonar.core.potentials import weighted_gamma_median
from sonar.models.search import SearchParams
from sonar.searchers.transcript import MEDIAN, VERIFY, Transcript, repetition_block
from sonar.utilities.errors import FirstTargetNotFound, InvalidParameters
from sonar.utilities.logging import get_logger
from sonar.utilities.types import QueryKind, SearcherName
from sonar.utilities.vars import NOISY_MAX_RESTARTS

# Floor for renormalised weights so a long losing streak never hits exact zero
WEIGHT_FLOOR = 1e-300


def noisy_search_cap(n: int, rho: float) -> int:
	"""Every attempt spends one block of rounds and one block of verification."""
	return (NOISY_MAX_RESTARTS + 1) * 2 * repetition_block(n, rho)


def noisy_first_target(
	g: Graph,
	oracle: Oracle,
	params: SearchParams,
	dt: Optional[DistanceTable] = None,
) -> tuple[int, Transcript]:
	"""Locate t1 through a biased two-target oracle, treating answers toward t2 as noise.

	Keeps a positive weight per vertex, queries the weighted-Gamma median and
	scales every vertex outside the answered cone by (1-p1)/p1. After the
	rounds, the heaviest vertex is verified by repeated queries awaiting
	Found(1); a rejected candidate is suppressed and the search restarts.
	"""
	logger = get_logger("noisy-first-target")
	p1 = oracle.bias
	if not p1 > 0.5:
		raise InvalidParameters(f"noisy-first-target needs p1 > 1/2, got {p1}")

	dt = dt if dt is not None else g.distances
	beta = (1 - p1) / p1
	rounds = repetition_block(g.n, params.rho)
	transcript = Transcript(SearcherName.NOISY_FIRST_TARGET.value, params.budget)
	suppressed: list[int] = []

	for attempt in range(NOISY_MAX_RESTARTS + 1):
		weights = np.ones(g.n)
		weights[suppressed] = 0.0
		phase = attempt + 1

		for _ in range(rounds):
			v = weighted_gamma_median(g, dt, weights)
			transcript.charge()
			response = oracle.direction_query(v)
			transcript.rounds += 1
			if isinstance(response, Found):
				if response.target == 1:
					transcript.record(QueryKind.DIRECTION, (v,), response, g.n, role=MEDIAN, phase=phase)
					return v, transcript.finish([v])
				weights[v] *= beta
			else:
				assert isinstance(response, Direction)
				outside = ~dt.cone_mask(v, response.vertex)
				weights[outside] *= beta
			transcript.record(QueryKind.DIRECTION, (v,), response, g.n, role=MEDIAN, phase=phase)
			top = weights.max()
			if top > 0:
				weights /= top
				np.maximum(weights, WEIGHT_FLOOR, out=weights, where=weights > 0)

		candidate = int(np.argmax(weights))
		for _ in range(rounds):
			transcript.charge()
			response = oracle.direction_query(candidate)
			transcript.record(QueryKind.DIRECTION, (candidate,), response, g.n, role=VERIFY, phase=phase)
			if isinstance(response, Found) and response.target == 1:
				return candidate, transcript.finish([candidate])

		logger.warning(f"noisy-first-target: candidate {candidate} failed verification, restart {attempt + 1}")
		suppressed.append(candidate)

	raise FirstTargetNotFound(f"no candidate verified after {NOISY_MAX_RESTARTS} restarts")
