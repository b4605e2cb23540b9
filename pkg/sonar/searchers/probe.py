from typing import Optional

import numpy as np

from sonar.core.adversaries import AdversaryGame
from sonar.core.oracles import Direction, Found, TwoDirections
from sonar.core.potentials import CandidateSet, gamma_all
from sonar.models.search import SearchParams
from sonar.searchers.transcript import Transcript
from sonar.utilities.logging import get_logger


def gamma_probe_search(game: AdversaryGame, params: Optional[SearchParams] = None) -> tuple[list[int], Transcript]:
	"""Deterministic Gamma prober for adversary games.

	Queries the Gamma median of S among vertices not yet queried, so it never
	repeats a vertex. Direction answers narrow S to the cone; two-direction
	answers to the union of both cones. When the answers rule out every
	candidate, S resets to all unqueried vertices. Stops once the game has
	revealed all of its targets or nothing is left to query.
	"""
	logger = get_logger("gamma-probe")
	params = params if params is not None else SearchParams()
	g = game.graph
	dt = g.distances
	unqueried = np.ones(g.n, dtype=bool)
	s = CandidateSet.full(g.n)
	transcript = Transcript("gamma-probe", params.budget)

	while unqueried.any() and not game.finished:
		values = gamma_all(g, dt, s)
		allowed = np.flatnonzero(unqueried)
		v = int(allowed[np.argmin(values[allowed])])
		transcript.charge()
		response = game.respond(v)
		unqueried[v] = False

		if isinstance(response, Found):
			keep = s.mask.copy()
		elif isinstance(response, TwoDirections):
			keep = s.mask & (dt.cone_mask(v, response.first) | dt.cone_mask(v, response.second))
		else:
			assert isinstance(response, Direction)
			keep = s.mask & dt.cone_mask(v, response.vertex)
		keep[v] = False
		if not keep.any():
			keep = unqueried.copy()
		s = CandidateSet(keep)
		transcript.record(game.query_kind, (v,), response, len(s))

	logger.debug(f"{game.name.value}: gamma prober spent {transcript.total} queries")
	return list(game.revealed), transcript.finish(list(game.revealed))


def sweep_probe(game: AdversaryGame, params: Optional[SearchParams] = None) -> tuple[list[int], Transcript]:
	"""Query every vertex in id order until the game has revealed its targets."""
	params = params if params is not None else SearchParams()
	transcript = Transcript("sweep-probe", params.budget)
	for v in range(game.graph.n):
		if game.finished:
			break
		transcript.charge()
		response = game.respond(v)
		transcript.record(game.query_kind, (v,), response, game.graph.n - v - 1)
	return list(game.revealed), transcript.finish(list(game.revealed))
