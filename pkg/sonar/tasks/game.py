from typing import Optional

from prefect import task
from prefect.cache_policies import NO_CACHE

from sonar.utilities.logging import get_logger

from sonar.core.adversaries import AdversaryGame, PhiTrapGame, build_game
from sonar.models.experiment import ExperimentRecord, GameReport
from sonar.models.search import SearchParams
from sonar.searchers.probe import gamma_probe_search, sweep_probe
from sonar.utilities.types import GameName

# Games parameterised by epsilon; the others ignore it
_EPSILON_GAMES = {GameName.MUL_MARKING, GameName.PHI_TRAP}
_UNBIASED_GAMES = {GameName.CYCLE_ANTIPODAL, GameName.CYCLE_TWODIR}


def drive_game(game: AdversaryGame, params: Optional[SearchParams] = None) -> int:
	"""Run the searcher each game is meant to be played against; returns the queries issued.

	The phi-trap game plays its own scripted Phi searcher, the marking game
	is swept exhaustively in id order and every other game faces the
	deterministic Gamma prober.
	"""
	if isinstance(game, PhiTrapGame):
		return game.play_script()
	if game.name == GameName.MUL_MARKING:
		sweep_probe(game, params)
	else:
		gamma_probe_search(game, params)
	return game.queries


@task(
	name="play-game",
	description="Drive one lower-bound adversary game and certify the forced query count",
	cache_policy=NO_CACHE,
	task_run_name="game-{name.value}-{n}",
)
def play_game(
	name: GameName,
	n: int,
	epsilon: float = 0.5,
	pairs: int = 1,
	seed: int = 0,
	params: Optional[SearchParams] = None,
) -> GameReport:
	logger = get_logger("play-game")
	game = build_game(name, n, epsilon=epsilon, pairs=pairs, seed=seed)
	logger.info(f"Playing {name.value} on {game.graph.n} vertices (claimed floor {game.bound()})")

	queries = drive_game(game, params)
	report = GameReport(
		game=name,
		n=n,
		epsilon=epsilon if name in _EPSILON_GAMES else None,
		pairs=pairs if name == GameName.CYCLE_ANTIPODAL else None,
		queries=queries,
		forced_queries=game.forced_queries,
		bound=game.bound(),
		certificate_ok=game.certificate_ok,
		certificate_steps=len(game.certificates),
		committed=list(game.committed) if game.committed is not None else [],
		revealed=list(game.revealed),
	)

	verdict = "held" if report.floor_ok else "FAILED"
	logger.info(f"{name.value}: {report.forced_queries} forced queries against a floor of {report.bound}, {verdict}")
	return report


def game_record(report: GameReport, seed: int = 0, millis: Optional[float] = None) -> ExperimentRecord:
	"""Floor-mode record of a game run: `bound_cap` holds the floor, `bound_ok` the floor verdict."""
	return ExperimentRecord(
		trial=0,
		seed=seed,
		searcher=report.game.value,
		n=report.n,
		p1=0.5 if report.game in _UNBIASED_GAMES else 1.0,
		epsilon=report.epsilon if report.epsilon is not None else 0.0,
		rho=1.0,
		queries_total=report.forced_queries,
		queries_by_type={"total": report.queries},
		success=report.certificate_ok,
		found=report.revealed,
		bound_cap=report.bound,
		bound_ok=report.floor_ok,
		millis=millis if millis is not None else 0.0,
	)

