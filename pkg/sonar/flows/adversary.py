import time

from prefect import flow

from sonar.utilities.logging import get_logger, safe_create_markdown

from sonar.models.experiment import ExperimentRecord, GameReport
from sonar.tasks.game import game_record, play_game
from sonar.utilities.types import GameName


@flow(
	name="sonar-adversary",
	description="Drive one lower-bound adversary game and report the forced query count",
	log_prints=True,
	flow_run_name="adversary-{name.value}-{n}",
)
def run_adversary(
	name: GameName,
	n: int,
	epsilon: float = 0.5,
	pairs: int = 1,
	seed: int = 0,
) -> tuple[GameReport, ExperimentRecord]:
	"""Play one game and return its report plus a floor-mode record for verify_bounds."""
	logger = get_logger("adversary")
	started = time.perf_counter()
	report = play_game(name, n, epsilon=epsilon, pairs=pairs, seed=seed)
	millis = round((time.perf_counter() - started) * 1000.0, 3)

	safe_create_markdown(
		key=f"adversary-{name.value}",
		markdown=f"""# Adversary Game: {name.value}

- **n**: {report.n}
- **Queries issued**: {report.queries}
- **Forced before commitment**: {report.forced_queries}
- **Claimed floor**: {report.bound}
- **Certificate held at every step**: {"Yes" if report.certificate_ok else "No"} ({report.certificate_steps} checks)
- **Committed targets**: {report.committed or "none"}
""",
		description=f"Forced query count for {name.value}",
	)

	logger.info(f"Adversary {name.value} finished in {millis:.0f} ms")
	return report, game_record(report, seed=seed, millis=millis)
