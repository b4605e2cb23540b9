from pydantic import BaseModel

from sonar.utilities.types import OracleKind, SearcherName


class TaskQueueConfig(BaseModel):
	name: str
	limit: int


class SearcherCapability(BaseModel):
	"""What a searcher needs from its oracle and its graph"""

	oracle: OracleKind
	targets: int
	tree_only: bool = False
	needs_first_target: bool = False


# Task-level concurrency limits
TRIAL_TASK_QUEUE = TaskQueueConfig(
	name="trials",
	limit=8,
)

# Safety cutoff for every searcher
DEFAULT_QUERY_BUDGET = 1_000_000

# Absolute tolerance for distance equality
DISTANCE_TOLERANCE = 1e-9

NOISY_MAX_RESTARTS = 3

# targets=0 means "any count", taken from the oracle spec
SEARCHER_CAPABILITIES: dict[SearcherName, SearcherCapability] = {
	SearcherName.GAMMA_BINARY: SearcherCapability(oracle=OracleKind.TRUTHFUL, targets=1),
	SearcherName.NOISY_FIRST_TARGET: SearcherCapability(oracle=OracleKind.TWO_TARGET, targets=2),
	SearcherName.TREE_TWO_TARGET: SearcherCapability(oracle=OracleKind.TWO_TARGET, targets=2, tree_only=True),
	SearcherName.ALGORITHM1: SearcherCapability(oracle=OracleKind.TWO_TARGET, targets=2, needs_first_target=True),
	SearcherName.ALGORITHM2: SearcherCapability(oracle=OracleKind.TWO_TARGET, targets=2, needs_first_target=True),
	SearcherName.ALGORITHM3: SearcherCapability(oracle=OracleKind.TWO_TARGET, targets=2, needs_first_target=True),
	SearcherName.RESTRICTED_SET: SearcherCapability(oracle=OracleKind.RESTRICTED_SET, targets=0),
}
