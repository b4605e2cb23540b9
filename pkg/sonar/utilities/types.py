import enum


class Potential(str, enum.Enum):
	PHI = "phi"
	GAMMA = "gamma"


class MedianRule(str, enum.Enum):
	BEST = "best"
	WORST_QUALIFYING = "worst-qualifying"
	RANDOM_QUALIFYING = "random-qualifying"
	SCRIPTED = "scripted"


class TiePolicy(str, enum.Enum):
	EQUIPROBABLE = "equiprobable"
	ADVERSARIAL = "adversarial-smallest-id"


class QueryKind(str, enum.Enum):
	DIRECTION = "direction"
	DIRECTION_DISTANCE = "direction-distance"
	EDGE_DIRECTION = "edge-direction"
	TWO_DIRECTION = "two-direction"
	RESTRICTED_SET = "restricted-set"


class GeneratorKind(str, enum.Enum):
	PATH = "path"
	CYCLE = "cycle"
	CLIQUE = "clique"
	GRID_DIAG = "grid-diag"
	STAR_PATHS = "star-paths"
	RANDOM_TREE = "random-tree"
	RANDOM_CONNECTED = "random-connected"
	RANDOM_BOUNDED = "random-bounded"

	@property
	def is_random(self) -> bool:
		return self in (GeneratorKind.RANDOM_TREE, GeneratorKind.RANDOM_CONNECTED, GeneratorKind.RANDOM_BOUNDED)


class SearcherName(str, enum.Enum):
	GAMMA_BINARY = "gamma-binary"
	NOISY_FIRST_TARGET = "noisy-first-target"
	TREE_TWO_TARGET = "tree-two-target"
	ALGORITHM1 = "algorithm1"
	ALGORITHM2 = "algorithm2"
	ALGORITHM3 = "algorithm3"
	RESTRICTED_SET = "restricted-set"


class GameName(str, enum.Enum):
	GRID_ADDITIVE = "grid-additive"
	MUL_MARKING = "mul-marking"
	PHI_TRAP = "phi-trap"
	CYCLE_ANTIPODAL = "cycle-antipodal"
	CYCLE_TWODIR = "cycle-twodir"
	PATH_TWO_TARGET = "path-two-target"


class OracleKind(str, enum.Enum):
	TRUTHFUL = "truthful"
	TWO_TARGET = "two-target"
	RESTRICTED_SET = "restricted-set"


class OutputFormat(str, enum.Enum):
	CSV = "csv"
	JSON = "json"


class BoundMode(str, enum.Enum):
	CAP = "cap"
	FLOOR = "floor"
