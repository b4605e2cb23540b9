from __future__ import annotations

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, field_validator, model_validator

from sonar.models.search import SearchParams
from sonar.utilities.types import BoundMode, GameName, GeneratorKind, OracleKind, OutputFormat, SearcherName, TiePolicy


class GeneratorSpec(BaseModel):
	"""Which graph family to draw and with what parameters."""

	kind: GeneratorKind
	n: int
	extra_edges: int = 0
	max_degree: int = 8
	weighted: bool = False
	max_weight: int = 10

	@field_validator("n")
	@classmethod
	def n_positive(cls, v: int) -> int:
		if v < 1:
			raise ValueError("n must be positive")
		return v

	@field_validator("extra_edges")
	@classmethod
	def extra_non_negative(cls, v: int) -> int:
		if v < 0:
			raise ValueError("extra_edges must be >= 0")
		return v

	@field_validator("max_weight", "max_degree")
	@classmethod
	def at_least_one(cls, v: int) -> int:
		if v < 1:
			raise ValueError("must be >= 1")
		return v


class OracleSpec(BaseModel):
	"""Oracle kind plus how targets are placed.

	Without explicit `targets`, each trial draws `target_count` distinct
	targets from its own seed.
	"""

	kind: OracleKind = OracleKind.TRUTHFUL
	p1: float = 0.75
	targets: Optional[list[int]] = None
	target_count: int = 1
	tie_policy: TiePolicy = TiePolicy.EQUIPROBABLE

	@field_validator("p1")
	@classmethod
	def p1_in_range(cls, v: float) -> float:
		if not 0 < v <= 1:
			raise ValueError("p1 must be in (0, 1]")
		return v

	@field_validator("target_count")
	@classmethod
	def count_positive(cls, v: int) -> int:
		if v < 1:
			raise ValueError("target_count must be >= 1")
		return v

	@model_validator(mode="after")
	def targets_match_count(self) -> OracleSpec:
		if self.kind == OracleKind.TRUTHFUL:
			self.target_count = 1
		elif self.kind == OracleKind.TWO_TARGET:
			self.target_count = 2
		if self.targets is not None:
			if len(set(self.targets)) != len(self.targets):
				raise ValueError("targets must be distinct")
			if len(self.targets) != self.target_count:
				raise ValueError(f"{self.kind.value} oracle needs exactly {self.target_count} targets")
		return self


class ExperimentConfig(BaseModel):
	"""One Monte-Carlo experiment: graph source, searcher, oracle and trial count.

	The graph comes either from a generator spec or from an edge-list file;
	a file graph is shared by every trial.
	"""

	generator: Optional[GeneratorSpec] = None
	graph_file: Optional[str] = None
	searcher: SearcherName
	params: SearchParams = SearchParams()
	oracle: OracleSpec = OracleSpec()
	trials: int = 1
	master_seed: int = 0
	format: OutputFormat = OutputFormat.CSV
	locate_first_target: bool = False
	regenerate_graph: bool = True

	@field_validator("trials")
	@classmethod
	def trials_positive(cls, v: int) -> int:
		if v < 1:
			raise ValueError("trials must be >= 1")
		return v

	@model_validator(mode="after")
	def one_graph_source(self) -> ExperimentConfig:
		if (self.generator is None) == (self.graph_file is None):
			raise ValueError("exactly one of generator and graph_file must be set")
		return self

	@property
	def graph_name(self) -> str:
		if self.generator is not None:
			return f"{self.generator.kind.value}-{self.generator.n}"
		return Path(self.graph_file or "").stem


class ExperimentRecord(BaseModel):
	"""One trial's outcome; field order is the CSV column order."""

	trial: int
	seed: int
	searcher: str
	n: int
	p1: float
	epsilon: float
	rho: float
	queries_total: int
	queries_by_type: dict[str, int]
	success: bool
	found: list[int]
	bound_cap: int
	bound_ok: bool
	millis: float


class ExperimentSummary(BaseModel):
	trials: int
	successes: int
	success_rate: float
	queries_min: int
	queries_median: float
	queries_p90: float
	queries_max: int
	queries_mean: float
	bound_violations: int


class ExperimentResult(BaseModel):
	config: ExperimentConfig
	records: list[ExperimentRecord]
	summary: ExperimentSummary


class BoundSpec(BaseModel):
	"""Cap mode checks queries <= limit, floor mode queries >= limit.

	Without an explicit `limit`, each record's own `bound_cap` is used.
	"""

	mode: BoundMode = BoundMode.CAP
	limit: Optional[int] = None


class BoundReport(BaseModel):
	mode: BoundMode
	checked: int
	violations: list[int]
	warnings: list[str] = []

	@property
	def passed(self) -> bool:
		return not self.violations


class GameReport(BaseModel):
	game: GameName
	n: int
	epsilon: Optional[float] = None
	pairs: Optional[int] = None
	queries: int
	forced_queries: int
	bound: int
	certificate_ok: bool
	certificate_steps: int
	committed: list[int] = []
	revealed: list[int] = []

	@property
	def floor_ok(self) -> bool:
		return self.certificate_ok and self.forced_queries >= self.bound
