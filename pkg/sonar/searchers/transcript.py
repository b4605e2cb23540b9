import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from sonar.core.oracles import QueryResponse, response_to_dict
from sonar.utilities.errors import BudgetExceeded
from sonar.utilities.types import QueryKind

MEDIAN = "median"
BRANCH = "branch"
VERIFY = "verify"


def ceil_log2(n: int) -> int:
	return math.ceil(math.log2(n)) if n > 1 else 0


def repetition_block(n: int, rho: float) -> int:
	"""ceil(rho * log2 n) repetitions, at least one."""
	if n <= 1:
		return 1
	return max(1, math.ceil(rho * math.log2(n)))


@dataclass(frozen=True, slots=True)
class TranscriptStep:
	step: int
	kind: QueryKind
	vertices: tuple[int, ...]
	response: QueryResponse
	candidate_size: int
	set_size: Optional[int] = None
	role: str = MEDIAN
	phase: int = 1

	def to_dict(self) -> dict:
		query: dict = {"type": self.kind.value, "vertices": list(self.vertices)}
		if self.set_size is not None:
			query["set_size_arg"] = self.set_size
		return {
			"step": self.step,
			"query": query,
			"response": response_to_dict(self.response),
			"candidate_size": self.candidate_size,
		}


@dataclass
class Transcript:
	"""Ordered query log of one search, with a hard query budget.

	`charge` must be called before the oracle is asked, so that a runaway
	search stops with BudgetExceeded instead of spinning.
	"""

	searcher: str
	budget: int
	steps: list[TranscriptStep] = field(default_factory=list)
	rounds: int = 0
	found: list[int] = field(default_factory=list)
	charged: int = 0

	def charge(self, count: int = 1) -> None:
		if self.charged + count > self.budget:
			raise BudgetExceeded(
				f"{self.searcher}: query budget of {self.budget} exhausted",
				queries=self.charged,
			)
		self.charged += count

	def record(
		self,
		kind: QueryKind,
		vertices: tuple[int, ...],
		response: QueryResponse,
		candidate_size: int,
		role: str = MEDIAN,
		phase: int = 1,
		set_size: Optional[int] = None,
	) -> None:
		self.steps.append(
			TranscriptStep(
				step=len(self.steps),
				kind=kind,
				vertices=vertices,
				response=response,
				candidate_size=candidate_size,
				set_size=set_size,
				role=role,
				phase=phase,
			)
		)

	def record_block(
		self,
		kind: QueryKind,
		vertices: tuple[int, ...],
		responses: list[QueryResponse],
		candidate_size: int,
		role: str = MEDIAN,
		phase: int = 1,
	) -> None:
		for response in responses:
			self.record(kind, vertices, response, candidate_size, role=role, phase=phase)

	def finish(self, found: list[int]) -> "Transcript":
		self.found = list(found)
		return self

	@property
	def total(self) -> int:
		return len(self.steps)

	@property
	def queries_by_type(self) -> dict[str, int]:
		return dict(Counter(s.kind.value for s in self.steps))

	@property
	def queries_by_role(self) -> dict[str, int]:
		return dict(Counter(s.role for s in self.steps))

	def candidate_sizes(self, phase: Optional[int] = None) -> list[int]:
		return [s.candidate_size for s in self.steps if phase is None or s.phase == phase]

	def to_dict(self) -> dict:
		return {
			"searcher": self.searcher,
			"queries": self.total,
			"queries_by_type": self.queries_by_type,
			"rounds": self.rounds,
			"found": self.found,
			"steps": [s.to_dict() for s in self.steps],
		}

	def to_json(self, indent: Optional[int] = None) -> str:
		return json.dumps(self.to_dict(), indent=indent)
