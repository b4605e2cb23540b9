from __future__ import annotations

from pydantic import BaseModel, field_validator, model_validator

from sonar.utilities.types import MedianRule, Potential
from sonar.utilities.vars import DEFAULT_QUERY_BUDGET


class MedianPolicy(BaseModel):
	"""How a (1+eps)-approximate median is picked among qualifying vertices."""

	potential: Potential = Potential.GAMMA
	epsilon: float = 0.0
	rule: MedianRule = MedianRule.BEST
	script: list[int] = []

	@field_validator("epsilon")
	@classmethod
	def epsilon_non_negative(cls, v: float) -> float:
		if v < 0:
			raise ValueError("epsilon must be >= 0")
		return v

	@model_validator(mode="after")
	def script_matches_rule(self) -> MedianPolicy:
		if self.rule == MedianRule.SCRIPTED and not self.script:
			raise ValueError("scripted rule needs a non-empty script")
		return self


class SearchParams(BaseModel):
	"""Parameters shared by every searcher."""

	epsilon: float = 0.0
	rho: float = 1.0
	seed: int = 0
	budget: int = DEFAULT_QUERY_BUDGET
	median_rule: MedianRule = MedianRule.BEST

	@field_validator("epsilon")
	@classmethod
	def epsilon_in_range(cls, v: float) -> float:
		if not 0 <= v < 1:
			raise ValueError("epsilon must be in [0, 1)")
		return v

	@field_validator("rho")
	@classmethod
	def rho_at_least_one(cls, v: float) -> float:
		if v < 1:
			raise ValueError("rho must be >= 1")
		return v

	@field_validator("budget")
	@classmethod
	def budget_positive(cls, v: int) -> int:
		if v <= 0:
			raise ValueError("budget must be positive")
		return v

	@field_validator("median_rule")
	@classmethod
	def rule_not_scripted(cls, v: MedianRule) -> MedianRule:
		if v == MedianRule.SCRIPTED:
			raise ValueError("scripted medians are only available to adversary games")
		return v

	def median_policy(self, potential: Potential = Potential.GAMMA) -> MedianPolicy:
		return MedianPolicy(potential=potential, epsilon=self.epsilon, rule=self.median_rule)
