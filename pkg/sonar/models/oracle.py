from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, field_validator, model_validator

from sonar.utilities.types import TiePolicy


class OracleConfig(BaseModel):
	"""Targets, per-target answer probabilities, tie policy and RNG seed of a query oracle."""

	targets: list[int]
	probabilities: Optional[list[float]] = None
	tie_policy: TiePolicy = TiePolicy.EQUIPROBABLE
	seed: int = 0

	@field_validator("targets")
	@classmethod
	def targets_distinct(cls, v: list[int]) -> list[int]:
		if not v:
			raise ValueError("at least one target is required")
		if len(set(v)) != len(v):
			raise ValueError("targets must be distinct")
		if any(t < 0 for t in v):
			raise ValueError("target ids must be non-negative")
		return v

	@field_validator("probabilities")
	@classmethod
	def probabilities_positive(cls, v: Optional[list[float]]) -> Optional[list[float]]:
		if v is None:
			return v
		if any(p <= 0 for p in v):
			raise ValueError("every probability must be > 0")
		if not math.isclose(sum(v), 1.0, abs_tol=1e-9):
			raise ValueError(f"probabilities must sum to 1, got {sum(v)}")
		return v

	@model_validator(mode="after")
	def probabilities_match_targets(self) -> OracleConfig:
		if self.probabilities is None:
			self.probabilities = [1.0 / len(self.targets)] * len(self.targets)
		elif len(self.probabilities) != len(self.targets):
			raise ValueError("one probability per target is required")
		return self

	@property
	def p1(self) -> float:
		assert self.probabilities is not None
		return self.probabilities[0]

	@classmethod
	def two_target(
		cls,
		t1: int,
		t2: int,
		p1: float,
		seed: int = 0,
		tie_policy: TiePolicy = TiePolicy.EQUIPROBABLE,
	) -> OracleConfig:
		return cls(targets=[t1, t2], probabilities=[p1, 1.0 - p1], tie_policy=tie_policy, seed=seed)
