from typing import Optional


class SonarError(Exception):
	"""Base exception for sonar operations"""

	def __init__(self, message: str, detail: Optional[str] = None):
		self.message = message
		self.detail = detail
		super().__init__(message)


# Graph construction and lookups


class GraphError(SonarError):
	"""Invalid graph input or graph query"""

	pass


class DisconnectedGraph(GraphError):
	pass


class DuplicateEdge(GraphError):
	pass


class InvalidEdge(GraphError):
	"""Self-loop, non-positive weight or empty edge list"""

	pass


class NotAdjacent(GraphError):
	pass


class NotATree(GraphError):
	pass


class EdgeListSyntaxError(GraphError):
	pass


# Medians


class ScriptViolation(SonarError):
	"""A scripted median does not satisfy the (1+eps) qualification predicate"""

	def __init__(self, message: str, vertex: Optional[int] = None, step: Optional[int] = None):
		self.vertex = vertex
		self.step = step
		super().__init__(message)


# Oracles and games


class OracleError(SonarError):
	pass


class InvalidNoise(OracleError):
	pass


class AdversaryError(SonarError):
	pass


class InvalidSize(AdversaryError):
	pass


# Searchers


class SearchError(SonarError):
	pass


class BudgetExceeded(SearchError):
	"""Query budget exhausted before the search terminated"""

	def __init__(self, message: str, queries: int = 0):
		self.queries = queries
		super().__init__(message)


class FirstTargetNotFound(SearchError):
	pass


class NoBranchAccepted(SearchError):
	pass


# Harness


class HarnessError(SonarError):
	pass


class IncompatibleConfig(HarnessError):
	pass


class InvalidParameters(HarnessError):
	pass
