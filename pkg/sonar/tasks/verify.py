from prefect import task

from sonar.utilities.logging import get_logger, safe_create_markdown

from sonar.models.experiment import BoundReport, BoundSpec, ExperimentRecord
from sonar.utilities.types import BoundMode


def _limit(record: ExperimentRecord, spec: BoundSpec) -> int:
	return spec.limit if spec.limit is not None else record.bound_cap


def _within(record: ExperimentRecord, spec: BoundSpec) -> bool:
	limit = _limit(record, spec)
	if spec.mode == BoundMode.CAP:
		return record.queries_total <= limit
	return record.queries_total >= limit


@task(
	name="verify-bounds",
	description="Check every record against its query cap or floor",
	task_run_name="verify-{spec.mode.value}",
)
def verify_bounds(records: list[ExperimentRecord], spec: BoundSpec) -> BoundReport:
	"""Check each record's query count against a cap (searchers) or floor (adversary games).

	The limit is `spec.limit` when given, else each record's own
	`bound_cap`. Game records are also rejected when their certificate
	failed. An empty record list passes vacuously with a warning.
	"""
	logger = get_logger("verify-bounds")

	if not records:
		warning = "No records to verify; passing vacuously"
		logger.warning(warning)
		return BoundReport(mode=spec.mode, checked=0, violations=[], warnings=[warning])

	violations: list[int] = []
	for record in records:
		ok = _within(record, spec)
		if spec.mode == BoundMode.FLOOR:
			ok = ok and record.success
		if not ok:
			violations.append(record.trial)

	report = BoundReport(mode=spec.mode, checked=len(records), violations=violations)
	if report.passed:
		logger.info(f"Bound check PASS: {len(records)} records within their {spec.mode.value}")
	else:
		logger.warning(f"Bound check FAIL: {len(violations)} of {len(records)} records violate their {spec.mode.value}")

	safe_create_markdown(
		key=f"bounds-{spec.mode.value}",
		markdown=_build_report_markdown(records, spec, report),
		description=f"Query {spec.mode.value} verification",
	)
	return report


def _build_report_markdown(records: list[ExperimentRecord], spec: BoundSpec, report: BoundReport) -> str:
	worst = max(records, key=lambda r: r.queries_total) if spec.mode == BoundMode.CAP else min(
		records, key=lambda r: r.queries_total
	)
	verdict = "PASS" if report.passed else "FAIL"
	violating = ", ".join(str(t) for t in report.violations[:20]) or "none"
	return f"""# Query Bound Verification

- **Mode**: {spec.mode.value}
- **Records**: {report.checked}
- **Verdict**: **{verdict}**
- **Extreme record**: trial {worst.trial} with {worst.queries_total} queries (limit {_limit(worst, spec)})
- **Violating trials**: {violating}
"""
