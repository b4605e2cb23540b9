import csv
import io
import json
from pathlib import Path
from typing import Optional

from prefect import task

from sonar.utilities.logging import get_logger

from sonar.models.experiment import ExperimentRecord, ExperimentSummary
from sonar.utilities.types import OutputFormat

CSV_COLUMNS = list(ExperimentRecord.model_fields)

SUMMARY_PREFIX = "# "


def _csv_cell(name: str, value) -> str:
	if name == "queries_by_type":
		return ";".join(f"{k}={v}" for k, v in value.items())
	if name == "found":
		return " ".join(str(v) for v in value)
	if isinstance(value, bool):
		return "true" if value else "false"
	return str(value)


def _parse_cell(name: str, text: str):
	if name == "queries_by_type":
		pairs = [item.split("=", 1) for item in text.split(";") if item]
		return {k: int(v) for k, v in pairs}
	if name == "found":
		return [int(v) for v in text.split()]
	if name in ("success", "bound_ok"):
		return text == "true"
	return text


def records_to_csv(records: list[ExperimentRecord], summary: Optional[ExperimentSummary] = None) -> str:
	"""Fixed-column CSV; the summary follows the rows as `# key=value` lines."""
	buffer = io.StringIO()
	writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
	writer.writeheader()
	for record in records:
		writer.writerow({name: _csv_cell(name, getattr(record, name)) for name in CSV_COLUMNS})
	if summary is not None:
		for key, value in summary.model_dump(mode="json").items():
			buffer.write(f"{SUMMARY_PREFIX}{key}={value}\n")
	return buffer.getvalue()


def records_to_json(records: list[ExperimentRecord], summary: Optional[ExperimentSummary] = None) -> str:
	payload = {
		"records": [record.model_dump(mode="json") for record in records],
		"summary": summary.model_dump(mode="json") if summary is not None else None,
	}
	return json.dumps(payload, indent=2)


def parse_records(text: str, fmt: OutputFormat) -> tuple[list[ExperimentRecord], Optional[ExperimentSummary]]:
	if fmt == OutputFormat.JSON:
		payload = json.loads(text)
		records = [ExperimentRecord.model_validate(item) for item in payload.get("records", [])]
		summary = payload.get("summary")
		return records, ExperimentSummary.model_validate(summary) if summary else None

	rows = [line for line in text.splitlines() if line and not line.startswith("#")]
	summary_lines = [line[len(SUMMARY_PREFIX) :] for line in text.splitlines() if line.startswith(SUMMARY_PREFIX)]
	records = [
		ExperimentRecord.model_validate({name: _parse_cell(name, row[name]) for name in CSV_COLUMNS})
		for row in csv.DictReader(rows)
	]
	summary = None
	if summary_lines:
		summary = ExperimentSummary.model_validate(dict(line.split("=", 1) for line in summary_lines))
	return records, summary


def detect_format(path: str) -> OutputFormat:
	return OutputFormat.JSON if Path(path).suffix.lower() == ".json" else OutputFormat.CSV


@task(
	name="write-records",
	description="Serialize experiment records and summary to CSV or JSON",
	task_run_name="write-{fmt.value}",
)
def write_records(
	records: list[ExperimentRecord],
	summary: Optional[ExperimentSummary],
	fmt: OutputFormat,
	path: Optional[str] = None,
) -> str:
	"""Render the records; when `path` is given also write them there. Returns the text."""
	logger = get_logger("write-records")
	text = records_to_json(records, summary) if fmt == OutputFormat.JSON else records_to_csv(records, summary)
	if path is not None:
		target = Path(path)
		target.parent.mkdir(parents=True, exist_ok=True)
		target.write_text(text)
		logger.info(f"Wrote {len(records)} records to {target} ({fmt.value})")
	return text


def read_records(path: str, fmt: Optional[OutputFormat] = None) -> tuple[list[ExperimentRecord], Optional[ExperimentSummary]]:
	source = Path(path)
	if not source.exists():
		raise FileNotFoundError(f"Records file does not exist: {path}")
	return parse_records(source.read_text(), fmt if fmt is not None else detect_format(path))
