import json

import pytest

from sonar.models.experiment import ExperimentRecord, ExperimentSummary
from sonar.tasks.serialize import (
	CSV_COLUMNS,
	detect_format,
	parse_records,
	read_records,
	records_to_csv,
	records_to_json,
	write_records,
)
from sonar.utilities.types import OutputFormat


def _record(trial: int, queries: int = 9, success: bool = True) -> ExperimentRecord:
	return ExperimentRecord(
		trial=trial,
		seed=1000 + trial,
		searcher="tree-two-target",
		n=64,
		p1=0.7,
		epsilon=0.0,
		rho=1.5,
		queries_total=queries,
		queries_by_type={"direction": queries},
		success=success,
		found=[3, 17],
		bound_cap=120,
		bound_ok=True,
		millis=1.25,
	)


@pytest.fixture
def summary() -> ExperimentSummary:
	return ExperimentSummary(
		trials=2,
		successes=1,
		success_rate=0.5,
		queries_min=9,
		queries_median=10.0,
		queries_p90=10.8,
		queries_max=11,
		queries_mean=10.0,
		bound_violations=0,
	)


class TestCsv:
	def test_header_is_the_record_field_order(self):
		header = records_to_csv([_record(0)]).splitlines()[0]
		assert header.split(",") == CSV_COLUMNS
		assert CSV_COLUMNS[0] == "trial" and CSV_COLUMNS[-1] == "millis"

	def test_cells(self):
		row = records_to_csv([_record(0)]).splitlines()[1]
		assert "direction=9" in row
		assert "3 17" in row
		assert ",true," in row

	def test_summary_lines_follow_the_rows(self, summary):
		lines = records_to_csv([_record(0)], summary).splitlines()
		assert lines[2] == "# trials=2"
		assert "# success_rate=0.5" in lines

	def test_parse_back(self, summary):
		records = [_record(0), _record(1, queries=11, success=False)]
		parsed, parsed_summary = parse_records(records_to_csv(records, summary), OutputFormat.CSV)
		assert parsed == records
		assert parsed_summary == summary

	def test_multiple_query_kinds(self):
		record = _record(0).model_copy(update={"queries_by_type": {"direction": 4, "edge-direction": 6}})
		parsed, _ = parse_records(records_to_csv([record]), OutputFormat.CSV)
		assert parsed[0].queries_by_type == {"direction": 4, "edge-direction": 6}


class TestJson:
	def test_carries_the_same_data_as_csv(self, summary):
		records = [_record(0), _record(1, queries=11)]
		from_json, json_summary = parse_records(records_to_json(records, summary), OutputFormat.JSON)
		from_csv, csv_summary = parse_records(records_to_csv(records, summary), OutputFormat.CSV)
		assert from_json == from_csv
		assert json_summary == csv_summary

	def test_summary_may_be_absent(self):
		payload = json.loads(records_to_json([_record(0)]))
		assert payload["summary"] is None
		assert payload["records"][0]["found"] == [3, 17]


class TestFiles:
	def test_detect_format(self):
		assert detect_format("out/results.json") == OutputFormat.JSON
		assert detect_format("out/results.csv") == OutputFormat.CSV
		assert detect_format("results") == OutputFormat.CSV

	def test_write_then_read(self, temp_dir, summary):
		path = temp_dir / "nested" / "records.json"
		text = write_records.fn([_record(0)], summary, OutputFormat.JSON, str(path))
		assert path.read_text() == text
		records, read_summary = read_records(str(path))
		assert records == [_record(0)]
		assert read_summary == summary

	def test_write_without_path_only_renders(self, temp_dir):
		text = write_records.fn([_record(0)], None, OutputFormat.CSV)
		assert text.startswith("trial,seed,")
		assert not list(temp_dir.iterdir())

	def test_missing_file(self, temp_dir):
		with pytest.raises(FileNotFoundError, match="does not exist"):
			read_records(str(temp_dir / "absent.csv"))
