from typing import Optional

import numpy as np
from prefect import flow
from prefect.futures import wait
from prefect.task_runners import ThreadPoolTaskRunner
from prefect.utilities.annotations import quote

from sonar.utilities.logging import get_logger, safe_create_markdown, safe_create_progress, safe_update_progress

from sonar.core.graph import Graph
from sonar.models.experiment import ExperimentConfig, ExperimentRecord, ExperimentResult, ExperimentSummary
from sonar.tasks.generate import generate_graph, read_graph
from sonar.tasks.serialize import write_records
from sonar.tasks.trial import check_compatibility, run_trial
from sonar.utilities.vars import TRIAL_TASK_QUEUE


def summarize(records: list[ExperimentRecord]) -> ExperimentSummary:
	"""Success rate and query quantiles over a record set."""
	if not records:
		return ExperimentSummary(
			trials=0,
			successes=0,
			success_rate=0.0,
			queries_min=0,
			queries_median=0.0,
			queries_p90=0.0,
			queries_max=0,
			queries_mean=0.0,
			bound_violations=0,
		)
	queries = np.array([r.queries_total for r in records])
	successes = sum(r.success for r in records)
	return ExperimentSummary(
		trials=len(records),
		successes=successes,
		success_rate=successes / len(records),
		queries_min=int(queries.min()),
		queries_median=float(np.quantile(queries, 0.5)),
		queries_p90=float(np.quantile(queries, 0.9)),
		queries_max=int(queries.max()),
		queries_mean=float(queries.mean()),
		bound_violations=sum(not r.bound_ok for r in records),
	)


@flow(
	name="sonar-experiment",
	description="Run seeded search trials in parallel and summarize query counts",
	log_prints=True,
	flow_run_name="experiment-{cfg.searcher.value}-{cfg.graph_name}",
	task_runner=ThreadPoolTaskRunner(max_workers=TRIAL_TASK_QUEUE.limit),
)
def run_experiment(cfg: ExperimentConfig, out: Optional[str] = None) -> ExperimentResult:
	"""Monte-Carlo experiment over independent, reproducible trials.

	Each trial derives its seed from (master seed, trial index). A graph read
	from `graph_file`, or generated from a deterministic kind, is built once
	and shared across trials; random kinds draw a fresh graph per trial
	unless `regenerate_graph` is off, in which case one graph is drawn from
	the master seed. Records come back in
	trial-index order whatever order the workers finish in.
	"""
	logger = get_logger("experiment")
	check_compatibility(cfg)

	logger.info(
		f"Starting experiment: {cfg.searcher.value} on {cfg.graph_name}, "
		f"{cfg.trials} trials, master seed {cfg.master_seed}"
	)

	shared: Optional[Graph] = None
	if cfg.graph_file is not None:
		shared = read_graph(cfg.graph_file)
	elif cfg.generator is not None and (not cfg.generator.kind.is_random or not cfg.regenerate_graph):
		shared = generate_graph(cfg.generator, seed=cfg.master_seed)
	if shared is not None:
		check_compatibility(cfg, shared)
		shared.precompute()

	progress_id = safe_create_progress(0.0, f"Running {cfg.trials} trials of {cfg.searcher.value}")

	# quote keeps Prefect from walking the shared graph for futures
	futures = [run_trial.submit(cfg, trial, quote(shared)) for trial in range(cfg.trials)]
	wait(futures)
	safe_update_progress(progress_id, 100.0)

	records = [f.result() for f in futures]
	summary = summarize(records)

	logger.info(
		f"Experiment complete: success rate {summary.success_rate:.3f}, "
		f"queries median {summary.queries_median:.1f} max {summary.queries_max}, "
		f"{summary.bound_violations} cap violations"
	)

	safe_create_markdown(
		key="experiment-summary",
		markdown=_build_summary_markdown(cfg, summary),
		description=f"Experiment summary for {cfg.searcher.value}",
	)

	if out is not None:
		write_records(records, summary, cfg.format, out)

	return ExperimentResult(config=cfg, records=records, summary=summary)


def _build_summary_markdown(cfg: ExperimentConfig, summary: ExperimentSummary) -> str:
	return f"""# Experiment Summary

## Configuration
- **Searcher**: {cfg.searcher.value}
- **Graph**: {cfg.graph_name}
- **Oracle**: {cfg.oracle.kind.value}, p1={cfg.oracle.p1}, {cfg.oracle.target_count} target(s)
- **epsilon / rho**: {cfg.params.epsilon} / {cfg.params.rho}
- **Trials**: {cfg.trials} (master seed {cfg.master_seed})

## Results

| Metric | Value |
|--------|-------|
| Success rate | {summary.success_rate:.3f} |
| Queries min | {summary.queries_min} |
| Queries median | {summary.queries_median:.1f} |
| Queries p90 | {summary.queries_p90:.1f} |
| Queries max | {summary.queries_max} |
| Cap violations | {summary.bound_violations} |
"""
