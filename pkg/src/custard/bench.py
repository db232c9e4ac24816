"""Benchmark harness: sweep construction, per-trial execution, CSV reporting."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .graph import SYMMETRIC, Graph, TransitionMatrix, load_graph, symmetric_normalize
from .metrics import (
    DEFAULT_KS,
    RankedResult,
    UndefinedMetricError,
    aggregate,
    evaluate_ranking,
    pool_instance,
    rank_validation,
)
from .propagation import PropagationConfig, ScoreVector, custard, custard_sq, rwr_symmetric
from .sampling import TrialBuildError, TrialPlan, build_trials, write_manifest

logger = logging.getLogger(__name__)

METHODS = ("rwr", "custard", "custard_sq")
REDIRECTING_METHODS = ("custard", "custard_sq")
METRIC_NAMES = ("auc",) + tuple(f"p_at_{k}" for k in DEFAULT_KS)


@dataclass
class ExperimentConfig:
    """Everything one benchmark invocation needs."""

    edges_path: str | Path
    labels_path: str | Path
    out_path: str | Path = "results.csv"
    methods: Sequence[str] = METHODS
    gamma_list: Sequence[float] = (0.02, 0.05, 0.10)
    k_list: Sequence[int] = (1, 2, 3)
    lambda_list: Sequence[float] = (0.9,)
    alpha: float = 0.05
    n_trials: int = 50
    base_seed: int = 0
    workers: int = 1
    dataset_name: str | None = None
    tolerance: float = 1e-9
    max_iterations: int = 1000

    def validate(self) -> None:
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {METHODS}")
        if not self.methods:
            raise ValueError("at least one method is required")
        if not self.gamma_list or not self.k_list:
            raise ValueError("gamma_list and k_list must be nonempty")
        if any(m in REDIRECTING_METHODS for m in self.methods) and not self.lambda_list:
            raise ValueError("lambda_list must be nonempty for redirecting methods")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_list):
            raise ValueError("lambda values must be in [0, 1]")
        if any(k < 1 for k in self.k_list):
            raise ValueError("k values must be at least 1")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        # delegates alpha/tolerance/max_iterations range checks
        self._propagation_config(self.lambda_list[0] if self.lambda_list else 0.0)

    def _propagation_config(self, redirection: float) -> PropagationConfig:
        return PropagationConfig(
            alpha=self.alpha,
            redirection=redirection,
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
            variant=SYMMETRIC,
        )


@dataclass
class ResultRow:
    dataset: str
    method: str
    gamma: float
    k: int
    redirection: float | None
    metric: str
    mean: float
    std: float
    n_trials: int


@dataclass
class RunResult:
    rows: list[ResultRow]
    skipped: list[str]
    csv_path: Path
    manifest_path: Path

    @property
    def exit_code(self) -> int:
        return 2 if self.skipped else 0


def trial_scores(
    graph: Graph,
    method: str,
    trial: TrialPlan,
    config: PropagationConfig,
    transition: TransitionMatrix | None = None,
) -> ScoreVector:
    """Score vector for one (method, trial) pair.

    ``rwr`` ignores the trial's negatives; ``custard_sq`` uses the first
    seed as the query and the remaining seeds as positives to wire in.
    """
    seeds = np.asarray(trial.seeds, dtype=np.int64)
    negatives = np.asarray(trial.negatives, dtype=np.int64)
    if method == "rwr":
        trans = transition if transition is not None else symmetric_normalize(graph)
        return rwr_symmetric(trans, seeds, config)
    if method == "custard":
        return custard(graph, seeds, negatives, config, transition=transition)
    if method == "custard_sq":
        return custard_sq(graph, int(seeds[0]), seeds[1:], negatives, config, transition=transition)
    raise ValueError(f"unknown method {method!r}")


def run_single(
    graph: Graph,
    method: str,
    trial: TrialPlan,
    config: PropagationConfig,
    transition: TransitionMatrix | None = None,
) -> RankedResult:
    """Run one trial end to end: solve, rank the validation nodes, score."""
    scores = trial_scores(graph, method, trial, config, transition)
    ranking = rank_validation(scores.p, trial.training_nodes)
    members = np.flatnonzero(graph.labels == trial.label_id)
    held_out = np.setdiff1d(members, np.asarray(trial.seeds, dtype=np.int64))
    return evaluate_ranking(ranking, held_out)


def _format_float(value: float) -> str:
    return format(value, ".12g")


def _write_csv(path: Path, rows: Sequence[ResultRow], config: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# generated: {datetime.now(timezone.utc).isoformat()}\n")
        handle.write(
            f"# seed={config.base_seed} alpha={_format_float(config.alpha)} "
            f"trials={config.n_trials} edges={config.edges_path} labels={config.labels_path}\n"
        )
        writer = csv.writer(handle)
        writer.writerow(
            ["dataset", "method", "gamma", "k", "lambda", "metric", "mean", "std", "n_trials"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.dataset,
                    row.method,
                    format(row.gamma, "g"),
                    row.k,
                    "" if row.redirection is None else format(row.redirection, "g"),
                    row.metric,
                    _format_float(row.mean),
                    _format_float(row.std),
                    row.n_trials,
                ]
            )


def run(config: ExperimentConfig) -> RunResult:
    """Execute the full sweep and write the CSV report plus a trial manifest.

    Sweep cells are (gamma, k); the same trials are reused by every method
    and every lambda inside a cell, so comparisons are paired. A cell whose
    trials cannot be built is skipped with a warning and recorded in the
    result; any skip turns the exit code to 2.
    """
    config.validate()
    graph, report = load_graph(config.edges_path, config.labels_path)
    dataset = config.dataset_name or Path(str(config.edges_path)).stem
    logger.info(
        "loaded %s: %d nodes, %d edges, %d labels (%d isolated removed)",
        dataset,
        report.retained_nodes,
        report.undirected_edges,
        report.n_labels,
        report.isolated_removed,
    )
    label_sets = graph.label_sets()
    if not label_sets:
        raise ValueError("dataset has no labeled nodes")
    label_ids = sorted(label_sets)
    transition = symmetric_normalize(graph)
    executor = Parallel(n_jobs=config.workers, prefer="threads")

    rows: list[ResultRow] = []
    skipped: list[str] = []
    manifest: list[TrialPlan] = []
    for gamma in config.gamma_list:
        for k in config.k_list:
            try:
                cell_trials = {
                    label: build_trials(graph, label, gamma, k, config.n_trials, config.base_seed)
                    for label in label_ids
                }
            except TrialBuildError as exc:
                logger.warning("skipping cell gamma=%g k=%d: %s", gamma, k, exc)
                skipped.append(f"gamma={gamma:g} k={k}: {exc}")
                continue
            for label in label_ids:
                manifest.extend(cell_trials[label])
            tasks = [plan for label in label_ids for plan in cell_trials[label]]
            for method in config.methods:
                lambdas: Sequence[float | None] = (
                    config.lambda_list if method in REDIRECTING_METHODS else (None,)
                )
                for lam in lambdas:
                    cfg = config._propagation_config(lam if lam is not None else 0.0)
                    results = executor(
                        delayed(run_single)(graph, method, plan, cfg, transition)
                        for plan in tasks
                    )
                    by_instance: dict[int, list[RankedResult]] = defaultdict(list)
                    for plan, result in zip(tasks, results):
                        by_instance[plan.trial_index].append(result)
                    instance_metrics = []
                    for j in sorted(by_instance):
                        try:
                            instance_metrics.append(pool_instance(by_instance[j]))
                        except UndefinedMetricError as exc:
                            logger.warning(
                                "gamma=%g k=%d method=%s: instance %d dropped (%s)",
                                gamma, k, method, j, exc,
                            )
                    if not instance_metrics:
                        skipped.append(
                            f"gamma={gamma:g} k={k} method={method}: no instance produced metrics"
                        )
                        continue
                    summaries = aggregate(instance_metrics)
                    for metric in METRIC_NAMES:
                        if metric not in summaries:
                            continue
                        s = summaries[metric]
                        rows.append(
                            ResultRow(
                                dataset, method, float(gamma), int(k), lam,
                                metric, s.mean, s.std, s.n_trials,
                            )
                        )
    csv_path = Path(config.out_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(csv_path, rows, config)
    manifest_path = csv_path.with_name(csv_path.stem + "_trials.txt")
    write_manifest(manifest, manifest_path)
    logger.info("wrote %d rows to %s (%d skipped cells)", len(rows), csv_path, len(skipped))
    return RunResult(rows, skipped, csv_path, manifest_path)
