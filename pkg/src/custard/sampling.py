"""Seed and negative-example sampling for repeated evaluation trials."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph


class ResampleRequired(Exception):
    """Signal that the current seed draw admits no negatives and must be redrawn."""


class TrialBuildError(RuntimeError):
    """No valid trial could be built within the retry budget."""


@dataclass(frozen=True)
class TrialPlan:
    """Frozen description of one evaluation trial.

    ``seeds`` keeps draw order (the first entry doubles as the query for the
    single-query method); ``negatives`` are known nodes of a different label
    at hop distance exactly ``k_hop`` from the seed set.
    """

    label_id: int
    trial_index: int
    rng_seed: int
    gamma: float
    k_hop: int
    seeds: tuple[int, ...]
    negatives: tuple[int, ...]

    def __post_init__(self):
        if len(self.seeds) == 0:
            raise ValueError("trial needs at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("duplicate seeds in trial")
        if len(set(self.negatives)) != len(self.negatives):
            raise ValueError("duplicate negatives in trial")
        if set(self.seeds) & set(self.negatives):
            raise ValueError("seeds and negatives must be disjoint")

    @property
    def training_nodes(self) -> np.ndarray:
        """Seed and negative ids together; these are excluded from rankings."""
        return np.asarray(self.seeds + self.negatives, dtype=np.int64)


def sample_seeds(members: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``max(1, floor(gamma * |members|))`` members without replacement."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError("cannot sample seeds from an empty label set")
    # tiny epsilon so exact products like 0.29 * 100 do not floor one short
    size = max(1, int(math.floor(gamma * members.size + 1e-9)))
    return rng.choice(members, size=size, replace=False)


def khop_pool(graph: Graph, seeds, k: int, label_id: int) -> np.ndarray:
    """Nodes at shortest-path hop distance exactly ``k`` from the seed set
    whose label is known and differs from ``label_id``. Sorted.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.int64))
    adj = graph.adjacency()
    dist = np.full(graph.n, -1, dtype=np.int64)
    dist[seeds] = 0
    frontier = np.unique(seeds)
    for depth in range(1, k + 1):
        if frontier.size == 0:
            break
        neighbor_chunks = [
            adj.indices[adj.indptr[u]:adj.indptr[u + 1]] for u in frontier
        ]
        candidates = np.unique(np.concatenate(neighbor_chunks))
        frontier = candidates[dist[candidates] < 0]
        dist[frontier] = depth
    at_k = dist == k
    eligible = at_k & (graph.labels >= 0) & (graph.labels != label_id)
    return np.flatnonzero(eligible)


def sample_negatives(pool: np.ndarray, target_size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``min(|pool|, target_size)`` nodes without replacement.

    Raises ResampleRequired on an empty pool so the caller can redraw seeds.
    """
    if target_size < 1:
        raise ValueError(f"target_size must be at least 1, got {target_size}")
    pool = np.asarray(pool, dtype=np.int64)
    if pool.size == 0:
        raise ResampleRequired("empty negative pool")
    size = min(pool.size, target_size)
    return rng.choice(pool, size=size, replace=False)


def trial_rng_seed(base_seed: int, label_id: int, trial_index: int) -> int:
    """Stable per-trial seed derived from (base_seed, label_id, trial_index)."""
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(label_id, trial_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def build_trials(
    graph: Graph,
    label_id: int,
    gamma: float,
    k: int,
    n_trials: int,
    base_seed: int,
    *,
    members: np.ndarray | None = None,
    max_attempts: int = 1000,
) -> list[TrialPlan]:
    """Build ``n_trials`` independent trial plans for one label.

    Each trial draws seeds from the label's members, collects the k-hop
    negative pool, and redraws the seeds (consuming the same per-trial rng
    stream) whenever the pool is empty. Raises TrialBuildError when a trial
    exhausts ``max_attempts`` redraws.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if members is None:
        members = np.flatnonzero(graph.labels == label_id)
    else:
        members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError(f"label {label_id} has no member nodes")
    plans: list[TrialPlan] = []
    for j in range(n_trials):
        seed_value = trial_rng_seed(base_seed, label_id, j)
        rng = np.random.default_rng(seed_value)
        for _ in range(max_attempts):
            seeds = sample_seeds(members, gamma, rng)
            pool = khop_pool(graph, seeds, k, label_id)
            try:
                negatives = sample_negatives(pool, seeds.size, rng)
            except ResampleRequired:
                continue
            break
        else:
            raise TrialBuildError(
                f"label {label_id}, gamma={gamma}, k={k}: no nonempty negative pool "
                f"within {max_attempts} seed redraws"
            )
        plans.append(
            TrialPlan(
                label_id=int(label_id),
                trial_index=j,
                rng_seed=seed_value,
                gamma=float(gamma),
                k_hop=int(k),
                seeds=tuple(int(s) for s in seeds),
                negatives=tuple(int(v) for v in negatives),
            )
        )
    return plans


def write_manifest(trials, destination) -> None:
    """Write trial plans as one whitespace-delimited line each.

    Columns: label_id trial_index rng_seed gamma k_hop seeds negatives,
    with seeds and negatives comma-joined in draw order.
    """
    def emit(handle):
        handle.write("# label_id trial_index rng_seed gamma k_hop seeds negatives\n")
        for t in trials:
            seeds = ",".join(str(s) for s in t.seeds)
            negatives = ",".join(str(v) for v in t.negatives)
            handle.write(
                f"{t.label_id} {t.trial_index} {t.rng_seed} {t.gamma!r} {t.k_hop} "
                f"{seeds} {negatives}\n"
            )

    if hasattr(destination, "write"):
        emit(destination)
    else:
        with open(destination, "w", encoding="utf-8") as handle:
            emit(handle)


def read_manifest(source) -> list[TrialPlan]:
    """Parse a manifest written by ``write_manifest``."""
    def parse(lines):
        plans = []
        for line in lines:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 7:
                raise ValueError(f"bad manifest line: {stripped!r}")
            plans.append(
                TrialPlan(
                    label_id=int(fields[0]),
                    trial_index=int(fields[1]),
                    rng_seed=int(fields[2]),
                    gamma=float(fields[3]),
                    k_hop=int(fields[4]),
                    seeds=tuple(int(x) for x in fields[5].split(",")),
                    negatives=tuple(int(x) for x in fields[6].split(",")),
                )
            )
        return plans

    if hasattr(source, "read"):
        return parse(source)
    with open(source, "r", encoding="utf-8") as handle:
        return parse(handle)
