"""Steady-state restart-walk solvers and the unified transition+teleport operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import (
    COLUMN_STOCHASTIC,
    SYMMETRIC,
    VARIANTS,
    Graph,
    TransitionMatrix,
    column_stochastic,
    symmetric_normalize,
)


@dataclass(frozen=True)
class PropagationConfig:
    """Solver hyperparameters shared by every propagation entry point.

    ``redirection`` is the fraction of transition mass headed into a negative
    node that is converted into restarts toward the seeds.
    """

    alpha: float = 0.05
    redirection: float = 0.9
    tolerance: float = 1e-9
    max_iterations: int = 1000
    variant: str = SYMMETRIC

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.redirection <= 1.0:
            raise ValueError(f"redirection must be in [0, 1], got {self.redirection}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass(eq=False)
class ScoreVector:
    """Converged (or best-effort) node scores plus iteration bookkeeping."""

    p: np.ndarray
    iterations_used: int
    converged: bool


@dataclass(eq=False)
class RestartModel:
    """Rank-one teleport operator.

    Walk mass leaves node ``v`` with probability ``mass[v]`` and lands
    uniformly on the seed set; the full n-by-n matrix is never formed, so
    storage stays at one vector plus the seed list.
    """

    seeds: np.ndarray
    mass: np.ndarray
    alpha: float

    def seed_inflow(self, p: np.ndarray) -> float:
        """Restart mass arriving at each individual seed for scores ``p``."""
        return float(self.mass @ p) / self.seeds.size


def _node_array(nodes, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(nodes, dtype=np.int64))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"{name} contains out-of-range node ids")
    if np.unique(arr).size != arr.size:
        raise ValueError(f"{name} contains duplicate node ids")
    return arr


def _seed_array(seeds, n: int) -> np.ndarray:
    arr = _node_array(seeds, n, "seeds")
    if arr.size == 0:
        raise ValueError("seed set must be nonempty")
    return arr


def _restart_vector(n: int, seeds: np.ndarray) -> np.ndarray:
    r = np.zeros(n)
    r[seeds] = 1.0 / seeds.size
    return r


def _require_variant(transition: TransitionMatrix, variant: str, op: str) -> None:
    if transition.variant != variant:
        raise ValueError(f"{op} needs a {variant!r} transition matrix, got {transition.variant!r}")


def rwr_classical(transition: TransitionMatrix, seeds, config: PropagationConfig) -> ScoreVector:
    """Fixed point of ``p = (1-alpha) M p + alpha r`` on a column-stochastic M.

    ``r`` is uniform over the seeds. Iterates from ``p = r`` until the L1
    change drops below ``config.tolerance``.
    """
    _require_variant(transition, COLUMN_STOCHASTIC, "rwr_classical")
    seeds = _seed_array(seeds, transition.n)
    mat = transition.matrix
    hold = 1.0 - config.alpha
    teleport = config.alpha / seeds.size
    p = _restart_vector(transition.n, seeds)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        nxt = hold * (mat @ p)
        nxt[seeds] += teleport
        delta = float(np.abs(nxt - p).sum())
        p = nxt
        if delta < config.tolerance:
            converged = True
            break
    p /= np.abs(p).sum()
    return ScoreVector(p, iterations, converged)


def rwr_symmetric(transition: TransitionMatrix, seeds, config: PropagationConfig) -> ScoreVector:
    """Renormalized iteration ``p <- [(1-alpha) M p + alpha r] / |.|_1``.

    The symmetric normalization does not preserve column sums, so each
    iterate is rescaled to unit L1 norm to keep a probability reading.
    """
    _require_variant(transition, SYMMETRIC, "rwr_symmetric")
    seeds = _seed_array(seeds, transition.n)
    mat = transition.matrix
    hold = 1.0 - config.alpha
    teleport = config.alpha / seeds.size
    p = _restart_vector(transition.n, seeds)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        nxt = hold * (mat @ p)
        nxt[seeds] += teleport
        total = float(np.abs(nxt).sum())
        if total == 0.0:
            raise ValueError("iterate collapsed to the zero vector")
        nxt /= total
        delta = float(np.abs(nxt - p).sum())
        p = nxt
        if delta < config.tolerance:
            converged = True
            break
    return ScoreVector(p, iterations, converged)


def build_operator(
    transition: TransitionMatrix, seeds, alpha: float
) -> tuple[sp.csc_matrix, RestartModel]:
    """Split the restart walk into ``Q = (1-alpha) M`` plus a rank-one teleport.

    The teleport starts uniform: every node sends ``alpha`` of its outgoing
    mass to the seeds. ``alpha`` may be 0 or 1 here; the interesting range
    is enforced by PropagationConfig.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    seeds = _seed_array(seeds, transition.n)
    q = (transition.matrix * (1.0 - alpha)).tocsc()
    mass = np.full(transition.n, float(alpha))
    return q, RestartModel(seeds, mass, float(alpha))


def apply_redirection(
    q: sp.spmatrix, restart: RestartModel, negatives, redirection: float
) -> tuple[sp.csc_matrix, RestartModel]:
    """Redirect transition mass flowing into negative nodes toward the seeds.

    For each negative ``u`` and each neighbor column ``v``, a ``redirection``
    fraction of ``Q[u, v]`` moves into the teleport mass of ``v``; the
    remaining fraction stays on the edge. Column sums of the combined
    operator are unchanged. Inputs are not mutated.
    """
    if not 0.0 <= redirection <= 1.0:
        raise ValueError(f"redirection must be in [0, 1], got {redirection}")
    n = q.shape[0]
    negatives = _node_array(negatives, n, "negatives")
    if np.intersect1d(negatives, restart.seeds).size:
        raise ValueError("negatives must be disjoint from the seed set")
    if negatives.size == 0:
        return sp.csc_matrix(q, copy=True), RestartModel(
            restart.seeds.copy(), restart.mass.copy(), restart.alpha
        )
    indicator = np.zeros(n)
    indicator[negatives] = 1.0
    inflow = np.asarray(q.T @ indicator).ravel()  # mass each column sends into negatives
    mass = restart.mass + redirection * inflow
    scale = np.ones(n)
    scale[negatives] = 1.0 - redirection
    q_prime = (sp.diags(scale) @ q).tocsc()
    return q_prime, RestartModel(restart.seeds.copy(), mass, restart.alpha)


def propagate(q: sp.spmatrix, restart: RestartModel, config: PropagationConfig) -> ScoreVector:
    """Leading-eigenvector iteration of the combined transition+teleport operator.

    Applies ``Q p`` sparsely and the rank-one teleport as a dot product, then
    renormalizes to unit L1 norm; the teleport matrix is never materialized.
    Starts from the uniform seed distribution and stops when the L1 change
    drops below ``config.tolerance``.
    """
    n = q.shape[0]
    seeds = restart.seeds
    share = 1.0 / seeds.size
    p = _restart_vector(n, seeds)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        nxt = q @ p
        nxt[seeds] += (restart.mass @ p) * share
        total = float(np.abs(nxt).sum())
        if total == 0.0:
            raise ValueError("iterate collapsed to the zero vector")
        nxt /= total
        delta = float(np.abs(nxt - p).sum())
        p = nxt
        if delta < config.tolerance:
            converged = True
            break
    return ScoreVector(p, iterations, converged)


def _transition_for(graph: Graph, config: PropagationConfig, transition) -> TransitionMatrix:
    if transition is None:
        builder = symmetric_normalize if config.variant == SYMMETRIC else column_stochastic
        return builder(graph)
    if transition.variant != config.variant:
        raise ValueError(
            f"precomputed transition is {transition.variant!r}, config wants {config.variant!r}"
        )
    return transition


def custard(
    graph: Graph,
    positives,
    negatives,
    config: PropagationConfig,
    *,
    transition: TransitionMatrix | None = None,
) -> ScoreVector:
    """Full pipeline: normalize, build the operator, redirect, propagate.

    ``positives`` become the seed set; with no negatives the result matches
    the plain restart walk. ``transition`` may carry a precomputed
    normalization of ``graph`` to share across calls.
    """
    trans = _transition_for(graph, config, transition)
    q, restart = build_operator(trans, positives, config.alpha)
    negatives = _node_array(negatives if negatives is not None else [], graph.n, "negatives")
    if negatives.size:
        q, restart = apply_redirection(q, restart, negatives, config.redirection)
    return propagate(q, restart, config)


def custard_sq(
    graph: Graph,
    query: int,
    positives,
    negatives,
    config: PropagationConfig,
    *,
    transition: TransitionMatrix | None = None,
) -> ScoreVector:
    """Single-query variant: wire the query to its positives, then seed only the query.

    Unit-weight edges are added from the query to each positive it is not
    already adjacent to; positives otherwise stay out of the seed set.
    """
    n = graph.n
    query = int(query)
    if not 0 <= query < n:
        raise ValueError(f"query node {query} out of range")
    positives = _node_array(positives, n, "positives")
    negatives = _node_array(negatives if negatives is not None else [], n, "negatives")
    if query in negatives:
        raise ValueError("query must not appear among the negatives")
    missing = [
        (query, int(p)) for p in positives if p != query and not graph.has_edge(query, int(p))
    ]
    if missing:
        augmented = graph.with_edges_added(missing)
        return custard(augmented, [query], negatives, config)
    return custard(graph, [query], negatives, config, transition=transition)
