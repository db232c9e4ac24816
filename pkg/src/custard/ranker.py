"""Scikit-learn style transductive wrapper around the propagation pipeline."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .graph import SYMMETRIC, Graph
from .metrics import rank_validation
from .propagation import PropagationConfig, custard, custard_sq


def check_adjacency(X) -> sp.csr_matrix:
    """Validate a square, symmetric, nonnegative adjacency with no isolated nodes."""
    mat = sp.csr_matrix(X, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {mat.shape}")
    if mat.nnz:
        if not np.all(np.isfinite(mat.data)):
            raise ValueError("adjacency contains non-finite entries")
        if np.any(mat.data < 0):
            raise ValueError("adjacency contains negative entries")
    gap = mat - mat.T
    if gap.nnz and np.max(np.abs(gap.data)) > 1e-12:
        raise ValueError("adjacency must be symmetric")
    degrees = np.asarray(mat.sum(axis=1)).ravel()
    if np.any(degrees <= 0):
        bad = np.flatnonzero(degrees <= 0)
        raise ValueError(f"adjacency has isolated nodes: {bad.tolist()}")
    return mat


def check_partial_labels(y, n: int) -> np.ndarray:
    """Validate a partial label vector: 1 positive, 0 negative, -1 unlabeled."""
    arr = np.asarray(y)
    if arr.shape != (n,):
        raise ValueError(f"y must have shape ({n},), got {arr.shape}")
    arr = arr.astype(np.int64)
    allowed = np.isin(arr, (-1, 0, 1))
    if not allowed.all():
        bad = np.unique(np.asarray(y)[~allowed])
        raise ValueError(f"y entries must be -1, 0, or 1; got {bad.tolist()}")
    return arr


class CustardRanker(BaseEstimator):
    """Rank unlabeled graph nodes by affinity to positive examples.

    A transductive estimator: ``fit`` takes the full graph adjacency plus a
    partial label vector, runs the restart-walk propagation with negative
    redirection, and stores one score per node. ``predict`` returns the
    non-training nodes ranked by descending score.

    Parameters
    ----------
    alpha : float, default=0.05
        Restart probability of the underlying walk.
    redirection : float, default=0.9
        Fraction of transition mass headed into negative nodes that is
        converted into restarts toward the positives.
    normalization : {"symmetric", "column"}, default="symmetric"
        Degree normalization applied to the adjacency.
    tol : float, default=1e-9
        L1 convergence threshold of the power iteration.
    max_iter : int, default=1000
        Iteration cap.

    Attributes
    ----------
    scores_ : ndarray of shape (n_nodes,)
        Steady-state probability mass per node.
    training_ : ndarray
        Nodes supplied as labels (and the query, if any); excluded from
        ``predict`` output.
    n_iter_ : int
        Iterations used by the solver.
    converged_ : bool
        Whether the tolerance was reached within ``max_iter``.

    Examples
    --------
    >>> import numpy as np
    >>> A = np.array([[0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 0, 1], [0, 0, 1, 0]])
    >>> y = np.array([1, -1, -1, 0])
    >>> ranked = CustardRanker().fit(A, y).predict()
    """

    def __init__(
        self,
        alpha: float = 0.05,
        redirection: float = 0.9,
        normalization: str = SYMMETRIC,
        tol: float = 1e-9,
        max_iter: int = 1000,
    ):
        self.alpha = alpha
        self.redirection = redirection
        self.normalization = normalization
        self.tol = tol
        self.max_iter = max_iter

    def _config(self) -> PropagationConfig:
        return PropagationConfig(
            alpha=self.alpha,
            redirection=self.redirection,
            tolerance=self.tol,
            max_iterations=self.max_iter,
            variant=self.normalization,
        )

    def fit(self, X, y, query: int | None = None):
        """Propagate scores over the graph ``X`` from the labels in ``y``.

        Parameters
        ----------
        X : array-like or sparse matrix of shape (n_nodes, n_nodes)
            Symmetric nonnegative adjacency.
        y : array-like of shape (n_nodes,)
            1 for positive examples, 0 for negative examples, -1 unlabeled.
            At least one positive is required.
        query : int, optional
            Switch to single-query mode: the query node is wired to every
            positive it is not yet adjacent to and becomes the only seed.
        """
        config = self._config()
        adjacency = check_adjacency(X)
        n = adjacency.shape[0]
        labels = check_partial_labels(y, n)
        positives = np.flatnonzero(labels == 1)
        negatives = np.flatnonzero(labels == 0)
        if positives.size == 0:
            raise ValueError("y must mark at least one node as positive")
        graph = Graph.from_adjacency(adjacency)
        if query is None:
            result = custard(graph, positives, negatives, config)
            training = np.union1d(positives, negatives)
        else:
            query = int(query)
            result = custard_sq(graph, query, positives, negatives, config)
            training = np.union1d(np.union1d(positives, negatives), [query])
        self.scores_ = result.p
        self.n_iter_ = result.iterations_used
        self.converged_ = result.converged
        self.training_ = training
        self.n_nodes_ = n
        return self

    def score_samples(self, X=None) -> np.ndarray:
        """Fitted per-node scores; ``X`` is accepted for API symmetry and ignored."""
        check_is_fitted(self, "scores_")
        return self.scores_.copy()

    def predict(self, X=None) -> np.ndarray:
        """Non-training nodes in descending score order (ties by node id)."""
        check_is_fitted(self, "scores_")
        return rank_validation(self.scores_, self.training_).nodes.copy()
