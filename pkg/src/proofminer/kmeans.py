"""k-means with k-means++ seeding, deterministic under a seed.

Points are processed in lexicographic order of their contents, so the result
does not depend on the order the caller lists them in, and cluster ids are
assigned by lexicographic order of the final centroids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, GranularityRange, KTooLarge

MAX_ITER = 300
N_INIT = 10


def choose_k(n_objects, g):
    """Number of clusters for ``n_objects`` at granularity ``g`` (1..5)."""
    if g not in (1, 2, 3, 4, 5):
        raise GranularityRange(f"granularity must be in 1..5, got {g!r}")
    if n_objects <= 0:
        return 0
    return min(n_objects, max(1, n_objects // (10 - g)))


@dataclass
class ClusterModel:
    centroids: np.ndarray
    assignment: np.ndarray
    proximities: np.ndarray
    radii: np.ndarray  # per cluster, largest member distance to the centroid
    names: Optional[list] = None
    iterations: int = 0
    inertia_history: list = field(default_factory=list)

    @property
    def k(self):
        return len(self.centroids)

    @property
    def dims(self):
        return self.centroids.shape[1] if self.centroids.ndim == 2 else 0

    def __len__(self):
        return len(self.assignment)

    def members(self, j):
        return [int(i) for i in np.flatnonzero(self.assignment == j)]

    def clusters(self):
        return [self.members(j) for j in range(self.k)]

    def index(self, name):
        if self.names is None:
            raise KeyError(name)
        return self.names.index(name)

    def cluster_of(self, name):
        i = self.index(name)
        return int(self.assignment[i]), float(self.proximities[i])

    def nearest(self, v):
        """(cluster id, proximity) of an arbitrary vector; ties go to the lower id."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dims,):
            raise DimensionMismatch(f"vector of length {v.size}, model has {self.dims}")
        d = np.sqrt(((self.centroids - v) ** 2).sum(axis=1))
        j = int(np.argmin(d))
        return j, _proximity(d[j], self.radii[j])

    def to_json(self):
        names = self.names or [str(i) for i in range(len(self))]
        return {
            "k": self.k,
            "vector_length": self.dims,
            "iterations": self.iterations,
            "clusters": [
                {
                    "id": j,
                    "members": [
                        {"name": names[i], "proximity": round(float(self.proximities[i]), 12)}
                        for i in sorted(self.members(j), key=lambda i: (-self.proximities[i], i))
                    ],
                }
                for j in range(self.k)
            ],
        }

    @classmethod
    def from_json(cls, data):
        """Rebuild a membership-only model (centroids are not part of the dump)."""
        names, assignment, prox = [], [], []
        for c in data["clusters"]:
            for m in c["members"]:
                names.append(m["name"])
                assignment.append(c["id"])
                prox.append(m["proximity"])
        k = data["k"]
        return cls(np.zeros((k, 0)), np.array(assignment, dtype=int), np.array(prox),
                   np.zeros(k), names, data.get("iterations", 0))


def _proximity(d, radius):
    return float(min(1.0, max(0.0, 1.0 - d / (1.0 + radius))))


def proximity(v, model, cluster_id):
    """1 - d(v, c) / (1 + max member distance), clamped to [0, 1]."""
    v = np.asarray(v, dtype=float)
    d = float(np.sqrt(((v - model.centroids[cluster_id]) ** 2).sum()))
    return _proximity(d, model.radii[cluster_id])


def _sq_dists(X, C, xx=None):
    # |x|^2 - 2 x.c + |c|^2, clipped at 0 against rounding
    if xx is None:
        xx = np.einsum("ij,ij->i", X, X)
    cc = np.einsum("ij,ij->i", C, C)
    d2 = xx[:, None] - 2.0 * (X @ C.T) + cc[None, :]
    return np.maximum(d2, 0.0)


def _means(X, labels, k):
    onehot = np.zeros((k, len(X)))
    onehot[labels, np.arange(len(X))] = 1.0
    counts = onehot.sum(axis=1)
    return (onehot @ X) / np.maximum(counts, 1.0)[:, None]


def _seed(X, k, rng, xx=None, gram=None):
    """k-means++ seeding; ``gram`` (X @ X.T) makes each step O(n)."""
    n = len(X)
    if xx is None:
        xx = np.einsum("ij,ij->i", X, X)
    if gram is None:
        gram = X @ X.T

    def sq_to(i):
        return np.maximum(xx + xx[i] - 2.0 * gram[:, i], 0.0)

    chosen = [int(rng.integers(n))]
    closest = sq_to(chosen[0])
    for _ in range(1, k):
        cdf = np.cumsum(closest)
        total = cdf[-1]
        if total > 0:
            # D^2 sampling by inverse CDF
            i = min(int(np.searchsorted(cdf, rng.random() * total, side="right")), n - 1)
        else:
            i = int(rng.integers(n))
        chosen.append(i)
        closest = np.minimum(closest, sq_to(i))
    return X[chosen].copy()


def _repair(X, labels, C, d2, k):
    """Give each empty cluster the point farthest from its own centroid."""
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j]:
            continue
        own = d2[np.arange(len(X)), labels].copy()
        own[counts[labels] < 2] = -1.0
        i = int(np.argmax(own))
        labels[i] = j
        C[j] = X[i]
        d2[i, j] = 0.0
    return labels


def _inertia(X, labels, C):
    diff = X - C[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def _lex_order(C):
    return np.lexsort(C.T[::-1]) if C.shape[1] else np.arange(len(C))


def _lloyd(Xs, k, rng, max_iter, xx, gram):
    C = _seed(Xs, k, rng, xx, gram)
    labels = None
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        # keep centroids in lexicographic order so that argmin ties already
        # go to the lower final cluster id
        rank = _lex_order(C)
        C = C[rank]
        if labels is not None:
            inverse = np.empty(k, dtype=int)
            inverse[rank] = np.arange(k)
            labels = inverse[labels]
        d2 = _sq_dists(Xs, C, xx)
        new = np.argmin(d2, axis=1)
        new = _repair(Xs, new, C, d2, k)
        C = _means(Xs, new, k)
        history.append(_inertia(Xs, new, C))
        if labels is not None and np.array_equal(new, labels):
            labels = new
            break
        labels = new
    return C, labels, history, it


def kmeans(vectors, k, seed=0, max_iter=MAX_ITER, names=None, n_init=N_INIT):
    """Lloyd's algorithm from ``n_init`` k-means++ seedings; the lowest final inertia wins.

    All seedings draw from one generator seeded with ``seed``, so the result is
    a pure function of (vectors, k, seed).
    """
    X = _as_matrix(vectors)
    n = len(X)
    if k < 1 or k > n:
        raise KTooLarge(f"k={k} with {n} vectors")

    order = np.lexsort(X.T[::-1]) if X.shape[1] else np.arange(n)
    Xs = X[order]
    rng = np.random.default_rng(seed)
    xx = np.einsum("ij,ij->i", Xs, Xs)
    gram = Xs @ Xs.T
    best = None
    for _ in range(max(1, n_init)):
        run = _lloyd(Xs, k, rng, max_iter, xx, gram)
        if best is None or run[2][-1] < best[2][-1]:
            best = run
    C, labels, history, it = best

    # canonical ids: lexicographic order of centroids
    rank = _lex_order(C)
    relabel = np.empty(k, dtype=int)
    relabel[rank] = np.arange(k)
    C = C[rank]
    labels = relabel[labels]

    d = np.sqrt(((Xs - C[labels]) ** 2).sum(axis=1))
    radii = np.zeros(k)
    for j in range(k):
        if np.any(labels == j):
            radii[j] = d[labels == j].max()
    prox = np.array([_proximity(d[i], radii[labels[i]]) for i in range(n)])

    assignment = np.empty(n, dtype=int)
    proximities = np.empty(n)
    assignment[order] = labels
    proximities[order] = prox
    return ClusterModel(C, assignment, proximities, radii,
                        list(names) if names is not None else None, it, history)


def _as_matrix(vectors):
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(float)
    rows = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    if not rows:
        return np.zeros((0, 0))
    if len({r.size for r in rows}) > 1:
        raise DimensionMismatch("feature vectors differ in length")
    return np.stack(rows)
