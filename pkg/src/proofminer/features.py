"""Feature matrices over term trees and their fixed-length vector form.

A tree of depth n and width m becomes an ``(n, m, 3)`` array: cell ``(i, j)``
holds ``(term value, type value, parent level index)`` for the node at depth
``i`` and level index ``j``.  Gallina nodes put their (negative) token value in
the term slot and -1 in the type slot; the root's parent index is -1; cells
without a node stay ``(0, 0, 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValuationMiss
from .tree import GallinaToken, tree_dims

# binder-like tokens sit next to each other
GALLINA_VALUES = {
    GallinaToken.FORALL: -1.0,
    GallinaToken.FUN: -2.0,
    GallinaToken.ARROW: -3.0,
    GallinaToken.LET: -4.0,
    GallinaToken.FIX: -5.0,
    GallinaToken.MATCH: -6.0,
    GallinaToken.AT_SIGN: -7.0,
}


def gallina_value(token):
    return GALLINA_VALUES[token]


@dataclass
class Valuation:
    """term_fn / type_fn receive the tree node and return a positive value."""

    term_fn: Callable
    type_fn: Callable
    gallina_fn: Callable = gallina_value


@dataclass
class FeatureMatrix:
    values: np.ndarray  # shape (depth, width, 3)

    @property
    def depth(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def dims(self):
        return self.values.shape[:2]

    def mask(self):
        """True where a node is present."""
        return np.any(self.values != 0, axis=2)

    def scalar_view(self):
        """The n x 3m layout used for display."""
        return self.values.reshape(self.depth, 3 * self.width)


def _call(fn, node, what):
    try:
        v = fn(node)
    except KeyError as e:
        raise ValuationMiss(f"no {what} value for {node.label!r}: {e}") from None
    if v is None:
        raise ValuationMiss(f"no {what} value for {node.label!r}")
    return float(v)


def build_feature_matrix(tree, val):
    depth, width = tree_dims(tree)
    out = np.zeros((depth, width, 3))
    for node in tree.nodes:
        parent = tree.parent_of(node)
        p = parent.level_index if parent is not None else -1
        if node.is_gallina:
            out[node.depth, node.level_index] = (_call(val.gallina_fn, node.token, "Gallina"), -1.0, p)
        else:
            out[node.depth, node.level_index] = (_call(val.term_fn, node, "term"),
                                                 _call(val.type_fn, node, "type"), p)
    return FeatureMatrix(out)


def fit(matrix, dims):
    """Zero-pad (or crop) a matrix to ``dims`` = (depth, width)."""
    n, m = dims
    out = np.zeros((n, m, 3))
    a = matrix.values if isinstance(matrix, FeatureMatrix) else matrix
    dn, dm = min(n, a.shape[0]), min(m, a.shape[1])
    out[:dn, :dm] = a[:dn, :dm]
    return FeatureMatrix(out)


def common_dims(matrices):
    return (max(m.depth for m in matrices), max(m.width for m in matrices))


def pad_and_flatten(matrices, dims=None):
    """Pad every matrix to common dims and flatten row-major.

    Returns an array with one row per matrix, each of length depth*width*3,
    component order (term, type, parent) inside each cell.
    """
    if not matrices:
        return np.zeros((0, 0))
    dims = dims or common_dims(matrices)
    return np.stack([fit(m, dims).values.reshape(-1) for m in matrices])


def unflatten(vector, dims):
    n, m = dims
    return FeatureMatrix(np.asarray(vector, dtype=float).reshape(n, m, 3).copy())


def column_labels(dims):
    n, m = dims
    return [f"d{i}_j{j}_{c}" for i in range(n) for j in range(m) for c in ("term", "type", "parent")]


def density(matrices, dims=None):
    """Fraction of nonzero scalar cells after padding to common dims."""
    vecs = pad_and_flatten(matrices, dims)
    if vecs.size == 0:
        return 0.0
    return float(np.count_nonzero(vecs)) / vecs.size


def standardize(vectors):
    """Per-dimension z-scores; constant columns map to 0."""
    vectors = np.asarray(vectors, dtype=float)
    mu = vectors.mean(axis=0)
    sd = vectors.std(axis=0)
    sd[sd == 0] = 1.0
    return (vectors - mu) / sd
