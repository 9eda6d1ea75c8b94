"""Recurrent clustering: feature values that depend on earlier clusterings.

Object n of a library is valued against a k-means model of objects 1..n-1:

* sorts get ``100 + sum_{j<=i} 1/(10 * 2**(j-1))`` (always in (100, 100.2)),
* the i-th distinct variable of the object gets ``i`` (capped at 90),
* a reference to the object itself gets ``RECURSIVE_VALUE`` (150),
* an earlier object in cluster j with proximity p gets ``200 + 2j + p``,
* a compound fragment (e.g. the type ``even n``) is turned into its own
  feature vector and classified against the same model, giving ``200 + 2j + p``
  for the nearest cluster.  With no model yet (n = 1) it takes the value of
  its head symbol.

Every one of these bands is disjoint from the others.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyModel, ProximityRange, UnknownComponent
from .features import Valuation, build_feature_matrix, common_dims, fit, pad_and_flatten, standardize
from .kmeans import ClusterModel, choose_k, kmeans
from .terms import (App, Arrow, Fix, Forall, Fun, Let, Match, Name, Sort, TypedLibrary, Var,
                    is_literal, resolve_types)
from .tree import build_term_tree

log = logging.getLogger(__name__)

RECURSIVE_VALUE = 150.0
VAR_CAP = 90
_MAX_NESTING = 32


def sort_value(i):
    if i < 1:
        raise ValueError(f"sort ordinal must be >= 1, got {i}")
    # closed form of the geometric sum
    return 100.0 + 0.2 * (1.0 - 0.5 ** i)


def object_value(cluster_id, proximity):
    if not 0.0 <= proximity <= 1.0:
        raise ProximityRange(f"proximity {proximity} outside [0, 1]")
    if cluster_id < 0:
        raise ValueError(f"negative cluster id {cluster_id}")
    return 200.0 + 2.0 * cluster_id + proximity


def variable_order(t):
    """Distinct variable identifiers of t in first-occurrence (preorder) order."""
    seen = {}

    def visit_var(v):
        if v.recursive:
            return
        seen.setdefault(v.ident, None)

    def walk(u):
        if isinstance(u, Var):
            visit_var(u)
        elif isinstance(u, (Forall, Fun)):
            for v, ty in u.binders:
                visit_var(v)
                walk(ty)
            walk(u.body)
        elif isinstance(u, Arrow):
            walk(u.src)
            walk(u.dst)
        elif isinstance(u, App):
            walk(u.head)
            for a in u.args:
                walk(a)
        elif isinstance(u, Let):
            visit_var(u.var)
            walk(u.value)
            walk(u.body)
        elif isinstance(u, Fix):
            visit_var(u.name)
            for v, ty in u.binders:
                visit_var(v)
                walk(ty)
            walk(u.body)
        elif isinstance(u, Match):
            for s in u.scrutinees:
                walk(s)
            for b in u.branches:
                for p in b.patterns:
                    walk(p)
                walk(b.rhs)

    walk(t)
    return list(seen)


def head_atom(t):
    """The symbol a compound term is 'about': application head or conclusion head."""
    while True:
        if isinstance(t, (Sort, Name, Var)):
            return t
        if isinstance(t, App):
            t = t.head
        elif isinstance(t, Arrow):
            t = t.dst
        elif isinstance(t, (Forall, Fun, Let, Fix)):
            t = t.body
        elif isinstance(t, Match):
            t = t.scrutinees[0]
        else:
            raise UnknownComponent(f"no head symbol in {t!r}")


@dataclass
class ValuationContext:
    object_index: int
    object_name: str
    variables: dict
    prior_model: Optional[ClusterModel] = None
    prior_dims: Optional[tuple] = None
    recursive_constant: float = RECURSIVE_VALUE
    cache: dict = field(default_factory=dict)
    nesting: int = 0

    @classmethod
    def for_object(cls, index, name, term, prior_model=None, prior_dims=None):
        order = variable_order(term)
        if len(order) > VAR_CAP:
            log.warning("%s has %d distinct variables; indices above %d are capped",
                        name, len(order), VAR_CAP)
        return cls(index, name, {v: i + 1 for i, v in enumerate(order)}, prior_model, prior_dims)

    def var_index(self, ident):
        if ident not in self.variables:
            raise UnknownComponent(f"variable {ident!r} has no index in {self.object_name!r}")
        return float(min(self.variables[ident], VAR_CAP))

    def extended(self, fragment):
        """Child context whose variable map also covers variables bound inside ``fragment``."""
        extra = [v for v in variable_order(fragment) if v not in self.variables]
        if not extra:
            variables = self.variables
        else:
            variables = dict(self.variables)
            for v in extra:
                variables[v] = len(variables) + 1
        return ValuationContext(self.object_index, self.object_name, variables, self.prior_model,
                                self.prior_dims, self.recursive_constant, self.cache, self.nesting + 1)

    def valuation(self):
        return Valuation(lambda node: value_component(node.term, self),
                         lambda node: value_component(node.type, self))


def value_component(c, ctx):
    """Feature value of one term or type component."""
    if isinstance(c, Sort):
        return sort_value(c.index)
    if isinstance(c, Var):
        if c.recursive:
            return ctx.recursive_constant
        return ctx.var_index(c.ident)
    if isinstance(c, Name):
        if c.recursive or c.ident == ctx.object_name:
            return ctx.recursive_constant
        if is_literal(c.ident):
            # numerals are valued like their type
            return value_component(c.type, ctx)
        model = ctx.prior_model
        if model is not None and model.names is not None and c.ident in model.names:
            j, p = model.cluster_of(c.ident)
            return object_value(j, p)
        raise UnknownComponent(f"{c.ident!r} is not an earlier object of the library")
    if c is None:
        raise UnknownComponent(f"untyped component in {ctx.object_name!r}")
    if ctx.prior_model is None or ctx.nesting >= _MAX_NESTING:
        return value_component(head_atom(c), ctx)
    j, p = classify_local(c, ctx)
    return object_value(j, p)


def fragment_vector(fragment, ctx, dims):
    sub = ctx.extended(fragment)
    matrix = build_feature_matrix(build_term_tree(fragment), sub.valuation())
    return fit(matrix, dims).values.reshape(-1)


def classify_local(fragment, ctx):
    """Nearest prior cluster (and proximity) of a compound fragment.

    The fragment is valued with the same context, padded or cropped to the
    prior model's matrix dims, and assigned to the nearest centroid.
    """
    model = ctx.prior_model
    if model is None or model.k == 0:
        raise EmptyModel("no earlier clustering to classify against")
    # the same fragment can see different indices for variables it does not bind
    key = (fragment, tuple(ctx.variables.get(v) for v in variable_order(fragment)))
    hit = ctx.cache.get(key)
    if hit is not None:
        return hit
    vec = fragment_vector(fragment, ctx, ctx.prior_dims)
    result = model.nearest(vec)
    ctx.cache[key] = result
    return result


@dataclass
class RecurrentResult:
    model: ClusterModel
    names: list
    matrices: list
    vectors: np.ndarray
    dims: tuple
    granularity: int
    seed: int
    priors: list = field(default_factory=list)

    def vector_of(self, name):
        return self.vectors[self.names.index(name)]

    def matrix_of(self, name):
        return self.matrices[self.names.index(name)]

    def cluster_members(self, name):
        j, _ = self.model.cluster_of(name)
        return [self.names[i] for i in self.model.members(j)]

    def to_json(self):
        out = {"granularity": self.granularity, "seed": self.seed, "objects": len(self.names),
               "dims": list(self.dims)}
        out.update(self.model.to_json())  # k, vector_length, iterations, clusters
        return out


def object_matrix(obj, prior_model, prior_dims):
    ctx = ValuationContext.for_object(obj.index, obj.name, obj.term, prior_model, prior_dims)
    return build_feature_matrix(build_term_tree(obj.term), ctx.valuation())


def recurrent_cluster(lib, g=3, seed=0, standardize_vectors=False, keep_priors=False):
    """Value and cluster every object of ``lib`` in library order.

    ``lib`` may be a parsed or an already resolved library.  Object n is
    valued against ``kmeans(objects[:n], choose_k(n, g), seed)``; the final
    model clusters all objects.  ``standardize_vectors`` only affects that
    final clustering.
    """
    if not isinstance(lib, TypedLibrary):
        lib = resolve_types(lib)
    names = [o.name for o in lib.objects]
    choose_k(len(names), g)  # validates g
    matrices, priors = [], []
    for n, obj in enumerate(lib.objects):
        if n == 0:
            prior, dims = None, None
        else:
            dims = common_dims(matrices)
            prior = kmeans(pad_and_flatten(matrices, dims), choose_k(n, g), seed, names=names[:n])
        if keep_priors:
            priors.append(prior)
        matrices.append(object_matrix(obj, prior, dims))

    if not matrices:
        empty = ClusterModel(np.zeros((0, 0)), np.zeros(0, dtype=int), np.zeros(0), np.zeros(0), [])
        return RecurrentResult(empty, [], [], np.zeros((0, 0)), (0, 0), g, seed, priors)
    dims = common_dims(matrices)
    vectors = pad_and_flatten(matrices, dims)
    data = standardize(vectors) if standardize_vectors else vectors
    model = kmeans(data, choose_k(len(names), g), seed, names=names)
    return RecurrentResult(model, names, matrices, vectors, dims, g, seed, priors)
