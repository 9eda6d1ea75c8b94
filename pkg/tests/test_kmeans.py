import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from proofminer.errors import DimensionMismatch, GranularityRange, KTooLarge
from proofminer.kmeans import ClusterModel, MAX_ITER, choose_k, kmeans, proximity

# library sizes of the evaluation table rows, plus the 457-object run
TABLE_SIZES = [1389, 49, 306, 80, 145, 457]


def best_two_partition(X):
    """Exhaustive minimum-SSE split of a small point set into two nonempty groups."""
    n = len(X)
    best, best_cost = None, np.inf
    for mask in range(1, 2 ** (n - 1)):
        a = [i for i in range(n) if mask >> i & 1]
        b = [i for i in range(n) if not mask >> i & 1]
        cost = sum(((X[g] - X[g].mean(axis=0)) ** 2).sum() for g in (a, b))
        if cost < best_cost:
            best, best_cost = {frozenset(a), frozenset(b)}, cost
    return best


def partition(model):
    return {frozenset(c) for c in model.clusters() if c}


def test_choose_k_examples():
    assert choose_k(457, 5) == 91
    assert choose_k(1389, 1) == 154
    assert choose_k(3, 5) == 1
    assert choose_k(0, 3) == 0


@pytest.mark.parametrize("g", [0, 6, 2.5])
def test_choose_k_range(g):
    with pytest.raises(GranularityRange):
        choose_k(10, g)


def test_choose_k_over_table_sizes():
    for n in TABLE_SIZES:
        for g in (1, 3, 5):
            k = choose_k(n, g)
            assert 1 <= k <= n
            assert k == max(1, n // (10 - g))


def test_separated_groups_match_brute_force():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0, 1, (4, 3)), rng.normal(20, 1, (4, 3))])
    model = kmeans(X, 2, seed=0)
    assert partition(model) == best_two_partition(X)
    assert partition(model) == {frozenset(range(4)), frozenset(range(4, 8))}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_two_clusters_reach_the_optimum_on_small_sets(s):
    rng = np.random.default_rng(s)
    n = int(rng.integers(3, 9))
    X = rng.normal(0, 1, (n, 2))
    X[: n // 2] += 8.0  # two blobs far apart
    assert partition(kmeans(X, 2, seed=s)) == best_two_partition(X)


def test_k_equals_n():
    X = np.arange(12, dtype=float).reshape(6, 2)
    model = kmeans(X, 6, seed=1)
    assert sorted(len(c) for c in model.clusters()) == [1] * 6
    assert np.all(model.proximities == 1.0)


def test_identical_vectors_one_cluster():
    X = np.tile([1.0, 2.0, 3.0], (5, 1))
    model = kmeans(X, 1)
    assert np.array_equal(model.centroids[0], [1.0, 2.0, 3.0])
    assert np.all(model.assignment == 0)


def test_errors():
    with pytest.raises(KTooLarge):
        kmeans(np.zeros((3, 2)), 4)
    with pytest.raises(KTooLarge):
        kmeans(np.zeros((3, 2)), 0)
    with pytest.raises(DimensionMismatch):
        kmeans([np.zeros(2), np.zeros(3)], 1)
    model = kmeans(np.eye(3), 1)
    with pytest.raises(DimensionMismatch):
        model.nearest(np.zeros(4))


def test_proximity_formula():
    X = np.array([[0.0], [2.0], [4.0]])
    model = kmeans(X, 1)
    c = model.centroids[0]
    assert proximity(c, model, 0) == 1.0
    # farthest member at distance D gets 1/(1+D)
    assert proximity(X[0], model, 0) == pytest.approx(1 / 3)
    assert model.radii[0] == 2.0


def test_nearest_tie_goes_to_lower_id():
    model = ClusterModel(np.array([[0.0], [2.0]]), np.array([0, 1]), np.ones(2), np.zeros(2))
    assert model.nearest(np.array([1.0]))[0] == 0


def test_ids_follow_centroid_order():
    X = np.array([[10.0], [10.5], [0.0], [0.5], [5.0], [5.5]])
    model = kmeans(X, 3, seed=2)
    assert list(model.centroids[:, 0]) == sorted(model.centroids[:, 0])
    assert model.assignment.tolist() == [2, 2, 0, 0, 1, 1]


def test_json_dump():
    X = np.array([[0.0], [1.0], [9.0]])
    model = kmeans(X, 2, names=["a", "b", "c"])
    data = model.to_json()
    assert data["k"] == 2 and data["vector_length"] == 1
    back = ClusterModel.from_json(data)
    assert sorted(back.names) == ["a", "b", "c"]
    assert back.cluster_of("c")[0] == model.cluster_of("c")[0]


vectors = arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)),
                 elements=st.floats(-50, 50, allow_nan=False, width=32))


@settings(max_examples=60, deadline=None)
@given(vectors, st.integers(1, 4), st.integers(0, 99))
def test_objective_non_increasing(X, k, seed):
    k = min(k, len(X))
    model = kmeans(X, k, seed=seed)
    h = model.inertia_history
    assert 1 <= len(h) <= MAX_ITER
    for a, b in zip(h, h[1:]):
        assert b <= a * (1 + 1e-12) + 1e-9


@settings(max_examples=60, deadline=None)
@given(vectors, st.integers(1, 4), st.integers(0, 99))
def test_deterministic(X, k, seed):
    k = min(k, len(X))
    a, b = kmeans(X, k, seed=seed), kmeans(X, k, seed=seed)
    assert np.array_equal(a.assignment, b.assignment)
    assert np.array_equal(a.proximities, b.proximities)


@settings(max_examples=60, deadline=None)
@given(vectors, st.integers(1, 4), st.integers(0, 99), st.randoms(use_true_random=False))
def test_permutation_equivariance(X, k, seed, rnd):
    k = min(k, len(X))
    perm = list(range(len(X)))
    rnd.shuffle(perm)
    a = kmeans(X, k, seed=seed)
    b = kmeans(X[perm], k, seed=seed)
    # identical vectors cannot be told apart, so compare per group of equal rows
    groups = {}
    for i, row in enumerate(X):
        groups.setdefault(row.tobytes(), []).append(i)
    where = {old: new for new, old in enumerate(perm)}
    for members in groups.values():
        want = sorted(zip(a.assignment[members], a.proximities[members]))
        got = sorted(zip(b.assignment[[where[i] for i in members]], b.proximities[[where[i] for i in members]]))
        assert got == want


def test_proximity_in_unit_interval_on_1000_vectors():
    rng = np.random.default_rng(0)
    X = rng.normal(0, 10, (1000, 6))
    model = kmeans(X, 12, seed=0)
    assert np.all((model.proximities >= 0) & (model.proximities <= 1))
    probes = rng.normal(0, 30, (1000, 6))
    for v in probes:
        for j in range(model.k):
            assert 0.0 <= proximity(v, model, j) <= 1.0


def test_every_point_assigned_once_and_centroids_are_means():
    rng = np.random.default_rng(5)
    X = rng.normal(0, 1, (40, 3))
    model = kmeans(X, 5, seed=5)
    assert sorted(itertools.chain.from_iterable(model.clusters())) == list(range(40))
    for j in range(model.k):
        assert np.allclose(model.centroids[j], X[model.members(j)].mean(axis=0))
