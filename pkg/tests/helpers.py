"""Shared instance generators for the test suite."""

import numpy as np

import clfe


def random_labeled_instance(rng, n, D, classes=2):
    """Random Gaussian data with roughly balanced class labels (each class
    guaranteed at least two members so s-cl1/s-cl2 stay feasible)."""
    assert n >= 2 * classes
    X = clfe.DataMatrix(rng.standard_normal((D, n)))
    base = np.repeat(np.arange(1, classes + 1), 2)
    rest = rng.integers(1, classes + 1, size=n - base.size)
    labels = np.concatenate([base, rest])
    labels = labels[rng.permutation(n)]
    return X, clfe.LabelVector(labels, classes)


def graph_for_method(method, X, labels, k):
    if method == "u-cl":
        return clfe.build_u_cl(X, k)
    if method == "s-cl1":
        return clfe.build_s_cl1(labels)
    if method == "s-cl2":
        return clfe.build_s_cl2(X, labels, k)
    raise ValueError(method)


def assert_valid_partition(g):
    """Exhaustive pairwise check of the graph-pair invariants."""
    n = g.sample_count
    for i in range(n):
        assert g.s_pos[i, i] == 0.0 and g.s_neg[i, i] == 0.0
        for j in range(n):
            assert g.s_pos[i, j] == g.s_pos[j, i]
            assert g.s_neg[i, j] == g.s_neg[j, i]
            if i != j:
                assert (g.s_pos[i, j] > 0) != (g.s_neg[i, j] > 0)
                assert 0.0 <= g.s_pos[i, j] <= 1.0
                assert g.s_neg[i, j] in (0.0, 1.0)


def unrolled_adam(grads, P0, h):
    """Oracle: scalar-level unroll of the Adam update recurrences."""
    m = np.zeros_like(P0)
    v = np.zeros_like(P0)
    P = P0.copy()
    for t, g in enumerate(grads, start=1):
        m = h.beta1 * m + (1 - h.beta1) * g
        v = h.beta2 * v + (1 - h.beta2) * g * g
        m_hat = m / (1 - h.beta1**t)
        v_hat = v / (1 - h.beta2**t)
        P = P - h.alpha * m_hat / (np.sqrt(v_hat) + h.epsilon)
    return P


def two_gaussian_clusters(rng, n_per_class, D, separation):
    """Two spherical Gaussian classes with means +/- separation/2 along a
    random unit direction; returns (DataMatrix, LabelVector)."""
    direction = rng.standard_normal(D)
    direction /= np.linalg.norm(direction)
    shift = (separation / 2.0) * direction
    a = rng.standard_normal((D, n_per_class)) + shift[:, None]
    b = rng.standard_normal((D, n_per_class)) - shift[:, None]
    X = np.concatenate([a, b], axis=1)
    labels = np.repeat([1, 2], n_per_class)
    order = rng.permutation(2 * n_per_class)
    return clfe.DataMatrix(X[:, order]), clfe.LabelVector(labels[order], 2)
