"""Independent reference routines used only by the tests."""

import itertools

import numpy as np


def brute_force_min_transport(C):
    """Minimum of sum_i C[i, perm(i)] over all permutations, by enumeration."""
    n = C.shape[0]
    idx = np.arange(n)
    return min(
        float(C[idx, list(perm)].sum()) for perm in itertools.permutations(range(n))
    )


def two_by_two_sinkhorn_limit(off_diag_cost, lam):
    """Closed-form Sinkhorn fixed point for cost [[0, c], [c, 0]].

    The limit is [[a, 1-a], [1-a, a]] with a = 1 / (1 + exp(-c / lam)).
    """
    a = 1.0 / (1.0 + np.exp(-off_diag_cost / lam))
    return np.array([[a, 1.0 - a], [1.0 - a, a]])


def sinkhorn_scaling_form(C, lam, iterations):
    """Diagonal-scaling formulation of the alternating normalization."""
    K = np.exp(-C / lam)
    n = C.shape[0]
    v = np.ones(n)
    for _ in range(iterations):
        u = 1.0 / (K @ v)
        v = 1.0 / (K.T @ u)
    return np.diag(u) @ K @ np.diag(v)
