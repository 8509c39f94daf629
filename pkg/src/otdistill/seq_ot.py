"""Sequence-level transport: token-to-token cost matrix and Sinkhorn plan.

The cost between token positions i and j is the L1 distance between the
corresponding rows of the aligned truncated matrices. The plan comes from a
fixed number of alternating row/column normalizations of the Gaussian kernel
exp(-C / lambda); its inner product with the cost is the sequence loss.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, InvalidInput, NumericalUnderflow
from .preprocess import AlignedPair


@dataclass(frozen=True)
class SinkhornConfig:
    """Entropy regularization weight and fixed iteration count."""

    regularization: float = 0.1
    iterations: int = 20

    def __post_init__(self):
        if not np.isfinite(self.regularization) or self.regularization <= 0.0:
            raise InvalidConfig(
                f"regularization must be positive, got {self.regularization}"
            )
        if self.iterations < 1:
            raise InvalidConfig(f"iterations must be >= 1, got {self.iterations}")


def _validate_cost(C):
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidInput(f"cost matrix must be square, got shape {C.shape}")
    if not np.isfinite(C).all():
        raise InvalidInput("cost matrix contains non-finite entries")
    if C.min() < 0.0:
        raise InvalidInput("cost matrix entries must be nonnegative")
    return C


def seq_cost_matrix(pair: AlignedPair) -> np.ndarray:
    """T x T matrix of L1 distances between teacher row i and student row j."""
    t, s = pair.teacher, pair.student
    return np.abs(t[:, None, :] - s[None, :, :]).sum(axis=2)


def sinkhorn_plan(C, cfg: SinkhornConfig = SinkhornConfig()) -> np.ndarray:
    """Alternating row/column normalization of exp(-C / regularization).

    Each iteration normalizes every row to sum 1 and then every column to
    sum 1; after convergence both marginals are 1 within tolerance. Raises
    NumericalUnderflow if the initial kernel has an all-zero row or column
    (regularization too small for the cost scale; rescale C or raise it).
    """
    C = _validate_cost(C)
    K = np.exp(-C / cfg.regularization)
    if K.sum(axis=1).min() <= 0.0 or K.sum(axis=0).min() <= 0.0:
        raise NumericalUnderflow(
            "Sinkhorn kernel underflowed to an all-zero row or column; "
            "increase the regularization weight or rescale the cost matrix"
        )
    for _ in range(cfg.iterations):
        K = K / K.sum(axis=1, keepdims=True)
        K = K / K.sum(axis=0, keepdims=True)
    return K


def sd_loss(C, plan) -> float:
    """Frobenius inner product of the transport plan and the cost matrix."""
    C = np.asarray(C, dtype=float)
    plan = np.asarray(plan, dtype=float)
    if C.shape != plan.shape:
        raise InvalidInput(f"shape mismatch: cost {C.shape} vs plan {plan.shape}")
    return float((plan * C).sum())


def sd_grad(pair: AlignedPair, plan) -> np.ndarray:
    """Gradient of sd_loss w.r.t. the student matrix, plan held fixed.

    d<P, C>/d student[j, l] = sum_i P[i, j] * sign(student[j, l] - teacher[i, l])
    with sign(0) = 0.
    """
    t, s = pair.teacher, pair.student
    plan = np.asarray(plan, dtype=float)
    if plan.shape != (t.shape[0], s.shape[0]):
        raise InvalidInput(
            f"plan shape {plan.shape} does not match pair with {t.shape[0]} tokens"
        )
    signs = np.sign(s[None, :, :] - t[:, None, :])  # (i, j, l)
    return np.einsum("ij,ijl->jl", plan, signs)
