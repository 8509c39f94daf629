"""Cross-entropy plus the weighted multi-level transport objective.

total = ce + alpha * (had + beta * sl + gamma * sd)

The token losses (ce, had, sl) use one softmax temperature, the sequence loss
its own; ranking and truncation are computed once per temperature. Gradients
are with respect to the raw student logits, with the rank/truncation
selections and the Sinkhorn plan held fixed.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import (PROB_FLOOR, safe_log, softmax_backward, softmax_rows,
                   validate_logits, validate_probs)
from .errors import InvalidInput
from .preprocess import SUM_SORT, AlignedPair, RankSelection, align_and_truncate
from .seq_ot import SinkhornConfig, sd_grad, sd_loss, seq_cost_matrix, sinkhorn_plan
from .token_ot import had_loss, sl_loss


@dataclass(frozen=True)
class LossWeights:
    """Component weights, temperatures, and truncation width."""

    alpha: float = 0.15
    beta: float = 0.1
    gamma: float = 0.1
    tau_sl: float = 1.0
    tau_sd: float = 2.0
    k: int = 50
    sinkhorn: SinkhornConfig = field(default_factory=SinkhornConfig)
    match_mode: str = SUM_SORT

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidInput(f"{name} must be finite and nonnegative, got {v}")
        if self.tau_sl <= 0 or self.tau_sd <= 0:
            raise InvalidInput("temperatures must be positive")
        if self.k < 1:
            raise InvalidInput(f"truncation width must be >= 1, got {self.k}")


@dataclass(frozen=True)
class LossBreakdown:
    """All loss components plus the weighted total and the alignments used."""

    ce: float
    had: float
    sl: float
    sd: float
    total: float
    rank: RankSelection
    rank_seq: RankSelection

    @property
    def k_eff(self) -> int:
        return self.rank.k


@dataclass(frozen=True)
class PipelineState:
    """Frozen alignment selections, Sinkhorn plan, and resolved labels.

    Holding this fixed makes the objective a plain differentiable function
    of the raw student logits (away from absolute-value kinks).
    """

    length: int
    labels: np.ndarray
    rank: RankSelection
    rank_seq: RankSelection
    plan: np.ndarray


def ce_loss(student_probs, labels):
    """Negative log-likelihood of the labels under the student rows.

    Returns (value, grad) where grad is the gradient with respect to the raw
    student logits under a unit-temperature softmax: probs - onehot(labels).
    """
    probs = validate_probs(student_probs)
    labels = _validate_labels(labels, probs.shape[0], probs.shape[1])
    rows = np.arange(probs.shape[0])
    value = -float(safe_log(probs[rows, labels]).sum())
    grad = probs.copy()
    grad[rows, labels] -= 1.0
    return value, grad


def _validate_labels(labels, length, vocab):
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] < length:
        raise InvalidInput(
            f"need at least {length} labels, got shape {labels.shape}"
        )
    labels = labels[:length].astype(int)
    if labels.min() < 0 or labels.max() >= vocab:
        raise InvalidInput(f"label out of range [0, {vocab})")
    return labels


def _pseudo_labels(teacher_probs, rank: RankSelection, n_student):
    """Teacher per-token argmax mapped through the rank alignment.

    The argmax teacher dimension's position in the teacher ranking indexes
    the matched student dimension; positions beyond the student vocabulary
    clamp to its last ranked dimension.
    """
    inv = np.argsort(rank.teacher_perm)
    pos = inv[np.argmax(teacher_probs, axis=1)]
    pos = np.minimum(pos, n_student - 1)
    return rank.student_perm[pos]


def _select(probs, perm, k):
    return probs[:, perm][:, :k]


def _pair_from(t_probs, s_probs, rank: RankSelection) -> AlignedPair:
    return AlignedPair(
        teacher=_select(t_probs, rank.teacher_perm, rank.k),
        student=_select(s_probs, rank.student_perm, rank.k),
    )


def _aligned_logits(teacher_logits, student_logits):
    t = validate_logits(teacher_logits)
    s = validate_logits(student_logits)
    length = min(t.shape[0], s.shape[0])
    if length == 0:
        raise InvalidInput("no overlapping tokens between teacher and student")
    return t[:length], s[:length], length


def build_state(teacher_logits, student_logits, labels=None, w=LossWeights()):
    """Compute the alignments and Sinkhorn plan for a teacher/student pair.

    With labels=None, per-token pseudo-labels are derived from the teacher
    argmax through the rank alignment.
    """
    t, s, length = _aligned_logits(teacher_logits, student_logits)

    t1 = softmax_rows(t, w.tau_sl)
    s1 = softmax_rows(s, w.tau_sl)
    _, rank = align_and_truncate(t1, s1, w.k, mode=w.match_mode)

    t2 = softmax_rows(t, w.tau_sd)
    s2 = softmax_rows(s, w.tau_sd)
    pair2, rank_seq = align_and_truncate(t2, s2, w.k, mode=w.match_mode)
    plan = sinkhorn_plan(seq_cost_matrix(pair2), w.sinkhorn)

    if labels is None:
        resolved = _pseudo_labels(t1, rank, s.shape[1])
    else:
        resolved = _validate_labels(labels, length, s.shape[1])
    return PipelineState(
        length=length, labels=resolved, rank=rank, rank_seq=rank_seq, plan=plan
    )


def total_loss_frozen(state: PipelineState, teacher_logits, student_logits,
                      w=LossWeights()) -> LossBreakdown:
    """Evaluate every component with the state's selections and plan fixed."""
    t, s, length = _aligned_logits(teacher_logits, student_logits)
    if length != state.length:
        raise InvalidInput("state was built for a different token count")

    t1 = softmax_rows(t, w.tau_sl)
    s1 = softmax_rows(s, w.tau_sl)
    rows = np.arange(length)
    ce = -float(safe_log(s1[rows, state.labels]).sum())

    pair1 = _pair_from(t1, s1, state.rank)
    had = had_loss(pair1).value
    sl = sl_loss(pair1).value

    t2 = softmax_rows(t, w.tau_sd)
    s2 = softmax_rows(s, w.tau_sd)
    pair2 = _pair_from(t2, s2, state.rank_seq)
    sd = sd_loss(seq_cost_matrix(pair2), state.plan)

    total = ce + w.alpha * (had + w.beta * sl + w.gamma * sd)
    return LossBreakdown(ce=ce, had=had, sl=sl, sd=sd, total=total,
                         rank=state.rank, rank_seq=state.rank_seq)


def total_loss(teacher_logits, student_logits, labels=None,
               w=LossWeights()) -> LossBreakdown:
    """Full objective: cross-entropy plus the weighted transport losses."""
    state = build_state(teacher_logits, student_logits, labels, w)
    return total_loss_frozen(state, teacher_logits, student_logits, w)


def _scatter(grad_trunc, perm, k, n, length):
    full = np.zeros((length, n))
    full[:, perm[:k]] = grad_trunc
    return full


def total_grad(teacher_logits, student_logits, labels=None, w=LossWeights(),
               state: PipelineState | None = None) -> np.ndarray:
    """Gradient of total_loss w.r.t. the raw student logits.

    Rank/truncation selections and the Sinkhorn plan are held fixed;
    truncated-away dimensions receive gradient only through the softmax
    normalization. Matches finite differences of total_loss_frozen.
    """
    if state is None:
        state = build_state(teacher_logits, student_logits, labels, w)
    t, s, length = _aligned_logits(teacher_logits, student_logits)
    n = s.shape[1]

    t1 = softmax_rows(t, w.tau_sl)
    s1 = softmax_rows(s, w.tau_sl)

    # Token-temperature branch: ce + alpha * (had + beta * sl).
    g1 = np.zeros((length, n))
    rows = np.arange(length)
    at_label = s1[rows, state.labels]
    g1[rows, state.labels] = np.where(at_label > PROB_FLOOR, -1.0 / at_label, 0.0)

    pair1 = _pair_from(t1, s1, state.rank)
    g_trunc = w.alpha * (had_loss(pair1).grad + w.beta * sl_loss(pair1).grad)
    g1 += _scatter(g_trunc, state.rank.student_perm, state.rank.k, n, length)
    grad = softmax_backward(s1, g1, w.tau_sl)

    # Sequence-temperature branch: alpha * gamma * sd.
    if w.alpha * w.gamma > 0:
        t2 = softmax_rows(t, w.tau_sd)
        s2 = softmax_rows(s, w.tau_sd)
        pair2 = _pair_from(t2, s2, state.rank_seq)
        g2_trunc = w.alpha * w.gamma * sd_grad(pair2, state.plan)
        g2 = _scatter(g2_trunc, state.rank_seq.student_perm, state.rank_seq.k,
                      n, length)
        grad += softmax_backward(s2, g2, w.tau_sd)
    return grad
