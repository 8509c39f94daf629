"""Toy cross-vocabulary distillation: frozen synthetic teacher, linear student.

The teacher is a fixed seeded logit table with one row per context; the
student is a trainable logit table over a smaller (or larger) vocabulary.
Contexts are grouped into consecutive sequences of T tokens; the last
quarter of the sequences is held out for evaluation. Training is full-batch
gradient descent on the total loss, so runs are bit-deterministic for a
fixed seed.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .core import softmax_backward, softmax_rows
from .composite import (LossWeights, build_state, total_grad,
                        total_loss_frozen)
from .errors import InvalidConfig, NumericalFailure
from .fileio import metrics_csv_text, write_text_atomic
from .preprocess import align_and_truncate
from .seq_ot import sd_loss, seq_cost_matrix, sinkhorn_plan
from .token_ot import uld_grad, uld_loss

MULTILEVEL_OT = "multilevel_ot"
CE_ONLY = "ce_only"
ULD = "uld"
MODES = (MULTILEVEL_OT, CE_ONLY, ULD)


@dataclass(frozen=True)
class DistillConfig:
    """Settings for one toy distillation run."""

    seed: int = 0
    m: int = 20                 # teacher vocab size
    n: int = 15                 # student vocab size
    tokens: int = 8             # sequence length T
    contexts: int = 32
    steps: int = 500
    lr: float = 0.5
    sharpness: float = 6.0      # scale of the teacher logit table
    weights: LossWeights = field(default_factory=LossWeights)
    mode: str = MULTILEVEL_OT

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidConfig(f"steps must be >= 1, got {self.steps}")
        if self.lr < 0:
            raise InvalidConfig(f"lr must be nonnegative, got {self.lr}")
        if self.mode not in MODES:
            raise InvalidConfig(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.contexts < 2 * self.tokens:
            raise InvalidConfig(
                "need at least two sequences worth of contexts "
                f"(contexts={self.contexts}, tokens={self.tokens})"
            )


@dataclass(frozen=True)
class RunMetrics:
    """Per-step loss components plus the held-out sequence-loss metric."""

    step: np.ndarray
    ce: np.ndarray
    had: np.ndarray
    sl: np.ndarray
    sd: np.ndarray
    total: np.ndarray
    eval_sd: np.ndarray

    def to_csv(self, path):
        write_text_atomic(path, metrics_csv_text(self))


def make_teacher_table(cfg: DistillConfig):
    rng = np.random.default_rng(cfg.seed)
    return rng.standard_normal((cfg.contexts, cfg.m)) * cfg.sharpness


def _initial_student(cfg: DistillConfig):
    # Separate stream so the student init never perturbs the teacher table.
    rng = np.random.default_rng((cfg.seed, 1))
    return rng.standard_normal((cfg.contexts, cfg.n)) * 0.01


def _sequence_blocks(cfg: DistillConfig):
    # Every block trains (the student table has no feature sharing, so a row
    # that never trains never moves); the last quarter doubles as the
    # evaluation set, whose sequence-level metric is not what any single
    # update step optimizes directly.
    n_seqs = cfg.contexts // cfg.tokens
    n_eval = max(1, n_seqs // 4)
    blocks = [np.arange(i * cfg.tokens, (i + 1) * cfg.tokens) for i in range(n_seqs)]
    return blocks, blocks[n_seqs - n_eval:]


def held_out_sd(teacher_logits, student_logits, w: LossWeights) -> float:
    """Sequence-level transport loss between two logit blocks at tau_sd."""
    t = softmax_rows(teacher_logits, w.tau_sd)
    s = softmax_rows(student_logits, w.tau_sd)
    pair, _ = align_and_truncate(t, s, w.k, mode=w.match_mode)
    cost = seq_cost_matrix(pair)
    return sd_loss(cost, sinkhorn_plan(cost, w.sinkhorn))


def _uld_mode_grad(teacher_logits, student_logits, w: LossWeights, state):
    """CE gradient plus alpha times the padded-sort baseline loss gradient."""
    grad = total_grad(teacher_logits, student_logits, w=replace(w, alpha=0.0),
                      state=state)
    t1 = softmax_rows(teacher_logits, w.tau_sl)
    s1 = softmax_rows(student_logits, w.tau_sl)
    g = w.alpha * uld_grad(t1, s1)
    return grad + softmax_backward(s1, g, w.tau_sl)


def _partial_metrics(records) -> RunMetrics:
    # Rows recorded before a divergence; lets callers persist what finished.
    done = len(records["eval_sd"])
    return RunMetrics(
        step=np.arange(done),
        **{name: np.array(values[:done]) for name, values in records.items()},
    )


def run_distillation(cfg: DistillConfig) -> RunMetrics:
    """Full-batch gradient descent on the student table.

    Metrics are recorded before each update, so step 0 reflects the initial
    student. Raises NumericalFailure (with the step index) if any loss goes
    non-finite.
    """
    teacher = make_teacher_table(cfg)
    W = _initial_student(cfg)
    train_blocks, eval_blocks = _sequence_blocks(cfg)
    w = cfg.weights

    # Pseudo-targets are generated once from the initial alignment and kept
    # fixed for the whole run, mirroring distillation against pre-generated
    # teacher text; recomputing them every step makes the targets oscillate
    # whenever two student dimensions trade rank.
    fixed_labels = [
        build_state(teacher[block], W[block], None, w).labels
        for block in train_blocks
    ]

    records = {name: [] for name in ("ce", "had", "sl", "sd", "total", "eval_sd")}
    for step in range(cfg.steps):
        grad_W = np.zeros_like(W)
        sums = dict.fromkeys(("ce", "had", "sl", "sd", "total"), 0.0)
        for block, labels in zip(train_blocks, fixed_labels):
            t_logits = teacher[block]
            s_logits = W[block]
            state = build_state(t_logits, s_logits, labels, w)
            breakdown = total_loss_frozen(state, t_logits, s_logits, w)
            if not np.isfinite(breakdown.total):
                exc = NumericalFailure(f"non-finite loss at step {step}")
                exc.metrics = _partial_metrics(records)
                raise exc
            for name in sums:
                sums[name] += getattr(breakdown, name)
            if cfg.mode == MULTILEVEL_OT:
                grad = total_grad(t_logits, s_logits, w=w, state=state)
            elif cfg.mode == CE_ONLY:
                grad = total_grad(t_logits, s_logits, w=replace(w, alpha=0.0),
                                  state=state)
            else:
                grad = _uld_mode_grad(t_logits, s_logits, w, state)
            grad_W[block] = grad

        n_train = len(train_blocks)
        for name in sums:
            records[name].append(sums[name] / n_train)
        records["eval_sd"].append(
            float(np.mean([held_out_sd(teacher[b], W[b], w) for b in eval_blocks]))
        )
        W = W - cfg.lr * grad_W

    return RunMetrics(
        step=np.arange(cfg.steps),
        **{name: np.array(values) for name, values in records.items()},
    )


@dataclass(frozen=True)
class ModeResult:
    mode: str
    final_eval_sd: float
    final_had: float


def compare_modes(cfg: DistillConfig) -> list[ModeResult]:
    """Run every training mode from the same seed and summarize the endpoints."""
    results = []
    for mode in MODES:
        metrics = run_distillation(replace(cfg, mode=mode))
        results.append(ModeResult(
            mode=mode,
            final_eval_sd=float(metrics.eval_sd[-1]),
            final_had=float(metrics.had[-1]),
        ))
    return results
