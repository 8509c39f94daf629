"""Multi-level optimal-transport losses for cross-vocabulary distillation.

Teacher and student emit logits over different vocabularies; the losses here
align them without any dimensional correspondence: sequence-level ranking
plus truncation feeds an absolute-difference loss and a logarithmic loss at
the token level, and an entropic (Sinkhorn) transport loss between token
positions at the sequence level. Exact-transport oracles, analytic
gradients, and a toy distillation harness round out the package.
"""

from .composite import (LossBreakdown, LossWeights, PipelineState, build_state,
                        ce_loss, total_grad, total_loss, total_loss_frozen)
from .core import (PROB_FLOOR, safe_log, softmax_backward, softmax_rows,
                   validate_logits, validate_probs)
from .errors import (InvalidConfig, InvalidInput, NumericalFailure,
                     NumericalUnderflow, OTDistillError, TooLargeForExact)
from .harness import (CE_ONLY, MULTILEVEL_OT, ULD, DistillConfig, ModeResult,
                      RunMetrics, compare_modes, run_distillation)
from .oracle import (ASSIGNMENT, BRUTE_FORCE, ExactOTResult, GradientReport,
                     check_gradient, exact_ot, finite_diff_grad)
from .preprocess import (EXACT_ASSIGNMENT, SUM_SORT, AlignedPair,
                         RankSelection, align_and_truncate, alignment_cost,
                         match_student, sequence_rank_teacher, truncate_topk)
from .seq_ot import (SinkhornConfig, sd_grad, sd_loss, seq_cost_matrix,
                     sinkhorn_plan)
from .token_ot import TokenLossGrad, had_loss, sl_loss, uld_grad, uld_loss

__version__ = "0.1.0"

__all__ = [
    "AlignedPair", "ASSIGNMENT", "BRUTE_FORCE", "CE_ONLY", "DistillConfig",
    "EXACT_ASSIGNMENT", "ExactOTResult", "GradientReport", "InvalidConfig",
    "InvalidInput", "LossBreakdown", "LossWeights", "ModeResult",
    "MULTILEVEL_OT", "NumericalFailure", "NumericalUnderflow",
    "OTDistillError", "PROB_FLOOR", "PipelineState", "RankSelection",
    "RunMetrics", "SinkhornConfig", "SUM_SORT", "TokenLossGrad",
    "TooLargeForExact", "ULD", "align_and_truncate", "alignment_cost",
    "build_state", "ce_loss", "check_gradient", "compare_modes", "exact_ot",
    "finite_diff_grad", "had_loss", "match_student", "run_distillation",
    "safe_log", "sd_grad", "sd_loss", "seq_cost_matrix",
    "sequence_rank_teacher", "sinkhorn_plan", "sl_loss", "softmax_backward",
    "softmax_rows", "total_grad", "total_loss", "total_loss_frozen",
    "truncate_topk", "uld_grad", "uld_loss", "validate_logits",
    "validate_probs",
]
