"""Sequence-level ranking, student dimension matching, and top-k truncation.

The teacher's vocabulary dimensions are ordered by their probability mass
summed over the whole sequence; the student's dimensions are matched to that
order either by the same sum-sort heuristic or by an exact rectangular
assignment; both matrices are then truncated to a shared support of k columns.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import validate_probs
from .errors import InvalidInput, TooLargeForExact

SUM_SORT = "sum_sort"
EXACT_ASSIGNMENT = "exact_assignment"

# Exact matching solves a dense assignment; cubic cost caps it at desk scale.
EXACT_MATCH_LIMIT = 64


@dataclass(frozen=True)
class RankSelection:
    """Record of how teacher and student dimensions were aligned.

    teacher_perm orders teacher columns by descending sequence-summed
    probability; student_perm is the matching permutation of student columns
    (the permutation matrix in vector form); k is the truncation width after
    clamping to min(m, n).
    """

    teacher_perm: np.ndarray
    student_perm: np.ndarray
    k: int
    match_mode: str = SUM_SORT


@dataclass(frozen=True)
class AlignedPair:
    """Aligned, truncated teacher/student probability matrices of shape T x k.

    Student rows need not sum to 1 after truncation.
    """

    teacher: np.ndarray
    student: np.ndarray

    def __post_init__(self):
        if self.teacher.shape != self.student.shape:
            raise InvalidInput(
                f"aligned pair shapes differ: {self.teacher.shape} vs {self.student.shape}"
            )


def _descending_stable(values):
    # Stable sort on the negated values keeps ties in ascending index order.
    return np.argsort(-np.asarray(values, dtype=float), kind="stable")


def sequence_rank_teacher(t):
    """Order teacher columns by descending sequence-summed probability.

    Returns (permutation, column-permuted matrix). Ties keep their original
    column order.
    """
    t = validate_probs(t)
    perm = _descending_stable(t.sum(axis=0))
    return perm, t[:, perm]


def match_student(t_sr, s, mode=SUM_SORT):
    """Permutation of student columns matching the ranked teacher columns.

    SUM_SORT sorts student columns by descending sequence-summed probability
    (cheap heuristic). EXACT_ASSIGNMENT minimizes the total L1 mismatch
    between the first min(m, n) ranked teacher columns and distinct student
    columns, as a rectangular assignment; unmatched student columns are
    appended in ascending order so the result is a bijection on [0, n).
    """
    t_sr = np.asarray(t_sr, dtype=float)
    s = np.asarray(s, dtype=float)
    if t_sr.shape[0] != s.shape[0]:
        raise InvalidInput("teacher and student must have the same number of rows")
    if mode == SUM_SORT:
        return _descending_stable(s.sum(axis=0))
    if mode != EXACT_ASSIGNMENT:
        raise InvalidInput(f"unknown match mode: {mode!r}")

    m, n = t_sr.shape[1], s.shape[1]
    r = min(m, n)
    if r > EXACT_MATCH_LIMIT:
        raise TooLargeForExact(
            f"exact matching limited to {EXACT_MATCH_LIMIT} dimensions, got {r}"
        )
    # D[i, j] = sum_t |t_sr[t, i] - s[t, j]| over the first r teacher columns.
    mismatch = np.abs(t_sr[:, :r, None] - s[:, None, :]).sum(axis=0)
    _, cols = linear_sum_assignment(mismatch)
    rest = np.setdiff1d(np.arange(n), cols)
    return np.concatenate([cols, rest])


def alignment_cost(t_sr, s, student_perm):
    """Total L1 mismatch between ranked teacher columns and permuted student columns.

    Compares the first min(m, n) columns of each, the quantity the exact
    matcher minimizes.
    """
    t_sr = np.asarray(t_sr, dtype=float)
    s_perm = np.asarray(s, dtype=float)[:, np.asarray(student_perm)]
    r = min(t_sr.shape[1], s_perm.shape[1])
    return float(np.abs(t_sr[:, :r] - s_perm[:, :r]).sum())


def truncate_topk(t_sr, s_sr, k):
    """Keep the first min(k, m, n) columns of both ranked matrices.

    k is clamped rather than rejected; the effective width is the shared
    column count of the returned pair.
    """
    t_sr = np.asarray(t_sr, dtype=float)
    s_sr = np.asarray(s_sr, dtype=float)
    if k < 1:
        raise InvalidInput(f"truncation width must be >= 1, got {k}")
    k_eff = min(int(k), t_sr.shape[1], s_sr.shape[1])
    return AlignedPair(teacher=t_sr[:, :k_eff], student=s_sr[:, :k_eff])


def align_and_truncate(t, s, k, mode=SUM_SORT):
    """Full alignment pipeline: rank teacher, match student, truncate.

    Returns (AlignedPair, RankSelection).
    """
    teacher_perm, t_sr = sequence_rank_teacher(t)
    student_perm = match_student(t_sr, np.asarray(s, dtype=float), mode=mode)
    s_sr = np.asarray(s, dtype=float)[:, student_perm]
    pair = truncate_topk(t_sr, s_sr, k)
    sel = RankSelection(
        teacher_perm=teacher_perm,
        student_perm=student_perm,
        k=pair.teacher.shape[1],
        match_mode=mode,
    )
    return pair, sel
