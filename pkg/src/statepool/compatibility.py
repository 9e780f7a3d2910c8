"""Compatibility of state assignments: decision procedures and witness checks.

Two flavors, classical and quantum, each in an objective and a subjective
form.  The decision procedures implement the support-overlap criterion
(two assignments are compatible iff their supports intersect); the
``verify_*`` functions check supplied witnesses for the four definitional
forms.  Witness *synthesis* is deliberately not provided: we only decide
compatibility and verify witnesses handed to us.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .linalg import (
    DEFAULT_RANK_TOL,
    Subspace,
    as_matrix,
    max_norm,
    subspace_intersection,
    support_projector,
)
from .regions import HybridState, quantum_bayes

SUPPORT_TOL = 1e-12  # probability entries above this count as support


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Distribution over a finite ordered outcome set."""

    outcomes: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        outcomes = tuple(self.outcomes)
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if len(outcomes) != p.size:
            raise ValueError("outcomes and probs have different lengths")
        if len(set(outcomes)) != len(outcomes):
            raise ValueError("duplicate outcome labels")
        if np.any(p < -SUPPORT_TOL):
            raise ValueError(f"negative probability {p.min():g}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    def support(self, tol: float = SUPPORT_TOL):
        return {o for o, p in zip(self.outcomes, self.probs) if p > tol}

    def __getitem__(self, outcome) -> float:
        return float(self.probs[self.outcomes.index(outcome)])

    @classmethod
    def uniform(cls, outcomes) -> "ProbabilityDistribution":
        outcomes = tuple(outcomes)
        return cls(outcomes, np.full(len(outcomes), 1.0 / len(outcomes)))


@dataclass(frozen=True)
class ConditionalDistribution:
    """Table P(X=x | Y=y), column-stochastic in y.

    ``table[x, y]`` indexes outcome x of X (rows) and y of Y (columns).
    """

    given_outcomes: tuple
    out_outcomes: tuple
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        gy = tuple(self.given_outcomes)
        ox = tuple(self.out_outcomes)
        if t.shape != (len(ox), len(gy)):
            raise ValueError(f"table shape {t.shape} != (|X|, |Y|) = ({len(ox)}, {len(gy)})")
        if np.any(t < -SUPPORT_TOL):
            raise ValueError("negative conditional probability")
        colsums = t.sum(axis=0)
        if np.any(np.abs(colsums - 1.0) > 1e-12):
            raise ValueError(f"columns must sum to 1, got {colsums}")
        object.__setattr__(self, "given_outcomes", gy)
        object.__setattr__(self, "out_outcomes", ox)
        object.__setattr__(self, "table", np.clip(t, 0.0, None))


@dataclass(frozen=True)
class CompatibilityVerdict:
    """Outcome of a compatibility decision.

    ``intersection`` is the shared-support outcome set (classical) or the
    support-intersection Subspace (quantum); compatible iff it is nonempty.
    """

    compatible: bool
    intersection: object
    diagnostics: str = ""

    def intersection_rank(self) -> int:
        if isinstance(self.intersection, Subspace):
            return self.intersection.rank
        return len(self.intersection)


def classical_compatible(
    q1: ProbabilityDistribution,
    q2: ProbabilityDistribution,
    support_tol: float = SUPPORT_TOL,
) -> CompatibilityVerdict:
    """Support-overlap decision: compatible iff some outcome has positive
    probability under both assignments."""
    if q1.outcomes != q2.outcomes:
        raise ValueError("distributions are over different outcome sets")
    shared = sorted(
        q1.support(support_tol) & q2.support(support_tol),
        key=q1.outcomes.index,
    )
    ok = bool(shared)
    msg = (
        f"shared support {shared}" if ok else "supports are disjoint"
    )
    return CompatibilityVerdict(ok, tuple(shared), msg)


def quantum_compatible(s1, s2, rank_tol: float = DEFAULT_RANK_TOL) -> CompatibilityVerdict:
    """Support-overlap decision for density operators: compatible iff the
    geometric intersection of the two supports is nonzero."""
    a, b = as_matrix(s1), as_matrix(s2)
    if a.shape != b.shape:
        raise DimensionMismatchError("states have different dims")
    inter = subspace_intersection(
        support_projector(a, rank_tol), support_projector(b, rank_tol)
    )
    ok = not inter.is_empty
    msg = (
        f"support intersection has rank {inter.rank}"
        if ok
        else "supports intersect only at the origin"
    )
    return CompatibilityVerdict(ok, inter, msg)


def verify_objective_classical(
    q1: ProbabilityDistribution,
    q2: ProbabilityDistribution,
    joint: np.ndarray,
    x1: int,
    x2: int,
    tol: float = 1e-10,
) -> bool:
    """Check a witness for objective classical compatibility.

    ``joint`` is P(Y, X1, X2) as an array of shape (|Y|, |X1|, |X2|) with Y
    indexed in the order of ``q1.outcomes``.  True iff the joint weight of
    (x1, x2) is positive and both conditional slices P(Y | Xi=xi)
    reproduce the respective assignment.
    """
    p = np.asarray(joint, dtype=float)
    if p.ndim != 3 or p.shape[0] != len(q1.outcomes):
        raise ValueError(f"joint must have shape (|Y|, |X1|, |X2|), got {p.shape}")
    if not (0 <= x1 < p.shape[1] and 0 <= x2 < p.shape[2]):
        raise KeyError(f"outcome ({x1}, {x2}) absent from joint of shape {p.shape}")
    if abs(p.sum() - 1.0) > 1e-10 or np.any(p < -tol):
        raise ValueError("joint is not a normalized distribution")
    if p[:, x1, x2].sum() <= tol:  # condition 1: P(X1=x1, X2=x2) > 0
        return False
    for q, slice_ in ((q1, p[:, x1, :].sum(axis=1)), (q2, p[:, :, x2].sum(axis=1))):
        w = slice_.sum()
        if w <= tol or np.max(np.abs(slice_ / w - q.probs)) > tol:
            return False
    return True


def classical_bayes_posterior(
    prior: ProbabilityDistribution, cond: ConditionalDistribution, x: int
):
    """(posterior over Y, predictive probability) for observing X = x."""
    like = cond.table[x, :]
    unnorm = like * prior.probs
    w = float(unnorm.sum())
    if w <= 0:
        return None, 0.0
    return ProbabilityDistribution(prior.outcomes, unnorm / w), w


def verify_subjective_classical(
    q1: ProbabilityDistribution,
    q2: ProbabilityDistribution,
    cond: ConditionalDistribution,
    x_tilde: int,
    tol: float = 1e-10,
) -> bool:
    """Check a witness for subjective classical compatibility.

    True iff every predictive probability is strictly positive for both
    agents (condition 1) and the two Bayes posteriors agree at ``x_tilde``.
    A vanishing predictive probability is a failed condition, not an error.
    """
    if cond.given_outcomes != q1.outcomes or q1.outcomes != q2.outcomes:
        raise ValueError("conditional table and priors disagree on Out(Y)")
    for q in (q1, q2):
        for x in range(len(cond.out_outcomes)):
            if float((cond.table[x, :] * q.probs).sum()) <= tol:
                return False
    p1, _ = classical_bayes_posterior(q1, cond, x_tilde)
    p2, _ = classical_bayes_posterior(q2, cond, x_tilde)
    return float(np.max(np.abs(p1.probs - p2.probs))) <= tol


def verify_objective_quantum(
    s1,
    s2,
    hybrid: HybridState,
    x1: int,
    x2: int,
    tol: float = 1e-10,
) -> bool:
    """Check a witness for objective quantum compatibility.

    ``hybrid`` is a hybrid state over two classical registers (X1, X2) and
    the quantum region.  True iff the classical weight at (x1, x2) is
    positive and each conditional state rho_{B | Xi = xi} (marginalizing
    the other register, then normalizing) equals the corresponding
    assignment in max-norm.
    """
    if len(hybrid.classical_dims) != 2:
        raise ValueError("witness hybrid must carry exactly two classical registers")
    d1, d2 = hybrid.classical_dims
    if not (0 <= x1 < d1 and 0 <= x2 < d2):
        raise KeyError(f"outcome ({x1}, {x2}) absent from registers {hybrid.classical_dims}")
    if hybrid.classical_weight((x1, x2)) <= tol:  # condition 1
        return False
    cond1 = sum(hybrid.block((x1, b)) for b in range(d2))
    cond2 = sum(hybrid.block((a, x2)) for a in range(d1))
    for sigma, block in ((s1, cond1), (s2, cond2)):
        w = float(np.real(np.trace(block)))
        if w <= tol or max_norm(block / w - as_matrix(sigma)) > tol:
            return False
    return True


def verify_subjective_quantum(
    s1,
    s2,
    likelihoods,
    x_tilde,
    tol: float = 1e-10,
) -> bool:
    """Check a witness for subjective quantum compatibility.

    ``likelihoods`` maps outcomes x to PSD operators summing to the
    identity (a valid measurement).  True iff every predictive probability
    Tr(likelihood(x) s_i) is strictly positive and the quantum Bayes
    posteriors of the two agents agree at ``x_tilde`` in max-norm.
    """
    ops = {x: as_matrix(m) for x, m in dict(likelihoods).items()}
    if x_tilde not in ops:
        raise KeyError(f"outcome {x_tilde!r} absent from likelihoods")
    total = sum(ops.values())
    if max_norm(total - np.eye(total.shape[0])) > 1e-8:
        raise ValueError("likelihoods do not sum to the identity")
    for sigma in (s1, s2):
        for m in ops.values():
            if float(np.real(np.trace(m @ as_matrix(sigma)))) <= tol:
                return False
    post1 = quantum_bayes(ops[x_tilde], s1)
    post2 = quantum_bayes(ops[x_tilde], s2)
    return max_norm(post1 - post2) <= tol
