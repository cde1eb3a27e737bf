"""Local-minimum certificates for a candidate subspace.

Three regimes:

* p = 1 — the candidate is a local minimum if, for every orthogonal V and
  nonnegative diagonal C, the inlier term sum ||C V P_L(x)|| strictly
  exceeds the nuclear norm of C V B (and this is necessary with >=).  For
  d = 1 the check is exact; for d >= 2 the infimum over (C, V) is estimated
  by seeded sampling plus a local pattern search, so a positive verdict is a
  heuristic certificate (``samples_used`` records the budget spent).
* p < 1 — the candidate is a local minimum as soon as the points lying on
  it span it.
* p > 1 — a necessary condition: the summed tilt matrix
  sum P_L(y) P_L_perp(y)^T dist^(p-2) over off-subspace points must vanish.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .energy import (
    SPLIT_TOL,
    Dataset,
    d_matrix,
    nuclear_norm,
    on_subspace_mask,
    outlying_correlation,
)
from .grassmann import Subspace


class Verdict(str, enum.Enum):
    CERTIFIED_LOCAL_MIN = "CertifiedLocalMin"
    NECESSARY_CONDITION_HOLDS = "NecessaryConditionHolds"
    NECESSARY_CONDITION_FAILS = "NecessaryConditionFails"
    SUFFICIENT_CONDITION_FAILS = "SufficientConditionFails"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class CertificateResult:
    """Outcome of a local-minimum test.

    ``margin`` is the worst value found for the tested quantity: the
    estimated infimum of the sufficient-condition gap for the p = 1 test,
    the smallest singular value of the inlier coordinates for p < 1, and
    the per-point Frobenius norm of the tilt matrix for the p > 1 necessary
    test.  ``witness`` holds the (C, V) pair achieving the margin where one
    exists; C is the diagonal (unit Frobenius norm), V the orthogonal factor.
    """

    verdict: Verdict
    margin: float
    witness: tuple[np.ndarray, np.ndarray] | None
    samples_used: int

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = {
                "C": self.witness[0].tolist(),
                "V": self.witness[1].tolist(),
            }
        return {
            "verdict": self.verdict.value,
            "margin": self.margin,
            "witness": witness,
            "samples_used": self.samples_used,
        }


def default_margin_tol(data: Dataset) -> float:
    """Scale-aware zero threshold: 1e-9 times the summed point norms."""
    return 1e-9 * float(np.sum(np.linalg.norm(data.points, axis=1)))


def _gap(C: np.ndarray, V: np.ndarray, inlier_coords: np.ndarray, B: np.ndarray) -> float:
    """sum ||C V x_hat|| - ||C V B||_* for inlier coordinates x_hat."""
    CV = C[:, None] * V
    lhs = float(np.sum(np.linalg.norm(inlier_coords @ CV.T, axis=1)))
    return lhs - nuclear_norm(CV @ B)


def _random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _normalize_diag(c: np.ndarray) -> np.ndarray:
    c = np.abs(c)
    n = np.linalg.norm(c)
    if n == 0:
        c = np.ones_like(c)
        n = np.linalg.norm(c)
    return c / n


def certify_l1(
    data: Dataset,
    candidate: Subspace,
    search_budget: int = 2000,
    seed=0,
    tol: float | None = None,
) -> CertificateResult:
    """Sufficient/necessary local-minimum test for the l1 energy.

    Estimates the infimum over unit-norm nonnegative diagonal C and
    orthogonal V of  sum_{x on L} ||C V P_L(x)|| - ||C V B||_*.  Positive
    infimum certifies a strict local minimum; a negative sampled value
    refutes it.  For d = 1 the infimum is exact (C scales out, V = +-1) and
    the verdict is never Inconclusive.
    """
    if tol is None:
        tol = default_margin_tol(data)
    d = candidate.dim
    on = on_subspace_mask(data, candidate)
    B = outlying_correlation(data, candidate).matrix
    inlier_coords = data.points[on] @ candidate.basis

    if not np.any(on):
        # no point of the data lies on the candidate: the inlier sum is 0
        # and the strict inequality can never hold
        margin = -nuclear_norm(B)
        witness = (np.ones(d) / np.sqrt(d), np.eye(d))
        return CertificateResult(
            Verdict.SUFFICIENT_CONDITION_FAILS, margin, witness, 1
        )

    if d == 1:
        margin = float(np.sum(np.abs(inlier_coords))) - float(np.linalg.norm(B))
        verdict = (
            Verdict.CERTIFIED_LOCAL_MIN
            if margin > tol
            else Verdict.SUFFICIENT_CONDITION_FAILS
        )
        return CertificateResult(verdict, margin, (np.ones(1), np.eye(1)), 1)

    rng = np.random.default_rng(seed)
    evals = 0

    def propose_initial():
        # axis-aligned extremes first, then random draws
        yield np.ones(d) / np.sqrt(d), np.eye(d)
        for j in range(d):
            c = np.zeros(d)
            c[j] = 1.0
            yield c, np.eye(d)
        while True:
            c = _normalize_diag(rng.standard_normal(d))
            yield c, _random_orthogonal(rng, d)

    sample_budget = max(1, search_budget // 2)
    best = None
    gen = propose_initial()
    while evals < sample_budget:
        C, V = next(gen)
        g = _gap(C, V, inlier_coords, B)
        evals += 1
        if best is None or g < best[0]:
            best = (g, C, V)

    # pattern search around the best sample, shrinking the step
    g_best, C_best, V_best = best
    step = 0.5
    while evals < search_budget and step > 1e-6:
        improved = False
        for _ in range(8):
            if evals >= search_budget:
                break
            C_try = _normalize_diag(C_best + step * rng.standard_normal(d))
            skew = rng.standard_normal((d, d))
            skew = (skew - skew.T) * step
            q, r = np.linalg.qr(np.eye(d) + skew)
            V_try = V_best @ (q * np.sign(np.diag(r)))
            g = _gap(C_try, V_try, inlier_coords, B)
            evals += 1
            if g < g_best:
                g_best, C_best, V_best = g, C_try, V_try
                improved = True
        if not improved:
            step *= 0.5

    if g_best > tol:
        verdict = Verdict.CERTIFIED_LOCAL_MIN
    elif g_best < -tol:
        verdict = Verdict.SUFFICIENT_CONDITION_FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return CertificateResult(verdict, g_best, (C_best, V_best), evals)


def certify_p_less_1(data: Dataset, candidate: Subspace) -> CertificateResult:
    """For 0 < p < 1: a local minimum iff the on-subspace points span the
    candidate (rank of their coordinate matrix equals d at tolerance 1e-9).
    """
    on = on_subspace_mask(data, candidate)
    coords = data.points[on] @ candidate.basis
    n_on = int(np.sum(on))
    if n_on < candidate.dim:
        return CertificateResult(Verdict.INCONCLUSIVE, 0.0, None, n_on)
    sigma = np.linalg.svd(coords, compute_uv=False)
    smallest = float(sigma[candidate.dim - 1]) if sigma.size >= candidate.dim else 0.0
    if smallest > 1e-9:
        return CertificateResult(Verdict.CERTIFIED_LOCAL_MIN, smallest, None, n_on)
    return CertificateResult(Verdict.INCONCLUSIVE, smallest, None, n_on)


def check_necessary_p_gt_1(
    data: Dataset,
    candidate: Subspace,
    p: float,
    tol: float | None = None,
) -> CertificateResult:
    """Necessary condition for p > 1 (and for p <= 1 when no point lies on
    the candidate): the summed tilt matrix over off-subspace points must be
    zero.  Holds iff ||M||_F <= tol * N0; the margin reported is
    ||M||_F / N0.
    """
    if tol is None:
        norms = np.linalg.norm(data.points, axis=1)
        tol = 1e-9 * float(np.mean(norms)) if len(data) else 1e-9
    on = on_subspace_mask(data, candidate)
    off_points = data.points[~on]
    n0 = len(off_points)
    if n0 == 0:
        return CertificateResult(Verdict.NECESSARY_CONDITION_HOLDS, 0.0, None, 0)
    M = np.zeros((candidate.dim, candidate.ambient_dim - candidate.dim))
    for y in off_points:
        M += d_matrix(y, candidate, p)
    margin = float(np.linalg.norm(M)) / n0
    verdict = (
        Verdict.NECESSARY_CONDITION_HOLDS
        if margin <= tol
        else Verdict.NECESSARY_CONDITION_FAILS
    )
    return CertificateResult(verdict, margin, None, n0)
