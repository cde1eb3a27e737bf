"""Minimization of the lp energy over the set of d-subspaces.

Multi-start geodesic descent: at each iterate the summed tilt matrix
M = sum_x P_L(x) P_L_perp(x)^T dist^(p-2) over off-subspace points is
decomposed by SVD, its factors define the steepest geodesic, and a
backtracking search walks along it.  The energy is non-convex for every
p > 0, so restarts seed both random subspaces and spans of data subsets
(the latter matter for p <= 1, where minimizers interpolate data points).
For lines in the plane an exhaustive angle grid provides an independent
oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .energy import Dataset, energy, on_subspace_mask
from .exceptions import DegenerateData, DimensionError, ParameterError
from .grassmann import Subspace, orthonormalize, random_subspace

MAX_GEODESIC_STEP = np.pi / 4  # keeps every principal angle below pi/2
MIN_STEP = 1e-14

SEEDING_MODES = ("random-grassmannian", "data-span", "both")


@dataclass(frozen=True)
class OptimizerConfig:
    p: float
    restarts: int = 20
    max_iters: int = 200
    step_init: float = 0.5
    step_shrink: float = 0.5
    grad_tol: float = 1e-10
    seed: int = 0
    seeding: str = "both"

    def __post_init__(self):
        if self.p <= 0:
            raise ParameterError("p must be positive")
        if self.restarts < 1:
            raise ParameterError("restarts must be at least 1")
        if not (0 < self.step_shrink < 1):
            raise ParameterError("step_shrink must lie in (0, 1)")
        if self.seeding not in SEEDING_MODES:
            raise ParameterError(f"unknown seeding mode {self.seeding!r}")


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    best: Subspace
    energy: float
    trace: list[tuple[float, float, float]]  # (energy, step, distance moved)
    starts: list[dict] = field(default_factory=list)


def _tilt_matrix(data: Dataset, l: Subspace, p: float) -> tuple[np.ndarray, int]:
    """Summed tilt matrix over points off ``l`` and their count.

    Points within the split tolerance are skipped: their contribution to
    the descent direction is one-sided and unbounded for p < 2.
    """
    off = ~on_subspace_mask(data, l)
    pts = data.points[off]
    if not len(pts):
        return np.zeros((l.dim, l.ambient_dim - l.dim)), 0
    tang = pts @ l.basis
    orth = pts @ l.complement_basis
    dists = np.linalg.norm(orth, axis=1)
    weights = dists ** (p - 2.0)
    return tang.T @ (orth * weights[:, None]), len(pts)


def _descent_frames(l: Subspace, M: np.ndarray):
    """Geodesic frame (v_dirs, u_dirs, unit angle vector) steepest for M."""
    d, c = M.shape
    W, s, Zt = np.linalg.svd(M, full_matrices=True)
    r = min(d, c)
    norm = np.linalg.norm(s)
    if norm == 0:
        return None
    theta = np.zeros(d)
    theta[:r] = s / norm
    v_dirs = l.basis @ W
    u_dirs = np.zeros((l.ambient_dim, d))
    u_dirs[:, :r] = l.complement_basis @ Zt[:r].T
    return v_dirs, u_dirs, theta


def _geodesic_basis(v_dirs, u_dirs, theta, t) -> np.ndarray:
    return v_dirs * np.cos(t * theta) + u_dirs * np.sin(t * theta)


def _descend(data: Dataset, start: Subspace, config: OptimizerConfig):
    l = start
    e = energy(data, l, config.p)
    trace = [(e, 0.0, 0.0)]
    n = len(data)
    step = min(config.step_init, MAX_GEODESIC_STEP)
    for _ in range(config.max_iters):
        M, n_off = _tilt_matrix(data, l, config.p)
        if n_off == 0 or np.linalg.norm(M) <= config.grad_tol * n:
            break
        frames = _descent_frames(l, M)
        if frames is None:
            break
        v_dirs, u_dirs, theta = frames
        t = step
        accepted = False
        while t > MIN_STEP:
            cand = Subspace(_geodesic_basis(v_dirs, u_dirs, theta, t))
            e_cand = energy(data, cand, config.p)
            if e_cand < e:
                l, e = cand, e_cand
                trace.append((e, t, t))
                step = min(2.0 * t, MAX_GEODESIC_STEP)
                accepted = True
                break
            t *= config.step_shrink
        if not accepted:
            break
    return l, e, trace


def _data_span_pool(data: Dataset, d: int, rng: np.random.Generator):
    """Yield subspaces spanned by d-subsets of data points.

    Distinct subsets are visited in a seeded shuffled order, exhaustively
    when there are few (so small problems enumerate every interpolating
    candidate) and by rejection sampling otherwise.
    """
    norms = np.linalg.norm(data.points, axis=1)
    usable = np.nonzero(norms > 1e-12)[0]
    if len(usable) < d:
        return
    n_subsets = 1
    for i in range(d):
        n_subsets *= len(usable) - i
        if n_subsets > 100_000:
            break
    if d == 1:
        order = rng.permutation(usable)
        subsets = ([i] for i in order)
    elif n_subsets <= 100_000:
        all_subsets = list(itertools.combinations(usable.tolist(), d))
        rng.shuffle(all_subsets)
        subsets = iter(all_subsets)
    else:
        def _random_subsets():
            seen = set()
            while True:
                pick = tuple(sorted(rng.choice(usable, size=d, replace=False).tolist()))
                if pick in seen:
                    continue
                seen.add(pick)
                yield pick
        subsets = _random_subsets()
    for idx in subsets:
        try:
            yield orthonormalize(data.points[list(idx)].T)
        except DimensionError:
            continue


def _seeds(data: Dataset, d: int, config: OptimizerConfig):
    """The sequence of start subspaces, length ``config.restarts``."""
    rng = np.random.default_rng(config.seed)
    D = data.ambient_dim
    span_iter = iter(())
    if config.seeding in ("data-span", "both"):
        span_iter = _data_span_pool(data, d, rng)
    out = []
    for i in range(config.restarts):
        want_span = config.seeding == "data-span" or (
            config.seeding == "both" and i % 2 == 0
        )
        seed_kind = "random"
        sub = None
        if want_span:
            sub = next(span_iter, None)
            if sub is not None:
                seed_kind = "data-span"
        if sub is None:
            sub = random_subspace(D, d, rng)
        out.append((seed_kind, sub))
    return out


def minimize(data: Dataset, d: int, config: OptimizerConfig) -> OptimizationResult:
    """Best subspace over ``config.restarts`` geodesic-descent runs.

    Ties in final energy are broken by restart index, so the result is
    deterministic however the restarts are scheduled.
    """
    if not len(data):
        raise DegenerateData("empty data set")
    D = data.ambient_dim
    if not (1 <= d < D):
        raise DimensionError(f"need 1 <= d < D, got d={d}, D={D}")
    if np.max(np.linalg.norm(data.points, axis=1)) < 1e-12:
        raise DegenerateData("all points are at the origin")

    starts = []
    best = None
    for idx, (seed_kind, start) in enumerate(_seeds(data, d, config)):
        l, e, trace = _descend(data, start, config)
        starts.append(
            {"start": idx, "kind": seed_kind, "energy": e, "iterations": len(trace) - 1}
        )
        if best is None or e < best[0]:
            best = (e, idx, l, trace)
    e, _, l, trace = best
    return OptimizationResult(best=l, energy=float(e), trace=trace, starts=starts)


def grid_oracle(
    data: Dataset, p: float, angle_step: float = 1e-4
) -> tuple[Subspace, float]:
    """Exhaustive search over lines in the plane.

    Evaluates every angle in {0, h, 2h, ..., pi} plus the exact angle of
    each data point (interpolating lines are the candidates that matter for
    p <= 1) and returns the minimizer, ties broken by the smallest angle.
    """
    if p <= 0:
        raise ParameterError("p must be positive")
    if data.ambient_dim != 2:
        raise DimensionError("the grid oracle requires D = 2, d = 1")
    if angle_step <= 0:
        raise ParameterError("angle_step must be positive")
    pts = data.points
    norms = np.linalg.norm(pts, axis=1)
    point_angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), np.pi)[norms > 0]
    grid = np.arange(0.0, np.pi + angle_step, angle_step)
    candidates = np.unique(np.concatenate([grid, point_angles]))

    best_energy = np.inf
    best_angle = 0.0
    chunk = 4096
    for lo in range(0, len(candidates), chunk):
        phis = candidates[lo : lo + chunk]
        normals = np.stack([-np.sin(phis), np.cos(phis)], axis=1)
        dists = np.abs(pts @ normals.T)  # N x n_angles
        energies = np.sum(dists**p, axis=0)
        j = int(np.argmin(energies))
        if energies[j] < best_energy:
            best_energy = float(energies[j])
            best_angle = float(phis[j])
    basis = np.array([[np.cos(best_angle)], [np.sin(best_angle)]])
    return Subspace(basis), best_energy
