"""The lp energy of a point cloud against a subspace and its derivatives
along Grassmannian geodesics.

The energy is sum_x dist(x, L)^p.  Its first derivative along a geodesic
L(t) splits into an inlier part (points on L(0)) and an outlier part; for
p < 1 the derivative at t = 0 only exists with respect to the variable t^p.
The outlier part is organized around the d x (D-d) correlation matrix

    B = sum_{x not on L} P_L(x) P_L_perp(x)^T / dist(x, L),

which also drives the local-minimum certificates.
"""

from __future__ import annotations

import csv as _csv
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionError,
    NonDifferentiable,
    ParameterError,
    SingularPointError,
)
from .grassmann import PrincipalDecomposition, Subspace, point_distances

# A point counts as lying on a subspace iff its distance is below this
# threshold times max(1, ||x||).
SPLIT_TOL = 1e-9
# Distances below this raise SingularPointError where a negative power of
# the distance is required.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Dataset:
    """A point cloud in R^D with optional integer component labels.

    Label 0 marks the outlier component; label i >= 1 marks the i-th
    subspace component of origin.
    """

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2:
            raise DimensionError("points must be an (N, D) array")
        points = points.copy()
        points.flags.writeable = False
        object.__setattr__(self, "points", points)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.shape != (points.shape[0],):
                raise DimensionError("labels must have one entry per point")
            labels = labels.copy()
            labels.flags.writeable = False
            object.__setattr__(self, "labels", labels)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def check_norm_bound(self, radius: float) -> None:
        norms = np.linalg.norm(self.points, axis=1)
        if norms.size and norms.max() > radius + 1e-12:
            raise DimensionError(
                f"points exceed the declared norm bound {radius}: "
                f"max norm {norms.max():.6g}"
            )

    def to_csv(self, path_or_file) -> None:
        """One point per row, header ``x0,...,x{D-1}[,label]``, 17 digits."""
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        D = self.ambient_dim
        header = [f"x{i}" for i in range(D)]
        if self.labels is not None:
            header.append("label")
        writer = _csv.writer(fh)
        writer.writerow(header)
        for i, row in enumerate(self.points):
            out = [format(v, ".17g") for v in row]
            if self.labels is not None:
                out.append(str(int(self.labels[i])))
            writer.writerow(out)

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, newline="") as fh:
            reader = _csv.reader(fh)
            header = next(reader)
            has_labels = header and header[-1].strip() == "label"
            D = len(header) - (1 if has_labels else 0)
            pts, labels = [], []
            for row in reader:
                if not row:
                    continue
                pts.append([float(v) for v in row[:D]])
                if has_labels:
                    labels.append(int(row[D]))
        points = np.asarray(pts, dtype=float)
        return cls(points, np.asarray(labels, dtype=int) if has_labels else None)


@dataclass(frozen=True, eq=False)
class OutlyingCorrelation:
    """The d x (D-d) correlation matrix of the off-subspace points.

    Rows are indexed by the basis of the anchor subspace, columns by its
    fixed complement basis.
    """

    matrix: np.ndarray
    anchor: Subspace
    split_tolerance: float

    def __post_init__(self):
        self.matrix.flags.writeable = False


def _check_points(data: Dataset, l: Subspace) -> None:
    if data.ambient_dim != l.ambient_dim:
        raise DimensionError(
            f"data has ambient dimension {data.ambient_dim}, subspace has "
            f"{l.ambient_dim}"
        )


def on_subspace_mask(data: Dataset, l: Subspace, tol: float = SPLIT_TOL) -> np.ndarray:
    """True where dist(x, L) <= tol * max(1, ||x||)."""
    _check_points(data, l)
    dists = point_distances(data.points, l)
    scale = np.maximum(1.0, np.linalg.norm(data.points, axis=1))
    return dists <= tol * scale


def energy(data: Dataset, l: Subspace, p: float) -> float:
    """sum_x dist(x, L)^p; zero iff every point lies on L."""
    if p <= 0:
        raise ParameterError(f"p must be positive, got {p}")
    _check_points(data, l)
    dists = point_distances(data.points, l)
    return float(np.sum(dists**p))


def outlying_correlation(
    data: Dataset, l: Subspace, tol: float = SPLIT_TOL
) -> OutlyingCorrelation:
    """B = sum over points off L of P_L(x) P_L_perp(x)^T / dist(x, L)."""
    _check_points(data, l)
    off = ~on_subspace_mask(data, l, tol)
    d, c = l.dim, l.ambient_dim - l.dim
    if not np.any(off):
        return OutlyingCorrelation(np.zeros((d, c)), l, tol)
    pts = data.points[off]
    tang = pts @ l.basis  # N x d
    orth = pts @ l.complement_basis  # N x (D-d)
    dists = np.linalg.norm(orth, axis=1)
    matrix = tang.T @ (orth / dists[:, None])
    return OutlyingCorrelation(matrix, l, tol)


def d_matrix(x, l: Subspace, p: float) -> np.ndarray:
    """P_L(x) P_L_perp(x)^T * dist(x, L)^(p-2), a rank <= 1, d x (D-d) matrix."""
    if p <= 0:
        raise ParameterError(f"p must be positive, got {p}")
    x = np.asarray(x, dtype=float)
    if x.shape != (l.ambient_dim,):
        raise DimensionError("point length does not match the ambient dimension")
    tang = l.basis.T @ x
    orth = l.complement_basis.T @ x
    dist = np.linalg.norm(orth)
    if dist < SINGULAR_TOL:
        if p < 2:
            raise SingularPointError(
                "point lies on the subspace; dist^(p-2) is undefined for p < 2"
            )
        return np.zeros((l.dim, l.ambient_dim - l.dim))
    return np.outer(tang, orth) * dist ** (p - 2.0)


def nuclear_norm(m) -> float:
    """Sum of singular values; equals max over row-orthonormal U of tr(m U^T)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def frame_matrices(
    decomp: PrincipalDecomposition,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The (C, V, U) matrices of the derivative formulas, built from a
    principal decomposition anchored at its first subspace.

    C = diag(theta), V is d x d orthogonal with j-th row the coordinates of
    v_j in the anchor basis, and U is d x (D-d) with j-th row the complement
    coordinates of u_j for j <= k and zero rows beyond the interaction
    dimension.  Single construction point so every consumer shares one
    convention.
    """
    anchor = decomp.first
    d = anchor.dim
    k = decomp.interaction_dim
    C = np.diag(decomp.angles)
    V = (anchor.basis.T @ decomp.vectors_first).T  # rows = coords of v_j
    U = np.zeros((d, anchor.ambient_dim - d))
    if k:
        U[:k] = (anchor.complement_basis.T @ decomp.complementary[:, :k]).T
    return C, V, U


def _inlier_speeds(decomp: PrincipalDecomposition, pts: np.ndarray) -> np.ndarray:
    """||C V P_L(x)|| per point: the t -> 0+ slope of dist(x, L(t))."""
    proj = pts @ decomp.vectors_first  # (v_j . x) per column
    return np.sqrt(np.sum((proj * decomp.angles) ** 2, axis=1))


def geodesic_derivative(
    data: Dataset, decomp: PrincipalDecomposition, p: float, t: float
) -> float:
    """d/dt of sum_x dist(x, L(t))^p along the geodesic of ``decomp``.

    Points are split against L(0): points on it use the closed-form inlier
    expression, the rest the general one.  At t = 0 with p = 1 the inlier
    terms are the one-sided slopes ||C V P_L(x)||; for p > 1 they vanish;
    for p < 1 the derivative does not exist when inliers are present
    (``NonDifferentiable`` — use :func:`geodesic_derivative_tp`).
    """
    if p <= 0:
        raise ParameterError(f"p must be positive, got {p}")
    _check_points(data, decomp.first)
    angles = decomp.angles
    on = on_subspace_mask(data, decomp.first)
    inliers = data.points[on]
    outliers = data.points[~on]

    if p < 1 and t == 0 and len(inliers):
        raise NonDifferentiable(
            "for p < 1 the energy is not differentiable at t = 0 when points "
            "lie on L(0); use geodesic_derivative_tp"
        )

    total = 0.0
    if len(outliers):
        cos_t, sin_t = np.cos(t * angles), np.sin(t * angles)
        # frames along the geodesic: g_j(t) spans L(t), w_j(t) is the
        # in-plane normal direction
        g = decomp.vectors_first * cos_t + decomp.complementary * sin_t
        w = -decomp.vectors_first * sin_t + decomp.complementary * cos_t
        gy = outliers @ g
        wy = outliers @ w
        dists = np.sqrt(
            np.maximum(np.einsum("ij,ij->i", outliers, outliers) - np.sum(gy**2, axis=1), 0.0)
        )
        if np.any(dists < SINGULAR_TOL):
            raise SingularPointError(
                "an off-L(0) point lies on L(t); the derivative is singular there"
            )
        slope = -np.sum(angles * gy * wy, axis=1) / dists
        total += float(np.sum(p * dists ** (p - 1.0) * slope))

    if len(inliers):
        if t == 0:
            if p == 1:
                total += float(np.sum(_inlier_speeds(decomp, inliers)))
            # p > 1: inlier terms vanish at t = 0
        else:
            proj = inliers @ decomp.vectors_first
            sin_t, cos_t = np.sin(t * angles), np.cos(t * angles)
            dist_sq = np.sum((proj * sin_t) ** 2, axis=1)
            dists = np.sqrt(dist_sq)
            num = np.sum(angles * proj**2 * sin_t * cos_t, axis=1)
            pos = dists > 0
            total += float(
                np.sum(p * dists[pos] ** (p - 2.0) * num[pos])
            )
    return total


def geodesic_derivative_tp(
    data: Dataset, decomp: PrincipalDecomposition, p: float
) -> float:
    """Derivative of the energy with respect to t^p at t = 0.

    For p < 1 the off-subspace terms vanish in the limit and the result is
    sum over inliers of ||C V P_L(x)||^p.  For p = 1 this is the plain
    derivative at t = 0.
    """
    if not (0 < p <= 1):
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    if p == 1:
        return geodesic_derivative(data, decomp, 1.0, 0.0)
    _check_points(data, decomp.first)
    on = on_subspace_mask(data, decomp.first)
    if not np.any(on):
        return 0.0
    speeds = _inlier_speeds(decomp, data.points[on])
    return float(np.sum(speeds**p))
