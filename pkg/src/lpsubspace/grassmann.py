"""Subspaces of R^D and the geometry between them.

A d-dimensional linear subspace is stored as a D x d matrix with orthonormal
columns.  The functions here compute principal angles and vectors, geodesic
distance, points along geodesics, and projections, and draw subspaces from
the rotation-invariant distribution on the set of d-subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, GeodesicNotUnique

# Tolerances used throughout the geometry layer.
ORTHONORMALITY_TOL = 1e-10
# Angles below this threshold count as numerically zero when determining the
# interaction dimension k.
ZERO_ANGLE_TOL = 1e-9


def _as_float_matrix(basis) -> np.ndarray:
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2:
        raise DimensionError("basis must be a 2-d array (D x d)")
    return basis


@dataclass(frozen=True, eq=False)
class Subspace:
    """A d-dimensional linear subspace of R^D.

    Parameters
    ----------
    basis : (D, d) ndarray
        Orthonormal columns; rows are ambient coordinates.
    """

    basis: np.ndarray
    _complement: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        basis = _as_float_matrix(self.basis)
        D, d = basis.shape
        if not (1 <= d <= D):
            raise DimensionError(f"need 1 <= d <= D, got d={d}, D={D}")
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(d), atol=ORTHONORMALITY_TOL):
            raise DimensionError("basis columns are not orthonormal")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def complement_basis(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement, (D, D-d).

        Built deterministically by Gram-Schmidt of the standard coordinate
        vectors (in index order) against the basis, and cached: projections
        onto the complement must be reproducible across calls.
        """
        if self._complement is None:
            object.__setattr__(self, "_complement", _complete_basis(self.basis))
        return self._complement

    def projector(self) -> np.ndarray:
        """The D x D orthogonal projector onto the subspace."""
        return self.basis @ self.basis.T

    def to_csv(self, path) -> None:
        """Write the basis as CSV: D rows x d columns, 17 significant digits."""
        np.savetxt(path, self.basis, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "Subspace":
        arr = np.loadtxt(path, delimiter=",", dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        return cls(arr)


def _complete_basis(basis: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full basis; return the new columns.

    Standard coordinate vectors are orthogonalized in index order, with one
    re-orthogonalization pass for stability. Deterministic by construction.
    """
    D, d = basis.shape
    cols = [basis[:, j] for j in range(d)]
    out = []
    for i in range(D):
        if len(out) == D - d:
            break
        v = np.zeros(D)
        v[i] = 1.0
        for _ in range(2):  # classical Gram-Schmidt, twice
            for q in cols:
                v = v - (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            v = v / norm
            cols.append(v)
            out.append(v)
    if len(out) != D - d:
        raise DimensionError("failed to complete basis to full dimension")
    comp = np.column_stack(out) if out else np.zeros((D, 0))
    comp.flags.writeable = False
    return comp


@dataclass(frozen=True, eq=False)
class PrincipalDecomposition:
    """Principal angles/vectors between two d-subspaces.

    ``angles`` are sorted non-increasing in [0, pi/2].  Columns of
    ``vectors_first``/``vectors_second`` are the principal vectors v_i, v'_i
    of the two subspaces, and ``complementary`` holds the unit vectors u_i
    that complete the first subspace's principal vectors so that
    v'_i = cos(theta_i) v_i + sin(theta_i) u_i for i <= k and u_i = v_i
    beyond the interaction dimension k (the number of nonzero angles).
    """

    first: Subspace
    second: Subspace
    angles: np.ndarray
    vectors_first: np.ndarray
    vectors_second: np.ndarray
    complementary: np.ndarray
    interaction_dim: int

    def __post_init__(self):
        for name in ("angles", "vectors_first", "vectors_second", "complementary"):
            arr = getattr(self, name)
            arr.flags.writeable = False


def _check_compatible(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    if a.dim != b.dim:
        raise DimensionError(f"subspace dimensions differ: {a.dim} vs {b.dim}")


def principal_decomposition(a: Subspace, b: Subspace) -> PrincipalDecomposition:
    """Principal angles and vectors between ``a`` and ``b``.

    Angles are arccosines of the singular values of the d x d overlap matrix
    of the two bases, ordered non-increasingly.  Singular values are clamped
    to [0, 1] before arccos, and signs are fixed so the first nonzero
    coordinate of each principal vector of ``a`` is positive.
    """
    _check_compatible(a, b)
    d = a.dim
    overlap = b.basis.T @ a.basis  # d x d
    w_b, sigma, wt_a = np.linalg.svd(overlap)
    # svd returns sigma descending; decreasing angles need the reverse order
    order = np.arange(d)[::-1]
    sigma = np.clip(sigma[order], 0.0, 1.0)
    angles = np.arccos(sigma)
    v_first = a.basis @ wt_a.T[:, order]
    v_second = b.basis @ w_b[:, order]

    # residuals of v'_i against the first subspace: direction u_i, norm
    # sin(theta_i).  arccos near 1 only resolves angles down to ~1e-8, so
    # small angles are re-measured from the residual norm instead.
    residual = v_second - a.basis @ (a.basis.T @ v_second)
    res_norms = np.linalg.norm(residual, axis=0)
    small = angles < 1e-4
    angles[small] = np.arcsin(np.clip(res_norms[small], 0.0, 1.0))
    angles[angles <= ZERO_ANGLE_TOL] = 0.0
    resort = np.argsort(-angles, kind="stable")
    angles = angles[resort]
    v_first = v_first[:, resort]
    v_second = v_second[:, resort]
    residual = residual[:, resort]
    res_norms = res_norms[resort]

    # sign fix: first coordinate of v_i with |.| > tol positive; flip pairs
    for i in range(d):
        col = v_first[:, i]
        nz = np.nonzero(np.abs(col) > ZERO_ANGLE_TOL)[0]
        if nz.size and col[nz[0]] < 0:
            v_first[:, i] = -col
            v_second[:, i] = -v_second[:, i]
            residual[:, i] = -residual[:, i]

    k = int(np.sum(angles > 0.0))
    comp = np.empty_like(v_first)
    for i in range(d):
        if i < k:
            comp[:, i] = residual[:, i] / res_norms[i]
        else:
            comp[:, i] = v_first[:, i]
    return PrincipalDecomposition(
        first=a,
        second=b,
        angles=angles,
        vectors_first=v_first,
        vectors_second=v_second,
        complementary=comp,
        interaction_dim=k,
    )


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal angles only (non-increasing), skipping the vector work.

    Angles above pi/4 come from the cosines (singular values of the basis
    overlap), small ones from the sines (singular values of the residual of
    one basis against the other), which stay accurate where arccos cannot
    resolve.  Arguments are ordered canonically so the result is bitwise
    symmetric.
    """
    _check_compatible(a, b)
    qa, qb = a.basis, b.basis
    if qa.tobytes() > qb.tobytes():
        qa, qb = qb, qa
    sigma = np.linalg.svd(qb.T @ qa, compute_uv=False)
    from_cos = np.arccos(np.clip(sigma[::-1], 0.0, 1.0))
    resid = qb - qa @ (qa.T @ qb)
    sines = np.linalg.svd(resid, compute_uv=False)
    from_sin = np.arcsin(np.clip(sines, 0.0, 1.0))
    return np.where(from_cos > np.pi / 4, from_cos, from_sin)


def geodesic_distance(a: Subspace, b: Subspace) -> float:
    """Geodesic distance sqrt(sum theta_i^2) between two d-subspaces."""
    return float(np.linalg.norm(principal_angles(a, b)))


def geodesic_point(decomp: PrincipalDecomposition, t: float) -> Subspace:
    """The subspace at parameter ``t`` on the geodesic from first to second.

    Spanned by cos(t * theta_i) v_i + sin(t * theta_i) u_i.  Requires the
    largest principal angle to be below pi/2; at pi/2 the geodesic between
    the endpoints is not unique.
    """
    angles = decomp.angles
    if angles.size and angles[0] >= np.pi / 2 - 1e-12:
        raise GeodesicNotUnique(
            "largest principal angle is pi/2; geodesic is not unique"
        )
    cos_t = np.cos(t * angles)
    sin_t = np.sin(t * angles)
    basis = decomp.vectors_first * cos_t + decomp.complementary * sin_t
    return Subspace(basis)


def point_distance(x, l: Subspace) -> float:
    """Euclidean distance from the point ``x`` to the subspace ``l``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (l.ambient_dim,):
        raise DimensionError(
            f"point has length {x.shape}, ambient dimension is {l.ambient_dim}"
        )
    coeff = l.basis.T @ x
    return float(np.linalg.norm(x - l.basis @ coeff))


def point_distances(points: np.ndarray, l: Subspace) -> np.ndarray:
    """Distances of each row of ``points`` to ``l`` (vectorized)."""
    points = np.asarray(points, dtype=float)
    if points.shape[1] != l.ambient_dim:
        raise DimensionError(
            f"points have {points.shape[1]} columns, ambient dimension is "
            f"{l.ambient_dim}"
        )
    tang = points @ l.basis
    residual = points - tang @ l.basis.T
    return np.linalg.norm(residual, axis=1)


def project(x, l: Subspace) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``x`` in the basis of ``l`` and of its complement.

    Returns ``(tangential, orthogonal)`` with lengths d and D - d; the
    complement coordinates refer to the fixed, cached complement basis.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (l.ambient_dim,):
        raise DimensionError(
            f"point has length {x.shape}, ambient dimension is {l.ambient_dim}"
        )
    return l.basis.T @ x, l.complement_basis.T @ x


def random_subspace(ambient_dim: int, dim: int, rng_seed) -> Subspace:
    """Draw a subspace from the rotation-invariant distribution on G(D, d).

    A D x d matrix of independent standard normals is orthonormalized by QR
    with the R diagonal made positive, which makes the draw deterministic
    given the seed.  ``rng_seed`` may be an int, a seed sequence, or a
    ``numpy.random.Generator``.
    """
    if not (1 <= dim <= ambient_dim):
        raise DimensionError(f"need 1 <= d <= D, got d={dim}, D={ambient_dim}")
    rng = np.random.default_rng(rng_seed)
    g = rng.standard_normal((ambient_dim, dim))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return Subspace(q)


def orthonormalize(matrix: np.ndarray) -> Subspace:
    """Subspace spanned by the columns of ``matrix`` (must have full rank)."""
    matrix = _as_float_matrix(matrix)
    q, r = np.linalg.qr(matrix)
    if np.min(np.abs(np.diag(r))) < 1e-12 * max(1.0, np.max(np.abs(matrix))):
        raise DimensionError("columns do not span a subspace of full rank")
    q = q * np.sign(np.diag(r))
    return Subspace(q)
