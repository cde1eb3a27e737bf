"""Sampling from spherically symmetric mixtures of subspaces with outliers.

A draw picks a mixture component: with weight alpha_0 an outlier from a
spherically symmetric distribution on a ball, and with weight alpha_i a
point spherically symmetric inside the i-th subspace plus an independent
noise vector uniform on a ball of radius eps in the orthogonal complement
(so every p-th moment of the noise is at most eps^p).  Each point has its
own random stream derived from (seed, point index), so parallel generation
matches serial generation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .energy import Dataset
from .exceptions import ConfigError, DimensionError
from .grassmann import Subspace, geodesic_distance, random_subspace

BALL = "uniform-ball"
SPHERE = "uniform-sphere"
_DISTRIBUTIONS = (BALL, SPHERE)


@dataclass(frozen=True, eq=False)
class ComponentConfig:
    subspace: Subspace
    weight: float
    radius: float = 1.0
    distribution: str = BALL


@dataclass(frozen=True, eq=False)
class OutlierConfig:
    weight: float
    radius: float = 1.0
    distribution: str = BALL


@dataclass(frozen=True, eq=False)
class HlmModelConfig:
    """Mixture of K subspace components and one outlier component.

    Weights must sum to one; all supports live in the unit ball.  When
    ``most_significant`` is set, the first component weight must exceed the
    sum of the remaining subspace weights.  With ``rescale_noise`` (the
    default) every sampled point is shrunk by 1/(1 + noise_level) so the
    support stays inside the unit ball even with noise.
    """

    components: list[ComponentConfig]
    outlier: OutlierConfig
    noise_level: float = 0.0
    noise_kind: str = "uniform-ball-in-complement"
    most_significant: bool = True
    rescale_noise: bool = True

    def __post_init__(self):
        if not self.components:
            raise ConfigError("at least one subspace component is required")
        weights = [self.outlier.weight] + [c.weight for c in self.components]
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ConfigError(f"weights sum to {sum(weights)!r}, expected 1")
        if not (0 <= self.outlier.weight < 1):
            raise ConfigError("outlier weight must lie in [0, 1)")
        for c in self.components:
            # weight 1 is the pure single-subspace case (alpha0 = 0, K = 1)
            if not (0 < c.weight <= 1):
                raise ConfigError("component weights must lie in (0, 1]")
            if not (0 < c.radius <= 1):
                raise ConfigError("component radii must lie in (0, 1]")
            if c.distribution not in _DISTRIBUTIONS:
                raise ConfigError(f"unknown distribution {c.distribution!r}")
        if not (0 < self.outlier.radius <= 1):
            raise ConfigError("outlier radius must lie in (0, 1]")
        if self.noise_level < 0:
            raise ConfigError("noise level must be nonnegative")
        D = self.components[0].subspace.ambient_dim
        d = self.components[0].subspace.dim
        for c in self.components[1:]:
            if c.subspace.ambient_dim != D or c.subspace.dim != d:
                raise ConfigError("all component subspaces must share (D, d)")
        for i, a in enumerate(self.components):
            for b in self.components[i + 1 :]:
                if geodesic_distance(a.subspace, b.subspace) <= 1e-9:
                    raise ConfigError("component subspaces must be distinct")
        if self.most_significant and len(self.components) > 1:
            rest = sum(c.weight for c in self.components[1:])
            if not self.components[0].weight > rest:
                raise ConfigError(
                    "first component must outweigh the sum of the others"
                )
        if self.noise_level > 0 and d >= D:
            raise ConfigError("noise requires a nontrivial orthogonal complement")

    @property
    def ambient_dim(self) -> int:
        return self.components[0].subspace.ambient_dim

    @property
    def subspace_dim(self) -> int:
        return self.components[0].subspace.dim

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.outlier.weight] + [c.weight for c in self.components])

    @classmethod
    def from_json(cls, path_or_dict) -> "HlmModelConfig":
        """Build a config from a JSON file path or an already-parsed dict.

        Subspaces appear either inline as a D x d basis matrix (rows are
        ambient coordinates) or as ``{"random": {"seed": s}}``.
        """
        if isinstance(path_or_dict, dict):
            raw = path_or_dict
        else:
            with open(path_or_dict) as fh:
                raw = json.load(fh)
        try:
            D = int(raw["ambient_dim"])
            d = int(raw["subspace_dim"])
            comps = []
            for entry in raw["components"]:
                spec = entry["subspace"]
                if isinstance(spec, dict) and "random" in spec:
                    sub = random_subspace(D, d, int(spec["random"]["seed"]))
                else:
                    sub = Subspace(np.asarray(spec, dtype=float))
                if sub.ambient_dim != D or sub.dim != d:
                    raise ConfigError("inline basis shape disagrees with (D, d)")
                comps.append(
                    ComponentConfig(
                        subspace=sub,
                        weight=float(entry["weight"]),
                        radius=float(entry.get("radius", 1.0)),
                        distribution=entry.get("distribution", BALL),
                    )
                )
            out_raw = raw.get("outlier", {"weight": 0.0})
            outlier = OutlierConfig(
                weight=float(out_raw.get("weight", 0.0)),
                radius=float(out_raw.get("radius", 1.0)),
                distribution=out_raw.get("distribution", BALL),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed model config: {exc}") from exc
        except DimensionError as exc:
            raise ConfigError(f"malformed subspace basis: {exc}") from exc
        return cls(
            components=comps,
            outlier=outlier,
            noise_level=float(raw.get("noise_level", 0.0)),
            most_significant=bool(raw.get("most_significant", True)),
            rescale_noise=bool(raw.get("rescale_noise", True)),
        )

    def to_json_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "subspace_dim": self.subspace_dim,
            "components": [
                {
                    "subspace": c.subspace.basis.tolist(),
                    "weight": c.weight,
                    "radius": c.radius,
                    "distribution": c.distribution,
                }
                for c in self.components
            ],
            "outlier": {
                "weight": self.outlier.weight,
                "radius": self.outlier.radius,
                "distribution": self.outlier.distribution,
            },
            "noise_level": self.noise_level,
            "most_significant": self.most_significant,
            "rescale_noise": self.rescale_noise,
        }


def _seed_tuple(seed) -> tuple:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def _point_rng(seed, index: int) -> np.random.Generator:
    return np.random.default_rng(_seed_tuple(seed) + (index,))


def _ball_point(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal(dim)
    norm = np.linalg.norm(direction)
    while norm == 0.0:  # essentially impossible; keeps the draw well defined
        direction = rng.standard_normal(dim)
        norm = np.linalg.norm(direction)
    r = radius * rng.uniform() ** (1.0 / dim)
    return direction * (r / norm)


def _sphere_point(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal(dim)
    norm = np.linalg.norm(direction)
    while norm == 0.0:
        direction = rng.standard_normal(dim)
        norm = np.linalg.norm(direction)
    return direction * (radius / norm)


def _component_point(rng, dim, radius, distribution) -> np.ndarray:
    if distribution == BALL:
        return _ball_point(rng, dim, radius)
    return _sphere_point(rng, dim, radius)


def _draw(config: HlmModelConfig, rng: np.random.Generator, outlier_pool=None):
    """One labeled draw from the mixture."""
    u = rng.uniform()
    cum = config.outlier.weight
    if u < cum:
        if outlier_pool is not None:
            idx = rng.integers(len(outlier_pool))
            return 0, outlier_pool[idx].copy()
        return 0, _component_point(
            rng, config.ambient_dim, config.outlier.radius, config.outlier.distribution
        )
    for i, comp in enumerate(config.components, start=1):
        cum += comp.weight
        if u < cum or i == len(config.components):
            inplane = _component_point(rng, comp.subspace.dim, comp.radius, comp.distribution)
            x = comp.subspace.basis @ inplane
            if config.noise_level > 0:
                c_dim = config.ambient_dim - comp.subspace.dim
                noise = _ball_point(rng, c_dim, config.noise_level)
                x = x + comp.subspace.complement_basis @ noise
            return i, x
    raise AssertionError("unreachable")


def sample(config: HlmModelConfig, n: int, seed) -> Dataset:
    """Draw ``n`` labeled points from the mixture.

    Deterministic given the seed; point ``i`` consumes only the stream
    derived from (seed, i).
    """
    if n <= 0:
        raise ConfigError("n must be positive")
    points = np.empty((n, config.ambient_dim))
    labels = np.empty(n, dtype=int)
    for i in range(n):
        rng = _point_rng(seed, i)
        labels[i], points[i] = _draw(config, rng)
    if config.rescale_noise and config.noise_level > 0:
        points /= 1.0 + config.noise_level
    return Dataset(points, labels)


def sample_weakly_symmetric(
    config: HlmModelConfig, outlier_points: Dataset, n: int, seed
) -> Dataset:
    """Like :func:`sample`, but the outlier component draws uniformly from
    the supplied fixed point set (an arbitrary bounded outlier distribution).
    """
    if config.outlier.weight > 0 and len(outlier_points) == 0:
        raise ConfigError("outlier weight is positive but no outlier points given")
    if len(outlier_points) and outlier_points.ambient_dim != config.ambient_dim:
        raise ConfigError("outlier points live in the wrong ambient dimension")
    if len(outlier_points):
        norms = np.linalg.norm(outlier_points.points, axis=1)
        if norms.max() > 1.0 + 1e-12:
            raise ConfigError("outlier points must lie in the unit ball")
    if n <= 0:
        raise ConfigError("n must be positive")
    pool = outlier_points.points
    points = np.empty((n, config.ambient_dim))
    labels = np.empty(n, dtype=int)
    for i in range(n):
        rng = _point_rng(seed, i)
        labels[i], points[i] = _draw(config, rng, outlier_pool=pool)
    if config.rescale_noise and config.noise_level > 0:
        points /= 1.0 + config.noise_level
    return Dataset(points, labels)
