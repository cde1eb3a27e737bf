import numpy as np
import pytest

from lpsubspace import ComponentConfig, Dataset, HlmModelConfig, OutlierConfig, Subspace


@pytest.fixture
def x_axis():
    return Subspace(np.array([[1.0], [0.0]]))


@pytest.fixture
def y_axis():
    return Subspace(np.array([[0.0], [1.0]]))


def line_at(theta: float) -> Subspace:
    return Subspace(np.array([[np.cos(theta)], [np.sin(theta)]]))


def example_data(a, t0, theta0) -> Dataset:
    """N1 points on the x-axis with magnitudes |a_i| plus one point of
    magnitude t0 at angle theta0."""
    a = np.asarray(a, dtype=float)
    pts = np.concatenate(
        [
            np.stack([a, np.zeros_like(a)], axis=1),
            [[t0 * np.cos(theta0), t0 * np.sin(theta0)]],
        ]
    )
    return Dataset(pts)


def two_line_model(alpha=(0.3, 0.5, 0.2), theta=np.pi / 3, eps=0.0) -> HlmModelConfig:
    """Two lines in the plane at the given angle plus spherical outliers."""
    alpha0, alpha1, alpha2 = alpha
    comps = [ComponentConfig(line_at(0.0), alpha1)]
    if alpha2 > 0:
        comps.append(ComponentConfig(line_at(theta), alpha2))
    return HlmModelConfig(
        components=comps,
        outlier=OutlierConfig(alpha0),
        noise_level=eps,
    )
