"""Seeded synthetic point clouds used by the CLI and the test suite."""

from __future__ import annotations

import numpy as np

from qrips.metric import PointCloud


def circle_sample(n: int, seed: int, noise: float = 0.0) -> PointCloud:
    """n points at uniform random angles on the unit circle."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    pts = np.column_stack((np.cos(theta), np.sin(theta)))
    if noise > 0.0:
        pts = pts + rng.normal(0.0, noise, size=pts.shape)
    return PointCloud(pts)


def torus_sample(n: int, seed: int, tube: float = 1.0, ring: float = 2.0) -> PointCloud:
    """n points on a torus embedded in 3-space (ring radius 2, tube radius 1)."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    x = (ring + tube * np.cos(theta)) * np.cos(phi)
    y = (ring + tube * np.cos(theta)) * np.sin(phi)
    z = tube * np.sin(theta)
    return PointCloud(np.column_stack((x, y, z)))


def sphere_sample(n: int, seed: int, dim: int = 2) -> PointCloud:
    """n points uniform on the unit dim-sphere in (dim+1)-space."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, dim + 1))
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    return PointCloud(pts / norms)


def uniform_cube_sample(n: int, seed: int, dim: int = 3) -> PointCloud:
    """n points uniform in the unit cube."""
    rng = np.random.default_rng(seed)
    return PointCloud(rng.uniform(0.0, 1.0, size=(n, dim)))


GENERATORS = {
    "circle": circle_sample,
    "torus": torus_sample,
    "sphere": sphere_sample,
}
