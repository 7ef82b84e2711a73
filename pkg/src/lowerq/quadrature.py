"""Quadrature on geodesic spheres, shells and rings.

A :class:`ShellGrid` samples the ring ``eps < r < eps0`` in normal polar
coordinates: composite Gauss-Legendre in the radius and a fixed rule on the
unit sphere of directions. By the Gauss lemma the volume weight of a cell is
its sphere-area weight times the radial weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifold import GeodesicRing, area_factor

DEFAULT_RADIAL_PANELS = 128
DEFAULT_RADIAL_ORDER = 4
DEFAULT_ANGULAR_NODES = {2: 256, 3: 128}
INFINITY_CAP = 1e12


@dataclass(frozen=True)
class AngularGrid:
    """Nodes and positive weights on the unit sphere ``S^(n-1)``."""

    dim: int
    directions: np.ndarray  # (N, n)
    weights: np.ndarray  # (N,)
    order: tuple[int, ...]
    # (polar, azimuth) index of each node for n = 3, azimuth index for n = 2
    index: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)


def angular_grid(n: int, nodes: int | None = None) -> AngularGrid:
    """Uniform midpoint rule on the circle, or Gauss-Legendre x uniform on ``S^2``.

    For ``n = 3``, ``nodes`` is the azimuthal count and the polar count is
    half of it.
    """
    nodes = int(nodes or DEFAULT_ANGULAR_NODES[n])
    if n == 2:
        phi = 2 * np.pi * (np.arange(nodes) + 0.5) / nodes
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        w = np.full(nodes, 2 * np.pi / nodes)
        return AngularGrid(2, dirs, w, (nodes,), np.arange(nodes)[:, None])
    if n == 3:
        n_az = nodes
        n_pol = max(nodes // 2, 2)
        ct, wt = np.polynomial.legendre.leggauss(n_pol)
        phi = 2 * np.pi * (np.arange(n_az) + 0.5) / n_az
        c, p = np.meshgrid(ct, phi, indexing="ij")
        st = np.sqrt(1 - c * c)
        dirs = np.stack([st * np.cos(p), st * np.sin(p), c], axis=-1).reshape(-1, 3)
        w = np.outer(wt, np.full(n_az, 2 * np.pi / n_az)).ravel()
        ij = np.stack(np.meshgrid(np.arange(n_pol), np.arange(n_az), indexing="ij"), -1)
        return AngularGrid(3, dirs, w, (n_pol, n_az), ij.reshape(-1, 2))
    raise ValueError(f"unsupported dimension {n}")


def radial_rule(a: float, b: float, panels: int = DEFAULT_RADIAL_PANELS,
                order: int = DEFAULT_RADIAL_ORDER):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None]).ravel()
    weights = (half[:, None] * w[None]).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class ShellGrid:
    """Discretized ring: shells ``k`` at ``radii[k]``, directions ``j``.

    ``cell_areas[k, j]`` is the area of the piece of ``D(P0, r_k)`` owned by
    node ``j`` (zero outside the domain); ``cell_volumes`` multiplies it by
    the radial weight.
    """

    ring: GeodesicRing
    radii: np.ndarray
    radial_weights: np.ndarray
    angular: AngularGrid
    points: np.ndarray  # (m, N, n)
    tangents: np.ndarray  # (m, N, n-1, n)
    area_density: np.ndarray  # (m, N), per unit round-sphere measure
    mask: np.ndarray  # (m, N)
    panels: int
    order: int

    @property
    def dim(self) -> int:
        return self.angular.dim

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def cell_areas(self) -> np.ndarray:
        return self.area_density * self.angular.weights[None] * self.mask

    @property
    def cell_volumes(self) -> np.ndarray:
        return self.cell_areas * self.radial_weights[:, None]

    @property
    def distances(self) -> np.ndarray:
        """Geodesic distance to the center of every cell, shape (m, N)."""
        return np.broadcast_to(self.radii[:, None], self.shape)

    def shell_areas(self) -> np.ndarray:
        return self.cell_areas.sum(axis=1)

    def resolution(self) -> dict:
        return {"radial_panels": self.panels, "radial_order": self.order,
                "angular_nodes": list(self.angular.order)}

    def evaluate(self, f) -> np.ndarray:
        """Sample a field ``f(x, r)`` on all cells with infinity clamping."""
        values = np.asarray(f(self.points, self.distances), dtype=float)
        values = np.broadcast_to(values, self.shape)
        return np.minimum(values, INFINITY_CAP)


def shell_grid_from_nodes(ring: GeodesicRing, radii, radial_weights,
                          angular: AngularGrid, panels: int = 0, order: int = 0) -> ShellGrid:
    nbhd = ring.neighborhood
    radii = np.asarray(radii, dtype=float)
    points, tangents = nbhd.rays(radii, angular.directions)
    density = area_factor(ring.metric, points, tangents)
    mask = np.asarray(ring.domain(points), dtype=bool)
    return ShellGrid(ring, radii, np.asarray(radial_weights, dtype=float), angular,
                     points, tangents, density, mask, panels, order)


def shell_grid(ring: GeodesicRing, radial_panels: int | None = None,
               angular_nodes: int | None = None,
               radial_order: int = DEFAULT_RADIAL_ORDER) -> ShellGrid:
    panels = int(radial_panels or DEFAULT_RADIAL_PANELS)
    radii, weights = radial_rule(ring.eps, ring.eps0, panels, radial_order)
    angular = angular_grid(ring.neighborhood.dim, angular_nodes)
    return shell_grid_from_nodes(ring, radii, weights, angular, panels, radial_order)


def integrate_sphere(grid: ShellGrid, shell_index: int, f) -> float:
    """``sum f dA`` over ``D(P0, r_k)``."""
    k = int(shell_index)
    values = np.asarray(f(grid.points[k], grid.distances[k]), dtype=float)
    values = np.minimum(np.broadcast_to(values, grid.shape[1:]), INFINITY_CAP)
    return float(np.sum(values * grid.cell_areas[k]))


def integrate_ring(grid: ShellGrid, f) -> float:
    """``sum f dV`` over the ring intersected with the domain."""
    return float(np.sum(grid.evaluate(f) * grid.cell_volumes))


def integrate_iterated(grid: ShellGrid, f) -> float:
    """Radial quadrature applied to per-shell sphere integrals."""
    shells = [integrate_sphere(grid, k, f) for k in range(len(grid.radii))]
    return float(np.dot(grid.radial_weights, shells))
