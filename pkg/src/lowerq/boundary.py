"""Numeric evidence for the boundary divergence condition.

For a boundary point ``P0`` of a domain ``D`` the condition is

    int_0^delta dr / ||K||_{n-1}(P0, r) = infinity,
    ||K||_{n-1}(P0, r) = (int_{D cap S(P0, r)} K^(n-1) dA)^(1/(n-1)).

Divergence cannot be decided from finitely many samples. The integral is
evaluated on the dyadic ladder ``t_j = delta 2^-j`` and the increments
``d_j = I_j - I_{j-1}`` are classified:

* converges: the last ratios ``d_j / d_{j-1}`` stay below 0.9 and the
  geometric tail estimate is below ``1e-6``;
* diverges: the increments decay no faster than the harmonic series, i.e.
  the log-log slope of ``d_j`` against ``j`` is at least -1 over the second
  half of the ladder (this covers ``K = O(log 1/r)``, where ``I`` grows like
  ``log log 1/t``);
* inconclusive otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyShell
from .manifold import NormalNeighborhood, area_factor
from .modulus import WeightField
from .quadrature import INFINITY_CAP, angular_grid, radial_rule

DEFAULT_LEVELS = 20
CONVERGENCE_TAIL = 1e-6


@dataclass
class DivergenceReport:
    center: np.ndarray
    delta: float
    cutoffs: np.ndarray
    norms: np.ndarray  # ||K||_{n-1} at each cutoff
    partial_integrals: np.ndarray
    verdict: str
    growth_fit: float
    increment_exponent: float
    tail_estimate: float
    rows: list = field(default_factory=list, repr=False)


def _full(x):
    return np.ones(np.shape(x)[:-1], dtype=bool)


def sphere_norms(K: WeightField, nbhd: NormalNeighborhood, radii, exponent: float,
                 domain=None, angular_nodes: int | None = None) -> np.ndarray:
    """``(int_{D cap S(P0, r)} K^exponent dA)^(1/exponent)`` at each radius."""
    domain = domain or _full
    angular = angular_grid(nbhd.dim, angular_nodes)
    radii = np.asarray(radii, dtype=float)
    points, tangents = nbhd.rays(radii, angular.directions)
    areas = area_factor(nbhd.metric, points, tangents) * angular.weights[None]
    mask = np.asarray(domain(points), dtype=bool)
    areas = areas * mask
    empty = np.flatnonzero(areas.sum(axis=1) <= 0)
    if len(empty):
        raise EmptyShell(f"D cap S(P0, r) is empty at r = {radii[empty[0]]:.6g}")
    values = np.broadcast_to(np.asarray(K(points, np.broadcast_to(radii[:, None], mask.shape))),
                             mask.shape)
    values = np.minimum(np.where(mask, values, 0.0), INFINITY_CAP)
    if np.any(values[mask] <= 0):
        raise ConfigError("K must be positive near the boundary point")
    return np.sum(values**exponent * areas, axis=1) ** (1.0 / exponent)


def _slope(x, y):
    return float(np.polyfit(x, y, 1)[0])


def classify_increments(increments: np.ndarray) -> tuple[str, float, float]:
    """Verdict, log-log increment slope and geometric tail estimate."""
    d = np.asarray(increments, dtype=float)
    m = len(d)
    j = np.arange(1, m + 1)
    half = slice(m // 2, m)
    exponent = _slope(np.log(j[half]), np.log(d[half]))
    ratios = d[-3:] / d[-4:-1]
    tail = np.inf
    if np.all(ratios < 0.9):
        rho = ratios[-1]
        tail = float(d[-1] * rho / (1 - rho))
    if tail < CONVERGENCE_TAIL:
        return "converges", exponent, tail
    if exponent >= -1.0:
        return "diverges", exponent, tail
    return "inconclusive", exponent, tail


def divergence_check(K: WeightField, nbhd: NormalNeighborhood, delta: float, domain=None,
                     cutoffs=None, panels: int = 4, order: int = 8,
                     angular_nodes: int | None = None) -> DivergenceReport:
    """Partial integrals ``I_j = int_{t_j}^delta dr / ||K||_{n-1}`` on a cutoff ladder."""
    if not 0 < delta <= nbhd.radius_max:
        raise ConfigError(f"delta must lie in (0, {nbhd.radius_max}]")
    if cutoffs is None:
        cutoffs = delta * 2.0 ** -np.arange(1, DEFAULT_LEVELS + 1)
    cutoffs = np.asarray(cutoffs, dtype=float)
    if np.any(np.diff(cutoffs) >= 0) or cutoffs[0] >= delta or cutoffs[-1] <= 0:
        raise ConfigError("cutoffs must decrease from below delta towards 0")
    if len(cutoffs) < 6:
        raise ConfigError("need at least 6 cutoffs")
    exponent = nbhd.dim - 1
    edges = np.concatenate([[delta], cutoffs])
    nodes, weights, piece = [], [], []
    for i in range(len(cutoffs)):
        x, w = radial_rule(edges[i + 1], edges[i], panels, order)
        nodes.append(x)
        weights.append(w)
        piece.append(np.full(len(x), i))
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    piece = np.concatenate(piece)
    norms = sphere_norms(K, nbhd, nodes, exponent, domain, angular_nodes)
    increments = np.bincount(piece, weights=weights / norms, minlength=len(cutoffs))
    partial = np.cumsum(increments)
    cut_norms = sphere_norms(K, nbhd, cutoffs, exponent, domain, angular_nodes)
    verdict, inc_exp, tail = classify_increments(increments)
    half = slice(len(cutoffs) // 2, len(cutoffs))
    growth = _slope(np.log(1.0 / cutoffs[half]), partial[half])
    rows = [(float(t), float(nk), float(i)) for t, nk, i in zip(cutoffs, cut_norms, partial)]
    return DivergenceReport(nbhd.center, float(delta), cutoffs, cut_norms, partial,
                            verdict, growth, inc_exp, tail, rows)


@dataclass
class LogGrowthReport:
    is_O_log: bool
    constant: float
    radii: np.ndarray
    ratios: np.ndarray


def log_growth_fit(K: WeightField, nbhd: NormalNeighborhood, delta: float, domain=None,
                   levels: int = DEFAULT_LEVELS, angular_nodes: int | None = None) -> LogGrowthReport:
    """Ratio of the shell supremum of ``K`` to ``log(1/r)`` on ``r = delta 2^-j``.

    ``is_O_log`` holds when the ratio does not grow along the ladder;
    ``constant`` is the ratio at the smallest radius.
    """
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1) so that log(1/r) > 0")
    if delta > nbhd.radius_max:
        raise ConfigError(f"delta exceeds the normal radius {nbhd.radius_max}")
    domain = domain or _full
    radii = delta * 2.0 ** -np.arange(0, levels + 1)
    angular = angular_grid(nbhd.dim, angular_nodes)
    points, _ = nbhd.rays(radii, angular.directions)
    mask = np.asarray(domain(points), dtype=bool)
    values = np.broadcast_to(np.asarray(K(points, np.broadcast_to(radii[:, None], mask.shape))),
                             mask.shape)
    sup = np.max(np.where(mask, values, -np.inf), axis=1)
    ratios = sup / np.log(1.0 / radii)
    mid = levels // 2
    tol = 1 + 1e-6
    bounded = (np.all(np.isfinite(ratios))
               and ratios[-1] <= tol * ratios[mid]
               and np.max(ratios[mid:]) <= tol * np.max(ratios[: mid + 1]))
    return LogGrowthReport(bool(bounded), float(ratios[-1]), radii, ratios)
