"""Chart maps, their dilatations, and the lower Q-homeomorphism check.

At a point of differentiability the metric dilatations are read off the
metric-normalized differential

    M = g_*(f(x))^(1/2) Df(x) g(x)^(-1/2):

``L`` and ``l`` are its extreme singular values and ``J = |det M|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr, oracle
from .errors import ConfigError, ImageLeftChart, NotDifferentiable
from .manifold import (MetricField, area_factor, euclidean,
                       geodesic_distance, inverse_sqrt, matrix_sqrt)
from .modulus import ExponentSet, WeightField, lower_bound_integral
from .quadrature import ShellGrid

FD_STEP = 1e-5
FD_VARIATION = 0.1


@dataclass(frozen=True, eq=False)
class MapModel:
    """Map between charts, vectorized over leading axes."""

    forward: Callable[[np.ndarray], np.ndarray]
    source_metric: MetricField
    target_metric: MetricField
    tag: str = "symbolic"
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.forward(np.asarray(x, dtype=float))


def identity_map(metric: MetricField, target: MetricField | None = None) -> MapModel:
    n = metric.dim
    return MapModel(lambda x: x.copy(), metric, target or metric, "identity",
                    lambda x: np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n)).copy())


def linear_map(matrix, metric: MetricField, target: MetricField | None = None) -> MapModel:
    a = np.asarray(matrix, dtype=float)
    if a.shape != (metric.dim, metric.dim):
        raise ConfigError("linear map matrix has the wrong shape")
    if abs(np.linalg.det(a)) == 0:
        raise ConfigError("linear map must be invertible")
    return MapModel(lambda x: x @ a.T, metric, target or metric, "linear",
                    lambda x: np.broadcast_to(a, x.shape[:-1] + a.shape).copy(),
                    {"matrix": a.tolist()})


def radial_stretch(k: float, metric: MetricField, target: MetricField | None = None) -> MapModel:
    """``x -> |x|^(k-1) x``."""
    k = float(k)
    if k <= 0:
        raise ConfigError("radial stretch exponent must be positive")
    n = metric.dim

    def forward(x):
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(r > 0, r ** (k - 1), 0.0 if k > 1 else np.inf)
        return np.where(r > 0, scale * x, 0.0)

    def jacobian(x):
        r = np.linalg.norm(x, axis=-1)[..., None, None]
        outer = x[..., :, None] * x[..., None, :]
        eye = np.eye(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = r ** (k - 1) * eye + (k - 1) * r ** (k - 3) * outer
        zero = 0.0 if k > 1 else (1.0 if k == 1 else np.inf)
        return np.where(r > 0, d, zero * eye)

    return MapModel(forward, metric, target or metric, "radial_stretch", jacobian, {"k": k})


def symbolic_map(components, metric: MetricField, target: MetricField | None = None) -> MapModel:
    n = metric.dim
    if len(components) != n:
        raise ConfigError(f"symbolic map needs {n} components")
    funcs = [expr.point_function(str(c), n) for c in components]
    return MapModel(lambda x: np.stack([f(x) for f in funcs], axis=-1), metric,
                    target or metric, "symbolic", None, {"components": list(map(str, components))})


def map_from_spec(spec: dict, metric: MetricField, target: MetricField | None = None) -> MapModel:
    kind = spec.get("name", "identity")
    if kind == "identity":
        return identity_map(metric, target)
    if kind == "linear":
        return linear_map(spec["matrix"], metric, target)
    if kind == "radial_stretch":
        return radial_stretch(spec.get("k", 2.0), metric, target)
    if kind == "symbolic":
        return symbolic_map(spec["components"], metric, target)
    raise ConfigError(f"unknown map {kind!r}")


# --- differentials and dilatations -------------------------------------------


def _central(fmap: MapModel, x: np.ndarray, h: float) -> np.ndarray:
    n = x.shape[-1]
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        cols.append((fmap(x + e) - fmap(x - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def finite_difference_jacobian(fmap: MapModel, x, h: float = FD_STEP) -> np.ndarray:
    """Central differences at ``h`` and ``h/2`` combined by Richardson extrapolation."""
    x = np.asarray(x, dtype=float)
    coarse = _central(fmap, x, h)
    fine = _central(fmap, x, h / 2)
    scale = np.maximum(np.max(np.abs(fine), axis=(-2, -1)), 1e-12)
    variation = np.max(np.abs(fine - coarse), axis=(-2, -1)) / scale
    if np.any(variation > FD_VARIATION):
        raise NotDifferentiable("finite-difference differential does not settle")
    return (4.0 * fine - coarse) / 3.0


def differential(fmap: MapModel, x, analytic: bool = True) -> np.ndarray:
    if analytic and fmap.jacobian is not None:
        return fmap.jacobian(np.asarray(x, dtype=float))
    return finite_difference_jacobian(fmap, x)


def outer_dilatation(L, J, p: float):
    """``L^p / J`` where ``J != 0``, 1 where ``L = 0``, infinity otherwise."""
    L = np.asarray(L, dtype=float)
    J = np.asarray(J, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(J != 0, L**p / np.where(J != 0, J, 1.0), np.where(L == 0, 1.0, np.inf))
    return float(out) if out.ndim == 0 else out


@dataclass
class DilatationSample:
    point: np.ndarray
    L: float
    l: float
    J: float
    K_p: float

    @property
    def finitely_bilipschitz(self) -> bool:
        return 0 < self.l <= self.L < np.inf


def dilatation_fields(fmap: MapModel, x, exps: ExponentSet, analytic: bool = True):
    """Vectorized ``(L, l, J, K_p)`` at points ``x`` of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    df = differential(fmap, x, analytic)
    y = fmap(x)
    m = matrix_sqrt(fmap.target_metric(y)) @ df @ inverse_sqrt(fmap.source_metric(x))
    sv = np.linalg.svd(m, compute_uv=False)
    L, l = sv[..., 0], sv[..., -1]
    J = np.abs(np.linalg.det(m))
    return L, l, J, outer_dilatation(L, J, exps.p)


def dilatation_at(fmap: MapModel, point, exps: ExponentSet, analytic: bool = True) -> DilatationSample:
    point = np.asarray(point, dtype=float)
    L, l, J, K = dilatation_fields(fmap, point, exps, analytic)
    return DilatationSample(point, float(L), float(l), float(J), float(K))


def dilatation_weight(fmap: MapModel, exps: ExponentSet, analytic: bool = True) -> WeightField:
    """``Q(P) = K_p(P, f)`` as a weight field."""
    return WeightField(lambda x, r: dilatation_fields(fmap, x, exps, analytic)[3],
                       f"K_{exps.p:g} of {fmap.tag}")


# --- Lipschitz classification ------------------------------------------------


@dataclass
class ClassifyReport:
    lipschitz: bool
    lip_estimate: float
    bilipschitz: bool
    lower_estimate: float
    finitely_bilipschitz: bool
    failures: list = field(default_factory=list)


def _distances(metric: MetricField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if metric.kind == "euclidean":
        return np.linalg.norm(a - b, axis=-1)
    return np.array([geodesic_distance(metric, u, v) for u, v in zip(a, b)])


def classify_map(fmap: MapModel, grid: ShellGrid, exps: ExponentSet | None = None,
                 random_pairs: int = 1000, seed: int = 0, include_center: bool = False,
                 tol: float = 1e-12) -> ClassifyReport:
    """Sample distance quotients and pointwise dilatations over a ring grid.

    Pairs are all grid neighbors (next shell, next direction) plus
    ``random_pairs`` long-range pairs drawn with ``seed``.
    """
    exps = exps or ExponentSet(grid.dim, grid.dim)
    pts = grid.points
    m, N, n = pts.shape
    idx = np.arange(m * N).reshape(m, N)
    pairs = [np.stack([idx[:-1].ravel(), idx[1:].ravel()], -1),
             np.stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()], -1)]
    rng = np.random.default_rng(seed)
    pairs.append(rng.integers(0, m * N, size=(random_pairs, 2)))
    pairs = np.concatenate(pairs)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    flat = pts.reshape(-1, n)
    if include_center:
        flat = np.concatenate([flat, grid.ring.center[None]])
        near = np.arange(N)  # innermost shell
        pairs = np.concatenate([pairs, np.stack([np.full(N, m * N), near], -1)])
    images = fmap(flat)
    if not np.all(fmap.target_metric.inside(images)):
        raise ImageLeftChart("map image leaves the target chart")
    d_src = _distances(fmap.source_metric, flat[pairs[:, 0]], flat[pairs[:, 1]])
    d_tgt = _distances(fmap.target_metric, images[pairs[:, 0]], images[pairs[:, 1]])
    quotient = d_tgt / d_src
    lip = float(np.max(quotient))
    low = float(np.min(quotient))
    L, l, _, _ = dilatation_fields(fmap, flat, exps)
    bad = ~((l > tol) & (l <= L * (1 + 1e-12)) & np.isfinite(L))
    failures = [tuple(map(float, p)) for p in flat[bad]]
    return ClassifyReport(np.isfinite(lip), lip, bool(np.isfinite(lip) and low > tol), low,
                          not failures, failures)


# --- lower Q-homeomorphism inequality ----------------------------------------


@dataclass
class ImageBoundReport:
    lhs: float
    rhs: float
    holds: bool
    gap: float
    infinite_dilatation: bool = False
    kp_min: float = float("nan")
    kp_max: float = float("nan")


def image_family_areas(fmap: MapModel, grid: ShellGrid, analytic: bool = True):
    """Target area and volume weights of the pushed-forward shell grid.

    Area: induced target metric on ``u -> f(x(u))``; volume: ``J dV``.
    """
    images = fmap(grid.points)
    if not np.all(fmap.target_metric.inside(images)):
        raise ImageLeftChart("image of the ring leaves the target chart")
    df = differential(fmap, grid.points, analytic)
    pushed = np.einsum("...ij,...aj->...ai", df, grid.tangents)
    density = area_factor(fmap.target_metric, images, pushed)
    areas = density * grid.angular.weights[None] * grid.mask
    m = (matrix_sqrt(fmap.target_metric(images)) @ df
         @ inverse_sqrt(fmap.source_metric(grid.points)))
    jac = np.abs(np.linalg.det(m))
    return areas, jac * grid.cell_areas


def verify_image_bound(fmap: MapModel, grid: ShellGrid, exps: ExponentSet,
                    tolerance: float = 1e-3, seed: int = 0, analytic: bool = True) -> ImageBoundReport:
    """Compare the oracle image-family modulus with ``I`` for ``Q = K_p``.

    ``lhs``: projected-gradient minimum of ``int rho_*^p dV_*`` over densities
    on the image grid with unit ``(n-1)``-energy on every image shell.
    ``rhs``: ``int dr / ||K_p||_s``, shells with infinite ``K_p`` contributing 0.
    """
    if not exps.p > grid.dim - 1:
        raise ConfigError("the criterion needs p > n - 1")
    _, _, _, kp = dilatation_fields(fmap, grid.points, exps, analytic)
    infinite = bool(np.any(np.isinf(kp) & grid.mask))
    finite_rows = ~np.any(np.isinf(kp) & grid.mask, axis=1)
    kv = np.where(grid.mask & np.isfinite(kp), kp, 1.0)
    if infinite:
        norms = np.sum(kv**exps.s * grid.cell_areas, axis=1) ** (1 / exps.s)
        rhs = float(np.sum(np.where(finite_rows, grid.radial_weights / norms, 0.0)))
    else:
        rhs = lower_bound_integral(grid, WeightField(lambda x, r: kv), exps)
    areas, volumes = image_family_areas(fmap, grid, analytic)
    # beta = rho_*^(n-1): minimize sum beta^q dV_* with sum beta dA_* = 1
    result = oracle.weighted_power_program(volumes, areas, exps.q, seed=seed)
    lhs = float(np.dot(grid.radial_weights, result.values))
    finite_kp = kp[grid.mask & np.isfinite(kp)]
    return ImageBoundReport(lhs, rhs, lhs >= rhs - tolerance,
                          (lhs - rhs) / rhs if rhs else np.inf, infinite,
                          float(finite_kp.min()) if finite_kp.size else float("nan"),
                          float(finite_kp.max()) if finite_kp.size else float("nan"))


def rotated_chart(fmap: MapModel, rotation) -> MapModel:
    """Re-express a flat-source map in the chart ``x' = R x`` (target chart unchanged)."""
    rot = np.asarray(rotation, dtype=float)
    if fmap.source_metric.kind != "euclidean":
        raise ConfigError("chart rotation is implemented for flat source metrics")
    jac = None
    if fmap.jacobian is not None:
        def jac(x):
            return fmap.jacobian(x @ rot) @ rot.T
    return MapModel(lambda x: fmap(x @ rot), euclidean(fmap.source_metric.dim),
                    fmap.target_metric, fmap.tag + "-rotated", jac)
